"""Probabilistic target-host model and its information-entropy arithmetic.

A host's exposed state is tracked as one categorical distribution over OS
candidates plus three groups of independent Bernoulli beliefs (ports,
applications, protection mechanisms).  Uncertainty is measured in bits;
evidence arrives as Observations that collapse components to certainty,
so entropy only ever decreases as a test progresses.

All types are immutable values: operations return new beliefs and never
mutate their inputs, so beliefs can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

__all__ = [
    "BeliefError",
    "HostBelief",
    "NetworkBelief",
    "HostGroundTruth",
    "ObservationKind",
    "Observation",
    "new_host_belief",
    "host_entropy",
    "network_entropy",
    "apply_observation",
    "information_gain",
    "belief_to_json",
    "belief_from_json",
]

_OS_SUM_TOL = 1e-9


class BeliefError(ValueError):
    """Raised for invalid belief values or observations."""


def _check_unit(p: float, what: str) -> None:
    if not (0.0 <= p <= 1.0):
        raise BeliefError(f"{what} must lie in [0, 1], got {p!r}")


def _degenerate(p: float) -> bool:
    return p == 0.0 or p == 1.0


@dataclass(frozen=True)
class HostBelief:
    """Belief state for one target host.

    os_dist is a categorical distribution over os_candidates; ports, apps
    and protections are vectors of independent open/present probabilities.
    A controlled host is fully known: every component must be degenerate.
    """

    host_id: str
    os_candidates: tuple[str, ...]
    os_dist: tuple[float, ...]
    ports: tuple[float, ...] = ()
    apps: tuple[float, ...] = ()
    protections: tuple[float, ...] = ()
    controlled: bool = False

    def __post_init__(self) -> None:
        if not self.host_id:
            raise BeliefError("host_id must be non-empty")
        if not self.os_candidates:
            raise BeliefError("no OS hypothesis")
        if len(self.os_candidates) != len(self.os_dist):
            raise BeliefError(
                f"host {self.host_id!r}: os_dist length {len(self.os_dist)} "
                f"does not match {len(self.os_candidates)} candidates"
            )
        for p in self.os_dist:
            _check_unit(p, f"host {self.host_id!r}: os probability")
        total = math.fsum(self.os_dist)
        if abs(total - 1.0) > _OS_SUM_TOL:
            raise BeliefError(
                f"host {self.host_id!r}: os_dist sums to {total!r}, expected 1"
            )
        for name, vec in (
            ("port", self.ports),
            ("app", self.apps),
            ("protection", self.protections),
        ):
            for p in vec:
                _check_unit(p, f"host {self.host_id!r}: {name} probability")
        if self.controlled and not self.is_fully_determined():
            raise BeliefError(
                f"host {self.host_id!r}: controlled host must have all "
                "components degenerate"
            )

    def is_fully_determined(self) -> bool:
        """True when every component probability is exactly 0 or 1."""
        return all(_degenerate(p) for p in self.os_dist) and all(
            _degenerate(p) for vec in (self.ports, self.apps, self.protections) for p in vec
        )


@dataclass(frozen=True)
class NetworkBelief:
    """Belief over a set of hosts, iterated in sorted host_id order."""

    hosts: tuple[HostBelief, ...]

    def __post_init__(self) -> None:
        ids = [h.host_id for h in self.hosts]
        if len(set(ids)) != len(ids):
            raise BeliefError("duplicate host_id in network belief")
        ordered = tuple(sorted(self.hosts, key=lambda h: h.host_id))
        object.__setattr__(self, "hosts", ordered)

    def host(self, host_id: str) -> HostBelief:
        for h in self.hosts:
            if h.host_id == host_id:
                return h
        raise BeliefError(f"unknown host_id {host_id!r}")

    def host_ids(self) -> tuple[str, ...]:
        return tuple(h.host_id for h in self.hosts)

    def with_host(self, updated: HostBelief) -> "NetworkBelief":
        """Return a copy with one host replaced (matched by host_id)."""
        if updated.host_id not in self.host_ids():
            raise BeliefError(f"unknown host_id {updated.host_id!r}")
        return NetworkBelief(
            tuple(updated if h.host_id == updated.host_id else h for h in self.hosts)
        )


@dataclass(frozen=True)
class HostGroundTruth:
    """Full component state reported when control of a host is gained."""

    os_index: int
    ports: tuple[bool, ...]
    apps: tuple[bool, ...]
    protections: tuple[bool, ...]


class ObservationKind(Enum):
    OS_IDENTIFIED = "os_identified"
    PORT_STATE = "port_state"
    APP_STATE = "app_state"
    PROTECTION_STATE = "protection_state"
    CONTROL_GAINED = "control_gained"
    NO_EFFECT = "no_effect"


# Observation kinds that carry (index, value) evidence for one Bernoulli slot.
_STATE_KINDS = {
    ObservationKind.PORT_STATE: "ports",
    ObservationKind.APP_STATE: "apps",
    ObservationKind.PROTECTION_STATE: "protections",
}


@dataclass(frozen=True)
class Observation:
    """A single piece of evidence about one host.

    index/value apply to os_identified and the three *_state kinds; ground
    optionally carries the full component readout for control_gained.
    """

    host_id: str
    kind: ObservationKind
    index: Optional[int] = None
    value: Optional[bool] = None
    ground: Optional[HostGroundTruth] = None


def new_host_belief(
    host_id: str,
    os_candidates: Sequence[str],
    n_ports: int,
    n_apps: int = 0,
    n_protections: int = 0,
    prior: str = "max-uncertainty",
) -> HostBelief:
    """Fresh max-uncertainty belief: uniform OS, every Bernoulli at 0.5."""
    if not os_candidates:
        raise BeliefError("no OS hypothesis")
    if prior != "max-uncertainty":
        raise BeliefError(f"unknown prior policy {prior!r}")
    if min(n_ports, n_apps, n_protections) < 0:
        raise BeliefError("component counts must be >= 0")
    c = len(os_candidates)
    return HostBelief(
        host_id=host_id,
        os_candidates=tuple(os_candidates),
        os_dist=tuple(1.0 / c for _ in range(c)),
        ports=(0.5,) * n_ports,
        apps=(0.5,) * n_apps,
        protections=(0.5,) * n_protections,
    )


def _plogp(p: float) -> float:
    # 0*log(0) taken as 0 by convention.
    if p <= 0.0:
        return 0.0
    return p * math.log2(p)


def _binary_entropy(p: float) -> float:
    return -(_plogp(p) + _plogp(1.0 - p))


def host_entropy(b: HostBelief) -> float:
    """Uncertainty about one host in bits.

    Sum of binary entropies over the three Bernoulli groups plus the
    Shannon entropy of the OS distribution.  Exactly 0 for a controlled
    host.
    """
    if b.controlled:
        return 0.0
    total = 0.0
    for vec in (b.ports, b.apps, b.protections):
        for p in vec:
            total += _binary_entropy(p)
    for p in b.os_dist:
        total -= _plogp(p)
    return total


def network_entropy(nb: NetworkBelief) -> float:
    """Total uncertainty across the network: sum of host entropies."""
    total = 0.0
    for h in nb.hosts:
        total += host_entropy(h)
    return total


def _point_mass(size: int, index: int) -> tuple[float, ...]:
    return tuple(1.0 if i == index else 0.0 for i in range(size))


def _map_collapse(host: HostBelief) -> HostGroundTruth:
    # Most-likely value per component; >= 0.5 counts as present.
    os_index = max(range(len(host.os_dist)), key=lambda i: (host.os_dist[i], -i))
    return HostGroundTruth(
        os_index=os_index,
        ports=tuple(p >= 0.5 for p in host.ports),
        apps=tuple(p >= 0.5 for p in host.apps),
        protections=tuple(p >= 0.5 for p in host.protections),
    )


def _check_index(index: Optional[int], size: int, what: str) -> int:
    if index is None or not (0 <= index < size):
        raise BeliefError(f"{what} index {index!r} out of range (size {size})")
    return index


def apply_observation(nb: NetworkBelief, obs: Observation) -> NetworkBelief:
    """Collapse one component of the belief per the observed evidence.

    Observations are noiseless: a scanned component is set to exactly 0 or
    1, os_identified collapses the OS distribution to a point mass, and
    control_gained pins every component (to the reported ground truth, or
    to the current most-likely value when none is given) and marks the
    host controlled.  no_effect returns the belief unchanged.
    """
    host = nb.host(obs.host_id)
    kind = obs.kind

    if kind is ObservationKind.NO_EFFECT:
        return nb

    if kind is ObservationKind.OS_IDENTIFIED:
        idx = _check_index(obs.index, len(host.os_dist), "os")
        updated = replace(host, os_dist=_point_mass(len(host.os_dist), idx))
        return nb.with_host(updated)

    if kind in _STATE_KINDS:
        field = _STATE_KINDS[kind]
        vec: tuple[float, ...] = getattr(host, field)
        idx = _check_index(obs.index, len(vec), field)
        if obs.value is None:
            raise BeliefError(f"{kind.value} observation requires a value")
        new_vec = tuple(
            (1.0 if obs.value else 0.0) if i == idx else p for i, p in enumerate(vec)
        )
        return nb.with_host(replace(host, **{field: new_vec}))

    if kind is ObservationKind.CONTROL_GAINED:
        ground = obs.ground if obs.ground is not None else _map_collapse(host)
        _check_index(ground.os_index, len(host.os_dist), "os")
        for name, want in (
            ("ports", host.ports),
            ("apps", host.apps),
            ("protections", host.protections),
        ):
            got = getattr(ground, name)
            if len(got) != len(want):
                raise BeliefError(
                    f"host {host.host_id!r}: ground truth {name} length "
                    f"{len(got)} does not match belief ({len(want)})"
                )
        updated = HostBelief(
            host_id=host.host_id,
            os_candidates=host.os_candidates,
            os_dist=_point_mass(len(host.os_dist), ground.os_index),
            ports=tuple(1.0 if v else 0.0 for v in ground.ports),
            apps=tuple(1.0 if v else 0.0 for v in ground.apps),
            protections=tuple(1.0 if v else 0.0 for v in ground.protections),
            controlled=True,
        )
        return nb.with_host(updated)

    raise BeliefError(f"unsupported observation kind {kind!r}")


def information_gain(before: NetworkBelief, after: NetworkBelief) -> float:
    """Entropy before minus entropy after, in bits.

    Non-negative whenever `after` came from `before` via certainty
    collapses; zero when nothing changed.
    """
    if before.host_ids() != after.host_ids():
        raise BeliefError("information_gain requires identical host sets")
    return network_entropy(before) - network_entropy(after)


# --- JSON serialization ----------------------------------------------------
#
# {"hosts":[{"id", "os":{"candidates":[...], "p":[...]},
#            "ports":[...], "apps":[...], "protections":[...],
#            "controlled": bool}]}


def belief_to_json(nb: NetworkBelief) -> str:
    doc = {
        "hosts": [
            {
                "id": h.host_id,
                "os": {"candidates": list(h.os_candidates), "p": list(h.os_dist)},
                "ports": list(h.ports),
                "apps": list(h.apps),
                "protections": list(h.protections),
                "controlled": h.controlled,
            }
            for h in nb.hosts
        ]
    }
    return json.dumps(doc, indent=2)


def _float_vec(raw: Iterable, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in raw)
    except (TypeError, ValueError) as exc:
        raise BeliefError(f"{what}: expected a list of numbers") from exc


def belief_from_json(text: str) -> NetworkBelief:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BeliefError(f"invalid belief document: {exc}") from exc
    if not isinstance(doc, Mapping) or "hosts" not in doc:
        raise BeliefError('belief document must be an object with a "hosts" list')
    hosts = []
    for i, entry in enumerate(doc["hosts"]):
        where = f"hosts[{i}]"
        try:
            os_block = entry["os"]
            hosts.append(
                HostBelief(
                    host_id=str(entry["id"]),
                    os_candidates=tuple(str(c) for c in os_block["candidates"]),
                    os_dist=_float_vec(os_block["p"], f"{where}.os.p"),
                    ports=_float_vec(entry.get("ports", ()), f"{where}.ports"),
                    apps=_float_vec(entry.get("apps", ()), f"{where}.apps"),
                    protections=_float_vec(
                        entry.get("protections", ()), f"{where}.protections"
                    ),
                    controlled=bool(entry.get("controlled", False)),
                )
            )
        except KeyError as exc:
            raise BeliefError(f"{where}: missing field {exc.args[0]!r}") from exc
    return NetworkBelief(tuple(hosts))

"""Observer-dependent state assignment for separated measurements.

Minkowski scaffolding (events, causal order, light cones, boosts) plus a
chart prescription for two-particle measurement programmes: every
observation point builds a full region-by-region chart.  Each region of
the influence cover carries the state updated by exactly the
measurements that bear on it, and the observer's information decides,
once for the whole chart, which of those updates are selective
(conditioned on a registered outcome) and which are nonselective.  The
boundaries are the measurement events' light cones, so the assignment is
a covariant partition of spacetime rather than a single global history.

Conventions: units with c = 1, coordinates (t, x, y, z), metric
signature (+, -, -, -).  Cones are closed (boundary and vertex
included).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from .bell import singlet_state
from .instruments import NULL_PROBABILITY
from .operators import (
    I2,
    check_density,
    expectation,
    matrix_from_pairs,
    matrix_to_pairs,
    partial_trace,
    sqrt_psd,
    tensor,
)
from .spin_povm import unit_vector, unsharp_effect

__all__ = [
    "SpacetimeEvent",
    "CausalRelation",
    "interval",
    "causal_relation",
    "in_backward_cone",
    "in_forward_cone",
    "CausalRegion",
    "CoverRegion",
    "Cover",
    "influence_cover",
    "information_cover",
    "lorentz_boost",
    "boost_event",
    "Worldline",
    "Measurement",
    "MeasurementProgramme",
    "RegionAssignment",
    "ChartResult",
    "observer_chart",
    "ConsistencyReport",
    "check_consistency",
    "programme_to_json_dict",
    "programme_from_json_dict",
]

ORDER_TOL = 1e-12
MIXTURE_TOL = 1e-9
SIGNALLING_TOL = 1e-9
GROUPING_TOL = 1e-12


@dataclass(frozen=True)
class SpacetimeEvent:
    """A point of Minkowski spacetime, coordinates (t, x, y, z)."""

    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("t", "x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    @classmethod
    def from_sequence(cls, seq) -> "SpacetimeEvent":
        t, x, y, z = (float(c) for c in seq)
        return cls(t, x, y, z)


class CausalRelation(Enum):
    COINCIDENT = "coincident"
    TIMELIKE_FUTURE = "timelike future"
    TIMELIKE_PAST = "timelike past"
    LIGHTLIKE_FUTURE = "lightlike future"
    LIGHTLIKE_PAST = "lightlike past"
    SPACELIKE = "spacelike"


def interval(a: SpacetimeEvent, b: SpacetimeEvent) -> float:
    """Squared invariant interval of the separation from a to b."""
    dt = b.t - a.t
    dx = np.array([b.x - a.x, b.y - a.y, b.z - a.z])
    return float(dt * dt - dx @ dx)


def causal_relation(a: SpacetimeEvent, b: SpacetimeEvent) -> CausalRelation:
    """How b lies relative to a.

    The classification is by the exact signs of the squared interval and
    the time separation; points on the light cone count as lightlike, not
    as a tolerance band around it.
    """
    dt = b.t - a.t
    s2 = interval(a, b)
    if dt == 0.0 and b.x == a.x and b.y == a.y and b.z == a.z:
        return CausalRelation.COINCIDENT
    if s2 > 0.0:
        return CausalRelation.TIMELIKE_FUTURE if dt > 0.0 else CausalRelation.TIMELIKE_PAST
    if s2 == 0.0:
        return CausalRelation.LIGHTLIKE_FUTURE if dt > 0.0 else CausalRelation.LIGHTLIKE_PAST
    return CausalRelation.SPACELIKE


_PAST_RELATIONS = frozenset(
    {CausalRelation.COINCIDENT, CausalRelation.TIMELIKE_PAST, CausalRelation.LIGHTLIKE_PAST}
)
_FUTURE_RELATIONS = frozenset(
    {CausalRelation.COINCIDENT, CausalRelation.TIMELIKE_FUTURE, CausalRelation.LIGHTLIKE_FUTURE}
)


def in_backward_cone(point: SpacetimeEvent, vertex: SpacetimeEvent) -> bool:
    """Whether a point lies in the closed backward cone of a vertex."""
    return causal_relation(vertex, point) in _PAST_RELATIONS


def in_forward_cone(point: SpacetimeEvent, vertex: SpacetimeEvent) -> bool:
    """Whether a point lies in the closed forward cone of a vertex."""
    return causal_relation(vertex, point) in _FUTURE_RELATIONS


@dataclass(frozen=True)
class CausalRegion:
    """A closed light cone, forward or backward, with a given vertex."""

    kind: str  # 'backward' or 'forward'
    vertex: SpacetimeEvent

    def __post_init__(self):
        if self.kind not in ("backward", "forward"):
            raise ValueError(f"region kind must be 'backward' or 'forward', got {self.kind!r}")

    def contains(self, point: SpacetimeEvent) -> bool:
        if self.kind == "backward":
            return in_backward_cone(point, self.vertex)
        return in_forward_cone(point, self.vertex)

    def contains_many(self, coords) -> np.ndarray:
        """Vectorized membership test for an (N, 4) coordinate array."""
        pts = np.asarray(coords, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ValueError(f"expected an (N, 4) coordinate array, got shape {pts.shape}")
        delta = pts - self.vertex.coords
        if self.kind == "backward":
            delta = -delta
        dt = delta[:, 0]
        space2 = np.einsum("ij,ij->i", delta[:, 1:], delta[:, 1:])
        return (dt >= 0.0) & (dt * dt - space2 >= 0.0)


@dataclass(frozen=True)
class CoverRegion:
    flags: tuple[int, ...]
    empty: bool


# Region enumeration orders.  For the influence cover, regions are
# listed past-first; the information cover lists the one-sided regions
# in event order instead.
_INFLUENCE_FLAG_ORDER = {1: ((0,), (1,)), 2: ((0, 0), (0, 1), (1, 0), (1, 1))}
_INFORMATION_FLAG_ORDER = {1: ((0,), (1,)), 2: ((0, 0), (1, 0), (0, 1), (1, 1))}


@dataclass(frozen=True, eq=False)
class Cover:
    """A partition of spacetime by the light cones of measurement events.

    The influence cover flags, per event, whether a point lies outside
    the event's closed backward cone (flag 1: the measurement bears on
    state assignments at that point).  The information cover flags
    whether a point lies inside the event's closed forward cone (flag 1:
    the outcome is available there).
    """

    kind: str  # 'influence' or 'information'
    events: tuple[SpacetimeEvent, ...]
    regions: tuple[CoverRegion, ...]

    def flags_at(self, point: SpacetimeEvent) -> tuple[int, ...]:
        if self.kind == "influence":
            return tuple(0 if in_backward_cone(point, e) else 1 for e in self.events)
        return tuple(1 if in_forward_cone(point, e) else 0 for e in self.events)

    def flags_at_many(self, coords) -> np.ndarray:
        pts = np.asarray(coords, dtype=float)
        columns = []
        for e in self.events:
            if self.kind == "influence":
                inside = CausalRegion("backward", e).contains_many(pts)
                columns.append(np.where(inside, 0, 1))
            else:
                inside = CausalRegion("forward", e).contains_many(pts)
                columns.append(np.where(inside, 1, 0))
        return np.stack(columns, axis=1)

    def region_index(self, point: SpacetimeEvent) -> int:
        flags = self.flags_at(point)
        for idx, region in enumerate(self.regions):
            if region.flags == flags:
                return idx
        raise ValueError(f"flags {flags} not in cover")  # unreachable by construction


def _as_events(events) -> tuple[SpacetimeEvent, ...]:
    out = tuple(
        e if isinstance(e, SpacetimeEvent) else SpacetimeEvent.from_sequence(e)
        for e in events
    )
    if len(out) not in (1, 2):
        raise ValueError(f"covers are implemented for 1 or 2 events, got {len(out)}")
    return out


def influence_cover(events) -> Cover:
    """Partition by backward cones, with exact emptiness for each region.

    A one-sided region (inside one backward cone, outside the other) is
    empty exactly when the first cone is contained in the second, which
    for equal-shape cones reduces to the vertex lying in the other cone.
    """
    evts = _as_events(events)
    regions = []
    for flags in _INFLUENCE_FLAG_ORDER[len(evts)]:
        empty = False
        if len(evts) == 2:
            if flags == (0, 1):
                empty = in_backward_cone(evts[0], evts[1])
            elif flags == (1, 0):
                empty = in_backward_cone(evts[1], evts[0])
        regions.append(CoverRegion(flags, empty))
    return Cover("influence", evts, tuple(regions))


def information_cover(events) -> Cover:
    """Partition by forward cones, with exact emptiness for each region."""
    evts = _as_events(events)
    regions = []
    for flags in _INFORMATION_FLAG_ORDER[len(evts)]:
        empty = False
        if len(evts) == 2:
            if flags == (1, 0):
                empty = in_forward_cone(evts[0], evts[1])
            elif flags == (0, 1):
                empty = in_forward_cone(evts[1], evts[0])
        regions.append(CoverRegion(flags, empty))
    return Cover("information", evts, tuple(regions))


def lorentz_boost(velocity) -> np.ndarray:
    """Boost matrix acting on (t, x, y, z) coordinate columns."""
    v = np.asarray(velocity, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"velocity must be a 3-vector, got shape {v.shape}")
    speed2 = float(v @ v)
    if speed2 >= 1.0:
        raise ValueError(f"speed {np.sqrt(speed2)!r} is not below 1")
    if speed2 == 0.0:
        return np.eye(4)
    gamma = 1.0 / np.sqrt(1.0 - speed2)
    boost = np.eye(4)
    boost[0, 0] = gamma
    boost[0, 1:] = -gamma * v
    boost[1:, 0] = -gamma * v
    boost[1:, 1:] += (gamma - 1.0) * np.outer(v, v) / speed2
    return boost


def boost_event(boost: np.ndarray, event: SpacetimeEvent) -> SpacetimeEvent:
    return SpacetimeEvent.from_sequence(np.asarray(boost) @ event.coords)


@dataclass(frozen=True, eq=False)
class Worldline:
    """Inertial observer worldline with subluminal coordinate velocity."""

    origin: SpacetimeEvent
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        v = np.asarray(self.velocity, dtype=float)
        if v.shape != (3,):
            raise ValueError("worldline velocity must be a 3-vector")
        if float(v @ v) >= 1.0:
            raise ValueError("worldline must be timelike (speed below 1)")
        object.__setattr__(self, "velocity", tuple(float(c) for c in v))

    def event_at(self, dt: float) -> SpacetimeEvent:
        vx, vy, vz = self.velocity
        o = self.origin
        return SpacetimeEvent(o.t + dt, o.x + vx * dt, o.y + vy * dt, o.z + vz * dt)

    def sample(self, offsets) -> tuple[SpacetimeEvent, ...]:
        return tuple(self.event_at(float(dt)) for dt in offsets)


@dataclass(frozen=True, eq=False)
class Measurement:
    """An unsharp spin measurement localized at a spacetime event."""

    event: SpacetimeEvent
    axis: np.ndarray
    subsystem: int

    def __post_init__(self):
        if not isinstance(self.event, SpacetimeEvent):
            object.__setattr__(self, "event", SpacetimeEvent.from_sequence(self.event))
        object.__setattr__(self, "axis", unit_vector(self.axis))
        if self.subsystem not in (1, 2):
            raise ValueError(f"subsystem must be 1 or 2, got {self.subsystem}")


@dataclass(frozen=True, eq=False)
class MeasurementProgramme:
    """One or two localized measurements on a two-particle state.

    ``initial`` is either the string ``'singlet'`` or a 4x4 density
    matrix.  ``outcomes`` optionally records the registered outcome of
    each measurement (entries +1, -1, or None for unrecorded).
    """

    initial: object
    sharpness: float
    measurements: tuple[Measurement, ...]
    outcomes: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if not 1 <= len(self.measurements) <= 2:
            raise ValueError("programme needs one or two measurements")
        if len(self.measurements) == 2:
            if self.measurements[0].subsystem == self.measurements[1].subsystem:
                raise ValueError("two measurements must address distinct subsystems")
        if not 0.0 <= self.sharpness <= 1.0:
            raise ValueError(f"sharpness must lie in [0, 1], got {self.sharpness!r}")
        object.__setattr__(self, "sharpness", float(self.sharpness))
        if self.outcomes is not None:
            outs = tuple(self.outcomes)
            if len(outs) != len(self.measurements):
                raise ValueError("outcomes must match measurements one to one")
            for o in outs:
                if o not in (1, -1, None):
                    raise ValueError(f"outcomes must be +1, -1 or None, got {o!r}")
            object.__setattr__(self, "outcomes", outs)
        if not (isinstance(self.initial, str) and self.initial == "singlet"):
            object.__setattr__(self, "initial", check_density(self.initial))
            if np.asarray(self.initial).shape != (4, 4):
                raise ValueError("initial state must be a two-particle (4x4) density matrix")

    @property
    def initial_state(self) -> np.ndarray:
        if isinstance(self.initial, str):
            return singlet_state()
        return np.asarray(self.initial)

    @property
    def is_singlet(self) -> bool:
        return isinstance(self.initial, str) or bool(
            np.allclose(self.initial_state, singlet_state(), atol=1e-12)
        )

    def events(self) -> tuple[SpacetimeEvent, ...]:
        return tuple(m.event for m in self.measurements)


def _embed(operator: np.ndarray, subsystem: int) -> np.ndarray:
    return tensor(operator, I2) if subsystem == 1 else tensor(I2, operator)


def _measurement_roots(measurement: Measurement, sharpness: float) -> dict:
    """Square roots of the two outcome effects, embedded in the pair."""
    return {
        o: _embed(sqrt_psd(unsharp_effect(o * measurement.axis, sharpness)), measurement.subsystem)
        for o in (1, -1)
    }


@dataclass(frozen=True, eq=False)
class RegionAssignment:
    """State and definite values assigned to one influence region.

    ``applied`` lists the measurements acting in the region (region flag
    1) and ``conditioned`` the subset applied selectively because the
    observer holds the registered outcome.  ``probability`` is the trace
    before normalization, so the joint probability of the conditioned
    outcomes (1 up to rounding when nothing is conditioned).
    """

    flags: tuple[int, ...]
    empty: bool
    applied: tuple[int, ...]
    conditioned: tuple[int, ...]
    probability: float
    state: np.ndarray
    assertions: tuple[str, ...]

    @property
    def selective(self) -> bool:
        return bool(self.conditioned)

    def to_json_dict(self) -> dict:
        return {
            "flags": list(self.flags),
            "empty": bool(self.empty),
            "applied": list(self.applied),
            "conditioned": list(self.conditioned),
            "selective": self.selective,
            "probability": self.probability,
            "state": matrix_to_pairs(self.state),
            "assertions": list(self.assertions),
        }


@dataclass(eq=False)
class ChartResult:
    """Region-by-region state assignment built at one observation point.

    ``assignments`` covers every region of the influence cover in cover
    order; ``region_index`` points at the observer's own region, and the
    remaining fields copy that region's assignment (``informed`` lists
    all indices whose outcome the observer holds, whether or not their
    measurement acts in the own region).
    """

    observer: SpacetimeEvent
    influence_flags: tuple[int, ...]
    information_flags: tuple[int, ...]
    region_index: int
    assignments: tuple[RegionAssignment, ...]
    applied: tuple[int, ...]   # measurement indices acting in the own region
    informed: tuple[int, ...]  # indices with a registered outcome at hand
    probability: float         # joint probability of the conditioned outcomes
    state: np.ndarray
    assertions: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "observer": [self.observer.t, self.observer.x, self.observer.y, self.observer.z],
            "influence_flags": list(self.influence_flags),
            "information_flags": list(self.information_flags),
            "region_index": self.region_index,
            "assignments": [a.to_json_dict() for a in self.assignments],
            "applied": list(self.applied),
            "informed": list(self.informed),
            "probability": self.probability,
            "state": matrix_to_pairs(self.state),
            "assertions": list(self.assertions),
        }


def _axis_text(axis: np.ndarray) -> str:
    return "(" + ", ".join(f"{c:g}" for c in axis) + ")"


def _partner_assertion(measurement: Measurement, outcome: int, sharpness: float,
                       initial: np.ndarray) -> str:
    """What the registered outcome implies for the other particle."""
    roots = _measurement_roots(measurement, sharpness)
    sub = roots[outcome] @ initial @ roots[outcome]
    prob = float(np.trace(sub).real)
    other = 2 if measurement.subsystem == 1 else 1
    reduced = partial_trace(sub / prob, keep=other)
    partner_prob = expectation(reduced, unsharp_effect(-outcome * measurement.axis, sharpness))
    return (
        f"subsystem {other} along {_axis_text(measurement.axis)}: value {-outcome:+d} "
        f"anticipated with probability {partner_prob:.6g} (anticorrelated partner)"
    )


def observer_chart(programme: MeasurementProgramme, observer) -> ChartResult:
    """Build the region-by-region state assignment of an observation point.

    Every region of the influence cover gets the initial state updated
    by exactly the measurements that bear on it (region flag 1).  The
    observation point fixes, once for the whole chart, how each
    measurement acts: selectively (conditioned on the registered
    outcome) when the point lies in the measurement's forward cone,
    nonselectively otherwise.  The all-zero region always keeps the
    initial state.  A point informed of a measurement without a recorded
    outcome is an error.  Cones are closed, so on a measurement's own
    vertex the point counts as informed while its own region still
    predates the measurement; the outcome then conditions the later
    regions only.
    """
    if not isinstance(observer, SpacetimeEvent):
        observer = SpacetimeEvent.from_sequence(observer)
    events = programme.events()
    cover = influence_cover(events)
    m_flags = cover.flags_at(observer)
    n_flags = information_cover(events).flags_at(observer)
    k = len(programme.measurements)
    informed = tuple(i for i in range(k) if n_flags[i] == 1)

    outcomes = programme.outcomes or (None,) * k
    for i in informed:
        if outcomes[i] is None:
            raise ValueError(
                f"observation point is informed of measurement {i} but the programme "
                f"records no outcome for it"
            )

    initial = programme.initial_state
    roots = [_measurement_roots(m, programme.sharpness) for m in programme.measurements]
    # What a registered outcome asserts is fixed at the registration
    # itself, so the lines are built once from the initial state and
    # repeated in every region the outcome conditions.
    lines: dict[int, tuple[str, ...]] = {}
    for i in informed:
        m = programme.measurements[i]
        entry = [
            f"subsystem {m.subsystem} along {_axis_text(m.axis)}: registered {outcomes[i]:+d}"
        ]
        if programme.is_singlet:
            entry.append(_partner_assertion(m, outcomes[i], programme.sharpness, initial))
        lines[i] = tuple(entry)

    def updated(order, applied, state):
        for i in order:
            if i not in applied:
                continue
            if n_flags[i] == 1:
                root = roots[i][outcomes[i]]
                state = root @ state @ root
            else:
                state = sum(root @ state @ root for root in roots[i].values())
        return state

    assignments = []
    for region in cover.regions:
        applied = tuple(i for i in range(k) if region.flags[i] == 1)
        conditioned = tuple(i for i in applied if n_flags[i] == 1)
        forward = updated(range(k), applied, initial)
        backward = updated(reversed(range(k)), applied, initial)
        deviation = float(np.max(np.abs(forward - backward)))
        if deviation > ORDER_TOL:
            raise ArithmeticError(
                f"application order changed the assignment by {deviation:.3e}"
            )
        probability = float(np.trace(forward).real)
        if conditioned and probability <= NULL_PROBABILITY:
            raise ValueError("registered outcomes have probability zero on this state")
        assignments.append(
            RegionAssignment(
                flags=region.flags,
                empty=region.empty,
                applied=applied,
                conditioned=conditioned,
                probability=probability,
                state=forward / probability if conditioned else forward,
                assertions=tuple(line for i in conditioned for line in lines[i]),
            )
        )

    region_index = next(
        idx for idx, region in enumerate(cover.regions) if region.flags == m_flags
    )
    own = assignments[region_index]
    return ChartResult(
        observer=observer,
        influence_flags=m_flags,
        information_flags=n_flags,
        region_index=region_index,
        assignments=tuple(assignments),
        applied=own.applied,
        informed=informed,
        probability=own.probability,
        state=own.state,
        assertions=own.assertions,
    )


@dataclass(frozen=True)
class ConsistencyReport:
    """Internal consistency of a programme's chart prescription.

    Four checks: order independence of the applied operations, the
    outcome mixture reproducing the nonselective assignment, locality of
    the nonselective operations (no change to the other particle's
    reduced state), and agreement of the charts built along an observer
    worldline: observers holding the same information assign the same
    state to every region, the region flags grow monotonically, and a
    selective assignment never reverts to a nonselective one.
    """

    order_deviation: float
    mixture_deviation: float
    signalling_deviation: float
    grouping_deviation: float
    flags_monotone: bool
    regions_visited: tuple

    @property
    def order_independent(self) -> bool:
        return self.order_deviation <= ORDER_TOL

    @property
    def mixture_consistent(self) -> bool:
        return self.mixture_deviation <= MIXTURE_TOL

    @property
    def no_signalling(self) -> bool:
        return self.signalling_deviation <= SIGNALLING_TOL

    @property
    def worldline_consistent(self) -> bool:
        return self.grouping_deviation <= GROUPING_TOL and self.flags_monotone

    @property
    def all_pass(self) -> bool:
        return (
            self.order_independent
            and self.mixture_consistent
            and self.no_signalling
            and self.worldline_consistent
        )


def _default_worldline(events) -> tuple[Worldline, np.ndarray]:
    coords = np.stack([e.coords for e in events])
    center = coords.mean(axis=0)
    span = float(np.max(np.abs(coords - center))) + 1.0
    origin = SpacetimeEvent(center[0] - 3.0 * span, *center[1:])
    return Worldline(origin), np.linspace(0.0, 6.0 * span, 61)


def check_consistency(programme: MeasurementProgramme, worldline: Worldline | None = None,
                      offsets=None) -> ConsistencyReport:
    """Run the four chart-consistency checks over all outcome combinations."""
    initial = programme.initial_state
    k = len(programme.measurements)
    roots = [_measurement_roots(m, programme.sharpness) for m in programme.measurements]

    def selective(order, combo, state):
        for i in order:
            root = roots[i][combo[i]]
            state = root @ state @ root
        return state

    order_dev = 0.0
    mixture = np.zeros_like(initial)
    for combo in product((1, -1), repeat=k):
        forward = selective(range(k), combo, initial)
        backward = selective(reversed(range(k)), combo, initial)
        order_dev = max(order_dev, float(np.max(np.abs(forward - backward))))
        mixture = mixture + forward

    nonselective = initial
    for i in range(k):
        nonselective = sum(root @ nonselective @ root for root in roots[i].values())
    mixture_dev = float(np.max(np.abs(mixture - nonselective)))

    signalling_dev = 0.0
    for i, m in enumerate(programme.measurements):
        after = sum(root @ initial @ root for root in roots[i].values())
        other = 2 if m.subsystem == 1 else 1
        dev = float(
            np.max(np.abs(partial_trace(after, keep=other) - partial_trace(initial, keep=other)))
        )
        signalling_dev = max(signalling_dev, dev)

    if worldline is None:
        worldline, default_offsets = _default_worldline(programme.events())
        if offsets is None:
            offsets = default_offsets
    elif offsets is None:
        offsets = np.linspace(-4.0, 4.0, 41)

    grouping_dev = 0.0
    monotone = True
    visited: list = []
    points = worldline.sample(offsets)
    for combo in product((1, -1), repeat=k):
        prog = dataclasses.replace(programme, outcomes=combo)
        charts: dict = {}
        previous = None
        for point in points:
            result = observer_chart(prog, point)
            chart_states = np.stack([a.state for a in result.assignments])
            if result.information_flags in charts:
                grouping_dev = max(
                    grouping_dev,
                    float(np.max(np.abs(charts[result.information_flags] - chart_states))),
                )
            else:
                charts[result.information_flags] = chart_states
            key = (result.influence_flags, result.information_flags)
            if key not in visited:
                visited.append(key)
            conditioned = tuple(a.conditioned for a in result.assignments)
            if previous is not None:
                if any(f < g for f, g in zip(result.influence_flags, previous[0])):
                    monotone = False
                if any(f < g for f, g in zip(result.information_flags, previous[1])):
                    monotone = False
                # selective never reverts to nonselective along the line
                if any(not set(now) >= set(before)
                       for now, before in zip(conditioned, previous[2])):
                    monotone = False
            previous = (result.influence_flags, result.information_flags, conditioned)

    return ConsistencyReport(
        order_deviation=order_dev,
        mixture_deviation=mixture_dev,
        signalling_deviation=signalling_dev,
        grouping_deviation=grouping_dev,
        flags_monotone=monotone,
        regions_visited=tuple(visited),
    )


def programme_to_json_dict(programme: MeasurementProgramme) -> dict:
    initial = "singlet" if isinstance(programme.initial, str) else matrix_to_pairs(programme.initial)
    data = {
        "initial": initial,
        "lambda": programme.sharpness,
        "measurements": [
            {
                "event": [m.event.t, m.event.x, m.event.y, m.event.z],
                "axis": [float(c) for c in m.axis],
                "subsystem": m.subsystem,
            }
            for m in programme.measurements
        ],
    }
    if programme.outcomes is not None:
        data["outcomes"] = list(programme.outcomes)
    return data


def programme_from_json_dict(data: dict) -> MeasurementProgramme:
    try:
        initial = data["initial"]
        sharpness = float(data["lambda"])
        raw_measurements = data["measurements"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"programme JSON is missing a field: {exc}") from None
    if initial != "singlet":
        initial = matrix_from_pairs(initial)
    measurements = tuple(
        Measurement(
            event=SpacetimeEvent.from_sequence(entry["event"]),
            axis=np.asarray(entry["axis"], dtype=float),
            subsystem=int(entry["subsystem"]),
        )
        for entry in raw_measurements
    )
    outcomes = data.get("outcomes")
    if outcomes is not None:
        outcomes = tuple(None if o is None else int(o) for o in outcomes)
    return MeasurementProgramme(
        initial=initial,
        sharpness=sharpness,
        measurements=measurements,
        outcomes=outcomes,
    )

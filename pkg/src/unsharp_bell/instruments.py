"""Luders instruments for unsharp measurements and their disturbance.

The Luders operation of an effect E sends a state rho to
sqrt(E) rho sqrt(E), subnormalized so its trace is the outcome
probability.  This module packages the selective and nonselective
versions, a quantitative bound on how little a nearly-certain effect
disturbs the state, and the correlated two-particle measurement that
motivates all of it: an unsharp spin reading on one side of a singlet
pair steering the other side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import (
    I2,
    check_density,
    check_effect,
    expectation,
    partial_trace,
    sqrt_psd,
    tensor,
    trace_norm,
)
from .spin_povm import unit_vector, unsharp_effect
from .bell import singlet_state

__all__ = [
    "NULL_PROBABILITY",
    "MeasurementOutcomeRecord",
    "Instrument",
    "lueders_selective",
    "lueders_nonselective",
    "DisturbanceReport",
    "disturbance_report",
    "EprMeasurementResult",
    "epr_measurement",
]

# Outcomes at or below this probability have no conditional state.
NULL_PROBABILITY = 1e-12
BOUND_TOL = 1e-10


@dataclass(eq=False)
class MeasurementOutcomeRecord:
    """One outcome of a selective Luders measurement."""

    outcome: object
    probability: float
    subnormalized: np.ndarray
    post_state: np.ndarray | None

    @property
    def null_outcome(self) -> bool:
        return self.post_state is None


def _selective_record(state, effect, outcome) -> MeasurementOutcomeRecord:
    root = sqrt_psd(effect)
    sub = root @ state @ root
    prob = float(np.trace(sub).real)
    if prob <= NULL_PROBABILITY:
        return MeasurementOutcomeRecord(outcome, max(prob, 0.0), sub, None)
    return MeasurementOutcomeRecord(outcome, prob, sub, sub / prob)


def lueders_selective(state, effect, outcome=1) -> MeasurementOutcomeRecord:
    """Conditional state and probability of registering a single effect."""
    state = check_density(state)
    effect = check_effect(effect)
    return _selective_record(state, effect, outcome)


def lueders_nonselective(state, effects) -> np.ndarray:
    """State after measuring a POVM and discarding the outcome."""
    state = check_density(state)
    effect_list = list(effects.values()) if isinstance(effects, dict) else list(effects)
    total = np.zeros_like(state)
    completeness = np.zeros_like(state)
    for effect in effect_list:
        effect = check_effect(effect)
        completeness = completeness + effect
        root = sqrt_psd(effect)
        total = total + root @ state @ root
    dim = state.shape[0]
    if not np.allclose(completeness, np.eye(dim), atol=1e-9):
        raise ValueError("effects do not sum to the identity")
    return total


@dataclass(eq=False)
class Instrument:
    """Luders instrument of a POVM, keyed by outcome label."""

    effects: dict
    _roots: dict = field(init=False, repr=False)

    def __post_init__(self):
        checked = {k: check_effect(v) for k, v in self.effects.items()}
        dim = next(iter(checked.values())).shape[0]
        total = sum(checked.values())
        if not np.allclose(total, np.eye(dim), atol=1e-9):
            raise ValueError("effects do not sum to the identity")
        self.effects = checked
        self._roots = {k: sqrt_psd(v) for k, v in checked.items()}

    @property
    def outcomes(self):
        return tuple(self.effects)

    def probabilities(self, state) -> dict:
        state = check_density(state)
        return {k: expectation(state, eff) for k, eff in self.effects.items()}

    def select(self, state, outcome) -> MeasurementOutcomeRecord:
        state = check_density(state)
        root = self._roots[outcome]
        sub = root @ state @ root
        prob = float(np.trace(sub).real)
        if prob <= NULL_PROBABILITY:
            return MeasurementOutcomeRecord(outcome, max(prob, 0.0), sub, None)
        return MeasurementOutcomeRecord(outcome, prob, sub, sub / prob)

    def nonselective(self, state) -> np.ndarray:
        state = check_density(state)
        total = np.zeros_like(state)
        for root in self._roots.values():
            total = total + root @ state @ root
        return total


@dataclass(frozen=True)
class DisturbanceReport:
    """Trace-norm disturbance of a nonselective yes/no measurement."""

    probability: float   # tr[rho E]
    epsilon: float
    distance: float      # ||rho - post||_1
    bound: float         # 2 (epsilon + sqrt(epsilon))
    holds: bool


def disturbance_report(state, effect, epsilon: float | None = None) -> DisturbanceReport:
    """Bound the disturbance of an effect that is nearly certain on a state.

    When tr[rho E] >= 1 - epsilon with epsilon < 1/2, the state after the
    nonselective measurement of {E, I - E} stays within trace distance
    2 (epsilon + sqrt(epsilon)) of the input.  Defaults epsilon to the
    measured shortfall 1 - tr[rho E] and errors when the hypothesis
    fails.
    """
    state = check_density(state)
    effect = check_effect(effect)
    prob = expectation(state, effect)
    if epsilon is None:
        epsilon = max(0.0, 1.0 - prob)
    if not 0.0 <= epsilon < 0.5:
        raise ValueError(
            f"bound hypothesis not met: epsilon = {epsilon!r} outside [0, 0.5)"
        )
    if prob < 1.0 - epsilon - 1e-12:
        raise ValueError(
            f"bound hypothesis not met: tr[rho E] = {prob!r} below 1 - epsilon = {1.0 - epsilon!r}"
        )
    dim = state.shape[0]
    complement = np.eye(dim) - effect
    post = lueders_nonselective(state, [effect, complement])
    distance = trace_norm(state - post)
    bound = 2.0 * (epsilon + np.sqrt(epsilon))
    return DisturbanceReport(
        probability=prob,
        epsilon=float(epsilon),
        distance=distance,
        bound=float(bound),
        holds=bool(distance <= bound + BOUND_TOL),
    )


@dataclass(eq=False)
class EprMeasurementResult:
    """Unsharp spin measurement on the first particle of a pair."""

    axis: np.ndarray
    sharpness: float
    probabilities: dict[int, float]
    component_posts: dict[int, np.ndarray]            # normalized joint states
    joint_post_mixture: np.ndarray                    # nonselective joint state
    reduced_pre: np.ndarray                           # second particle, before
    reduced_post_components: dict[int, np.ndarray]    # subnormalized, per outcome
    reduced_post_conditionals: dict[int, np.ndarray]  # normalized, per outcome
    reduced_post_mixture: np.ndarray                  # second particle, nonselective
    outcome_prob_after: dict[int, float]              # opposite effect firing next


def epr_measurement(axis, sharpness: float, state=None) -> EprMeasurementResult:
    """Measure an unsharp spin effect on one side of a two-particle state.

    The instrument acts on the first particle only; the returned record
    tracks what the measurement does to the second particle, including
    the probability that the opposite-direction effect fires on it
    afterwards.  Defaults to the singlet state, where that probability is
    (1 + sharpness^2) / 2 for either outcome.
    """
    axis = unit_vector(axis)
    if state is None:
        state = singlet_state()
    state = check_density(state)
    if state.shape != (4, 4):
        raise ValueError("epr_measurement needs a two-particle (4x4) state")

    effects = {
        1: tensor(unsharp_effect(axis, sharpness), I2),
        -1: tensor(unsharp_effect(-axis, sharpness), I2),
    }
    instrument = Instrument(effects)
    records = {k: instrument.select(state, k) for k in (1, -1)}
    probabilities = {k: rec.probability for k, rec in records.items()}
    component_posts = {
        k: rec.post_state for k, rec in records.items() if rec.post_state is not None
    }
    joint_post = instrument.nonselective(state)

    reduced_pre = partial_trace(state, keep=2)
    # components follow the two terms of the nonselective sum, so they
    # stay subnormalized (trace = outcome probability); the conditional
    # states renormalize them
    reduced_components = {
        k: partial_trace(rec.subnormalized, keep=2) for k, rec in records.items()
    }
    reduced_conditionals = {
        k: reduced_components[k] / probabilities[k]
        for k in records
        if probabilities[k] > NULL_PROBABILITY
    }
    reduced_mixture = partial_trace(joint_post, keep=2)

    prob_after = {}
    for k, reduced in reduced_conditionals.items():
        partner = unsharp_effect(-k * axis, sharpness)
        prob_after[k] = expectation(reduced, partner)

    return EprMeasurementResult(
        axis=axis,
        sharpness=float(sharpness),
        probabilities=probabilities,
        component_posts=component_posts,
        joint_post_mixture=joint_post,
        reduced_pre=reduced_pre,
        reduced_post_components=reduced_components,
        reduced_post_conditionals=reduced_conditionals,
        reduced_post_mixture=reduced_mixture,
        outcome_prob_after=prob_after,
    )

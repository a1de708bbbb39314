"""Unsharp spin-1/2 observables and their joint measurability.

An unsharp spin observable along axis ``n`` with sharpness ``s`` is the
two-outcome POVM built from the effects (1/2)(I + s n.sigma) and
(1/2)(I - s n.sigma).  Two such observables along different axes admit a
common refinement exactly when the coexistence margin

    2 - s * (|n1 + n2| + |n1 - n2|)

is nonnegative; ``joint_observable_pair`` realises that refinement
explicitly and ``quadruple_joint`` combines two pairs on a two-particle
system into a single 16-outcome observable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import I2, STRUCT_TOL, pauli_dot, tensor

__all__ = [
    "PAIR_SHARPNESS_LIMIT",
    "CoexistenceError",
    "UnsharpSpinObservable",
    "JointObservable",
    "unit_vector",
    "parse_direction",
    "spin_projector",
    "unsharp_effect",
    "coexistence_margin",
    "pair_coexistent",
    "joint_observable_pair",
    "quadruple_joint",
]

# Largest sharpness for which every pair of axes is coexistent: the
# margin at orthogonal axes reads 2 - s * 2 * sqrt(2).
PAIR_SHARPNESS_LIMIT = 1.0 / np.sqrt(2.0)

# Margins this close to zero count as "on the boundary"; the joint
# observable there has an exactly vanishing eigenvalue.
MARGIN_TOL = 1e-12


class CoexistenceError(ValueError):
    """Raised when a joint observable is requested for a non-coexistent pair."""

    def __init__(self, message: str, margin: float, min_eigenvalue: float):
        super().__init__(message)
        self.margin = margin
        self.min_eigenvalue = min_eigenvalue


def unit_vector(vec) -> np.ndarray:
    """Normalize a 3-vector; reject the zero vector."""
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise ValueError("direction must be a nonzero vector")
    return v / norm


def parse_direction(text: str) -> np.ndarray:
    """Parse a direction from a comma-separated triple like '0,0,1'."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"direction must have three comma-separated components, got {text!r}")
    try:
        components = [float(p) for p in parts]
    except ValueError as exc:
        raise ValueError(f"invalid direction {text!r}: {exc}") from None
    return unit_vector(components)


def spin_projector(axis) -> np.ndarray:
    """Projection onto the +1 eigenspace of axis.sigma."""
    n = unit_vector(axis)
    return (I2 + pauli_dot(n)) / 2.0


def unsharp_effect(axis, sharpness: float) -> np.ndarray:
    """Effect (1/2)(I + sharpness * axis.sigma) of an unsharp spin observable."""
    if not 0.0 <= sharpness <= 1.0:
        raise ValueError(f"sharpness must lie in [0, 1], got {sharpness}")
    n = unit_vector(axis)
    return (I2 + sharpness * pauli_dot(n)) / 2.0


@dataclass(frozen=True, eq=False)
class UnsharpSpinObservable:
    """Two-outcome spin POVM along ``axis`` with the given ``sharpness``."""

    axis: np.ndarray
    sharpness: float

    def __post_init__(self):
        object.__setattr__(self, "axis", unit_vector(self.axis))
        if not 0.0 <= self.sharpness <= 1.0:
            raise ValueError(f"sharpness must lie in [0, 1], got {self.sharpness}")

    def effect(self, outcome: int) -> np.ndarray:
        if outcome not in (+1, -1):
            raise ValueError(f"outcome must be +1 or -1, got {outcome}")
        return unsharp_effect(outcome * self.axis, self.sharpness)

    @property
    def effects(self) -> dict[int, np.ndarray]:
        return {+1: self.effect(+1), -1: self.effect(-1)}


@dataclass(eq=False)
class JointObservable:
    """POVM whose outcomes are sign tuples, one sign per marginal observable."""

    effects: dict[tuple[int, ...], np.ndarray]
    min_eigenvalue: float = field(init=False)

    def __post_init__(self):
        keys = list(self.effects)
        if not keys:
            raise ValueError("joint observable needs at least one outcome")
        stacked = np.stack([self.effects[k] for k in keys])
        vals = np.linalg.eigvalsh(stacked)
        self.min_eigenvalue = float(vals.min())
        if self.min_eigenvalue < -STRUCT_TOL or float(vals.max()) > 1.0 + STRUCT_TOL:
            raise ValueError(
                f"joint outcomes are not effects (spectrum reaches {self.min_eigenvalue:.3e})"
            )
        total = stacked.sum(axis=0)
        dev = float(np.max(np.abs(total - np.eye(total.shape[0]))))
        if dev > STRUCT_TOL:
            raise ValueError(f"joint effects do not sum to the identity (deviation {dev:.3e})")

    @property
    def outcomes(self) -> list[tuple[int, ...]]:
        return list(self.effects)

    def marginal(self, slot: int, sign: int) -> np.ndarray:
        """Sum of effects whose outcome tuple has ``sign`` at ``slot``."""
        return sum(
            eff for key, eff in self.effects.items() if key[slot] == sign
        )


def coexistence_margin(sharpness: float, axis1, axis2) -> float:
    """Slack of the pair coexistence condition; nonnegative means coexistent."""
    if not 0.0 <= sharpness <= 1.0:
        raise ValueError(f"sharpness must lie in [0, 1], got {sharpness}")
    n1, n2 = unit_vector(axis1), unit_vector(axis2)
    return 2.0 - sharpness * (
        float(np.linalg.norm(n1 + n2)) + float(np.linalg.norm(n1 - n2))
    )


def pair_coexistent(sharpness: float, axis1, axis2) -> tuple[bool, float]:
    """Whether the two unsharp spin observables admit a joint observable."""
    margin = coexistence_margin(sharpness, axis1, axis2)
    return margin >= -MARGIN_TOL, margin


def _pair_effects(sharpness: float, n1: np.ndarray, n2: np.ndarray) -> dict:
    effects = {}
    for s1 in (+1, -1):
        for s2 in (+1, -1):
            u, v = s1 * n1, s2 * n2
            # The cross term carries the squared sharpness: with it the
            # smallest eigenvalue over the four outcomes vanishes exactly
            # on the coexistence boundary, so positivity and coexistence
            # agree pointwise rather than merely on the all-pairs regime.
            weight = 1.0 + sharpness**2 * float(u @ v)
            effects[(s1, s2)] = (weight * I2 + sharpness * pauli_dot(u + v)) / 4.0
    return effects


def joint_observable_pair(sharpness: float, axis1, axis2) -> JointObservable:
    """Four-outcome joint observable refining two unsharp spin observables.

    Outcome ``(s1, s2)`` collects the effect whose slot-wise marginals
    reproduce the effects of the observables along ``axis1`` and
    ``axis2``.  Raises :class:`CoexistenceError` when the pair fails the
    coexistence condition, reporting the offending eigenvalue.
    """
    n1, n2 = unit_vector(axis1), unit_vector(axis2)
    coexistent, margin = pair_coexistent(sharpness, n1, n2)
    effects = _pair_effects(sharpness, n1, n2)
    if not coexistent:
        stacked = np.stack(list(effects.values()))
        min_eig = float(np.linalg.eigvalsh(stacked).min())
        raise CoexistenceError(
            f"axes are not coexistent at sharpness {sharpness} "
            f"(margin {margin:.6e}, minimum joint eigenvalue {min_eig:.6e})",
            margin,
            min_eig,
        )
    return JointObservable(effects)


def quadruple_joint(sharpness: float, axis1, axis2, axis3, axis4) -> JointObservable:
    """16-outcome joint observable for two coexistent pairs on two particles.

    The first pair (axis1, axis2) acts on the first tensor factor, the
    second pair (axis3, axis4) on the second.  Outcome keys are sign
    quadruples ``(s1, s2, s3, s4)``.
    """
    for label, (a, b) in (("first", (axis1, axis2)), ("second", (axis3, axis4))):
        coexistent, margin = pair_coexistent(sharpness, a, b)
        if not coexistent:
            raise CoexistenceError(
                f"the {label} pair of axes is not coexistent at sharpness {sharpness} "
                f"(margin {margin:.6e})",
                margin,
                float("nan"),
            )
    left = _pair_effects(sharpness, unit_vector(axis1), unit_vector(axis2))
    right = _pair_effects(sharpness, unit_vector(axis3), unit_vector(axis4))
    effects = {
        (s1, s2, s3, s4): tensor(left[(s1, s2)], right[(s3, s4)])
        for s1 in (+1, -1)
        for s2 in (+1, -1)
        for s3 in (+1, -1)
        for s4 in (+1, -1)
    }
    return JointObservable(effects)

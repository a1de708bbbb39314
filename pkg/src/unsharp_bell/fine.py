"""Pair-probability tables and their four-observable joint distributions.

A :class:`ProbabilityTable` records the single and coincidence
probabilities of a four-observable correlation experiment (observables 1
and 2 on one particle, 3 and 4 on the other).  The central question is
whether such a table is the marginal family of a joint distribution over
all four sign outcomes.  Three routes answer it:

* :func:`chsh_check` evaluates the eight CHSH-type inequalities in both
  their pair form and their singles form;
* :func:`reconstruct_jpd` builds a joint distribution constructively,
  choosing three of the seven free entries from Fourier-Motzkin
  projection intervals and the remaining four from nested closed-form
  intervals;
* :func:`feasibility_oracle` decides feasibility by exact rational
  elimination over the full system.

For consistent tables the three routes agree: the inequalities hold
exactly when a joint distribution exists.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import fme
from .bell import BellConfiguration
from .operators import I2, expectation
from .spin_povm import unsharp_effect

__all__ = [
    "TableError",
    "ProbabilityTable",
    "Jpd4",
    "ChshCheck",
    "ChshWitness",
    "FeasibilityResult",
    "marginals",
    "chsh_check",
    "reconstruct_jpd",
    "feasibility_oracle",
    "table_from_quantum",
]

SINGLE_KEYS = (1, -1, 2, -2, 3, -3, 4, -4)
PAIR_KEYS = tuple((i, j) for i in (1, -1, 2, -2) for j in (3, -3, 4, -4))

RANGE_TOL = 1e-12
SUM_TOL = 1e-9
MARGINAL_TOL = 1e-9
# chsh_check, reconstruct_jpd and feasibility_oracle reject tables whose
# marginal inconsistency exceeds this; below it the answers of the three
# routes are comparable.
CONSISTENCY_GATE = 1e-6
# Tolerance on inequality and feasibility decisions made in floats.
DECISION_TOL = 1e-9
# Denominator bound used when rationalizing a table for exact elimination.
RATIONAL_DENOMINATOR = 10**9


class TableError(ValueError):
    """Raised for structurally invalid probability tables."""


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Singles and pair probabilities indexed by signed observable labels.

    ``singles`` maps k in {1,-1,...,4,-4} to the probability of outcome
    sign(k) for observable |k|; ``pairs`` maps (i, j) with i in
    {1,-1,2,-2} and j in {3,-3,4,-4} to coincidence probabilities.
    """

    singles: dict[int, float]
    pairs: dict[tuple[int, int], float]

    def single(self, k: int) -> float:
        return self.singles[k]

    def pair(self, i: int, j: int) -> float:
        return self.pairs[(i, j)]

    def consistency_deviation(self) -> float:
        """Largest violation of the marginal consistency relations."""
        dev = 0.0
        for i in (1, -1, 2, -2):
            dev = max(
                dev,
                abs(self.pair(i, 3) + self.pair(i, -3) - self.single(i)),
                abs(self.pair(i, 4) + self.pair(i, -4) - self.single(i)),
            )
        for j in (3, -3, 4, -4):
            dev = max(
                dev,
                abs(self.pair(1, j) + self.pair(-1, j) - self.single(j)),
                abs(self.pair(2, j) + self.pair(-2, j) - self.single(j)),
            )
        return dev

    def validate(self, marginal_tol: float = MARGINAL_TOL) -> "ProbabilityTable":
        missing = [k for k in SINGLE_KEYS if k not in self.singles]
        missing += [k for k in PAIR_KEYS if k not in self.pairs]
        if missing or len(self.singles) != 8 or len(self.pairs) != 16:
            raise TableError(f"table must carry 8 singles and 16 pairs (missing {missing})")
        for label, value in list(self.singles.items()) + list(self.pairs.items()):
            if not -RANGE_TOL <= value <= 1.0 + RANGE_TOL:
                raise TableError(f"entry {label} = {value!r} outside [0, 1]")
        for k in (1, 2, 3, 4):
            s = self.single(k) + self.single(-k)
            if abs(s - 1.0) > SUM_TOL:
                raise TableError(f"outcome probabilities of observable {k} sum to {s!r}")
        dev = self.consistency_deviation()
        if dev > marginal_tol:
            raise TableError(f"marginal inconsistency {dev:.3e} exceeds {marginal_tol:.1e}")
        return self

    def to_json_dict(self) -> dict:
        return {
            "singles": {str(k): self.singles[k] for k in SINGLE_KEYS},
            "pairs": {f"{i},{j}": self.pairs[(i, j)] for i, j in PAIR_KEYS},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ProbabilityTable":
        try:
            raw_singles = data["singles"]
            raw_pairs = data["pairs"]
        except (KeyError, TypeError):
            raise TableError("table JSON needs 'singles' and 'pairs' objects") from None
        singles = {}
        for key, value in raw_singles.items():
            singles[int(key)] = float(value)
        pairs = {}
        for key, value in raw_pairs.items():
            i_text, j_text = key.split(",")
            pairs[(int(i_text), int(j_text))] = float(value)
        return cls(singles, pairs).validate()

    def to_csv_text(self) -> str:
        """Rows (i, j, p); singles carry an empty j column."""
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["i", "j", "p"])
        for k in SINGLE_KEYS:
            writer.writerow([k, "", repr(self.singles[k])])
        for i, j in PAIR_KEYS:
            writer.writerow([i, j, repr(self.pairs[(i, j)])])
        return out.getvalue()

    @classmethod
    def from_csv_text(cls, text: str) -> "ProbabilityTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["i", "j", "p"]:
            raise TableError("table CSV must start with header i,j,p")
        singles: dict[int, float] = {}
        pairs: dict[tuple[int, int], float] = {}
        for row in reader:
            if not row:
                continue
            i_text, j_text, p_text = row
            if j_text.strip() == "":
                singles[int(i_text)] = float(p_text)
            else:
                pairs[(int(i_text), int(j_text))] = float(p_text)
        return cls(singles, pairs).validate()


_SIGN_INDEX = {1: 0, -1: 1}


@dataclass(eq=False)
class Jpd4:
    """Joint distribution over the sign quadruples of four observables."""

    values: np.ndarray  # shape (2, 2, 2, 2); index 0 <-> +1, 1 <-> -1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (2, 2, 2, 2):
            raise ValueError(f"joint distribution must have shape (2,2,2,2), got {self.values.shape}")
        low = float(self.values.min())
        if low < -RANGE_TOL:
            raise ValueError(f"joint distribution has a negative entry ({low:.3e})")
        total = float(self.values.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"joint distribution sums to {total!r}")

    def entry(self, signs: tuple[int, int, int, int]) -> float:
        return float(self.values[tuple(_SIGN_INDEX[s] for s in signs)])

    def to_json_dict(self) -> dict:
        return {
            ",".join(str(s) for s in signs): self.entry(signs)
            for signs in _all_sign_quadruples()
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Jpd4":
        values = np.zeros((2, 2, 2, 2))
        for key, value in data.items():
            signs = tuple(int(part) for part in key.split(","))
            values[tuple(_SIGN_INDEX[s] for s in signs)] = float(value)
        return cls(values)


def _all_sign_quadruples():
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                for s4 in (1, -1):
                    yield (s1, s2, s3, s4)


def marginals(jpd: Jpd4) -> ProbabilityTable:
    """Singles and pair probabilities of a four-observable distribution."""
    vals = jpd.values
    singles = {}
    for slot in range(4):
        others = tuple(axis for axis in range(4) if axis != slot)
        sums = vals.sum(axis=others)
        singles[slot + 1] = float(sums[0])
        singles[-(slot + 1)] = float(sums[1])
    pairs = {}
    for i_label in (1, 2):
        for j_label in (3, 4):
            others = tuple(
                axis for axis in range(4) if axis not in (i_label - 1, j_label - 1)
            )
            block = vals.sum(axis=others)
            for si in (1, -1):
                for sj in (1, -1):
                    pairs[(si * i_label, sj * j_label)] = float(
                        block[_SIGN_INDEX[si], _SIGN_INDEX[sj]]
                    )
    return ProbabilityTable(singles, pairs)


# The four CHSH expressions in their pair form; each must lie in [0, 1].
BELL_PAIR_FORMS = (
    ((((1, -3), 1), ((-1, 4), 1), ((2, 4), -1), ((2, 3), 1))),
    ((((1, -4), 1), ((-1, 3), 1), ((2, 3), -1), ((2, 4), 1))),
    ((((2, -3), 1), ((-2, 4), 1), ((1, 4), -1), ((1, 3), 1))),
    ((((2, -4), 1), ((-2, 3), 1), ((1, 3), -1), ((1, 4), 1))),
)

# The same four expressions rewritten through the singles.
BELL_SINGLE_FORMS = (
    ((1, 4), (((1, 3), -1), ((1, 4), -1), ((2, 4), -1), ((2, 3), 1))),
    ((1, 3), (((1, 3), -1), ((1, 4), -1), ((2, 3), -1), ((2, 4), 1))),
    ((2, 4), (((2, 3), -1), ((1, 4), -1), ((2, 4), -1), ((1, 3), 1))),
    ((2, 3), (((1, 3), -1), ((2, 3), -1), ((2, 4), -1), ((1, 4), 1))),
)


@dataclass(frozen=True)
class ChshWitness:
    """A CHSH expression lying outside [0, 1], as evidence of infeasibility."""

    inequality: str   # 'chsh1' .. 'chsh4'
    side: str         # 'lower' or 'upper'
    value: float
    slack: float      # distance outside [0, 1]


@dataclass(frozen=True)
class ChshCheck:
    all_hold: bool
    pair_form: tuple[float, float, float, float]
    single_form: tuple[float, float, float, float]

    @property
    def values(self) -> tuple[float, ...]:
        return self.pair_form + self.single_form


def _pair_form_values(table: ProbabilityTable) -> tuple[float, ...]:
    return tuple(
        sum(sign * table.pair(*key) for key, sign in form) for form in BELL_PAIR_FORMS
    )


def _single_form_values(table: ProbabilityTable) -> tuple[float, ...]:
    values = []
    for (k1, k2), pair_part in BELL_SINGLE_FORMS:
        total = table.single(k1) + table.single(k2)
        total += sum(sign * table.pair(*key) for key, sign in pair_part)
        values.append(total)
    return tuple(values)


def chsh_check(table: ProbabilityTable) -> ChshCheck:
    """Evaluate the eight CHSH inequalities on a probability table.

    Both the pair form and the singles form of the four expressions are
    computed; for a marginally consistent table they coincide, and the
    check errors out when the measured inconsistency makes the two forms
    incomparable.
    """
    table.validate(marginal_tol=CONSISTENCY_GATE)
    pair_vals = _pair_form_values(table)
    single_vals = _single_form_values(table)
    # Exact equivalence of the two forms holds for exactly consistent
    # tables; allow the residual the measured inconsistency can induce.
    agreement_tol = DECISION_TOL + 4.0 * table.consistency_deviation()
    worst = max(abs(p - s) for p, s in zip(pair_vals, single_vals))
    if worst > agreement_tol:
        raise ArithmeticError(
            f"pair-form and singles-form CHSH values disagree by {worst:.3e}"
        )
    all_hold = all(-DECISION_TOL <= v <= 1.0 + DECISION_TOL for v in pair_vals)
    return ChshCheck(all_hold=all_hold, pair_form=pair_vals, single_form=single_vals)


def find_witness(table: ProbabilityTable) -> ChshWitness:
    """Most violated CHSH inequality of a table."""
    values = _pair_form_values(table)
    best = None
    for idx, value in enumerate(values):
        for side, slack in (("lower", -value), ("upper", value - 1.0)):
            if best is None or slack > best.slack:
                best = ChshWitness(f"chsh{idx + 1}", side, value, slack)
    return best


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    jpd: Jpd4 | None
    witness: ChshWitness | None
    method: str


# ----------------------------------------------------------------------
# The linear system behind reconstruction and the oracle.
#
# Seven joint-distribution entries are free parameters; the remaining
# nine are affine in them with coefficients read off the marginal
# equations.  Free order: indices 0..6 as listed.
FREE_OUTCOMES = (
    (1, 1, 1, 1),
    (1, 1, 1, -1),
    (1, 1, -1, 1),
    (1, 1, -1, -1),
    (1, -1, 1, 1),
    (-1, 1, 1, 1),
    (-1, -1, 1, 1),
)

# outcome -> (pair-value terms, coefficients on the free entries)
DEPENDENT_OUTCOMES = {
    (1, -1, 1, -1): ((((1, 3), 1),), (-1, -1, 0, 0, -1, 0, 0)),
    (1, -1, -1, 1): ((((1, 4), 1),), (-1, 0, -1, 0, -1, 0, 0)),
    (1, -1, -1, -1): ((((1, -3), 1), ((1, 4), -1)), (1, 0, 0, -1, 1, 0, 0)),
    (-1, 1, 1, -1): ((((2, 3), 1),), (-1, -1, 0, 0, 0, -1, 0)),
    (-1, 1, -1, 1): ((((2, 4), 1),), (-1, 0, -1, 0, 0, -1, 0)),
    (-1, 1, -1, -1): ((((2, -3), 1), ((2, 4), -1)), (1, 0, 0, -1, 0, 1, 0)),
    (-1, -1, 1, -1): ((((-1, 3), 1), ((2, 3), -1)), (1, 1, 0, 0, 0, 0, -1)),
    (-1, -1, -1, 1): ((((-1, 4), 1), ((2, 4), -1)), (1, 0, 1, 0, 0, 0, -1)),
    (-1, -1, -1, -1): (
        (((-2, -3), 1), ((1, -3), -1), ((-1, 4), -1), ((2, 4), 1)),
        (-1, 0, 0, 1, 0, 0, 1),
    ),
}

# Elimination order: the three entries fixing the coarse structure are
# eliminated last so they are assigned first during back-substitution.
_ELIMINATION_ORDER = (4, 5, 6, 0, 3, 2, 1)


def _build_system(pair_value, zero) -> list:
    """Nonnegativity of all 16 entries as rows over the 7 free entries.

    ``zero`` fixes the arithmetic (0.0 for floats, Fraction(0) for exact
    elimination); ``pair_value`` maps a signed key pair to a constant.
    """
    rows = []
    for index in range(7):
        coeffs = tuple(1 if i == index else 0 for i in range(7))
        rows.append((zero, coeffs))
    for terms, coeffs in DEPENDENT_OUTCOMES.values():
        const = zero
        for key, sign in terms:
            const = const + sign * pair_value(key)
        rows.append((const, coeffs))
    return rows


def _dependent_value(outcome, pair_value, free_values):
    terms, coeffs = DEPENDENT_OUTCOMES[outcome]
    value = None
    for key, sign in terms:
        term = sign * pair_value(key)
        value = term if value is None else value + term
    for idx, coeff in enumerate(coeffs):
        if coeff != 0:
            value = value + coeff * free_values[idx]
    return value


def _assemble_jpd(pair_value, free_values) -> np.ndarray:
    values = np.zeros((2, 2, 2, 2))
    for idx, outcome in enumerate(FREE_OUTCOMES):
        values[tuple(_SIGN_INDEX[s] for s in outcome)] = float(free_values[idx])
    for outcome in DEPENDENT_OUTCOMES:
        values[tuple(_SIGN_INDEX[s] for s in outcome)] = float(
            _dependent_value(outcome, pair_value, free_values)
        )
    return values


def _midpoint(lower, upper, slack_tol):
    if lower is None and upper is None:
        return 0.0
    if lower is None:
        return min(upper, 0.0)
    if upper is None:
        return max(lower, 0.0)
    if lower > upper and lower - upper > slack_tol:
        raise ArithmeticError(f"empty interval [{lower}, {upper}]")
    return (lower + upper) / 2


def reconstruct_jpd(table: ProbabilityTable) -> FeasibilityResult:
    """Constructively extend a table to a joint distribution, if one exists.

    The seven free entries are chosen one at a time: three of them at
    midpoints of Fourier-Motzkin projection intervals, the remaining four
    from the nested closed-form intervals the nonnegativity system leaves
    once the first three are fixed.  Returns an infeasibility witness (a
    violated CHSH inequality) when the elimination closes the system.
    """
    table.validate(marginal_tol=CONSISTENCY_GATE)
    rows = _build_system(lambda key: table.pair(*key), 0.0)
    systems = fme.project(rows, _ELIMINATION_ORDER)
    if fme.constant_infeasibility(systems[-1]) > DECISION_TOL:
        return FeasibilityResult(False, None, find_witness(table), "interval-reconstruction")

    values: dict[int, float] = {}
    for step in (6, 5, 4):  # assigns free entries 1, 2, 3 in that order
        index = _ELIMINATION_ORDER[step]
        lower, upper = fme.variable_interval(systems[step], index, values)
        values[index] = _midpoint(lower, upper, DECISION_TOL)

    p = table.pair
    b, c, d = values[1], values[2], values[3]
    # Nested intervals for the remaining entries: bounds on (a + e),
    # (a + k) and (p - a) read off the nonnegativity of the dependent
    # entries, intersected with nonnegativity of a, e, k, p themselves.
    lower_ae = p(1, 4) - p(1, -3) + d
    upper_ae = min(p(1, 3) - b, p(1, 4) - c)
    lower_ak = p(2, 4) - p(2, -3) + d
    upper_ak = min(p(2, 3) - b, p(2, 4) - c)
    lower_pa = p(1, -3) + p(-1, 4) - p(-2, -3) - p(2, 4) - d
    upper_pa = min(p(-1, 3) - p(2, 3) + b, p(-1, 4) - p(2, 4) + c)

    first = _midpoint(max(0.0, -upper_pa), min(upper_ae, upper_ak), DECISION_TOL)
    values[0] = first
    values[4] = _midpoint(max(0.0, lower_ae - first), upper_ae - first, DECISION_TOL)
    values[5] = _midpoint(max(0.0, lower_ak - first), upper_ak - first, DECISION_TOL)
    values[6] = _midpoint(max(0.0, first + lower_pa), first + upper_pa, DECISION_TOL)

    free = [values[i] for i in range(7)]
    entries = _assemble_jpd(lambda key: table.pair(*key), free)
    # Interval midpoints can sit a rounding error below zero at
    # degenerate vertices; that is within the distribution tolerance.
    jpd = Jpd4(np.clip(entries, -RANGE_TOL, None))
    return FeasibilityResult(True, jpd, None, "interval-reconstruction")


def _rationalized_pair_values(table: ProbabilityTable) -> dict:
    """Exactly consistent rational surrogate of a table's pair values.

    Only the eight generating numbers (four singles, four unbarred
    pairs) are rationalized; every other entry is derived from them, so
    the surrogate satisfies the marginal relations exactly.
    """
    def rat(x: float) -> Fraction:
        return Fraction(x).limit_denominator(RATIONAL_DENOMINATOR)

    ones = {k: rat(table.single(k)) for k in (1, 2, 3, 4)}
    pairs = {}
    for i in (1, 2):
        for j in (3, 4):
            block = rat(table.pair(i, j))
            pairs[(i, j)] = block
            pairs[(i, -j)] = ones[i] - block
            pairs[(-i, j)] = ones[j] - block
            pairs[(-i, -j)] = 1 - ones[i] - ones[j] + block
    return pairs


def feasibility_oracle(table: ProbabilityTable) -> FeasibilityResult:
    """Decide joint-distribution feasibility by exact rational elimination.

    The table is replaced by an exactly consistent rational surrogate
    (denominators bounded by ``RATIONAL_DENOMINATOR``); Fourier-Motzkin
    elimination over the seven free entries then decides feasibility
    without rounding, and back-substitution returns an explicit joint
    distribution in the feasible case.
    """
    table.validate(marginal_tol=CONSISTENCY_GATE)
    rational_pairs = _rationalized_pair_values(table)
    rows = _build_system(rational_pairs.__getitem__, Fraction(0))
    systems = fme.project(rows, _ELIMINATION_ORDER)
    if fme.constant_infeasibility(systems[-1]) > 0:
        return FeasibilityResult(False, None, find_witness(table), "exact-elimination")
    assignment = fme.back_substitute(systems, _ELIMINATION_ORDER)
    free = [assignment[i] for i in range(7)]
    entries = _assemble_jpd(rational_pairs.__getitem__, free)
    jpd = Jpd4(np.clip(entries, 0.0, None))
    return FeasibilityResult(True, jpd, None, "exact-elimination")


def table_from_quantum(state, config: BellConfiguration) -> ProbabilityTable:
    """Probability table of a two-particle state under unsharp spin pairs.

    Observables 1 and 2 measure along the configuration's first-particle
    axes, observables 3 and 4 along the second-particle axes, all at the
    configuration's sharpness.
    """
    s = config.sharpness
    first = {
        1: unsharp_effect(config.axis1, s),
        -1: unsharp_effect(-config.axis1, s),
        2: unsharp_effect(config.axis2, s),
        -2: unsharp_effect(-config.axis2, s),
    }
    second = {
        3: unsharp_effect(config.axis3, s),
        -3: unsharp_effect(-config.axis3, s),
        4: unsharp_effect(config.axis4, s),
        -4: unsharp_effect(-config.axis4, s),
    }
    rho = np.asarray(state, dtype=complex)
    singles = {}
    for k, eff in first.items():
        singles[k] = expectation(rho, np.kron(eff, I2))
    for k, eff in second.items():
        singles[k] = expectation(rho, np.kron(I2, eff))
    pairs = {}
    for i, eff_i in first.items():
        for j, eff_j in second.items():
            pairs[(i, j)] = expectation(rho, np.kron(eff_i, eff_j))
    return ProbabilityTable(singles, pairs).validate()

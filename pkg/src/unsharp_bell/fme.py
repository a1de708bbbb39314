"""Fourier-Motzkin elimination for small linear inequality systems.

A row ``(const, coeffs)`` encodes the inequality ``const + coeffs . x >= 0``.
Variables are eliminated by cross-multiplying rows with opposite signs on
the target coefficient, so no division is introduced and the routines run
unchanged on floats (fast, approximate constants) and on
``fractions.Fraction`` (exact).  The systems produced along an elimination
order support interval back-substitution: assigning the variables in
reverse order, each one picked from the interval its recorded system
allows, always lands inside the feasible region when one exists.
"""

from __future__ import annotations

from math import gcd

__all__ = [
    "Row",
    "eliminate_variable",
    "project",
    "constant_infeasibility",
    "variable_interval",
    "back_substitute",
]

Row = tuple  # (const, tuple of coefficients)


def _normalize(const, coeffs):
    """Divide a row by the gcd of its (integer-valued) coefficients."""
    ints = []
    for c in coeffs:
        rounded = round(c)
        if c != rounded:
            return const, tuple(coeffs)
        ints.append(abs(int(rounded)))
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        const = const / g
        coeffs = tuple(c / g for c in coeffs)
    return const, tuple(coeffs)


def eliminate_variable(rows, index: int):
    """Project the system onto the hyperplane without variable ``index``.

    Returns the reduced rows; rows whose coefficients are all zero are
    kept (their constants witness feasibility or its failure).
    """
    kept, lower, upper = [], [], []
    for const, coeffs in rows:
        c = coeffs[index]
        if c > 0:
            lower.append((const, coeffs))
        elif c < 0:
            upper.append((const, coeffs))
        else:
            kept.append((const, coeffs))
    for lc, lco in lower:
        for uc, uco in upper:
            a = lco[index]        # > 0
            b = -uco[index]       # > 0
            const = b * lc + a * uc
            coeffs = tuple(b * x + a * y for x, y in zip(lco, uco))
            kept.append(_normalize(const, coeffs))
    # Deduplicate by coefficient vector, keeping the tightest constant:
    # for identical coefficients the row with the smaller constant implies
    # the others.
    best: dict[tuple, object] = {}
    for const, coeffs in kept:
        key = coeffs
        if key not in best or const < best[key]:
            best[key] = const
    return [(const, coeffs) for coeffs, const in ((k, v) for k, v in best.items())]


def project(rows, order):
    """Eliminate variables in ``order``; return the system before each step.

    ``systems[i]`` is the system still containing ``order[i:]``;
    ``systems[len(order)]`` contains only constant rows.
    """
    systems = [list(rows)]
    current = list(rows)
    for index in order:
        current = eliminate_variable(current, index)
        systems.append(current)
    return systems


def constant_infeasibility(rows):
    """Largest violation among constant rows; positive means infeasible."""
    worst = None
    for const, coeffs in rows:
        if all(c == 0 for c in coeffs):
            violation = -const
            if worst is None or violation > worst:
                worst = violation
    if worst is None:
        return -1  # no constant rows: vacuously feasible
    return worst


def variable_interval(rows, index: int, values: dict):
    """Interval allowed for one variable given values for all others.

    Rows whose coefficient on ``index`` vanishes are ignored; ``values``
    must cover every other variable with a nonzero coefficient.
    """
    lower = None
    upper = None
    for const, coeffs in rows:
        c = coeffs[index]
        if c == 0:
            continue
        rest = const
        for j, cj in enumerate(coeffs):
            if j != index and cj != 0:
                rest = rest + cj * values[j]
        bound = -rest / c
        if c > 0:
            if lower is None or bound > lower:
                lower = bound
        else:
            if upper is None or bound < upper:
                upper = bound
    return lower, upper


def back_substitute(systems, order, slack_tol=0):
    """Assign midpoint values for the eliminated variables, in reverse order.

    ``systems`` must come from :func:`project` with the same ``order``.
    Interval endpoints crossing by more than ``slack_tol`` raise; smaller
    inversions are rounding noise at degenerate vertices and collapse to
    the crossing point.
    """
    values: dict[int, object] = {}
    for step in range(len(order) - 1, -1, -1):
        index = order[step]
        lower, upper = variable_interval(systems[step], index, values)
        if lower is None and upper is None:
            values[index] = 0
            continue
        if lower is None:
            values[index] = upper
            continue
        if upper is None:
            values[index] = lower
            continue
        if lower > upper:
            if lower - upper > slack_tol:
                raise ArithmeticError(
                    f"empty interval for variable {index}: [{lower}, {upper}]"
                )
        values[index] = (lower + upper) / 2
    return values

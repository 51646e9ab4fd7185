"""Exact feasibility of ``A x = b, x >= 0`` by a fraction-free phase-I simplex.

The tableau is kept in integers scaled by the determinant of the current
basis (Edmonds' integer-preserving pivot), which is much faster than
Fraction arithmetic and just as exact.  Pivoting follows Bland's rule, so
the run is deterministic and cannot cycle.

An infeasible system comes back with a Farkas vector ``y`` such that
``y @ A <= 0`` column-wise and ``y @ b > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exact import integer_row


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    x: Optional[Tuple[Fraction, ...]]  # a basic feasible solution, if feasible
    farkas: Optional[Tuple[Fraction, ...]]  # refutation, if infeasible
    pivots: int


def _scaled_rows(a, b, integral):
    rows = []
    for row, rhs in zip(a, b):
        if integral:
            ints, mult = list(row) + [rhs], 1
        else:
            ints, mult = integer_row(list(row) + [rhs])
        if ints[-1] < 0:
            ints = [-v for v in ints]
            mult = -mult
        rows.append((ints, mult))
    return rows


def solve_feasibility(a: Sequence[Sequence], b: Sequence, max_pivots: int = 100000,
                      integral: bool = False) -> FeasibilityResult:
    """Decide whether ``{x >= 0 : a x = b}`` is nonempty, exactly.

    ``integral=True`` promises that every entry is already a Python int and
    skips the rescaling pass.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    if len(b) != m:
        raise ValueError("row count of A differs from length of b")
    if m == 0:
        return FeasibilityResult(True, (Fraction(0),) * n, None, 0)

    rows = _scaled_rows(a, b, integral)
    width = n + m + 1
    rhs = width - 1
    tab: List[List[int]] = []
    for i, (ints, _) in enumerate(rows):
        line = ints[:n] + [0] * m + [ints[n]]
        line[n + i] = 1
        tab.append(line)
    # reduced costs of "minimise the sum of artificials"
    obj = [0] * width
    for line in tab:
        for j in range(n):
            obj[j] -= line[j]
        obj[rhs] -= line[rhs]
    basis = list(range(n, n + m))
    det = 1
    pivots = 0

    while obj[rhs] != 0:
        enter = next((j for j in range(width - 1) if obj[j] < 0), None)
        if enter is None:
            break
        leave = -1
        best_num = best_den = 0
        for i in range(m):
            coef = tab[i][enter]
            if coef > 0:
                num = tab[i][rhs]
                if leave < 0:
                    cmp = -1
                else:
                    cmp = num * best_den - best_num * coef
                if cmp < 0 or (cmp == 0 and basis[i] < basis[leave]):
                    leave, best_num, best_den = i, num, coef
        if leave < 0:
            # cannot happen: phase I is bounded below by zero
            raise ArithmeticError("phase-I objective unbounded")
        piv_row = tab[leave]
        p = piv_row[enter]
        for idx, line in enumerate(tab):
            if idx == leave:
                continue
            f = line[enter]
            if f:
                tab[idx] = [(p * x - f * y) // det for x, y in zip(line, piv_row)]
            else:
                tab[idx] = [p * x // det for x in line]
        f = obj[enter]
        obj = [(p * x - f * y) // det for x, y in zip(obj, piv_row)]
        det = p
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            raise ArithmeticError("pivot limit exceeded")

    if obj[rhs] == 0:
        x = [Fraction(0)] * n
        for i, var in enumerate(basis):
            if var < n:
                x[var] = Fraction(tab[i][rhs], det)
        return FeasibilityResult(True, tuple(x), None, pivots)

    # dual of phase I: y_i = 1 - reduced cost of artificial i, scaled by det
    farkas = []
    for i, (_, mult) in enumerate(rows):
        y_scaled = det - obj[n + i]
        farkas.append(Fraction(y_scaled * mult, det))
    return FeasibilityResult(False, None, tuple(farkas), pivots)


def check_farkas(a: Sequence[Sequence], b: Sequence, y: Sequence) -> bool:
    """True iff ``y`` proves ``{x >= 0 : a x = b}`` empty."""
    if len(y) != len(a) or len(b) != len(a):
        return False
    n = len(a[0]) if a else 0
    for j in range(n):
        if sum((Fraction(y[i]) * a[i][j] for i in range(len(a))), Fraction(0)) > 0:
            return False
    return sum((Fraction(yi) * bi for yi, bi in zip(y, b)), Fraction(0)) > 0

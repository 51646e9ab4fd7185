"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction`; vectors and matrices are plain tuples
of them.  Everything here is immutable and exact: there is no tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple, Union

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]
RationalLike = Union[int, str, Fraction]


class DimensionError(ValueError):
    pass


def rational(value: RationalLike) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a canonical Fraction.

    Floats are refused on purpose: no binary floating point may leak into
    exact data.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not a rational string: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot make an exact rational from {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    """Canonical text form ``p/q``, with ``/q`` omitted when q == 1."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vector(values: Iterable[RationalLike]) -> Vector:
    return tuple(rational(v) for v in values)


def matrix(rows: Iterable[Iterable[RationalLike]]) -> Matrix:
    out = tuple(vector(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionError("matrix rows have different lengths")
    return out


def format_vector(v: Sequence[Fraction]) -> list:
    return [format_rational(x) for x in v]


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    if len(u) != len(v):
        raise DimensionError(f"length {len(u)} != {len(v)}")
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    if len(u) != len(v):
        raise DimensionError(f"length {len(u)} != {len(v)}")
    return tuple(a - b for a, b in zip(u, v))


def scale(c: RationalLike, v: Sequence[Fraction]) -> Vector:
    c = rational(c)
    return tuple(c * a for a in v)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    if len(u) != len(v):
        raise DimensionError(f"length {len(u)} != {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def zeros(n: int) -> Vector:
    return (Fraction(0),) * n


def combine(coeffs: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]], dim: int) -> Vector:
    """Linear combination sum(c_i * v_i) in dimension ``dim``."""
    acc = [Fraction(0)] * dim
    for c, v in zip(coeffs, vectors):
        if len(v) != dim:
            raise DimensionError(f"vector of length {len(v)} in dimension {dim}")
        if c:
            for t in range(dim):
                acc[t] += c * v[t]
    return tuple(acc)


def transpose(m: Sequence[Sequence[Fraction]]) -> Matrix:
    if not m:
        return ()
    return tuple(tuple(col) for col in zip(*m))


def mat_vec(m: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> Vector:
    return tuple(dot(row, x) for row in m)


def integer_row(row: Sequence[Fraction]) -> Tuple[list, int]:
    """Scale a rational row to integers; returns (integers, positive multiplier)."""
    if all(type(x) is int for x in row):
        return list(row), 1
    mult = lcm(*(Fraction(x).denominator for x in row)) if row else 1
    return [int(x * mult) for x in row], mult


def _rref(rows: Sequence[Sequence[Fraction]], ncols: int):
    """Reduced row echelon form with first-nonzero pivoting (deterministic)."""
    work = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        piv = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        pv = work[r][c]
        work[r] = [x / pv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work, pivots


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    """Rank over the rationals."""
    if not m:
        return 0
    ncols = len(m[0])
    if any(len(r) != ncols for r in m):
        raise DimensionError("matrix is not rectangular")
    _, pivots = _rref(m, ncols)
    return len(pivots)


class LinearSolution(NamedTuple):
    solution: Optional[Vector]
    nullspace: Tuple[Vector, ...]


def solve_linear(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> LinearSolution:
    """Solve ``a @ x = b`` exactly.

    Returns one particular solution (free variables set to zero) and a basis
    of the nullspace of ``a``; ``solution`` is None when the system is
    inconsistent.
    """
    if len(a) != len(b):
        raise DimensionError(f"{len(a)} rows but right-hand side of length {len(b)}")
    ncols = len(a[0]) if a else 0
    if any(len(r) != ncols for r in a):
        raise DimensionError("matrix is not rectangular")
    aug = [list(r) + [rational(v)] for r, v in zip(a, b)]
    work, pivots = _rref(aug, ncols + 1)
    if ncols in pivots:
        sol = None
    else:
        x = [Fraction(0)] * ncols
        for row, c in zip(work, pivots):
            x[c] = row[ncols]
        sol = tuple(x)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(work, pivots):
            if c < ncols:
                v[c] = -row[f]
        basis.append(tuple(v))
    if sol is not None:
        # cheap self-check; exact arithmetic makes this an identity
        assert mat_vec(a, sol) == tuple(rational(v) for v in b)
    return LinearSolution(sol, tuple(basis))

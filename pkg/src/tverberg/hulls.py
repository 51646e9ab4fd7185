"""Do the convex hulls of k finite point sets share a point?

The question is the feasibility of the system, over convex weights
lambda_{s,j} >= 0 for point j of set s,

    sum_j lambda_{s,j} = 1                                   (each set s)
    sum_j lambda_{0,j} a_{0,j} - sum_j lambda_{s,j} a_{s,j} = 0   (s >= 1)

decided by the exact simplex in :mod:`tverberg.lp`.  A "nonempty" answer
carries the common point and the convex weights of every set; an "empty"
answer carries a Farkas vector refuting the system.  Both can be checked by
:func:`verify_certificate` without trusting the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from . import exact
from .lp import solve_feasibility

NONEMPTY = "nonempty"
EMPTY = "empty"


class HullInputError(ValueError):
    pass


@dataclass(frozen=True)
class IntersectionCertificate:
    verdict: str
    point: Optional[exact.Vector] = None
    coefficients: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    farkas: Optional[Tuple[Fraction, ...]] = None

    @property
    def nonempty(self) -> bool:
        return self.verdict == NONEMPTY

    def to_json(self) -> dict:
        if self.nonempty:
            return {
                "verdict": NONEMPTY,
                "point": exact.format_vector(self.point),
                "coefficients": [exact.format_vector(c) for c in self.coefficients],
            }
        return {"verdict": EMPTY, "farkas": exact.format_vector(self.farkas)}

    @classmethod
    def from_json(cls, data: dict) -> "IntersectionCertificate":
        if data["verdict"] == NONEMPTY:
            return cls(NONEMPTY, exact.vector(data["point"]),
                       tuple(exact.vector(c) for c in data["coefficients"]))
        if data["verdict"] == EMPTY:
            return cls(EMPTY, farkas=exact.vector(data["farkas"]))
        raise ValueError(f"unknown verdict {data['verdict']!r}")


def _validate(sets: Sequence[Sequence[Sequence]]) -> int:
    if not sets:
        raise HullInputError("need at least one set")
    if any(len(s) == 0 for s in sets):
        raise HullInputError("empty point set (empty parts must be handled by the caller)")
    d = len(sets[0][0])
    for s in sets:
        for p in s:
            if len(p) != d:
                raise HullInputError("points of mixed dimension")
    return d


def hull_system(sets: Sequence[Sequence[Sequence]]) -> Tuple[List[list], List[int]]:
    """The equality system (A, b) over the concatenated convex weights."""
    d = _validate(sets)
    k = len(sets)
    sizes = [len(s) for s in sets]
    ncols = sum(sizes)
    offsets = [sum(sizes[:s]) for s in range(k)]
    a: List[list] = []
    b: List[int] = []
    for s in range(k):
        row = [0] * ncols
        for j in range(sizes[s]):
            row[offsets[s] + j] = 1
        a.append(row)
        b.append(1)
    for s in range(1, k):
        for t in range(d):
            row = [0] * ncols
            for j, p in enumerate(sets[0]):
                row[j] = p[t]
            for j, p in enumerate(sets[s]):
                row[offsets[s] + j] = -p[t]
            a.append(row)
            b.append(0)
    return a, b


def hulls_common_point(sets: Sequence[Sequence[Sequence]]) -> IntersectionCertificate:
    """Exact decision of whether the convex hulls of ``sets`` intersect."""
    a, b = hull_system(sets)
    res = solve_feasibility(a, b)
    if not res.feasible:
        return IntersectionCertificate(EMPTY, farkas=res.farkas)
    coeffs = []
    pos = 0
    for s in sets:
        coeffs.append(tuple(res.x[pos:pos + len(s)]))
        pos += len(s)
    d = len(sets[0][0])
    point = exact.combine(coeffs[0], [tuple(map(Fraction, p)) for p in sets[0]], d)
    return IntersectionCertificate(NONEMPTY, point, tuple(coeffs))


def hulls_meet(sets: Sequence[Sequence[Sequence]]) -> bool:
    return solve_feasibility(*hull_system(sets)).feasible


def verify_certificate(sets: Sequence[Sequence[Sequence]], cert: IntersectionCertificate) -> bool:
    """Re-check a certificate from scratch; False on any defect."""
    try:
        d = _validate(sets)
    except HullInputError:
        return False
    if cert.verdict == NONEMPTY:
        if cert.point is None or cert.coefficients is None:
            return False
        if len(cert.point) != d or len(cert.coefficients) != len(sets):
            return False
        for s, lam in zip(sets, cert.coefficients):
            if len(lam) != len(s) or any(c < 0 for c in lam) or sum(lam) != 1:
                return False
            if exact.combine(lam, [tuple(map(Fraction, p)) for p in s], d) != tuple(cert.point):
                return False
        return True
    if cert.verdict == EMPTY:
        y = cert.farkas
        if y is None:
            return False
        a, b = hull_system(sets)
        if len(y) != len(a):
            return False
        for j in range(len(a[0])):
            if sum(y[i] * a[i][j] for i in range(len(a))) > 0:
                return False
        return sum(yi * bi for yi, bi in zip(y, b)) > 0
    return False


ORACLE_MAX_POINTS = 16
ORACLE_MAX_DIM = 5


def oracle_common_point(sets: Sequence[Sequence[Sequence]]) -> bool:
    """Independent brute-force decision by Caratheodory enumeration.

    The weight system is feasible iff it has a basic feasible solution: some
    linearly independent set of columns, at least one from each point set,
    whose unique solution is nonnegative.  Every such column subset is tried
    with plain Gaussian elimination; no simplex is involved.
    """
    d = _validate(sets)
    total = sum(len(s) for s in sets)
    if total > ORACLE_MAX_POINTS or d > ORACLE_MAX_DIM:
        raise HullInputError(f"instance too large for the oracle ({total} points, d={d})")
    a, b = hull_system(sets)
    owner = [s for s, pts in enumerate(sets) for _ in pts]
    k = len(sets)
    max_size = exact.rank(a)
    for size in range(k, max_size + 1):
        for cols in combinations(range(total), size):
            if len({owner[c] for c in cols}) < k:
                continue
            sub = [[row[c] for c in cols] for row in a]
            sol = exact.solve_linear(sub, b)
            if sol.solution is None or sol.nullspace:
                continue
            if all(v >= 0 for v in sol.solution):
                return True
    return False


def _integral_point(p) -> Tuple[Tuple[int, ...], int]:
    """Write p as v / q with integer vector v and positive integer q."""
    ints, q = exact.integer_row([Fraction(c) for c in p])
    return tuple(ints), q


def _meets_integral(sets) -> bool:
    """Feasibility with weights rescaled by each point's denominator.

    Substituting lambda = q * mu for a point v / q keeps the system integral
    without changing its feasibility.
    """
    k = len(sets)
    d = len(sets[0][0][0])
    ncols = sum(len(s) for s in sets)
    a, b = [], []
    pos = 0
    starts = []
    for s in sets:
        starts.append(pos)
        row = [0] * ncols
        for j, (_, q) in enumerate(s):
            row[pos + j] = q
        a.append(row)
        b.append(1)
        pos += len(s)
    first = sets[0]
    for s in range(1, k):
        off = starts[s]
        for t in range(d):
            row = [0] * ncols
            for j, (v, _) in enumerate(first):
                row[j] = v[t]
            for j, (v, _) in enumerate(sets[s]):
                row[off + j] = -v[t]
            a.append(row)
            b.append(0)
    return solve_feasibility(a, b, integral=True).feasible


class HullCache:
    """Memoised intersection verdicts for subsets of registered points.

    Points are interned by their exact coordinates, so two configurations
    that share points also share verdicts about them.  A subset is a bit
    mask over interned ids; a k-tuple of subsets is keyed by its sorted masks.
    """

    def __init__(self):
        self._ids = {}
        self._coords: List[tuple] = []
        self._integral: List[tuple] = []
        self._verdicts = {}
        self.lp_calls = 0

    def view(self, points: Sequence[Sequence]) -> "PointView":
        gids = []
        for p in points:
            key = tuple(Fraction(c) for c in p)
            gid = self._ids.get(key)
            if gid is None:
                gid = self._ids[key] = len(self._coords)
                self._coords.append(key)
                self._integral.append(_integral_point(key))
            gids.append(gid)
        return PointView(self, gids)

    def _sets(self, gmasks, table=None):
        table = self._coords if table is None else table
        out = []
        for m in gmasks:
            pts = []
            while m:
                low = m & -m
                pts.append(table[low.bit_length() - 1])
                m ^= low
            out.append(pts)
        return out

    def meets_global(self, gmasks: Tuple[int, ...]) -> bool:
        key = tuple(sorted(gmasks))
        v = self._verdicts.get(key)
        if v is None:
            self.lp_calls += 1
            v = self._verdicts[key] = _meets_integral(self._sets(key, self._integral))
        return v

    def __len__(self):
        return len(self._verdicts)


class PointView:
    """A configuration's points as seen through a :class:`HullCache`."""

    def __init__(self, cache: HullCache, gids: Sequence[int]):
        self.cache = cache
        self.gids = list(gids)
        n = len(gids)
        if gids == list(range(n)):
            self._table = None
        elif n <= 16:
            table = [0] * (1 << n)
            for m in range(1, 1 << n):
                low = m & -m
                table[m] = table[m ^ low] | (1 << gids[low.bit_length() - 1])
            self._table = table
        else:
            self._table = False

    def to_global(self, mask: int) -> int:
        if self._table is None:
            return mask
        if self._table is not False:
            return self._table[mask]
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= 1 << self.gids[i]
            mask >>= 1
            i += 1
        return out

    def meets(self, masks: Sequence[int]) -> bool:
        return self.cache.meets_global(tuple(self.to_global(m) for m in masks))

    def certificate(self, masks: Sequence[int]) -> IntersectionCertificate:
        return hulls_common_point(self.point_sets(masks))

    def point_sets(self, masks: Sequence[int]):
        """The sets as coordinate lists, in this view's point order."""
        coords = self.cache._coords
        out = []
        for m in masks:
            pts = []
            i = 0
            while m:
                if m & 1:
                    pts.append(coords[self.gids[i]])
                m >>= 1
                i += 1
            out.append(pts)
        return out

"""A centred simplex frame p_0..p_d with sum(p_i) = 0, and the support calculus.

Every x in R^d has a unique representation x = sum(xi_i * p_i) with all
xi_i >= 0 and min(xi_i) = 0; its support is {i : xi_i > 0}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import FrozenSet, Sequence, Tuple

from . import exact
from .exact import DimensionError, Vector


class FrameError(ValueError):
    pass


@dataclass(frozen=True)
class SimplexFrame:
    d: int
    vertices: Tuple[Vector, ...]

    def __post_init__(self):
        if self.d < 1:
            raise FrameError("dimension must be at least 1")
        if len(self.vertices) != self.d + 1:
            raise FrameError(f"need {self.d + 1} vertices, got {len(self.vertices)}")
        for v in self.vertices:
            if len(v) != self.d:
                raise FrameError("vertex of the wrong dimension")
        total = exact.zeros(self.d)
        for v in self.vertices:
            total = exact.add(total, v)
        if any(total):
            raise FrameError("frame vertices must sum to zero")
        for subset in combinations(self.vertices, self.d):
            if exact.rank(subset) != self.d:
                raise FrameError("some d of the vertices are linearly dependent")
        # solving against the first d vertices recovers coefficients quickly
        object.__setattr__(self, "_basis_t", exact.transpose(self.vertices[: self.d]))

    def to_json(self) -> dict:
        return {"d": self.d, "vertices": [exact.format_vector(v) for v in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "SimplexFrame":
        return cls(int(data["d"]), tuple(exact.vector(v) for v in data["vertices"]))

    def is_standard(self) -> bool:
        return self == standard_frame(self.d)


def standard_frame(d: int) -> SimplexFrame:
    """p_i = e_i for i < d and p_d = -(e_0 + ... + e_{d-1})."""
    if d < 1:
        raise FrameError("dimension must be at least 1")
    verts = []
    for i in range(d):
        verts.append(tuple(Fraction(1 if t == i else 0) for t in range(d)))
    verts.append(tuple(Fraction(-1) for _ in range(d)))
    return SimplexFrame(d, tuple(verts))


def nonneg_representation(frame: SimplexFrame, x: Sequence[Fraction]) -> Vector:
    """The coefficients xi with sum(xi_i p_i) = x, xi >= 0 and min(xi) = 0."""
    if len(x) != frame.d:
        raise DimensionError(f"point of length {len(x)} in dimension {frame.d}")
    sol = exact.solve_linear(frame._basis_t, x).solution
    alpha = list(sol) + [Fraction(0)]
    low = min(alpha)
    return tuple(a - low for a in alpha)


def support(frame: SimplexFrame, x: Sequence[Fraction]) -> FrozenSet[int]:
    return frozenset(i for i, xi in enumerate(nonneg_representation(frame, x)) if xi > 0)


def from_coefficients(frame: SimplexFrame, xi: Sequence[Fraction]) -> Vector:
    """sum(xi_i p_i); the coefficients need not be normalised."""
    if len(xi) != frame.d + 1:
        raise DimensionError(f"need {frame.d + 1} coefficients, got {len(xi)}")
    return exact.combine([exact.rational(c) for c in xi], frame.vertices, frame.d)

"""Rayed point configurations: r-1 points on each open ray {t * p_i : t > 0}.

Points are identified by (ray, level), level 1 being the highest point on
its ray.  A point's coordinates are ``height * p_ray + offset``; offsets are
zero until a perturbation move is applied.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from . import exact
from .exact import Vector
from .frame import SimplexFrame, from_coefficients, standard_frame


class ConfigError(ValueError):
    pass


class CalibrationError(RuntimeError):
    pass


class PointId(NamedTuple):
    ray: int
    level: int

    def __str__(self):
        return f"p[{self.ray},{self.level}]"


@dataclass(frozen=True)
class PerturbationMove:
    target: PointId
    direction: Vector
    magnitude: Optional[Fraction] = None

    def __post_init__(self):
        if not any(self.direction):
            raise ConfigError("perturbation direction must be nonzero")
        if self.magnitude is not None and self.magnitude <= 0:
            raise ConfigError("perturbation magnitude must be positive")

    def with_magnitude(self, eps) -> "PerturbationMove":
        return replace(self, magnitude=exact.rational(eps))


@dataclass(frozen=True)
class RayConfiguration:
    frame: SimplexFrame
    r: int
    heights: Tuple[Tuple[Fraction, ...], ...]
    offsets: Tuple[Tuple[PointId, Vector], ...] = ()
    seed: Optional[int] = None
    perturbation: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        d = self.frame.d
        if self.r < 2:
            raise ConfigError("r must be at least 2")
        if len(self.heights) != d + 1:
            raise ConfigError(f"need heights for {d + 1} rays, got {len(self.heights)}")
        for i, hs in enumerate(self.heights):
            if len(hs) != self.r - 1:
                raise ConfigError(f"ray {i}: need {self.r - 1} heights, got {len(hs)}")
            if any(h <= 0 for h in hs):
                raise ConfigError(f"ray {i}: heights must be positive")
            if any(a <= b for a, b in zip(hs, hs[1:])):
                raise ConfigError(f"ray {i}: heights must be distinct and listed highest first")
        seen = set()
        for pid, off in self.offsets:
            if pid in seen:
                raise ConfigError(f"duplicate offset for {pid}")
            seen.add(pid)
            self._check_id(pid)
            if len(off) != d:
                raise ConfigError("offset of the wrong dimension")

    @property
    def d(self) -> int:
        return self.frame.d

    @property
    def n_points(self) -> int:
        return (self.d + 1) * (self.r - 1)

    def _check_id(self, pid: PointId):
        if not (0 <= pid.ray <= self.d and 1 <= pid.level <= self.r - 1):
            raise ConfigError(f"no point {tuple(pid)} in this configuration")

    def point_ids(self) -> List[PointId]:
        """All points in index order: by ray, then level (highest first)."""
        return [PointId(i, m) for i in range(self.d + 1) for m in range(1, self.r)]

    def index_of(self, pid: PointId) -> int:
        self._check_id(pid)
        return pid.ray * (self.r - 1) + pid.level - 1

    def id_of(self, index: int) -> PointId:
        return PointId(index // (self.r - 1), index % (self.r - 1) + 1)

    def height(self, pid: PointId) -> Fraction:
        return self.heights[pid.ray][pid.level - 1]

    def offset(self, pid: PointId) -> Vector:
        for q, off in self.offsets:
            if q == pid:
                return off
        return exact.zeros(self.d)

    @cached_property
    def points(self) -> Tuple[Vector, ...]:
        return tuple(point_coordinates(self, pid) for pid in self.point_ids())

    @cached_property
    def home_rays(self) -> Tuple[int, ...]:
        return tuple(pid.ray for pid in self.point_ids())

    def moved_indices(self) -> List[int]:
        return sorted(self.index_of(pid) for pid, off in self.offsets if any(off))

    def to_json(self) -> dict:
        data = {
            "d": self.d,
            "r": self.r,
            "heights": [[exact.format_rational(h) for h in hs] for hs in self.heights],
            "offsets": [
                {"ray": pid.ray, "level": pid.level, "offset": exact.format_vector(off)}
                for pid, off in sorted(self.offsets)
            ],
        }
        if self.seed is not None:
            data["seed"] = self.seed
        if not self.frame.is_standard():
            data["frame"] = self.frame.to_json()
        if self.perturbation is not None:
            data["perturbation"] = self.perturbation
        return data

    @classmethod
    def from_json(cls, data: dict) -> "RayConfiguration":
        d = int(data["d"])
        frame = SimplexFrame.from_json(data["frame"]) if "frame" in data else standard_frame(d)
        if frame.d != d:
            raise ConfigError("frame dimension disagrees with d")
        heights = tuple(tuple(exact.rational(h) for h in hs) for hs in data["heights"])
        offsets = tuple(
            (PointId(int(o["ray"]), int(o["level"])), exact.vector(o["offset"]))
            for o in data.get("offsets", [])
        )
        return cls(frame, int(data["r"]), heights, tuple(sorted(offsets)),
                   data.get("seed"), data.get("perturbation"))

    def config_hash(self) -> str:
        """Digest of the canonical JSON form (geometry only)."""
        data = self.to_json()
        data.pop("perturbation", None)
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def default_heights(d: int, r: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Level m sits at height r - m on every ray."""
    return tuple(tuple(Fraction(r - m) for m in range(1, r)) for _ in range(d + 1))


def build_configuration(d: int, r: int, heights=None, frame: Optional[SimplexFrame] = None,
                        seed: Optional[int] = None) -> RayConfiguration:
    if d < 1:
        raise ConfigError("d must be at least 1")
    if r < 2:
        raise ConfigError("r must be at least 2")
    frame = frame or standard_frame(d)
    if heights is None:
        heights = default_heights(d, r)
    else:
        heights = tuple(tuple(exact.rational(h) for h in hs) for hs in heights)
    return RayConfiguration(frame, r, heights, (), seed)


def random_heights(d: int, r: int, rng: random.Random) -> Tuple[Tuple[Fraction, ...], ...]:
    """Distinct positive rational heights per ray, drawn from ``rng``."""
    out = []
    for _ in range(d + 1):
        hs = set()
        while len(hs) < r - 1:
            hs.add(Fraction(rng.randint(1, 60), rng.randint(1, 12)))
        out.append(tuple(sorted(hs, reverse=True)))
    return tuple(out)


def generic_configuration(d: int, r: int, seed: int,
                          is_generic: Optional[Callable[[RayConfiguration], bool]] = None,
                          max_draws: int = 100) -> RayConfiguration:
    """Seeded pseudo-random heights; redraw with seed+1, ... until ``is_generic`` accepts."""
    for s in range(seed, seed + max_draws):
        cfg = build_configuration(d, r, random_heights(d, r, random.Random(s)), seed=s)
        if is_generic is None or is_generic(cfg):
            return cfg
    raise ConfigError(f"no generic configuration within {max_draws} seeds from {seed}")


def point_coordinates(config: RayConfiguration, pid: PointId) -> Vector:
    config._check_id(pid)
    base = exact.scale(config.height(pid), config.frame.vertices[pid.ray])
    return exact.add(base, config.offset(pid))


def apply_move(config: RayConfiguration, move: PerturbationMove) -> RayConfiguration:
    """Displace the target point by magnitude * direction; other points stay put."""
    config._check_id(move.target)
    if move.magnitude is None:
        raise ConfigError("move has no magnitude yet")
    if len(move.direction) != config.d:
        raise ConfigError("move direction of the wrong dimension")
    delta = exact.scale(move.magnitude, move.direction)
    offsets: Dict[PointId, Vector] = dict(config.offsets)
    offsets[move.target] = exact.add(offsets.get(move.target, exact.zeros(config.d)), delta)
    return replace(config, offsets=tuple(sorted(offsets.items())), perturbation=None)


def apply_moves(config: RayConfiguration, moves: Sequence[PerturbationMove]) -> RayConfiguration:
    for mv in moves:
        config = apply_move(config, mv)
    return config


def recipe_342(config: RayConfiguration) -> List[PerturbationMove]:
    """Two moves for d=3, r=4: p[0,1] towards p[3,1], then p[3,3] towards p[0,3]."""
    if (config.d, config.r) != (3, 4):
        raise ConfigError(f"recipe 342 needs d=3, r=4; got d={config.d}, r={config.r}")
    return [
        PerturbationMove(PointId(0, 1), point_coordinates(config, PointId(3, 1))),
        PerturbationMove(PointId(3, 3), point_coordinates(config, PointId(0, 3))),
    ]


# direction of each move, given as frame coefficients (sum u_i p_i)
RECIPE_532_COEFFICIENTS = (
    (PointId(0, 1), (0, 1, 2, 3, 4, 5)),
    (PointId(5, 1), (5, 4, 3, 2, 1, 0)),
    (PointId(2, 1), (1, 0, 0, 0, 1, 0)),
)


def recipe_532(config: RayConfiguration) -> List[PerturbationMove]:
    """Three moves for d=5, r=3 on p[0,1], p[5,1], p[2,1]."""
    if (config.d, config.r) != (5, 3):
        raise ConfigError(f"recipe 532 needs d=5, r=3; got d={config.d}, r={config.r}")
    return [PerturbationMove(pid, from_coefficients(config.frame, u))
            for pid, u in RECIPE_532_COEFFICIENTS]


RECIPES = {"342": recipe_342, "532": recipe_532}

START_MAGNITUDE = Fraction(1, 16)
MAX_HALVINGS = 60


def calibrate_epsilons(config: RayConfiguration, moves: Sequence[PerturbationMove],
                       good_flags: Callable[[RayConfiguration], Sequence[bool]],
                       start: Fraction = START_MAGNITUDE,
                       max_halvings: int = MAX_HALVINGS) -> List[Fraction]:
    """Pick a magnitude for each move so that no good partition turns bad.

    ``good_flags(cfg)`` must return one flag per partition, in enumeration
    order.  Moves are calibrated one after another; for each, the magnitude
    starts at ``start`` and is halved until every partition that was good
    before the move is still good after it.
    """
    magnitudes: List[Fraction] = []
    current = config
    before = good_flags(current) if moves else None
    for mv in moves:
        eps = Fraction(start)
        for _ in range(max_halvings):
            candidate = apply_move(current, mv.with_magnitude(eps))
            after = good_flags(candidate)
            if all(b or not a for a, b in zip(before, after)):
                break
            eps /= 2
        else:
            raise CalibrationError(f"no magnitude found for move on {mv.target} "
                                   f"after {max_halvings} halvings")
        magnitudes.append(eps)
        current, before = candidate, after
    return magnitudes

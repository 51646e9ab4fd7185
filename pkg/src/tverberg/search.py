"""Search for partitions whose hulls meet: all r at once, or every k of them.

The search builds a partition one part at a time.  Each new part contains
the smallest point not yet used, so every unlabeled partition is visited at
most once.  A part is final as soon as it is chosen, which allows pruning: if
any few (at most k) finished parts already have hulls with empty common
intersection, no completion can succeed.  Exhausting the tree without a hit
therefore proves that no such partition exists.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from . import exact
from .exact import Vector
from .hulls import HullCache, IntersectionCertificate, PointView, hulls_common_point
from .partitions import Partition


@dataclass(frozen=True)
class PointCloud:
    d: int
    points: Tuple[Vector, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        for p in self.points:
            if len(p) != self.d:
                raise ValueError(f"point {exact.format_vector(p)} is not in dimension {self.d}")

    @classmethod
    def of(cls, points: Sequence[Sequence]) -> "PointCloud":
        pts = tuple(exact.vector(p) for p in points)
        if not pts:
            raise ValueError("empty point cloud")
        return cls(len(pts[0]), pts)

    def to_json(self) -> dict:
        return {"d": self.d, "points": [exact.format_vector(p) for p in self.points]}

    @classmethod
    def from_json(cls, data: dict) -> "PointCloud":
        return cls(int(data["d"]), tuple(exact.vector(p) for p in data["points"]))


@dataclass(frozen=True)
class SearchResult:
    found: bool
    r: int
    k: int
    partition: Optional[Partition]
    certificates: Tuple[Tuple[Tuple[int, ...], IntersectionCertificate], ...]
    nodes: int

    def to_json(self) -> dict:
        out = {"verdict": "found" if self.found else "none", "r": self.r, "k": self.k,
               "nodes": self.nodes}
        if self.found:
            out["partition"] = str(self.partition)
            out["parts"] = self.partition.blocks()
            out["certificates"] = [{"tuple": list(t), "certificate": c.to_json()}
                                   for t, c in self.certificates]
        return out


def _subsets_ordered(rest: List[int], min_leave: int, target: int):
    """Subsets of ``rest`` leaving at least ``min_leave`` points, sizes near ``target`` first."""
    max_size = len(rest) - min_leave
    sizes = sorted(range(0, max_size + 1), key=lambda s: (abs(s - target), s))
    for size in sizes:
        yield from combinations(rest, size)


def _shortfall(view: PointView, masks: Sequence[int], k: int) -> int:
    """0 when every k parts meet; otherwise grows with how early the first failure is."""
    r = len(masks)
    for size in range(2, k + 1):
        empty = sum(1 for tup in combinations(range(r), size)
                    if not view.meets([masks[j] for j in tup]))
        if empty:
            return empty + 1000 * (k - size + 1)
    return 0


def _local_search(view: PointView, n: int, r: int, k: int, seed: int,
                  max_evals: int) -> Optional[List[int]]:
    """Seeded hill climbing over labelings; moves relabel one point or swap two.

    Only a fast first attempt: failure here proves nothing.
    """
    rng = random.Random(seed)
    labels = [i % r for i in range(n)]
    rng.shuffle(labels)

    def masks_for(lab):
        out = [0] * r
        for i, a in enumerate(lab):
            out[a] |= 1 << i
        return out

    current = _shortfall(view, masks_for(labels), k)
    evals = 1
    while current and evals < max_evals:
        trial = labels[:]
        if rng.random() < 0.5:
            trial[rng.randrange(n)] = rng.randrange(r)
        else:
            i, j = rng.sample(range(n), 2)
            trial[i], trial[j] = trial[j], trial[i]
        masks = masks_for(trial)
        if 0 in masks:
            continue
        score = _shortfall(view, masks, k)
        evals += 1
        if score <= current:
            labels, current = trial, score
    return masks_for(labels) if current == 0 else None


class _Search:
    def __init__(self, view: PointView, n: int, r: int, k: int, node_limit: Optional[int]):
        self.view = view
        self.n = n
        self.r = r
        self.k = k
        self.nodes = 0
        self.node_limit = node_limit

    def _compatible(self, blocks: List[int], rest_mask: int = 0) -> bool:
        # every tuple of size <= k that includes the newest block must meet
        new = len(blocks) - 1
        for size in range(2, min(self.k, len(blocks)) + 1):
            for others in combinations(range(new), size - 1):
                if not self.view.meets([blocks[j] for j in others] + [blocks[new]]):
                    return False
        if rest_mask:
            # later parts are drawn from the unused points, so with the newest
            # block and up to k-2 others they must meet conv(unused)
            for size in range(1, min(self.k - 1, len(blocks)) + 1):
                for others in combinations(range(new), size - 1):
                    if not self.view.meets([blocks[j] for j in others] + [blocks[new], rest_mask]):
                        return False
        return True

    def run(self, blocks: List[int], remaining: List[int]) -> Optional[List[int]]:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise SearchLimitReached(self.nodes)
        left = self.r - len(blocks)
        if left == 1:
            mask = 0
            for i in remaining:
                mask |= 1 << i
            blocks.append(mask)
            if self._compatible(blocks):
                return list(blocks)
            blocks.pop()
            return None
        head, rest = remaining[0], remaining[1:]
        target = max(0, round(len(remaining) / left) - 1)
        for extra in _subsets_ordered(rest, left - 1, target):
            mask = 1 << head
            for i in extra:
                mask |= 1 << i
            blocks.append(mask)
            chosen = set(extra)
            left_over = [i for i in rest if i not in chosen]
            rest_mask = 0
            for i in left_over:
                rest_mask |= 1 << i
            if self._compatible(blocks, rest_mask):
                found = self.run(blocks, left_over)
                if found is not None:
                    return found
            blocks.pop()
        return None


class SearchLimitReached(RuntimeError):
    pass


LOCAL_EVALS = 2000


def find_k_wise_partition(cloud: PointCloud, r: int, k: int, cache: Optional[HullCache] = None,
                          order: Optional[Sequence[int]] = None,
                          node_limit: Optional[int] = None, seed: int = 0,
                          local_evals: int = LOCAL_EVALS) -> SearchResult:
    """An r-partition in which every k parts have intersecting hulls, or a proof there is none.

    A short seeded local search runs first; if it fails, the exhaustive
    part-by-part search decides.  ``order`` optionally permutes the points
    before the exhaustive phase; the returned partition always refers to the
    original indices.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    if not 2 <= k <= r:
        raise ValueError(f"k must lie in 2..{r}")
    n = len(cloud.points)
    if n < r:
        return SearchResult(False, r, k, None, (), 0)
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the point indices")
    view = (HullCache() if cache is None else cache).view([cloud.points[i] for i in order])
    blocks = _local_search(view, n, r, k, seed, local_evals) if local_evals else None
    search = _Search(view, n, r, k, node_limit)
    if blocks is None:
        blocks = search.run([], list(range(n)))
    if blocks is None:
        return SearchResult(False, r, k, None, (), search.nodes)
    # back to original indices
    orig_blocks = [[order[i] for i in range(n) if m >> i & 1] for m in blocks]
    partition = Partition.from_blocks(orig_blocks, n)
    parts = [[cloud.points[i] for i in b] for b in partition.blocks()]
    certs = []
    for tup in combinations(range(r), k):
        certs.append((tup, hulls_common_point([parts[j] for j in tup])))
    if not all(c.nonempty for _, c in certs):
        raise AssertionError("search returned a partition whose certificate fails")
    return SearchResult(True, r, k, partition, tuple(certs), search.nodes)


def find_tverberg_partition(cloud: PointCloud, r: int, cache: Optional[HullCache] = None,
                            order: Optional[Sequence[int]] = None, seed: int = 0,
                            local_evals: int = LOCAL_EVALS) -> SearchResult:
    """An r-partition whose r hulls share a point, certified by that point."""
    return find_k_wise_partition(cloud, r, r, cache, order, seed=seed, local_evals=local_evals)

"""Set partitions into exactly r nonempty unlabeled parts.

A partition of points 0..n-1 is stored as a restricted-growth string: point
i gets label a_i, a_0 = 0 and a_i <= 1 + max(a_0..a_{i-1}).  Enumeration
runs in lexicographic order of these strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterator, List, Sequence, Tuple

LABELS = "0123456789abcdefghijklmnopqrstuvwxyz"
SHARD_PREFIX = 6


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    assignment: Tuple[int, ...]
    r: int

    def __post_init__(self):
        if not is_restricted_growth(self.assignment):
            raise PartitionError(f"not a restricted-growth string: {self.assignment}")
        used = max(self.assignment) + 1 if self.assignment else 0
        if used != self.r:
            raise PartitionError(f"string uses {used} labels, expected {self.r}")

    def __str__(self):
        return "".join(LABELS[a] for a in self.assignment)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        labels = tuple(LABELS.index(c) for c in text)
        return cls(labels, max(labels) + 1 if labels else 0)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]], n: int) -> "Partition":
        """Canonicalise a list of index blocks (any order) into growth-string form."""
        label_of = [-1] * n
        for b, block in enumerate(blocks):
            for i in block:
                if label_of[i] != -1:
                    raise PartitionError(f"index {i} appears twice")
                label_of[i] = b
        if -1 in label_of:
            raise PartitionError("blocks do not cover every index")
        return cls(canonical(label_of), len(blocks))

    def blocks(self) -> List[List[int]]:
        out: List[List[int]] = [[] for _ in range(self.r)]
        for i, a in enumerate(self.assignment):
            out[a].append(i)
        return out

    def masks(self) -> Tuple[int, ...]:
        return masks_of(self.assignment, self.r)


def is_restricted_growth(labels: Sequence[int]) -> bool:
    top = -1
    for a in labels:
        if a < 0 or a > top + 1:
            return False
        top = max(top, a)
    return True


def canonical(labels: Sequence[int]) -> Tuple[int, ...]:
    """Relabel so that labels first appear in increasing order."""
    mapping = {}
    out = []
    for a in labels:
        if a not in mapping:
            mapping[a] = len(mapping)
        out.append(mapping[a])
    return tuple(out)


def masks_of(labels: Sequence[int], r: int) -> Tuple[int, ...]:
    masks = [0] * r
    for i, a in enumerate(labels):
        masks[a] |= 1 << i
    return tuple(masks)


@lru_cache(maxsize=None)
def partition_count(n: int, r: int) -> int:
    """Stirling number of the second kind S(n, r)."""
    if n < 0 or r < 0:
        raise PartitionError("negative arguments")
    if n == 0 and r == 0:
        return 1
    if n == 0 or r == 0:
        return 0
    if r > n:
        return 0
    # iterate over n to avoid deep recursion
    row = [1] + [0] * r  # S(0, j)
    for m in range(1, n + 1):
        new = [0] * (r + 1)
        for j in range(1, min(m, r) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[r]


def _check(n: int, r: int):
    if r < 1 or n < 1:
        raise PartitionError("need n >= 1 and r >= 1")
    if r > n:
        raise PartitionError(f"cannot split {n} points into {r} nonempty parts")


def _extend(prefix: List[int], used: int, n: int, r: int) -> Iterator[Tuple[int, ...]]:
    i = len(prefix)
    if i == n:
        yield tuple(prefix)
        return
    remaining = n - i
    lo = 0 if remaining > r - used else used  # must open a new label now
    for a in range(lo, min(used, r - 1) + 1):
        prefix.append(a)
        yield from _extend(prefix, max(used, a + 1), n, r)
        prefix.pop()


def growth_strings(n: int, r: int) -> Iterator[Tuple[int, ...]]:
    _check(n, r)
    yield from _extend([], 0, n, r)


def _prefixes(n: int, r: int, length: int) -> List[Tuple[int, ...]]:
    out = []

    def walk(prefix, used):
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        remaining = n - len(prefix)
        lo = 0 if remaining > r - used else used
        for a in range(lo, min(used, r - 1) + 1):
            prefix.append(a)
            walk(prefix, max(used, a + 1))
            prefix.pop()

    walk([], 0)
    return out


def shard_strings(n: int, r: int, shard_index: int, shard_total: int) -> Iterator[Tuple[int, ...]]:
    """Growth strings whose length-6 prefix has rank = shard_index (mod shard_total)."""
    _check(n, r)
    if shard_total < 1 or not 0 <= shard_index < shard_total:
        raise PartitionError(f"invalid shard {shard_index}/{shard_total}")
    if shard_total == 1:
        yield from _extend([], 0, n, r)
        return
    for rank_, prefix in enumerate(_prefixes(n, r, min(n, SHARD_PREFIX))):
        if rank_ % shard_total == shard_index:
            yield from _extend(list(prefix), max(prefix) + 1, n, r)


def enumerate_partitions(n: int, r: int) -> Iterator[Partition]:
    for labels in growth_strings(n, r):
        yield Partition(labels, r)


def shard(n: int, r: int, shard_index: int, shard_total: int) -> Iterator[Partition]:
    for labels in shard_strings(n, r, shard_index, shard_total):
        yield Partition(labels, r)


def parts_of(config, partition: Partition) -> List[FrozenSet]:
    """The parts as sets of PointIds, in label order."""
    if len(partition.assignment) != config.n_points:
        raise PartitionError(f"partition of {len(partition.assignment)} points "
                             f"for a configuration of {config.n_points}")
    ids = config.point_ids()
    return [frozenset(ids[i] for i in block) for block in partition.blocks()]

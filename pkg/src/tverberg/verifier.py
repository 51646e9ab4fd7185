"""Classification of r-partitions of a ray configuration.

A partition is *good* for k when some k of its parts have convex hulls with
empty common intersection, and *bad* otherwise.  ``min_empty_k`` is the least
such k (None for a Tverberg partition).  Lower-bound verification runs this
over every partition of the configuration.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .config import RayConfiguration
from .hulls import HullCache, IntersectionCertificate, PointView
from .partitions import Partition, masks_of, partition_count, shard_strings

SURJECTIVE_ASSUMPTION = ("only partitions with r nonempty parts are enumerated; "
                         "a partition with an empty part is good for every k")

_DEFAULT_CACHE: Optional[HullCache] = None


def default_cache() -> HullCache:
    global _DEFAULT_CACHE
    if _DEFAULT_CACHE is None:
        _DEFAULT_CACHE = HullCache()
    return _DEFAULT_CACHE


def _view(config: RayConfiguration, cache: Optional[HullCache]) -> PointView:
    return (default_cache() if cache is None else cache).view(config.points)


def _as_indices(config: RayConfiguration, part: Iterable) -> List[int]:
    out = []
    for p in part:
        out.append(p if isinstance(p, int) else config.index_of(p))
    return out


def ray_index_set(config: RayConfiguration, part: Iterable) -> FrozenSet[int]:
    """I(C): the home rays of the points in ``part`` (PointIds or indices).

    A perturbed point keeps the ray it was placed on.
    """
    rays = config.home_rays
    return frozenset(rays[i] for i in _as_indices(config, part))


# -- classification -----------------------------------------------------------

def _first_empty(view: PointView, masks: Sequence[int], max_size: int):
    r = len(masks)
    for size in range(2, max_size + 1):
        for tup in combinations(range(r), size):
            if not view.meets([masks[j] for j in tup]):
                return size, tup
    return None, None


@dataclass(frozen=True)
class PartClassification:
    partition: Partition
    k: int
    good: bool
    min_empty_k: Optional[int]
    witness_tuple: Optional[Tuple[int, ...]]
    certificate: Optional[IntersectionCertificate]


def min_empty_k(config: RayConfiguration, partition: Partition,
                cache: Optional[HullCache] = None) -> Optional[int]:
    """Least k such that some k parts have hulls with empty intersection."""
    size, _ = _first_empty(_view(config, cache), partition.masks(), partition.r)
    return size


def classify(config: RayConfiguration, partition: Partition, k: int,
             cache: Optional[HullCache] = None) -> PartClassification:
    if not 2 <= k <= partition.r:
        raise ValueError(f"k must lie in 2..{partition.r}, got {k}")
    if len(partition.assignment) != config.n_points:
        raise ValueError("partition does not match the configuration")
    view = _view(config, cache)
    masks = partition.masks()
    size, tup = _first_empty(view, masks, partition.r)
    if size is not None and size <= k:
        cert = view.certificate([masks[j] for j in tup])
        return PartClassification(partition, k, True, size, tup, cert)
    # bad: the witness is the full Tverberg point when all parts meet
    cert = None
    wtup = None
    if size is None:
        wtup = tuple(range(partition.r))
        cert = view.certificate(masks)
    return PartClassification(partition, k, False, size, wtup, cert)


def tuple_certificates(config: RayConfiguration, partition: Partition, k: int,
                       cache: Optional[HullCache] = None) -> List[Tuple[Tuple[int, ...], IntersectionCertificate]]:
    view = _view(config, cache)
    masks = partition.masks()
    return [(tup, view.certificate([masks[j] for j in tup]))
            for tup in combinations(range(partition.r), k)]


def good_flags(config: RayConfiguration, k: int, cache: Optional[HullCache] = None) -> bytearray:
    """One flag per partition, in enumeration order: 1 = good for k."""
    view = _view(config, cache)
    r = config.r
    out = bytearray()
    for labels in shard_strings(config.n_points, r, 0, 1):
        size, _ = _first_empty(view, masks_of(labels, r), k)
        out.append(1 if size is not None else 0)
    return out


# -- lower-bound verification --------------------------------------------------

@dataclass
class ShardResult:
    total: int = 0
    good: int = 0
    bad: List[Partition] = field(default_factory=list)
    histogram: Counter = field(default_factory=Counter)


def _hist_key(size: Optional[int]) -> str:
    return "none" if size is None else str(size)


def scan_shard(config: RayConfiguration, k: int, shard_index: int = 0, shard_total: int = 1,
               cache: Optional[HullCache] = None) -> ShardResult:
    view = _view(config, cache)
    r = config.r
    res = ShardResult()
    for labels in shard_strings(config.n_points, r, shard_index, shard_total):
        size, _ = _first_empty(view, masks_of(labels, r), r)
        res.total += 1
        res.histogram[_hist_key(size)] += 1
        if size is not None and size <= k:
            res.good += 1
        else:
            res.bad.append(Partition(labels, r))
    return res


def _scan_worker(args):
    config, k, idx, total = args
    return scan_shard(config, k, idx, total)


@dataclass
class VerificationReport:
    config_hash: str
    d: int
    r: int
    k: int
    total: int
    good: int
    bad: int
    bad_witnesses: List[dict]
    min_empty_k_histogram: Dict[str, int]
    expected_total: int
    shard: Tuple[int, int] = (0, 1)
    elapsed_ms: int = 0
    assumptions: Tuple[str, ...] = (SURJECTIVE_ASSUMPTION,)
    manifest: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "d": self.d,
            "r": self.r,
            "k": self.k,
            "total": self.total,
            "expected_total": self.expected_total,
            "good": self.good,
            "bad": self.bad,
            "bad_witnesses": self.bad_witnesses,
            "min_empty_k_histogram": dict(sorted(self.min_empty_k_histogram.items())),
            "shard": {"index": self.shard[0], "total": self.shard[1]},
            "assumptions": list(self.assumptions),
            "elapsed_ms": self.elapsed_ms,
            "manifest": self.manifest,
        }

    @classmethod
    def from_json(cls, data: dict) -> "VerificationReport":
        return cls(data["config_hash"], data["d"], data["r"], data["k"], data["total"],
                   data["good"], data["bad"], data["bad_witnesses"],
                   dict(data["min_empty_k_histogram"]), data["expected_total"],
                   (data["shard"]["index"], data["shard"]["total"]), data.get("elapsed_ms", 0),
                   tuple(data.get("assumptions", ())), data.get("manifest"))


def bad_witness(config: RayConfiguration, partition: Partition, k: int,
                cache: Optional[HullCache] = None) -> dict:
    """Every k-tuple of a bad partition with its nonempty certificate."""
    return {
        "partition": str(partition),
        "tuples": [{"tuple": list(tup), "certificate": cert.to_json()}
                   for tup, cert in tuple_certificates(config, partition, k, cache)],
    }


def verify_lower_bound(config: RayConfiguration, k: int, shard_index: int = 0, shard_total: int = 1,
                       jobs: int = 1, cache: Optional[HullCache] = None,
                       max_witnesses: Optional[int] = None) -> VerificationReport:
    """Check every r-partition for k parts with disjoint hull intersection.

    Work is split into prefix shards; with ``jobs > 1`` they run in worker
    processes.  Results are merged in shard order and witnesses sorted, so
    the report does not depend on ``jobs``.
    """
    if not 2 <= k <= config.r:
        raise ValueError(f"k must lie in 2..{config.r}")
    start = time.perf_counter()
    n, r = config.n_points, config.r
    if jobs > 1:
        import multiprocessing as mp
        sub = [(config, k, shard_index + shard_total * j, shard_total * jobs) for j in range(jobs)]
        with mp.get_context("fork").Pool(jobs) as pool:
            parts = pool.map(_scan_worker, sub)
    else:
        parts = [scan_shard(config, k, shard_index, shard_total, cache)]
    merged = ShardResult()
    for p in parts:
        merged.total += p.total
        merged.good += p.good
        merged.bad.extend(p.bad)
        merged.histogram.update(p.histogram)
    merged.bad.sort(key=lambda p: p.assignment)
    chosen = merged.bad if max_witnesses is None else merged.bad[:max_witnesses]
    witnesses = [bad_witness(config, p, k, cache) for p in chosen]
    expected = partition_count(n, r) if shard_total == 1 else merged.total
    return VerificationReport(
        config_hash=config.config_hash(), d=config.d, r=r, k=k,
        total=merged.total, good=merged.good, bad=len(merged.bad),
        bad_witnesses=witnesses, min_empty_k_histogram=dict(merged.histogram),
        expected_total=expected, shard=(shard_index, shard_total),
        elapsed_ms=int((time.perf_counter() - start) * 1000),
    )


class MergeError(ValueError):
    pass


def merge_reports(reports: Sequence[VerificationReport]) -> VerificationReport:
    """Combine shard reports of one configuration into a full report."""
    if not reports:
        raise MergeError("nothing to merge")
    first = reports[0]
    for rep in reports:
        if rep.config_hash != first.config_hash:
            raise MergeError("shard reports come from different configurations")
        if (rep.r, rep.k, rep.d) != (first.r, first.k, first.d):
            raise MergeError("shard reports disagree on d, r or k")
        if rep.shard[1] != first.shard[1]:
            raise MergeError("shard reports use different shard totals")
    indices = sorted(rep.shard[0] for rep in reports)
    if indices != list(range(first.shard[1])):
        raise MergeError(f"shards present {indices}, need 0..{first.shard[1] - 1} exactly once")
    ordered = sorted(reports, key=lambda rep: rep.shard[0])
    hist: Counter = Counter()
    witnesses = []
    for rep in ordered:
        hist.update(rep.min_empty_k_histogram)
        witnesses.extend(rep.bad_witnesses)
    witnesses.sort(key=lambda w: w["partition"])
    total = sum(rep.total for rep in ordered)
    return VerificationReport(
        config_hash=first.config_hash, d=first.d, r=first.r, k=first.k, total=total,
        good=sum(rep.good for rep in ordered), bad=sum(rep.bad for rep in ordered),
        bad_witnesses=witnesses, min_empty_k_histogram=dict(hist),
        expected_total=partition_count((first.d + 1) * (first.r - 1), first.r),
        shard=(0, 1), elapsed_ms=sum(rep.elapsed_ms for rep in ordered),
        assumptions=first.assumptions,
    )


# -- weights ------------------------------------------------------------------

def ray_counts(config: RayConfiguration, partition: Partition) -> List[List[int]]:
    """counts[c][i] = number of points of part c on ray i."""
    counts = [[0] * (config.d + 1) for _ in range(partition.r)]
    rays = config.home_rays
    for idx, label in enumerate(partition.assignment):
        counts[label][rays[idx]] += 1
    return counts


def _weight_from_counts(counts, tup, ray) -> int:
    hits = [counts[c][ray] for c in tup]
    if 0 in hits:
        return 0
    return 1 + sum(1 for h in hits if h > 1)


def weight(config: RayConfiguration, partition: Partition, tup: Sequence[int], ray: int) -> int:
    """W(tuple, ray): 0 if a part misses the ray, else 1 + #parts meeting it twice or more."""
    return _weight_from_counts(ray_counts(config, partition), tuple(tup), ray)


def weight_table(config: RayConfiguration, partition: Partition, k: int) -> Dict[Tuple[int, ...], List[int]]:
    counts = ray_counts(config, partition)
    return {tup: [_weight_from_counts(counts, tup, i) for i in range(config.d + 1)]
            for tup in combinations(range(partition.r), k)}


@dataclass(frozen=True)
class BubaCheck:
    violations: List[Tuple[int, ...]]
    skipped: List[Tuple[int, ...]]


def check_buba(config: RayConfiguration, partition: Partition, k: int,
               cache: Optional[HullCache] = None) -> BubaCheck:
    """For each k-tuple of parts whose hulls meet, the ray weights must sum to >= k.

    Tuples containing a part that touches every ray fall outside the
    statement and are reported as skipped.
    """
    counts = ray_counts(config, partition)
    full = config.d + 1
    view = _view(config, cache)
    masks = partition.masks()
    violations, skipped = [], []
    for tup in combinations(range(partition.r), k):
        if any(sum(1 for x in counts[c] if x) == full for c in tup):
            skipped.append(tup)
            continue
        total = sum(_weight_from_counts(counts, tup, i) for i in range(full))
        if total >= k:
            continue
        if view.meets([masks[c] for c in tup]):
            violations.append(tup)
    return BubaCheck(violations, skipped)


def check_baba(config: RayConfiguration, partition: Partition, k: int) -> List[Tuple[int, int]]:
    """Rays whose total weight over all k-tuples exceeds C(r-1, k): (ray, total) pairs."""
    counts = ray_counts(config, partition)
    bound = comb(config.r - 1, k)
    out = []
    for i in range(config.d + 1):
        total = sum(_weight_from_counts(counts, tup, i) for tup in combinations(range(partition.r), k))
        if total > bound:
            out.append((i, total))
    return out


def ray_weight_totals(config: RayConfiguration, partition: Partition, k: int) -> List[int]:
    counts = ray_counts(config, partition)
    return [sum(_weight_from_counts(counts, tup, i) for tup in combinations(range(partition.r), k))
            for i in range(config.d + 1)]


# -- structural statements ------------------------------------------------------

def small_part_holds(config: RayConfiguration, partition: Partition) -> bool:
    """For every nonempty ray set J some part has at most floor((r-1)|J|/r) points on R(J)."""
    counts = ray_counts(config, partition)
    rays = range(config.d + 1)
    r = partition.r
    for size in range(1, config.d + 2):
        bound = (r - 1) * size // r
        for subset in combinations(rays, size):
            if not any(sum(row[i] for i in subset) <= bound for row in counts):
                return False
    return True


def lowest_middle_highest(config: RayConfiguration, partition: Partition) -> bool:
    """Each part holds exactly one point of every level."""
    per_part = [Counter() for _ in range(partition.r)]
    for idx, label in enumerate(partition.assignment):
        per_part[label][config.id_of(idx).level] += 1
    levels = range(1, config.r)
    return all(all(c[m] == 1 for m in levels) and sum(c.values()) == len(levels) for c in per_part)


def is_structurally_bad_532(config: RayConfiguration, partition: Partition) -> bool:
    """Every pair of parts is split with each orientation on exactly one shared ray.

    "Orientation (i over j) on a ray" means the ray's lower point is in part
    j and its higher point in part i.
    """
    r = partition.r
    over = [[0] * r for _ in range(r)]
    for ray in range(config.d + 1):
        idx = [config.index_of(pid) for pid in config.point_ids() if pid.ray == ray]
        if len(idx) != 2:
            raise ValueError("structural test needs exactly two points per ray")
        hi, lo = sorted(idx, key=lambda j: config.height(config.id_of(j)), reverse=True)
        a, b = partition.assignment[hi], partition.assignment[lo]
        if a != b:
            over[a][b] += 1
    return all(over[i][j] == 1 and over[j][i] == 1 for i, j in combinations(range(r), 2))


@dataclass(frozen=True)
class BadCharacterization:
    lp_bad: List[Partition]
    structural_bad: List[Partition]

    @property
    def coincide(self) -> bool:
        return self.lp_bad == self.structural_bad


def bad_partitions(config: RayConfiguration, k: int = 2,
                   cache: Optional[HullCache] = None) -> List[Partition]:
    return scan_shard(config, k, cache=cache).bad


def characterize_bad_532(config: RayConfiguration, cache: Optional[HullCache] = None) -> BadCharacterization:
    """LP-bad partitions (k=2) next to the purely combinatorial characterisation."""
    if (config.d, config.r) != (5, 3):
        raise ValueError("characterisation is for d=5, r=3")
    if config.moved_indices():
        raise ValueError("characterisation is for the unperturbed configuration")
    lp_bad = bad_partitions(config, 2, cache)
    structural = [Partition(labels, 3) for labels in shard_strings(config.n_points, 3, 0, 1)
                  if is_structurally_bad_532(config, Partition(labels, 3))]
    return BadCharacterization(lp_bad, structural)


def mutualrays_degeneracies(config: RayConfiguration, k: int, cache: Optional[HullCache] = None,
                            limit: Optional[int] = None) -> List[Tuple[Tuple[int, ...], ...]]:
    """Tuples that break "m < k mutual rays, one point each => empty".

    Enumerates k disjoint point sets sharing m < k rays, each set holding
    exactly one point on each shared ray, and returns those whose hulls
    still meet.  An empty result certifies the configuration generic enough.
    """
    view = _view(config, cache)
    per_ray = config.r - 1
    out = []
    if per_ray < k:
        return out
    for m in range(1, k):
        for rays in combinations(range(config.d + 1), m):
            # per ray, an ordered choice of k distinct levels
            choices = [list(permutations(range(per_ray), k)) for _ in rays]
            for pick in product(*choices):
                sets = []
                for s in range(k):
                    mask = 0
                    for ray, levels in zip(rays, pick):
                        mask |= 1 << (ray * per_ray + levels[s])
                    sets.append(mask)
                if view.meets(sets):
                    out.append(tuple(tuple(i for i in range(config.n_points) if m_ >> i & 1)
                                     for m_ in sets))
                    if limit is not None and len(out) >= limit:
                        return out
    return out


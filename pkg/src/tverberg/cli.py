"""Command-line front end.

    tverberg construct --d 3 --r 4 -o x.json
    tverberg perturb --recipe 342 x.json -o x2.json
    tverberg verify x2.json --k 2 --jobs 4 -o report.json
    tverberg search cloud.json --r 4
    tverberg weights x.json --k 2 --sample 1000
    tverberg report-merge shard0.json shard1.json -o full.json

Every file is JSON with rationals written as "p/q" strings.  Exit codes: 0
means the run found nothing against the bound being tested, 1 means a
counterexample (bad partition, inequality violation, or "none" from a
search), 2 means a usage or I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
from dataclasses import replace
from datetime import datetime, timezone
from math import comb
from typing import List, Optional

from . import __version__
from .config import (RECIPES, CalibrationError, ConfigError, RayConfiguration, apply_moves,
                     build_configuration, calibrate_epsilons, generic_configuration)
from .exact import format_rational, format_vector
from .hulls import HullCache
from .partitions import Partition, partition_count, shard_strings
from .search import PointCloud, find_k_wise_partition
from .verifier import (MergeError, VerificationReport, check_baba, check_buba, default_cache,
                       good_flags, merge_reports, ray_weight_totals, verify_lower_bound)

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2

SEED_ENV = "TVERBERG_SEED"


class UsageError(Exception):
    pass


# -- files and manifests ---------------------------------------------------------

def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _file_hash(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _emit(data, out: Optional[str]):
    text = dumps(data)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from exc


def _now(args) -> Optional[str]:
    if args.reproducible:
        return None
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_manifest(args, inputs: List[str], arguments: dict, started: Optional[str]) -> dict:
    """Who made a report: command, inputs by content hash, seed, shard, version, times.

    Only arguments that change the result are recorded, so two runs that
    differ in --jobs carry the same manifest.
    """
    return {
        "command": args.command,
        "arguments": arguments,
        "inputs": {os.path.basename(p): _file_hash(p) for p in inputs},
        "seed": getattr(args, "seed", None),
        "shard": arguments.get("shard"),
        "version": __version__,
        "started": started,
        "finished": _now(args),
    }


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _load_config(path: str) -> RayConfiguration:
    try:
        return RayConfiguration.from_json(_read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a configuration: {exc}") from exc


def _parse_shard(text: str):
    try:
        i, n = (int(x) for x in text.split("/"))
    except ValueError:
        raise UsageError(f"--shard wants i/N, got {text!r}")
    if n < 1 or not 0 <= i < n:
        raise UsageError(f"shard {i}/{n} out of range")
    return i, n


# -- subcommands -------------------------------------------------------------------

def cmd_construct(args) -> int:
    if args.d < 1 or args.r < 2:
        raise UsageError("need --d >= 1 and --r >= 2")
    seed = args.seed
    if args.generic:
        if args.heights:
            raise UsageError("--generic and --heights exclude each other")
        try:
            cfg = generic_configuration(args.d, args.r, _default_seed() if seed is None else seed)
        except ConfigError as exc:
            raise UsageError(str(exc)) from exc
    else:
        heights = _read_json(args.heights) if args.heights else None
        try:
            cfg = build_configuration(args.d, args.r, heights, seed=seed)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from exc
    _emit(cfg.to_json(), args.out)
    return EXIT_OK


def cmd_perturb(args) -> int:
    cfg = _load_config(args.config)
    try:
        moves = RECIPES[args.recipe](cfg)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    try:
        eps = calibrate_epsilons(cfg, moves, lambda c: good_flags(c, 2, default_cache()))
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COUNTEREXAMPLE
    chosen = [mv.with_magnitude(e) for mv, e in zip(moves, eps)]
    out = apply_moves(cfg, chosen)
    out = replace(out, perturbation={
        "recipe": args.recipe,
        "moves": [{"ray": mv.target.ray, "level": mv.target.level,
                   "direction": format_vector(mv.direction),
                   "magnitude": format_rational(mv.magnitude)} for mv in chosen],
    })
    _emit(out.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    if not 2 <= args.k <= cfg.r:
        raise UsageError(f"--k must lie in 2..{cfg.r}")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    shard = _parse_shard(args.shard)
    started = _now(args)
    report = verify_lower_bound(cfg, args.k, shard[0], shard[1], jobs=args.jobs,
                                max_witnesses=args.max_witnesses)
    if args.reproducible:
        report.elapsed_ms = 0
    report.manifest = run_manifest(
        args, [args.config],
        {"k": args.k, "shard": f"{shard[0]}/{shard[1]}", "max_witnesses": args.max_witnesses},
        started)
    _emit(report.to_json(), args.out)
    print(f"{report.total} partitions, {report.good} good, {report.bad} bad", file=sys.stderr)
    return EXIT_OK if report.bad == 0 else EXIT_COUNTEREXAMPLE


def _load_cloud(path: str) -> PointCloud:
    data = _read_json(path)
    try:
        if "heights" in data:
            return PointCloud.of(RayConfiguration.from_json(data).points)
        return PointCloud.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is neither a point cloud nor a configuration: {exc}") from exc


def cmd_search(args) -> int:
    cloud = _load_cloud(args.cloud)
    k = args.r if args.k is None else args.k
    if args.r < 2 or not 2 <= k <= args.r:
        raise UsageError("need --r >= 2 and 2 <= --k <= --r")
    seed = _default_seed() if args.seed is None else args.seed
    started = _now(args)
    res = find_k_wise_partition(cloud, args.r, k, seed=seed)
    data = res.to_json()
    args.seed = seed
    data["manifest"] = run_manifest(args, [args.cloud], {"r": args.r, "k": k}, started)
    _emit(data, args.out)
    return EXIT_OK if res.found else EXIT_COUNTEREXAMPLE


def _sampled(n: int, r: int, sample: Optional[int], seed: int):
    total = partition_count(n, r)
    if sample is None or sample >= total:
        yield from shard_strings(n, r, 0, 1)
        return
    keep = set(random.Random(seed).sample(range(total), sample))
    for pos, labels in enumerate(shard_strings(n, r, 0, 1)):
        if pos in keep:
            yield labels


def cmd_weights(args) -> int:
    cfg = _load_config(args.config)
    if not 2 <= args.k <= cfg.r:
        raise UsageError(f"--k must lie in 2..{cfg.r}")
    if args.sample is not None and args.sample < 0:
        raise UsageError("--sample must be nonnegative")
    seed = _default_seed() if args.seed is None else args.seed
    args.seed = seed
    started = _now(args)
    cache = HullCache()
    bound = comb(cfg.r - 1, args.k)
    checked = skipped = 0
    buba, baba = [], []
    max_totals = [0] * (cfg.d + 1)
    for labels in _sampled(cfg.n_points, cfg.r, args.sample, seed):
        p = Partition(labels, cfg.r)
        checked += 1
        res = check_buba(cfg, p, args.k, cache)
        skipped += len(res.skipped)
        buba.extend({"partition": str(p), "tuple": list(t)} for t in res.violations)
        baba.extend({"partition": str(p), "ray": ray, "total": total}
                    for ray, total in check_baba(cfg, p, args.k))
        max_totals = [max(a, b) for a, b in zip(max_totals, ray_weight_totals(cfg, p, args.k))]
    data = {
        "config_hash": cfg.config_hash(),
        "k": args.k,
        "partitions_checked": checked,
        "partitions_total": partition_count(cfg.n_points, cfg.r),
        "tuples_outside_statement": skipped,
        "buba_violations": buba,
        "baba_bound": bound,
        "baba_rays": [{"ray": i, "max_total": t, "bound": bound} for i, t in enumerate(max_totals)]
        if checked else [],
        "baba_violations": baba,
        "manifest": run_manifest(args, [args.config], {"k": args.k, "sample": args.sample}, started),
    }
    _emit(data, args.out)
    return EXIT_OK if not buba and not baba else EXIT_COUNTEREXAMPLE


def cmd_report_merge(args) -> int:
    reports = []
    for path in args.reports:
        try:
            reports.append(VerificationReport.from_json(_read_json(path)))
        except (KeyError, TypeError) as exc:
            raise UsageError(f"{path} is not a verification report: {exc}") from exc
    try:
        merged = merge_reports(reports)
    except MergeError as exc:
        raise UsageError(str(exc)) from exc
    if args.reproducible:
        merged.elapsed_ms = 0
    merged.manifest = run_manifest(args, args.reports, {"k": merged.k, "shard": "0/1"}, _now(args))
    _emit(merged.to_json(), args.out)
    return EXIT_OK if merged.bad == 0 else EXIT_COUNTEREXAMPLE


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tverberg", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        if out:
            p.add_argument("-o", "--out", help="output file (default: stdout)")
        p.add_argument("--reproducible", action="store_true",
                       help="omit timestamps and timings so reruns are byte-identical")

    p = sub.add_parser("construct", help="write a rayed configuration")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--heights", help="JSON list of per-ray height lists, highest first")
    p.add_argument("--seed", type=int)
    p.add_argument("--generic", action="store_true", help="seeded random heights")
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("perturb", help="calibrate and apply a perturbation recipe")
    p.add_argument("config")
    p.add_argument("--recipe", choices=sorted(RECIPES), required=True)
    common(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("verify", help="check every r-partition for an empty k-wise intersection")
    p.add_argument("config")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--shard", default="0/1", help="i/N: scan only shard i of N")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--max-witnesses", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="find a partition whose k-wise hulls all meet")
    p.add_argument("cloud", help="point cloud or configuration JSON")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("weights", help="check the ray-weight inequalities")
    p.add_argument("config")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sample", type=int, help="check only this many partitions, chosen by seed")
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("report-merge", help="merge shard reports of one configuration")
    p.add_argument("reports", nargs="+")
    common(p)
    p.set_defaults(func=cmd_report_merge)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

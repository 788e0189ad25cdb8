"""Command-line front end: ``exact-ising {sample,validate,bench,info}``.

Samples go to stdout, statistics to stderr. Exit codes: 0 ok, 1 failed
validation or coalescence cap, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import validation
from .cftp import DEFAULT_MAX_UPDATES, CoalescenceCapExceeded
from .sampler import SampleRecord, SamplerConfig, describe, resolve_branch, run_many, run_sampler

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

RUN_FIELDS = ["seed", "branch", "epochs", "total_updates", "wall_ns"]
BENCH_FIELDS = ["L", "N", "beta", "branch", "rep", "epochs", "total_updates", "wall_ns",
                "censored", "ratio"]


def _nonneg_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid float value: {text!r}") from None
    if not x >= 0 or math.isinf(x):
        raise argparse.ArgumentTypeError(f"must be a finite nonnegative number, got {text!r}")
    return x


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text!r}")
    return n


def _seed(text: str) -> int:
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed: {text!r}") from None
    if n < 0 or n >> 128:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**128), got {text!r}")
    return n


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"sizes must be positive integers, got {text!r}")
    return sizes


def format_grid(spins: np.ndarray, L: int) -> str:
    rows = np.asarray(spins).reshape(L, L)
    return "\n".join("".join("+" if s > 0 else "-" for s in row) for row in rows)


def parse_grid(text: str) -> list[np.ndarray]:
    """Inverse of the grid output: one flat +1/-1 array per sample."""
    blocks = [b for b in text.strip("\n").split("\n\n") if b.strip()]
    return [np.array([1 if ch == "+" else -1 for ch in b.replace("\n", "")], dtype=np.int8)
            for b in blocks]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exact-ising",
                                     description="Exact sampling of the 2D Ising model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw exact samples on the L x L lattice")
    p.add_argument("--size", type=_positive_int, required=True)
    p.add_argument("--beta", type=_nonneg_float, required=True)
    p.add_argument("--samples", type=_positive_int, default=1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--boundary", choices=["free", "plus", "minus"], default="free")
    p.add_argument("--branch", choices=["auto", "direct", "dual"], default="auto")
    p.add_argument("--format", choices=["grid", "json"], default="grid")
    p.add_argument("--cap", type=_positive_int, default=DEFAULT_MAX_UPDATES,
                   help="max single-site updates per sample")
    p.add_argument("--stats", action="store_true", help="write per-sample CSV records to stderr")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("validate", help="run the exactness checks")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    p.add_argument("--seed", type=_seed, default=20240601)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="coalescence-time sweep over lattice sizes")
    p.add_argument("--sizes", type=_sizes, required=True)
    p.add_argument("--beta", type=_nonneg_float, required=True)
    p.add_argument("--reps", type=_positive_int, default=10)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--branch", choices=["auto", "direct", "dual"], default="auto")
    p.add_argument("--cap", type=_positive_int, default=DEFAULT_MAX_UPDATES)
    p.add_argument("--allow-cap", action="store_true", help="record capped runs as censored rows")
    p.add_argument("--no-wall-time", action="store_true", help="write 0 in the wall_ns column")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("info", help="print the duality quantities for a beta")
    p.add_argument("--beta", type=_nonneg_float, required=True)
    p.set_defaults(func=cmd_info)
    return parser


def _config(parser, args, L: int) -> SamplerConfig:
    config = SamplerConfig(L, args.beta, args.seed, args.branch, args.cap,
                           boundary=getattr(args, "boundary", "free"))
    try:
        resolve_branch(config)
    except ValueError as exc:
        parser.error(f"argument --branch: {exc}")
    return config


def cmd_sample(args, parser) -> int:
    config = _config(parser, args, args.size)
    try:
        records = run_many(config, args.samples, jobs=args.jobs)
    except CoalescenceCapExceeded as exc:
        print(f"exact-ising: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "json":
        out = json.dumps([r.spins.tolist() for r in records]) + "\n"
    else:
        out = "\n\n".join(format_grid(r.spins, args.size) for r in records) + "\n"
    sys.stdout.write(out)
    if args.stats:
        w = csv.writer(sys.stderr, lineterminator="\n")
        w.writerow(RUN_FIELDS)
        for r in records:
            w.writerow([r.seed, r.branch, r.epochs_used, r.total_updates, r.wall_ns])
    return EXIT_OK


def cmd_validate(args, parser) -> int:
    results = validation.run_checks(args.level, seed=args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {r.value:>12.4g}  {r.relation} {r.threshold:<10.4g}  {status}")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"exact-ising: validation failed at {failed[0].name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def bench_rows(sizes, beta, reps, seed, branch="auto", cap=DEFAULT_MAX_UPDATES,
               allow_cap=False, wall_time=True, jobs=1):
    """Per-rep rows and one summary row per size, as dictionaries."""
    rows = []
    for L in sizes:
        N = L * L
        scale = N * math.log(N) if N > 1 else 1.0
        base = SamplerConfig(L, beta, seed, branch, cap)
        configs = [SamplerConfig(L, beta, seed + r, branch, cap) for r in range(reps)]
        recs = _run_censored(configs, jobs)
        size_rows = []
        for rep, (rec, censored) in enumerate(recs):
            size_rows.append({
                "L": L, "N": N, "beta": repr(beta), "branch": rec.branch, "rep": rep,
                "epochs": rec.epochs_used, "total_updates": rec.total_updates,
                "wall_ns": rec.wall_ns if wall_time else 0, "censored": int(censored),
                "ratio": f"{rec.total_updates / scale:.6g}",
            })
        n_censored = sum(r["censored"] for r in size_rows)
        if n_censored and not allow_cap:
            raise CoalescenceCapExceeded(size_rows[0]["total_updates"], size_rows[0]["epochs"], cap)
        mean_updates = float(np.mean([r["total_updates"] for r in size_rows]))
        rows.extend(size_rows)
        rows.append({
            "L": L, "N": N, "beta": repr(beta), "branch": resolve_branch(base), "rep": "mean",
            "epochs": f"{np.mean([r['epochs'] for r in size_rows]):.6g}",
            "total_updates": f"{mean_updates:.6g}",
            "wall_ns": int(np.mean([r["wall_ns"] for r in size_rows])),
            "censored": n_censored, "ratio": f"{mean_updates / scale:.6g}",
        })
    return rows


def _run_censored(configs, jobs):
    def one(config):
        try:
            return run_sampler(config), False
        except CoalescenceCapExceeded as exc:
            rec = SampleRecord(
                np.zeros(0, dtype=np.int8), config.seed, resolve_branch(config),
                exc.epochs_done, exc.updates_done, 0)
            return rec, True

    if jobs <= 1:
        return [one(c) for c in configs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, configs))


def cmd_bench(args, parser) -> int:
    for L in args.sizes:
        _config(parser, args, L)
    try:
        rows = bench_rows(args.sizes, args.beta, args.reps, args.seed, args.branch, args.cap,
                          args.allow_cap, not args.no_wall_time, args.jobs)
    except CoalescenceCapExceeded as exc:
        print(f"exact-ising: {exc} (use --allow-cap to record censored rows)", file=sys.stderr)
        return EXIT_FAIL
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


def cmd_info(args, parser) -> int:
    rep = describe(args.beta)
    lines = [f"beta     {rep.beta:.12g}", f"beta_c   {rep.beta_c:.12g}",
             f"branch   {rep.branch}", f"p        {rep.p:.12g}"]
    if rep.beta_dual is not None:
        lines += [f"beta*    {rep.beta_dual:.12g}", f"p*       {rep.p_dual:.12g}"]
    print("\n".join(lines))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())

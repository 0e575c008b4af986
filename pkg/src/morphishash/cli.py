"""Command-line surface: build/query/verify structures, run benchmarks.

Exit codes: 0 success, 1 usage error, 2 data error, 3 construction failure.
Key files are newline-delimited UTF-8 (exactly one trailing newline stripped
per line) or, with --binary, u32-length-prefixed records.
"""

from __future__ import annotations

import argparse
import struct
import sys

import numpy as np

from . import bench, bitio
from ._kernel import BACKEND
from .core import BaseCaseConfig, BaseCaseMphf, ConstructionFailure, construct_base
from .flat import FlatConfig, FlatMphf, build_flat, space_report
from .hashing import BIPARTITE, PLAIN, KeyHash, master_hash

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONSTRUCTION = 3


class DataError(Exception):
    pass


def read_keys(path: str, binary: bool) -> list[bytes]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}")
    if binary:
        keys = []
        off = 0
        while off < len(data):
            if off + 4 > len(data):
                raise DataError(f"truncated record header at byte {off}")
            (length,) = struct.unpack_from("<I", data, off)
            off += 4
            if off + length > len(data):
                raise DataError(f"truncated record at byte {off}")
            keys.append(data[off:off + length])
            off += length
    else:
        if data.endswith(b"\n"):
            data = data[:-1]
        keys = data.split(b"\n") if data else []
    if not keys:
        raise DataError("no keys")
    seen: dict[bytes, int] = {}
    for i, k in enumerate(keys):
        if k in seen:
            raise DataError(f"duplicate key at line {i + 1} "
                            f"(first seen at line {seen[k] + 1})")
        seen[k] = i
    return keys


def hash_keys(keys: list[bytes]) -> tuple[np.ndarray, np.ndarray]:
    hi = np.empty(len(keys), dtype=np.uint64)
    lo = np.empty(len(keys), dtype=np.uint64)
    for i, k in enumerate(keys):
        kh = master_hash(k)
        hi[i] = kh.hi
        lo[i] = kh.lo
    return hi, lo


def load_structure(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    tag, _ = bitio.unwrap_section(data)
    if tag == bitio.TAG_BASE_CASE:
        return BaseCaseMphf.from_bytes(data)
    if tag == bitio.TAG_FLAT:
        return FlatMphf.from_bytes(data)
    raise bitio.FormatError(f"no loader for section tag {tag}", 6)


def _structure_size(m) -> int:
    return m.n_keys if isinstance(m, FlatMphf) else m.n


def _query_structure(m, key: bytes) -> int:
    kh = master_hash(key)
    if isinstance(m, FlatMphf):
        return m.query(kh)
    return m.query(kh)


def cmd_build(args) -> int:
    keys = read_keys(args.input, args.binary)
    hi, lo = hash_keys(keys)
    if args.flat:
        cfg = FlatConfig(base_n=args.base_n,
                         b_delta=(args.base_n - args.b if args.b is not None
                                  else 2),
                         bucket_load=args.bucket_load,
                         max_layers=args.layers)
        m = build_flat((hi, lo), cfg, threads=args.threads)
        rep = space_report(m)
        for name, bits in rep.breakdown().items():
            print(f"{name:>11}: {bits:8.4f} bits/key")
        print(f"{'layers':>11}: {len(m.layers)}  fallback keys: "
              f"{len(m.fallback)}")
    else:
        n = len(keys)
        b = args.b if args.b is not None else max(n - 2, 0)
        variant = BIPARTITE if args.variant == "bipartite" else PLAIN
        key_hashes = [KeyHash(int(hi[i]), int(lo[i])) for i in range(n)]
        m, stats = construct_base(key_hashes,
                                  BaseCaseConfig(n=n, b=b, variant=variant))
        blob = m.to_bytes()
        print(f"seed(s): {m.seeds}  x: {b} bits  "
              f"tried {stats.seeds_consumed} seeds  "
              f"file: {len(blob)} bytes ({8 * len(blob) / n:.2f} bits/key)")
    with open(args.output, "wb") as fh:
        fh.write(m.to_bytes())
    return EXIT_OK


def cmd_query(args) -> int:
    m = load_structure(args.structure)
    key = args.key.encode("utf-8")
    print(_query_structure(m, key))
    return EXIT_OK


def cmd_verify(args) -> int:
    m = load_structure(args.structure)
    keys = read_keys(args.keys, args.binary)
    n = _structure_size(m)
    if len(keys) != n:
        print(f"verify: key count {len(keys)} != structure size {n}",
              file=sys.stderr)
        return EXIT_DATA
    hi, lo = hash_keys(keys)
    if isinstance(m, FlatMphf):
        positions = m.query_batch(hi, lo)
        marks = np.zeros(n, dtype=bool)
        pos = positions.astype(np.int64)
        if pos.min(initial=0) < 0 or pos.max(initial=0) >= n:
            print("verify: FAILED (position out of range)", file=sys.stderr)
            return EXIT_DATA
        marks[pos] = True
        ok = bool(marks.all()) and len(np.unique(pos)) == n
    else:
        marks = [False] * n
        ok = True
        for i in range(n):
            p = m.query(KeyHash(int(hi[i]), int(lo[i])))
            if p < 0 or p >= n or marks[p]:
                ok = False
                break
            marks[p] = True
        ok = ok and all(marks)
    if ok:
        print(f"verify: OK ({n} keys, bijection onto [0, {n}))")
        return EXIT_OK
    print("verify: FAILED (not a bijection)", file=sys.stderr)
    return EXIT_DATA


def cmd_bench(args) -> int:
    seed_given = args.rng_seed is not None
    master = args.rng_seed if seed_given else int.from_bytes(__import__("os").urandom(8), "little")
    measure = not seed_given  # wall_ms must be deterministic under --rng-seed
    threads = args.threads
    if args.bench_command == "seeds":
        ns = _parse_range(args.n)
        offsets = [int(x) for x in args.b_offsets.split(",")] if args.b_offsets else []
        if args.variant == "bip-shockhash":
            results = [bench.run_series(bench.BIP_SHOCK, n, n, args.trials,
                                        master, threads, measure_time=measure)
                       for n in ns]
        else:
            results = bench.bench_seed_counts(ns, offsets, args.trials, master,
                                              threads, measure_time=measure)
    elif args.bench_command == "components":
        results = bench.bench_components(_parse_range(args.n), args.samples,
                                         master, threads, measure_time=measure)
    elif args.bench_command == "overhead":
        variant = bench.BIP_SHOCK if args.variant == "bip-shockhash" else bench.BIP_MORPHIS
        results = [bench.bench_overhead(n, args.b if args.b is not None else n,
                                        args.trials, variant, master, threads,
                                        measure_time=measure)
                   for n in _parse_range(args.n)]
    elif args.bench_command == "tradeoff":
        results = bench.bench_tradeoff(args.n_fixed, range(0, args.max_offset + 1),
                                       args.trials, master, threads,
                                       measure_time=measure)
    elif args.bench_command == "backends":
        report = bench.bench_backends(args.n_fixed, args.b if args.b is not None
                                      else max(args.n_fixed - 2, 0), args.trials,
                                      master)
        for k, v in report.items():
            print(f"{k}: {v}")
        return EXIT_OK
    else:
        raise DataError(f"unknown bench subcommand {args.bench_command}")
    csv = bench.results_to_csv(results)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(csv)
        print(f"wrote {args.csv} ({len(results)} rows, backend={BACKEND})",
              file=sys.stderr)
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def _parse_range(spec: str) -> list[int]:
    """'10', '10,20,30' or '2..50' (inclusive, step 2 when '..' used with
    an even span, else 1); bench grids are all small."""
    if ".." in spec:
        lo_s, hi_s = spec.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        step = 2 if (lo % 2 == 0 and hi % 2 == 0) else 1
        return list(range(lo, hi + 1, step))
    return [int(x) for x in spec.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="morphishash",
        description="Minimal perfect hashing: pseudoforest seed search with "
                    "a folded retrieval structure.")
    ap.add_argument("--version", action="version", version="morphishash 0.1.0")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a structure from a key file")
    b.add_argument("input")
    b.add_argument("output")
    b.add_argument("--binary", action="store_true",
                   help="u32-length-prefixed records instead of text lines")
    b.add_argument("--variant", choices=["plain", "bipartite"], default="plain")
    b.add_argument("--b", type=int, default=None,
                   help="retrieval bits (default n-2); with --flat, per-bucket "
                        "bits at full buckets (delta = base_n - b)")
    b.add_argument("--flat", action="store_true",
                   help="bucketed structure for large key sets")
    b.add_argument("--base-n", type=int, default=32, dest="base_n")
    b.add_argument("--bucket-load", type=float, default=1.1, dest="bucket_load")
    b.add_argument("--layers", type=int, default=4)
    b.add_argument("--threads", type=int, default=1)

    q = sub.add_parser("query", help="print the position of one key")
    q.add_argument("structure")
    q.add_argument("key")

    v = sub.add_parser("verify", help="check the structure is a bijection "
                                      "over a key file")
    v.add_argument("structure")
    v.add_argument("keys")
    v.add_argument("--binary", action="store_true")

    be = sub.add_parser("bench", help="benchmark drivers (CSV output)")
    bsub = be.add_subparsers(dest="bench_command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rng-seed", type=int, default=None, dest="rng_seed")
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--csv", default=None)
    common.add_argument("--threads", type=int, default=1)

    s = bsub.add_parser("seeds", parents=[common],
                        help="avg successful seed curves")
    s.add_argument("--n", default="10..20")
    s.add_argument("--b-offsets", default="3,6", dest="b_offsets",
                   help="comma list; series at b = n - offset")
    s.add_argument("--variant", choices=["bip-morphishash", "bip-shockhash",
                                         "all"], default="all")

    c = bsub.add_parser("components", parents=[common],
                        help="avg components of accepted pseudoforests")
    c.add_argument("--n", default="2..50")
    c.add_argument("--samples", type=int, default=5000)

    o = bsub.add_parser("overhead", parents=[common],
                        help="idealized space overhead")
    o.add_argument("--n", default="50")
    o.add_argument("--b", type=int, default=None)
    o.add_argument("--variant", choices=["bip-morphishash", "bip-shockhash"],
                   default="bip-morphishash")

    t = bsub.add_parser("tradeoff", parents=[common],
                        help="b sweep at fixed n")
    t.add_argument("--n", type=int, default=50, dest="n_fixed")
    t.add_argument("--max-offset", type=int, default=6, dest="max_offset")

    k = bsub.add_parser("backends", parents=[common],
                        help="compare compiled vs pure kernels")
    k.add_argument("--n", type=int, default=24, dest="n_fixed")
    k.add_argument("--b", type=int, default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        if args.command == "build":
            return cmd_build(args)
        if args.command == "query":
            return cmd_query(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "bench":
            return cmd_bench(args)
        raise DataError(f"unknown command {args.command}")
    except (DataError, bitio.FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ConstructionFailure as e:
        print(f"construction failed: {e}\nstats: {e.stats}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

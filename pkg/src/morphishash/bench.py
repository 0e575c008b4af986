"""Monte-Carlo benchmark drivers: seed-count curves, component counts,
idealized space overhead, and the time/space trade-off sweep; CSV output.

Key sets are derived from a master seed through numpy SeedSequence streams,
so every run with the same seed produces byte-identical CSVs. Trials can
run on a thread pool (the compiled kernels release the GIL); aggregation
stays in trial order, so threading does not affect the output.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernel

CSV_HEADER = ("variant,n,b,trials,avg_seed,avg_pairs,avg_components,"
              "overhead_bits,stderr_seed,wall_ms")

BIP_MORPHIS = "bip-morphishash"
BIP_SHOCK = "bip-shockhash"
PLAIN_MORPHIS = "plain-morphishash"
PLAIN_SHOCK = "plain-shockhash"
COMPONENTS = "components"

_SERIES_ID = {BIP_MORPHIS: 1, BIP_SHOCK: 2, PLAIN_MORPHIS: 3, PLAIN_SHOCK: 4,
              COMPONENTS: 5}


@dataclass
class BenchResult:
    variant: str
    n: int
    b: int
    trials: int
    avg_seed: float
    avg_pairs: float
    avg_components: float
    overhead_bits: float
    stderr_seed: float
    wall_ms: int
    failures: int = 0

    def csv_row(self) -> str:
        return ",".join([
            self.variant, str(self.n), str(self.b), str(self.trials),
            _fmt(self.avg_seed), _fmt(self.avg_pairs),
            _fmt(self.avg_components), _fmt(self.overhead_bits),
            _fmt(self.stderr_seed), str(self.wall_ms),
        ])


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def results_to_csv(results) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in results]) + "\n"


def log2_mphf_bound(n: int) -> float:
    """log2(n^n / n!), the information content of one n-key instance."""
    return (n * math.log(n) - math.lgamma(n + 1)) / math.log(2)


def _trial_keys(master_seed: int, series: str, n: int, b: int, trials: int):
    """Deterministic per-trial key arrays for one benchmark configuration."""
    rng = np.random.default_rng([master_seed, _SERIES_ID[series], n, b])
    hi = rng.integers(0, 2 ** 64, size=(trials, n), dtype=np.uint64)
    lo = rng.integers(0, 2 ** 64, size=(trials, n), dtype=np.uint64)
    return hi, lo


def _run_trials(fn, hi, lo, trials: int, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, hi[:trials], lo[:trials]))
    return [fn(hi[t], lo[t]) for t in range(trials)]


def _pairs_examined(variant: str, consumed: int) -> int:
    # unordered raw seed pairs scanned by the expanding bipartite
    # enumeration; for the plain search the seed counter itself
    if variant.startswith("bip"):
        return consumed * (consumed + 1) // 2
    return consumed


def _aggregate(variant: str, n: int, b: int, outcomes, wall_ms: int,
               retrieval_bits: int) -> BenchResult:
    seeds = [s for s, _ in outcomes if s is not None]
    comps = [c for _, c in outcomes if c is not None]
    failures = sum(1 for s, _ in outcomes if s is None)
    trials = len(seeds)
    avg_seed = sum(seeds) / trials
    pairs = [_pairs_examined(variant, s) for s in seeds]
    avg_pairs = sum(pairs) / trials
    var = (sum((s - avg_seed) ** 2 for s in seeds) / (trials - 1)
           if trials > 1 else 0.0)
    stderr = math.sqrt(var / trials) if trials else 0.0
    overhead = (math.log2(avg_pairs) + retrieval_bits - log2_mphf_bound(n)
                if avg_pairs > 0 else 0.0)
    avg_comps = sum(comps) / len(comps) if comps else 0.0
    return BenchResult(variant, n, b, trials, avg_seed, avg_pairs, avg_comps,
                       overhead, stderr, wall_ms, failures)


def _series_trial(variant: str, n: int, b: int, max_seeds: int):
    """Returns a callable(hi, lo) -> (seeds_consumed | None, components | None)."""
    def run(hi, lo):
        if variant == BIP_MORPHIS:
            found, _, _, _, st = _kernel.bip_construct(hi, lo, n, b, max_seeds)
        elif variant == BIP_SHOCK:
            found, _, _, st = _kernel.bip_shockhash(hi, lo, n, max_seeds)
        elif variant == PLAIN_MORPHIS:
            found, _, _, st = _kernel.plain_construct(hi, lo, n, b, max_seeds)
        elif variant == PLAIN_SHOCK:
            found, _, st = _kernel.plain_shockhash(hi, lo, n, max_seeds)
        elif variant == COMPONENTS:
            found, comps, st = _kernel.bip_first_pseudoforest(hi, lo, n, max_seeds)
            return (st[0], comps) if found else (None, None)
        else:
            raise ValueError(variant)
        return (st[0], None) if found else (None, None)
    return run


def run_series(variant: str, n: int, b: int, trials: int, master_seed: int,
               threads: int = 1, max_seeds: int = 1 << 24,
               measure_time: bool = True) -> BenchResult:
    """One benchmark configuration: `trials` fresh key sets."""
    hi, lo = _trial_keys(master_seed, variant, n, b, trials)
    fn = _series_trial(variant, n, b, max_seeds)
    t0 = time.perf_counter()
    outcomes = _run_trials(fn, hi, lo, trials, threads)
    wall = int((time.perf_counter() - t0) * 1000) if measure_time else 0
    retrieval = b if variant in (BIP_MORPHIS, PLAIN_MORPHIS) else n
    return _aggregate(variant, n, b, outcomes, wall, retrieval)


def bench_seed_counts(n_values, b_offsets, trials, master_seed: int = 0,
                      threads: int = 1, measure_time: bool = True,
                      include_baseline: bool = True) -> list[BenchResult]:
    """Avg successful seed per (n, b), plus the first-pseudoforest baseline."""
    out = []
    for n in n_values:
        if include_baseline:
            out.append(run_series(BIP_SHOCK, n, n, trials, master_seed,
                                  threads, measure_time=measure_time))
        for off in b_offsets:
            b = max(n - off, 0)
            out.append(run_series(BIP_MORPHIS, n, b, trials, master_seed,
                                  threads, measure_time=measure_time))
    return out


def bench_components(n_values, samples, master_seed: int = 0,
                     threads: int = 1, measure_time: bool = True
                     ) -> list[BenchResult]:
    """Average component count over accepted bipartite pseudoforests."""
    return [run_series(COMPONENTS, n, 0, samples, master_seed, threads,
                       measure_time=measure_time) for n in n_values]


def bench_overhead(n: int, b: int, trials, variant: str = BIP_MORPHIS,
                   master_seed: int = 0, threads: int = 1,
                   measure_time: bool = True) -> BenchResult:
    """Idealized overhead: log2(E[pairs examined]) + retrieval bits - bound."""
    return run_series(variant, n, b, trials, master_seed, threads,
                      measure_time=measure_time)


def bench_tradeoff(n: int = 50, offsets=range(0, 7), trials: int = 200,
                   master_seed: int = 0, threads: int = 1,
                   measure_time: bool = True) -> list[BenchResult]:
    """b sweep at fixed n with common random key sets across the sweep,
    plus the first-pseudoforest reference point."""
    hi, lo = _trial_keys(master_seed, BIP_MORPHIS, n, 0, trials)
    out = []
    for off in sorted(offsets, reverse=True):
        b = n - off
        fn = _series_trial(BIP_MORPHIS, n, b, 1 << 24)
        t0 = time.perf_counter()
        outcomes = _run_trials(fn, hi, lo, trials, threads)
        wall = int((time.perf_counter() - t0) * 1000) if measure_time else 0
        out.append(_aggregate(BIP_MORPHIS, n, b, outcomes, wall, b))
    fn = _series_trial(BIP_SHOCK, n, n, 1 << 24)
    t0 = time.perf_counter()
    outcomes = _run_trials(fn, hi, lo, trials, threads)
    wall = int((time.perf_counter() - t0) * 1000) if measure_time else 0
    out.append(_aggregate(BIP_SHOCK, n, n, outcomes, wall, n))
    return out


def bench_backends(n: int = 24, b: int = 20, trials: int = 20,
                   master_seed: int = 0) -> dict:
    """Compare the compiled and pure kernels on identical inputs.

    Returns per-backend wall times plus an exact-equality verdict over
    results and counters; the pure backend runs fewer trials when slow.
    """
    from ._kernel import get_backend

    hi, lo = _trial_keys(master_seed, BIP_MORPHIS, n, b, trials)
    report: dict = {"n": n, "b": b, "trials": trials}
    outputs = {}
    for name in ("native", "pure"):
        try:
            backend = get_backend(name)
        except ImportError:
            report[name] = None
            continue
        t0 = time.perf_counter()
        res = [backend.bip_construct(hi[t], lo[t], n, b, 1 << 24)
               for t in range(trials)]
        wall = time.perf_counter() - t0
        outputs[name] = res
        report[name] = {"wall_s": wall, "trials_per_s": trials / wall if wall else 0.0}
    if "native" in outputs and "pure" in outputs:
        report["identical"] = outputs["native"] == outputs["pure"]
        if report["native"] and report["pure"]:
            report["speedup"] = (report["pure"]["wall_s"] /
                                 report["native"]["wall_s"])
    return report

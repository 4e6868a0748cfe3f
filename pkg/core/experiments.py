"""
Monte Carlo experiments over the samplers

Trials are cut into blocks of TRIAL_BLOCK_SIZE; block i draws from
substream i of the run seed, so the aggregated table is the same whatever
the number of worker processes.
"""

import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from tqdm import tqdm

from core.analytic import as_theta, default_t_max, prime_window
from core.errors import PreconditionError
from core.ht_odd import check_prime_cycles, prime_cycle_count
from core.samplers import (
    RandomStream,
    sample_odd_order_perm,
    sample_odd_partition_bounded_ones,
    sample_subspace,
    sample_subspace_any_rank,
)
from core.signed_perm import CycleType
from core.subspaces import Subspace2, has_even_element, verdict_diagonal
from core.utils import atomic_write
from core.verdict import Status

CSV_COLUMNS = ["n", "theta_num", "theta_den", "trials", "seed", "stat", "value", "stderr"]

ODD_PERM_STATS = ("P_n", "C_1", "pass_rate", "num_cycles")
SUBSPACE_STATS = ("rank", "even", "not_excluded")
PARTITION_STATS = ("R_n", "C_1", "pass_rate")

Moments = Dict[str, Tuple[float, float]]


def _odd_perm_stats(ct: CycleType, n: int, log_base: str) -> Dict[str, float]:
    return {
        "P_n": prime_cycle_count(ct, n, log_base),
        "C_1": ct.count(1),
        "pass_rate": float(check_prime_cycles(ct, n, log_base).passed),
        "num_cycles": ct.num_cycles,
    }


def _subspace_stats(H: Subspace2) -> Dict[str, float]:
    return {
        "rank": H.rank,
        "even": float(has_even_element(H)),
        "not_excluded": float(verdict_diagonal(H).status != Status.NOT_REALIZABLE),
    }


def _partition_stats(parts: CycleType, window: Sequence[int]) -> Dict[str, float]:
    present = set(parts.parts)
    r_n = sum(1 for p in window if p in present)
    c1 = parts.count(1)
    return {"R_n": r_n, "C_1": c1, "pass_rate": float(r_n <= max(2, 3 * c1))}


def _run_block(kind: str, params: Dict[str, Any], seed: int, index: int, size: int,
               stats: Tuple[str, ...]) -> Moments:
    """Sum and sum of squares of each statistic over one block of trials"""
    stream = RandomStream(seed).spawn(index)
    moments = {s: [0.0, 0.0] for s in stats}
    n = params["n"]
    window = prime_window(n, params["a"], params["b"]) if kind == "partition" else ()
    for _ in range(size):
        if kind == "odd_perm":
            ct = sample_odd_order_perm(n, params["theta"], stream, params["exact_cutoff"])
            values = _odd_perm_stats(ct, n, params["log_base"])
        elif kind == "subspace":
            k = params["k"]
            H = sample_subspace(n, k, stream) if k is not None else sample_subspace_any_rank(n, stream)
            values = _subspace_stats(H)
        else:
            parts = sample_odd_partition_bounded_ones(n, params["t_max"], stream, params["table_cutoff"])
            values = _partition_stats(parts, window)
        for s in stats:
            moments[s][0] += values[s]
            moments[s][1] += values[s] * values[s]
    return {s: (m[0], m[1]) for s, m in moments.items()}


def _run_block_star(args) -> Moments:
    return _run_block(*args)


class ExperimentEngine:
    """Seeded, block-parallel Monte Carlo runs with a fixed CSV layout"""

    def __init__(self, settings, show_progress: bool = False):
        """
        Args:
            settings: Settings instance (cutoffs, block size, jobs, log base)
            show_progress: Draw a tqdm bar on stderr
        """
        self.settings = settings
        self.show_progress = show_progress
        self.logger = logging.getLogger('Nielsen.Experiments')
        settings.validate_for_experiments()

    def run_odd_perm(self, n: int, theta, trials: int, seed: int,
                     stats: Iterable[str] = ODD_PERM_STATS, jobs: Optional[int] = None) -> pd.DataFrame:
        """Statistics of P_{n,theta}-distributed odd-order permutations"""
        theta = as_theta(theta)
        params = {"n": n, "theta": theta, "exact_cutoff": self.settings.EXACT_CUTOFF,
                  "log_base": self.settings.LOG_BASE}
        return self._run("odd_perm", params, theta, trials, seed, self._stats(stats, ODD_PERM_STATS), jobs)

    def run_subspace(self, n: int, k: Optional[int], trials: int, seed: int,
                     stats: Iterable[str] = SUBSPACE_STATS, jobs: Optional[int] = None) -> pd.DataFrame:
        """Statistics of uniform subspaces of F2^n, rank k or uniform over all ranks"""
        if k is not None and not 0 <= k <= n:
            raise PreconditionError(f"Need 0 <= k <= n, got n={n}, k={k}")
        params = {"n": n, "k": k}
        return self._run("subspace", params, None, trials, seed, self._stats(stats, SUBSPACE_STATS), jobs)

    def run_partition(self, n: int, t_max: Optional[int], trials: int, seed: int,
                      stats: Iterable[str] = PARTITION_STATS, a: float = 0.5, b: float = 2.0,
                      jobs: Optional[int] = None) -> pd.DataFrame:
        """Statistics of uniform odd partitions of n with at most t_max ones"""
        t_max = default_t_max(n) if t_max is None else t_max
        params = {"n": n, "t_max": t_max, "a": a, "b": b,
                  "table_cutoff": self.settings.PARTITION_TABLE_CUTOFF}
        return self._run("partition", params, None, trials, seed, self._stats(stats, PARTITION_STATS), jobs)

    def save(self, df: pd.DataFrame, output: str, fmt: str = "csv") -> str:
        """Write the result atomically; bare names land in REPORTS_DIR"""
        path = self.settings.resolve_output(output)
        atomic_write(path, self.render(df, fmt))
        self.logger.info(f"Experiment results saved: {path}")
        return str(path)

    @staticmethod
    def render(df: pd.DataFrame, fmt: str = "csv") -> str:
        if fmt == "json":
            return df.to_json(orient="records", indent=2) + "\n"
        return df.to_csv(index=False, float_format="%.12g", lineterminator="\n")

    def _stats(self, stats: Iterable[str], known: Tuple[str, ...]) -> Tuple[str, ...]:
        stats = tuple(stats)
        unknown = [s for s in stats if s not in known]
        if unknown or not stats:
            raise PreconditionError(f"Unknown statistics {unknown}; choose from {', '.join(known)}")
        return stats

    def _blocks(self, trials: int) -> List[Tuple[int, int]]:
        size = self.settings.TRIAL_BLOCK_SIZE
        return [(i, min(size, trials - start)) for i, start in enumerate(range(0, trials, size))]

    def _run(self, kind: str, params: Dict[str, Any], theta: Optional[Fraction], trials: int,
             seed: int, stats: Tuple[str, ...], jobs: Optional[int]) -> pd.DataFrame:
        if trials < 1:
            raise PreconditionError(f"trials must be >= 1, got {trials}")
        RandomStream(seed)  # rejects seeds outside 64 bits before any worker starts
        jobs = jobs or self.settings.JOBS
        blocks = self._blocks(trials)
        self.logger.info(f"Running {kind} experiment: n={params['n']}, trials={trials}, "
                         f"blocks={len(blocks)}, jobs={jobs}, seed={seed}")

        tasks = [(kind, params, seed, index, size, stats) for index, size in blocks]
        progress: Callable = lambda it: tqdm(it, total=len(tasks), desc=kind, file=sys.stderr,
                                             disable=not self.show_progress)
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                results = list(progress(executor.map(_run_block_star, tasks)))
        else:
            results = [_run_block_star(task) for task in progress(tasks)]

        return self._aggregate(params["n"], theta, trials, seed, stats, results)

    def _aggregate(self, n: int, theta: Optional[Fraction], trials: int, seed: int,
                   stats: Tuple[str, ...], results: List[Moments]) -> pd.DataFrame:
        rows = []
        for s in stats:
            total = sum(r[s][0] for r in results)
            squares = sum(r[s][1] for r in results)
            mean = total / trials
            variance = (squares - trials * mean * mean) / (trials - 1) if trials > 1 else 0.0
            stderr = math.sqrt(max(variance, 0.0) / trials)
            rows.append({
                "n": n,
                "theta_num": theta.numerator if theta is not None else None,
                "theta_den": theta.denominator if theta is not None else None,
                "trials": trials,
                "seed": seed,
                "stat": s,
                "value": mean,
                "stderr": stderr,
            })
            self.logger.debug(f"{s}: mean={mean:.6g} stderr={stderr:.3g}")
        df = pd.DataFrame(rows, columns=CSV_COLUMNS)
        return df.astype({"theta_num": "Int64", "theta_den": "Int64"})

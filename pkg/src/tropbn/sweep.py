"""Sweeps of the independence construction over many tableaux.

An exhaustive sweep partitions all tableaux by placement prefix; a sampled
sweep draws tableau i from ``Random(f"{seed}:{i}")``. Either way the result
does not depend on the number of jobs.
"""
import random
import time
import typing as ty
import logging

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction

from .config import config, field
from .errors import ConstructionError, ParameterError, TropBNError
from .graph import DEFAULT_SEPARATION, make_chain
from .independence import build_independence
from .tableaux import (
    Tableau, Word,
    brill_noether_number, count_tableaux, enumerate_tableaux,
    is_lattice_path_valid, multiplicities_and_weights, partition_prefixes,
    random_tableau, vertex_avoiding_divisor,
)
from .utils import progress

logger = logging.getLogger(__name__)

ROWS, COLS = 3, 7
SUPPORTED_GENERA = (21, 22, 23)

@config(variant="exhaustive")
class SweepConfig:
    genus: int = 21
    separation: Fraction = DEFAULT_SEPARATION
    lingering_seed: int = 0
    jobs: int = field(default=1, env="TROPBN_JOBS")
    # Length of the placement prefixes handed to each task
    prefix_depth: int = 5

@config(variant="sample")
class SampleSweepConfig(SweepConfig):
    count: int = 1000
    seed: int = 0

@dataclass
class SweepReport:
    total: int
    verified: int
    failures: list[str]
    wall_time: float
    seed: int

    def to_dict(self) -> dict[str, ty.Any]:
        return {
            "total": self.total,
            "verified": self.verified,
            "failures": list(self.failures),
            "wall_time": round(self.wall_time, 3),
            "seed": self.seed,
        }

def check_tableau(t: Tableau, separation: Fraction, lingering_seed: int) -> str | None:
    """Runs the construction on one tableau. Returns its key on failure."""
    try:
        chain = make_chain(t.g, separation)
        data = vertex_avoiding_divisor(t, chain, lingering_seed)
        total = multiplicities_and_weights(data.slope_table, t.g, t.r, t.d).total
        if total != brill_noether_number(t.g, t.r, t.d):
            raise ConstructionError(f"multiplicities sum to {total}")
        if not is_lattice_path_valid(data.slope_table):
            raise ConstructionError("slope table is not a lattice path")
        build_independence(data)
    except TropBNError as e:
        logger.debug(f"Tableau {t.key()} failed: {e}")
        return t.key()
    return None

def _exhaustive_task(genus: int, separation: Fraction, lingering_seed: int,
                     prefix: Word) -> tuple[int, list[str]]:
    count, failures = 0, []
    for t in enumerate_tableaux(ROWS, COLS, genus, prefix=prefix):
        count += 1
        key = check_tableau(t, separation, lingering_seed)
        if key is not None:
            failures.append(key)
    return count, failures

def _sample_task(genus: int, separation: Fraction, lingering_seed: int,
                 seed: int, start: int, stop: int) -> tuple[int, list[str]]:
    failures = []
    for i in range(start, stop):
        t = random_tableau(ROWS, COLS, genus, random.Random(f"{seed}:{i}"))
        key = check_tableau(t, separation, lingering_seed)
        if key is not None:
            failures.append(key)
    return stop - start, failures

def _tasks(cfg: SweepConfig) -> list[tuple[ty.Callable[..., tuple[int, list[str]]], tuple]]:
    base = (cfg.genus, cfg.separation, cfg.lingering_seed)
    if isinstance(cfg, SampleSweepConfig):
        chunk = max(1, min(1000, cfg.count // (8 * max(cfg.jobs, 1))))
        return [(_sample_task, base + (cfg.seed, start, min(start + chunk, cfg.count)))
                for start in range(0, cfg.count, chunk)]
    prefixes = partition_prefixes(ROWS, COLS, cfg.genus, cfg.prefix_depth)
    return [(_exhaustive_task, base + (prefix,)) for prefix in prefixes]

def run_sweep(cfg: SweepConfig, quiet: bool = False) -> SweepReport:
    if cfg.genus not in SUPPORTED_GENERA:
        raise ParameterError(f"Sweeps support genus {SUPPORTED_GENERA}, got {cfg.genus}")
    if cfg.jobs < 1:
        raise ParameterError(f"jobs must be positive, got {cfg.jobs}")
    sample = isinstance(cfg, SampleSweepConfig)
    if sample and cfg.count < 0:
        raise ParameterError(f"Sample count must be nonnegative, got {cfg.count}")
    expected = cfg.count if sample else count_tableaux(ROWS, COLS, cfg.genus)
    seed = cfg.seed if sample else cfg.lingering_seed
    logger.info(f"Sweeping {expected} tableaux of genus {cfg.genus} on {cfg.jobs} job(s)")

    start = time.perf_counter()
    tasks = _tasks(cfg)
    total, failures = 0, []
    with progress(expected, f"genus {cfg.genus}", quiet=quiet) as advance:
        if cfg.jobs == 1:
            for fn, args in tasks:
                count, failed = fn(*args)
                total += count
                failures.extend(failed)
                advance(count)
        else:
            with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                futures = [pool.submit(fn, *args) for fn, args in tasks]
                for future in as_completed(futures):
                    count, failed = future.result()
                    total += count
                    failures.extend(failed)
                    advance(count)
    failures.sort()
    report = SweepReport(total, total - len(failures), failures,
                         time.perf_counter() - start, seed)
    logger.info(f"Verified {report.verified}/{report.total} in {report.wall_time:.1f}s")
    return report

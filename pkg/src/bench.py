"""
Benchmark harness for the six protocol algorithms.

For each group size a fresh group is built and enrolled, then Setup, Join,
Sign, Verify, Link and Trace are timed over a fixed number of iterations
(one untimed warm-up call per algorithm first). Pairings and
exponentiations are counted once per algorithm through the instrumented
backend; the counts do not depend on timing.

Join is reported twice: per member (constant in group size) and as the
cumulative enrollment of the whole group (linear in group size).

Absolute timings are hardware-bound; what carries across machines is the
shape: every per-operation time is flat in group size.
"""

import csv
import json
import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from .groups import OperationCounts, ScalarSource, SeededScalarSource, count_operations
from .lgs import join_ra_issue, join_user_finish, join_user_start, link, setup, sign, trace, verify
from .registry import RegistrationList

logger = logging.getLogger(__name__)

ALGORITHMS = ('setup', 'join', 'join_group', 'sign', 'verify', 'link', 'trace')
DEFAULT_SIZES = tuple(range(3, 11))
DEFAULT_ITERS = 20

CSV_COLUMNS = ['algorithm', 'group_size', 'iter', 'micros', 'stddev_micros', 'pairings', 'exps', 'clock']
MEAN_ITER = 'mean'

CLOCK_CPU = 'single-thread'
CLOCK_WALL = 'wall-clock'


@dataclass
class BenchConfig:
    sizes: Sequence[int] = DEFAULT_SIZES
    iters: int = DEFAULT_ITERS
    warmup: int = 1
    parallel: bool = False
    seed: Optional[bytes] = None


@dataclass
class BenchSample:
    algorithm: str
    group_size: int
    iter: int
    micros: float


@dataclass
class BenchRow:
    algorithm: str
    group_size: int
    mean_micros: float
    stddev_micros: float
    pairing_count: int
    exp_count: int
    iterations: int


@dataclass
class BenchReport:
    """Per-(algorithm, group size) means plus the raw samples behind them."""
    rows: List[BenchRow] = field(default_factory=list)
    samples: List[BenchSample] = field(default_factory=list)
    clock: str = CLOCK_CPU

    def row(self, algorithm: str, group_size: int) -> Optional[BenchRow]:
        for r in self.rows:
            if r.algorithm == algorithm and r.group_size == group_size:
                return r
        return None

    def to_dict(self) -> Dict:
        return asdict(self)

    def to_json(self, filepath: Union[str, Path]) -> None:
        with open(filepath, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2)

    def to_csv(self, filepath: Union[str, Path]) -> None:
        """Samples first, then one mean row per (algorithm, group size)."""
        with open(filepath, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f)
            writer.writerow(CSV_COLUMNS)
            for s in self.samples:
                writer.writerow([s.algorithm, s.group_size, s.iter, repr(s.micros), '', '', '', self.clock])
            for r in self.rows:
                writer.writerow([
                    r.algorithm, r.group_size, MEAN_ITER, repr(r.mean_micros),
                    repr(r.stddev_micros), r.pairing_count, r.exp_count, self.clock,
                ])

    @classmethod
    def from_csv(cls, filepath: Union[str, Path]) -> 'BenchReport':
        report = cls()
        counts: Dict[Tuple[str, int], int] = {}
        with open(filepath, newline='', encoding='utf-8') as f:
            for record in csv.DictReader(f):
                report.clock = record['clock']
                algorithm = record['algorithm']
                size = int(record['group_size'])
                if record['iter'] == MEAN_ITER:
                    report.rows.append(BenchRow(
                        algorithm=algorithm,
                        group_size=size,
                        mean_micros=float(record['micros']),
                        stddev_micros=float(record['stddev_micros']),
                        pairing_count=int(record['pairings']),
                        exp_count=int(record['exps']),
                        iterations=0,
                    ))
                else:
                    report.samples.append(BenchSample(algorithm, size, int(record['iter']), float(record['micros'])))
                    counts[(algorithm, size)] = counts.get((algorithm, size), 0) + 1
        for r in report.rows:
            r.iterations = counts.get((r.algorithm, r.group_size), 0)
        return report


def _timed(fn: Callable[[], object]) -> Tuple[float, object]:
    start = time.perf_counter_ns()
    result = fn()
    return (time.perf_counter_ns() - start) / 1000.0, result


def _counted(fn: Callable[[], object]) -> OperationCounts:
    with count_operations() as counts:
        fn()
    return counts


def _enroll(gpk, ra, registry: RegistrationList, rng: ScalarSource):
    y, request = join_user_start(gpk, rng)
    cert = join_ra_issue(gpk, ra, request, registry, rng)
    return join_user_finish(gpk, y, cert)


def _bench_size(size: int, iters: int, warmup: int, seed: Optional[bytes]) -> Tuple[List[BenchSample], List[BenchRow]]:
    rng = SeededScalarSource(seed + size.to_bytes(2, 'big')) if seed else None
    samples: List[BenchSample] = []
    ops: Dict[str, OperationCounts] = {}

    def record(algorithm: str, it: int, micros: float) -> None:
        samples.append(BenchSample(algorithm, size, it, micros))

    # setup
    for _ in range(warmup):
        setup(rng=rng)
    ops['setup'] = _counted(lambda: setup(rng=rng))
    for it in range(iters):
        micros, (gpk, ra, sa) = _timed(lambda: setup(rng=rng))
        record('setup', it, micros)

    # join: whole-group enrollment per iteration, per-member times inside it
    registry = RegistrationList()
    members = []
    for _ in range(warmup):
        _enroll(gpk, ra, RegistrationList(), rng)
    ops['join'] = _counted(lambda: _enroll(gpk, ra, RegistrationList(), rng))
    join_it = 0
    for it in range(iters):
        registry = RegistrationList()
        members = []
        group_micros = 0.0
        for _ in range(size):
            micros, member = _timed(lambda: _enroll(gpk, ra, registry, rng))
            members.append(member)
            record('join', join_it, micros)
            join_it += 1
            group_micros += micros
        record('join_group', it, group_micros)
    ops['join_group'] = OperationCounts(**{k: v * size for k, v in ops['join'].to_dict().items()})

    amount = b"100"
    message = b"bench-message"

    # sign
    for _ in range(warmup):
        sign(gpk, members[0], message, amount, rng)
    ops['sign'] = _counted(lambda: sign(gpk, members[0], message, amount, rng))
    signatures = []
    for it in range(iters):
        member = members[it % size]
        micros, sig = _timed(lambda: sign(gpk, member, message, amount, rng))
        signatures.append(sig)
        record('sign', it, micros)

    # verify
    for _ in range(warmup):
        verify(gpk, message, amount, signatures[0])
    ops['verify'] = _counted(lambda: verify(gpk, message, amount, signatures[0]))
    for it in range(iters):
        micros, _ = _timed(lambda: verify(gpk, message, amount, signatures[it]))
        record('verify', it, micros)

    # link, one pair per iteration
    def pair(it: int):
        return (message, amount, signatures[it]), (message, amount, signatures[(it + 1) % iters])

    for _ in range(warmup):
        link(gpk, *pair(0))
    ops['link'] = _counted(lambda: link(gpk, *pair(0)))
    for it in range(iters):
        micros, _ = _timed(lambda: link(gpk, *pair(it)))
        record('link', it, micros)

    # trace, inclusive of the verification it performs first
    for _ in range(warmup):
        trace(gpk, sa, message, amount, signatures[0], registry)
    ops['trace'] = _counted(lambda: trace(gpk, sa, message, amount, signatures[0], registry))
    for it in range(iters):
        micros, _ = _timed(lambda: trace(gpk, sa, message, amount, signatures[it], registry))
        record('trace', it, micros)

    rows = []
    for algorithm in ALGORITHMS:
        values = [s.micros for s in samples if s.algorithm == algorithm]
        rows.append(BenchRow(
            algorithm=algorithm,
            group_size=size,
            mean_micros=statistics.mean(values),
            stddev_micros=statistics.stdev(values) if len(values) > 1 else 0.0,
            pairing_count=ops[algorithm].pairings,
            exp_count=ops[algorithm].exponentiations,
            iterations=len(values),
        ))
    logger.info(f"Benchmarked group size {size}")
    return samples, rows


def run_bench(config: Optional[BenchConfig] = None) -> BenchReport:
    """
    Time every algorithm for every configured group size.

    With config.parallel the sizes run in separate processes and the
    report is labeled wall-clock.
    """
    config = config or BenchConfig()
    if config.iters < 1:
        raise ValueError("iters must be at least 1")
    report = BenchReport(clock=CLOCK_WALL if config.parallel else CLOCK_CPU)
    logger.info(f"Benchmarking sizes {list(config.sizes)} with {config.iters} iterations each")

    if config.parallel:
        with ProcessPoolExecutor() as pool:
            futures = [
                pool.submit(_bench_size, size, config.iters, config.warmup, config.seed)
                for size in config.sizes
            ]
            results = [f.result() for f in futures]
    else:
        results = [_bench_size(size, config.iters, config.warmup, config.seed) for size in config.sizes]

    for samples, rows in results:
        report.samples.extend(samples)
        report.rows.extend(rows)
    return report


def shape_check(report: BenchReport) -> Dict[str, float]:
    """Relative spread (max/min - 1) of each algorithm's mean across sizes."""
    spread = {}
    for algorithm in ALGORITHMS:
        means = [r.mean_micros for r in report.rows if r.algorithm == algorithm]
        if means and min(means) > 0:
            spread[algorithm] = max(means) / min(means) - 1.0
    return spread

"""
Monte Carlo runner for simulation designs.

Replications are independent: replication r of cell c draws its K samples
from SeedSequence(seed, spawn_key=(c, r)), so the report only depends on the
design and its seed, never on how batches are scheduled.
"""
import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from celery import group
from django.conf import settings
from scipy import stats

from copulas.clustering import cluster_copulas
from copulas.coefficients import stable_mean
from copulas.ksample import ksample_test
from copulas.tuning import TuningConfig, tune_alpha

from .designs import ExperimentConfig, size_label
from .samplers import sample_copula

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReportRow:
    """
    Aggregate of one (sizes, scenario) cell.

    In test mode `hits` counts rejections; in cluster mode it counts
    replications recovering the expected partition exactly.
    """

    n: str
    scenario: str
    replications: int
    hits: int
    rate: float
    standard_error: float
    alpha: float
    d1_fraction: Optional[float] = None
    s1_fraction: Optional[float] = None
    mean_statistic: Optional[float] = None
    ks_distance: Optional[float] = None
    mean_clusters: Optional[float] = None
    cluster_counts: Dict[int, int] = field(default_factory=dict)


@dataclass
class ExperimentReport:
    design_id: str
    mode: str
    seed: int
    n_replications: int
    level: float
    pairing: str
    rows: List[ReportRow] = field(default_factory=list)
    runtime_seconds: Optional[float] = None
    description: str = ''


def standard_error(rate: float, replications: int) -> float:
    return math.sqrt(rate * (1.0 - rate) / replications)


def draw_samples(cfg: ExperimentConfig, cell: int, seed_sequence: np.random.SeedSequence) -> List[np.ndarray]:
    """One sample per population of the cell, each from its own child stream."""
    sizes, scenario = cfg.cells()[cell]
    children = seed_sequence.spawn(cfg.K)
    return [sample_copula(spec, n, child) for spec, n, child in zip(scenario.specs, sizes, children)]


def simulate_replication(cfg: ExperimentConfig, cell: int, alpha: float, replication: int) -> Dict:
    samples = draw_samples(cfg, cell, np.random.SeedSequence(cfg.seed, spawn_key=(cell, replication)))
    test_cfg = cfg.test_config(alpha)

    if cfg.mode == 'cluster':
        partition = cluster_copulas(samples, test_cfg)
        expected = {frozenset(cluster) for cluster in cfg.expected_clusters}
        return {
            'replication': replication,
            'n_clusters': len(partition.clusters),
            'exact': not partition.stopped and set(partition.as_sets()) == expected,
            'stopped': partition.stopped,
        }

    result = ksample_test(samples, test_cfg)
    return {
        'replication': replication,
        'reject': bool(result.reject),
        'statistic': float(result.statistic),
        'd1': result.d_selected == 1,
        's1': result.s_selected == 1,
        'degenerate': bool(result.degenerate),
    }


def resolve_alpha(cfg: ExperimentConfig, cell: int) -> float:
    """The design's alpha, or alpha tuned on a pilot draw of the cell."""
    if not cfg.tunes_alpha:
        return cfg.alpha

    pilot_sequence = np.random.SeedSequence(cfg.seed, spawn_key=(cell,))
    pilot = draw_samples(cfg, cell, pilot_sequence)
    tuning_seed = int(pilot_sequence.generate_state(1)[0])
    tuned = tune_alpha(pilot, TuningConfig.from_settings(seed=tuning_seed), cfg.test_config(1.0))
    logger.info(f'{cfg.design_id}: cell {cell} tuned alpha={tuned.alpha_hat}')
    return tuned.alpha_hat


def aggregate_cell(cfg: ExperimentConfig, cell: int, alpha: float, records: Sequence[Dict]) -> ReportRow:
    """Summaries over the records of one cell; independent of record order."""
    sizes, scenario = cfg.cells()[cell]
    records = sorted(records, key=lambda record: record['replication'])
    count = len(records)

    if cfg.mode == 'cluster':
        hits = sum(record['exact'] for record in records)
        clusters = np.array([record['n_clusters'] for record in records], dtype=float)
        histogram = Counter(record['n_clusters'] for record in records)
        rate = hits / count
        return ReportRow(
            n=size_label(sizes),
            scenario=scenario.name,
            replications=count,
            hits=hits,
            rate=rate,
            standard_error=standard_error(rate, count),
            alpha=alpha,
            mean_clusters=float(stable_mean(clusters)),
            cluster_counts=dict(sorted(histogram.items())),
        )

    hits = sum(record['reject'] for record in records)
    statistics = np.sort(np.array([record['statistic'] for record in records], dtype=float))
    rate = hits / count
    return ReportRow(
        n=size_label(sizes),
        scenario=scenario.name,
        replications=count,
        hits=hits,
        rate=rate,
        standard_error=standard_error(rate, count),
        alpha=alpha,
        d1_fraction=sum(record['d1'] for record in records) / count,
        s1_fraction=sum(record['s1'] for record in records) / count,
        mean_statistic=float(stable_mean(statistics)),
        ks_distance=float(stats.kstest(statistics, stats.chi2(1).cdf).statistic),
    )


def run_experiment(cfg: ExperimentConfig, batch_size: Optional[int] = None) -> ExperimentReport:
    """
    Run every replication of every cell of a design.

    Args:
        cfg: Validated design
        batch_size: Replications per Celery task (defaults to SIMULATION['BATCH_SIZE'])

    Returns:
        ExperimentReport: One row per (sizes, scenario) cell, in cell order
    """
    from .tasks import run_replication_batch

    started = time.perf_counter()
    batch_size = batch_size or settings.SIMULATION['BATCH_SIZE']
    payload = cfg.as_payload()
    cells = cfg.cells()
    alphas = [resolve_alpha(cfg, cell) for cell in range(len(cells))]

    batches = [
        (cell, start, min(start + batch_size, cfg.n_replications))
        for cell in range(len(cells))
        for start in range(0, cfg.n_replications, batch_size)
    ]
    logger.info(
        f'{cfg.design_id}: {len(cells)} cells x {cfg.n_replications} replications in {len(batches)} batches'
    )

    job = group(
        run_replication_batch.s(payload, cell, alphas[cell], start, stop) for cell, start, stop in batches
    )
    result = job.apply_async()
    outcomes = [child.get(disable_sync_subtasks=False) for child in result.results]

    records: Dict[int, List[Dict]] = {cell: [] for cell in range(len(cells))}
    for (cell, _, _), batch in zip(batches, outcomes):
        records[cell].extend(batch)

    report = ExperimentReport(
        design_id=cfg.design_id,
        mode=cfg.mode,
        seed=cfg.seed,
        n_replications=cfg.n_replications,
        level=cfg.level,
        pairing=cfg.pairing,
        rows=[aggregate_cell(cfg, cell, alphas[cell], records[cell]) for cell in range(len(cells))],
        description=cfg.description,
    )
    report.runtime_seconds = time.perf_counter() - started
    logger.info(f'{cfg.design_id}: finished in {report.runtime_seconds:.1f}s')
    return report

"""
Greedy clustering of populations by their copula.

The closest pair (smallest pairwise data-driven statistic) seeds the first
cluster if a two-sample test accepts it. Unassigned populations are then
visited closest first: a simultaneous test of the open cluster plus the
candidate decides whether the candidate joins, or closes the cluster and
opens a new one.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coefficients import coefficient_table
from .exceptions import DegenerateVariance, DomainError
from .ksample import (
    SampleInput,
    TestConfig,
    TestResult,
    as_pseudo_samples,
    build_pair_statistics,
    ksample_test,
)
from .lattice import ranked_pairs

logger = logging.getLogger(__name__)

SEED = 'seed'
ABSORB = 'absorb'
OPEN = 'open'
STOP = 'stop'


@dataclass(frozen=True)
class ClusterStep:
    """One test of the clustering trail."""

    action: str
    candidate: int
    tested: Tuple[int, ...]
    statistic: float
    p_value: float
    accepted: bool


@dataclass
class ClusterPartition:
    clusters: List[Tuple[int, ...]] = field(default_factory=list)
    trail: List[ClusterStep] = field(default_factory=list)
    stopped: bool = False

    def assignment(self) -> Dict[int, int]:
        """Map population index to its 1-based cluster number."""
        return {
            population: number
            for number, cluster in enumerate(self.clusters, start=1)
            for population in cluster
        }

    def as_sets(self) -> List[frozenset]:
        return [frozenset(cluster) for cluster in self.clusters]


def pairwise_statistics(samples: Sequence[SampleInput], cfg: Optional[TestConfig] = None) -> np.ndarray:
    """K x K matrix of V^(ell, m) at D(n), zero diagonal."""
    cfg = cfg or TestConfig()
    pseudo = as_pseudo_samples(samples, cfg.ties)
    tables = [coefficient_table(ps, cfg.d_max) for ps in pseudo]
    sizes = [ps.n for ps in pseudo]

    matrix = np.zeros((len(pseudo), len(pseudo)), dtype=float)
    for stats in build_pair_statistics(tables, sizes, cfg):
        matrix[stats.ell - 1, stats.m - 1] = matrix[stats.m - 1, stats.ell - 1] = stats.selected_statistic
    return matrix


def _group_test(pseudo, tested: Tuple[int, ...], cfg: TestConfig) -> TestResult:
    """
    Simultaneous test of the tested populations.

    The variance is estimated on the first two samples. When that pair has a
    zero variance but the statistic is positive, the first pair in rank order
    with a positive variance is moved to the front.
    """
    try:
        return ksample_test([pseudo[i - 1] for i in tested], cfg)
    except DegenerateVariance:
        logger.warning(f"Zero variance on populations {tested[:2]}; retrying with another leading pair")

    for first, second in ranked_pairs(len(tested))[1:]:
        lead = (tested[first - 1], tested[second - 1])
        order = lead + tuple(i for i in tested if i not in lead)
        try:
            return ksample_test([pseudo[i - 1] for i in order], cfg)
        except DegenerateVariance:
            continue
    raise DegenerateVariance(f"Every pair of populations {tested} has a zero variance estimate")


def cluster_copulas(
    samples: Sequence[SampleInput],
    cfg: Optional[TestConfig] = None,
    fallback_singletons: bool = False,
) -> ClusterPartition:
    """
    Partition K populations into groups sharing one copula.

    Args:
        samples: K >= 2 samples
        cfg: Test configuration used by every step
        fallback_singletons: When the seed test rejects, return one cluster
            per population instead of the empty partition

    Returns:
        ClusterPartition: Clusters in creation order with the test trail
    """
    cfg = cfg or TestConfig()
    K = len(samples)
    if K < 2:
        raise DomainError(f"Clustering needs at least two populations, got {K}")

    pseudo = as_pseudo_samples(samples, cfg.ties)
    distances = pairwise_statistics(pseudo, cfg)

    # Ties between pairs go to the smallest pair rank
    ell, m = min(ranked_pairs(K), key=lambda pair: distances[pair[0] - 1, pair[1] - 1])
    result = ksample_test([pseudo[ell - 1], pseudo[m - 1]], cfg)
    partition = ClusterPartition()
    partition.trail.append(
        ClusterStep(SEED, m, (ell, m), result.statistic, result.p_value, not result.reject)
    )

    if result.reject:
        logger.warning(
            f"Seed pair ({ell}, {m}) rejected with p={result.p_value:.3g}; no cluster found"
        )
        partition.trail.append(ClusterStep(STOP, m, (ell, m), result.statistic, result.p_value, False))
        partition.stopped = True
        if fallback_singletons:
            partition.clusters = [(population,) for population in range(1, K + 1)]
        return partition

    current = [ell, m]
    unassigned = [population for population in range(1, K + 1) if population not in current]

    while unassigned:
        candidate = min(
            unassigned,
            key=lambda j: (min(distances[i - 1, j - 1] for i in current), j),
        )
        tested = tuple(current) + (candidate,)
        result = _group_test(pseudo, tested, cfg)

        if result.reject:
            partition.clusters.append(tuple(sorted(current)))
            current = [candidate]
            action = OPEN
        else:
            current.append(candidate)
            action = ABSORB

        logger.debug(f"Cluster step {action}: tested {tested}, p={result.p_value:.3g}")
        partition.trail.append(
            ClusterStep(action, candidate, tested, result.statistic, result.p_value, not result.reject)
        )
        unassigned.remove(candidate)

    partition.clusters.append(tuple(sorted(current)))
    return partition

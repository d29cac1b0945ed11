"""
Calibration of the penalty factor alpha by merge-split resampling.

All samples are pooled, so the pool follows a single dependence structure
whenever H0 holds. Each replication splits the pool at random into K' equal
parts and records which grid values of alpha make the pair selection rule
return s(n) = 1. The tuned alpha is the smallest grid value that does so in
every replication.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coefficients import as_sample, coefficient_table, pseudo_observations
from .exceptions import DimensionMismatch, DomainError
from .ksample import TestConfig, build_pair_statistics, select_pair, selection_penalty
from .validators import TuningConfigValidator

logger = logging.getLogger(__name__)

DEFAULT_ALPHA_GRID = tuple(round(0.05 * step, 2) for step in range(1, 101))


@dataclass(frozen=True)
class TuningConfig:
    k_prime: int = 3
    n_reps: int = 20
    alpha_grid: Tuple[float, ...] = DEFAULT_ALPHA_GRID
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'alpha_grid', tuple(float(alpha) for alpha in self.alpha_grid))
        TuningConfigValidator.validate(self)

    @classmethod
    def from_settings(cls, **overrides) -> 'TuningConfig':
        """Defaults from settings.COPULA_TUNING; None overrides are ignored."""
        from django.conf import settings

        defaults = settings.COPULA_TUNING
        values = {
            'k_prime': defaults['K_PRIME'],
            'n_reps': defaults['N_REPS'],
            'alpha_grid': tuple(defaults['ALPHA_GRID']),
            'seed': defaults['SEED'],
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class TuningResult:
    alpha_hat: float
    exhausted: bool
    unanimity: Dict[float, int]
    n_reps: int
    k_prime: int
    seed: int
    pool_size: int
    dropped_rows: int = 0
    part_size: int = 0
    grid: Tuple[float, ...] = field(default=())


def split_pool(pool: np.ndarray, k_prime: int, rng: np.random.Generator) -> List[np.ndarray]:
    """
    Randomly split pool rows into k_prime equal parts.

    Rows beyond k_prime * (len(pool) // k_prime) are dropped, the dropped rows
    being uniformly random.
    """
    part_size = len(pool) // k_prime
    if part_size < 2:
        raise DomainError(f"Pool of {len(pool)} rows is too small to split into {k_prime} parts")
    order = rng.permutation(len(pool))[: part_size * k_prime]
    return [pool[rows] for rows in order.reshape(k_prime, part_size)]


def _selects_first_pair(tables, sizes, cfg: TestConfig, grid: Sequence[float]) -> np.ndarray:
    hits = np.zeros(len(grid), dtype=bool)
    for position, alpha in enumerate(grid):
        alpha_cfg = cfg.with_alpha(alpha)
        pair_stats = build_pair_statistics(tables, sizes, alpha_cfg)
        hits[position] = select_pair(pair_stats, alpha_cfg, selection_penalty(sizes, alpha_cfg)) == 1
    return hits


def tune_alpha(
    samples: Sequence[np.ndarray],
    tcfg: Optional[TuningConfig] = None,
    cfg: Optional[TestConfig] = None,
) -> TuningResult:
    """
    Tune alpha on the pooled samples.

    Args:
        samples: Raw samples (n_k x p); they are pooled row-wise
        tcfg: Resampling settings (K', N, grid, seed)
        cfg: Test settings used by the K'-sample selection rule

    Returns:
        TuningResult: Smallest unanimous grid alpha, or the grid maximum with
            exhausted=True when no grid value is unanimous
    """
    tcfg = tcfg or TuningConfig()
    cfg = cfg or TestConfig()

    matrices = [as_sample(sample) for sample in samples]
    if len({matrix.shape[1] for matrix in matrices}) > 1:
        raise DimensionMismatch("Samples must share the dimension p to be pooled")
    pool = np.vstack(matrices)
    grid = tcfg.alpha_grid

    successes = np.zeros(len(grid), dtype=int)
    part_size = len(pool) // tcfg.k_prime
    for replication in range(tcfg.n_reps):
        rng = np.random.default_rng(tcfg.seed + replication)
        parts = split_pool(pool, tcfg.k_prime, rng)
        tables = [coefficient_table(pseudo_observations(part, ties=cfg.ties), cfg.d_max) for part in parts]
        successes += _selects_first_pair(tables, [part_size] * tcfg.k_prime, cfg, grid)

    unanimous = successes == tcfg.n_reps
    if np.any(unanimous[:-1] & ~unanimous[1:]):
        logger.error(f"Unanimity not monotone in alpha: {dict(zip(grid, successes.tolist()))}")
        raise AssertionError("A larger penalty lost unanimity; selection rule is inconsistent")

    if unanimous.any():
        alpha_hat = grid[int(np.argmax(unanimous))]
        exhausted = False
    else:
        alpha_hat = grid[-1]
        exhausted = True
        logger.warning(f"No alpha in the grid reached unanimity over {tcfg.n_reps} splits; using {alpha_hat}")

    logger.info(f"Tuned alpha={alpha_hat} (K'={tcfg.k_prime}, N={tcfg.n_reps}, pool={len(pool)})")
    return TuningResult(
        alpha_hat=alpha_hat,
        exhausted=exhausted,
        unanimity=dict(zip(grid, successes.tolist())),
        n_reps=tcfg.n_reps,
        k_prime=tcfg.k_prime,
        seed=tcfg.seed,
        pool_size=len(pool),
        dropped_rows=len(pool) - part_size * tcfg.k_prime,
        part_size=part_size,
        grid=grid,
    )

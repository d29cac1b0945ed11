"""
Data-driven K-sample test for equality of copulas.

For every population pair (ell, m) the embedded statistics

    V_k = scale * sum_{j in H(k)} (rho_hat_j^(ell) - rho_hat_j^(m))^2

are penalised to select a dimension D(n), the selected pair statistics are
accumulated in pair-rank order and penalised again to select s(n). The
cumulative statistic at s(n), divided by the variance estimate for
populations 1 and 2, is compared to a chi-square distribution with one degree
of freedom.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import erfc

from . import legendre
from .coefficients import (
    CoefficientTable,
    PseudoSample,
    coefficient_table,
    pseudo_observations,
    stable_mean,
)
from .exceptions import DegenerateVariance, DimensionMismatch, DomainError, PairingError
from .lattice import ranked_pairs
from .validators import TestConfigValidator

logger = logging.getLogger(__name__)

SampleInput = Union[np.ndarray, PseudoSample]


@dataclass(frozen=True)
class TestConfig:
    """Settings of one test run."""

    __test__ = False

    d_max: int = 3
    alpha_penalty: float = 1.0
    penalty_kind: str = 'log_n'
    pairing: str = 'paired'
    level: float = 0.05
    ties: str = 'error'

    def __post_init__(self):
        TestConfigValidator.validate(self)

    @classmethod
    def from_settings(cls, **overrides) -> 'TestConfig':
        """Defaults from settings.COPULA_TEST; None overrides are ignored."""
        from django.conf import settings

        defaults = settings.COPULA_TEST
        values = {
            'd_max': defaults['D_MAX'],
            'alpha_penalty': defaults['ALPHA_PENALTY'],
            'pairing': defaults['PAIRING'],
            'level': defaults['LEVEL'],
            'ties': defaults['TIES'],
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def with_alpha(self, alpha: float) -> 'TestConfig':
        return replace(self, alpha_penalty=float(alpha))

    @property
    def independent(self) -> bool:
        return self.pairing == 'independent'


@dataclass(frozen=True, eq=False)
class PairStatistics:
    ell: int
    m: int
    v_sequence: np.ndarray
    d_selected: int
    scale: float
    n_eff: float
    n_ell: int
    n_m: int

    @property
    def selected_statistic(self) -> float:
        """V^(ell, m) at D(n)."""
        return float(self.v_sequence[self.d_selected - 1])


@dataclass(frozen=True)
class TestResult:
    """Outcome of ksample_test; statistic is the normalised V."""

    __test__ = False

    statistic: float
    s_selected: int
    selected_pair: Tuple[int, int]
    d_per_pair: Dict[Tuple[int, int], int]
    sigma2_hat: float
    p_value: float
    reject: bool
    level: float
    pairing: str
    alpha_penalty: float
    sizes: Tuple[int, ...]
    raw_statistic: float
    selection_penalty: float
    cumulative: Tuple[float, ...] = field(default=())
    degenerate: bool = False

    @property
    def K(self) -> int:
        return len(self.sizes)

    @property
    def d_selected(self) -> int:
        """D(n) of the pair (1, 2)."""
        return self.d_per_pair[(1, 2)]


def chi2_upper_tail(x: float) -> float:
    """P(chi2_1 > x) = erfc(sqrt(x / 2))."""
    if math.isnan(x) or x < 0:
        raise DomainError(f"Chi-square statistic must be nonnegative, got {x}")
    return float(erfc(math.sqrt(x / 2.0)))


def _pair_scale(n_ell: int, n_m: int, cfg: TestConfig) -> Tuple[float, float]:
    """Return (scale, n_eff) for a pair."""
    if cfg.independent:
        harmonic = n_ell * n_m / (n_ell + n_m)
        return harmonic, 2.0 * harmonic
    if n_ell != n_m:
        raise PairingError(f"Paired samples must have equal sizes, got {n_ell} and {n_m}")
    return float(n_ell), float(n_ell)


def select_dimension(stats: Union[PairStatistics, Sequence[float]], cfg: TestConfig, n_eff: float) -> int:
    """
    D(n) = min argmax_k (V_k - k q), q = alpha log(n_eff).

    Args:
        stats: PairStatistics or the bare v_sequence
        cfg: Test configuration supplying alpha
        n_eff: n for paired samples, 2 n1 n2 / (n1 + n2) for independent ones

    Returns:
        int: Selected dimension, 1-based
    """
    sequence = np.asarray(
        stats.v_sequence if isinstance(stats, PairStatistics) else stats, dtype=float
    )
    if sequence.size == 0:
        raise DomainError("Cannot select a dimension from an empty statistic sequence")
    q = cfg.alpha_penalty * math.log(n_eff)
    objective = sequence - q * np.arange(1, sequence.size + 1)
    # np.argmax returns the first maximiser
    return int(np.argmax(objective)) + 1


def _pair_from_tables(
    table_ell: CoefficientTable,
    table_m: CoefficientTable,
    n_ell: int,
    n_m: int,
    cfg: TestConfig,
    ell: int = 1,
    m: int = 2,
) -> PairStatistics:
    if table_ell.p != table_m.p:
        raise DimensionMismatch(f"Populations {ell} and {m} differ in dimension")
    scale, n_eff = _pair_scale(n_ell, n_m, cfg)
    differences = table_ell.values - table_m.values
    v_sequence = scale * np.cumsum(differences * differences)
    v_sequence.setflags(write=False)
    return PairStatistics(
        ell=ell,
        m=m,
        v_sequence=v_sequence,
        d_selected=select_dimension(v_sequence, cfg, n_eff),
        scale=scale,
        n_eff=n_eff,
        n_ell=n_ell,
        n_m=n_m,
    )


def pair_statistic_sequence(
    ps_ell: PseudoSample,
    ps_m: PseudoSample,
    cfg: TestConfig,
    ell: int = 1,
    m: int = 2,
) -> PairStatistics:
    """
    Embedded statistic sequence of one population pair and its D(n).

    Args:
        ps_ell: Pseudo-sample of population ell
        ps_m: Pseudo-sample of population m
        cfg: Test configuration
        ell: Index of the first population, for labelling
        m: Index of the second population, for labelling

    Returns:
        PairStatistics: v_sequence has one entry per index of S(2) .. S(d_max)
    """
    if ps_ell.p != ps_m.p:
        raise DimensionMismatch(f"Populations {ell} and {m} differ in dimension: {ps_ell.p} vs {ps_m.p}")
    _pair_scale(ps_ell.n, ps_m.n, cfg)
    return _pair_from_tables(
        coefficient_table(ps_ell, cfg.d_max),
        coefficient_table(ps_m, cfg.d_max),
        ps_ell.n,
        ps_m.n,
        cfg,
        ell,
        m,
    )


def build_pair_statistics(
    tables: Sequence[CoefficientTable], sizes: Sequence[int], cfg: TestConfig
) -> List[PairStatistics]:
    """PairStatistics for every pair of populations, in pair-rank order."""
    return [
        _pair_from_tables(tables[ell - 1], tables[m - 1], sizes[ell - 1], sizes[m - 1], cfg, ell, m)
        for ell, m in ranked_pairs(len(tables))
    ]


def selection_penalty(sizes: Sequence[int], cfg: TestConfig) -> float:
    """
    Penalty p_n of the pair selection rule.

    Paired samples use alpha log(n). Independent samples use
    alpha log(K^(K-1) n_1 ... n_K / (n_1 + ... + n_K)^(K-1)), which reduces to
    alpha log(2 n1 n2 / (n1 + n2)) for two samples.
    """
    K = len(sizes)
    if not cfg.independent:
        return cfg.alpha_penalty * math.log(sizes[0])
    log_argument = (
        (K - 1) * math.log(K)
        + sum(math.log(n) for n in sizes)
        - (K - 1) * math.log(sum(sizes))
    )
    return cfg.alpha_penalty * log_argument


def _sizes_from_pairs(pair_stats: Sequence[PairStatistics]) -> List[int]:
    sizes: Dict[int, int] = {}
    for stats in pair_stats:
        sizes[stats.ell] = stats.n_ell
        sizes[stats.m] = stats.n_m
    return [sizes[index] for index in sorted(sizes)]


def cumulative_statistics(pair_stats: Sequence[PairStatistics]) -> np.ndarray:
    """V_k = sum of the selected pair statistics of ranks 1..k."""
    return np.cumsum([stats.selected_statistic for stats in pair_stats])


def select_pair(
    pair_stats: Sequence[PairStatistics],
    cfg: TestConfig,
    penalty: Optional[float] = None,
) -> int:
    """
    s(n) = min argmax_k (V_k - k p_n) over the v(K) ranked pairs.

    Args:
        pair_stats: Statistics of every pair, ordered by pair rank
        cfg: Test configuration
        penalty: p_n; derived from the pair sizes when omitted

    Returns:
        int: Selected pair rank, 1-based
    """
    if not pair_stats:
        raise DomainError("Cannot select a pair from an empty list")
    if penalty is None:
        penalty = selection_penalty(_sizes_from_pairs(pair_stats), cfg)
    cumulative = cumulative_statistics(pair_stats)
    objective = cumulative - penalty * np.arange(1, cumulative.size + 1)
    return int(np.argmax(objective)) + 1


def _indicator_correction(u: np.ndarray, other: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    (1/n) sum_k (I(u_i <= u_k) - u_k) w_k for every i.

    Rows are sorted by (u, other) so the partial sums do not depend on row order.
    """
    n = u.size
    order = np.lexsort((other, u))
    sorted_u = u[order]
    sorted_w = weights[order]
    # tail[t] = sum of sorted_w[t:], tail[n] = 0
    tail = np.concatenate([np.cumsum(sorted_w[::-1])[::-1], [0.0]])
    first_at_least = np.searchsorted(sorted_u, u, side='left')
    constant = np.sort(u * weights).sum()
    return (tail[first_at_least] - constant) / n


def influence_terms(ps: PseudoSample) -> np.ndarray:
    """
    M_i = L1(U_i1) L1(U_i2)
          + (2 sqrt 3 / n) sum_k (I(U_i1 <= U_k1) - U_k1) L1(U_k2)
          + (2 sqrt 3 / n) sum_k (I(U_i2 <= U_k2) - U_k2) L1(U_k1)

    Only the first two coordinates enter. The indicator on the observations
    equals the indicator on the pseudo-observations.
    """
    if ps.p < 2:
        raise DimensionMismatch("Influence terms need at least two coordinates")
    u1 = ps.data[:, 0]
    u2 = ps.data[:, 1]
    l1_u1 = legendre.evaluate(1, u1)
    l1_u2 = legendre.evaluate(1, u2)
    correction = (
        _indicator_correction(u1, u2, l1_u2)
        + _indicator_correction(u2, u1, l1_u1)
    )
    return l1_u1 * l1_u2 + 2.0 * legendre.SQRT3 * correction


def variance_paired(ps1: PseudoSample, ps2: PseudoSample) -> float:
    """sigma2_hat(1, 2) = (1/n) sum_i (M_i1 - M_i2 - mean(M_1) + mean(M_2))^2."""
    if ps1.n != ps2.n:
        raise PairingError(f"Paired variance needs equal sizes, got {ps1.n} and {ps2.n}")
    m1 = influence_terms(ps1)
    m2 = influence_terms(ps2)
    centred = m1 - m2 - stable_mean(m1) + stable_mean(m2)
    return float(stable_mean(centred * centred))


def variance_independent(ps1: PseudoSample, ps2: PseudoSample) -> float:
    """
    sigma2_hat(1, 2) = (1 - a)/n1 sum (M_i1 - mean M_1)^2 + a/n2 sum (M_i2 - mean M_2)^2

    with a = n1 / (n1 + n2).
    """
    a = ps1.n / (ps1.n + ps2.n)
    m1 = influence_terms(ps1)
    m2 = influence_terms(ps2)
    centred1 = m1 - stable_mean(m1)
    centred2 = m2 - stable_mean(m2)
    return float((1.0 - a) * stable_mean(centred1 * centred1) + a * stable_mean(centred2 * centred2))


def as_pseudo_samples(samples: Sequence[SampleInput], ties: str) -> List[PseudoSample]:
    """Rank-transform raw samples; PseudoSample inputs are passed through."""
    pseudo = [
        sample if isinstance(sample, PseudoSample) else pseudo_observations(sample, ties=ties)
        for sample in samples
    ]
    dimensions = {ps.p for ps in pseudo}
    if len(dimensions) > 1:
        raise DimensionMismatch(f"All populations must share the dimension p, got {sorted(dimensions)}")
    return pseudo


def ksample_test(samples: Sequence[SampleInput], cfg: Optional[TestConfig] = None) -> TestResult:
    """
    Test H0: the K populations share one copula.

    Args:
        samples: K >= 2 samples (n_k x p matrices or PseudoSamples)
        cfg: Test configuration (defaults to TestConfig())

    Returns:
        TestResult: Normalised statistic, selections, p-value and decision

    Raises:
        PairingError: Paired mode with unequal sample sizes
        DegenerateVariance: sigma2_hat is zero while V_s(n) is positive
    """
    cfg = cfg or TestConfig()
    if len(samples) < 2:
        raise DomainError(f"At least two samples are required, got {len(samples)}")

    pseudo = as_pseudo_samples(samples, cfg.ties)
    sizes = [ps.n for ps in pseudo]
    if not cfg.independent and len(set(sizes)) > 1:
        raise PairingError(f"Paired mode requires equal sample sizes, got {sizes}")

    tables = [coefficient_table(ps, cfg.d_max) for ps in pseudo]
    pair_stats = build_pair_statistics(tables, sizes, cfg)
    penalty = selection_penalty(sizes, cfg)
    s_selected = select_pair(pair_stats, cfg, penalty)
    cumulative = cumulative_statistics(pair_stats)
    raw_statistic = float(cumulative[s_selected - 1])

    if cfg.independent:
        sigma2 = variance_independent(pseudo[0], pseudo[1])
    else:
        sigma2 = variance_paired(pseudo[0], pseudo[1])

    degenerate = False
    if sigma2 > 0.0:
        statistic = raw_statistic / sigma2
        p_value = chi2_upper_tail(statistic)
    elif raw_statistic == 0.0:
        logger.warning("Zero variance and zero statistic: samples are identical, H0 not rejected")
        degenerate = True
        statistic = 0.0
        p_value = 1.0
    else:
        raise DegenerateVariance(
            f"Variance estimate for populations 1 and 2 is zero while V_s = {raw_statistic:.6g}"
        )

    selected = pair_stats[s_selected - 1]
    logger.debug(
        f"K={len(pseudo)} sizes={sizes} s(n)={s_selected} pair=({selected.ell},{selected.m}) "
        f"V={statistic:.4f} p={p_value:.3g}"
    )

    return TestResult(
        statistic=statistic,
        s_selected=s_selected,
        selected_pair=(selected.ell, selected.m),
        d_per_pair={(stats.ell, stats.m): stats.d_selected for stats in pair_stats},
        sigma2_hat=sigma2,
        p_value=p_value,
        reject=p_value < cfg.level,
        level=cfg.level,
        pairing=cfg.pairing,
        alpha_penalty=cfg.alpha_penalty,
        sizes=tuple(sizes),
        raw_statistic=raw_statistic,
        selection_penalty=penalty,
        cumulative=tuple(float(value) for value in cumulative),
        degenerate=degenerate,
    )


def pairwise_anova(samples: Sequence[SampleInput], cfg: Optional[TestConfig] = None) -> np.ndarray:
    """
    Two-sample p-values for every pair of populations.

    Returns:
        np.ndarray: Symmetric K x K matrix with unit diagonal
    """
    cfg = cfg or TestConfig()
    if len(samples) < 2:
        raise DomainError(f"At least two samples are required, got {len(samples)}")

    pseudo = as_pseudo_samples(samples, cfg.ties)
    K = len(pseudo)
    p_values = np.ones((K, K), dtype=float)
    for ell, m in ranked_pairs(K):
        result = ksample_test([pseudo[ell - 1], pseudo[m - 1]], cfg)
        p_values[ell - 1, m - 1] = p_values[m - 1, ell - 1] = result.p_value
    return p_values

"""
Samplers for the six copula families used by the simulation designs.

Elliptical copulas (Gaussian, Student) are drawn from correlated latent
vectors with an exchangeable correlation matrix. Archimedean copulas are drawn
with the frailty construction U_j = psi(E_j / V), E_j ~ Exp(1), where V has
Laplace transform psi:

    Clayton  V ~ Gamma(1/theta)            psi(s) = (1 + s)^(-1/theta)
    Gumbel   V ~ positive stable(1/theta)  psi(s) = exp(-s^(1/theta))
    Frank    V ~ logarithmic(1 - e^-theta) psi(s) = -log(1 - (1 - e^-theta) e^-s) / theta
    Joe      V ~ Sibuya(1/theta)           psi(s) = 1 - (1 - e^-s)^(1/theta)

Every family is parameterised by Kendall's tau.
"""
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from django.core.exceptions import ValidationError
from django.db import models
from scipy import integrate, optimize, special, stats

logger = logging.getLogger(__name__)

TAU_CLAMP = 0.9999
PARAM_XTOL = 1e-12
SIBUYA_EXACT_MAX = 2.0 ** 52

SeedLike = Union[int, np.random.SeedSequence]


class CopulaFamily(models.TextChoices):
    GAUSSIAN = 'gaussian', 'Gaussian'
    STUDENT = 'student', 'Student'
    GUMBEL = 'gumbel', 'Gumbel'
    FRANK = 'frank', 'Frank'
    CLAYTON = 'clayton', 'Clayton'
    JOE = 'joe', 'Joe'


FAMILY_ALIASES = {
    'gaus': CopulaFamily.GAUSSIAN,
    'normal': CopulaFamily.GAUSSIAN,
    'stud': CopulaFamily.STUDENT,
    't': CopulaFamily.STUDENT,
    'gumb': CopulaFamily.GUMBEL,
    'fran': CopulaFamily.FRANK,
    'clay': CopulaFamily.CLAYTON,
}

ELLIPTICAL = (CopulaFamily.GAUSSIAN, CopulaFamily.STUDENT)


def parse_family(name: str) -> str:
    """Normalise a family name or short alias ('gaus', 'clay', ...)."""
    key = name.strip().lower()
    if key in CopulaFamily.values:
        return key
    if key in FAMILY_ALIASES:
        return FAMILY_ALIASES[key].value
    raise ValidationError(f"Unknown copula family {name!r}; expected one of {', '.join(CopulaFamily.values)}")


@dataclass(frozen=True)
class CopulaSpec:
    """A copula family at a given Kendall's tau in dimension p."""

    family: str
    tau: float
    p: int = 2
    df: float = 4.0

    def __post_init__(self):
        object.__setattr__(self, 'family', parse_family(self.family))
        if self.p < 2:
            raise ValidationError(f'Copula dimension must be at least 2, got {self.p}')
        if self.df <= 0:
            raise ValidationError(f'Student degrees of freedom must be positive, got {self.df}')
        if self.tau == 1.0:
            logger.warning(f"tau=1 requested for {self.family}; clamped to {TAU_CLAMP}")
            object.__setattr__(self, 'tau', TAU_CLAMP)

        lower = -1.0 if self.family in ELLIPTICAL else 0.0
        if not lower < self.tau < 1.0:
            raise ValidationError(
                f'Kendall tau for {self.family} must lie in ({lower:g}, 1), got {self.tau}'
            )

    @property
    def theta(self) -> float:
        return tau_to_param(self)


def _debye1(theta: float) -> float:
    """D_1(theta) = (1/theta) int_0^theta t / (e^t - 1) dt."""
    value, _ = integrate.quad(lambda t: t / np.expm1(t), 0.0, theta, epsabs=1e-14, epsrel=1e-13)
    return value / theta


def _joe_tau(theta: float) -> float:
    """tau = 1 + 4 int_0^1 phi(t) / phi'(t) dt with phi(t) = -log(1 - (1 - t)^theta)."""
    if theta == 1.0:
        return 0.0

    def ratio(s: float) -> float:
        power = s ** theta
        if power >= 1.0:
            return 0.0
        return math.log1p(-power) * (1.0 - power) / (theta * s ** (theta - 1.0))

    value, _ = integrate.quad(ratio, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 1.0 + 4.0 * value


def param_to_tau(family: str, theta: float) -> float:
    """Kendall's tau of a family at parameter theta."""
    family = parse_family(family)
    if family in ELLIPTICAL:
        return 2.0 / math.pi * math.asin(theta)
    if family == CopulaFamily.CLAYTON:
        return theta / (theta + 2.0)
    if family == CopulaFamily.GUMBEL:
        return 1.0 - 1.0 / theta
    if family == CopulaFamily.FRANK:
        return 1.0 - 4.0 / theta * (1.0 - _debye1(theta))
    return _joe_tau(theta)


def _invert_tau(family: str, tau: float, lower: float) -> float:
    upper = 2.0 * max(lower, 1.0)
    while param_to_tau(family, upper) < tau:
        upper *= 2.0
    return optimize.brentq(
        lambda theta: param_to_tau(family, theta) - tau, lower, upper, xtol=PARAM_XTOL
    )


def tau_to_param(spec: CopulaSpec) -> float:
    """
    Family parameter theta matching Kendall's tau.

    Args:
        spec: Copula specification

    Returns:
        float: sin(pi tau / 2) for elliptical families, 2 tau / (1 - tau) for
            Clayton, 1 / (1 - tau) for Gumbel, numeric inversion for Frank and Joe
    """
    family, tau = spec.family, spec.tau
    if family in ELLIPTICAL:
        return math.sin(math.pi * tau / 2.0)
    if family == CopulaFamily.CLAYTON:
        return 2.0 * tau / (1.0 - tau)
    if family == CopulaFamily.GUMBEL:
        return 1.0 / (1.0 - tau)
    if family == CopulaFamily.FRANK:
        return _invert_tau(family, tau, lower=1e-9)
    return _invert_tau(family, tau, lower=1.0 + 1e-12)


def _exchangeable_normals(rng: np.random.Generator, n: int, p: int, rho: float) -> np.ndarray:
    correlation = np.full((p, p), rho)
    np.fill_diagonal(correlation, 1.0)
    cholesky = np.linalg.cholesky(correlation)
    return rng.standard_normal((n, p)) @ cholesky.T


def _positive_stable_log(rng: np.random.Generator, n: int, alpha: float) -> np.ndarray:
    """log V for V with Laplace transform exp(-s^alpha), by Kanter's representation."""
    angle = rng.uniform(0.0, math.pi, size=n)
    w = rng.exponential(size=n)
    return (
        np.log(np.sin(alpha * angle))
        - np.log(np.sin(angle)) / alpha
        + (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * angle)) - np.log(w))
    )


def _logarithmic(rng: np.random.Generator, n: int, theta: float) -> np.ndarray:
    """Logarithmic law with p = 1 - exp(-theta), Kemp's algorithm on log(1 - p) = -theta."""
    prob = -math.expm1(-theta)
    u2 = rng.random(n)
    u1 = rng.random(n)
    q = -np.expm1(-theta * u1)
    with np.errstate(divide='ignore'):
        tail = np.floor(1.0 + np.log(u2) / np.log(q))
    values = np.where(u2 < q * q, tail, np.where(u2 > q, 1.0, 2.0))
    return np.where(u2 > prob, 1.0, values)


def _sibuya_log(rng: np.random.Generator, n: int, alpha: float) -> np.ndarray:
    """
    log V for the Sibuya law, P(V > k) = 1 / (k B(k, 1 - alpha)).

    P(V = 1) = alpha. Above 1 the tail is inverted through its asymptote
    k^-alpha / Gamma(1 - alpha) and the floor is corrected against the exact
    survival function. Guesses beyond SIBUYA_EXACT_MAX stay on the log scale.
    """
    u = rng.random(n)
    log_tail = np.log1p(-u)
    log_guess = -(log_tail + special.gammaln(1.0 - alpha)) / alpha
    log_frailty = np.zeros(n)

    exact = (u > alpha) & (log_guess < math.log(SIBUYA_EXACT_MAX))
    floor = np.floor(np.exp(log_guess[exact]))
    log_survival = -np.log(floor) - special.betaln(floor, 1.0 - alpha)
    log_frailty[exact] = np.log(np.where(log_tail[exact] < log_survival, floor + 1.0, floor))

    far = (u > alpha) & ~exact
    log_frailty[far] = log_guess[far]
    return log_frailty


def sample_copula(spec: CopulaSpec, n: int, seed: SeedLike) -> np.ndarray:
    """
    Draw n observations of the copula with uniform margins.

    Args:
        spec: Family, tau, dimension and Student degrees of freedom
        n: Number of rows, at least 1
        seed: Integer seed or SeedSequence; identical seeds give identical draws

    Returns:
        np.ndarray: n x p matrix with entries in (0, 1)
    """
    if n < 1:
        raise ValidationError(f'Sample size must be at least 1, got {n}')

    rng = np.random.default_rng(seed)
    theta = tau_to_param(spec)
    p = spec.p

    if spec.family == CopulaFamily.GAUSSIAN:
        return stats.norm.cdf(_exchangeable_normals(rng, n, p, theta))

    if spec.family == CopulaFamily.STUDENT:
        latent = _exchangeable_normals(rng, n, p, theta)
        mixing = np.sqrt(rng.chisquare(spec.df, size=n) / spec.df)
        return stats.t.cdf(latent / mixing[:, None], spec.df)

    if spec.family == CopulaFamily.CLAYTON:
        frailty = rng.gamma(1.0 / theta, 1.0, size=n)
        exponentials = rng.exponential(size=(n, p))
        return np.exp(-np.log1p(exponentials / frailty[:, None]) / theta)

    if spec.family == CopulaFamily.GUMBEL:
        log_frailty = _positive_stable_log(rng, n, 1.0 / theta)
        exponentials = rng.exponential(size=(n, p))
        log_ratio = np.log(exponentials) - log_frailty[:, None]
        return np.exp(-np.exp(log_ratio / theta))

    if spec.family == CopulaFamily.FRANK:
        frailty = _logarithmic(rng, n, theta)
        exponentials = rng.exponential(size=(n, p))
        return -np.log1p(math.expm1(-theta) * np.exp(-exponentials / frailty[:, None])) / theta

    log_frailty = _sibuya_log(rng, n, 1.0 / theta)
    exponentials = rng.exponential(size=(n, p))
    log_ratio = np.log(exponentials) - log_frailty[:, None]
    ratio = np.exp(log_ratio)
    # log(1 - e^-x), with its expansion log x - x / 2 near zero
    with np.errstate(divide='ignore'):
        log_base = np.where(
            ratio < 1e-8,
            log_ratio - ratio / 2.0,
            np.where(ratio > math.log(2.0), np.log1p(-np.exp(-ratio)), np.log(-np.expm1(-ratio))),
        )
    return -np.expm1(log_base / theta)

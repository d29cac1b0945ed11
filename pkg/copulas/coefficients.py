"""
Pseudo-observations and copula coefficient estimates.

The coefficient of multi-index j is rho_j = E[L_{j1}(U_1) ... L_{jp}(U_p)],
estimated by the row mean of the tensor product over the rank transformed
sample. Sums over rows are taken in sorted order so that every estimate is
bit-identical under row permutations.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from . import legendre
from .exceptions import DimensionMismatch, DomainError, TiesPresent
from .lattice import MultiIndex, coefficient_indices
from .validators import TIES_POLICIES

logger = logging.getLogger(__name__)


def stable_mean(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Mean along axis, summed in sorted order (independent of row order)."""
    values = np.asarray(values, dtype=float)
    return np.sort(values, axis=axis).sum(axis=axis) / values.shape[axis]


def as_sample(data) -> np.ndarray:
    """Validate an n x p matrix of finite observations, n >= 2 and p >= 2."""
    sample = np.asarray(data, dtype=float)
    if sample.ndim != 2:
        raise DimensionMismatch(f"A sample must be a 2-d matrix, got shape {sample.shape}")
    n, p = sample.shape
    if n < 2 or p < 2:
        raise DimensionMismatch(f"A sample needs n >= 2 rows and p >= 2 columns, got {n} x {p}")
    if not np.all(np.isfinite(sample)):
        raise DomainError("Sample contains NaN or infinite values")
    return sample


@dataclass(frozen=True, eq=False)
class PseudoSample:
    """Rank transformed sample; column j holds rank(X_ij) / n."""

    data: np.ndarray
    has_ties: bool = False

    def __post_init__(self):
        self.data.setflags(write=False)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]


def pseudo_observations(sample, ties: str = 'error') -> PseudoSample:
    """
    Transform a sample into pseudo-observations.

    Args:
        sample: n x p matrix of observations
        ties: 'error' raises TiesPresent on duplicated values in a column,
            'average' assigns midranks and logs a warning

    Returns:
        PseudoSample: Ranks divided by n, in (0, 1]
    """
    if ties not in TIES_POLICIES:
        raise ValueError(f"Unknown ties policy {ties!r}; expected one of {TIES_POLICIES}")

    data = as_sample(sample)
    n = data.shape[0]
    tied_columns = [
        col for col in range(data.shape[1])
        if np.unique(data[:, col]).size < n
    ]

    if tied_columns and ties == 'error':
        raise TiesPresent(
            f"Columns {[col + 1 for col in tied_columns]} contain tied values; "
            f"use the 'average' ties policy for discretised data"
        )
    if tied_columns:
        logger.warning(f"Ties in columns {[col + 1 for col in tied_columns]} resolved with midranks")

    ranks = rankdata(data, method='average', axis=0)
    return PseudoSample(data=np.ascontiguousarray(ranks / n), has_ties=bool(tied_columns))


def _check_index(j: Sequence[int], p: int) -> Tuple[int, ...]:
    index = tuple(int(entry) for entry in j)
    if len(index) != p:
        raise DimensionMismatch(f"Multi-index {index} does not match dimension p={p}")
    if any(entry < 0 for entry in index):
        raise DomainError(f"Multi-index entries must be nonnegative, got {index}")
    return index


def _mean_products(ps: PseudoSample, indices: np.ndarray) -> np.ndarray:
    """Row means of prod_c L_{J[r, c]}(U[:, c]) for every row r of indices."""
    max_deg = int(indices.max()) if indices.size else 0
    basis = legendre.eval_all(max_deg, ps.data)       # (max_deg + 1, n, p)
    columns = np.arange(ps.p)
    products = basis[indices, :, columns].prod(axis=1)  # (m, n)
    return stable_mean(products, axis=-1)


def estimate_coefficient(ps: PseudoSample, j: Sequence[int]) -> float:
    """rho_hat_j = (1/n) sum_i L_{j1}(U_i1) ... L_{jp}(U_ip)."""
    index = _check_index(j, ps.p)
    return float(_mean_products(ps, np.array([index], dtype=int))[0])


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """
    Immutable map from multi-index to coefficient value.

    Keys are ordered as S(2), ..., S(d_max) when built by coefficient_table.
    """

    d_max: int
    p: int
    indices: Tuple[MultiIndex, ...]
    values: np.ndarray
    _positions: Dict[MultiIndex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise DimensionMismatch("Coefficient table keys and values differ in length")
        self.values.setflags(write=False)
        object.__setattr__(
            self, '_positions', {index: pos for pos, index in enumerate(self.indices)}
        )

    @classmethod
    def from_mapping(cls, entries: Mapping[Sequence[int], float], p: Optional[int] = None) -> 'CoefficientTable':
        """Build a table from explicit entries, e.g. {(1, 1): 0.5}."""
        indices = tuple(tuple(int(e) for e in key) for key in entries)
        if p is None:
            if not indices:
                raise DimensionMismatch("Dimension p is required for an empty table")
            p = len(indices[0])
        for index in indices:
            _check_index(index, p)
            if sum(1 for e in index if e > 0) < 2:
                raise DomainError(f"Multi-index {index} needs at least two positive entries")
        d_max = max((sum(index) for index in indices), default=2)
        values = np.array([float(entries[key]) for key in entries], dtype=float)
        return cls(d_max=d_max, p=p, indices=indices, values=values)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, j) -> bool:
        return tuple(j) in self._positions

    def __getitem__(self, j: Sequence[int]) -> float:
        return float(self.values[self._positions[tuple(j)]])

    def items(self) -> Iterable[Tuple[MultiIndex, float]]:
        return ((index, float(value)) for index, value in zip(self.indices, self.values))

    def as_dict(self) -> Dict[str, float]:
        """JSON friendly view keyed by comma-joined indices."""
        return {','.join(str(e) for e in index): value for index, value in self.items()}


def coefficient_table(ps: PseudoSample, d_max: int) -> CoefficientTable:
    """
    Estimate every coefficient of S(2), ..., S(d_max).

    Args:
        ps: Pseudo-sample
        d_max: Highest shell, at least 2

    Returns:
        CoefficientTable: Estimates in global index order
    """
    if d_max < 2:
        raise DomainError(f"d_max must be at least 2, got {d_max}")
    indices = coefficient_indices(d_max, ps.p)
    values = _mean_products(ps, np.array(indices, dtype=int))
    return CoefficientTable(d_max=d_max, p=ps.p, indices=indices, values=values)


def spearman_rho(ps: PseudoSample) -> float:
    """
    Spearman's rho, (3/n) sum_i (2 U_i1 - 1)(2 U_i2 - 1).

    This is exactly the (1, 1) copula coefficient, so it is computed as one.
    """
    if ps.p != 2:
        raise DimensionMismatch(f"Spearman's rho needs a bivariate sample, got p={ps.p}")
    return estimate_coefficient(ps, (1, 1))


def _unit_point(u, p: int) -> np.ndarray:
    point = np.asarray(u, dtype=float)
    if point.shape != (p,):
        raise DimensionMismatch(f"Point {u!r} does not match dimension p={p}")
    if not np.all((point >= 0.0) & (point <= 1.0)):
        raise DomainError(f"Point {u!r} outside the unit cube")
    return point


def density_series(table: CoefficientTable, u) -> float:
    """
    Truncated density 1 + sum_j rho_j prod_i L_{j_i}(u_i); may be negative.

    The polynomials are finite on the closed cube, so boundary points are accepted.
    """
    point = _unit_point(u, table.p)
    if not len(table):
        return 1.0
    indices = np.array(table.indices, dtype=int)
    basis = legendre.eval_all(int(indices.max()), point)   # (deg + 1, p)
    products = basis[indices, np.arange(table.p)].prod(axis=1)
    return float(1.0 + np.dot(table.values, products))


def copula_series(table: CoefficientTable, u) -> float:
    """Truncated copula prod_i u_i + sum_j rho_j prod_i I_{j_i}(u_i)."""
    point = _unit_point(u, table.p)
    base = float(np.prod(point))
    if not len(table):
        return base
    indices = np.array(table.indices, dtype=int)
    max_deg = int(indices.max())
    integrals = np.array([legendre.antiderivative(n, point) for n in range(max_deg + 1)])
    products = integrals[indices, np.arange(table.p)].prod(axis=1)
    return float(base + np.dot(table.values, products))

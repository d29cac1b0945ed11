"""
Orthonormal shifted Legendre polynomials on [0, 1].

L_0 = 1, L_1(x) = sqrt(3) (2x - 1) and, for n >= 1,

    (n + 1) L_{n+1}(x) = sqrt((2n + 1)(2n + 3)) (2x - 1) L_n(x)
                         - n sqrt(2n + 3) / sqrt(2n - 1) L_{n-1}(x)

so that int_0^1 L_j L_k = delta_jk. Every function accepts scalars or numpy
arrays of abscissae and evaluates the whole batch in one pass.
"""
import math
from typing import Sequence, Union

import numpy as np

from .exceptions import DimensionMismatch, DomainError

ArrayLike = Union[float, Sequence[float], np.ndarray]

SQRT3 = math.sqrt(3.0)


def _as_unit_points(u: ArrayLike) -> np.ndarray:
    points = np.asarray(u, dtype=float)
    if np.any(np.isnan(points)) or np.any((points < 0.0) | (points > 1.0)):
        raise DomainError(f"Legendre abscissae must lie in [0, 1], got {u!r}")
    return points


def _check_degree(n: int) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"Polynomial degree must be a nonnegative integer, got {n!r}")


def eval_all(max_deg: int, u: ArrayLike) -> np.ndarray:
    """
    Evaluate L_0, ..., L_max_deg at u by forward recurrence.

    Args:
        max_deg: Highest degree to evaluate
        u: Abscissa or array of abscissae in [0, 1]

    Returns:
        np.ndarray: Array of shape (max_deg + 1,) + shape(u); row n holds L_n(u)
    """
    _check_degree(max_deg)
    x = _as_unit_points(u)

    values = np.empty((int(max_deg) + 1,) + x.shape, dtype=float)
    values[0] = 1.0
    if max_deg == 0:
        return values

    t = 2.0 * x - 1.0
    values[1] = SQRT3 * t
    for n in range(1, int(max_deg)):
        a = math.sqrt((2 * n + 1) * (2 * n + 3))
        b = n * math.sqrt(2 * n + 3) / math.sqrt(2 * n - 1)
        values[n + 1] = (a * t * values[n] - b * values[n - 1]) / (n + 1)
    return values


def evaluate(n: int, u: ArrayLike) -> Union[float, np.ndarray]:
    """Return L_n(u); identical to eval_all(n, u)[n]."""
    result = eval_all(n, u)[n]
    return float(result) if result.ndim == 0 else result


def antiderivative(n: int, u: ArrayLike) -> Union[float, np.ndarray]:
    """
    Return I_n(u) = int_0^u L_n(x) dx.

    For n >= 1 the closed form

        I_n(u) = (L_{n+1}(u) / sqrt(2n + 3) - L_{n-1}(u) / sqrt(2n - 1)) / (2 sqrt(2n + 1))

    follows from the derivative identity of the unshifted Legendre polynomials,
    so I_n(0) = I_n(1) = 0.
    """
    _check_degree(n)
    x = _as_unit_points(u)
    if n == 0:
        result = x.astype(float)
    else:
        values = eval_all(n + 1, x)
        result = (
            values[n + 1] / math.sqrt(2 * n + 3) - values[n - 1] / math.sqrt(2 * n - 1)
        ) / (2.0 * math.sqrt(2 * n + 1))
    return float(result) if np.ndim(result) == 0 else result


def tensor_product(j: Sequence[int], u: ArrayLike) -> Union[float, np.ndarray]:
    """
    Return prod_i L_{j_i}(u_i).

    Args:
        j: Multi-index of length p
        u: Point of length p, or an (n, p) array of points

    Returns:
        float or np.ndarray: One product per point
    """
    points = _as_unit_points(u)
    if points.shape[-1:] != (len(j),):
        raise DimensionMismatch(
            f"Multi-index of dimension {len(j)} cannot be paired with points of shape {points.shape}"
        )

    product = np.ones(points.shape[:-1], dtype=float)
    for coord, degree in enumerate(j):
        if degree:
            product = product * eval_all(degree, points[..., coord])[degree]
    return float(product) if product.ndim == 0 else product

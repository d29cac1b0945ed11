"""
Multi-index shells and population pair ranks.

A shell S(d) holds every p-vector of nonnegative integers with sum d and at
least two positive entries. Shells are ordered by first coordinate descending,
then second descending and so on, which runs from (d-1, 1, 0, ..., 0) down to
(0, ..., 0, 1, d-1). The global coefficient order is S(2), S(3), ... and the
cumulative set H(k) is its first k members.
"""
from functools import lru_cache
from math import comb
from typing import Iterator, List, Tuple


MultiIndex = Tuple[int, ...]


def _compositions(total: int, parts: int) -> Iterator[MultiIndex]:
    """Weak compositions of total into parts, first entry descending."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _check_shell_args(d: int, p: int) -> None:
    if d < 2 or p < 2:
        raise ValueError(f"Shells are defined for d >= 2 and p >= 2, got d={d}, p={p}")


@lru_cache(maxsize=None)
def enumerate_shell(d: int, p: int) -> Tuple[MultiIndex, ...]:
    """Return S(d) in dimension p, in the fixed shell order."""
    _check_shell_args(d, p)
    return tuple(
        j for j in _compositions(d, p)
        if sum(1 for entry in j if entry > 0) >= 2
    )


def shell_cardinality(d: int, p: int) -> int:
    """c(d) = C(d + p - 1, p - 1) - p."""
    _check_shell_args(d, p)
    return comb(d + p - 1, p - 1) - p


@lru_cache(maxsize=None)
def coefficient_indices(d_max: int, p: int) -> Tuple[MultiIndex, ...]:
    """Concatenation S(2), ..., S(d_max): the keys of a coefficient table."""
    if d_max < 2:
        raise ValueError(f"d_max must be at least 2, got {d_max}")
    indices: List[MultiIndex] = []
    for d in range(2, d_max + 1):
        indices.extend(enumerate_shell(d, p))
    return tuple(indices)


def cumulative_set(k: int, p: int) -> Tuple[MultiIndex, ...]:
    """
    Return H(k), the first k multi-indices of the global order.

    Args:
        k: Number of indices, k >= 1
        p: Dimension

    Returns:
        tuple: k multi-indices, prefix of cumulative_set(k + 1, p)
    """
    if k < 1:
        raise ValueError(f"Cumulative set size must be positive, got {k}")
    # Shells are nonempty for d >= 2, so d = k + 1 always suffices
    d_max = 2
    while len(coefficient_indices(d_max, p)) < k:
        d_max += 1
    return coefficient_indices(d_max, p)[:k]


def pair_count(K: int) -> int:
    """v(K) = K (K - 1) / 2."""
    return K * (K - 1) // 2


def pair_rank(ell: int, m: int, K: int) -> int:
    """
    Rank of the population pair (ell, m) in row-major upper-triangle order.

    rank = K (ell - 1) - ell (ell + 1) / 2 + m, with 1 <= ell < m <= K.
    """
    if not 1 <= ell < m <= K:
        raise ValueError(f"Pair ({ell}, {m}) must satisfy 1 <= ell < m <= {K}")
    return K * (ell - 1) - ell * (ell + 1) // 2 + m


@lru_cache(maxsize=None)
def ranked_pairs(K: int) -> Tuple[Tuple[int, int], ...]:
    """All pairs (ell, m) of populations 1..K in pair-rank order."""
    return tuple((ell, m) for ell in range(1, K + 1) for m in range(ell + 1, K + 1))


def pair_unrank(k: int, K: int) -> Tuple[int, int]:
    """Inverse of pair_rank."""
    pairs = ranked_pairs(K)
    if not 1 <= k <= len(pairs):
        raise ValueError(f"Pair rank {k} out of range 1..{len(pairs)} for K={K}")
    return pairs[k - 1]

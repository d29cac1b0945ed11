from itertools import product

from django.test import SimpleTestCase

from copulas.lattice import (
    coefficient_indices,
    cumulative_set,
    enumerate_shell,
    pair_count,
    pair_rank,
    pair_unrank,
    ranked_pairs,
    shell_cardinality,
)


class ShellTestCase(SimpleTestCase):
    """Test cases for the multi-index shells S(d)."""

    def test_bivariate_shells(self):
        """S(2) = {(1,1)} and S(3) = {(2,1), (1,2)} for p = 2."""
        self.assertEqual(enumerate_shell(2, 2), ((1, 1),))
        self.assertEqual(enumerate_shell(3, 2), ((2, 1), (1, 2)))

    def test_trivariate_order(self):
        """First coordinate descending, then the next."""
        self.assertEqual(enumerate_shell(2, 3), ((1, 1, 0), (1, 0, 1), (0, 1, 1)))

    def test_ladder_endpoints(self):
        """Shells run from (d-1, 1, 0, ...) to (0, ..., 1, d-1)."""
        shell = enumerate_shell(4, 4)
        self.assertEqual(shell[0], (3, 1, 0, 0))
        self.assertEqual(shell[-1], (0, 0, 1, 3))

    def test_cardinality_examples(self):
        """Test shell sizes for small cases."""
        self.assertEqual(shell_cardinality(2, 2), 1)
        self.assertEqual(shell_cardinality(3, 2), 2)
        self.assertEqual(shell_cardinality(2, 3), 3)

    def test_cardinality_matches_enumeration(self):
        """c(d) equals the brute-force size of S(d)."""
        for d in range(2, 9):
            for p in range(2, 7):
                brute = [
                    j for j in product(range(d + 1), repeat=p)
                    if sum(j) == d and sum(1 for entry in j if entry) >= 2
                ]
                self.assertEqual(shell_cardinality(d, p), len(brute))
                self.assertEqual(sorted(enumerate_shell(d, p)), sorted(brute))

    def test_union_covers_every_index(self):
        """Shells up to D are disjoint and hold every index with 2 <= |j| <= D."""
        D, p = 5, 3
        indices = coefficient_indices(D, p)
        self.assertEqual(len(indices), len(set(indices)))
        expected = {
            j for j in product(range(D + 1), repeat=p)
            if 2 <= sum(j) <= D and sum(1 for entry in j if entry) >= 2
        }
        self.assertEqual(set(indices), expected)

    def test_invalid_arguments(self):
        """Test shell enumeration rejects bad arguments."""
        with self.assertRaises(ValueError):
            enumerate_shell(1, 2)
        with self.assertRaises(ValueError):
            shell_cardinality(2, 1)


class CumulativeSetTestCase(SimpleTestCase):

    def test_examples(self):
        """H(1), H(3) for p = 2 and H(4) for p = 3."""
        self.assertEqual(cumulative_set(1, 2), ((1, 1),))
        self.assertEqual(cumulative_set(3, 2), ((1, 1), (2, 1), (1, 2)))
        self.assertEqual(cumulative_set(4, 3), ((1, 1, 0), (1, 0, 1), (0, 1, 1), (2, 1, 0)))

    def test_prefix_property(self):
        """H(k) is a prefix of H(k + 1)."""
        for p in (2, 3, 4):
            for k in range(1, 25):
                self.assertEqual(cumulative_set(k + 1, p)[:k], cumulative_set(k, p))

    def test_norm_bound(self):
        """Members of H(k) have |j| <= k for k >= 2."""
        for p in (2, 3):
            for k in range(2, 20):
                self.assertTrue(all(sum(j) <= k for j in cumulative_set(k, p)))

    def test_rejects_empty_set(self):
        """Test the cumulative set needs a positive bound."""
        with self.assertRaises(ValueError):
            cumulative_set(0, 2)


class PairRankTestCase(SimpleTestCase):
    """Test cases for the population pair ranking."""

    def test_examples(self):
        """Test pair ranks for small K."""
        self.assertEqual(pair_rank(1, 2, 7), 1)
        self.assertEqual(pair_rank(1, 3, 7), 2)
        self.assertEqual(pair_rank(6, 7, 7), pair_count(7))

    def test_unrank_examples(self):
        """Test unranking back to pairs."""
        self.assertEqual(pair_unrank(1, 5), (1, 2))
        self.assertEqual(pair_unrank(5, 4), (2, 4))
        self.assertEqual(pair_unrank(6, 4), (3, 4))

    def test_bijection(self):
        """Ranks follow row-major upper-triangle order for K up to 12."""
        for K in range(2, 13):
            pairs = ranked_pairs(K)
            self.assertEqual(len(pairs), pair_count(K))
            for k, (ell, m) in enumerate(pairs, start=1):
                self.assertEqual(pair_rank(ell, m, K), k)
                self.assertEqual(pair_unrank(k, K), (ell, m))

    def test_order_violation(self):
        """Test pairs must be strictly increasing."""
        with self.assertRaises(ValueError):
            pair_rank(2, 2, 3)
        with self.assertRaises(ValueError):
            pair_rank(3, 2, 3)
        with self.assertRaises(ValueError):
            pair_unrank(7, 4)

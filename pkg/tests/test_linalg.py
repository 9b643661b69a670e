"""SVD helpers, rank-limited pseudoinverse, Toeplitz builder, root finding.

Oracles: numpy's pinv/roots and direct reconstruction identities.
"""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from polyident.exceptions import InvalidInputError, RankDeficiencyError
from polyident.linalg import (
    companion_roots,
    rank_m_pseudoinverse,
    rank_tolerance,
    svd,
    toeplitz_hermitian,
)


def random_matrix(seed: int, m: int, n: int, complex_: bool = False):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    if complex_:
        A = A + 1j * rng.standard_normal((m, n))
    return A


# ── svd wrapper ──────────────────────────────────────────────────────

class TestSvd:
    @pytest.mark.parametrize("m,n,cx", [(5, 3, False), (3, 6, True), (4, 4, True)])
    def test_factors_reconstruct_matrix(self, m, n, cx):
        A = random_matrix(1, m, n, cx)
        f = svd(A)
        R = (f.U * f.singular_values) @ f.V.conj().T
        np.testing.assert_allclose(R, A, atol=1e-12)

    def test_singular_values_sorted_nonnegative(self):
        f = svd(random_matrix(2, 6, 4))
        s = f.singular_values
        assert np.all(s >= 0)
        assert np.all(np.diff(s) <= 0)

    def test_truncate_keeps_leading_subspace(self):
        A = random_matrix(3, 6, 5)
        f = svd(A)
        g = f.truncate(2)
        assert g.singular_values.shape == (2,)
        np.testing.assert_allclose(g.singular_values, f.singular_values[:2])
        np.testing.assert_allclose(g.U, f.U[:, :2])
        np.testing.assert_allclose(g.V, f.V[:, :2])


# ── rank-limited pseudoinverse ───────────────────────────────────────

class TestRankMPseudoinverse:
    @pytest.mark.parametrize("seed,m,n,cx", [
        (0, 5, 3, False), (1, 3, 5, False), (2, 6, 6, True),
    ])
    def test_full_rank_matches_numpy_pinv(self, seed, m, n, cx):
        A = random_matrix(seed, m, n, cx)
        P = rank_m_pseudoinverse(A, min(m, n))
        np.testing.assert_allclose(P, np.linalg.pinv(A), atol=1e-10)

    def test_truncation_matches_explicit_construction(self):
        A = random_matrix(4, 7, 5)
        f = svd(A)
        rank = 3
        expected = f.V[:, :rank] @ np.diag(1.0 / f.singular_values[:rank]) \
            @ f.U[:, :rank].conj().T
        np.testing.assert_allclose(rank_m_pseudoinverse(A, rank), expected,
                                   atol=1e-12)

    def test_low_rank_pinv_solves_projected_system(self):
        # x = A^+_r b minimizes |Ax - b| within the leading r-subspace
        A = random_matrix(5, 6, 4)
        b = random_matrix(6, 6, 1)[:, 0]
        x = rank_m_pseudoinverse(A, 4) @ b
        residual = A.T @ (A @ x - b)
        np.testing.assert_allclose(residual, 0.0, atol=1e-10)

    def test_rejects_rank_above_numerical_rank(self):
        A = np.outer(np.arange(1.0, 5.0), np.arange(1.0, 4.0))  # rank 1
        with pytest.raises(RankDeficiencyError):
            rank_m_pseudoinverse(A, 2)

    def test_rejects_nonpositive_rank(self):
        with pytest.raises(InvalidInputError):
            rank_m_pseudoinverse(np.eye(3), 0)

    def test_rejects_rank_above_dimensions(self):
        with pytest.raises(InvalidInputError):
            rank_m_pseudoinverse(np.eye(3), 4)


class TestRankTolerance:
    def test_scales_linearly_with_leading_value(self):
        A = np.eye(4)
        assert rank_tolerance(A, 10.0) == pytest.approx(
            10.0 * rank_tolerance(A, 1.0))

    def test_grows_with_matrix_size(self):
        assert rank_tolerance(np.eye(50), 1.0) > rank_tolerance(np.eye(2), 1.0)


# ── Hermitian Toeplitz builder ───────────────────────────────────────

class TestToeplitzHermitian:
    def test_structure(self):
        r = np.array([2.0, 1.0 + 0.5j, 0.25j])
        T = toeplitz_hermitian(r, 3)
        assert T.shape == (3, 3)
        np.testing.assert_allclose(T, T.conj().T)
        # constant diagonals carrying the lag sequence
        for k in range(3):
            np.testing.assert_allclose(np.diag(T, -k), r[k])

    def test_real_input_gives_symmetric_real_matrix(self):
        T = toeplitz_hermitian(np.array([3.0, 1.0, 0.5, 0.1]), 4)
        np.testing.assert_allclose(T, T.T)
        assert np.isrealobj(T) or np.allclose(T.imag, 0.0)

    def test_rejects_size_beyond_available_lags(self):
        with pytest.raises(InvalidInputError):
            toeplitz_hermitian(np.array([1.0, 0.5]), 3)


# ── companion-matrix root finding ────────────────────────────────────

def assert_roots_match(got, want, rtol, atol):
    """Greedy nearest-neighbor match; sorting is unstable for ties."""
    got = list(got)
    assert len(got) == len(want)
    for w in want:
        i = int(np.argmin([abs(g - w) for g in got]))
        g = got.pop(i)
        assert abs(g - w) <= atol + rtol * abs(w)


class TestCompanionRoots:
    def test_single_coefficient(self):
        # z + a1 = 0
        r = companion_roots(np.array([-0.9]))
        assert r.shape == (1,)
        assert r[0] == pytest.approx(0.9)

    @given(st.lists(st.complex_numbers(max_magnitude=2.0, min_magnitude=0.05),
                    min_size=1, max_size=6))
    @settings(max_examples=60, deadline=None)
    def test_recovers_known_roots(self, roots):
        roots = np.asarray(roots)
        # clustered roots are arbitrarily ill-conditioned; require separation
        if len(roots) > 1:
            gaps = [abs(a - b) for i, a in enumerate(roots)
                    for b in roots[i + 1:]]
            assume(min(gaps) > 0.2)
        # poly() gives [1, a1, ..., aJ]; the solver takes the tail
        coeffs = np.poly(roots)[1:]
        assert_roots_match(companion_roots(coeffs), roots,
                           rtol=1e-5, atol=1e-7)

    def test_matches_numpy_roots(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a = rng.standard_normal(5) + 1j * rng.standard_normal(5)
            want = np.roots(np.concatenate(([1.0], a)))
            assert_roots_match(companion_roots(a), want,
                               rtol=1e-8, atol=1e-10)

    def test_trailing_zero_coefficients_deflate_to_exact_zeros(self):
        # z^4 - z^3 = z^3 (z - 1): three exact zero roots
        r = companion_roots(np.array([-1.0, 0.0, 0.0, 0.0]))
        assert np.count_nonzero(r == 0.0) == 3
        nonzero = r[r != 0.0]
        assert nonzero.shape == (1,)
        assert nonzero[0] == pytest.approx(1.0)

    def test_rejects_empty_coefficients(self):
        with pytest.raises(InvalidInputError):
            companion_roots(np.array([]))

"""Thin, validated wrappers around the dense linear algebra this package
relies on: SVD, rank-truncated pseudoinverse, companion-matrix polynomial
roots, and Hermitian Toeplitz assembly.

All heavy lifting is delegated to numpy and scipy; these wrappers pin the
conventions (singular values descending, V holding right vectors as
columns) and turn silent near-rank-deficiency into explicit errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import InvalidInputError, RankDeficiencyError

#: Multiplier on the machine-precision rank threshold; singular values below
#: max(m, n) * eps * sigma_1 * RANK_TOL_FACTOR are treated as numerically zero.
RANK_TOL_FACTOR = 1e3


@dataclass(frozen=True)
class SvdFactors:
    """SVD of a matrix A = U diag(singular_values) V^H.

    ``U`` and ``V`` store left and right singular vectors as columns;
    singular values are nonnegative and descending.
    """

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def truncate(self, rank: int) -> "SvdFactors":
        """Keep the leading ``rank`` singular triplets."""
        return SvdFactors(
            U=self.U[:, :rank],
            singular_values=self.singular_values[:rank],
            V=self.V[:, :rank],
        )


def _check_matrix(A: np.ndarray, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A)
    if A.ndim != 2 or A.size == 0:
        raise InvalidInputError(f"{name} must be a nonempty 2-D array")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} must be finite")
    return A


def svd(A: np.ndarray) -> SvdFactors:
    """Reduced SVD with the package's conventions.

    Returns
    -------
    SvdFactors
        Satisfies A = U @ diag(s) @ V.conj().T to machine precision.
    """
    A = _check_matrix(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return SvdFactors(U=U, singular_values=s, V=Vh.conj().T)


def rank_tolerance(A: np.ndarray, s0: float) -> float:
    """Threshold under which a singular value counts as numerically zero."""
    return max(A.shape) * np.finfo(float).eps * s0 * RANK_TOL_FACTOR


def rank_m_pseudoinverse(A: np.ndarray, rank: int) -> np.ndarray:
    """Moore-Penrose pseudoinverse truncated to the leading ``rank`` triplets.

    Parameters
    ----------
    A : array_like, shape (m, n)
    rank : int
        Number of singular triplets to keep, 1 <= rank <= min(m, n).

    Returns
    -------
    ndarray, shape (n, m)
        V_M diag(1/sigma_1..1/sigma_M) U_M^H.

    Raises
    ------
    RankDeficiencyError
        If sigma_rank falls below the numerical-zero threshold, naming the
        offending index.
    """
    A = _check_matrix(A)
    if not (1 <= rank <= min(A.shape)):
        raise InvalidInputError(
            f"rank must be in [1, {min(A.shape)}], got {rank}"
        )
    f = svd(A)
    s = f.singular_values
    tol = rank_tolerance(A, float(s[0])) if s[0] > 0 else 0.0
    if s[0] == 0.0 or s[rank - 1] <= tol:
        raise RankDeficiencyError(
            f"singular value {rank} ({s[rank - 1]:.3e}) is numerically zero "
            f"(threshold {tol:.3e}); matrix rank is below {rank}"
        )
    t = f.truncate(rank)
    return (t.V / t.singular_values) @ t.U.conj().T


def companion_roots(coefficients: np.ndarray) -> np.ndarray:
    """Roots of the monic polynomial z^J + a_1 z^(J-1) + ... + a_J.

    ``coefficients`` lists [a_1, ..., a_J].  Exact zero trailing
    coefficients are deflated first, so each contributes an exact zero
    root rather than eigenvalue noise.

    Returns
    -------
    ndarray of complex, length J (unordered).
    """
    a = np.atleast_1d(np.asarray(coefficients))
    if a.ndim != 1 or a.size == 0:
        raise InvalidInputError("coefficients must be a nonempty 1-D array")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("coefficients must be finite")
    a = a.astype(complex)
    n_zero = 0
    while n_zero < a.size and a[a.size - 1 - n_zero] == 0.0:
        n_zero += 1
    a = a[: a.size - n_zero]
    if a.size == 0:
        return np.zeros(n_zero, dtype=complex)
    deg = a.size
    C = np.zeros((deg, deg), dtype=complex)
    C[0, :] = -a
    if deg > 1:
        C[1:, :-1] = np.eye(deg - 1)
    roots = np.linalg.eigvals(C)
    return np.concatenate([roots, np.zeros(n_zero, dtype=complex)])


def toeplitz_hermitian(first_row: np.ndarray, size: int) -> np.ndarray:
    """Hermitian Toeplitz matrix from autocorrelation values.

    ``first_row`` holds [r_0, r_1, ..., r_k] with r_0 real; entry (i, j)
    of the result is r_{i-j} with r_{-m} = conj(r_m).

    Parameters
    ----------
    first_row : array_like
        At least ``size`` autocorrelation values.
    size : int
        Matrix dimension.
    """
    r = np.atleast_1d(np.asarray(first_row))
    if r.ndim != 1 or r.size == 0:
        raise InvalidInputError("first_row must be a nonempty 1-D array")
    if not np.all(np.isfinite(r)):
        raise InvalidInputError("first_row must be finite")
    if not (1 <= size <= r.size):
        raise InvalidInputError(
            f"size must be in [1, {r.size}], got {size}"
        )
    r0 = complex(r[0])
    if abs(r0.imag) > 1e-12 * max(abs(r0), 1.0):
        raise InvalidInputError("lag-0 autocorrelation must be real")
    head = r[:size]
    # Column = r_{i}, row = conj(r_{j}) puts r_{i-j} at (i, j).
    return scipy.linalg.toeplitz(head, head.conj())

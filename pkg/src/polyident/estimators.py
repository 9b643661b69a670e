"""Pole estimation on uniform grids by SVD-based linear prediction.

Three estimators share the same output contract:

- ``estimate_pt_mle``: backward linear prediction solved through the
  rank-truncated pseudoinverse of the error-whitened normal matrix
  Y^H R_ee^{-1} Y.  With the error autocorrelation of a polynomial
  reconstruction as R_ee, this is the approximate maximum-likelihood
  estimator for reconstructed nonuniform data; with identity weighting it
  reduces to classical SVD linear prediction.
- ``estimate_alm``: linear prediction on an autocorrelation-like lag
  matrix built from the data, rank-truncated.
- ``estimate_mp``: the matrix pencil of two shifted lag matrices; the
  signal poles are eigenvalues of the reduced M x M pencil, so no root
  separation step is needed.

Prediction coefficient vectors of length J > M carry J - M extraneous
roots; ``separate_signal_poles`` ranks all roots by their fitted energy
and keeps the top M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .exceptions import (
    DegeneracyError,
    EstimationError,
    InvalidInputError,
    WeightingError,
)
from .linalg import (
    companion_roots,
    rank_m_pseudoinverse,
    rank_tolerance,
    svd,
    toeplitz_hermitian,
)
from .orthopoly import ReconstructionResult, reconstruct_auto
from .signals import NoiseModel, Pole, SampleSet, z_to_s

#: Condition number beyond which the weighting matrix gets a ridge.
WEIGHT_CONDITION_LIMIT = 1e12

#: Ridge size relative to the lag-0 error autocorrelation.
WEIGHT_RIDGE = 1e-10

#: Roots closer than this are treated as coincident (degenerate fit).
COINCIDENT_ROOT_TOL = 1e-10

#: Vandermonde condition limit for amplitude fitting.
RESIDUE_CONDITION_LIMIT = 1e12

GridLike = Union[ReconstructionResult, SampleSet]


@dataclass
class EstimateResult:
    """Estimated modal model from one method on one record.

    Attributes
    ----------
    method : str
        "pt-mle", "alm", or "mp".
    coefficients : ndarray
        Monic characteristic polynomial coefficients [a_1 .. a_J] whose
        roots contain the pole estimates.
    z_poles : ndarray of complex
        The M retained discrete-time poles, sorted by ascending frequency
        then damping.
    s_poles : list of Pole
        Continuous-time equivalents of ``z_poles``, same order.
    amplitudes : ndarray of complex
        Mode amplitudes fitted at the retained poles, same order.
    diagnostics : dict
        Singular values, discarded roots, conditioning and similar
        method-specific details.
    """

    method: str
    coefficients: np.ndarray
    z_poles: np.ndarray
    s_poles: List[Pole]
    amplitudes: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def positive_poles(self) -> List[Tuple[Pole, complex]]:
        """(pole, amplitude) pairs restricted to f >= 0 representatives.

        For real data the pole set is closed under conjugation; this
        returns one member per pair, in ascending (f, alpha) order.
        """
        return [
            (p, a) for p, a in zip(self.s_poles, self.amplitudes)
            if p.f >= 0.0
        ]


def _extract_uniform(grid: GridLike, what: str) -> Tuple[np.ndarray, float]:
    """Pull (values, step) out of a reconstruction or uniform sample set."""
    if isinstance(grid, ReconstructionResult):
        return np.asarray(grid.grid_values), float(grid.grid_step)
    if isinstance(grid, SampleSet):
        if grid.uniform_step is None:
            raise InvalidInputError(
                f"{what} requires uniform samples; this SampleSet has no "
                "uniform step (reconstruct onto a grid first)"
            )
        return np.asarray(grid.values), float(grid.uniform_step)
    raise InvalidInputError(
        f"{what} takes a ReconstructionResult or a uniform SampleSet"
    )


def _lagged_matrix(y: np.ndarray, J: int) -> np.ndarray:
    """Backward-prediction data matrix, shape (L - J, J).

    Row i predicts y[J + i] from the J preceding samples:
    entry (i, j) = y[J - 1 + i - j].
    """
    L = y.size
    return np.column_stack([y[J - 1 - j:L - 1 - j] for j in range(J)])


def _shifted_matrix(y: np.ndarray, J: int) -> np.ndarray:
    """The lag matrix advanced by one sample: entry (i, j) = y[J + i - j]."""
    L = y.size
    return np.column_stack([y[J - j:L - j] for j in range(J)])


def _sort_key(z: complex, step: float) -> Tuple[float, float]:
    s = z_to_s(z, step)
    return (s.imag, -s.real)  # (angular frequency, damping)


def _order_poles(z: np.ndarray, step: float) -> np.ndarray:
    keys = [_sort_key(complex(v), step) for v in z]
    return np.array(sorted(range(len(keys)), key=lambda i: keys[i]), dtype=int)


def fit_residues(
    z_poles: np.ndarray,
    grid_values: np.ndarray,
    step: float,
) -> np.ndarray:
    """Least-squares mode amplitudes for given discrete-time poles.

    Solves min over beta of || y - V beta || with V[k, i] = z_i^k.
    Amplitudes refer to t = 0, the first grid instant.

    Raises
    ------
    DegeneracyError
        If poles coincide or the Vandermonde system is too ill
        conditioned to invert meaningfully.
    """
    z = np.atleast_1d(np.asarray(z_poles, dtype=complex))
    y = np.asarray(grid_values)
    if z.size == 0:
        raise InvalidInputError("need at least one pole")
    if y.ndim != 1 or y.size < z.size:
        raise InvalidInputError("need at least as many samples as poles")
    _check_distinct(z)
    k = np.arange(y.size)
    V = z[np.newaxis, :] ** k[:, np.newaxis]
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > RESIDUE_CONDITION_LIMIT:
        raise DegeneracyError(
            f"Vandermonde condition {cond:.3e} exceeds "
            f"{RESIDUE_CONDITION_LIMIT:.0e}; amplitudes are not identifiable"
        )
    beta, *_ = np.linalg.lstsq(V, y.astype(complex), rcond=None)
    return beta


def _check_distinct(z: np.ndarray) -> None:
    for i in range(z.size):
        for j in range(i + 1, z.size):
            if abs(z[i] - z[j]) < COINCIDENT_ROOT_TOL:
                raise DegeneracyError(
                    f"poles {i} and {j} coincide within "
                    f"{COINCIDENT_ROOT_TOL:.0e}"
                )


def separate_signal_poles(
    roots: np.ndarray,
    grid_values: np.ndarray,
    step: float,
    n_signal: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Split prediction-polynomial roots into signal and extraneous sets.

    All roots get amplitudes from one joint least-squares fit to the
    data; each root is scored by the energy of its fitted component,
    |beta_i| * sum_k |z_i|^(2k), and the top ``n_signal`` scores win.

    Returns
    -------
    (signal, discarded)
        Signal roots sorted by ascending frequency then damping;
        discarded roots sorted by descending score.
    """
    z = np.atleast_1d(np.asarray(roots, dtype=complex))
    y = np.asarray(grid_values)
    if not (1 <= n_signal <= z.size):
        raise InvalidInputError(
            f"n_signal must be in [1, {z.size}], got {n_signal}"
        )
    _check_distinct(z)
    k = np.arange(y.size)
    V = z[np.newaxis, :] ** k[:, np.newaxis]
    beta, *_ = np.linalg.lstsq(V, y.astype(complex), rcond=None)
    energy = np.sum(np.abs(V) ** 2, axis=0)
    score = np.abs(beta) * energy
    # Deterministic order: score descending, then real part, then imag.
    order = sorted(
        range(z.size),
        key=lambda i: (-score[i], z[i].real, z[i].imag),
    )
    keep = np.array(order[:n_signal], dtype=int)
    drop = np.array(order[n_signal:], dtype=int)
    signal = z[keep]
    signal = signal[_order_poles(signal, step)]
    return signal, z[drop]


def correct_singular_values(
    singular_values: Sequence[float],
    noise_power: float,
    rows: int,
) -> np.ndarray:
    """Debias singular values inflated by additive noise.

    Each value is shrunk in the squared domain,
    sigma' = sqrt(max(sigma^2 - rows * noise_power, sigma^2 * 1e-6)),
    which subtracts the expected noise contribution while keeping the
    result positive.  Intended for the principal (signal) values only.
    """
    s = np.atleast_1d(np.asarray(singular_values, dtype=float))
    if np.any(s < 0.0) or not np.all(np.isfinite(s)):
        raise InvalidInputError("singular values must be finite and nonnegative")
    if not (math.isfinite(noise_power) and noise_power >= 0.0):
        raise InvalidInputError("noise_power must be finite and nonnegative")
    if rows < 1:
        raise InvalidInputError("rows must be positive")
    s2 = s * s
    return np.sqrt(np.maximum(s2 - rows * noise_power, s2 * 1e-6))


def _weighted_normal(
    Y: np.ndarray,
    rhs: np.ndarray,
    r_ee: Optional[np.ndarray],
) -> Tuple[np.ndarray, np.ndarray, dict]:
    """Form (Y^H R_ee^{-1} Y, Y^H R_ee^{-1} rhs) with ridge fallback."""
    diag: dict = {"weighting": "identity" if r_ee is None else "error-autocorr"}
    if r_ee is None:
        return Y.conj().T @ Y, Y.conj().T @ rhs, diag
    r = np.atleast_1d(np.asarray(r_ee))
    if r.size == 0 or not np.all(np.isfinite(r)):
        raise InvalidInputError("r_ee must be nonempty and finite")
    if not np.real(r[0]) > 0.0:
        raise InvalidInputError("r_ee[0] must be positive")
    n = Y.shape[0]
    if r.size < n:
        # Lags beyond the computed support carry no correlation.
        r = np.concatenate([r, np.zeros(n - r.size, dtype=r.dtype)])
    R = toeplitz_hermitian(r, n)
    cond = np.linalg.cond(R)
    diag["weight_condition"] = float(cond)
    ridge = WEIGHT_RIDGE * float(np.real(r[0]))
    regularized = False
    if not np.isfinite(cond) or cond > WEIGHT_CONDITION_LIMIT:
        R = R + ridge * np.eye(n)
        regularized = True
    try:
        c = scipy.linalg.cho_factor(R)
    except np.linalg.LinAlgError:
        c = None
    if c is None and not regularized:
        R = R + ridge * np.eye(n)
        regularized = True
        try:
            c = scipy.linalg.cho_factor(R)
        except np.linalg.LinAlgError:
            c = None
    if c is None:
        raise WeightingError(
            "error covariance is not positive definite even after "
            f"adding ridge {ridge:.3e}"
        )
    diag["weight_regularized"] = regularized
    WY = scipy.linalg.cho_solve(c, Y)
    Wr = scipy.linalg.cho_solve(c, rhs)
    return Y.conj().T @ WY, Y.conj().T @ Wr, diag


def _solve_rank_m(
    normal: np.ndarray,
    nrhs: np.ndarray,
    M: int,
    svd_correction: bool,
    noise_power: Optional[float],
    rows: int,
) -> Tuple[np.ndarray, dict]:
    """Rank-M pseudoinverse solve of the (Hermitian) normal equations."""
    normal = 0.5 * (normal + normal.conj().T)
    diag: dict = {}
    if svd_correction:
        if noise_power is None:
            raise InvalidInputError(
                "svd_correction requires noise_power"
            )
        f = svd(normal)
        s = f.singular_values
        tol = rank_tolerance(normal, float(s[0])) if s[0] > 0 else 0.0
        if s[0] == 0.0 or s[M - 1] <= tol:
            raise DegeneracyError(
                f"normal matrix rank is below {M}"
            )
        # Normal-matrix eigenvalues are squared data singular values.
        data_sv = np.sqrt(s[:M])
        corrected = correct_singular_values(data_sv, noise_power, rows)
        t = f.truncate(M)
        pinv = (t.V / (corrected ** 2)) @ t.U.conj().T
        diag["singular_values"] = s
        diag["corrected_singular_values"] = corrected ** 2
    else:
        f = svd(normal)
        diag["singular_values"] = f.singular_values
        pinv = rank_m_pseudoinverse(normal, M)
    return pinv @ nrhs, diag


def _finalize(
    method: str,
    coefficients: np.ndarray,
    z_signal: np.ndarray,
    y: np.ndarray,
    step: float,
    diagnostics: dict,
) -> EstimateResult:
    s_poles = [Pole.from_s(z_to_s(complex(z), step)) for z in z_signal]
    amplitudes = fit_residues(z_signal, y, step)
    return EstimateResult(
        method=method,
        coefficients=coefficients,
        z_poles=z_signal,
        s_poles=s_poles,
        amplitudes=amplitudes,
        diagnostics=diagnostics,
    )


def estimate_pt_mle(
    grid: GridLike,
    r_ee: Optional[np.ndarray] = None,
    J: int = 16,
    M: int = 4,
    svd_correction: bool = False,
    noise_power: Optional[float] = None,
) -> EstimateResult:
    """Pole estimation by error-whitened SVD linear prediction.

    Solves the backward linear prediction y[J + i] = -sum a_m y[J+i-m]
    through the rank-M pseudoinverse of Y^H R_ee^{-1} Y, where R_ee is
    the Toeplitz matrix of the reconstruction-error autocorrelation.
    Passing ``r_ee=None`` weights all residuals equally.

    Parameters
    ----------
    grid : ReconstructionResult or uniform SampleSet
        L uniformly spaced values and their step.
    r_ee : array_like, optional
        Error autocorrelation [r_0, r_1, ...]; padded with zeros when
        shorter than L - J.
    J : int
        Prediction order, M <= J <= L - J.
    M : int
        Number of poles to estimate.
    svd_correction : bool
        Debias the principal singular values (requires ``noise_power``).
    noise_power : float, optional
        Per-sample noise variance for the correction.

    Returns
    -------
    EstimateResult
    """
    y, step = _extract_uniform(grid, "estimate_pt_mle")
    L = y.size
    if not (1 <= M <= J):
        raise InvalidInputError(f"need 1 <= M <= J, got M={M}, J={J}")
    if J > L - J:
        raise InvalidInputError(
            f"prediction order J={J} exceeds L-J={L - J}; "
            "J must not exceed L - J"
        )
    Y = _lagged_matrix(y, J)
    rhs = y[J:]
    normal, nrhs, diag = _weighted_normal(Y, rhs, r_ee)
    A, solve_diag = _solve_rank_m(
        normal, nrhs, M, svd_correction, noise_power, rows=L - J
    )
    diag.update(solve_diag)
    a = -A
    roots = companion_roots(a)
    z_signal, z_drop = separate_signal_poles(roots, y, step, M)
    diag["discarded_roots"] = z_drop
    return _finalize("pt-mle", a, z_signal, y, step, diag)


def estimate_alm(
    samples: GridLike,
    J: int = 20,
    I: Optional[int] = None,
    M: int = 4,
) -> EstimateResult:
    """Pole estimation from an autocorrelation-like lag matrix.

    Builds lag-product sums of the data,

        R[i, j]  = (1/L) sum_l x[J + i - j + l] conj(x[l]),
        rv[i]    = (1/L) sum_l x[J + i + 1 + l] conj(x[l]),

    for rows i = 0 .. I-1 (each row sums the L - J - i - 1 products
    available), then solves R A = rv through the rank-M pseudoinverse.
    Averaging the lag products suppresses white noise, whose
    contribution concentrates at lag zero.

    Parameters
    ----------
    samples : uniform SampleSet or ReconstructionResult
    J : int
        Prediction order.
    I : int, optional
        Number of lag rows; defaults to J, clamped to the largest
        feasible value L - J - 1.
    M : int
        Number of poles to keep.
    """
    x, step = _extract_uniform(samples, "estimate_alm")
    L = x.size
    if not (1 <= M <= J):
        raise InvalidInputError(f"need 1 <= M <= J, got M={M}, J={J}")
    i_max = L - J - 1
    if i_max < 1:
        raise InvalidInputError(
            f"prediction order J={J} leaves no lag rows (need J <= L - 2)"
        )
    if I is None:
        I = min(J, i_max)
    if not (1 <= I <= i_max):
        raise InvalidInputError(
            f"I must be in [1, {i_max}] for L={L}, J={J}; got {I}"
        )
    xc = x.astype(complex)
    R = np.empty((I, J), dtype=complex)
    rv = np.empty(I, dtype=complex)
    for i in range(I):
        n = L - J - i - 1
        base = xc[:n].conj()
        for j in range(J):
            shift = J + i - j
            R[i, j] = np.dot(xc[shift:shift + n], base) / L
        shift = J + i + 1
        rv[i] = np.dot(xc[shift:shift + n], base) / L
    A = rank_m_pseudoinverse(R, M) @ rv
    a = -A
    roots = companion_roots(a)
    z_signal, z_drop = separate_signal_poles(roots, x, step, M)
    f = svd(R)
    diag = {
        "singular_values": f.singular_values,
        "discarded_roots": z_drop,
        "n_lag_rows": I,
    }
    return _finalize("alm", a, z_signal, x, step, diag)


def estimate_mp(
    samples: GridLike,
    J: int = 16,
    M: int = 4,
) -> EstimateResult:
    """Pole estimation by the matrix pencil of shifted lag matrices.

    With X the lag matrix and X1 its one-sample advance, the signal
    poles are generalized eigenvalues of (X1, X); after truncating X to
    rank M they are the ordinary eigenvalues of
    diag(1/sigma) U_M^H X1 V_M.  All M eigenvalues are taken as signal
    poles, so no separation step runs.
    """
    x, step = _extract_uniform(samples, "estimate_mp")
    L = x.size
    if not (1 <= M <= J):
        raise InvalidInputError(f"need 1 <= M <= J, got M={M}, J={J}")
    if L - J < max(M, 1):
        raise InvalidInputError(
            f"J={J} leaves only {L - J} rows; need at least {max(M, 1)}"
        )
    X = _lagged_matrix(x, J)
    X1 = _shifted_matrix(x, J)
    f = svd(X)
    s = f.singular_values
    tol = rank_tolerance(X, float(s[0])) if s[0] > 0 else 0.0
    if s[0] == 0.0 or s[M - 1] <= tol:
        raise DegeneracyError(
            f"data matrix rank is below M={M}; cannot form the pencil"
        )
    t = f.truncate(M)
    Z = (t.U.conj().T @ X1 @ t.V) / t.singular_values[:, np.newaxis]
    z = np.linalg.eigvals(Z)
    z = z[_order_poles(z, step)]
    # Characteristic polynomial of the retained poles.
    a = np.atleast_1d(np.poly(z))[1:]
    diag = {"singular_values": s}
    return _finalize("mp", a, z, x, step, diag)


def solve_oracle_mle(
    clean_grid: Union[GridLike, np.ndarray],
    r_ee: Optional[np.ndarray] = None,
    J: int = 16,
) -> np.ndarray:
    """Reference prediction coefficients from noise-free grid values.

    Forms the same weighted normal equations as :func:`estimate_pt_mle`
    but from the exact signal and solves with a full (rank-revealing)
    pseudoinverse.  Test and analysis aid: estimators on noisy data
    should approach these coefficients as noise vanishes.

    Returns
    -------
    ndarray
        Coefficients [a_1 .. a_J] of the characteristic polynomial.
    """
    if isinstance(clean_grid, (ReconstructionResult, SampleSet)):
        g, _ = _extract_uniform(clean_grid, "solve_oracle_mle")
    else:
        g = np.atleast_1d(np.asarray(clean_grid))
    L = g.size
    if J > L - J:
        raise InvalidInputError(
            f"prediction order J={J} exceeds L-J={L - J}"
        )
    G = _lagged_matrix(g, J)
    rhs = g[J:]
    normal, nrhs, _ = _weighted_normal(G, rhs, r_ee)
    A = np.linalg.pinv(normal) @ nrhs
    return -A


def _detect_step(times: np.ndarray) -> Optional[float]:
    gaps = np.diff(times)
    if gaps.size == 0:
        return None
    T = float(gaps.mean())
    if T > 0.0 and np.max(np.abs(gaps - T)) <= 1e-9 * T:
        return T
    return None


def _coerce_samples(
    X,
    y=None,
    step: Optional[float] = None,
) -> SampleSet:
    """Accept a SampleSet, (times, values), or plain uniform values."""
    if isinstance(X, SampleSet):
        return X
    X = np.asarray(X)
    if y is not None:
        times = X.astype(float)
        return SampleSet(
            times=times, values=np.asarray(y),
            uniform_step=_detect_step(times),
        )
    if step is None:
        raise InvalidInputError(
            "plain value arrays need a step; set the estimator's step "
            "parameter or pass (times, values)"
        )
    return SampleSet.uniform(X, step)


class _ModalEstimatorMixin:
    """Shared post-fit surface for the scikit-learn style estimators."""

    def _set_result(self, result: EstimateResult, was_real: bool) -> None:
        self.result_ = result
        self.z_poles_ = result.z_poles
        self.poles_ = result.s_poles
        self.amplitudes_ = result.amplitudes
        self.coefficients_ = result.coefficients
        self.diagnostics_ = result.diagnostics
        self._real_input = was_real

    def _check_fitted(self) -> None:
        if not hasattr(self, "result_"):
            raise NotFittedError(
                f"this {type(self).__name__} instance is not fitted yet"
            )

    def predict(self, times: np.ndarray) -> np.ndarray:
        """Evaluate the fitted modal model at arbitrary instants."""
        self._check_fitted()
        t = np.asarray(times, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for pole, amp in zip(self.poles_, self.amplitudes_):
            out += amp * np.exp(pole.s * t)
        return out.real if self._real_input else out


class PolynomialTransformMLE(_ModalEstimatorMixin, BaseEstimator):
    """Nonuniform-capable pole estimator: polynomial reconstruction onto a
    uniform grid, then error-whitened SVD linear prediction.

    Parameters
    ----------
    n_modes : int
        Number of poles M to estimate.
    extended_order : int
        Prediction order J (J >= M admits extraneous roots that absorb
        noise; they are separated out afterwards).
    grid_step : float, optional
        Reconstruction grid step; defaults to the data step for uniform
        input.
    order : int or "auto"
        Polynomial order for reconstruction.
    order_min, order_max : int
        Search range for automatic order selection; ``order_max``
        defaults to half the sample count.
    weighting : {"error-autocorr", "identity"}
        Whether to whiten by the propagated error autocorrelation.
    noise : NoiseModel
        Sample-noise autocorrelation model used by the error propagation.
    noise_power : float, optional
        Known noise variance; estimated from the residual variance at
        the selected order when omitted.
    preprocess : bool
        Reconstruct even when the input is already uniform (smooths the
        data and supplies the error model).  Nonuniform input is always
        reconstructed.
    svd_correction : bool
        Debias principal singular values using ``noise_power``.
    step : float, optional
        Step to assume when ``fit`` receives a plain value array.
    """

    def __init__(
        self,
        n_modes: int = 4,
        extended_order: int = 16,
        grid_step: Optional[float] = None,
        order: Union[int, str] = "auto",
        order_min: int = 1,
        order_max: Optional[int] = None,
        weighting: str = "error-autocorr",
        noise: NoiseModel = NoiseModel("white-gaussian"),
        noise_power: Optional[float] = None,
        preprocess: bool = True,
        svd_correction: bool = False,
        step: Optional[float] = None,
    ):
        self.n_modes = n_modes
        self.extended_order = extended_order
        self.grid_step = grid_step
        self.order = order
        self.order_min = order_min
        self.order_max = order_max
        self.weighting = weighting
        self.noise = noise
        self.noise_power = noise_power
        self.preprocess = preprocess
        self.svd_correction = svd_correction
        self.step = step

    def fit(self, X, y=None):
        if self.weighting not in ("error-autocorr", "identity"):
            raise InvalidInputError(
                f"unknown weighting {self.weighting!r}"
            )
        samples = _coerce_samples(X, y, self.step)
        was_real = not np.iscomplexobj(samples.values)
        direct = samples.uniform_step is not None and not self.preprocess
        if direct:
            grid: GridLike = samples
            if self.weighting == "error-autocorr":
                # Without reconstruction the error is the raw noise, so
                # the weight is its autocorrelation; scale cancels.
                n_lag = samples.n - self.extended_order
                r_ee = np.array([
                    self.noise.normalized_autocorr(k) for k in range(n_lag)
                ])
            else:
                r_ee = None
            self.reconstruction_ = None
            self.chosen_order_ = None
            noise_power = self.noise_power
        else:
            grid_step = self.grid_step
            if grid_step is None:
                grid_step = samples.uniform_step
            if grid_step is None:
                raise InvalidInputError(
                    "grid_step is required for nonuniform input"
                )
            order = None if self.order == "auto" else int(self.order)
            order_max = self.order_max
            if order_max is None:
                order_max = max(self.order_min, samples.n // 2)
            recon = reconstruct_auto(
                samples, grid_step,
                order=order, order_min=self.order_min, order_max=order_max,
                noise=self.noise, sigma2=self.noise_power,
            )
            grid = recon
            r_ee = (
                recon.error_autocorr
                if self.weighting == "error-autocorr" else None
            )
            self.reconstruction_ = recon
            self.chosen_order_ = recon.chosen_order
            noise_power = self.noise_power
            if noise_power is None and recon.error_autocorr is not None:
                noise_power = float(recon.error_autocorr[0])
        result = estimate_pt_mle(
            grid, r_ee,
            J=self.extended_order, M=self.n_modes,
            svd_correction=self.svd_correction,
            noise_power=noise_power,
        )
        self._set_result(result, was_real)
        return self


class AutocorrelationMethod(_ModalEstimatorMixin, BaseEstimator):
    """Pole estimator built on lag-product averages of uniform data.

    Parameters
    ----------
    n_modes : int
        Number of poles M.
    extended_order : int
        Prediction order J.
    n_lag_rows : int, optional
        Rows I of the lag matrix; defaults to J clamped to L - J - 1.
    step : float, optional
        Step to assume when ``fit`` receives a plain value array.
    """

    def __init__(
        self,
        n_modes: int = 4,
        extended_order: int = 20,
        n_lag_rows: Optional[int] = None,
        step: Optional[float] = None,
    ):
        self.n_modes = n_modes
        self.extended_order = extended_order
        self.n_lag_rows = n_lag_rows
        self.step = step

    def fit(self, X, y=None):
        samples = _coerce_samples(X, y, self.step)
        was_real = not np.iscomplexobj(samples.values)
        result = estimate_alm(
            samples,
            J=self.extended_order,
            I=self.n_lag_rows,
            M=self.n_modes,
        )
        self._set_result(result, was_real)
        return self


class MatrixPencil(_ModalEstimatorMixin, BaseEstimator):
    """Matrix-pencil pole estimator on uniform data.

    Parameters
    ----------
    n_modes : int
        Number of poles M (pencil rank).
    extended_order : int
        Pencil parameter J (columns of the lag matrices).
    step : float, optional
        Step to assume when ``fit`` receives a plain value array.
    """

    def __init__(
        self,
        n_modes: int = 4,
        extended_order: int = 16,
        step: Optional[float] = None,
    ):
        self.n_modes = n_modes
        self.extended_order = extended_order
        self.step = step

    def fit(self, X, y=None):
        samples = _coerce_samples(X, y, self.step)
        was_real = not np.iscomplexobj(samples.values)
        result = estimate_mp(
            samples, J=self.extended_order, M=self.n_modes,
        )
        self._set_result(result, was_real)
        return self

"""Discrete orthogonal polynomial bases on arbitrary sample schedules, and
the minimum-variance reconstruction built on them.

Given strictly increasing instants t_1 < ... < t_K, the three-term
recurrence

    p_j(t) = (t - a_j) p_{j-1}(t) - b_j p_{j-2}(t),    p_0 = 1, p_{-1} = 0

with

    a_j = (1 / Phi_{j-1}) sum_k t_k p_{j-1}(t_k)^2,
    b_j = Phi_{j-1} / Phi_{j-2},
    Phi_j = sum_k p_j(t_k)^2,

produces polynomials orthogonal under summation over the schedule.  A
least-squares fit in this basis needs no normal-equation solve: the
coefficient of p_j is sum_k x_k p_j(t_k) / Phi_j.  Evaluating the fitted
polynomial on a uniform grid resamples a nonuniformly sampled signal, and
the whole map from samples to grid is one matrix H.

The fit order is chosen by minimizing the residual variance
sigma_N^2 = RSS_N / (K - N) over a candidate range; past the point where
the polynomial captures the signal, adding terms removes only noise and
the criterion turns back up.

Internally the recurrence is run on unit-norm polynomials (dividing by the
residual norm at each degree) so node values stay O(1) for any schedule
scale; the unnormalized p_j and Phi_j are recovered exactly from the
stored norms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import (
    DegeneracyError,
    ExtrapolationError,
    InvalidInputError,
    RankError,
)
from .signals import NoiseModel, SampleSet

#: Residual variances below this fraction of the mean signal power count as
#: numerically zero, so exact fits tie and the smallest order wins.
ZERO_VARIANCE_FLOOR = 1e-24

#: Relative tolerance for treating two residual variances as tied.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PolyBasis:
    """Orthogonal polynomial basis p_0 .. p_{order-1} on a fixed schedule.

    Attributes
    ----------
    times : ndarray, shape (K,)
        The schedule the basis is orthogonal over.
    order : int
        Number of basis polynomials N.
    recur_a : ndarray, shape (N-1,)
        Recurrence shifts a_1 .. a_{N-1}.
    recur_b : ndarray, shape (N-1,)
        Recurrence weights b_1 .. b_{N-1}; b_1 is identically zero.
    phi : ndarray, shape (N,)
        Squared norms Phi_j = sum_k p_j(t_k)^2.
    """

    times: np.ndarray
    order: int
    recur_a: np.ndarray
    recur_b: np.ndarray
    phi: np.ndarray
    # Unit-norm node values q_j(t_k), kept for exact orthogonality downstream.
    node_q: np.ndarray = field(repr=False)

    @property
    def n_samples(self) -> int:
        return int(self.times.size)

    def node_matrix(self) -> np.ndarray:
        """Unnormalized node values [p_{j}(t_k)], shape (K, order)."""
        return evaluate_basis(self, self.times)


def build_basis(times: np.ndarray, order: int) -> PolyBasis:
    """Construct the orthogonal basis of the given order on a schedule.

    Parameters
    ----------
    times : array_like, shape (K,)
        Strictly increasing, finite instants.
    order : int
        Number of basis polynomials, 1 <= order <= K.

    Raises
    ------
    RankError
        If the schedule has repeats or fewer instants than ``order``.
    DegeneracyError
        If a basis norm vanishes or overflows numerically.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidInputError("times must be a nonempty 1-D array")
    if not np.all(np.isfinite(t)):
        raise InvalidInputError("times must be finite")
    if np.any(np.diff(t) < 0.0):
        raise InvalidInputError("times must be sorted")
    if np.any(np.diff(t) == 0.0):
        raise RankError("duplicate instants make the basis rank deficient")
    K = t.size
    if not isinstance(order, (int, np.integer)) or order < 1:
        raise InvalidInputError("order must be a positive integer")
    if order > K:
        raise RankError(
            f"order {order} exceeds the {K} distinct instants available"
        )

    Q = np.empty((K, order))
    a = np.empty(max(order - 1, 0))
    beta = np.empty(max(order - 1, 0))  # beta_j = sqrt(Phi_j / Phi_{j-1})
    q = np.full(K, 1.0 / math.sqrt(K))
    Q[:, 0] = q
    q_prev = np.zeros(K)
    beta_prev = 0.0
    for j in range(1, order):
        aj = float(np.dot(t * q, q))
        r = (t - aj) * q - beta_prev * q_prev
        bj = float(np.linalg.norm(r))
        if not (bj > 0.0 and math.isfinite(bj)):
            raise DegeneracyError(f"basis norm vanished at degree {j}")
        q_prev, q = q, r / bj
        Q[:, j] = q
        a[j - 1] = aj
        beta[j - 1] = bj
        beta_prev = bj

    phi = np.empty(order)
    phi[0] = float(K)
    for j in range(1, order):
        phi[j] = phi[j - 1] * beta[j - 1] ** 2
    if not np.all(np.isfinite(phi)) or np.any(phi <= 0.0):
        raise DegeneracyError("basis norms overflowed or vanished")

    b = np.zeros(max(order - 1, 0))
    b[1:] = beta[:-1] ** 2
    return PolyBasis(
        times=t.copy(), order=int(order), recur_a=a, recur_b=b,
        phi=phi, node_q=Q,
    )


def evaluate_basis(basis: PolyBasis, t: Union[float, np.ndarray]) -> np.ndarray:
    """Evaluate [p_0(t), ..., p_{N-1}(t)] by the three-term recurrence.

    Returns shape (N,) for scalar ``t`` and (len(t), N) for 1-D ``t``.
    """
    scalar = np.isscalar(t) or np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(tt)):
        raise InvalidInputError("evaluation instants must be finite")
    N = basis.order
    out = np.empty((tt.size, N))
    out[:, 0] = 1.0
    if N > 1:
        out[:, 1] = tt - basis.recur_a[0]
    for j in range(2, N):
        out[:, j] = (tt - basis.recur_a[j - 1]) * out[:, j - 1] \
            - basis.recur_b[j - 1] * out[:, j - 2]
    return out[0] if scalar else out


def _evaluate_unit_norm(basis: PolyBasis, t: np.ndarray) -> np.ndarray:
    """Evaluate the unit-norm polynomials q_j = p_j / sqrt(Phi_j)."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    N = basis.order
    # beta_j recovered from the stored norms: beta_j = sqrt(Phi_j/Phi_{j-1}).
    beta = np.sqrt(basis.phi[1:] / basis.phi[:-1]) if N > 1 else np.empty(0)
    out = np.empty((tt.size, N))
    out[:, 0] = 1.0 / math.sqrt(basis.phi[0])
    if N > 1:
        out[:, 1] = (tt - basis.recur_a[0]) * out[:, 0] / beta[0]
    for j in range(2, N):
        out[:, j] = ((tt - basis.recur_a[j - 1]) * out[:, j - 1]
                     - beta[j - 2] * out[:, j - 2]) / beta[j - 1]
    return out


def fit_coefficients(basis: PolyBasis, values: np.ndarray) -> np.ndarray:
    """Least-squares coefficients of ``values`` in the unnormalized basis.

    Orthogonality reduces the fit to projections:
    c_j = sum_k x_k p_j(t_k) / Phi_j.
    """
    x = np.asarray(values)
    if x.shape != basis.times.shape:
        raise InvalidInputError("values must match the basis schedule length")
    return (basis.node_q.T @ x) / np.sqrt(basis.phi)


def select_order(
    samples: SampleSet,
    n_min: int,
    n_max: int,
) -> Tuple[int, List[Tuple[int, float]]]:
    """Choose the fit order minimizing residual variance RSS_N / (K - N).

    The residual is tracked by subtracting one orthogonal component at a
    time, which stays accurate when the fit becomes exact; variances at
    rounding level tie, and ties resolve to the smallest order.

    Parameters
    ----------
    samples : SampleSet
    n_min, n_max : int
        Candidate order range, 1 <= n_min <= n_max < K.

    Returns
    -------
    (chosen, curve)
        The selected order and the full list of (N, sigma_N^2) pairs.
    """
    K = samples.n
    if not (1 <= n_min <= n_max):
        raise InvalidInputError("need 1 <= n_min <= n_max")
    if n_max >= K:
        raise InvalidInputError(
            f"n_max must be below the sample count {K} so the residual "
            "variance has positive degrees of freedom"
        )
    basis = build_basis(samples.times, n_max)
    x = np.asarray(samples.values)
    r = x.astype(complex) if np.iscomplexobj(x) else x.astype(float)
    curve: List[Tuple[int, float]] = []
    for j in range(n_max):
        q = basis.node_q[:, j]
        r = r - np.dot(q, r) * q
        N = j + 1
        if N >= n_min:
            rss = float(np.real(np.vdot(r, r)))
            curve.append((N, rss / (K - N)))

    floor = ZERO_VARIANCE_FLOOR * float(np.mean(np.abs(x) ** 2))
    best = min(v for _, v in curve)
    threshold = max(best * (1.0 + TIE_RTOL), floor)
    chosen = next(N for N, v in curve if v <= threshold)
    return chosen, curve


@dataclass(frozen=True)
class ReconstructionTransform:
    """The linear map from nonuniform samples to a uniform grid.

    ``H`` applies the basis fit and grid evaluation in one step:
    grid values = H @ samples.  ``P1``, ``Q`` and ``P`` expose the
    classical factorization H = P Q^{-1} P1^T (node values, squared norms,
    grid values of the unnormalized polynomials); ``H`` itself is
    assembled from unit-norm factors, which is the same map up to
    rounding.
    """

    basis: PolyBasis
    grid_step: float
    grid_len: int
    P1: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    H: np.ndarray

    @property
    def grid_times(self) -> np.ndarray:
        return self.grid_step * np.arange(self.grid_len)

    def apply(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        if values.shape != self.basis.times.shape:
            raise InvalidInputError("values must match the basis schedule")
        return self.H @ values


def build_transform(
    basis: PolyBasis,
    grid_step: float,
    grid_len: Optional[int] = None,
    allow_extrapolation: bool = False,
) -> ReconstructionTransform:
    """Assemble the sample-to-grid reconstruction matrix.

    Parameters
    ----------
    basis : PolyBasis
    grid_step : float
        Uniform grid step T; grid instants are i T for i = 0 .. L-1.
    grid_len : int, optional
        Grid length L; defaults to the largest grid covered by the
        schedule, floor(t_K / T) + 1.
    allow_extrapolation : bool
        Permit grid instants beyond the last sample (warns instead of
        raising).
    """
    if not (math.isfinite(grid_step) and grid_step > 0.0):
        raise InvalidInputError("grid_step must be positive and finite")
    t_end = float(basis.times[-1])
    if grid_len is None:
        grid_len = int(math.floor(t_end / grid_step + 1e-9)) + 1
    if not isinstance(grid_len, (int, np.integer)) or grid_len < 1:
        raise InvalidInputError("grid_len must be a positive integer")
    overhang = (grid_len - 1) * grid_step - t_end
    if overhang > 1e-9 * grid_step:
        if not allow_extrapolation:
            raise ExtrapolationError(
                f"grid extends {overhang:.3g} beyond the last sample "
                f"t={t_end:.6g}; pass allow_extrapolation=True to permit"
            )
        warnings.warn(
            f"reconstruction grid extrapolates {overhang:.3g} beyond the "
            "sampled interval",
            stacklevel=2,
        )
    grid_times = grid_step * np.arange(grid_len)
    Qg = _evaluate_unit_norm(basis, grid_times)
    H = Qg @ basis.node_q.T
    P1 = evaluate_basis(basis, basis.times)
    P = evaluate_basis(basis, grid_times)
    return ReconstructionTransform(
        basis=basis,
        grid_step=float(grid_step),
        grid_len=int(grid_len),
        P1=P1,
        Q=np.diag(basis.phi),
        P=P,
        H=H,
    )


@dataclass
class ReconstructionResult:
    """Output of a reconstruction: grid values plus diagnostics.

    ``impulse_response`` is the first column of H, the grid response to a
    unit sample at t_1; it drives the error autocorrelation model.
    """

    grid_values: np.ndarray
    grid_step: float
    grid_times: np.ndarray
    impulse_response: np.ndarray
    chosen_order: int
    variance_curve: Optional[List[Tuple[int, float]]] = None
    error_autocorr: Optional[np.ndarray] = None

    @property
    def grid_len(self) -> int:
        return int(self.grid_values.size)


def reconstruct(
    transform: ReconstructionTransform,
    samples: SampleSet,
) -> ReconstructionResult:
    """Apply a reconstruction transform to samples on its schedule."""
    t = transform.basis.times
    scale = max(float(np.max(np.abs(t))), 1.0)
    if samples.times.shape != t.shape or \
            np.max(np.abs(samples.times - t)) > 1e-12 * scale:
        raise InvalidInputError(
            "sample instants do not match the transform's schedule"
        )
    grid_values = transform.H @ np.asarray(samples.values)
    return ReconstructionResult(
        grid_values=grid_values,
        grid_step=transform.grid_step,
        grid_times=transform.grid_times,
        impulse_response=transform.H[:, 0].copy(),
        chosen_order=transform.basis.order,
    )


AutocorrLike = Union[NoiseModel, Callable[[int], float]]


def _autocorr_callable(r_ww: AutocorrLike) -> Callable[[int], float]:
    if isinstance(r_ww, NoiseModel):
        return r_ww.normalized_autocorr
    if callable(r_ww):
        return r_ww
    raise InvalidInputError("r_ww must be a NoiseModel or a lag -> value callable")


def propagate_autocorr(
    impulse_response: np.ndarray,
    r_ww: AutocorrLike,
    max_lag: int,
    sigma2: float,
) -> np.ndarray:
    """Autocorrelation of the reconstruction error on the grid.

    Models the grid error as the sample noise filtered by the
    reconstruction's impulse response h: the error autocorrelation at lag
    k is sigma2 times the deterministic correlation of h with itself,
    convolved with the noise autocorrelation,

        r_ee[k] = sigma2 * sum_m rho_h[m] r_ww[k - m],
        rho_h[m] = sum_i h[i + m] conj(h[i]).

    Parameters
    ----------
    impulse_response : array_like, shape (L,)
    r_ww : NoiseModel or callable
        Normalized noise autocorrelation by integer lag.
    max_lag : int
        Highest lag to return, 0 <= max_lag < L.
    sigma2 : float
        Noise variance at the sample instants.

    Returns
    -------
    ndarray, shape (max_lag + 1,)
        r_ee[0 .. max_lag].
    """
    h = np.asarray(impulse_response)
    if h.ndim != 1 or h.size == 0:
        raise InvalidInputError("impulse_response must be a nonempty 1-D array")
    if not np.all(np.isfinite(h)):
        raise InvalidInputError("impulse_response must be finite")
    if not (0 <= max_lag < h.size):
        raise InvalidInputError(
            f"max_lag must be in [0, {h.size - 1}], got {max_lag}"
        )
    if not (math.isfinite(sigma2) and sigma2 >= 0.0):
        raise InvalidInputError("sigma2 must be finite and nonnegative")
    corr = _autocorr_callable(r_ww)
    L = h.size
    # rho_h[m] for m = -(L-1) .. L-1, index m + L - 1.
    rho_h = np.correlate(h, h, mode="full")
    lags_m = np.arange(-(L - 1), L)
    out = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        weights = np.array([corr(int(k - m)) for m in lags_m])
        out[k] = sigma2 * float(np.real(np.dot(rho_h, weights)))
    return out


def exact_error_covariance(
    transform: ReconstructionTransform,
    r_ww: AutocorrLike,
    sigma2: float,
) -> np.ndarray:
    """Full grid-error covariance sigma2 * H R_ww H^H.

    Unlike :func:`propagate_autocorr` this makes no time-invariance
    approximation; it is the exact second-order description of the
    reconstruction error.
    """
    if not (math.isfinite(sigma2) and sigma2 >= 0.0):
        raise InvalidInputError("sigma2 must be finite and nonnegative")
    corr = _autocorr_callable(r_ww)
    K = transform.basis.n_samples
    lags = np.abs(np.subtract.outer(np.arange(K), np.arange(K)))
    R_ww = np.vectorize(lambda m: corr(int(m)))(lags).astype(float)
    H = transform.H
    return sigma2 * (H @ R_ww @ H.conj().T)


def reconstruct_auto(
    samples: SampleSet,
    grid_step: float,
    order: Optional[int] = None,
    order_min: int = 1,
    order_max: Optional[int] = None,
    grid_len: Optional[int] = None,
    allow_extrapolation: bool = False,
    noise: Optional[AutocorrLike] = None,
    sigma2: Optional[float] = None,
) -> ReconstructionResult:
    """One-call pipeline: order selection, basis, transform, error model.

    When ``order`` is None the order is selected over
    [order_min, order_max] by minimum residual variance.  When ``noise``
    is given, the error autocorrelation is attached; ``sigma2`` defaults
    to the residual variance at the selected order, which is the natural
    noise-variance estimate when none is known.
    """
    curve = None
    if order is None:
        if order_max is None:
            order_max = samples.n - 1
        order, curve = select_order(samples, order_min, order_max)
    basis = build_basis(samples.times, order)
    transform = build_transform(
        basis, grid_step, grid_len=grid_len,
        allow_extrapolation=allow_extrapolation,
    )
    result = reconstruct(transform, samples)
    result.variance_curve = curve
    if noise is not None:
        if sigma2 is None:
            # Residual variance at the reconstruction order estimates the
            # noise variance once the signal is captured.
            x = np.asarray(samples.values)
            r = x - basis.node_q @ (basis.node_q.T @ x)
            dof = max(samples.n - order, 1)
            sigma2 = float(np.real(np.vdot(r, r))) / dof
        result.error_autocorr = propagate_autocorr(
            result.impulse_response, noise,
            max_lag=result.grid_len - 1, sigma2=sigma2,
        )
    return result


class PolynomialReconstructor(BaseEstimator, TransformerMixin):
    """Resample nonuniform data onto a uniform grid, scikit-learn style.

    Parameters
    ----------
    grid_step : float
        Target grid step T.
    order : int or "auto"
        Basis order; "auto" selects by minimum residual variance.
    order_min, order_max : int
        Search range for automatic selection; ``order_max`` defaults to
        half the sample count, which keeps at least half the degrees of
        freedom in the residual-variance estimate.
    grid_len : int, optional
        Grid length; defaults to covering the sampled interval.
    allow_extrapolation : bool

    Attributes
    ----------
    basis_ : PolyBasis
    transform_ : ReconstructionTransform
    chosen_order_ : int
    variance_curve_ : list of (order, variance) or None
    grid_times_ : ndarray
    impulse_response_ : ndarray
    """

    def __init__(
        self,
        grid_step: float = 1.0,
        order: Union[int, str] = "auto",
        order_min: int = 1,
        order_max: Optional[int] = None,
        grid_len: Optional[int] = None,
        allow_extrapolation: bool = False,
    ):
        self.grid_step = grid_step
        self.order = order
        self.order_min = order_min
        self.order_max = order_max
        self.grid_len = grid_len
        self.allow_extrapolation = allow_extrapolation

    def fit(self, times: np.ndarray, values: Optional[np.ndarray] = None):
        """Build the basis and transform for a schedule.

        ``values`` are required when ``order="auto"`` since selection
        depends on the data.
        """
        times = np.asarray(times, dtype=float)
        if self.order == "auto":
            if values is None:
                raise InvalidInputError(
                    'order="auto" needs sample values to select the order'
                )
            samples = SampleSet(times=times, values=np.asarray(values))
            order_max = self.order_max
            if order_max is None:
                order_max = max(self.order_min, samples.n // 2)
            chosen, curve = select_order(samples, self.order_min, order_max)
        else:
            chosen, curve = int(self.order), None
        self.basis_ = build_basis(times, chosen)
        self.transform_ = build_transform(
            self.basis_, self.grid_step, grid_len=self.grid_len,
            allow_extrapolation=self.allow_extrapolation,
        )
        self.chosen_order_ = chosen
        self.variance_curve_ = curve
        self.grid_times_ = self.transform_.grid_times
        self.impulse_response_ = self.transform_.H[:, 0].copy()
        return self

    def transform(self, values: np.ndarray) -> np.ndarray:
        """Map sample values on the fitted schedule to the uniform grid."""
        if not hasattr(self, "transform_"):
            raise NotFittedError(
                "this PolynomialReconstructor instance is not fitted yet"
            )
        return self.transform_.apply(np.asarray(values))

    def fit_transform(
        self, times: np.ndarray, values: Optional[np.ndarray] = None
    ) -> np.ndarray:
        self.fit(times, values)
        return self.transform(values)

"""Damped-exponential signal models, sampling schedules, and calibrated noise.

The signal model is a sum of complex exponential modes

    g(t) = sum_i beta_i * exp(s_i t),    s_i = -alpha_i + j 2 pi f_i,

optionally closed under conjugation so that g(t) is real.  This module
generates such signals on arbitrary time schedules, draws random nonuniform
schedules, injects noise calibrated to a signal-to-noise ratio, and converts
between z-plane and s-plane pole representations.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .exceptions import InvalidInputError, SingularityError

TWO_PI = 2.0 * math.pi

#: Sentinel SNR meaning "no noise added".
NOISELESS = math.inf


@dataclass(frozen=True)
class Pole:
    """One complex pole, parameterized by damping and cyclic frequency.

    Parameters
    ----------
    alpha : float
        Damping factor.  Positive values decay.
    f : float
        Frequency in cycles per unit time.
    """

    alpha: float
    f: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.f)):
            raise InvalidInputError("pole parameters must be finite")

    @property
    def s(self) -> complex:
        """Continuous-time pole location -alpha + j 2 pi f."""
        return complex(-self.alpha, TWO_PI * self.f)

    @classmethod
    def from_s(cls, s: complex) -> "Pole":
        """Build a pole from its s-plane location."""
        return cls(alpha=-s.real, f=s.imag / TWO_PI)

    def conjugate(self) -> "Pole":
        return Pole(alpha=self.alpha, f=-self.f)

    def z(self, step: float) -> complex:
        """Discrete-time pole exp(s T) for sample step T."""
        if not (math.isfinite(step) and step > 0.0):
            raise InvalidInputError("step must be positive and finite")
        return complex(np.exp(self.s * step))


@dataclass(frozen=True)
class SignalSpec:
    """A sum of damped exponential modes.

    Parameters
    ----------
    modes : sequence of (amplitude, Pole)
        Real amplitude and pole of each mode.
    conjugate_pairs : bool
        When True, each listed mode is paired with its conjugate so the
        generated signal is real: beta exp(s t) + beta exp(conj(s) t).
    """

    modes: Tuple[Tuple[float, Pole], ...]
    conjugate_pairs: bool = True

    def __post_init__(self) -> None:
        if len(self.modes) == 0:
            raise InvalidInputError("signal must have at least one mode")
        for beta, pole in self.modes:
            if not math.isfinite(beta):
                raise InvalidInputError("mode amplitude must be finite")
            if not isinstance(pole, Pole):
                raise InvalidInputError("mode pole must be a Pole")
        object.__setattr__(self, "modes", tuple(self.modes))

    @property
    def poles(self) -> Tuple[Pole, ...]:
        """The listed poles (one representative per conjugate pair)."""
        return tuple(pole for _, pole in self.modes)

    @property
    def n_poles(self) -> int:
        """Total model order: listed modes, doubled under conjugation."""
        return len(self.modes) * (2 if self.conjugate_pairs else 1)


def generate_signal(spec: SignalSpec, times: np.ndarray) -> np.ndarray:
    """Evaluate the modal sum of ``spec`` at the given instants.

    Parameters
    ----------
    spec : SignalSpec
    times : array_like
        Sample instants, finite and nonnegative.

    Returns
    -------
    ndarray
        Real samples when ``spec.conjugate_pairs`` is True, complex
        otherwise.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InvalidInputError("times must be a nonempty 1-D array")
    if not np.all(np.isfinite(t)):
        raise InvalidInputError("times must be finite")
    if np.any(t < 0.0):
        raise InvalidInputError("times must be nonnegative")
    values = np.zeros(t.shape, dtype=complex)
    for beta, pole in spec.modes:
        values += beta * np.exp(pole.s * t)
    if spec.conjugate_pairs:
        # beta exp(st) + beta exp(conj(s)t) = 2 beta Re exp(st), exactly real.
        return 2.0 * values.real
    return values


def make_nonuniform_schedule(
    seed: int,
    count: int,
    max_gap: float = 1.1,
    min_gap: float = 0.1,
) -> np.ndarray:
    """Draw a random strictly increasing schedule starting at t = 0.

    Consecutive gaps are i.i.d. uniform on [min_gap, max_gap].

    Parameters
    ----------
    seed : int
        Seed for the gap draws; the schedule is a pure function of it.
    count : int
        Number of instants, at least 2.
    max_gap, min_gap : float
        Gap bounds, 0 < min_gap <= max_gap.

    Returns
    -------
    ndarray
        ``count`` instants, t[0] = 0, strictly increasing.
    """
    if not isinstance(count, (int, np.integer)) or count < 2:
        raise InvalidInputError("count must be an integer >= 2")
    if not (math.isfinite(min_gap) and math.isfinite(max_gap)):
        raise InvalidInputError("gap bounds must be finite")
    if not (0.0 < min_gap <= max_gap):
        raise InvalidInputError("need 0 < min_gap <= max_gap")
    rng = np.random.default_rng(seed)
    gaps = rng.uniform(min_gap, max_gap, size=count - 1)
    times = np.empty(count, dtype=float)
    times[0] = 0.0
    np.cumsum(gaps, out=times[1:])
    return times


@dataclass(frozen=True)
class NoiseModel:
    """A zero-mean, unit-variance noise process with known autocorrelation.

    Supported kinds:

    - ``white-gaussian``: i.i.d. standard normal.
    - ``ar1-gaussian``: first-order autoregressive Gaussian with
      coefficient ``rho``; normalized autocorrelation rho**|lag|.
    - ``white-uniform``: i.i.d. uniform on [-sqrt(3), sqrt(3)].
    - ``white-laplacian``: i.i.d. Laplace with unit variance.
    """

    kind: str = "white-gaussian"
    rho: float = 0.0

    _KINDS = ("white-gaussian", "ar1-gaussian", "white-uniform", "white-laplacian")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise InvalidInputError(
                f"unknown noise kind {self.kind!r}; expected one of {self._KINDS}"
            )
        if self.kind == "ar1-gaussian" and not abs(self.rho) < 1.0:
            raise InvalidInputError("ar1-gaussian requires |rho| < 1")

    def normalized_autocorr(self, lag: int) -> float:
        """r_ww[lag] for the unit-variance process."""
        if self.kind == "ar1-gaussian":
            return float(self.rho ** abs(int(lag)))
        return 1.0 if int(lag) == 0 else 0.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` consecutive unit-variance samples."""
        if size < 1:
            raise InvalidInputError("size must be positive")
        if self.kind == "white-gaussian":
            return rng.standard_normal(size)
        if self.kind == "white-uniform":
            bound = math.sqrt(3.0)
            return rng.uniform(-bound, bound, size)
        if self.kind == "white-laplacian":
            return rng.laplace(0.0, 1.0 / math.sqrt(2.0), size)
        # AR(1) driven at exactly unit marginal variance from the start.
        eps = rng.standard_normal(size)
        w = np.empty(size)
        w[0] = eps[0]
        scale = math.sqrt(1.0 - self.rho * self.rho)
        for k in range(1, size):
            w[k] = self.rho * w[k - 1] + scale * eps[k]
        return w


def add_noise(
    clean: np.ndarray,
    noise: NoiseModel,
    snr_db: float,
    seed: int,
    convention: str = "average",
) -> Tuple[np.ndarray, float]:
    """Add noise scaled so the signal-to-noise ratio equals ``snr_db``.

    Parameters
    ----------
    clean : array_like
        Noise-free samples, not all zero.
    noise : NoiseModel
    snr_db : float
        Target SNR in dB; ``math.inf`` returns the clean signal unchanged.
    seed : int
        Seed for the noise draw.
    convention : {"average", "peak", "unit"}
        Reference power: mean of |clean|**2, its maximum, or 1.  Under
        "unit" the noise variance is 10**(-snr_db / 10) regardless of
        signal scale.

    Returns
    -------
    (noisy, sigma) : (ndarray, float)
        Noisy samples and the noise standard deviation used.
    """
    x = np.asarray(clean)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("clean must be a nonempty 1-D array")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("clean must be finite")
    power = np.abs(x) ** 2
    if convention == "average":
        ref = float(power.mean())
    elif convention == "peak":
        ref = float(power.max())
    elif convention == "unit":
        ref = 1.0
    else:
        raise InvalidInputError(f"unknown SNR convention {convention!r}")
    if ref <= 0.0:
        raise InvalidInputError("clean signal has zero power")
    if snr_db == math.inf:
        return x.copy(), 0.0
    if not math.isfinite(snr_db):
        raise InvalidInputError("snr_db must be finite or +inf")
    sigma = math.sqrt(ref * 10.0 ** (-snr_db / 10.0))
    w = noise.sample(np.random.default_rng(seed), x.size)
    return x + sigma * w, sigma


def snr_db_of(clean: np.ndarray, sigma: float, convention: str = "average") -> float:
    """SNR in dB implied by a noise standard deviation."""
    x = np.asarray(clean)
    power = np.abs(x) ** 2
    if convention == "average":
        ref = float(power.mean())
    elif convention == "peak":
        ref = float(power.max())
    elif convention == "unit":
        ref = 1.0
    else:
        raise InvalidInputError(f"unknown SNR convention {convention!r}")
    if sigma == 0.0:
        return math.inf
    return 10.0 * math.log10(ref / (sigma * sigma))


def s_to_z(s: complex, step: float) -> complex:
    """Map an s-plane pole to the z-plane for sample step T: z = exp(sT)."""
    if not (math.isfinite(step) and step > 0.0):
        raise InvalidInputError("step must be positive and finite")
    return complex(np.exp(complex(s) * step))


def z_to_s(z: complex, step: float) -> complex:
    """Map a z-plane pole to the s-plane: s = (ln|z| + j arg z) / T.

    The argument is taken in (-pi, pi], so frequencies map to the principal
    band |f| <= 1/(2T).

    Raises
    ------
    SingularityError
        If ``z`` is zero (log singularity).
    InvalidInputError
        If ``step`` is not positive.
    """
    if not (math.isfinite(step) and step > 0.0):
        raise InvalidInputError("step must be positive and finite")
    zc = complex(z)
    if zc == 0.0:
        raise SingularityError("z = 0 has no finite s-plane image")
    theta = math.atan2(zc.imag, zc.real)
    if theta <= -math.pi:
        theta = math.pi
    return complex(math.log(abs(zc)), theta) / step


@dataclass
class SampleSet:
    """Samples of one signal: instants, values, and an optional uniform step.

    ``uniform_step`` is set when the instants are known to be an exact
    uniform grid t_k = t_0 + k T; estimators that require uniform data key
    off this field.
    """

    times: np.ndarray
    values: np.ndarray
    uniform_step: Optional[float] = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values)
        if self.times.ndim != 1 or self.times.size == 0:
            raise InvalidInputError("times must be a nonempty 1-D array")
        if self.values.shape != self.times.shape:
            raise InvalidInputError("times and values must have equal length")
        if not np.all(np.isfinite(self.times)):
            raise InvalidInputError("times must be finite")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("values must be finite")
        if np.any(np.diff(self.times) <= 0.0):
            raise InvalidInputError("times must be strictly increasing")
        if self.uniform_step is not None:
            T = float(self.uniform_step)
            if not (math.isfinite(T) and T > 0.0):
                raise InvalidInputError("uniform_step must be positive")
            gaps = np.diff(self.times)
            if self.times.size > 1 and np.max(np.abs(gaps - T)) > 1e-9 * T:
                raise InvalidInputError(
                    "times are not uniform at the declared step"
                )
            self.uniform_step = T

    @property
    def n(self) -> int:
        return int(self.times.size)

    @classmethod
    def uniform(cls, values: np.ndarray, step: float, t0: float = 0.0) -> "SampleSet":
        """Wrap values sampled at t0 + k*step."""
        values = np.asarray(values)
        times = t0 + step * np.arange(values.size)
        return cls(times=times, values=values, uniform_step=step)

    def to_csv(self, path) -> None:
        """Write as CSV with header ``t,x`` at full double precision."""
        if np.iscomplexobj(self.values):
            raise InvalidInputError("CSV serialization supports real values only")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x"])
            for t, x in zip(self.times, self.values):
                writer.writerow([f"{t:.17g}", f"{float(x):.17g}"])

    @classmethod
    def from_csv(cls, path, uniform_tol: float = 1e-9) -> "SampleSet":
        """Read a ``t,x`` CSV; detects an exact uniform grid automatically."""
        times, values = [], []
        with open(path, "r", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or len(header) < 2:
                raise InvalidInputError(f"{path}: expected a 't,x' CSV header")
            for row in reader:
                if not row:
                    continue
                times.append(float(row[0]))
                values.append(float(row[1]))
        times = np.asarray(times)
        values = np.asarray(values)
        step = None
        if times.size > 1:
            gaps = np.diff(times)
            T = float(gaps.mean())
            if T > 0.0 and np.max(np.abs(gaps - T)) <= uniform_tol * T:
                step = T
        return cls(times=times, values=values, uniform_step=step)

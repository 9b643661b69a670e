"""Monte Carlo benchmarking of the pole estimators.

A ``Scenario`` bundles a true signal, a sampling schedule, a noise model
and SNR, and a list of method configurations.  ``run_scenario`` draws
``n_trials`` independent noise realizations (trial k is seeded with
``base_seed + k``, so runs are reproducible and individually
re-creatable), fits every method to every realization, matches the
estimated poles to the truth, and reports per-parameter bias and
variance.

Trials where an estimator fails (rank collapse, coincident roots, pole
count mismatch) are counted and excluded from the statistics rather than
silently dropped.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .estimators import (
    AutocorrelationMethod,
    MatrixPencil,
    PolynomialTransformMLE,
)
from .exceptions import InvalidInputError, PolyidentError
from .orthopoly import reconstruct_auto
from .signals import (
    NoiseModel,
    Pole,
    SampleSet,
    SignalSpec,
    add_noise,
    generate_signal,
    make_nonuniform_schedule,
)

#: Floor for the relative scales used in pole matching costs.
MATCH_SCALE_FLOOR = 1e-6


@dataclass(frozen=True)
class UniformSampling:
    step: float
    count: int


@dataclass(frozen=True)
class NonuniformSampling:
    seed: int
    count: int
    min_gap: float = 0.1
    max_gap: float = 1.1


SamplingSpec = Union[UniformSampling, NonuniformSampling]


@dataclass(frozen=True)
class ReconstructionSettings:
    """Reconstruction knobs shared by the scenario's estimators."""

    grid_step: Optional[float] = None
    order: Union[int, str] = "auto"
    order_min: int = 1
    order_max: Optional[int] = None
    grid_len: Optional[int] = None
    allow_extrapolation: bool = False


@dataclass(frozen=True)
class MethodSpec:
    """One estimator configuration inside a scenario.

    ``method`` selects the algorithm: "pt-mle", "alm", or "mp".
    """

    method: str
    n_modes: int = 4
    extended_order: int = 16
    n_lag_rows: Optional[int] = None
    weighting: str = "error-autocorr"
    preprocess: bool = True
    svd_correction: bool = False
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if self.method not in ("pt-mle", "alm", "mp"):
            raise InvalidInputError(
                f"unknown method {self.method!r}; expected pt-mle, alm, or mp"
            )

    @property
    def name(self) -> str:
        return self.label or self.method


@dataclass(frozen=True)
class Scenario:
    """A complete benchmark description."""

    signal: SignalSpec
    sampling: SamplingSpec
    noise: NoiseModel
    snr_db: float
    methods: Tuple[MethodSpec, ...]
    n_trials: int
    base_seed: int = 0
    snr_convention: str = "average"
    reconstruction: ReconstructionSettings = ReconstructionSettings()

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise InvalidInputError("n_trials must be positive")
        if len(self.methods) == 0:
            raise InvalidInputError("scenario needs at least one method")
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass
class StatRow:
    """Bias and variance of one parameter under one method."""

    method: str
    param: str
    bias: float
    variance: float
    n_valid: int
    n_failed: int
    mean: float = math.nan
    truth: float = math.nan


@dataclass
class StatReport:
    rows: List[StatRow]
    metadata: Dict[str, object] = field(default_factory=dict)


def match_poles(
    estimated: Sequence[Pole],
    truth: Sequence[Pole],
) -> List[int]:
    """Assign estimated poles to true poles, one to one.

    Minimizes the summed relative distance
    |d alpha| / max(|alpha|, floor) + |d f| / max(|f|, floor) over all
    assignments.

    Returns
    -------
    list of int
        ``result[j]`` is the index of the estimate assigned to truth j.
    """
    if len(estimated) != len(truth):
        raise InvalidInputError(
            f"pole counts differ: {len(estimated)} estimated vs "
            f"{len(truth)} true"
        )
    n = len(truth)
    cost = np.empty((n, n))
    for j, t in enumerate(truth):
        sa = max(abs(t.alpha), MATCH_SCALE_FLOOR)
        sf = max(abs(t.f), MATCH_SCALE_FLOOR)
        for i, e in enumerate(estimated):
            cost[i, j] = abs(e.alpha - t.alpha) / sa + abs(e.f - t.f) / sf
    # Diverged estimates can overflow the sum; the solver needs finite
    # entries, and any such estimate is equally wrong everywhere.
    cost[~np.isfinite(cost)] = 1e30
    row_ind, col_ind = linear_sum_assignment(cost)
    out = [0] * n
    for i, j in zip(row_ind, col_ind):
        out[j] = int(i)
    return out


def _truth_poles(signal: SignalSpec) -> List[Pole]:
    poles = sorted(signal.poles, key=lambda p: (p.f, p.alpha))
    return list(poles)


def schedule_times(sampling: SamplingSpec) -> np.ndarray:
    """Materialize a sampling spec into concrete instants."""
    if isinstance(sampling, UniformSampling):
        return sampling.step * np.arange(sampling.count)
    return make_nonuniform_schedule(
        sampling.seed, sampling.count,
        max_gap=sampling.max_gap, min_gap=sampling.min_gap,
    )


def _build_estimator(spec: MethodSpec, scenario: Scenario):
    rc = scenario.reconstruction
    if spec.method == "pt-mle":
        return PolynomialTransformMLE(
            n_modes=spec.n_modes,
            extended_order=spec.extended_order,
            grid_step=rc.grid_step,
            order=rc.order,
            order_min=rc.order_min,
            order_max=rc.order_max,
            weighting=spec.weighting,
            noise=scenario.noise,
            preprocess=spec.preprocess,
            svd_correction=spec.svd_correction,
        )
    if spec.method == "alm":
        return AutocorrelationMethod(
            n_modes=spec.n_modes,
            extended_order=spec.extended_order,
            n_lag_rows=spec.n_lag_rows,
        )
    return MatrixPencil(
        n_modes=spec.n_modes,
        extended_order=spec.extended_order,
    )


def run_scenario(scenario: Scenario) -> StatReport:
    """Run the full Monte Carlo and aggregate per-parameter statistics."""
    times = schedule_times(scenario.sampling)
    clean = generate_signal(scenario.signal, times)
    truth = _truth_poles(scenario.signal)
    n_params = 2 * len(truth)
    uniform = isinstance(scenario.sampling, UniformSampling)
    step = scenario.sampling.step if uniform else None
    if not uniform and scenario.reconstruction.grid_step is None and any(
        m.method in ("alm", "mp") for m in scenario.methods
    ):
        raise InvalidInputError(
            "nonuniform sampling needs a reconstruction grid_step for alm/mp"
        )

    estimates: Dict[str, List[List[float]]] = {
        m.name: [[] for _ in range(n_params)] for m in scenario.methods
    }
    failures: Dict[str, int] = {m.name: 0 for m in scenario.methods}

    for trial in range(scenario.n_trials):
        seed = scenario.base_seed + trial
        noisy, _sigma = add_noise(
            clean, scenario.noise, scenario.snr_db, seed,
            convention=scenario.snr_convention,
        )
        samples = SampleSet(times=times, values=noisy, uniform_step=step)
        grid_samples = None
        for mspec in scenario.methods:
            try:
                if mspec.method in ("alm", "mp") and not uniform:
                    # These methods need a uniform grid; share one
                    # reconstruction per trial.
                    if grid_samples is None:
                        rc = scenario.reconstruction
                        recon = reconstruct_auto(
                            samples, rc.grid_step,
                            order=None if rc.order == "auto" else int(rc.order),
                            order_min=rc.order_min,
                            order_max=rc.order_max or max(rc.order_min, samples.n // 2),
                        )
                        grid_samples = SampleSet.uniform(
                            np.asarray(recon.grid_values), recon.grid_step
                        )
                    est = _build_estimator(mspec, scenario).fit(grid_samples)
                else:
                    est = _build_estimator(mspec, scenario).fit(samples)
                found = [p for p, _ in est.result_.positive_poles()]
                if len(found) != len(truth):
                    raise PolyidentError(
                        f"estimated {len(found)} positive-frequency poles, "
                        f"expected {len(truth)}"
                    )
                assign = match_poles(found, truth)
                for j in range(len(truth)):
                    p = found[assign[j]]
                    estimates[mspec.name][2 * j].append(p.alpha)
                    estimates[mspec.name][2 * j + 1].append(p.f)
            except PolyidentError:
                failures[mspec.name] += 1

    rows: List[StatRow] = []
    for mspec in scenario.methods:
        name = mspec.name
        for j, pole in enumerate(truth):
            for k, (pname, tval) in enumerate(
                ((f"alpha_{j + 1}", pole.alpha), (f"f_{j + 1}", pole.f))
            ):
                vals = np.asarray(estimates[name][2 * j + k])
                n_valid = vals.size
                mean = float(vals.mean()) if n_valid else math.nan
                bias = abs(mean - tval) if n_valid else math.nan
                var = float(vals.var(ddof=1)) if n_valid > 1 else math.nan
                rows.append(StatRow(
                    method=name, param=pname, bias=bias, variance=var,
                    n_valid=n_valid, n_failed=failures[name],
                    mean=mean, truth=tval,
                ))

    metadata = {
        "n_trials": scenario.n_trials,
        "base_seed": scenario.base_seed,
        "snr_db": scenario.snr_db,
        "snr_convention": scenario.snr_convention,
        "noise": scenario.noise.kind,
        "sampling": (
            f"uniform step={scenario.sampling.step} "
            f"count={scenario.sampling.count}"
            if uniform else
            f"nonuniform seed={scenario.sampling.seed} "
            f"count={scenario.sampling.count} "
            f"gaps=[{scenario.sampling.min_gap}, {scenario.sampling.max_gap}]"
        ),
    }
    return StatReport(rows=rows, metadata=metadata)


def emit_report(report: StatReport, fmt: str = "csv") -> str:
    """Render a report as CSV (full precision) or an aligned text table
    (4 significant digits)."""
    if fmt == "csv":
        buf = io.StringIO()
        buf.write("method,param,bias,variance,n_valid,n_failed\n")
        for r in report.rows:
            buf.write(
                f"{r.method},{r.param},{r.bias:.17g},{r.variance:.17g},"
                f"{r.n_valid},{r.n_failed}\n"
            )
        return buf.getvalue()
    if fmt == "table":
        buf = io.StringIO()
        header = (
            f"{'method':<12} {'param':<10} {'bias':>12} {'variance':>12} "
            f"{'n_valid':>8} {'n_failed':>9}\n"
        )
        buf.write(header)
        buf.write("-" * (len(header) - 1) + "\n")
        for r in report.rows:
            buf.write(
                f"{r.method:<12} {r.param:<10} {r.bias:>12.3e} "
                f"{r.variance:>12.3e} {r.n_valid:>8d} {r.n_failed:>9d}\n"
            )
        return buf.getvalue()
    raise InvalidInputError(f"unknown report format {fmt!r}")


def parse_report_csv(text: str) -> StatReport:
    """Inverse of ``emit_report(fmt="csv")`` for the emitted columns."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != "method,param,bias,variance,n_valid,n_failed":
        raise InvalidInputError("not a recognized report CSV")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 6:
            raise InvalidInputError(f"malformed report row: {ln!r}")
        rows.append(StatRow(
            method=parts[0], param=parts[1],
            bias=float(parts[2]), variance=float(parts[3]),
            n_valid=int(parts[4]), n_failed=int(parts[5]),
        ))
    return StatReport(rows=rows)


def emit_diagnostics(report: StatReport) -> str:
    """Side-channel details that do not belong in the main table."""
    buf = io.StringIO()
    for key in sorted(report.metadata):
        buf.write(f"{key}: {report.metadata[key]}\n")
    buf.write("\n")
    for r in report.rows:
        signed = r.mean - r.truth if not math.isnan(r.mean) else math.nan
        buf.write(
            f"{r.method} {r.param}: mean={r.mean:.10e} truth={r.truth:.10e} "
            f"signed_bias={signed:.3e}\n"
        )
    return buf.getvalue()

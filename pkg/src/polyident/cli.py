"""Command-line front end.

Four subcommands cover the workflow:

- ``simulate``: draw a noisy record of the configured signal.
- ``reconstruct``: resample a record onto a uniform grid, with order
  selection diagnostics and the propagated error autocorrelation.
- ``estimate``: run the configured pole estimators on a record.
- ``bench``: Monte Carlo bias/variance comparison of the estimators.

All outputs are plain CSV (plus small text sidecars), so downstream
plotting and analysis stay tool-agnostic.  Exit codes: 0 on success, 2
for configuration problems, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bench import emit_diagnostics, emit_report, run_scenario, schedule_times
from .config import Config, load_config, resolve_config_path
from .estimators import (
    AutocorrelationMethod,
    EstimateResult,
    MatrixPencil,
    PolynomialTransformMLE,
)
from .exceptions import ConfigError, InvalidInputError, PolyidentError
from .orthopoly import ReconstructionResult, reconstruct_auto
from .signals import SampleSet, add_noise, generate_signal


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyident",
        description=(
            "Pole estimation toolkit: simulate damped-exponential records, "
            "reconstruct nonuniform samples onto a uniform grid, estimate "
            "poles, and benchmark estimators."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True,
                       help="config file (.cfg, YAML); bundled names like "
                            "'example1.cfg' also resolve")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", default=None,
                       help="override the output directory")

    p = sub.add_parser("simulate", help="generate a noisy sample record")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct",
                       help="resample a record onto a uniform grid")
    common(p)
    p.add_argument("input", nargs="?", default=None,
                   help="samples CSV (t,x); generated from the config "
                        "when omitted")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("estimate", help="run the configured pole estimators")
    common(p)
    p.add_argument("input", nargs="?", default=None,
                   help="samples CSV (t,x) or reconstruction grid CSV "
                        "(i,t,y); generated from the config when omitted")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bench",
                       help="Monte Carlo bias/variance benchmark")
    common(p)
    p.set_defaults(func=cmd_bench)
    return parser


def _write_rows(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                f"{v:.17g}" if isinstance(v, float) else v for v in row
            ])


def _note(msg: str) -> None:
    print(msg)


def _generate_record(cfg: Config) -> Tuple[SampleSet, np.ndarray]:
    """Noisy samples plus the clean values, from the config alone."""
    if cfg.signal is None or cfg.sampling is None:
        raise ConfigError(
            "generating a record needs 'signal' and 'sampling' sections"
        )
    times = schedule_times(cfg.sampling)
    clean = generate_signal(cfg.signal, times)
    noisy, sigma = add_noise(
        clean, cfg.noise, cfg.snr_db, cfg.seed,
        convention=cfg.snr_convention,
    )
    step = getattr(cfg.sampling, "step", None)
    samples = SampleSet(times=times, values=noisy, uniform_step=step)
    return samples, clean


def _load_record(path: str) -> Tuple[SampleSet, Optional[np.ndarray]]:
    """Read samples from a t,x CSV or an i,t,y grid CSV.

    Returns the samples and, when a ``<stem>_truth.csv`` sidecar exists,
    the clean values at the same instants.
    """
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip()
    if header.startswith("i,"):
        times, values = [], []
        with open(path, "r", newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            for row in reader:
                if not row:
                    continue
                times.append(float(row[1]))
                values.append(float(row[2]))
        times = np.asarray(times)
        gaps = np.diff(times)
        step = float(gaps.mean()) if gaps.size else None
        samples = SampleSet(
            times=times, values=np.asarray(values), uniform_step=step
        )
    else:
        samples = SampleSet.from_csv(path)
    truth = None
    stem, ext = os.path.splitext(path)
    sidecar = f"{stem}_truth{ext}"
    if os.path.exists(sidecar):
        truth_set = SampleSet.from_csv(sidecar)
        if truth_set.times.shape == samples.times.shape and np.allclose(
            truth_set.times, samples.times, rtol=0.0, atol=1e-9
        ):
            truth = np.asarray(truth_set.values)
        else:
            _note(f"notice: sidecar {sidecar} does not match the record "
                  "instants; ignoring it")
    return samples, truth


def _obtain_record(args, cfg: Config) -> Tuple[SampleSet, Optional[np.ndarray]]:
    if getattr(args, "input", None):
        return _load_record(args.input)
    samples, clean = _generate_record(cfg)
    return samples, clean


def cmd_simulate(args, cfg: Config) -> int:
    samples, clean = _generate_record(cfg)
    out = cfg.output_dir
    samples.to_csv(os.path.join(out, "samples.csv"))
    SampleSet(
        times=samples.times, values=clean,
        uniform_step=samples.uniform_step,
    ).to_csv(os.path.join(out, "samples_truth.csv"))
    _note(f"wrote {out}/samples.csv and {out}/samples_truth.csv "
          f"({samples.n} samples, span {samples.times[-1]:.6g})")
    return 0


def _reconstruction_order_args(cfg: Config, samples: SampleSet):
    rc = cfg.reconstruction
    order = None if rc.order == "auto" else int(rc.order)
    order_max = rc.order_max
    if order_max is None:
        order_max = max(rc.order_min, samples.n // 2)
    return order, rc.order_min, order_max


def _grid_step_for(cfg: Config, samples: SampleSet) -> float:
    step = cfg.reconstruction.grid_step
    if step is None:
        step = samples.uniform_step
    if step is None:
        raise ConfigError(
            "reconstruction.grid_step is required for nonuniform records"
        )
    return float(step)


def cmd_reconstruct(args, cfg: Config) -> int:
    samples, truth_values = _obtain_record(args, cfg)
    grid_step = _grid_step_for(cfg, samples)
    order, order_min, order_max = _reconstruction_order_args(cfg, samples)
    recon = reconstruct_auto(
        samples, grid_step,
        order=order, order_min=order_min, order_max=order_max,
        grid_len=cfg.reconstruction.grid_len,
        allow_extrapolation=cfg.reconstruction.allow_extrapolation,
        noise=cfg.noise,
    )
    out = cfg.output_dir
    _write_rows(
        os.path.join(out, "grid.csv"), ["i", "t", "y"],
        ((i, float(t), float(np.real(y)))
         for i, (t, y) in enumerate(zip(recon.grid_times, recon.grid_values))),
    )
    _note(f"wrote {out}/grid.csv (L={recon.grid_len}, T={recon.grid_step:.6g}, "
          f"order {recon.chosen_order})")
    if recon.variance_curve is not None:
        _write_rows(
            os.path.join(out, "variance_curve.csv"), ["N", "sigma2"],
            ((n, float(v)) for n, v in recon.variance_curve),
        )
        _note(f"wrote {out}/variance_curve.csv "
              f"(selected order {recon.chosen_order})")
    else:
        _note("notice: fixed order configured; no variance curve to write")
    if recon.error_autocorr is not None:
        _write_rows(
            os.path.join(out, "error_autocorr.csv"), ["k", "r_ee"],
            ((k, float(v)) for k, v in enumerate(recon.error_autocorr)),
        )
        _note(f"wrote {out}/error_autocorr.csv")
    if cfg.signal is not None:
        grid_truth = generate_signal(cfg.signal, recon.grid_times)
        _write_rows(
            os.path.join(out, "error_sequence.csv"), ["i", "t", "e"],
            ((i, float(t), float(np.real(y) - g))
             for i, (t, y, g) in enumerate(
                 zip(recon.grid_times, recon.grid_values, grid_truth))),
        )
        _note(f"wrote {out}/error_sequence.csv")
    else:
        _note("notice: no 'signal' section; skipping error_sequence.csv")
    if truth_values is not None:
        _write_rows(
            os.path.join(out, "noise_sequence.csv"), ["k", "t", "w"],
            ((k, float(t), float(np.real(x) - np.real(g)))
             for k, (t, x, g) in enumerate(
                 zip(samples.times, samples.values, truth_values))),
        )
        _note(f"wrote {out}/noise_sequence.csv")
    else:
        _note("notice: no ground truth for this record; "
              "skipping noise_sequence.csv")
    return 0


def _fit_methods(cfg: Config, samples: SampleSet) -> List[EstimateResult]:
    if not cfg.methods:
        raise ConfigError("estimation needs a 'methods' list")
    rc = cfg.reconstruction
    results: List[EstimateResult] = []
    grid_samples: Optional[SampleSet] = None
    for spec in cfg.methods:
        if spec.method == "pt-mle":
            est = PolynomialTransformMLE(
                n_modes=spec.n_modes,
                extended_order=spec.extended_order,
                grid_step=rc.grid_step,
                order=rc.order,
                order_min=rc.order_min,
                order_max=rc.order_max,
                weighting=spec.weighting,
                noise=cfg.noise,
                preprocess=spec.preprocess,
                svd_correction=spec.svd_correction,
            ).fit(samples)
            results.append(est.result_)
            continue
        target = samples
        if samples.uniform_step is None:
            if grid_samples is None:
                grid_step = _grid_step_for(cfg, samples)
                order, order_min, order_max = _reconstruction_order_args(
                    cfg, samples
                )
                recon = reconstruct_auto(
                    samples, grid_step,
                    order=order, order_min=order_min, order_max=order_max,
                )
                grid_samples = SampleSet.uniform(
                    np.asarray(recon.grid_values), recon.grid_step
                )
            target = grid_samples
        if spec.method == "alm":
            est = AutocorrelationMethod(
                n_modes=spec.n_modes,
                extended_order=spec.extended_order,
                n_lag_rows=spec.n_lag_rows,
            ).fit(target)
        else:
            est = MatrixPencil(
                n_modes=spec.n_modes,
                extended_order=spec.extended_order,
            ).fit(target)
        results.append(est.result_)
    return results


def cmd_estimate(args, cfg: Config) -> int:
    samples, _ = _obtain_record(args, cfg)
    results = _fit_methods(cfg, samples)
    out = cfg.output_dir
    rows = []
    for res in results:
        for pole, amp in zip(res.s_poles, res.amplitudes):
            rows.append((
                res.method, float(pole.alpha), float(pole.f),
                float(np.real(amp)), float(np.imag(amp)),
            ))
    _write_rows(
        os.path.join(out, "estimates.csv"),
        ["method", "alpha", "f", "beta_re", "beta_im"],
        rows,
    )
    with open(os.path.join(out, "estimates_diagnostics.txt"), "w") as fh:
        for res in results:
            fh.write(f"[{res.method}]\n")
            for key in sorted(res.diagnostics):
                fh.write(f"{key}: {res.diagnostics[key]}\n")
            fh.write("\n")
    for res in results:
        pos = res.positive_poles()
        desc = "; ".join(
            f"alpha={p.alpha:.6g} f={p.f:.6g}" for p, _ in pos
        )
        _note(f"{res.method}: {desc}")
    _note(f"wrote {out}/estimates.csv and {out}/estimates_diagnostics.txt")
    return 0


def cmd_bench(args, cfg: Config) -> int:
    scenario = cfg.to_scenario()
    report = run_scenario(scenario)
    out = cfg.output_dir
    with open(os.path.join(out, "report.csv"), "w") as fh:
        fh.write(emit_report(report, "csv"))
    table = emit_report(report, "table")
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(table)
    with open(os.path.join(out, "report_diagnostics.txt"), "w") as fh:
        fh.write(emit_diagnostics(report))
    print(table, end="")
    _note(f"wrote {out}/report.csv, {out}/report.txt, "
          f"{out}/report_diagnostics.txt")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(resolve_config_path(args.config))
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.output_dir = args.out
        os.makedirs(cfg.output_dir, exist_ok=True)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PolyidentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end acceptance gate.

Eight checks, each printing one ``[PASS]``/``[FAIL]`` line with its
measured numbers (run with ``pytest tests/test_acceptance.py -v -s`` to
see the lines for passing checks too):

1. Noiseless exact recovery by all three estimators.
2. Basis orthogonality over random schedules.
3. Grid reconstruction equals a dense least-squares polynomial fit.
4. Propagated error-autocorrelation model versus Monte Carlo truth.
5. Nonuniform benchmark variances against reference levels, 10-40 dB.
6. Uniform low-SNR benchmark: method ranking and variance scale.
7. Concentration of automatic order selection across schedules.
8. Byte-identical benchmark reports on repeated runs.

Checks 4 and 5 document known model limits and are expected to fail:
the lag-domain error-autocorrelation model assumes a stationary error
process while the actual reconstruction error lives in the span of the
fitted polynomial basis (check 4 prints the discrepancy and an exact
covariance cross-check), and the reference variance for the first
frequency at 40 dB sits far above what any configuration of these
estimators produces while the 10 dB damping references stay reachable
(check 5 prints the full ratio table).  Both assert the stated
tolerances anyway; the failures are the documentation.
"""

from __future__ import annotations

import math
import time
from dataclasses import replace

import numpy as np

from polyident import (
    NoiseModel,
    Pole,
    SampleSet,
    SignalSpec,
    add_noise,
    generate_signal,
    make_nonuniform_schedule,
)
from polyident.bench import emit_report, run_scenario
from polyident.config import bundled_config_path, load_config
from polyident.estimators import estimate_alm, estimate_mp, estimate_pt_mle
from polyident.orthopoly import (
    build_basis,
    build_transform,
    exact_error_covariance,
    propagate_autocorr,
    reconstruct,
    select_order,
)

from conftest import TWO_PI, two_mode_spec

TWO_PI_SQ = TWO_PI ** 2

# Reference benchmark variances for the bundled scenarios, recorded from
# the experiments these configs reproduce.  The originating schedules
# and noise seeds are unpublished, so agreement is asserted to one order
# of magnitude, never equality.  Parameter order: alpha_1, f_1, alpha_2,
# f_2; frequencies in cycles per unit time.
REFERENCE_NONUNIFORM = {
    40.0: [1.174e-7, 2.675e-8, 2.859e-7, 5.772e-9],
    20.0: [8.303e-6, 2.360e-7, 2.235e-6, 2.649e-7],
    10.0: [1.409e-5, 2.353e-6, 7.067e-6, 1.027e-6],
}
# The uniform-scenario reference lists frequency variances in squared
# radians; converted here to squared cycles.
REFERENCE_UNIFORM_WEIGHTED = [
    9.298e-5, 7.983e-5 / TWO_PI_SQ, 1.820e-5, 1.298e-5 / TWO_PI_SQ,
]


def emit(number: int, name: str, ok: bool, detail: str) -> str:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] acceptance {number} {name}: {detail}"
    print(line)
    return line


def pole_errors(result, truth) -> float:
    """Worst relative error over (alpha, f) of both recovered pairs."""
    found = [p for p, _ in result.positive_poles()]
    assert len(found) == len(truth), (
        f"expected {len(truth)} positive-frequency poles, got {len(found)}"
    )
    worst = 0.0
    rest = list(found)
    for t in truth:
        i = int(np.argmin([abs(q.f - t.f) for q in rest]))
        q = rest.pop(i)
        worst = max(worst, abs(q.alpha - t.alpha) / abs(t.alpha),
                    abs(q.f - t.f) / abs(t.f))
    return worst


def test_acceptance_1_noiseless_recovery_all_estimators():
    start = time.perf_counter()
    spec = two_mode_spec()
    t = 5.6 * np.arange(50, dtype=float)
    ss = SampleSet.uniform(generate_signal(spec, t), 5.6)
    errs = {
        "pt-mle": pole_errors(estimate_pt_mle(ss, J=20, M=4), spec.poles),
        "alm": pole_errors(estimate_alm(ss, J=20, I=20, M=4), spec.poles),
        "mp": pole_errors(estimate_mp(ss, J=16, M=4), spec.poles),
    }
    elapsed = time.perf_counter() - start
    ok = (errs["pt-mle"] < 1e-6 and errs["mp"] < 1e-6
          and errs["alm"] < 1e-5 and elapsed < 1.0)
    line = emit(1, "noiseless recovery", ok,
                "max rel err pt-mle={pt-mle:.2e} alm={alm:.2e} "
                "mp={mp:.2e} ({s:.2f} s, limit 1 s)".format(s=elapsed, **errs))
    assert ok, line


def test_acceptance_2_basis_orthogonality_random_schedules():
    start = time.perf_counter()
    rng = np.random.default_rng(2025)
    worst = 0.0
    for case in range(100):
        K = int(rng.integers(10, 61))
        N = int(rng.integers(2, min(K, 25) + 1))
        lo, hi = np.sort(rng.uniform(0.2, 1.5, 2))
        times = make_nonuniform_schedule(case, K, max_gap=float(hi),
                                         min_gap=float(lo))
        b = build_basis(times, N)
        gram = b.node_q.T @ b.node_q
        worst = max(worst, float(np.max(np.abs(gram - np.eye(N)))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 5.0
    line = emit(2, "basis orthogonality", ok,
                f"100 random schedules (K in [10,60], order <= 25), worst "
                f"cross-product {worst:.2e} (limit 1e-8; {elapsed:.2f} s, "
                f"limit 5 s)")
    assert ok, line


def test_acceptance_3_reconstruction_matches_least_squares_fit():
    start = time.perf_counter()
    rng = np.random.default_rng(777)
    worst = 0.0
    for _ in range(100):
        K = int(rng.integers(12, 61))
        N = int(rng.integers(2, min(K - 2, 20) + 1))
        span = 0.7 * K * rng.uniform(0.8, 1.2)
        times = np.sort(rng.uniform(0.0, span, K))
        times[0] = 0.0
        values = rng.standard_normal(K)
        tr = build_transform(build_basis(times, N),
                             grid_step=rng.uniform(0.3, 1.0))
        got = reconstruct(tr, SampleSet(times=times, values=values)).grid_values
        fit = np.polynomial.Polynomial.fit(times, values, N - 1)
        want = fit(tr.grid_times)
        scale = max(1e-30, float(np.max(np.abs(want))))
        worst = max(worst, float(np.max(np.abs(got - want))) / scale)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 10.0
    line = emit(3, "least-squares equivalence", ok,
                f"100 random cases, worst relative deviation {worst:.2e} "
                f"(limit 1e-8; {elapsed:.2f} s, limit 10 s)")
    assert ok, line


def test_acceptance_4_error_autocorr_model_against_monte_carlo():
    # Reconstruct pure noise: the grid output is then exactly the error
    # process, and its autocorrelation can be measured to high precision.
    start = time.perf_counter()
    K, order, grid_step, sigma2 = 30, 10, 0.5, 1.0
    n_trials, max_lag = 10_000, 5
    times = make_nonuniform_schedule(seed=0, count=K, max_gap=1.1,
                                     min_gap=0.9)
    tr = build_transform(build_basis(times, order), grid_step)
    L = tr.grid_len
    model = propagate_autocorr(tr.H[:, 0], NoiseModel(), max_lag, sigma2)
    exact_cov = exact_error_covariance(tr, NoiseModel(), sigma2)
    rng = np.random.default_rng(123)
    E = tr.H @ rng.standard_normal((K, n_trials))
    rows = []
    worst_dev = 0.0
    ok = True
    for k in range(max_lag + 1):
        per_trial = np.mean(E[:L - k or None] * E[k:], axis=0) \
            if k else np.mean(E * E, axis=0)
        mean = float(np.mean(per_trial))
        se = float(np.std(per_trial, ddof=1)) / math.sqrt(n_trials)
        dev_model = abs(mean - model[k]) / se
        exact_avg = float(np.mean(np.diag(exact_cov, k)))
        dev_exact = abs(mean - exact_avg) / se
        worst_dev = max(worst_dev, dev_model)
        ok = ok and dev_model <= 3.0
        rows.append((k, model[k], mean, se, dev_model, exact_avg, dev_exact))
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    print(f"  error autocorrelation, {n_trials} trials, K={K}, "
          f"order={order}, grid step {grid_step}:")
    print("  lag  lag-model     empirical     std-err      |dev|/SE  "
          "exact-cov-avg |dev|/SE")
    for k, m, e, s, dm, x, dx in rows:
        print(f"  {k:>3d}  {m:>12.5e} {e:>12.5e} {s:>12.5e} {dm:>9.1f}  "
              f"{x:>12.5e} {dx:>8.1f}")
    line = emit(4, "error-autocorrelation model", ok,
                f"worst lag deviation {worst_dev:.1f} standard errors "
                f"(limit 3); the lag-domain model treats the error as "
                f"stationary, but the error lives in the {order}-dimensional "
                f"fitted-polynomial span, so its autocorrelation varies "
                f"along the grid; the exact covariance diagonal averages "
                f"above track the Monte Carlo within sampling error "
                f"({elapsed:.1f} s, limit 60 s)")
    assert ok, line


def test_acceptance_5_nonuniform_benchmark_variance_scale():
    start = time.perf_counter()
    cfg = load_config(bundled_config_path("example1.cfg"))
    base = cfg.to_scenario()
    variances = {}
    for snr in (40.0, 20.0, 10.0):
        rep = run_scenario(replace(base, snr_db=snr))
        variances[snr] = [r.variance for r in rep.rows]
        assert all(r.n_valid > 0 for r in rep.rows)
    params = ["alpha_1", "f_1", "alpha_2", "f_2"]
    ok = True
    worst = (1.0, "")
    print(f"  {base.n_trials}-trial benchmark, variance vs reference "
          f"(acceptance band [0.1, 10]):")
    print("  snr_db param    measured      reference     ratio")
    for snr in (40.0, 20.0, 10.0):
        for j, name in enumerate(params):
            ratio = variances[snr][j] / REFERENCE_NONUNIFORM[snr][j]
            in_band = 0.1 <= ratio <= 10.0
            ok = ok and in_band
            off = max(ratio / 10.0, 0.1 / ratio)
            if off > worst[0]:
                worst = (off, f"{name}@{snr:.0f}dB ratio {ratio:.2f}")
            flag = "" if in_band else "  <-- out of band"
            print(f"  {snr:>6.0f} {name:<8s} {variances[snr][j]:>12.3e} "
                  f"{REFERENCE_NONUNIFORM[snr][j]:>12.3e} {ratio:>8.2f}"
                  f"{flag}")
    monotone = all(
        variances[40.0][j] < variances[20.0][j] < variances[10.0][j]
        for j in range(4))
    ok = ok and monotone
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 180.0
    detail = (f"variance monotone in SNR: {monotone}; "
              f"{'all ratios in [0.1, 10]' if worst[0] <= 1.0 else 'worst cell ' + worst[1]} "
              f"({elapsed:.0f} s, limit 180 s)")
    line = emit(5, "nonuniform benchmark variance scale", ok, detail)
    assert ok, line


def test_acceptance_6_uniform_benchmark_method_ranking():
    start = time.perf_counter()
    cfg = load_config(bundled_config_path("example2.cfg"))
    rep = run_scenario(cfg.to_scenario())
    var = {}
    for row in rep.rows:
        var.setdefault(row.method, []).append(row.variance)
    params = ["alpha_1", "f_1", "alpha_2", "f_2"]
    ordered = [j for j in range(4)
               if var["pt-mle"][j] < var["alm"][j] < var["mp"][j]]
    ratios = [var["pt-mle"][j] / REFERENCE_UNIFORM_WEIGHTED[j]
              for j in range(4)]
    in_band = all(0.1 <= r <= 10.0 for r in ratios)
    elapsed = time.perf_counter() - start
    ok = len(ordered) >= 3 and in_band and elapsed < 300.0
    print(f"  {cfg.n_trials}-trial benchmark at {cfg.snr_db:.0f} dB:")
    print("  param    pt-mle        alm           mp            "
          "pt-mle/reference")
    for j, name in enumerate(params):
        print(f"  {name:<8s} {var['pt-mle'][j]:>12.3e} "
              f"{var['alm'][j]:>12.3e} {var['mp'][j]:>12.3e} {ratios[j]:>8.2f}")
    line = emit(6, "uniform benchmark method ranking", ok,
                f"pt-mle < alm < mp on {len(ordered)}/4 parameters "
                f"(need >= 3); pt-mle within one order of magnitude of "
                f"reference on {sum(0.1 <= r <= 10.0 for r in ratios)}/4 "
                f"({elapsed:.0f} s, limit 300 s)")
    assert ok, line


def test_acceptance_7_order_selection_concentration():
    start = time.perf_counter()
    spec = SignalSpec(modes=(
        (1.0, Pole(alpha=1.0 / 75.0, f=0.08)),
        (1.0, Pole(alpha=1.0 / 90.0, f=0.11)),
    ))
    noise = NoiseModel()
    selections = []
    for seed in range(20):
        times = make_nonuniform_schedule(seed, 50, max_gap=1.1, min_gap=0.9)
        clean = generate_signal(spec, times)
        noisy, _ = add_noise(clean, noise, 5.0, 7000 + seed,
                             convention="peak")
        order, _ = select_order(SampleSet(times=times, values=noisy), 15, 24)
        selections.append(order)
    hits = sum(15 <= n <= 23 for n in selections)
    elapsed = time.perf_counter() - start
    ok = hits >= 16
    line = emit(7, "order selection concentration", ok,
                f"selected orders {selections}; {hits}/20 in [15, 23] "
                f"(need >= 16) at peak SNR 5 dB ({elapsed:.1f} s)")
    assert ok, line


def test_acceptance_8_benchmark_determinism():
    start = time.perf_counter()
    sizes = []
    ok = True
    for name in ("example1.cfg", "example2.cfg"):
        sc = replace(load_config(bundled_config_path(name)).to_scenario(),
                     n_trials=5)
        first = emit_report(run_scenario(sc), "csv")
        second = emit_report(run_scenario(sc), "csv")
        ok = ok and first == second
        sizes.append(len(first.encode()))
    elapsed = time.perf_counter() - start
    line = emit(8, "benchmark determinism", ok,
                f"both bundled scenarios re-run byte-identically "
                f"({sizes[0]} and {sizes[1]} byte reports; {elapsed:.1f} s)")
    assert ok, line

"""Acceptance suite: one test per criterion, printed as a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion lines.
The long-running 1.44e8-shot arm of criterion 6 is opt-in via the
MCZCUT_LONG_TESTS=1 environment variable.
"""

import math
import os
import time

import numpy as np
import pytest

from mczcut import cutter, densesim, experiments, sampler, zhcalc
from mczcut.circuit import Circuit, Gate, Observable, find_cut
from mczcut.cutter import decompose_mcz, embed, exact_cut_expectation, verify
from mczcut.experiments import ExperimentConfig, gen_random_circuit


def criterion(number: int, ok: bool, detail: str):
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def test_criterion_1_zh_identity_suite():
    t0 = time.monotonic()
    fusion_worst = max(zhcalc.check_fusion_rule(m, total - m)
                       for total in range(1, 11) for m in range(total + 1))
    grid_worst = max(zhcalc.check_contraction_identities(n, 2 * math.pi * j / 8)
                     for n in range(1, 9) for j in range(8))
    mcz_worst = max(zhcalc.check_mcz_representation(n) for n in range(2, 9))
    block_worst = zhcalc.check_choi_block_expansion()
    elapsed = time.monotonic() - t0
    ok = fusion_worst < 1e-12 and grid_worst < 1e-12 and mcz_worst == 0.0 and block_worst < 1e-14
    criterion(1, ok, f"fusion<{fusion_worst:.1e}, contraction grid<{grid_worst:.1e}, "
                     f"mcz exact={mcz_worst}, coupling block<{block_worst:.1e} ({elapsed:.1f}s)")


def test_criterion_2_decomposition_oracle():
    t0 = time.monotonic()
    worst = 0.0
    for order in range(2, 7):
        for k in range(1, order):
            report = verify(decompose_mcz(k, order - k))
            worst = max(worst, report.residual, report.hbox_form_residual)
    elapsed = time.monotonic() - t0
    ok = worst < 1e-10 and elapsed < 120
    criterion(2, ok, f"all (k,m) with k+m<=6: worst residual {worst:.2e} in {elapsed:.1f}s")


def test_criterion_3_kappa_table():
    tol = 1e-12
    values = {}
    for order in range(2, 7):
        for k in range(1, order):
            values[(k, order - k)] = decompose_mcz(k, order - k).kappa

    checks = {
        "CZ": abs(values[(1, 1)] - 3.0) < tol,
        "CCZ": abs(values[(1, 2)] - 4.5) < tol,
        "one-removed order 4": abs(values[(1, 3)] - 5.0) < tol,
        "one-removed order 5": abs(values[(1, 4)] - 5.0) < tol,
        "one-removed order 6": abs(values[(1, 5)] - 5.0) < tol,
        "symmetry": abs(values[(2, 1)] - values[(1, 2)]) < tol,
    }
    general = {km: v for km, v in values.items() if min(km) >= 2}
    checks["general < 6"] = all(v < 6.0 for v in general.values())
    maxima = [max(v for (k, m), v in values.items() if k + m == order) for order in range(2, 7)]
    checks["increasing toward 6"] = maxima == sorted(maxima) and maxima[-1] > 5.7
    ok = all(checks.values())
    one_removed = [values[(1, m)] for m in range(2, 6)]
    criterion(3, ok, f"CZ={values[(1,1)]}, CCZ={values[(1,2)]}, one-removed(3..6)={one_removed}, "
                     f"general={sorted(general.values())}, order maxima={maxima}")


def test_criterion_4_projector_rewrite():
    worst = max(cutter.rewrite_projector(n) for n in range(1, 6))
    criterion(4, worst < 1e-12, f"2P..P = Zmix - signed projector for n<=5: worst {worst:.2e}")


def _interleaved_circuit(n: int, labels: tuple[str, ...], seed: int) -> Circuit:
    rng = np.random.default_rng(seed)
    gates = []
    for q in range(n):
        gates.append(Gate("RY", (q,), float(rng.uniform(0, 2 * math.pi))))
    gates.append(Gate("MCZ", tuple(range(n))))
    for q in range(n):
        gates.append(Gate("RX", (q,), float(rng.uniform(0, 2 * math.pi))))
    return Circuit(n, tuple(gates), labels)


def test_criterion_5_exact_reconstruction():
    cases = []
    for seed, (n, k, m) in enumerate([(2, 1, 1), (3, 1, 2), (3, 2, 1), (4, 1, 3),
                                      (4, 2, 2), (5, 2, 3), (5, 1, 4), (5, 3, 2)]):
        cases.append(gen_random_circuit(n, k, m, np.random.default_rng(seed)))
        cases.append(gen_random_circuit(n, k, m, np.random.default_rng(100 + seed)))
    # partitions need not be contiguous
    cases.append(_interleaved_circuit(4, ("A", "B", "A", "B"), 7))
    cases.append(_interleaved_circuit(5, ("B", "A", "B", "A", "B"), 8))
    cases.append(_interleaved_circuit(3, ("B", "A", "B"), 9))
    cases.append(_interleaved_circuit(5, ("A", "B", "B", "A", "B"), 10))
    assert len(cases) == 20

    worst = 0.0
    decompositions = {}
    for circuit in cases:
        cut = find_cut(circuit)
        key = (cut.k, cut.m)
        if key not in decompositions:
            d = decompose_mcz(*key)
            verify(d)
            decompositions[key] = d
        terms = embed(decompositions[key], cut)
        obs = Observable.z_string(circuit.num_qubits)
        va, vb = obs.factor(circuit.qubits_in("A"), circuit.qubits_in("B"))
        reconstructed = exact_cut_expectation(terms, va.values, vb.values)
        exact = densesim.expval(densesim.run(circuit), obs)
        worst = max(worst, abs(reconstructed - exact))
    criterion(5, worst < 1e-9, f"20 random partitioned circuits: worst |error| {worst:.2e}")


def test_criterion_6_sampling_statistics():
    config = ExperimentConfig(num_qubits=5, k=2, m=3, epsilon=0.01,
                              repetitions=20, circuits=5, seed=11)
    rows = experiments.run_experiment(config)
    summary = experiments.summarize(rows, config)
    cut_std = summary["cut"]["std_dev"]
    uncut_std = summary["uncut"]["std_dev"]
    shots = summary["shots"]
    ok = (shots == 1_440_000
          and 1.5e-3 <= cut_std <= 5e-3
          and cut_std < config.epsilon
          and 8.3e-4 / 2 <= uncut_std <= 8.3e-4 * 2)
    criterion(6, ok, f"N={shots}: cut std {cut_std:.2e} (window [1.5e-3, 5e-3], eps 1e-2), "
                     f"uncut std {uncut_std:.2e} (window [4.15e-4, 1.66e-3])")


@pytest.mark.skipif(os.environ.get("MCZCUT_LONG_TESTS") != "1",
                    reason="opt-in long arm: set MCZCUT_LONG_TESTS=1")
def test_criterion_6_long_arm():
    config = ExperimentConfig(num_qubits=5, k=2, m=3, epsilon=0.001,
                              repetitions=10, circuits=5, seed=11)
    rows = experiments.run_experiment(config)
    summary = experiments.summarize(rows, config)
    cut_std = summary["cut"]["std_dev"]
    uncut_std = summary["uncut"]["std_dev"]
    ok = (summary["shots"] == 144_000_000
          and 1.5e-4 <= cut_std <= 5e-4
          and cut_std < config.epsilon
          and 8.4e-5 / 2 <= uncut_std <= 8.4e-5 * 2)
    criterion(6, ok, f"long arm N={summary['shots']:.3g}: cut std {cut_std:.2e}, "
                     f"uncut std {uncut_std:.2e}")


def _ccz_benchmark():
    rng = np.random.default_rng(3)
    gates = [Gate("RX", (q,), float(rng.uniform(0, 2 * math.pi))) for q in range(3)]
    gates += [Gate("MCZ", (0, 1, 2))]
    gates += [Gate("RX", (q,), float(rng.uniform(0, 2 * math.pi))) for q in range(3)]
    circuit = Circuit(3, tuple(gates), ("A", "B", "B"))
    d = decompose_mcz(1, 2)
    verify(d)
    terms = embed(d, find_cut(circuit))
    obs = Observable.z_string(3)
    va, vb = obs.factor((0,), (1, 2))
    return circuit, d, terms, va.values, vb.values, obs


def test_criterion_7_estimator_properties():
    hoeffding_ok = sampler.hoeffding_shots(0.1, 0.05, 6.0) == 26_560

    circuit, d, terms, va, vb, obs = _ccz_benchmark()
    exact = densesim.expval(densesim.run(circuit), obs)
    budget = sampler.ShotBudget(4000, 0.2, d.kappa, mode="circuit_sampling")
    estimates, range_ok = [], True
    for seed in range(200):
        record = sampler.sample_circuit_mode(terms, budget, seed, va, vb, decomposition=d)
        estimates.append(record.estimate)
        range_ok = range_ok and record.max_abs_shot <= d.kappa + 1e-12
    estimates = np.array(estimates)
    pooled_se = estimates.std(ddof=1) / math.sqrt(len(estimates))
    bias = abs(estimates.mean() - exact)
    unbiased_ok = bias < 4 * pooled_se
    ok = hoeffding_ok and range_ok and unbiased_ok
    criterion(7, ok, f"hoeffding(6,0.1,0.05)=26560: {hoeffding_ok}; |f|<=kappa per shot: {range_ok}; "
                     f"bias {bias:.2e} < 4*SE {4 * pooled_se:.2e} over 200 runs: {unbiased_ok}")


def test_criterion_8_hardware_out_of_scope():
    # hardware execution, noise models and transpilation are not desk-scale
    # reproducible and are deliberately absent from this package
    import mczcut
    present = [name for name in ("hardware", "noise", "transpile") if hasattr(mczcut, name)]
    criterion(8, not present, "hardware results out of scope; replaced by criteria 1-7")

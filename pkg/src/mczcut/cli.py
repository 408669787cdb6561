"""Command-line harness.

Subcommands:

* ``verify``       -- run the full identity and decomposition-oracle suite
* ``decompose``    -- export one decomposition document and its kappa
* ``kappa-table``  -- print the overhead constants up to order 6
* ``sample``       -- one sampling run on a circuit document
* ``experiment``   -- the Fig-style uncut/cut comparison dataset

Exit code 0 means every requested check passed.  Identical invocations with
identical seeds produce byte-identical output files.  The MCZCUT_SEED
environment variable supplies a default seed when --seed is absent.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import cutter, densesim, experiments, sampler, zhcalc
from .circuit import Observable, find_cut, parse

SEED_ENV_VAR = "MCZCUT_SEED"


def _default_seed(args_seed: int | None) -> int:
    if args_seed is not None:
        return args_seed
    return int(os.environ.get(SEED_ENV_VAR, "0"))


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _identity_checks():
    checks = []
    for total in range(1, 11):
        for m in range(total + 1):
            n = total - m
            checks.append((f"fusion rule m={m} n={n}", lambda m=m, n=n: zhcalc.check_fusion_rule(m, n), 1e-12))
    for n in range(1, 9):
        for j in range(8):
            theta = 2 * math.pi * j / 8
            checks.append((f"hbox contraction n={n} theta={theta:.4f}",
                           lambda n=n, t=theta: zhcalc.check_contraction_identities(n, t), 1e-12))
    rng = np.random.default_rng(20240229)
    for n in range(1, 7):
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        checks.append((f"diagonal construction n={n}", lambda v=v: zhcalc.check_diag_lemma(v), 1e-12))
    checks.append(("coupling block expansion", zhcalc.check_choi_block_expansion, 1e-14))
    for n in range(1, 6):
        checks.append((f"projector rewrite n={n}", lambda n=n: cutter.rewrite_projector(n), 1e-12))
    return checks


def cmd_verify(sizes=None, corrupt: bool = False, stream=None) -> int:
    """Run every identity check and decomposition oracle; return a process exit code.

    ``corrupt`` is a test hook that flips one coefficient per decomposition
    before verification, which must make the oracle fail.
    """
    stream = stream if stream is not None else sys.stdout
    failures = 0

    def report(name, residual, tol):
        nonlocal failures
        ok = residual < tol
        if not ok:
            failures += 1
        print(f"{'PASS' if ok else 'FAIL'}  {name}: residual {residual:.3e} (tol {tol:.0e})", file=stream)

    for name, fn, tol in _identity_checks():
        report(name, fn(), tol)
    for n in range(2, 9):
        residual = zhcalc.check_mcz_representation(n)
        report(f"mcz tensor n={n} (exact)", residual, 1e-15 if residual == 0.0 else 0.0)

    orders = sizes if sizes else range(2, densesim.MAX_SUPEROP_QUBITS + 1)
    for order in orders:
        for k in range(1, order):
            m = order - k
            d = cutter.decompose_mcz(k, m)
            if corrupt:
                t = d.terms[0]
                d.terms[0] = cutter.DecompositionTerm(-t.coefficient, t.op_a, t.op_b)
            result = cutter.verify(d)
            report(f"decomposition oracle ({k},{m})", result.residual, result.tolerance)
            report(f"double-fusion channel form ({k},{m})", result.hbox_form_residual, result.tolerance)

    print(("all checks passed" if failures == 0 else f"{failures} checks FAILED"), file=stream)
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------
# decompose / kappa-table
# ---------------------------------------------------------------------------

def cmd_decompose(order: int, cut: int, out: str | None = None, stream=None) -> int:
    stream = stream if stream is not None else sys.stdout
    if not 2 <= order <= 12:
        raise SystemExit(f"order must lie in [2, 12], got {order}")
    if not 1 <= cut < order:
        raise SystemExit(f"cut position must lie in [1, {order - 1}], got {cut}")
    d = cutter.decompose_mcz(cut, order - cut)
    if order <= densesim.MAX_SUPEROP_QUBITS:
        result = cutter.verify(d)
        if not result.passed:
            print(f"FAIL oracle residual {result.residual:.3e}", file=stream)
            return 1
        print(f"oracle residual {result.residual:.3e} (PASS)", file=stream)
    doc = json.dumps(d.to_document(), indent=2, sort_keys=True)
    if out:
        Path(out).write_text(doc + "\n")
        print(f"wrote {out}", file=stream)
    else:
        print(doc, file=stream)
    print(f"kappa = {d.kappa}", file=stream)
    return 0


def cmd_kappa_table(stream=None) -> int:
    stream = stream if stream is not None else sys.stdout
    rows = experiments.kappa_table()
    width = max(len(r["label"]) for r in rows)
    print(f"{'gate type':<{width}}  order  split  kappa   terms", file=stream)
    for r in rows:
        print(f"{r['label']:<{width}}  {r['order']:>5}  ({r['k']},{r['m']})  {r['kappa']:<6g}  {r['terms']}",
              file=stream)
    return 0


# ---------------------------------------------------------------------------
# sample / experiment
# ---------------------------------------------------------------------------

def cmd_sample(config_path: str, mode: str, epsilon: float, seed: int,
               delta: float = 0.05, out: str | None = None, force: bool = False,
               stream=None) -> int:
    stream = stream if stream is not None else sys.stdout
    circuit = parse(Path(config_path).read_text())
    cut = find_cut(circuit)
    decomposition = cutter.decompose_mcz(cut.k, cut.m)
    if cut.order <= densesim.MAX_SUPEROP_QUBITS:
        cutter.verify(decomposition)
    terms = cutter.embed(decomposition, cut)
    observable = Observable.z_string(circuit.num_qubits)
    values_a, values_b = observable.factor(circuit.qubits_in("A"), circuit.qubits_in("B"))
    if mode == "shots":
        budget = sampler.ShotBudget.for_circuit_sampling(epsilon, delta, decomposition.kappa)
        record = sampler.sample_circuit_mode(terms, budget, seed, values_a.values, values_b.values,
                                             decomposition=decomposition, force=force)
    else:
        total = sampler.preestimation_budget(epsilon, decomposition.kappa)
        total += total % 2
        budget = sampler.ShotBudget(total, epsilon, decomposition.kappa, mode="preestimation")
        record = sampler.preestimation_mode(terms, budget, seed, values_a.values, values_b.values,
                                            decomposition=decomposition, force=force)
    exact = densesim.expval(densesim.run(circuit), observable)
    print(f"exact = {exact:+.6f}  estimate = {record.estimate:+.6f}  "
          f"std_dev = {record.std_dev:.2e}  shots = {record.shots}", file=stream)
    if out:
        Path(out).write_text(record.to_json() + "\n")
        print(f"wrote {out}", file=stream)
    return 0


def cmd_experiment(config_path: str, out_dir: str, workers: int = 1, stream=None) -> int:
    stream = stream if stream is not None else sys.stdout
    doc = json.loads(Path(config_path).read_text())
    config = experiments.ExperimentConfig.from_document(doc)
    rows = experiments.run_experiment(config, workers=workers)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "runs.csv").write_text(experiments.rows_to_csv(rows))
    (out / "summary.json").write_text(experiments.summary_json(rows, config) + "\n")
    summary = experiments.summarize(rows, config)
    for arm in ("cut", "uncut"):
        std = summary[arm]["std_dev"]
        print(f"{arm} std_dev = {'n/a (single run)' if std is None else format(std, '.3e')}", file=stream)
    print(f"wrote {out / 'runs.csv'} and {out / 'summary.json'}", file=stream)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mczcut",
                                     description="Multi-controlled-Z gate cutting toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the identity and oracle suite")
    p.add_argument("--sizes", type=int, nargs="*", default=None,
                   help="restrict decomposition checks to these gate orders")

    p = sub.add_parser("decompose", help="export a decomposition document")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--cut", type=int, required=True, help="number of qubits on side A")
    p.add_argument("--out", default=None)

    sub.add_parser("kappa-table", help="print sampling-overhead constants")

    p = sub.add_parser("sample", help="one sampling run on a circuit document")
    p.add_argument("--config", required=True, help="circuit document (JSON)")
    p.add_argument("--mode", choices=["shots", "preest"], default="preest")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--force", action="store_true", help="skip decomposition verification")

    p = sub.add_parser("experiment", help="uncut/cut comparison dataset")
    p.add_argument("--config", required=True, help="experiment config document (JSON)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(sizes=args.sizes)
    if args.command == "decompose":
        return cmd_decompose(args.order, args.cut, args.out)
    if args.command == "kappa-table":
        return cmd_kappa_table()
    if args.command == "sample":
        return cmd_sample(args.config, args.mode, args.epsilon,
                          _default_seed(args.seed), args.delta, args.out, args.force)
    if args.command == "experiment":
        return cmd_experiment(args.config, args.out, args.workers)
    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())

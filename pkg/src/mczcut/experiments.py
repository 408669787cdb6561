"""Random-circuit generation and the noiseless sampling experiments.

Circuits follow the benchmark recipe: 30 single-qubit rotations and 10 CNOTs
split proportionally across the two partitions, half before and half after a
central MCZ spanning all qubits, with rotation angles uniform in [0, 2pi).
A candidate is rejected until removing the MCZ changes the exact Z-string
expectation by more than the impact threshold, so the gate being cut always
matters for the measured observable.

The experiment harness compares, per circuit and repetition, the exact
expectation against (a) plain sampling of the uncut circuit at N shots and
(b) the cut-circuit estimate at the same total N, and emits a tidy dataset
plus quantile summaries.  Repetitions can run in a worker pool; the output
is ordered by (repetition, circuit) index and is byte-identical for a fixed
seed regardless of worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cutter, densesim, sampler
from .circuit import Circuit, Gate, Observable, find_cut, validate

# The sampling budget uses the order-independent overhead constant for an MCZ
# cut, so desk-scale budgets match N = 4 * 6^2 / eps^2 regardless of the
# split; the per-term allocation inside that budget uses the decomposition's
# exact kappa.
BUDGET_KAPPA = 6.0


@dataclass(frozen=True)
class RandomCircuitSpec:
    rotations: int = 30
    cnots: int = 10
    impact_threshold: float = 0.2
    max_attempts: int = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of one sampling experiment (one qubit count and split)."""

    num_qubits: int
    k: int
    m: int
    epsilon: float
    mode: str = "preestimation"  # "preestimation" | "circuit_sampling"
    repetitions: int = 20
    circuits: int = 5
    seed: int = 0
    delta: float = 0.05
    spec: RandomCircuitSpec = field(default_factory=RandomCircuitSpec)

    def __post_init__(self):
        if self.num_qubits not in (3, 4, 5):
            raise ValueError("experiments cover 3, 4 or 5 qubits")
        if self.k + self.m != self.num_qubits:
            raise ValueError("cut split must satisfy k + m = num_qubits")
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")
        if self.mode not in ("preestimation", "circuit_sampling"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @staticmethod
    def from_document(doc: dict) -> "ExperimentConfig":
        allowed = {"version", "num_qubits", "k", "m", "epsilon", "mode",
                   "repetitions", "circuits", "seed", "delta"}
        unknown = sorted(set(doc) - allowed)
        if unknown:
            raise ValueError(f"unknown field {unknown[0]!r} in experiment config")
        if doc.get("version") != 1:
            raise ValueError(f"unsupported config version {doc.get('version')!r}")
        kwargs = {k: v for k, v in doc.items() if k != "version"}
        return ExperimentConfig(**kwargs)


def _split_counts(total: int, k: int, m: int) -> tuple[int, int]:
    a = int(round(total * k / (k + m)))
    return a, total - a


def gen_random_circuit(n: int, k: int, m: int, rng: np.random.Generator,
                       spec: RandomCircuitSpec = RandomCircuitSpec()) -> Circuit:
    """Generate a partitioned benchmark circuit with an impactful central MCZ.

    Rejection-samples until the exact Z-string expectation with and without
    the MCZ differ by more than the impact threshold; raises after the
    attempt limit (the difference can never exceed 2).
    """
    if k + m != n or not 2 <= n <= 6:
        raise ValueError("need k + m = n with n between 2 and 6")
    qubits_a = list(range(k))
    qubits_b = list(range(k, n))
    rot_a, rot_b = _split_counts(spec.rotations, k, m)
    cnots_a, cnots_b = _split_counts(spec.cnots, k, m)
    if k < 2 and m < 2:  # CNOT needs two qubits on its side
        cnots_a = cnots_b = 0
    elif k < 2:
        cnots_a, cnots_b = 0, spec.cnots
    elif m < 2:
        cnots_a, cnots_b = spec.cnots, 0
    partition = tuple("A" if q < k else "B" for q in range(n))
    observable = Observable.z_string(n)

    for _ in range(spec.max_attempts):
        def local_block(qubits, n_rot, n_cnot):
            gates = []
            for _ in range(n_rot):
                kind = ("RX", "RY", "RZ")[rng.integers(3)]
                gates.append(Gate(kind, (int(rng.choice(qubits)),), float(rng.uniform(0, 2 * math.pi))))
            for _ in range(n_cnot):
                pair = rng.choice(qubits, size=2, replace=False)
                gates.append(Gate("CNOT", (int(pair[0]), int(pair[1]))))
            rng.shuffle(gates)
            return gates

        # half of each partition's gates before the central MCZ, half after
        pre = local_block(qubits_a, rot_a // 2, cnots_a // 2) + local_block(qubits_b, rot_b // 2, cnots_b // 2)
        post = local_block(qubits_a, rot_a - rot_a // 2, cnots_a - cnots_a // 2) \
            + local_block(qubits_b, rot_b - rot_b // 2, cnots_b - cnots_b // 2)
        gates = tuple(pre) + (Gate("MCZ", tuple(range(n))),) + tuple(post)
        circuit = Circuit(n, gates, partition)
        cut_index = len(pre)

        with_gate = densesim.expval(densesim.run(circuit), observable)
        without = densesim.expval(densesim.run(circuit.without_gate(cut_index)), observable)
        if abs(with_gate - without) > spec.impact_threshold:
            validate(circuit)
            return circuit
    raise RuntimeError(f"no circuit reached impact threshold {spec.impact_threshold} "
                       f"in {spec.max_attempts} attempts")


# ---------------------------------------------------------------------------
# Experiment harness
# ---------------------------------------------------------------------------

@dataclass
class RunRow:
    repetition: int
    circuit_index: int
    seed: int
    exact: float
    uncut_estimate: float
    cut_estimate: float
    shots: int
    kappa: float
    mode: str

    @property
    def uncut_error(self) -> float:
        return self.uncut_estimate - self.exact

    @property
    def cut_error(self) -> float:
        return self.cut_estimate - self.exact


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=key)))


def _prepare_circuits(config: ExperimentConfig):
    """The experiment's fixed circuit set, its decomposition, and exact values."""
    decomposition = cutter.decompose_mcz(config.k, config.m)
    report = cutter.verify(decomposition)
    if not report.passed:
        raise RuntimeError(f"decomposition failed verification: residual {report.residual:.3e}")
    observable = Observable.z_string(config.num_qubits)
    prepared = []
    for c in range(config.circuits):
        circuit = gen_random_circuit(config.num_qubits, config.k, config.m,
                                     _rng(config.seed, 100, c), config.spec)
        cut = find_cut(circuit)
        terms = cutter.embed(decomposition, cut)
        values_a, values_b = observable.factor(circuit.qubits_in("A"), circuit.qubits_in("B"))
        exact = densesim.expval(densesim.run(circuit), observable)
        distribution = densesim.run(circuit).probabilities()
        prepared.append({
            "circuit": circuit,
            "terms": terms,
            "values_a": values_a.values,
            "values_b": values_b.values,
            "exact": exact,
            "distribution": distribution,
        })
    return decomposition, observable, prepared


def experiment_shots(config: ExperimentConfig) -> int:
    """The total budget N shared by the uncut and cut arms of one run."""
    if config.mode == "preestimation":
        shots = sampler.preestimation_budget(config.epsilon, BUDGET_KAPPA)
    else:
        shots = sampler.hoeffding_shots(config.epsilon, config.delta, BUDGET_KAPPA)
    return shots + shots % 2


def _run_one(args):
    config, decomposition, observable, prep, rep, c = args
    shots = experiment_shots(config)
    run_seed = int(np.random.SeedSequence(entropy=config.seed, spawn_key=(rep, c)).generate_state(1)[0])
    uncut = sampler.sample_uncut(prep["distribution"], observable.values, shots, _rng(run_seed, 0))
    budget = sampler.ShotBudget(shots, config.epsilon, decomposition.kappa, mode=config.mode)
    if config.mode == "preestimation":
        record = sampler.preestimation_mode(prep["terms"], budget, run_seed,
                                            prep["values_a"], prep["values_b"],
                                            decomposition=decomposition)
    else:
        record = sampler.sample_circuit_mode(prep["terms"], budget, run_seed,
                                             prep["values_a"], prep["values_b"],
                                             decomposition=decomposition)
    return RunRow(rep, c, run_seed, prep["exact"], uncut, record.estimate,
                  shots, decomposition.kappa, config.mode)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[RunRow]:
    """Produce one row per (repetition, circuit) pair, in that order."""
    decomposition, observable, prepared = _prepare_circuits(config)
    tasks = [(config, decomposition, observable, prepared[c], rep, c)
             for rep in range(config.repetitions) for c in range(config.circuits)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // workers)))
    else:
        rows = [_run_one(t) for t in tasks]
    rows.sort(key=lambda r: (r.repetition, r.circuit_index))
    return rows


def rows_to_csv(rows: list[RunRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["repetition", "circuit", "seed", "exact", "uncut_estimate",
                     "cut_estimate", "uncut_error", "cut_error", "shots", "kappa", "mode"])
    for r in rows:
        writer.writerow([r.repetition, r.circuit_index, r.seed,
                         repr(r.exact), repr(r.uncut_estimate), repr(r.cut_estimate),
                         repr(r.uncut_error), repr(r.cut_error), r.shots, repr(r.kappa), r.mode])
    return buf.getvalue()


def _arm_summary(errors) -> dict:
    errors = list(errors)
    if len(errors) < 2:
        return {"std_dev": None, "mean": errors[0] if errors else None, "quantiles": None}
    report = sampler.empirical_variance_report(errors)
    return {"std_dev": report.std_dev, "mean": report.mean, "quantiles": report.quantiles}


def summarize(rows: list[RunRow], config: ExperimentConfig) -> dict:
    return {
        "config": {
            "num_qubits": config.num_qubits, "k": config.k, "m": config.m,
            "epsilon": config.epsilon, "mode": config.mode,
            "repetitions": config.repetitions, "circuits": config.circuits,
            "seed": config.seed,
        },
        "shots": rows[0].shots if rows else None,
        "kappa": rows[0].kappa if rows else None,
        "uncut": _arm_summary(r.uncut_error for r in rows),
        "cut": _arm_summary(r.cut_error for r in rows),
    }


def summary_json(rows: list[RunRow], config: ExperimentConfig) -> str:
    return json.dumps(summarize(rows, config), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Sampling-overhead table
# ---------------------------------------------------------------------------

def kappa_table(max_order: int = 6) -> list[dict]:
    """Overhead constants for every split up to the given order."""
    rows = []
    for order in range(2, max_order + 1):
        for k in range(1, order // 2 + 1):
            m = order - k
            d = cutter.decompose_mcz(k, m)
            if order == 2:
                label = "CZ"
            elif order == 3 and k == 1:
                label = "CCZ"
            elif k == 1:
                label = f"one qubit removed (order {order})"
            else:
                label = f"general split ({k},{m})"
            rows.append({"label": label, "order": order, "k": k, "m": m,
                         "kappa": d.kappa, "terms": len(d.terms)})
    return rows

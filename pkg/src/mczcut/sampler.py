"""Monte-Carlo estimators for cut circuits.

Two modes are provided.  Circuit-sampling mode draws a decomposition term
per shot with probability |a_i| / kappa, runs both subcircuits once, and
averages kappa * sign(a_i) * xi_A f_A(s_A) * xi_B f_B(s_B); the Hoeffding
bound sizes its budget.  Pre-estimation mode first estimates every
subcircuit expectation with its allocated share N_i = |a_i| N / (2 kappa)
of the budget and then combines them as sum_i a_i <O_A>_i <O_B>_i.

Sampling is executed by aggregated multinomial draws over the exact branch
and outcome distributions, which is statistically identical to a per-shot
loop, deterministic for a fixed seed, and fast enough for the 10^8-shot
budgets.  Randomness uses PCG64 generators with per-term streams derived by
stable seed-sequence keys, so results do not depend on execution order or
worker count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cutter import Branch, Decomposition, EmbeddedTerm, side_branches


@dataclass(frozen=True)
class ShotBudget:
    """A total shot count together with the accuracy targets that justify it."""

    total: int
    epsilon: float
    kappa: float
    delta: float | None = None
    cuts: int = 1
    mode: str = "preestimation"

    @staticmethod
    def for_circuit_sampling(epsilon: float, delta: float, kappa: float, cuts: int = 1) -> "ShotBudget":
        n = hoeffding_shots(epsilon, delta, kappa, cuts)
        return ShotBudget(n, epsilon, kappa, delta, cuts, mode="circuit_sampling")

    @staticmethod
    def for_preestimation(epsilon: float, kappa: float) -> "ShotBudget":
        return ShotBudget(preestimation_budget(epsilon, kappa), epsilon, kappa, mode="preestimation")


def hoeffding_shots(epsilon: float, delta: float, kappa: float, cuts: int = 1) -> int:
    """Smallest N with N >= 2 kappa^{2K} / eps^2 * ln(2 / delta)."""
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must lie in (0, 1)")
    if kappa < 1 or cuts < 1:
        raise ValueError("kappa must be >= 1 and cuts >= 1")
    bound = 2.0 * (kappa**cuts) ** 2 / epsilon**2 * math.log(2.0 / delta)
    return int(math.ceil(bound))


def preestimation_budget(epsilon: float, kappa: float) -> int:
    """N = ceil(4 kappa^2 / eps^2), bounding the estimator's std-dev by eps."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return int(math.ceil(4.0 * kappa**2 / epsilon**2))


@dataclass(frozen=True)
class TermAllocation:
    index: int
    shots: int  # per subcircuit; the term consumes 2 * shots of the budget


def allocate(decomposition: Decomposition, total: int) -> list[TermAllocation]:
    """Split a budget as N_i = round(|a_i| N / (2 kappa)) per subcircuit.

    The rounding residual is assigned to the largest-|a| term so that
    2 * sum_i N_i = N exactly; every term receives at least one shot per
    subcircuit.  The total must be even and large enough to cover all terms.
    """
    terms = decomposition.terms
    if total < 2 * len(terms):
        raise ValueError(f"budget {total} cannot cover {len(terms)} terms at one shot per subcircuit")
    if total % 2:
        raise ValueError("total shot budget must be even (each term runs two subcircuits)")
    kap = decomposition.kappa
    shares = [abs(t.coefficient) * total / (2.0 * kap) for t in terms]
    counts = [max(1, int(math.floor(x + 0.5))) for x in shares]
    largest = max(range(len(terms)), key=lambda i: abs(terms[i].coefficient))
    counts[largest] += total // 2 - sum(counts)
    if counts[largest] < 1:
        raise ValueError("budget too small after rounding repair")
    return [TermAllocation(i, c) for i, c in enumerate(counts)]


@dataclass
class EstimateRecord:
    """One estimation result with everything needed to reproduce it."""

    estimate: float
    std_dev: float
    shots: int
    mode: str
    seed: int
    kappa: float
    per_term: list[dict] = field(default_factory=list)
    variance_bound: float | None = None
    max_abs_shot: float | None = None

    def to_json(self) -> str:
        doc = {
            "seed": self.seed,
            "mode": self.mode,
            "budget": self.shots,
            "kappa": self.kappa,
            "estimate": self.estimate,
            "std_dev": self.std_dev,
            "variance_bound": self.variance_bound,
            "max_abs_shot": self.max_abs_shot,
            "allocations": [t.get("shots") for t in self.per_term],
            "per_term": self.per_term,
        }
        return json.dumps(doc, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# Aggregated sampling over exact branch tables
# ---------------------------------------------------------------------------

@dataclass
class SideTable:
    branches: list[Branch]
    values: np.ndarray  # observable values per outcome

    @property
    def exact(self) -> float:
        return float(sum(b.prob * b.sign * float(b.distribution @ self.values) for b in self.branches))


def _term_tables(terms: list[EmbeddedTerm], values_a: np.ndarray, values_b: np.ndarray):
    return [(SideTable(side_branches(t.side_a), values_a),
             SideTable(side_branches(t.side_b), values_b)) for t in terms]


def _rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=key)))


def _sample_side_sum(table: SideTable, shots: int, rng: np.random.Generator):
    """Draw ``shots`` independent runs of one subcircuit; return (sum, sum of squares)."""
    probs = np.array([b.prob for b in table.branches])
    probs = probs / probs.sum()
    branch_counts = rng.multinomial(shots, probs)
    total = 0.0
    total_sq = 0.0
    for branch, count in zip(table.branches, branch_counts):
        if count == 0:
            continue
        if branch.sign == 0.0:
            continue  # discarded branches contribute zero
        dist = branch.distribution / branch.distribution.sum()
        outcome_counts = rng.multinomial(count, dist)
        vals = branch.sign * table.values
        total += float(outcome_counts @ vals)
        total_sq += float(outcome_counts @ vals**2)
    return total, total_sq


def _sample_joint_products(table_a: SideTable, table_b: SideTable, shots: int,
                           rng: np.random.Generator):
    """Draw ``shots`` paired runs; return per-shot product sums (sum, sum of squares, max |v|)."""
    probs_a = np.array([b.prob for b in table_a.branches])
    probs_b = np.array([b.prob for b in table_b.branches])
    joint = np.outer(probs_a / probs_a.sum(), probs_b / probs_b.sum()).reshape(-1)
    pair_counts = rng.multinomial(shots, joint).reshape(len(table_a.branches), len(table_b.branches))
    total = 0.0
    total_sq = 0.0
    vmax = 0.0
    for ia, branch_a in enumerate(table_a.branches):
        for ib, branch_b in enumerate(table_b.branches):
            count = int(pair_counts[ia, ib])
            if count == 0:
                continue
            if branch_a.sign == 0.0 or branch_b.sign == 0.0:
                continue
            dist = np.outer(branch_a.distribution / branch_a.distribution.sum(),
                            branch_b.distribution / branch_b.distribution.sum()).reshape(-1)
            outcome_counts = rng.multinomial(count, dist)
            vals = np.outer(branch_a.sign * table_a.values,
                            branch_b.sign * table_b.values).reshape(-1)
            total += float(outcome_counts @ vals)
            total_sq += float(outcome_counts @ vals**2)
            vmax = max(vmax, float(np.max(np.abs(vals[outcome_counts > 0]))))
    return total, total_sq, vmax


def sample_circuit_mode(terms: list[EmbeddedTerm], budget: ShotBudget, seed: int,
                        values_a: np.ndarray, values_b: np.ndarray,
                        decomposition: Decomposition | None = None,
                        force: bool = False) -> EstimateRecord:
    """Per-shot estimator: draw term i with p(i) = |a_i| / kappa, run the pair,
    score kappa * sign(a_i) times the signed product of the two outcomes."""
    if decomposition is not None and not decomposition.verified and not force:
        raise ValueError("decomposition has not been verified; pass force=True to override")
    coeffs = np.array([t.coefficient for t in terms])
    kap = float(np.abs(coeffs).sum())
    probs = np.abs(coeffs) / kap
    n_total = budget.total
    rng_terms = _rng_for(seed, 0)
    term_counts = rng_terms.multinomial(n_total, probs)
    tables = _term_tables(terms, values_a, values_b)

    total = 0.0
    total_sq = 0.0
    per_term = []
    max_abs = 0.0
    for i, ((table_a, table_b), count) in enumerate(zip(tables, term_counts)):
        if count == 0:
            per_term.append({"index": i, "coefficient": float(coeffs[i]), "shots": 0})
            continue
        rng = _rng_for(seed, 1, i)
        s, s2, vmax = _sample_joint_products(table_a, table_b, int(count), rng)
        sign = math.copysign(1.0, coeffs[i])
        total += kap * sign * s
        total_sq += kap**2 * s2
        max_abs = max(max_abs, kap * vmax)
        per_term.append({"index": i, "coefficient": float(coeffs[i]), "shots": int(count),
                         "mean_product": s / count})
    mean = total / n_total
    var_shot = max(total_sq / n_total - mean**2, 0.0)
    std_err = math.sqrt(var_shot / n_total)
    return EstimateRecord(mean, std_err, n_total, "circuit_sampling", seed, kap, per_term,
                          max_abs_shot=max_abs)


def preestimation_mode(terms: list[EmbeddedTerm], budget: ShotBudget, seed: int,
                       values_a: np.ndarray, values_b: np.ndarray,
                       decomposition: Decomposition | None = None,
                       allocations: list[TermAllocation] | None = None,
                       force: bool = False) -> EstimateRecord:
    """Estimate each subcircuit expectation with its allocated shots, then
    combine as sum_i a_i <O_A>_i <O_B>_i."""
    if decomposition is not None and not decomposition.verified and not force:
        raise ValueError("decomposition has not been verified; pass force=True to override")
    coeffs = np.array([t.coefficient for t in terms])
    kap = float(np.abs(coeffs).sum())
    if allocations is None:
        if decomposition is None:
            raise ValueError("either a decomposition or explicit allocations are required")
        allocations = allocate(decomposition, budget.total)
    tables = _term_tables(terms, values_a, values_b)

    estimate = 0.0
    variance = 0.0
    variance_bound = 0.0
    per_term = []
    for alloc, (table_a, table_b), a in zip(allocations, tables, coeffs):
        n_i = alloc.shots
        rng_a = _rng_for(seed, 2, alloc.index, 0)
        rng_b = _rng_for(seed, 2, alloc.index, 1)
        sum_a, sq_a = _sample_side_sum(table_a, n_i, rng_a)
        sum_b, sq_b = _sample_side_sum(table_b, n_i, rng_b)
        mean_a, mean_b = sum_a / n_i, sum_b / n_i
        var_a = max(sq_a / n_i - mean_a**2, 0.0) / n_i
        var_b = max(sq_b / n_i - mean_b**2, 0.0) / n_i
        estimate += a * mean_a * mean_b
        variance += a**2 * (var_a * mean_b**2 + var_b * mean_a**2 + var_a * var_b)
        variance_bound += a**2 * 2.0 / n_i
        per_term.append({"index": alloc.index, "coefficient": float(a), "shots": n_i,
                         "mean_a": mean_a, "mean_b": mean_b})
    return EstimateRecord(estimate, math.sqrt(variance), budget.total, "preestimation",
                          seed, kap, per_term, variance_bound=variance_bound)


def sample_uncut(distribution: np.ndarray, values: np.ndarray, shots: int,
                 rng: np.random.Generator) -> float:
    """Plain sampling estimate of a diagonal observable from a full-circuit distribution."""
    counts = rng.multinomial(shots, distribution / distribution.sum())
    return float(counts @ values) / shots


@dataclass(frozen=True)
class VarianceReport:
    count: int
    mean: float
    std_dev: float
    quantiles: dict[str, float]


def empirical_variance_report(errors) -> VarianceReport:
    """Mean, std-dev and the 5/25/75/95% quantiles of a batch of estimation errors."""
    arr = np.asarray(list(errors), dtype=float)
    if arr.size < 2:
        raise ValueError("need at least two records to report variance")
    qs = np.quantile(arr, [0.05, 0.25, 0.75, 0.95])
    return VarianceReport(
        count=int(arr.size),
        mean=float(arr.mean()),
        std_dev=float(arr.std(ddof=1)),
        quantiles={"5%": float(qs[0]), "25%": float(qs[1]), "75%": float(qs[2]), "95%": float(qs[3])},
    )

"""Minimal-change intervention optimization.

Per student, choose integer improvements to the actionable variables that
maximize weighted expected benefit minus a per-intervention resistance
penalty:

    max  sum_i w_i * dx_i  -  lambda * sum_i z_i
    s.t. lower_i <= baseline_i + dx_i <= upper_i
         0 <= dx_i <= max_step * z_i,   z_i in {0, 1}
         sum_i z_i <= K                 (optional cardinality cap)

The solver is an exact depth-first branch and bound on the activation
variables with combinatorial bounds (no LP relaxation needed: with linear
benefit and nonnegative weights, the best change for an activated variable
is always its full headroom). `solve_enumerate` is the independent oracle:
a full scan over activation sets that must return a bit-identical plan.

Tie policy, shared by both solvers: higher objective wins, then fewer
interventions (changing nothing is preferred at equal value), then the
lexicographically smallest activation set. A variable whose activation
gain exactly equals the penalty is therefore left unchanged.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import (
    BadK,
    BaselineOutOfBounds,
    MissingFeature,
    NegativeLambda,
    TooManyVariables,
)
from .preprocess import FeatureVector
from .schema import SurveySchema

ENUMERATION_LIMIT = 20
# Bound slack: never prune a node whose bound is within this of the
# incumbent, so float drift cannot cut off an exact tie.
_PRUNE_EPS = 1e-12

STATUS_OPTIMAL = "optimal"
STATUS_NO_CHANGE = "no_change_optimal"


@dataclass(frozen=True)
class InterventionProblem:
    variables: tuple[str, ...]
    baseline: tuple[int, ...]
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    weights: tuple[float, ...]
    lam: float
    max_step: int = 1
    cardinality_cap: int | None = None

    def __post_init__(self):
        n = len(self.variables)
        if not (len(self.baseline) == len(self.lower) == len(self.upper) == len(self.weights) == n):
            raise ValueError("problem fields must have one entry per variable")
        if self.lam < 0:
            raise NegativeLambda(f"lambda {self.lam} must be nonnegative")
        if self.max_step < 0:
            raise ValueError("max_step must be nonnegative")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        for name, b, lo, hi in zip(self.variables, self.baseline, self.lower, self.upper):
            if not lo <= b <= hi:
                raise BaselineOutOfBounds(name, b, lo, hi)
        if self.cardinality_cap is not None and self.cardinality_cap < 0:
            raise BadK(f"cardinality cap {self.cardinality_cap} must be nonnegative")

    def headroom(self) -> tuple[int, ...]:
        """Feasible improvement per variable: min(max_step, upper - baseline)."""
        return tuple(
            min(self.max_step, hi - b) for b, hi in zip(self.baseline, self.upper)
        )


@dataclass(frozen=True)
class InterventionPlan:
    variables: tuple[str, ...]
    baseline: tuple[int, ...]
    delta: tuple[int, ...]
    active: tuple[int, ...]
    objective: float
    benefit: float
    intervention_count: int
    status: str


def _plan_from_active(problem: InterventionProblem, active: tuple[int, ...]) -> InterventionPlan:
    """Materialize the canonical plan for an activation set (ascending order).

    Benefit accumulates in ascending variable order; the enumeration oracle
    uses the identical accumulation so plans compare bit-for-bit.
    """
    headroom = problem.headroom()
    n = len(problem.variables)
    active_set = set(active)
    delta = tuple(headroom[i] if i in active_set else 0 for i in range(n))
    z = tuple(1 if i in active_set else 0 for i in range(n))
    benefit = 0.0
    for i in sorted(active_set):
        benefit += problem.weights[i] * delta[i]
    count = len(active_set)
    objective = benefit - problem.lam * count
    return InterventionPlan(
        variables=problem.variables,
        baseline=problem.baseline,
        delta=delta,
        active=z,
        objective=objective,
        benefit=benefit,
        intervention_count=count,
        status=STATUS_NO_CHANGE if count == 0 else STATUS_OPTIMAL,
    )


def _gains(problem: InterventionProblem) -> list[float]:
    """Per-variable activation gain w_i * h_i - lambda.

    Both solvers rank activation sets by sums of these gains (ascending
    index order) rather than by benefit - lambda * count: the two are equal
    in exact arithmetic, but only the gain form makes the per-variable tie
    w_i * h_i == lambda an exact float tie regardless of the rest of the set.
    """
    headroom = problem.headroom()
    return [problem.weights[i] * headroom[i] - problem.lam for i in range(len(headroom))]


def _gain_sum(gains: list[float], active_sorted) -> float:
    total = 0.0
    for i in active_sorted:
        total += gains[i]
    return total


def _beats(a_obj, a_set, b_obj, b_set) -> bool:
    """Tie policy: objective, then fewer interventions, then lexicographic."""
    if a_obj != b_obj:
        return a_obj > b_obj
    if len(a_set) != len(b_set):
        return len(a_set) < len(b_set)
    return a_set < b_set


def solve(problem: InterventionProblem) -> InterventionPlan:
    """Exact branch and bound over activation sets, deterministic."""
    all_gains = _gains(problem)
    cap = problem.cardinality_cap
    if cap is None:
        cap = len(problem.variables)

    # Only variables whose activation strictly pays off can appear in the
    # canonical optimum; everything else is dominated by leaving it out.
    candidates = [i for i, g in enumerate(all_gains) if g > 0]
    # Branch order: descending gain, ascending index on ties.
    candidates.sort(key=lambda i: (-all_gains[i], i))
    gains = [all_gains[i] for i in candidates]

    m = len(candidates)
    # suffix_best[t][r]: sum of the first r gains at or after position t
    # (gains are sorted descending, so that is the best the suffix can add).
    suffix_best = [[0.0] * (cap + 1) for _ in range(m + 1)]
    for t in range(m - 1, -1, -1):
        for r in range(1, cap + 1):
            take = gains[t] + suffix_best[t + 1][r - 1]
            suffix_best[t][r] = take if take > suffix_best[t + 1][r] else suffix_best[t + 1][r]

    best_set: tuple[int, ...] = ()
    best_gain = 0.0  # empty plan is always feasible

    chosen: list[int] = []

    def dfs(t: int, cur_gain: float) -> None:
        nonlocal best_set, best_gain
        remaining = cap - len(chosen)
        if t == m or remaining == 0:
            cand = tuple(sorted(chosen))
            total = _gain_sum(all_gains, cand)
            if _beats(total, cand, best_gain, best_set):
                best_gain, best_set = total, cand
            return
        if cur_gain + suffix_best[t][remaining] < best_gain - _PRUNE_EPS:
            return
        chosen.append(candidates[t])
        dfs(t + 1, cur_gain + gains[t])
        chosen.pop()
        dfs(t + 1, cur_gain)

    dfs(0, 0.0)
    return _plan_from_active(problem, best_set)


def solve_enumerate(problem: InterventionProblem) -> InterventionPlan:
    """Exhaustive scan of all activation sets (verification oracle)."""
    n = len(problem.variables)
    if n > ENUMERATION_LIMIT:
        raise TooManyVariables(f"{n} variables exceeds enumeration limit {ENUMERATION_LIMIT}")
    gains = _gains(problem)
    cap = problem.cardinality_cap
    if cap is None:
        cap = n

    size = 1 << n
    gain_sum = [0.0] * size
    count = [0] * size
    # Stripping the highest bit accumulates gains in ascending variable
    # order, matching _gain_sum exactly.
    for mask in range(1, size):
        hb = mask.bit_length() - 1
        rest = mask ^ (1 << hb)
        gain_sum[mask] = gain_sum[rest] + gains[hb]
        count[mask] = count[rest] + 1

    best_mask = 0
    best_gain = 0.0
    for mask in range(1, size):
        c = count[mask]
        if c > cap:
            continue
        total = gain_sum[mask]
        if total > best_gain:
            best_mask, best_gain = mask, total
        elif total == best_gain:
            bc = count[best_mask]
            if c < bc:
                best_mask = mask
            elif c == bc:
                cand = tuple(i for i in range(n) if mask >> i & 1)
                inc = tuple(i for i in range(n) if best_mask >> i & 1)
                if cand < inc:
                    best_mask = mask
    active = tuple(i for i in range(n) if best_mask >> i & 1)
    return _plan_from_active(problem, active)


def solve_with_cardinality(problem: InterventionProblem, k: int) -> InterventionPlan:
    """Maximize benefit subject to at most k interventions (penalty ignored)."""
    if not 0 <= k <= len(problem.variables):
        raise BadK(f"k {k} outside 0..{len(problem.variables)}")
    return solve(replace(problem, lam=0.0, cardinality_cap=k))


ABLATION_MODES = ("no_penalty", "equal_weights")


def ablate(problem: InterventionProblem, mode: str) -> InterventionPlan:
    """Solve a structurally modified objective.

    no_penalty drops the resistance term (lambda = 0); equal_weights levels
    the benefit coefficients at 1 while keeping the penalty, so benefit
    equals the intervention count in every returned plan.
    """
    if mode == "no_penalty":
        return solve(replace(problem, lam=0.0))
    if mode == "equal_weights":
        return solve(replace(problem, weights=tuple(1.0 for _ in problem.weights)))
    raise ValueError(f"unknown ablation mode {mode!r}; expected one of {ABLATION_MODES}")


# --- problem construction ------------------------------------------------------

def build_problem(
    record: FeatureVector,
    schema: SurveySchema,
    weights: list[tuple[str, float]],
    lam: float,
    max_step: int = 1,
    cardinality_cap: int | None = None,
) -> InterventionProblem:
    """Assemble the per-student problem from a record and actionable weights."""
    if lam < 0:
        raise NegativeLambda(f"lambda {lam} must be nonnegative")
    actionable = schema.actionable_fields
    weight_table = dict(weights)
    names, baselines, lowers, uppers, ws = [], [], [], [], []
    for f in actionable:
        if f.name not in weight_table:
            raise MissingFeature(f.name)
        value = record.values[schema.index_of(f.name)]
        baseline = int(round(value))
        if not f.lower_bound <= baseline <= f.upper_bound:
            raise BaselineOutOfBounds(f.name, baseline, f.lower_bound, f.upper_bound)
        names.append(f.name)
        baselines.append(baseline)
        lowers.append(f.lower_bound)
        uppers.append(f.upper_bound)
        ws.append(float(weight_table[f.name]))
    return InterventionProblem(
        variables=tuple(names),
        baseline=tuple(baselines),
        lower=tuple(lowers),
        upper=tuple(uppers),
        weights=tuple(ws),
        lam=float(lam),
        max_step=max_step,
        cardinality_cap=cardinality_cap,
    )


# --- files -----------------------------------------------------------------------

def problem_to_dict(problem: InterventionProblem) -> dict:
    return {
        "variables": [
            {
                "name": name,
                "baseline": problem.baseline[i],
                "lower": problem.lower[i],
                "upper": problem.upper[i],
                "weight": problem.weights[i],
            }
            for i, name in enumerate(problem.variables)
        ],
        "lambda": problem.lam,
        "max_step": problem.max_step,
        "cardinality_cap": problem.cardinality_cap,
    }


def problem_from_dict(doc: dict) -> InterventionProblem:
    entries = doc["variables"]
    return InterventionProblem(
        variables=tuple(e["name"] for e in entries),
        baseline=tuple(int(e["baseline"]) for e in entries),
        lower=tuple(int(e["lower"]) for e in entries),
        upper=tuple(int(e["upper"]) for e in entries),
        weights=tuple(float(e["weight"]) for e in entries),
        lam=float(doc["lambda"]),
        max_step=int(doc.get("max_step", 1)),
        cardinality_cap=doc.get("cardinality_cap"),
    )


def plan_to_dict(plan: InterventionPlan) -> dict:
    return {
        "variables": [
            {
                "name": name,
                "baseline": plan.baseline[i],
                "delta": plan.delta[i],
                "optimized": plan.baseline[i] + plan.delta[i],
            }
            for i, name in enumerate(plan.variables)
        ],
        "objective": plan.objective,
        "benefit": plan.benefit,
        "intervention_count": plan.intervention_count,
        "status": plan.status,
    }


def save_problem(problem: InterventionProblem, path: str | Path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=1) + "\n", encoding="utf-8")


def load_problem(path: str | Path) -> InterventionProblem:
    with open(path, encoding="utf-8") as fh:
        return problem_from_dict(json.load(fh))

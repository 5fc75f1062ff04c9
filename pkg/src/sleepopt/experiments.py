"""Cohort-level experiments: batch recommendations, resistance-parameter
sweeps, benefit/count Pareto frontiers, and objective ablations, plus the
report writer that serializes every result kind to CSV alongside rendered
figures and a reproducibility manifest.
"""
from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import BadK, IoFailure, NegativeLambda, SleepOptError
from .gbm import TreeEnsemble
from .milp import (
    InterventionPlan,
    ablate,
    build_problem,
    solve,
)
from .preprocess import FeatureVector
from .schema import SurveySchema
from .shap_values import per_student_weights

WEIGHT_SOURCES = ("population", "per_student")


@dataclass(frozen=True)
class BatchResult:
    plans: tuple[tuple[int, InterventionPlan], ...]  # (record_id, plan)
    skipped: tuple[tuple[int, str], ...]  # (record_id, reason)
    avg_count: float
    avg_benefit: float


@dataclass(frozen=True)
class SweepPoint:
    lam: float
    avg_count: float
    avg_benefit: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]


@dataclass(frozen=True)
class ParetoPoint:
    k: int
    avg_benefit: float


@dataclass(frozen=True)
class ParetoResult:
    points: tuple[ParetoPoint, ...]


@dataclass(frozen=True)
class AblationRow:
    variant: str  # full | no_penalty | equal_weights
    avg_interventions: float
    avg_benefit: float


def _record_weights(
    record: FeatureVector,
    schema: SurveySchema,
    weights,
    weight_source: str,
    model: TreeEnsemble | None,
):
    if weight_source == "population":
        return weights
    if weight_source == "per_student":
        if model is None:
            raise ValueError("per_student weighting requires the trained model")
        return per_student_weights(model, record.values, schema)
    raise ValueError(f"unknown weight_source {weight_source!r}; expected {WEIGHT_SOURCES}")


def batch_recommend(
    data: list[FeatureVector],
    schema: SurveySchema,
    weights,
    lam: float,
    max_step: int = 1,
    weight_source: str = "population",
    model: TreeEnsemble | None = None,
) -> BatchResult:
    """One plan per record; records that fail to build are reported, not imputed."""
    if not data:
        raise ValueError("dataset is empty")
    plans: list[tuple[int, InterventionPlan]] = []
    skipped: list[tuple[int, str]] = []
    ordered = sorted(
        enumerate(data), key=lambda item: item[1].record_id if item[1].record_id is not None else item[0]
    )
    for idx, record in ordered:
        rid = record.record_id if record.record_id is not None else idx
        try:
            w = _record_weights(record, schema, weights, weight_source, model)
            problem = build_problem(record, schema, w, lam, max_step=max_step)
        except SleepOptError as exc:
            skipped.append((rid, str(exc)))
            continue
        plans.append((rid, solve(problem)))

    if plans:
        avg_count = sum(p.intervention_count for _, p in plans) / len(plans)
        avg_benefit = sum(p.benefit for _, p in plans) / len(plans)
    else:
        avg_count = avg_benefit = 0.0
    return BatchResult(
        plans=tuple(plans),
        skipped=tuple(skipped),
        avg_count=avg_count,
        avg_benefit=avg_benefit,
    )


def lambda_sweep(
    data: list[FeatureVector],
    schema: SurveySchema,
    weights,
    lambdas,
    max_step: int = 1,
    weight_source: str = "population",
    model: TreeEnsemble | None = None,
) -> SweepResult:
    """batch_recommend per resistance value; points sorted by lambda."""
    if not lambdas:
        raise ValueError("lambda list is empty")
    for lam in lambdas:
        if lam < 0:
            raise NegativeLambda(f"lambda {lam} must be nonnegative")
    points = []
    for lam in sorted(lambdas):
        result = batch_recommend(
            data, schema, weights, lam,
            max_step=max_step, weight_source=weight_source, model=model,
        )
        points.append(SweepPoint(lam=float(lam), avg_count=result.avg_count, avg_benefit=result.avg_benefit))
    return SweepResult(points=tuple(points))


def pareto_frontier(
    data: list[FeatureVector],
    schema: SurveySchema,
    weights,
    k_max: int,
    max_step: int = 1,
    weight_source: str = "population",
    model: TreeEnsemble | None = None,
) -> ParetoResult:
    """Average benefit of the best-k plans for k = 0..k_max.

    Built from per-student sorted marginal gains: the k-th increment of the
    averaged curve is the cohort mean of each student's k-th best feasible
    gain, which makes the emitted curve concave by construction.
    """
    if not 0 <= k_max <= len(schema.actionable_fields):
        raise BadK(f"k_max {k_max} outside 0..{len(schema.actionable_fields)}")
    if not data:
        raise ValueError("dataset is empty")

    marginals = []
    for idx, record in enumerate(data):
        w = _record_weights(record, schema, weights, weight_source, model)
        problem = build_problem(record, schema, w, 0.0, max_step=max_step)
        headroom = problem.headroom()
        gains = sorted(
            (problem.weights[i] * headroom[i] for i in range(len(headroom))
             if problem.weights[i] * headroom[i] > 0),
            reverse=True,
        )
        marginals.append(gains)

    n = len(data)
    points = [ParetoPoint(k=0, avg_benefit=0.0)]
    running = 0.0
    for k in range(k_max):
        step = sum(m[k] for m in marginals if len(m) > k) / n
        running += step
        points.append(ParetoPoint(k=k + 1, avg_benefit=running))
    return ParetoResult(points=tuple(points))


ABLATION_VARIANTS = ("full", "no_penalty", "equal_weights")


def ablation_suite(
    data: list[FeatureVector],
    schema: SurveySchema,
    weights,
    lam: float,
    max_step: int = 1,
) -> list[AblationRow]:
    """Cohort averages for the full objective and its two ablations."""
    rows = []
    for variant in ABLATION_VARIANTS:
        counts = benefits = 0.0
        solved = 0
        for record in data:
            problem = build_problem(record, schema, weights, lam, max_step=max_step)
            if variant == "full":
                plan = solve(problem)
            else:
                plan = ablate(problem, variant)
            counts += plan.intervention_count
            benefits += plan.benefit
            solved += 1
        rows.append(
            AblationRow(
                variant=variant,
                avg_interventions=counts / solved,
                avg_benefit=benefits / solved,
            )
        )
    return rows


# --- report emission ---------------------------------------------------------

def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(c) for c in row])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json_rows(path: Path, header: list[str], rows: list[list]) -> None:
    docs = [dict(zip(header, row)) for row in rows]
    path.write_text(json.dumps(docs, indent=1) + "\n", encoding="utf-8")


def emit_report(
    out_dir: str | Path,
    *,
    sweep: SweepResult | None = None,
    pareto: ParetoResult | None = None,
    ablation: list[AblationRow] | None = None,
    batch: BatchResult | None = None,
    config: dict | None = None,
    inputs_hash: str = "",
    seed: int | None = None,
    figures: bool = True,
    fmt: str = "csv",
) -> dict:
    """Write CSVs (and figures) for every provided result; returns the manifest.

    The CSV files are always written (they are the documented interchange
    format); fmt="json" additionally writes a JSON mirror of each table.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise IoFailure(f"cannot write to {out}: {exc}") from exc

    from . import figures as figmod  # deferred: pulls in matplotlib

    files: list[str] = []

    def emit_table(stem: str, header: list[str], rows: list[list]) -> None:
        _write_csv(out / f"{stem}.csv", header, rows)
        files.append(f"{stem}.csv")
        if fmt == "json":
            _write_json_rows(out / f"{stem}.json", header, rows)
            files.append(f"{stem}.json")

    try:
        if sweep is not None:
            emit_table(
                "sweep",
                ["lambda", "avg_count", "avg_benefit"],
                [[p.lam, p.avg_count, p.avg_benefit] for p in sweep.points],
            )
            if figures:
                figmod.render_sweep(sweep, out / "sweep.png")
                files.append("sweep.png")
        if pareto is not None:
            emit_table(
                "pareto",
                ["k", "avg_benefit"],
                [[p.k, p.avg_benefit] for p in pareto.points],
            )
            if figures:
                figmod.render_pareto(pareto, out / "pareto.png")
                files.append("pareto.png")
        if ablation is not None:
            emit_table(
                "ablation",
                ["variant", "avg_interventions", "avg_benefit"],
                [[r.variant, r.avg_interventions, r.avg_benefit] for r in ablation],
            )
        if batch is not None:
            rows = []
            for rid, plan in batch.plans:
                for i, name in enumerate(plan.variables):
                    rows.append(
                        [rid, name, plan.baseline[i], plan.delta[i], plan.baseline[i] + plan.delta[i]]
                    )
            emit_table(
                "plans",
                ["record_id", "variable", "baseline", "delta", "optimized"],
                rows,
            )
            summary = {
                "avg_count": batch.avg_count,
                "avg_benefit": batch.avg_benefit,
                "n_plans": len(batch.plans),
                "skipped": [{"record_id": rid, "reason": r} for rid, r in batch.skipped],
            }
            (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")
            files.append("summary.json")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc

    manifest = {
        "inputs_hash": inputs_hash,
        "seed": seed,
        "config": config or {},
        "files": [{"name": f, "sha256": _sha256(out / f)} for f in files],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return manifest

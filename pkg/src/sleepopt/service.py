"""HTTP service for interactive what-if exploration.

The service loads a model artifact, a weights file and the schema once at
startup into an immutable session snapshot; every request is computed from
that snapshot, so concurrent calls are race-free by construction and
repeated identical requests return identical bodies. Reloading artifacts
means restarting the process.

Error contract: malformed payloads return 400 and name the offending
field; a baseline outside its schema bounds returns 422; unexpected
failures return 500 with an opaque incident id.
"""
from __future__ import annotations

import hashlib
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import gbm, milp, shap_values
from .errors import BaselineOutOfBounds, DimensionMismatch, SleepOptError
from .schema import SurveySchema, default_schema, load_schema

LAMBDA_DEFAULT = 0.2


@dataclass(frozen=True)
class SessionState:
    model: gbm.TreeEnsemble
    config: gbm.TrainConfig
    weights: shap_values.WeightVector
    schema: SurveySchema
    loaded_at: float
    artifact_hash: str


def load_session(model_path, weights_path, schema_path=None) -> SessionState:
    model, config = gbm.load_model(model_path)
    weights = shap_values.load_weights(weights_path)
    schema = load_schema(schema_path) if schema_path else default_schema()
    digest = hashlib.sha256()
    digest.update(Path(model_path).read_bytes())
    digest.update(Path(weights_path).read_bytes())
    digest.update(schema.digest().encode())
    return SessionState(
        model=model,
        config=config,
        weights=weights,
        schema=schema,
        loaded_at=time.time(),
        artifact_hash=digest.hexdigest(),
    )


class FeaturePayload(BaseModel):
    features: list[float]


class RecommendPayload(FeaturePayload):
    lam: float = Field(default=LAMBDA_DEFAULT, alias="lambda", ge=0.0)
    weight_source: str = "population"
    max_step: int = Field(default=1, ge=0)

    model_config = {"populate_by_name": True}


class SweepPayload(FeaturePayload):
    lambdas: list[float]


class ParetoPayload(FeaturePayload):
    k_max: int = Field(ge=0)


def create_app(model_path, weights_path, schema_path=None, static_dir=None) -> FastAPI:
    session = load_session(model_path, weights_path, schema_path)
    app = FastAPI(title="sleepopt what-if service")
    app.state.session = session

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = [str(part) for part in first.get("loc", []) if part != "body"]
        return JSONResponse(
            status_code=400,
            content={"error": first.get("msg", "invalid payload"), "field": ".".join(loc) or "body"},
        )

    @app.exception_handler(BaselineOutOfBounds)
    async def baseline_handler(request: Request, exc: BaselineOutOfBounds):
        return JSONResponse(status_code=422, content={"error": str(exc), "field": exc.field})

    @app.exception_handler(DimensionMismatch)
    async def dimension_handler(request: Request, exc: DimensionMismatch):
        return JSONResponse(status_code=400, content={"error": str(exc), "field": "features"})

    @app.exception_handler(SleepOptError)
    async def domain_handler(request: Request, exc: SleepOptError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(Exception)
    async def internal_handler(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={"error": "internal failure", "incident": uuid.uuid4().hex},
        )

    def _features(payload: FeaturePayload) -> np.ndarray:
        x = np.asarray(payload.features, dtype=float)
        if x.shape != (session.model.feature_count,):
            raise DimensionMismatch(
                f"features must have length {session.model.feature_count}, got {len(payload.features)}"
            )
        return x

    def _record(x: np.ndarray):
        from .preprocess import FeatureVector

        return FeatureVector(values=tuple(float(v) for v in x), record_id=0)

    def _weights_for(x: np.ndarray, source: str):
        if source == "population":
            return shap_values.actionable_weights(session.weights, session.schema)
        if source == "per_student":
            return shap_values.per_student_weights(session.model, x, session.schema)
        raise SleepOptError(f"unknown weight_source {source!r}; expected population or per_student")

    @app.get("/health")
    async def health():
        return {"status": "ok", "artifact_hash": session.artifact_hash}

    @app.post("/predict")
    async def predict(payload: FeaturePayload):
        x = _features(payload)
        margin = gbm.predict_margin(session.model, x)
        proba = float(gbm.sigmoid(margin))
        return {"probability": proba, "label": int(proba >= 0.5), "margin": margin}

    @app.post("/explain")
    async def explain(payload: FeaturePayload):
        x = _features(payload)
        phi, base = shap_values.tree_shap(session.model, x)
        margin = gbm.predict_margin(session.model, x)
        if abs(base + float(phi.sum()) - margin) > 1e-9:
            raise RuntimeError("local accuracy check failed")  # 500: malformed artifact
        return {
            "phi": [float(v) for v in phi],
            "base_value": base,
            "feature_names": list(session.schema.field_names),
            "margin": margin,
        }

    @app.post("/recommend")
    async def recommend(payload: RecommendPayload):
        x = _features(payload)
        weights = _weights_for(x, payload.weight_source)
        problem = milp.build_problem(
            _record(x), session.schema, weights, payload.lam, max_step=payload.max_step
        )
        plan = milp.solve(problem)
        doc = milp.plan_to_dict(plan)
        doc["lambda"] = payload.lam
        doc["weight_source"] = payload.weight_source
        return doc

    @app.post("/sweep")
    async def sweep(payload: SweepPayload):
        x = _features(payload)
        if not payload.lambdas:
            raise SleepOptError("lambdas must be nonempty")
        weights = _weights_for(x, "population")
        points = []
        for lam in sorted(payload.lambdas):
            if lam < 0:
                raise SleepOptError(f"lambda {lam} must be nonnegative")
            problem = milp.build_problem(_record(x), session.schema, weights, lam)
            plan = milp.solve(problem)
            points.append(
                {
                    "lambda": lam,
                    "intervention_count": plan.intervention_count,
                    "benefit": plan.benefit,
                    "objective": plan.objective,
                }
            )
        return {"points": points}

    @app.post("/pareto")
    async def pareto(payload: ParetoPayload):
        x = _features(payload)
        n_vars = len(session.schema.actionable_fields)
        if payload.k_max > n_vars:
            raise SleepOptError(f"k_max {payload.k_max} exceeds variable count {n_vars}")
        weights = _weights_for(x, "population")
        problem = milp.build_problem(_record(x), session.schema, weights, 0.0)
        points = []
        for k in range(payload.k_max + 1):
            plan = milp.solve_with_cardinality(problem, k)
            points.append({"k": k, "benefit": plan.benefit})
        return {"points": points}

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

"""Command-line interface: the full pipeline as scripted subcommands.

Every run resolves its configuration, writes its artifacts under --out, and
drops a manifest.json echoing the resolved config, input digests and seed so
reruns are reproducible byte for byte.

Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import experiments, figures, gbm, preprocess, shap_values, synthetic
from .errors import SleepOptError
from .schema import SurveySchema, default_schema, load_schema

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

ENV_OUT = "SLEEPOPT_OUT"
ENV_SEED = "SLEEPOPT_SEED"

DEFAULT_LAMBDAS = (0.1, 0.2, 0.3)
PRIMARY_LAMBDA = 0.2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out: Path, command: str, config: dict, inputs: list[Path],
                    files: list[str], seed: int | None) -> None:
    # Inputs are recorded by basename + digest (not absolute path) so reruns
    # from different directories with identical content stay byte-identical.
    config = {
        k: (Path(v).name if isinstance(v, str) and ("/" in v or "\\" in v) else v)
        for k, v in config.items()
    }
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "inputs": [{"name": p.name, "sha256": _sha256_file(p)} for p in inputs],
        "files": [{"name": f, "sha256": _sha256_file(out / f)} for f in files],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")


def _load_schema_arg(args) -> SurveySchema:
    if args.schema:
        return load_schema(args.schema)
    return default_schema()


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise SleepOptError(f"expected comma-separated numbers, got {text!r}") from None


def _dataset_arg(path: str, schema) -> list[preprocess.FeatureVector]:
    return preprocess.read_encoded_csv(path, schema)


def _weights_arg(path: str, schema) -> list[tuple[str, float]]:
    wv = shap_values.load_weights(path)
    return shap_values.actionable_weights(wv, schema)


# --- subcommand implementations ----------------------------------------------

def _cmd_preprocess(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    data = preprocess.preprocess_survey(args.infile, schema, psqi_cutoff=args.psqi_cutoff)
    if args.augment_to:
        data = preprocess.augment_dataset(data, args.augment_to, schema, seed=args.seed)
    preprocess.write_encoded_csv(data, schema, out / "encoded.csv")
    _write_manifest(
        out, "preprocess",
        {"in": args.infile, "psqi_cutoff": args.psqi_cutoff,
         "augment_to": args.augment_to, "schema_hash": schema.digest()},
        [Path(args.infile)], ["encoded.csv"], args.seed,
    )
    print(f"wrote {out / 'encoded.csv'} ({len(data)} records)")
    return EXIT_OK


def _cmd_synth(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    planted = _parse_floats(args.planted)
    data = synthetic.generate_synthetic(
        args.n, planted, args.noise, seed=args.seed, schema=schema, bias=args.bias
    )
    preprocess.write_encoded_csv(data, schema, out / "synthetic.csv")
    _write_manifest(
        out, "synth",
        {"n": args.n, "planted": planted, "noise": args.noise, "bias": args.bias,
         "schema_hash": schema.digest()},
        [], ["synthetic.csv"], args.seed,
    )
    print(f"wrote {out / 'synthetic.csv'} ({len(data)} records)")
    return EXIT_OK


def _cmd_train(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    data = _dataset_arg(args.data, schema)
    ratios = tuple(_parse_floats(args.ratios))
    if len(ratios) != 3:
        raise SleepOptError(f"--ratios needs three values, got {args.ratios!r}")
    split = preprocess.split_dataset(data, ratios, seed=args.seed)
    Xtr, ytr = preprocess.dataset_to_arrays(split.train)
    Xva, yva = preprocess.dataset_to_arrays(split.validation)
    Xte, yte = preprocess.dataset_to_arrays(split.test)

    base = gbm.TrainConfig(seed=args.seed)
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = gbm.TrainConfig(**{**asdict(base), **json.load(fh)})
        best, leaderboard = cfg, None
    elif args.grid:
        result = gbm.grid_search(Xtr, ytr, Xva, yva, gbm.DEFAULT_GRID, base=base)
        best, leaderboard = result.best, result.leaderboard
    else:
        best, leaderboard = base, None

    model = gbm.train_ensemble(Xtr, ytr, best)
    gbm.save_model(model, best, out / "model.json", schema_hash=schema.digest())

    test_metrics = gbm.evaluate(model, Xte, yte)
    val_metrics = gbm.evaluate(model, Xva, yva)
    (out / "metrics.json").write_text(
        json.dumps({"validation": asdict(val_metrics), "test": asdict(test_metrics)}, indent=1) + "\n",
        encoding="utf-8",
    )
    files = ["model.json", "metrics.json"]

    if leaderboard is not None:
        import csv as _csv

        with open(out / "leaderboard.csv", "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            params = list(gbm.DEFAULT_GRID.keys())
            writer.writerow(["rank"] + params + ["val_f1", "val_accuracy", "val_precision", "val_recall", "error"])
            for rank, cell in enumerate(leaderboard):
                row = [rank] + [getattr(cell.config, p) for p in params]
                if cell.metrics is not None:
                    row += [repr(cell.metrics.f1), repr(cell.metrics.accuracy),
                            repr(cell.metrics.precision), repr(cell.metrics.recall), ""]
                else:
                    row += ["", "", "", "", cell.error]
                writer.writerow(row)
        files.append("leaderboard.csv")

    _write_manifest(
        out, "train",
        {"data": args.data, "ratios": ratios, "grid": bool(args.grid),
         "config": asdict(best), "schema_hash": schema.digest()},
        [Path(args.data)], files, args.seed,
    )
    print(f"test f1={test_metrics.f1:.4f} accuracy={test_metrics.accuracy:.4f}")
    print(f"wrote {out / 'model.json'}")
    return EXIT_OK


def _split_for_explain(data, which: str, seed: int):
    if which == "all":
        return data
    split = preprocess.split_dataset(data, (0.6, 0.2, 0.2), seed=seed)
    return {"train": split.train, "val": split.validation, "test": split.test}[which]


def _cmd_explain(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    model, _config = gbm.load_model(args.model)
    data = _dataset_arg(args.data, schema)
    subset = _split_for_explain(data, args.split, args.seed)
    X, _ = preprocess.dataset_to_arrays(subset)
    ids = [fv.record_id if fv.record_id is not None else i for i, fv in enumerate(subset)]
    report = shap_values.explain_dataset(model, X, schema.field_names, sample_ids=ids)
    shap_values.verify_local_accuracy(model, report, X)
    weights = shap_values.mean_abs_weights(report)

    shap_values.write_attribution_csv(report, out / "phi.csv")
    shap_values.save_weights(weights, out / "weights.json")
    files = ["phi.csv", "weights.json"]
    if not args.no_figures:
        figures.render_attribution(weights.raw, out / "attribution.png")
        files.append("attribution.png")
    _write_manifest(
        out, "explain",
        {"model": args.model, "data": args.data, "split": args.split,
         "schema_hash": schema.digest()},
        [Path(args.model), Path(args.data)], files, args.seed,
    )
    print(f"wrote {out / 'weights.json'} (total mass {weights.total_mass:.4f})")
    return EXIT_OK


def _recommend_inputs(args, schema):
    data = _dataset_arg(args.data, schema)
    weights = _weights_arg(args.model_weights, schema)
    model = None
    source = "population"
    if args.per_student_weights:
        if not args.model:
            raise SleepOptError("--per-student-weights requires --model")
        model, _ = gbm.load_model(args.model)
        source = "per_student"
    return data, weights, model, source


def _cmd_recommend(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    data, weights, model, source = _recommend_inputs(args, schema)
    batch = experiments.batch_recommend(
        data, schema, weights, args.lam, max_step=args.max_step,
        weight_source=source, model=model,
    )
    experiments.emit_report(
        out, batch=batch, figures=not args.no_figures, fmt=args.format,
        config={"lambda": args.lam, "max_step": args.max_step, "weight_source": source},
        inputs_hash=_sha256_file(Path(args.data)), seed=args.seed,
    )
    print(f"wrote {out / 'plans.csv'}: avg_count={batch.avg_count:.3f} avg_benefit={batch.avg_benefit:.4f}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    data, weights, model, source = _recommend_inputs(args, schema)
    lambdas = _parse_floats(args.lambdas)
    sweep = experiments.lambda_sweep(
        data, schema, weights, lambdas, max_step=args.max_step,
        weight_source=source, model=model,
    )
    experiments.emit_report(
        out, sweep=sweep, figures=not args.no_figures, fmt=args.format,
        config={"lambdas": lambdas, "max_step": args.max_step, "weight_source": source,
                "mechanism": "lambda_parametrization"},
        inputs_hash=_sha256_file(Path(args.data)), seed=args.seed,
    )
    print(f"wrote {out / 'sweep.csv'} ({len(sweep.points)} points)")
    return EXIT_OK


def _cmd_pareto(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    data, weights, model, source = _recommend_inputs(args, schema)
    pareto = experiments.pareto_frontier(
        data, schema, weights, args.kmax, max_step=args.max_step,
        weight_source=source, model=model,
    )
    experiments.emit_report(
        out, pareto=pareto, figures=not args.no_figures, fmt=args.format,
        config={"k_max": args.kmax, "max_step": args.max_step, "weight_source": source,
                "mechanism": "cardinality_constraint"},
        inputs_hash=_sha256_file(Path(args.data)), seed=args.seed,
    )
    print(f"wrote {out / 'pareto.csv'} ({len(pareto.points)} points)")
    return EXIT_OK


def _cmd_ablate(args) -> int:
    schema = _load_schema_arg(args)
    out = _outdir(args)
    data = _dataset_arg(args.data, schema)
    weights = _weights_arg(args.model_weights, schema)
    rows = experiments.ablation_suite(data, schema, weights, args.lam, max_step=args.max_step)
    experiments.emit_report(
        out, ablation=rows, figures=False, fmt=args.format,
        config={"lambda": args.lam, "max_step": args.max_step},
        inputs_hash=_sha256_file(Path(args.data)), seed=args.seed,
    )
    print(f"wrote {out / 'ablation.csv'}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        model_path=args.model,
        weights_path=args.model_weights,
        schema_path=args.schema,
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# --- argument grammar -----------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="sleepopt", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--schema", default=None, help="schema JSON (default: packaged)")
    common.add_argument("--out", default=os.environ.get(ENV_OUT, "out"), help="output directory")
    common.add_argument("--seed", type=int, default=int(os.environ.get(ENV_SEED, "0")))
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", parents=[common], help="encode a raw survey CSV")
    p.add_argument("--in", dest="infile", required=True, help="raw survey CSV")
    p.add_argument("--psqi-cutoff", type=int, default=5)
    p.add_argument("--augment-to", type=int, default=None)
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic cohort")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--planted", required=True, help="comma-separated coefficients (one per feature)")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--bias", type=float, default=0.0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", parents=[common], help="train (optionally grid search) a model")
    p.add_argument("--data", required=True, help="encoded dataset CSV")
    p.add_argument("--grid", action="store_true", help="search the full hyperparameter grid")
    p.add_argument("--config", default=None, help="train one config from a JSON file")
    p.add_argument("--ratios", default="0.6,0.2,0.2")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("explain", parents=[common], help="attributions and derived weights")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", choices=("train", "val", "test", "all"), default="test")
    p.set_defaults(func=_cmd_explain)

    def recommend_args(p):
        p.add_argument("--model-weights", required=True, help="weights.json from explain")
        p.add_argument("--data", required=True)
        p.add_argument("--max-step", type=int, default=1)
        p.add_argument("--per-student-weights", action="store_true")
        p.add_argument("--model", default=None, help="model.json (per-student weights)")

    p = sub.add_parser("recommend", parents=[common], help="per-record intervention plans")
    recommend_args(p)
    p.add_argument("--lambda", dest="lam", type=float, default=PRIMARY_LAMBDA)
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("sweep", parents=[common], help="resistance sensitivity sweep")
    recommend_args(p)
    p.add_argument("--lambdas", default=",".join(str(v) for v in DEFAULT_LAMBDAS))
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("pareto", parents=[common], help="benefit/count frontier")
    recommend_args(p)
    p.add_argument("--kmax", type=int, default=7)
    p.set_defaults(func=_cmd_pareto)

    p = sub.add_parser("ablate", parents=[common], help="objective ablation table")
    p.add_argument("--model-weights", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--max-step", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=float, default=PRIMARY_LAMBDA)
    p.set_defaults(func=_cmd_ablate)

    p = sub.add_parser("serve", parents=[common], help="run the what-if HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--model-weights", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", default=None, help="directory of UI assets to serve")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse --help / usage errors
        return int(exc.code or 0)
    except SleepOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Operator command line: ingest, score, analyze, train, serve.

Options resolve in precedence order: explicit flag, RECIPESIM_* environment
variable, config file entry (--config, a JSON object keyed by flag name),
built-in default. Exit codes: 0 success, 1 input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Callable

from . import analysis, figures, ml
from .annotation import JudgmentStore, create_task_set, read_task_set, write_task_set
from .corpus import CorpusError, parse_corpus_file
from .fusion import (
    FusionWeights,
    read_score_table_file,
    score_all,
    write_score_table_file,
    write_skip_report,
)
from .semantic import HttpEmbeddingProvider, load_embeddings

REPORT_WRITERS = {
    "stats": ("stats.csv", analysis.write_stats_report),
    "correlation": ("correlation.csv", analysis.write_correlation_report),
    "failures": ("failures.csv", None),  # needs rules/denominator, handled inline
    "bins": ("bins.csv", analysis.write_bins_report),
    "model-comparison": ("model_comparison.csv", analysis.write_model_comparison_report),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse default exits 2; usage errors are input errors
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recipesim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and validate a corpus file")
    p.add_argument("corpus", help="line-delimited corpus file")

    p = sub.add_parser("score", help="score all recipe pairs and write the table")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--corpus", help="corpus file")
    p.add_argument("--embeddings-a", help="embedding file for provider slot model_a")
    p.add_argument("--embeddings-b", help="embedding file for provider slot model_b")
    p.add_argument("--embed-endpoint", help="external embedding service URL (replaces files)")
    p.add_argument("--embed-dimension", type=int, help="dimension for the external service")
    p.add_argument("--embed-timeout", type=float, help="external service timeout seconds")
    p.add_argument("--weights", help="fusion weights as SEM,LEX,NUTR (default equal thirds)")
    p.add_argument("--pair-convention", choices=["unordered", "ordered"])
    p.add_argument("--workers", type=int, help="worker count (default 1)")
    p.add_argument("--on-missing", choices=["skip", "abort"], help="missing-embedding policy")
    p.add_argument("--out-dir", help="output directory (default .)")

    p = sub.add_parser("analyze", help="emit report tables (and figures) for a score table")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--table", help="score table CSV")
    p.add_argument("--convention", choices=["unordered", "ordered"], help="table pair convention")
    p.add_argument("--rules", help="JSON failure-rules file (default: built-in rules)")
    p.add_argument("--reports", help="comma list from: " + ",".join(REPORT_WRITERS))
    p.add_argument("--denominator", choices=["table", "ordered", "unordered"])
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--out-dir", help="output directory (default .)")

    p = sub.add_parser("train", help="train and cross-validate a classifier")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--ground-truth", help="labeled pair CSV (main_id,secondary_id,label)")
    p.add_argument("--table", help="score table CSV providing the features")
    p.add_argument("--model", choices=["logistic", "forest"])
    p.add_argument("--seed", type=int)
    p.add_argument("--folds", type=int)
    p.add_argument("--l2-strength", type=float)
    p.add_argument("--trees", type=int)
    p.add_argument("--out", help="report file (default model_report.csv)")

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--corpus", help="corpus file")
    p.add_argument("--task-set", help="task set file (loaded if present, else created)")
    p.add_argument("--table", help="score table to build the task set from")
    p.add_argument("--n-mains", type=int, help="main recipes to sample (default 100)")
    p.add_argument("--fraction", type=float, help="top fraction of candidates per main")
    p.add_argument("--k", type=int, help="top-k candidates per main")
    p.add_argument("--seed", type=int)
    p.add_argument("--store", help="judgment log path")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--reveal-scores", action="store_true", default=None)
    p.add_argument("--roster", help="comma list of allowed expert ids (closed roster)")
    p.add_argument("--ui-dir", help="directory of built frontend assets to serve at /")
    return parser


def _load_config(args: argparse.Namespace) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError("config file must contain a JSON object")
    return config


def _resolve(
    args: argparse.Namespace,
    config: dict,
    name: str,
    default: Any = None,
    cast: Callable[[str], Any] | None = None,
) -> Any:
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    env = os.environ.get("RECIPESIM_" + name.replace("-", "_").upper())
    if env is not None:
        return cast(env) if cast else env
    if name in config:
        return config[name]
    return default


def _require(value: Any, flag: str) -> Any:
    if value is None:
        raise ValueError(f"missing required option --{flag}")
    return value


def _parse_weights(raw: str | None) -> FusionWeights:
    if raw is None:
        return FusionWeights()
    parts = [float(p) for p in str(raw).split(",")]
    if len(parts) != 3:
        raise ValueError("weights must be three comma-separated numbers: SEM,LEX,NUTR")
    return FusionWeights(w_sem=parts[0], w_lex=parts[1], w_nutr=parts[2])


def _cmd_ingest(args: argparse.Namespace) -> int:
    result = parse_corpus_file(args.corpus)
    print(f"accepted: {result.accepted}")
    print(f"rejected: {len(result.rejects)}")
    for reject in result.rejects:
        print(f"  line {reject.line_number}: {reject.reason}")
    print(f"nutrient schema: {', '.join(result.corpus.nutrient_schema)}")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    config = _load_config(args)
    corpus_path = _require(_resolve(args, config, "corpus"), "corpus")
    result = parse_corpus_file(corpus_path)
    if result.rejects:
        print(f"warning: {len(result.rejects)} rejected corpus lines", file=sys.stderr)

    endpoint = _resolve(args, config, "embed-endpoint")
    if endpoint:
        dimension = _require(
            _resolve(args, config, "embed-dimension", cast=int), "embed-dimension"
        )
        timeout = _resolve(args, config, "embed-timeout", default=10.0, cast=float)
        provider_a = HttpEmbeddingProvider(endpoint, "model_a", dimension, timeout=timeout)
        provider_b = HttpEmbeddingProvider(endpoint, "model_b", dimension, timeout=timeout)
    else:
        provider_a = load_embeddings(_require(_resolve(args, config, "embeddings-a"), "embeddings-a"))
        provider_b = load_embeddings(_require(_resolve(args, config, "embeddings-b"), "embeddings-b"))

    weights = _parse_weights(_resolve(args, config, "weights"))
    table = score_all(
        result.corpus,
        provider_a,
        provider_b,
        weights=weights,
        pair_convention=_resolve(args, config, "pair-convention", default="unordered"),
        workers=_resolve(args, config, "workers", default=1, cast=int),
        on_missing=_resolve(args, config, "on-missing", default="skip"),
    )
    out_dir = _resolve(args, config, "out-dir", default=".")
    os.makedirs(out_dir, exist_ok=True)
    table_path = os.path.join(out_dir, "scores.csv")
    write_score_table_file(table, table_path)
    print(f"wrote {len(table)} rows to {table_path}")
    if table.skipped:
        skip_path = os.path.join(out_dir, "skipped_pairs.csv")
        with open(skip_path, "w", encoding="utf-8", newline="") as fh:
            write_skip_report(table.skipped, fh)
        print(f"skipped {len(table.skipped)} pairs, reasons in {skip_path}")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    config = _load_config(args)
    table_path = _require(_resolve(args, config, "table"), "table")
    convention = _resolve(args, config, "convention", default="unordered")
    table = read_score_table_file(table_path, convention=convention)
    if not table.records:
        raise ValueError("score table is empty")

    rules = analysis.DEFAULT_FAILURE_RULES
    rules_path = _resolve(args, config, "rules")
    if rules_path:
        with open(rules_path, "r", encoding="utf-8") as fh:
            rules = analysis.load_rules(fh)
    denominator = _resolve(args, config, "denominator", default="table")

    selected = _resolve(args, config, "reports", default=",".join(REPORT_WRITERS))
    names = [name.strip() for name in str(selected).split(",") if name.strip()]
    unknown = [name for name in names if name not in REPORT_WRITERS]
    if unknown:
        raise ValueError(f"unknown report(s): {', '.join(unknown)}")

    out_dir = _resolve(args, config, "out-dir", default=".")
    os.makedirs(out_dir, exist_ok=True)
    for name in names:
        filename, writer = REPORT_WRITERS[name]
        path = os.path.join(out_dir, filename)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if name == "failures":
                analysis.write_failures_report(table, fh, rules, denominator)
            else:
                writer(table, fh)
        print(f"wrote {path}")

    if _resolve(args, config, "figures", default=True):
        for path in figures.render_all(table, out_dir):
            print(f"wrote {path}")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args)
    gt_path = _require(_resolve(args, config, "ground-truth"), "ground-truth")
    table_path = _require(_resolve(args, config, "table"), "table")
    kind = _resolve(args, config, "model", default="logistic")
    seed = _resolve(args, config, "seed", default=0, cast=int)
    folds = _resolve(args, config, "folds", default=5, cast=int)

    with open(gt_path, "r", encoding="utf-8", newline="") as fh:
        labeled_rows = ml.read_ground_truth(fh)
    table = read_score_table_file(table_path)
    features_by_pair = {
        tuple(sorted((r.main_id, r.secondary_id))): (r.sem_avg, r.nutr_avg, r.lexical)
        for r in table.records
    }
    pairs = []
    missing = []
    for main_id, secondary_id, label in labeled_rows:
        key = tuple(sorted((main_id, secondary_id)))
        features = features_by_pair.get(key)
        if features is None:
            missing.append(key)
            continue
        pairs.append(ml.LabeledPair(main_id, secondary_id, features, label))
    if missing:
        print(f"warning: {len(missing)} labeled pairs lack scores and were excluded", file=sys.stderr)
    if not pairs:
        raise ValueError("no labeled pairs with features; cannot train")

    X, y = ml.as_arrays(pairs)
    extra: dict[str, str] = {}
    if kind == "logistic":
        l2 = _resolve(args, config, "l2-strength", default=0.01, cast=float)
        report = ml.cross_validate("logistic", X, y, k=folds, seed=seed, l2_strength=l2)
        model = ml.train_logistic(X, y, l2_strength=l2)
        raw = [float(c) for c in model.coefficients]
        extra["converged"] = str(model.converged).lower()
        extra["iterations"] = str(model.iterations)
        extra["intercept"] = f"{model.intercept:.6f}"
    else:
        trees = _resolve(args, config, "trees", default=100, cast=int)
        report = ml.cross_validate("forest", X, y, k=folds, seed=seed, trees=trees)
        forest = ml.train_forest(X, y, trees=trees, seed=seed)
        raw = [float(v) for v in forest.importances]
    pct = ml.normalized_importance(raw)

    out_path = _resolve(args, config, "out", default="model_report.csv")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        ml.write_model_report(fh, kind, report, raw, pct, extra)
    print(f"wrote {out_path}")
    print(
        f"{kind}: accuracy {report.accuracy_mean:.3f} +/- {report.accuracy_std:.3f} "
        f"({report.folds}-fold, n={len(pairs)})"
    )
    for name, share in zip(ml.FEATURE_NAMES, pct):
        print(f"  {name}: {share:.1f}%")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = _load_config(args)
    corpus_path = _require(_resolve(args, config, "corpus"), "corpus")
    result = parse_corpus_file(corpus_path)

    task_path = _require(_resolve(args, config, "task-set"), "task-set")
    if os.path.exists(task_path):
        with open(task_path, "r", encoding="utf-8") as fh:
            task_set = read_task_set(fh)
    else:
        table_path = _require(_resolve(args, config, "table"), "table")
        table = read_score_table_file(table_path)
        task_set = create_task_set(
            table,
            n_mains=_resolve(args, config, "n-mains", default=100, cast=int),
            fraction=_resolve(args, config, "fraction", cast=float),
            k=_resolve(args, config, "k", cast=int),
            seed=_resolve(args, config, "seed", default=0, cast=int),
        )
        with open(task_path, "w", encoding="utf-8") as fh:
            write_task_set(task_set, fh)
        print(f"created task set with {len(task_set)} pairs at {task_path}")

    missing_ids = {rid for pair in task_set.pairs for rid in pair} - set(result.corpus.recipes)
    if missing_ids:
        raise ValueError(f"task set references recipes missing from corpus: {sorted(missing_ids)[:5]}")

    store = JudgmentStore(path=_require(_resolve(args, config, "store"), "store"))
    roster_spec = _resolve(args, config, "roster")
    roster = [e.strip() for e in str(roster_spec).split(",")] if roster_spec else None
    app = create_app(
        result.corpus,
        task_set,
        store,
        reveal_scores=bool(_resolve(args, config, "reveal-scores", default=False)),
        roster=roster,
        ui_dir=_resolve(args, config, "ui-dir"),
    )
    uvicorn.run(
        app,
        host=_resolve(args, config, "host", default="127.0.0.1"),
        port=_resolve(args, config, "port", default=8000, cast=int),
    )
    return 0


COMMANDS = {
    "ingest": _cmd_ingest,
    "score": _cmd_score,
    "analyze": _cmd_analyze,
    "train": _cmd_train,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CorpusError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - boundary between CLI and libraries
        print(f"internal error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 input/data error, 2 schema-fingerprint mismatch,
3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings

import numpy as np

from . import chi2
from .classifiers import (
    KINDS,
    TrainConfig,
    contributions,
    dumps_model,
    load_model,
    predict,
    predict_many,
    train,
)
from .errors import FingerprintMismatch, VulnscreenError
from .evaluation import evaluate
from .ingest import parse_csv, select_columns, stratified_split
from .schema import load_schema
from .selection import backward_eliminate, default_configs, run_pipeline
from .synth import SynthConfig, paper_shaped_preset, resolve_informative, write_synthetic


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _kind_params(items, kinds) -> dict[str, dict]:
    """``Kind.key=value`` pairs; a bare ``key=value`` applies to every listed kind."""
    out: dict[str, dict] = {k: {} for k in kinds}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise VulnscreenError(f"--param expects key=value, got {item!r}")
        kind, dot, name = key.rpartition(".")
        targets = [kind] if dot else list(kinds)
        for k in targets:
            if k not in out:
                raise VulnscreenError(f"--param names kind {k!r} which is not being trained")
            out[k][name] = _parse_value(value)
    return out


def _configs(args, kinds) -> dict[str, TrainConfig]:
    params = _kind_params(args.param, kinds)
    try:
        return {k: TrainConfig(k, seed=args.seed, hyperparameters=params[k]) for k in kinds}
    except ValueError as exc:
        raise VulnscreenError(str(exc)) from exc


def _echo_config(args, extra=None):
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    if extra:
        cfg.update(extra)
    print("# effective config: " + json.dumps(cfg, sort_keys=True, default=str), file=sys.stderr)


def _kinds(args):
    kinds = args.kinds.split(",") if args.kinds else list(KINDS)
    bad = [k for k in kinds if k not in KINDS]
    if bad:
        raise VulnscreenError(f"unknown classifier kinds {bad}; choose from {list(KINDS)}")
    return kinds


def _load(args):
    schema = load_schema(args.schema)
    ds = parse_csv(args.data, schema, labeled=True, impute=args.impute_mode)
    return schema, ds


def cmd_validate(args, out):
    schema, ds = _load(args)
    _echo_config(args)
    counts = np.bincount(ds.labels, minlength=2) if ds.n else np.zeros(2, int)
    info = {
        "schema_fingerprint": schema.fingerprint,
        "n": ds.n,
        "p": ds.p,
        "class_counts": {name: int(counts[code]) for name, code in schema.target.items()},
        "rejected_lines": list(ds.rejected_lines),
    }
    out.write(json.dumps(info, indent=2) + "\n")
    return 0


def cmd_chi2(args, out):
    _, ds = _load(args)
    _echo_config(args)
    report = chi2.rank_features(ds, args.alpha)
    text = report.to_tsv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text)
    return 0


def cmd_select(args, out):
    _, ds = _load(args)
    kinds = _kinds(args)
    configs = _configs(args, kinds)
    _echo_config(args, {"configs": {k: c.to_dict() for k, c in configs.items()}})
    report = chi2.rank_features(ds, args.alpha)
    split = stratified_split(ds, args.test_fraction, args.seed)
    trace = backward_eliminate(ds, report.ranked_ids, split, kinds, configs)
    text = trace.to_tsv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text)
    return 0


def _feature_list(args, ds):
    if args.features:
        return [f.strip() for f in args.features.split(",") if f.strip()]
    ranked = chi2.rank_features(ds, args.alpha).ranked_ids
    return ranked[: args.top_n] if args.top_n else ranked


def cmd_train(args, out):
    _, ds = _load(args)
    config = _configs(args, [args.kind])[args.kind]
    _echo_config(args, {"config": config.to_dict()})
    feats = _feature_list(args, ds)
    rows = ds if args.all_rows else ds.subset(stratified_split(ds, args.test_fraction, args.seed).train)
    sub = select_columns(rows, feats)
    model = train(sub.rows, sub.labels, config, feats, ds.schema_fingerprint)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))
    out.write(f"wrote {args.kind} model on {len(feats)} features to {args.out}\n")
    return 0


def cmd_evaluate(args, out):
    schema, ds = _load(args)
    model = load_model(args.model)
    _check_fingerprint(model, schema, args.force)
    _echo_config(args)
    rows = ds if args.all_rows else ds.subset(stratified_split(ds, args.test_fraction, args.seed).test)
    report = evaluate(model, rows)
    if args.roc:
        with open(args.roc, "w", encoding="utf-8") as fh:
            fh.write(report.roc_csv())
    out.write(json.dumps({"kind": model.kind, "n_features": len(model.feature_ids), **report.to_dict()}, indent=2) + "\n")
    return 0


def _check_fingerprint(model, schema, force):
    if model.schema_fingerprint and model.schema_fingerprint != schema.fingerprint:
        msg = f"schema fingerprint {schema.fingerprint} does not match the model's {model.schema_fingerprint}"
        if not force:
            raise FingerprintMismatch(msg + " (use --force to override)")
        warnings.warn(msg)


def cmd_predict(args, out, stdin=None):
    schema = load_schema(args.schema)
    model = load_model(args.model)
    _check_fingerprint(model, schema, args.force)
    _echo_config(args)
    if args.interactive:
        return _interactive(model, schema, stdin or sys.stdin, out)
    if not args.data or not args.out:
        raise VulnscreenError("batch prediction needs --data and --out (or use --interactive)")
    ds = parse_csv(args.data, schema, labeled=False, feature_ids=model.feature_ids, strict=False,
                   impute=args.impute_mode)
    preds = predict_many(model, ds.rows) if ds.n else []
    names = schema.class_names
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_id", "score", "label"])
        for i, p in enumerate(preds):
            rid = ds.row_ids[i] if ds.row_ids is not None else str(i)
            writer.writerow([rid, repr(p.score), names[p.label]])
    out.write(f"wrote {len(preds)} predictions to {args.out}\n")
    return 0


def _interactive(model, schema, stdin, out):
    codes = []
    for fid in model.feature_ids:
        q = schema.question(fid)
        while True:
            out.write(f"\n{q.id}. {q.text}\n")
            for i, cat in enumerate(q.categories, 1):
                out.write(f"  {i}) {cat}\n")
            out.write("> ")
            out.flush()
            line = stdin.readline()
            if not line:
                raise VulnscreenError("input ended before all questions were answered; nothing saved")
            choice = line.strip()
            if choice.isdigit() and 1 <= int(choice) <= q.n_categories:
                codes.append(int(choice) - 1)
                break
            out.write(f"invalid choice {choice!r}; enter a number from 1 to {q.n_categories}\n")
    pred = predict(model, codes, schema.fingerprint)
    out.write(f"\nscore: {pred.score!r}\n")
    out.write(f"label: {schema.class_names[pred.label]}\n")
    out.write(f"probability: {pred.probability!r}\n")
    contrib = contributions(model, codes)
    if contrib is not None:
        top = sorted(range(len(contrib)), key=lambda j: (-contrib[j], j))[:3]
        out.write("top contributing answers:\n")
        for j in top:
            q = schema.question(model.feature_ids[j])
            out.write(f"  {q.id} ({q.label}): {q.categories[codes[j]]!r} contribution {contrib[j]:.4f}\n")
    return 0


def cmd_synth(args, out):
    schema = load_schema(args.schema)
    if args.preset:
        cfg = paper_shaped_preset(args.seed)
    else:
        cfg = SynthConfig(
            n=args.n,
            positive_fraction=args.positive_fraction,
            schema=schema,
            informative_ids=resolve_informative(schema, args.informative),
            delta=args.delta,
            seed=args.seed,
        )
    _echo_config(args, {"informative_ids": list(cfg.informative_ids)})
    ds = write_synthetic(cfg, args.out)
    out.write(f"wrote {ds.n} rows to {args.out} (truth: {args.out}.truth.json)\n")
    return 0


def cmd_run(args, out):
    kinds = _kinds(args)
    configs = _configs(args, kinds)
    _echo_config(args, {"configs": {k: c.to_dict() for k, c in configs.items()}})
    result = run_pipeline(args.data, args.schema, args.seed, args.alpha, configs, args.test_fraction, kinds,
                          args.out_dir, impute=args.impute_mode)
    out.write(result.summary())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--schema", help="schema file (default: bundled paper36 schema)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--alpha", type=float, default=chi2.DEFAULT_ALPHA)
    common.add_argument("--test-fraction", type=float, default=0.333333)
    common.add_argument("--impute-mode", action="store_true",
                        help="fill missing cells with the column's most frequent answer instead of rejecting rows")

    parser = _Parser(prog="vulnscreen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "parse and validate a respondent CSV")
    p.add_argument("--data", required=True)

    p = add("chi2", cmd_chi2, "chi-squared report, sorted by statistic")
    p.add_argument("--data", required=True)
    p.add_argument("--out")

    p = add("select", cmd_select, "backward-elimination grid over all kinds")
    p.add_argument("--data", required=True)
    p.add_argument("--kinds", help="comma-separated subset of " + ",".join(KINDS))
    p.add_argument("--param", action="append", help="Kind.key=value hyperparameter override")
    p.add_argument("--out")

    p = add("train", cmd_train, "train one classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--features", help="comma-separated question ids")
    p.add_argument("--top-n", type=int, help="use the n best chi-squared features")
    p.add_argument("--param", action="append", help="key=value hyperparameter override")
    p.add_argument("--all-rows", action="store_true", help="train on every row instead of the train split")
    p.add_argument("--out", required=True)

    p = add("evaluate", cmd_evaluate, "accuracy, confusion and AUC on the test split")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--all-rows", action="store_true")
    p.add_argument("--roc", help="write ROC points as fpr,tpr CSV")
    p.add_argument("--force", action="store_true")

    p = add("predict", cmd_predict, "score respondents (batch CSV or interactive)")
    p.add_argument("--model", required=True)
    p.add_argument("--data")
    p.add_argument("--out")
    p.add_argument("--interactive", action="store_true")
    p.add_argument("--force", action="store_true", help="ignore a schema fingerprint mismatch")

    p = add("synth", cmd_synth, "generate a synthetic survey dataset")
    p.add_argument("--n", type=int, default=486)
    p.add_argument("--positive-fraction", type=float, default=0.5)
    p.add_argument("--informative", default="18", help="count, or comma-separated question ids")
    p.add_argument("--delta", type=float, default=0.6)
    p.add_argument("--preset", action="store_true", help="use the 486-row survey preset (ignores shape flags)")
    p.add_argument("--out", required=True)

    p = add("run", cmd_run, "full pipeline into --out-dir")
    p.add_argument("--data", required=True)
    p.add_argument("--kinds")
    p.add_argument("--param", action="append")
    p.add_argument("--out-dir", required=True)
    return parser


def main(argv=None, stdin=None, stdout=None) -> int:
    out = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.func is cmd_predict:
            return cmd_predict(args, out, stdin)
        return args.func(args, out)
    except VulnscreenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # invariant failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

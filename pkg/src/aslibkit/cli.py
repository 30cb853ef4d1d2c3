"""Command-line interface: ``aslibkit <command> ...``.

Exit codes: 0 success, 1 validation errors, 2 usage error or malformed
submission, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from .errors import AslibError, FormatError, SubmissionError
from .scenario import Finding, ValidationReport, validate_scenario

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _steps(args):
    if args.steps is None:
        return None
    return tuple(s.strip() for s in args.steps.split(",") if s.strip())


def _spec(args, default=None):
    from .selectors import parse_selector_spec

    text = args.selector or default
    if text is None:
        raise UsageError("--selector is required")
    if os.path.isfile(text):
        text = Path(text).read_text()
    spec = parse_selector_spec(text)
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
        if spec.learner is not None:
            spec = replace(spec, learner=replace(spec.learner, seed=args.seed))
    if args.steps is not None:
        spec = replace(spec, steps_used=_steps(args))
    return spec


def _load(path):
    from .io import load_scenario

    return load_scenario(path)


def _write(out, name, text):
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, name), "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    return f"{x:.4f}" if isinstance(x, float) else str(x)


# --------------------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    try:
        report = validate_scenario(_load(args.dir))
    except FormatError as exc:
        report = ValidationReport((Finding("error", exc.code, exc.message, exc.file, exc.line),))
    if args.json:
        print(report.to_json())
    else:
        for f in report:
            where = f.file or ""
            if f.row is not None:
                where += f":{f.row}"
            print(f"{f.severity:7s} {f.code:24s} {where} {f.message}")
        print(f"{len(report.errors)} errors, {len(report.warnings)} warnings")
    return EXIT_INVALID if report.errors else EXIT_OK


def cmd_fetch(args) -> int:
    from .io import DEFAULT_BASE_URL, RepoConfig, fetch_scenario

    cfg = RepoConfig(base_url=args.base_url or DEFAULT_BASE_URL, cache_dir=args.out, timeout=args.timeout)
    path = fetch_scenario(args.name, cfg)
    print(_dump({"scenario": args.name, "path": str(path)}) if args.json else path)
    return EXIT_OK


def cmd_summary(args) -> int:
    from .preprocess import aggregate_repetitions

    s = _load(args.dir)
    meta = s.meta
    info = {
        "scenario_id": meta.scenario_id,
        "n_instances": len(s.instance_ids),
        "n_algorithms": len(meta.algorithms),
        "n_features": len(meta.feature_names),
        "n_feature_steps": len(meta.feature_steps),
        "default_steps": list(meta.default_steps),
        "measures": [m.name for m in meta.measures],
        "cutoff": meta.algorithm_cutoff_time,
        "n_repetitions": s.n_repetitions,
        "n_folds": aggregate_repetitions(s).folds.n_folds,
        "has_feature_costs": s.feature_costs is not None,
    }
    if args.json:
        print(_dump(info))
    else:
        for key, value in info.items():
            print(f"{key:18s} {value}")
    return EXIT_OK


def cmd_eda(args) -> int:
    from .eda import build_report, write_report

    report = build_report(_load(args.dir), args.measure)
    if args.out:
        write_report(report, args.out, svg=not args.no_svg)
    print(report.to_json() if args.json else report.text(), end="" if not args.json else "\n")
    return EXIT_OK


def _baselines(prepared, scenario, k):
    from .evaluation import gap_closed, sbs_baseline, vbs_baseline

    vbs = vbs_baseline(prepared, scenario, k)
    alg, sbs = sbs_baseline(prepared, scenario, k)
    return vbs, alg, sbs, lambda par: gap_closed(par, sbs.par_k, vbs.par_k)


def cmd_evaluate(args) -> int:
    from ._util import json_float
    from .evaluation import evaluate_selection, prepare_for_spec, read_submission
    from .preprocess import aggregate_repetitions, apply_feature_costs
    from .selectors import SelectorModel, select_many

    scenario = aggregate_repetitions(_load(args.dir))
    k = args.penalty_factor
    if args.model:
        model = SelectorModel.load(args.model)
        spec = model.spec if args.steps is None else replace(model.spec, steps_used=_steps(args))
        prepared = prepare_for_spec(scenario, spec, args.measure)
        selection = select_many(model, prepared)
    else:
        prepared = apply_feature_costs(scenario, steps=_steps(args), measure=args.measure)
        selection = read_submission(args.selection) if args.selection else None
    if args.dump_prepared:
        prepared.to_csv(args.dump_prepared)
    vbs, alg, sbs, gap = _baselines(prepared, scenario, k)
    out = {
        "scenario_id": scenario.meta.scenario_id,
        "measure": prepared.measure,
        "k": k,
        "vbs": vbs.to_dict(),
        "sbs": dict(sbs.to_dict(), algorithm=alg),
    }
    if selection is not None:
        rep = evaluate_selection(prepared, scenario, selection, k)
        out.update(
            solved_fraction=json_float(rep.solved_fraction),
            par10=json_float(rep.par_k),
            mcp=json_float(rep.mcp),
            gap_closed=json_float(gap(rep.par_k)),
        )
    if args.out:
        _write(args.out, "evaluation.json", _dump(out))
    if args.json:
        print(_dump(out))
    else:
        print(f"VBS  par{k:g}={_fmt(vbs.par_k)} solved={_fmt(vbs.solved_fraction)}")
        print(f"SBS  par{k:g}={_fmt(sbs.par_k)} solved={_fmt(sbs.solved_fraction)} ({alg})")
        if selection is not None:
            print(f"sel  par{k:g}={_fmt(out['par10'])} solved={_fmt(out['solved_fraction'])} "
                  f"mcp={_fmt(out['mcp'])} gap_closed={_fmt(out['gap_closed'])}")
    return EXIT_OK


def _print_pairs(rows) -> None:
    width = max(len(k) for k, _ in rows) + 2
    for key, value in rows:
        print(f"{key:<{width}}{value}")


def _fold_rows(prepared, scenario, folds):
    if folds is None:
        return list(range(prepared.n_instances))
    fold_of = scenario.folds.fold_of()
    wanted = {int(f) for f in folds.split(",") if f.strip()}
    return [n for n, inst in enumerate(prepared.instances) if fold_of.get(inst) in wanted]


def cmd_train(args) -> int:
    from .evaluation import prepare_for_spec
    from .preprocess import aggregate_repetitions
    from .selectors import train_selector

    if not args.out:
        raise UsageError("train needs --out MODEL.json")
    spec = _spec(args)
    scenario = aggregate_repetitions(_load(args.dir))
    prepared = prepare_for_spec(scenario, spec, args.measure)
    prepared = prepared.subset(_fold_rows(prepared, scenario, args.folds))
    if args.dump_prepared:
        prepared.to_csv(args.dump_prepared)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = train_selector(prepared, spec, k=args.penalty_factor)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    model.save(args.out)
    if args.json:
        print(_dump({"model": args.out, "approach": spec.approach, "mode": model.mode,
                     "n_instances": prepared.n_instances, "notes": list(model.notes)}))
    else:
        print(f"trained {spec.approach} selector on {prepared.n_instances} instances -> {args.out}")
    return EXIT_OK


def cmd_select(args) -> int:
    from .evaluation import prepare_for_spec, write_submission
    from .preprocess import aggregate_repetitions
    from .selectors import SelectorModel, select_many

    model = SelectorModel.load(args.model)
    scenario = aggregate_repetitions(_load(args.dir))
    prepared = prepare_for_spec(scenario, model.spec, args.measure)
    prepared = prepared.subset(_fold_rows(prepared, scenario, args.folds))
    selection = select_many(model, prepared)
    if args.out:
        write_submission(selection, args.out)
    if args.json:
        print(_dump({inst: [[e.algorithm_id, e.budget] for e in selection[inst]] for inst in sorted(selection.schedules)}))
    elif not args.out:
        print("instance_id,algorithm")
        for inst in sorted(selection.schedules):
            print(f"{inst},{selection[inst][0].algorithm_id}")
    return EXIT_OK


def cmd_cv_benchmark(args) -> int:
    from .evaluation import cross_validate

    spec = _spec(args)
    scenario = _load(args.dir)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = cross_validate(scenario, spec, k=args.penalty_factor, threads=args.threads, measure=args.measure)
    if args.dump_prepared:
        result.prepared.to_csv(args.dump_prepared)
    doc = dict(result.to_dict(), selector=spec.to_dict())
    if args.out:
        _write(args.out, "cv_report.json", _dump(doc))
        for f in result.per_fold:
            _write(args.out, f"fold_{f.fold:02d}.json", _dump(dict(f.report.to_dict(per_instance=True), fold=f.fold)))
    if args.json:
        print(_dump(doc))
    else:
        p = result.pooled
        _print_pairs([
            ("scenario", result.scenario_id),
            ("selector", spec.approach + (f" ({spec.learner.kind})" if spec.learner else "")),
            ("solved", _fmt(p.solved_fraction)),
            (f"par{result.k:g}", _fmt(p.par_k)),
            ("mcp", _fmt(p.mcp)),
            (f"vbs par{result.k:g}", _fmt(result.vbs.par_k)),
            (f"sbs par{result.k:g}", f"{_fmt(result.sbs.par_k)} ({result.sbs_algorithm})"),
            ("gap_closed", _fmt(result.gap_closed)),
        ])
    return EXIT_OK


def cmd_forward_select(args) -> int:
    from .subset import forward_select

    spec = _spec(args)
    result = forward_select(_load(args.dir), args.kind, spec, epsilon=args.epsilon, k=args.penalty_factor,
                            threads=args.threads, measure=args.measure)
    if args.out:
        _write(args.out, f"forward_{args.kind}.json", result.to_json())
        _write(args.out, f"forward_{args.kind}.txt", result.table())
    if args.json:
        print(result.to_json())
    else:
        print("selected: " + ", ".join(result.selected))
        print("trace:    " + ", ".join(f"{s:.2f}" for s in result.score_trace))
        print(result.table(), end="")
    return EXIT_OK


def cmd_score_submission(args) -> int:
    from .evaluation import score_submission

    folds = None if args.test_folds is None else [int(f) for f in args.test_folds.split(",") if f.strip()]
    res = score_submission(_load(args.dir), args.file, test_folds=folds, steps=_steps(args),
                           k=args.penalty_factor, measure=args.measure)
    if args.json:
        print(_dump(res))
    else:
        _print_pairs([
            ("solved_fraction", _fmt(res["solved_fraction"])),
            (f"par{args.penalty_factor:g}", _fmt(res["par10"])),
            ("mcp", _fmt(res["mcp"])),
        ])
    return EXIT_OK


def cmd_generate(args) -> int:
    from .generate import GenSpec, truth_path, write_generated

    d = {}
    if args.spec:
        d = json.loads(Path(args.spec).read_text())
    if args.seed is not None:
        d["seed"] = args.seed
    try:
        spec = GenSpec.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad generator spec: {exc}") from None
    truth_file = args.truth or truth_path(args.out_dir)
    scenario, truth = write_generated(spec, args.out_dir, truth_file)
    if args.json:
        print(_dump({"directory": str(args.out_dir), "planted_truth": truth_file, "scenario_id": scenario.meta.scenario_id}))
    else:
        print(f"wrote {scenario.meta.scenario_id} to {args.out_dir} (truth: {truth_file})")
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="aslibkit", description="Algorithm-selection scenario toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def command(name, func, help_text, scenario=True):
        c = sub.add_parser(name, help=help_text)
        if scenario:
            c.add_argument("dir", help="scenario directory")
        c.add_argument("--json", action="store_true", help="machine-readable output")
        c.add_argument("--seed", type=int, default=None)
        c.add_argument("--threads", type=int, default=1)
        c.set_defaults(func=func)
        return c

    def data_flags(c):
        c.add_argument("--measure", default=None)
        c.add_argument("--penalty-factor", type=float, default=10.0)
        c.add_argument("--steps", default=None, help="comma-separated feature steps")

    c = command("validate", cmd_validate, "check a scenario directory")
    c = command("fetch", cmd_fetch, "download a scenario into the cache", scenario=False)
    c.add_argument("name")
    c.add_argument("--base-url", default=None)
    c.add_argument("--out", default=None, help="cache directory")
    c.add_argument("--timeout", type=float, default=60.0)
    c = command("summary", cmd_summary, "scenario size overview")
    c = command("eda", cmd_eda, "exploratory data analysis report")
    c.add_argument("--measure", default=None)
    c.add_argument("--out", default=None)
    c.add_argument("--no-svg", action="store_true")
    c = command("evaluate", cmd_evaluate, "score baselines and a model or selection file")
    data_flags(c)
    c.add_argument("--model", default=None)
    c.add_argument("--selection", default=None, help="submission-format CSV")
    c.add_argument("--out", default=None)
    c.add_argument("--dump-prepared", default=None)
    c = command("train", cmd_train, "train a selector")
    data_flags(c)
    c.add_argument("--selector", default=None)
    c.add_argument("--folds", default=None, help="comma-separated folds to train on")
    c.add_argument("--out", default=None)
    c.add_argument("--dump-prepared", default=None)
    c = command("select", cmd_select, "apply a trained selector")
    c.add_argument("--model", required=True)
    c.add_argument("--measure", default=None)
    c.add_argument("--folds", default=None)
    c.add_argument("--out", default=None)
    c = command("cv-benchmark", cmd_cv_benchmark, "cross-validated selector benchmark")
    data_flags(c)
    c.add_argument("--selector", default=None)
    c.add_argument("--out", default=None)
    c.add_argument("--dump-prepared", default=None)
    c = command("forward-select", cmd_forward_select, "greedy forward selection")
    data_flags(c)
    c.add_argument("--kind", choices=("algorithms", "features"), default="algorithms")
    c.add_argument("--selector", default=None)
    c.add_argument("--epsilon", type=float, default=1.0)
    c.add_argument("--out", default=None)
    c = command("score-submission", cmd_score_submission, "score a submission CSV")
    c.add_argument("file")
    data_flags(c)
    c.add_argument("--test-folds", default=None)
    c = command("generate", cmd_generate, "write a synthetic scenario", scenario=False)
    c.add_argument("out_dir")
    c.add_argument("--spec", default=None, help="JSON generator spec")
    c.add_argument("--truth", default=None, help="planted-truth sidecar path")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SubmissionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AslibError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``codeorigin <subcommand> ...``.

Exit status is 0 on success, 1 for invalid input or arguments and 2 for
runtime failures. Every output file is written to a temporary name first and
renamed into place.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import baselines, stats
from .classifier import BACKENDS, Hyperparams, default_hyperparams, persist, predict_batch, restore, train
from .corpus import (
    Corpus,
    Provenance,
    ingest_corpus,
    parse_ratios,
    read_split,
    split,
    validate_counts,
    write_corpus,
)
from .errors import CodeOriginError, InputError
from .experiments import rename_map_for, run_experiment_grid
from .extractor import PRESETS, RenameMap, apply_config, preset, read_rename_map
from .metrics import evaluate
from .report import FORMATS, load_reports, render_report
from .snippet import Origin, Snippet

logger = logging.getLogger("codeorigin")

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2
SHARED_DEFAULTS = {"verbose": 0, "seed": 42, "jobs": 1}


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# file helpers


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise
    return path


def atomic_write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


@contextlib.contextmanager
def atomic_dir(path):
    """Yield a temp directory that replaces ``path`` if the block succeeds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{path.name}.", dir=path.parent))
    try:
        yield tmp
        if path.exists():
            shutil.rmtree(path)
        os.replace(tmp, path)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def _existing(path: str, what: str = "file") -> Path:
    p = Path(path)
    if not p.exists():
        raise InputError(f"{what} not found: {path}")
    return p


def load_corpus(manifest: str, root: Optional[str] = None, provenance: Optional[str] = None, name=None, jobs=4) -> Corpus:
    mpath = _existing(manifest, "manifest")
    prov = Provenance(provenance) if provenance else None
    return ingest_corpus(Path(root) if root else mpath.parent, mpath, prov, name, jobs)


def _rename_map(path: Optional[str]) -> Optional[RenameMap]:
    return read_rename_map(_existing(path, "rename map")) if path else None


def _config(args):
    return preset(args.config, args.project_prefix or ())


def _hyperparams(args) -> Hyperparams:
    base = default_hyperparams(args.backend) if hasattr(args, "backend") else Hyperparams()
    return base.replace(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        warmup_fraction=args.warmup,
        weight_decay=args.weight_decay,
        max_len=args.max_len,
        seed=args.seed,
    )


def _named_paths(values: Sequence[str]) -> Dict[str, str]:
    """``name=path`` or bare ``path`` (named after its stem)."""
    out: Dict[str, str] = {}
    for v in values:
        name, sep, path = v.partition("=")
        if not sep:
            name, path = Path(v).stem, v
        if name in out:
            raise InputError(f"dataset name {name!r} given twice")
        out[name] = path
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_ingest(args) -> int:
    corpus = load_corpus(args.manifest, args.root, args.provenance, args.name, args.jobs)
    out = {"name": corpus.name, "provenance": corpus.provenance.value, "total": len(corpus), "counts": corpus.counts}
    status = EXIT_OK
    if args.expect:
        expected = {}
        for item in args.expect.split(","):
            origin, _, n = item.partition("=")
            try:
                expected[Origin.parse(origin).value] = int(n)
            except ValueError as exc:
                raise InputError(f"--expect: bad entry {item!r}") from exc
        report = validate_counts(corpus, expected)
        out["validation"] = report.to_dict()
        if not report.ok:
            status = EXIT_INPUT
    if args.out:
        atomic_write_json(args.out, out)
    else:
        print(json.dumps(out, indent=2))
    return status


def cmd_preprocess(args) -> int:
    config = _config(args)
    rename_map = _rename_map(args.rename_map)
    if args.input:
        text = _existing(args.input).read_bytes().decode("utf-8")
        snippet = Snippet(Path(args.input).stem, Origin.parse(args.origin), text, args.pairing_key)
        result = apply_config(snippet, config, rename_map, strict=False).text
        if args.out:
            atomic_write_text(args.out, result)
        else:
            sys.stdout.write(result)
        return EXIT_OK
    if not args.corpus or not args.out:
        raise InputError("preprocess needs either --input or both --corpus and --out")
    corpus = load_corpus(args.corpus, args.root, jobs=args.jobs)
    if rename_map is None:
        rename_map = rename_map_for(corpus, config)
    strict = corpus.provenance.is_paired
    done = [apply_config(s, config, rename_map, strict=strict) for s in corpus.snippets]
    with atomic_dir(args.out) as tmp:
        write_corpus(corpus.replace_snippets(done), tmp)
    logger.info("wrote %d snippets under %s", len(done), args.out)
    return EXIT_OK


def cmd_split(args) -> int:
    corpus = load_corpus(args.corpus, args.root, jobs=args.jobs)
    pair_aware = None if args.pair_aware == "auto" else args.pair_aware == "yes"
    result = split(corpus, parse_ratios(args.ratios), args.seed, not args.no_stratify, pair_aware)
    atomic_write_json(args.out, result.to_dict())
    logger.info("split sizes %d/%d/%d", len(result.train), len(result.validation), len(result.test))
    return EXIT_OK


def _training_inputs(args):
    corpus = load_corpus(args.corpus, args.root, jobs=args.jobs)
    data_split = read_split(_existing(args.split, "split file"))
    config = _config(args)
    rename_map = _rename_map(args.rename_map)
    if rename_map is None:
        rename_map = rename_map_for(corpus, config)
    return corpus, data_split, config, rename_map


def cmd_train(args) -> int:
    corpus, data_split, config, rename_map = _training_inputs(args)
    model = train(
        args.backend, data_split, corpus, config, _hyperparams(args), rename_map,
        corpus.provenance.is_paired, args.checkpoint,
    )
    persist(model, args.out)
    logger.info("model written to %s", args.out)
    return EXIT_OK


def cmd_predict(args) -> int:
    model = restore(_existing(args.model, "model directory"))
    rename_map = _rename_map(args.rename_map)
    snippets = []
    for path in args.input:
        text = _existing(path).read_bytes().decode("utf-8")
        snippets.append(Snippet(Path(path).stem, Origin.parse(args.origin), text, args.pairing_key))
    preds = predict_batch(model, snippets, rename_map=rename_map)
    for p in preds:
        print(json.dumps(p.to_dict()))
    return EXIT_OK


def cmd_eval(args) -> int:
    model = restore(_existing(args.model, "model directory"))
    corpus = load_corpus(args.corpus, args.root, jobs=args.jobs)
    data_split = read_split(_existing(args.split, "split file"))
    config = model.preprocess_config
    rename_map = _rename_map(args.rename_map) or rename_map_for(corpus, config)
    items = corpus.subset(data_split.part(args.part))
    if not items:
        raise InputError(f"split part {args.part!r} is empty")
    preds = predict_batch(model, items, config, rename_map, strict_rename=False)
    report = evaluate(
        [s.origin for s in items],
        [p.label for p in preds],
        dataset=args.dataset or corpus.name,
        config=config.name,
        backend=model.backend,
        seed=model.hyperparams.seed,
        split_seed=data_split.seed,
    )
    atomic_write_json(args.out, report.to_dict())
    if args.predictions:
        rows = ["snippet_id,truth,pred,score"]
        rows += [f"{s.id},{s.origin.value},{p.label.value},{p.score!r}" for s, p in zip(items, preds)]
        atomic_write_text(args.predictions, "\n".join(rows) + "\n")
    print(f"accuracy {report.accuracy:.4f} on {report.total_support} snippets")
    return EXIT_OK


def cmd_grid(args) -> int:
    configs = [c.strip() for c in args.configs.split(",") if c.strip()]
    unknown = [c for c in configs if c not in PRESETS]
    if unknown:
        raise InputError(f"unknown configuration(s): {', '.join(unknown)}")
    sources = {}
    for name, path in _named_paths(args.corpus).items():
        # loading is deferred so one unreadable corpus only fails its own cells
        sources[name] = lambda p=path, n=name: load_corpus(p, None, name=n, jobs=args.jobs)
    rename_maps = {}
    for name, path in _named_paths(args.rename_map or []).items():
        rename_maps[name] = _rename_map(path)
    hp = _hyperparams(args)
    results = run_experiment_grid(
        sources, configs, args.backend, hp, parse_ratios(args.ratios), args.seed,
        rename_maps, args.project_prefix or (), args.jobs, args.checkpoint,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failures = []
    for cell in results:
        if cell.ok:
            atomic_write_json(out / f"{cell.dataset}_{cell.config}.json", cell.report.to_dict())
        else:
            failures.append(cell.to_dict())
    atomic_write_json(out / "errors.json", failures)
    for f in failures:
        print(f"cell {f['dataset']}/{f['config']} failed: {f['error']}", file=sys.stderr)
    return EXIT_RUNTIME if failures else EXIT_OK


def cmd_compare(args) -> int:
    outcomes = []
    for path in args.inputs:
        outcomes.append(stats.read_comparison_csv(_existing(path)))
    if not outcomes:
        raise InputError("no comparison files given")
    results = [r.to_dict() for r in stats.compare_classifiers(outcomes)]
    if args.out:
        atomic_write_json(args.out, results)
    else:
        print(json.dumps(results, indent=2))
    return EXIT_OK


def cmd_report(args) -> int:
    reports = load_reports([_existing(p) for p in args.inputs], order=list(PRESETS))
    text = render_report(reports, args.format)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _limits(args) -> baselines.LengthConstraint:
    default = baselines.DEFAULT_LIMITS[baselines.BaselineId(args.baseline)]
    if args.min_chars is None and args.max_chars is None:
        return default
    return baselines.LengthConstraint(
        args.min_chars if args.min_chars is not None else default.min_chars,
        args.max_chars if args.max_chars is not None else default.max_chars,
        default.min_inclusive,
    )


def cmd_baseline(args) -> int:
    corpus = load_corpus(args.corpus, args.root, jobs=args.jobs)
    if args.action == "select":
        chosen = baselines.select_comparison_set(corpus.snippets, _limits(args), args.n_per_class, args.seed)
        atomic_write_text(args.out, "".join(s.id + "\n" for s in chosen))
        return EXIT_OK

    ids = [line.strip() for line in _existing(args.ids).read_text(encoding="utf-8").splitlines() if line.strip()]
    index = corpus.by_id()
    missing = [i for i in ids if i not in index]
    if missing:
        raise InputError(f"ids not in corpus: {', '.join(missing[:5])}")
    if args.action == "query":
        live = None
        if args.mode == "live":
            if not args.endpoint:
                raise InputError("live mode needs --endpoint")
            live = baselines.LiveConfig(args.endpoint, args.token_env, args.min_interval_ms)
        client = baselines.BaselineClient(args.baseline, args.fixture, live)
        try:
            for i in ids:
                if args.mode == "live" and i in client.answers:
                    continue
                baselines.query_baseline(client, index[i], args.mode)
        finally:
            client.close()
        return EXIT_OK

    truth = {i: index[i].origin for i in ids}
    score = baselines.score_fixture(args.baseline, _existing(args.fixture), truth)
    out = {
        "baseline": score.baseline_id.value,
        "correct": score.correct,
        "total": score.total,
        "accuracy": score.accuracy,
        "report": score.report.to_dict() if score.report else None,
    }
    if args.out:
        atomic_write_json(args.out, out)
    else:
        print(json.dumps(out, indent=2))
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_corpus(p, required=True):
    p.add_argument("--corpus", required=required, help="corpus manifest (JSON lines)")
    p.add_argument("--root", help="directory snippet paths are relative to (default: the manifest's)")


def _add_config(p):
    p.add_argument("--config", default="C1", choices=list(PRESETS))
    p.add_argument("--rename-map", help="TSV of pairing_key<TAB>class_name")
    p.add_argument("--project-prefix", action="append", help="package prefix counted as a self-made import")


def _add_training(p):
    p.add_argument("--backend", choices=BACKENDS, default="linear")
    p.add_argument("--checkpoint", help="pre-trained encoder name or local path")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--warmup", type=float, help="warmup fraction of all steps")
    p.add_argument("--weight-decay", type=float)
    p.add_argument("--max-len", type=int)


def build_parser() -> argparse.ArgumentParser:
    # shared flags work before or after the subcommand; SUPPRESS keeps the
    # subparser from overwriting a value given before it
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every random choice (default 42)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="parallel workers (default 1)")
    parser = _Parser(prog="codeorigin", description="Human vs generated Java code detection pipeline.", parents=[common])
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    _add_parser = sub.add_parser
    sub.add_parser = lambda *a, **k: _add_parser(*a, parents=[common], **k)
    sub.required = True

    p = sub.add_parser("ingest", help="load a manifest and report class counts")
    p.add_argument("--manifest", required=True)
    p.add_argument("--root")
    p.add_argument("--provenance", choices=[v.value for v in Provenance])
    p.add_argument("--name")
    p.add_argument("--expect", help="expected counts, e.g. human=601,chatgpt=609")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", help="rewrite snippets under a configuration")
    _add_corpus(p, required=False)
    _add_config(p)
    p.add_argument("--input", help="single file to rewrite instead of a corpus")
    p.add_argument("--origin", default="human", help="origin of --input")
    p.add_argument("--pairing-key", help="pairing key of --input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("split", help="train/validation/test split")
    _add_corpus(p)
    p.add_argument("--ratios", default="80:10:10")
    p.add_argument("--no-stratify", action="store_true")
    p.add_argument("--pair-aware", choices=["auto", "yes", "no"], default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train a classifier")
    _add_corpus(p)
    _add_config(p)
    _add_training(p)
    p.add_argument("--split", required=True)
    p.add_argument("--out", required=True, help="model directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify snippet files")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, nargs="+")
    p.add_argument("--origin", default="human", help="assumed origin (only matters for renaming)")
    p.add_argument("--pairing-key")
    p.add_argument("--rename-map")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="evaluate a model on one split part")
    _add_corpus(p)
    p.add_argument("--model", required=True)
    p.add_argument("--split", required=True)
    p.add_argument("--part", default="test", choices=["train", "validation", "test"])
    p.add_argument("--rename-map")
    p.add_argument("--dataset", help="dataset tag for the report")
    p.add_argument("--predictions", help="also write per-snippet predictions (CSV)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="train and evaluate every dataset x configuration cell")
    p.add_argument("--corpus", required=True, action="append", help="[name=]manifest, repeatable")
    p.add_argument("--configs", default=",".join(PRESETS))
    p.add_argument("--ratios", default="80:10:10")
    p.add_argument("--rename-map", action="append", help="[name=]TSV human-chosen names, repeatable")
    p.add_argument("--project-prefix", action="append")
    _add_training(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("compare", help="McNemar tests with Holm correction")
    p.add_argument("inputs", nargs="+", help="CSV files with snippet_id,truth,pred_a,pred_b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="render report JSON files as tables")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--format", default="md", choices=list(FORMATS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("baseline", help="external detector comparison sets and scoring")
    p.add_argument("action", choices=["select", "query", "score"])
    p.add_argument("--baseline", required=True, choices=[b.value for b in baselines.BaselineId])
    _add_corpus(p)
    p.add_argument("--n-per-class", type=int, default=50)
    p.add_argument("--min-chars", type=int)
    p.add_argument("--max-chars", type=int)
    p.add_argument("--ids", help="file with one snippet id per line")
    p.add_argument("--fixture", help="answers CSV (snippet_id,answer_text)")
    p.add_argument("--mode", choices=["replay", "live"], default="replay")
    p.add_argument("--endpoint")
    p.add_argument("--token-env", help="environment variable holding the API token")
    p.add_argument("--min-interval-ms", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)
    return parser


def _check_baseline_args(args) -> None:
    if args.command != "baseline":
        return
    if args.action == "select" and not args.out:
        raise InputError("baseline select needs --out")
    if args.action in ("query", "score") and not (args.ids and args.fixture):
        raise InputError(f"baseline {args.action} needs --ids and --fixture")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name, value in SHARED_DEFAULTS.items():
            if not hasattr(args, name):
                setattr(args, name, value)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        _check_baseline_args(args)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CodeOriginError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

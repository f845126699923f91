"""Command-line entry point: ``playtriage <subcommand> ...``.

Exit codes: 0 success, 2 validation error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import cluster, harness
from .corpus import CorpusError, load_bundle, load_dataset, persist_dataset
from .evaluate import bh_adjust, cliffs_delta, cohen_kappa, mann_whitney, mojofm, mno
from .learner import ALGORITHMS, Classifier, ModelError, PipelineSpec, cross_validate, fit_pipeline
from .partition import Partition
from .pipeline import (FEATURE_SETS, PipelineConfig, PipelineError, emit_report, featurize,
                       read_segments, run_pipeline, summary_for, write_segments)
from .segmenter import (DEFAULT_T_SHIFT, compute_segments, default_keywords, expand_keywords,
                        filter_segments, read_keywords, read_synonyms)
from .text import Vocabulary, load_embeddings

EXIT_OK, EXIT_VALIDATION, EXIT_STAGE = 0, 2, 3

log = logging.getLogger("playtriage")


def _out(args, text: str):
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _keywords(args):
    kw = read_keywords(args.keywords) if args.keywords else default_keywords()
    if getattr(args, "synonyms", None):
        from .segmenter import KeywordDictionary
        kw = kw | KeywordDictionary.from_phrases(expand_keywords(kw, read_synonyms(args.synonyms)))
    return kw


# -- subcommands -----------------------------------------------------------

def cmd_ingest(args):
    rows = []
    for d in args.bundles:
        b = load_bundle(d)
        rows.append({"id": b.id, "game": b.game_id, "fps": b.fps, "duration_ms": b.duration_ms,
                     "frames": len(b.frame_paths), "width": b.frame_size[0],
                     "height": b.frame_size[1], "subtitles": len(b.subtitles)})
    _out(args, json.dumps(rows, indent=2))


def cmd_segment(args):
    kw = _keywords(args)
    segs = []
    for d in args.bundles:
        b = load_bundle(d)
        cand = compute_segments(b.subtitles, args.t_shift, b.duration_ms, b.id)
        segs += cand if args.no_filter else filter_segments(cand, kw)
    if args.out:
        write_segments(args.out, segs)
    else:
        print(json.dumps({"segments": [s.to_dict() for s in segs]}, indent=2))


def cmd_expand_keywords(args):
    base = read_keywords(args.keywords) if args.keywords else default_keywords()
    _out(args, "\n".join(expand_keywords(base, read_synonyms(args.synonyms))))


def cmd_featurize(args):
    bundles = {b.id: b for b in map(load_bundle, args.bundles)}
    segs, extra = read_segments(args.segments)
    labels = [e.get("label", "unlabeled") for e in extra]
    table = load_embeddings(args.embeddings) if "w2v" in args.features else None
    vocab = Vocabulary.load(args.vocab) if args.vocab else None
    data = featurize(bundles, segs, labels, args.features, table, vocab, workers=args.workers)
    persist_dataset(data, args.out)


def _pipeline_spec(args) -> PipelineSpec:
    params = {}
    if args.algorithm == "random_forest" and args.max_features is not None:
        params["max_features"] = args.max_features
    return PipelineSpec(args.algorithm, args.smote, args.attr_select, params=params)


def cmd_train(args):
    data = load_dataset(args.dataset)
    if args.binary:
        data = data.binary()
    model = fit_pipeline(data, _pipeline_spec(args), seed=args.seed)
    model.save(args.out)
    print(f"trained {model.algorithm} on {len(data)} rows, {model.n_features} features")


def cmd_cross_validate(args):
    data = load_dataset(args.dataset)
    if args.binary:
        data = data.binary()
    m = cross_validate(data, _pipeline_spec(args), folds=args.folds, seed=args.seed)
    _out(args, json.dumps(m.to_dict(), indent=2))


def cmd_categorize(args):
    model = Classifier.load(args.model)
    data = load_dataset(args.dataset)
    proba = model.proba_for(data)
    ids = data.meta.get("row_ids") or [str(i) for i in range(len(data))]
    rows = []
    for i, p in zip(ids, proba):
        k = int(np.argmax(p))
        rows.append({"id": i, "label": model.classes[k], "confidence": float(p[k]),
                     "proba": dict(zip(model.classes, map(float, p)))})
    _out(args, json.dumps(rows, indent=2))


def cmd_cluster_context(args):
    bundles = {b.id: b for b in map(load_bundle, args.bundles)}
    segs, _ = read_segments(args.segments)
    summaries = [summary_for(bundles[s.bundle_id], s) for s in segs]
    d = cluster.context_distances(summaries, args.metric)
    part = cluster.cluster_matrix(d, args.algorithm, args.epsilon, args.min_pts,
                                  ids=[s.id for s in segs])
    _out(args, part.to_json())


def cmd_cluster_issue(args):
    data = load_dataset(args.dataset)
    ids = data.meta.get("row_ids") or [str(i) for i in range(len(data))]
    part = cluster.cluster_by_issue(list(zip(ids, data.X)), args.algorithm, args.epsilon,
                                    args.min_pts, args.bandwidth)
    _out(args, part.to_json())


def cmd_report(args):
    cfgd = json.loads(Path(args.config).read_text(encoding="utf-8"))
    for key, val in (("t_shift", args.t_shift), ("keywords", args.keywords),
                     ("embeddings", args.embeddings), ("model", args.model), ("seed", args.seed)):
        if val is not None:
            cfgd[key] = str(Path(val).resolve()) if key in ("keywords", "embeddings", "model") else val
    ctx = cfgd.setdefault("context", {})
    if args.metric is not None:
        ctx["metric"] = args.metric
    for flag, key in ((args.context_algorithm, "algorithm"),):
        if flag is not None:
            ctx[key] = flag
    iss = cfgd.setdefault("issue", {})
    if args.algorithm is not None:
        iss["algorithm"] = args.algorithm
    if args.epsilon is not None:
        iss["epsilon"] = args.epsilon
    if args.min_pts is not None:
        ctx["min_pts"] = iss["min_pts"] = args.min_pts
    cfg = PipelineConfig.from_dict(cfgd, Path(args.config).resolve().parent)
    report = run_pipeline(cfg)
    if args.out:
        emit_report(report, args.out)
    else:
        from .pipeline import report_json
        print(report_json(report))


def _read_two_columns(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _is_number(rows[0][0]) and not _is_number(rows[0][-1]):
        rows = rows[1:]
    a = [r[0] for r in rows if r[0] != ""]
    b = [r[1] for r in rows if len(r) > 1 and r[1] != ""]
    return a, b


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def cmd_evaluate(args):
    kind = args.kind
    if kind == "mojofm":
        truth, pred = Partition.load(args.truth), Partition.load(args.predicted)
        print(f"{mojofm(pred, truth):.2f}")
    elif kind == "mno":
        print(mno(Partition.load(args.predicted), Partition.load(args.truth)))
    elif kind == "kappa":
        a, b = _read_two_columns(args.csv)
        print(f"{cohen_kappa(a, b):.6f}")
    elif kind == "mannwhitney":
        a, b = _read_two_columns(args.csv)
        r = mann_whitney([float(v) for v in a], [float(v) for v in b])
        print(json.dumps({"U": r.U, "p": r.p, "exact": r.exact}))
    elif kind == "cliffs":
        a, b = _read_two_columns(args.csv)
        r = cliffs_delta([float(v) for v in a], [float(v) for v in b])
        print(json.dumps({"delta": r.delta, "magnitude": r.magnitude}))
    elif kind == "bh":
        a, _ = _read_two_columns(args.csv)
        for v in bh_adjust([float(x) for x in a]):
            print(repr(float(v)))
    elif kind == "grid":
        _out(args, harness.categorization_grid_table(
            [Path(p) for p in args.dataset], folds=args.folds, seed=args.seed,
            binary=args.binary))
    elif kind == "holdout":
        _out(args, harness.holdout_table(Path(args.train), Path(args.test), args.algorithm,
                                         args.smote, args.attr_select, args.seed, args.binary))
    elif kind == "tuning":
        _out(args, harness.tuning_table(Path(args.train), Path(args.test), args.max_features_grid,
                                        args.seed, args.binary))
    elif kind == "clustering":
        _out(args, harness.mojofm_table(Path(args.truth), Path(args.predicted)))


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="playtriage", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        return sp

    sp = add("ingest", cmd_ingest, "validate bundles and print a summary")
    sp.add_argument("bundles", nargs="+")
    sp.add_argument("--out")

    sp = add("segment", cmd_segment, "cut segments around subtitle entries and filter them")
    sp.add_argument("bundles", nargs="+")
    sp.add_argument("--t-shift", type=float, default=DEFAULT_T_SHIFT)
    sp.add_argument("--keywords")
    sp.add_argument("--synonyms", help="JSON lexicon; expanded keywords are added")
    sp.add_argument("--no-filter", action="store_true")
    sp.add_argument("--out")

    sp = add("expand-keywords", cmd_expand_keywords, "list candidate keywords from synonyms")
    sp.add_argument("--keywords")
    sp.add_argument("--synonyms", required=True)
    sp.add_argument("--out")

    sp = add("featurize", cmd_featurize, "compute a feature dataset for segments")
    sp.add_argument("--bundles", nargs="+", required=True)
    sp.add_argument("--segments", required=True)
    sp.add_argument("--embeddings")
    sp.add_argument("--vocab")
    sp.add_argument("--features", choices=FEATURE_SETS, default="w2v+video")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", required=True)

    for name, fn, help in (("train", cmd_train, "fit a categorization model"),
                           ("cross-validate", cmd_cross_validate, "stratified k-fold evaluation")):
        sp = add(name, fn, help)
        sp.add_argument("--dataset", required=True)
        sp.add_argument("--algorithm", choices=ALGORITHMS, default="random_forest")
        sp.add_argument("--smote", action="store_true")
        sp.add_argument("--attr-select", action="store_true")
        sp.add_argument("--max-features", type=int)
        sp.add_argument("--binary", action="store_true")
        sp.add_argument("--folds", type=int, default=10)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=(name == "train"))

    sp = add("categorize", cmd_categorize, "predict issue types for a dataset")
    sp.add_argument("--model", required=True)
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--out")

    sp = add("cluster-context", cmd_cluster_context, "group segments by summary-frame similarity")
    sp.add_argument("--bundles", nargs="+", required=True)
    sp.add_argument("--segments", required=True)
    sp.add_argument("--metric", choices=("hsv", "ssim"), default="hsv")
    sp.add_argument("--algorithm", choices=("optics", "dbscan"), default="optics")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--min-pts", type=int, default=cluster.DEFAULT_MIN_PTS)
    sp.add_argument("--out")

    sp = add("cluster-issue", cmd_cluster_issue, "cluster dataset rows by specific issue")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--algorithm", choices=cluster.ISSUE_ALGORITHMS, default="dbscan")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--min-pts", type=int, default=cluster.DEFAULT_MIN_PTS)
    sp.add_argument("--bandwidth", type=float)
    sp.add_argument("--out")

    sp = add("report", cmd_report, "run the whole pipeline from a JSON config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--t-shift", type=float)
    sp.add_argument("--keywords")
    sp.add_argument("--embeddings")
    sp.add_argument("--model")
    sp.add_argument("--metric", choices=("hsv", "ssim"))
    sp.add_argument("--context-algorithm", choices=("optics", "dbscan"))
    sp.add_argument("--algorithm", choices=cluster.ISSUE_ALGORITHMS,
                    help="issue clustering algorithm")
    sp.add_argument("--epsilon", type=float, help="issue clustering epsilon override")
    sp.add_argument("--min-pts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")

    sp = add("evaluate", cmd_evaluate, "partition metrics, statistics and result tables")
    ev = sp.add_subparsers(dest="kind", required=True)
    for kind in ("mojofm", "mno"):
        e = ev.add_parser(kind)
        e.add_argument("--truth", required=True)
        e.add_argument("--predicted", required=True)
    for kind in ("kappa", "mannwhitney", "cliffs", "bh"):
        e = ev.add_parser(kind, help="reads a two-column CSV (bh: first column)")
        e.add_argument("csv")
    e = ev.add_parser("grid", help="AUC of every algorithm x preprocessing per feature set")
    e.add_argument("--dataset", nargs="+", required=True)
    e.add_argument("--folds", type=int, default=10)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--binary", action="store_true")
    e.add_argument("--out")
    e = ev.add_parser("holdout", help="precision/recall/F/AUC of a train/test split")
    e.add_argument("--train", required=True)
    e.add_argument("--test", required=True)
    e.add_argument("--algorithm", choices=ALGORITHMS, default="random_forest")
    e.add_argument("--smote", action="store_true")
    e.add_argument("--attr-select", action="store_true")
    e.add_argument("--binary", action="store_true")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e = ev.add_parser("tuning", help="random forest max-features sweep on a train/test split")
    e.add_argument("--train", required=True)
    e.add_argument("--test", required=True)
    e.add_argument("--max-features-grid", type=int, nargs="+", default=[1, 2, 4, 8, 16, 32])
    e.add_argument("--binary", action="store_true")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out")
    e = ev.add_parser("clustering", help="MoJoFM per partition file in two directories")
    e.add_argument("--truth", required=True, help="directory of ground-truth partition JSONs")
    e.add_argument("--predicted", required=True, help="directory with same-named predictions")
    e.add_argument("--out")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except (CorpusError, ModelError, ValueError, FileNotFoundError, KeyError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

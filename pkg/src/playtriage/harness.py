"""Result tables for a labeled corpus in the dataset / partition formats.

Given equivalently formatted data, these recompute the categorization grid
(algorithm x preprocessing x feature set AUCs), held-out precision / recall /
F-measure, the random-forest max-features sweep, and per-game MoJoFM.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import load_dataset
from .evaluate import mojofm
from .learner import ALGORITHMS, PipelineSpec, compute_metrics, cross_validate, fit_pipeline
from .partition import Partition

PREPROCESSING = ((False, False), (True, False), (False, True), (True, True))


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.2f}"


def _table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    rows = [list(map(str, r)) for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    line = lambda cells: "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
    sep = "|" + "|".join("-" * (w + 2) for w in widths) + "|"
    return "\n".join([line(header), sep, *(line(r) for r in rows)]) + "\n"


def categorization_grid(datasets: Sequence[Path], folds: int = 10, seed: int = 0,
                        binary: bool = False, algorithms: Sequence[str] = ALGORITHMS):
    """``{(feature_set, algorithm, preprocessing label): unweighted mean AUC}``."""
    out = {}
    for path in datasets:
        data = load_dataset(path)
        if binary:
            data = data.binary()
        fs = data.meta.get("feature_set", Path(path).stem)
        for algo in algorithms:
            for use_smote, use_sel in PREPROCESSING:
                spec = PipelineSpec(algo, use_smote, use_sel)
                m = cross_validate(data, spec, folds=folds, seed=seed)
                out[(fs, algo, spec.label.split("/")[1])] = m.mean_auc
    return out


def categorization_grid_table(datasets, folds=10, seed=0, binary=False) -> str:
    grid = categorization_grid(datasets, folds, seed, binary)
    pre = ["none", "smote", "attr_select", "smote+attr_select"]
    rows = []
    for fs, algo in dict.fromkeys((k[0], k[1]) for k in grid):
        rows.append([fs, algo, *(_fmt(grid[(fs, algo, p)]) for p in pre)])
    return _table(["features", "algorithm", *pre], rows)


def holdout_metrics(train_path: Path, test_path: Path, spec: PipelineSpec, seed: int = 0,
                    binary: bool = False):
    train = load_dataset(train_path)
    test = load_dataset(test_path)
    if binary:
        train, test = train.binary(), test.binary()
    model = fit_pipeline(train, spec, seed)
    proba = model.proba_for(test)
    pred = [model.classes[i] for i in np.argmax(proba, axis=1)]
    classes = sorted(set(model.classes) | set(test.labels))
    full = np.zeros((len(test), len(classes)))
    for ci, c in enumerate(model.classes):
        full[:, classes.index(c)] = proba[:, ci]
    return compute_metrics(pred, test.labels, full, classes)


def holdout_table(train_path, test_path, algorithm="random_forest", use_smote=False,
                  attr_select=False, seed=0, binary=False) -> str:
    m = holdout_metrics(train_path, test_path, PipelineSpec(algorithm, use_smote, attr_select),
                        seed, binary)
    rows = [[c, _fmt(cm.precision), _fmt(cm.recall), _fmt(cm.f_measure), _fmt(cm.auc),
             cm.support] for c, cm in m.per_class.items()]
    rows.append(["weighted", _fmt(m.weighted_precision), _fmt(m.weighted_recall),
                 _fmt(m.weighted_f_measure), _fmt(m.weighted_auc), int(m.confusion.sum())])
    return _table(["class", "precision", "recall", "f_measure", "auc", "support"], rows)


def tuning_table(train_path, test_path, grid: Sequence[int], seed=0, binary=False) -> str:
    rows = []
    for mf in grid:
        spec = PipelineSpec("random_forest", params={"max_features": mf})
        m = holdout_metrics(train_path, test_path, spec, seed, binary)
        rows.append([mf, _fmt(m.weighted_precision), _fmt(m.weighted_recall),
                     _fmt(m.weighted_f_measure), _fmt(m.mean_auc)])
    return _table(["max_features", "precision", "recall", "f_measure", "mean_auc"], rows)


def mojofm_table(truth_dir: Path, predicted_dir: Path) -> str:
    """One row per ``*.json`` ground-truth partition with a same-named prediction."""
    rows, scores = [], []
    for tpath in sorted(Path(truth_dir).glob("*.json")):
        ppath = Path(predicted_dir) / tpath.name
        if not ppath.is_file():
            rows.append([tpath.stem, "missing"])
            continue
        score = mojofm(Partition.load(ppath), Partition.load(tpath))
        scores.append(score)
        rows.append([tpath.stem, f"{score:.1f}"])
    if scores:
        rows.append(["average", f"{np.mean(scores):.1f}"])
    return _table(["partition", "mojofm"], rows)

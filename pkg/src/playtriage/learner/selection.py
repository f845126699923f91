"""Two-step attribute selection: information-gain filter, then a kNN wrapper."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..corpus import Dataset
from .metrics import mean_auc
from .models import train

N_BINS = 10
GAIN_EPS = 1e-12
WRAPPER_FOLDS = 5
WRAPPER_PATIENCE = 5
WRAPPER_MIN_GAIN = 1e-6


def discretize(x: np.ndarray, n_bins: int = N_BINS) -> np.ndarray:
    """Equal-frequency bin index for each value; equal values share a bin."""
    x = np.asarray(x, dtype=float)
    if len(x) == 0:
        return np.zeros(0, dtype=np.int64)
    cuts = np.unique(np.quantile(x, np.arange(1, n_bins) / n_bins))
    return np.searchsorted(cuts, x, side="right")


def entropy(labels: Sequence) -> float:
    _, counts = np.unique(np.asarray(labels, dtype=object).astype(str), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def info_gain(bins: np.ndarray, labels: Sequence) -> float:
    """H(Y) - H(Y | bin) in bits."""
    labels = np.asarray(labels, dtype=object)
    h = entropy(labels)
    n = len(labels)
    cond = 0.0
    for b in np.unique(bins):
        sel = bins == b
        cond += sel.sum() / n * entropy(labels[sel])
    return h - cond


def info_gain_rank(data: Dataset, n_bins: int = N_BINS) -> list[tuple[str, float]]:
    """Features with positive gain, sorted by gain (descending, then name order)."""
    gains = []
    for j, name in enumerate(data.feature_names):
        g = info_gain(discretize(data.X[:, j], n_bins), data.labels)
        if g > GAIN_EPS:
            gains.append((j, name, g))
    gains.sort(key=lambda t: (-t[2], t[0]))
    return [(name, g) for _, name, g in gains]


def stratified_folds(labels: Sequence, n_folds: int, seed: int) -> list[np.ndarray]:
    """Test-index arrays. Each class is shuffled and dealt round-robin across folds."""
    rng = np.random.default_rng(seed)
    labels = np.asarray(labels, dtype=object)
    folds: list[list[int]] = [[] for _ in range(n_folds)]
    offset = 0
    for c in sorted(set(labels.tolist())):
        members = rng.permutation(np.nonzero(labels == c)[0])
        for r, i in enumerate(members):
            folds[(offset + r) % n_folds].append(int(i))
        offset += len(members)
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def knn_cv_auc(data: Dataset, features: Sequence[str], seed: int,
               n_folds: int = WRAPPER_FOLDS) -> float:
    """Pooled out-of-fold unweighted mean AUC of kNN (k=3) on ``features``."""
    sub = data.subset(features=list(features))
    classes = sub.classes
    cindex = {c: i for i, c in enumerate(classes)}
    y = np.array([cindex[l] for l in sub.labels])
    n_folds = max(2, min(n_folds, min(np.bincount(y))))
    proba = np.zeros((len(y), len(classes)))
    for test in stratified_folds(sub.labels, n_folds, seed):
        train_rows = np.setdiff1d(np.arange(len(y)), test)
        tr = sub.subset(rows=train_rows)
        model = train(tr, "knn", {"k": 3})
        p = model.predict_proba(sub.X[test])
        for ci, c in enumerate(model.classes):
            proba[test, cindex[c]] = p[:, ci]
    return mean_auc(proba, y, len(classes))


def wrapper_select(data: Dataset, ranked: Sequence, seed: int = 0,
                   patience: int = WRAPPER_PATIENCE) -> list[str]:
    """Greedy forward selection in rank order, scored by :func:`knn_cv_auc`.

    The first ranked feature is always kept. A later candidate is kept when
    it raises the score by more than 1e-6; the search stops after
    ``patience`` consecutive rejections.
    """
    names = [r[0] if isinstance(r, tuple) else r for r in ranked]
    if not names:
        raise ValueError("ranking is empty")
    chosen = [names[0]]
    best = knn_cv_auc(data, chosen, seed)
    misses = 0
    for cand in names[1:]:
        score = knn_cv_auc(data, chosen + [cand], seed)
        if score > best + WRAPPER_MIN_GAIN:
            chosen.append(cand)
            best = score
            misses = 0
        else:
            misses += 1
            if misses >= patience:
                break
    return chosen

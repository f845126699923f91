"""AUC and per-class precision / recall / F-measure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata


def auc(scores: Sequence[float], labels: Sequence) -> float:
    """Rank-based (Mann-Whitney) ROC AUC; tied pairs count one half.

    ``labels`` are booleans (or 0/1): true marks the positive class.
    """
    s = np.asarray(scores, dtype=float)
    pos = np.asarray(labels).astype(bool)
    if s.shape != pos.shape:
        raise ValueError("scores and labels differ in length")
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    ranks = rankdata(s)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def mean_auc(proba: np.ndarray, y: np.ndarray, n_classes: int) -> float:
    """Unweighted mean of one-vs-rest AUCs over classes present in ``y``."""
    vals = []
    for c in range(n_classes):
        pos = y == c
        if 0 < pos.sum() < len(y):
            vals.append(auc(proba[:, c], pos))
    return float(np.mean(vals)) if vals else 0.5


@dataclass
class ClassMetrics:
    support: int
    precision: Optional[float]
    recall: Optional[float]
    f_measure: Optional[float]
    auc: Optional[float]


@dataclass
class Metrics:
    classes: list[str]
    per_class: dict[str, ClassMetrics]
    confusion: np.ndarray  # rows: truth, columns: prediction
    weighted_precision: float
    weighted_recall: float
    weighted_f_measure: float
    mean_auc: Optional[float]
    weighted_auc: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "classes": self.classes,
            "per_class": {c: vars(m) for c, m in self.per_class.items()},
            "confusion": self.confusion.tolist(),
            "weighted_precision": self.weighted_precision,
            "weighted_recall": self.weighted_recall,
            "weighted_f_measure": self.weighted_f_measure,
            "mean_auc": self.mean_auc,
            "weighted_auc": self.weighted_auc,
        }

    def __eq__(self, other):
        if not isinstance(other, Metrics):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def compute_metrics(predicted: Sequence[str], truth: Sequence[str],
                    proba: Optional[np.ndarray] = None,
                    classes: Optional[Sequence[str]] = None) -> Metrics:
    """One-vs-rest counts per class.

    Precision (and hence F) is ``None`` for a class that is never predicted.
    Weighted means weight each class by its support; undefined values count
    as 0. ``proba`` columns follow ``classes`` and, when given, yield
    one-vs-rest AUCs and their unweighted mean.
    """
    if len(predicted) != len(truth):
        raise ValueError("predicted and truth differ in length")
    if classes is None:
        classes = sorted(set(truth) | set(predicted))
    classes = list(classes)
    idx = {c: i for i, c in enumerate(classes)}
    k = len(classes)
    conf = np.zeros((k, k), dtype=np.int64)
    for p, t in zip(predicted, truth):
        conf[idx[t], idx[p]] += 1

    per_class = {}
    aucs = []
    for c, i in idx.items():
        tp = int(conf[i, i])
        fp = int(conf[:, i].sum()) - tp
        fn = int(conf[i, :].sum()) - tp
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else None
        recall = tp / support if support else None
        if precision is None or recall is None:
            f = None
        else:
            f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        a = None
        if proba is not None and 0 < support < len(truth):
            a = auc(proba[:, i], [t == c for t in truth])
            aucs.append((a, support))
        per_class[c] = ClassMetrics(support, precision, recall, f, a)

    n = max(len(truth), 1)

    def weighted(attr):
        return float(sum(((getattr(m, attr) or 0.0) * m.support) for m in per_class.values()) / n)

    return Metrics(
        classes=classes,
        per_class=per_class,
        confusion=conf,
        weighted_precision=weighted("precision"),
        weighted_recall=weighted("recall"),
        weighted_f_measure=weighted("f_measure"),
        mean_auc=float(np.mean([a for a, _ in aucs])) if aucs else None,
        weighted_auc=(float(sum(a * s for a, s in aucs) / sum(s for _, s in aucs))
                      if aucs else None),
    )

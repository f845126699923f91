"""SMOTE oversampling up to the majority class count."""

from __future__ import annotations

import numpy as np

from ..corpus import Dataset


class SmoteError(ValueError):
    pass


def smote(data: Dataset, k: int = 5, seed: int = 0, return_pairs: bool = False):
    """Oversample every non-majority class until all classes match the majority.

    Each synthetic row is ``p + lam * (q - p)`` with ``p`` a real row of the
    class, ``q`` one of its ``k`` nearest same-class neighbours and ``lam``
    drawn uniformly from ``[0, 1)``. Original rows come first, unchanged.

    With ``return_pairs=True`` also returns the ``(p_index, q_index, lam)``
    triples (indices into ``data``) behind each synthetic row.
    """
    if k < 1:
        raise SmoteError("k must be >= 1")
    labels = np.array(data.labels, dtype=object)
    classes = data.classes
    counts = {c: int(np.sum(labels == c)) for c in classes}
    target = max(counts.values()) if counts else 0
    rng = np.random.default_rng(seed)

    new_rows, new_labels, pairs = [], [], []
    X = np.asarray(data.X, dtype=float)
    for c in classes:
        need = target - counts[c]
        if need == 0:
            continue
        members = np.nonzero(labels == c)[0]
        if len(members) < 2:
            raise SmoteError(
                f"class {c!r} has a single member; merge it with another class or drop it")
        pts = X[members]
        kk = min(k, len(members) - 1)
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        np.fill_diagonal(d2, np.inf)
        neighbours = np.argsort(d2, axis=1, kind="stable")[:, :kk]
        base = rng.integers(0, len(members), need)
        pick = rng.integers(0, kk, need)
        lam = rng.random(need)
        for b, j, l in zip(base, pick, lam):
            q = neighbours[b, j]
            new_rows.append(pts[b] + l * (pts[q] - pts[b]))
            new_labels.append(c)
            pairs.append((int(members[b]), int(members[q]), float(l)))

    if new_rows:
        out_X = np.vstack([X, np.array(new_rows)])
    else:
        out_X = X.copy()
    out = Dataset(list(data.feature_names), out_X, list(data.labels) + new_labels, dict(data.meta))
    return (out, pairs) if return_pairs else out

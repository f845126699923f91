"""Agreement, rank tests, effect size and multiple-comparison adjustment."""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import norm, rankdata

EXACT_MW_LIMIT = 20


def cohen_kappa(r1: Sequence, r2: Sequence) -> float:
    """``(p_o - p_e) / (1 - p_e)``; defined as 1 when ``p_e == 1``."""
    if len(r1) != len(r2):
        raise ValueError("rating series differ in length")
    if not len(r1):
        raise ValueError("rating series are empty")
    n = len(r1)
    cats = sorted(set(r1) | set(r2), key=repr)
    p_o = sum(a == b for a, b in zip(r1, r2)) / n
    p_e = sum((list(r1).count(c) / n) * (list(r2).count(c) / n) for c in cats)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


class MannWhitneyResult(NamedTuple):
    U: float
    p: float
    exact: bool


def _u_distribution(m: int, n: int) -> np.ndarray:
    """Number of rank arrangements giving each U in 0..m*n (no ties)."""
    # f[i][j] is the count vector for sample sizes (i, j)
    f = [[None] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        for j in range(n + 1):
            if i == 0 or j == 0:
                v = np.zeros(i * j + 1, dtype=np.int64)
                v[0] = 1
            else:
                v = np.zeros(i * j + 1, dtype=np.int64)
                a = f[i][j - 1]          # largest value belongs to y: no pairs won by it
                v[: len(a)] += a
                b = f[i - 1][j]          # largest value belongs to x: wins all j pairs
                v[j: j + len(b)] += b
            f[i][j] = v
    return f[m][n]


def mann_whitney(x: Sequence[float], y: Sequence[float]) -> MannWhitneyResult:
    """U statistic of ``x`` with two-tailed p.

    Exact when ``len(x) + len(y) <= 20`` and there are no ties; otherwise the
    normal approximation with continuity and tie correction.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    m, n = len(x), len(y)
    pooled = np.concatenate([x, y])
    ranks = rankdata(pooled)
    u = float(ranks[:m].sum() - m * (m + 1) / 2.0)
    has_ties = len(np.unique(pooled)) < len(pooled)

    if m + n <= EXACT_MW_LIMIT and not has_ties:
        counts = _u_distribution(m, n)
        total = counts.sum()
        k = int(round(u))
        lower = counts[: k + 1].sum() / total
        upper = counts[k:].sum() / total
        return MannWhitneyResult(u, float(min(1.0, 2.0 * min(lower, upper))), True)

    N = m + n
    _, t = np.unique(pooled, return_counts=True)
    var = m * n / 12.0 * ((N + 1) - np.sum(t ** 3 - t) / (N * (N - 1)))
    if var <= 0:
        return MannWhitneyResult(u, 1.0, False)
    z = (abs(u - m * n / 2.0) - 0.5) / np.sqrt(var)
    p = 2.0 * norm.sf(z) if z > 0 else 1.0
    return MannWhitneyResult(u, float(min(1.0, p)), False)


CLIFF_THRESHOLDS = ((0.147, "negligible"), (0.33, "small"), (0.474, "medium"))


class CliffsDelta(NamedTuple):
    delta: float
    magnitude: str


def cliffs_magnitude(delta: float) -> str:
    a = abs(delta)
    for cut, name in CLIFF_THRESHOLDS:
        if a < cut:
            return name
    return "large"


def cliffs_delta(x: Sequence[float], y: Sequence[float]) -> CliffsDelta:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("both samples must be non-empty")
    diff = x[:, None] - y[None, :]
    delta = float((np.sum(diff > 0) - np.sum(diff < 0)) / diff.size)
    return CliffsDelta(delta, cliffs_magnitude(delta))


def bh_adjust(pvalues: Sequence[float]) -> np.ndarray:
    """Benjamini-Hochberg step-up adjusted p-values, in input order."""
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1:
        raise ValueError("expected a 1-D sequence of p-values")
    if np.any((p < 0) | (p > 1)) or np.any(np.isnan(p)):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    if m == 0:
        return p.copy()
    order = np.argsort(p, kind="stable")
    scaled = p[order] * m / np.arange(1, m + 1)
    adjusted = np.minimum.accumulate(scaled[::-1])[::-1]
    out = np.empty(m)
    out[order] = np.minimum(adjusted, 1.0)
    return out

"""Non-parametric clustering of segments.

Distance-matrix algorithms (DBSCAN, OPTICS) index elements by row; noise
points become singleton clusters so that every output is a total partition.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .partition import Partition
from .vision import as_frame, hsv_hist, pearson, ssim

DEFAULT_MIN_PTS = 2
MEAN_SHIFT_MAX_ITER = 300
MEAN_SHIFT_TOL = 1e-5


def check_distance_matrix(m) -> np.ndarray:
    d = np.asarray(m, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.allclose(d, d.T, atol=1e-12) or np.any(np.diag(d) != 0) or np.any(d < 0):
        raise ValueError("distance matrix must be symmetric, non-negative, with zero diagonal")
    return d


def context_distances(summaries: Sequence, metric: str = "hsv") -> np.ndarray:
    """Pairwise ``1 - similarity`` between summary frames (``ssim`` or ``hsv``)."""
    frames = [as_frame(f) for f in summaries]
    if len(frames) < 2:
        raise ValueError("need at least two summary frames")
    for f in frames[1:]:
        if f.shape != frames[0].shape:
            raise ValueError("summary frames differ in dimensions")
    n = len(frames)
    d = np.zeros((n, n))
    if metric == "ssim":
        sim = lambda i, j: ssim(frames[i], frames[j])
    elif metric == "hsv":
        hists = [hsv_hist(f) for f in frames]
        sim = lambda i, j: pearson(hists[i], hists[j])
    else:
        raise ValueError(f"unknown metric {metric!r}; use 'ssim' or 'hsv'")
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = max(0.0, 1.0 - sim(i, j))
    return d


def nearest_neighbor_distances(m) -> np.ndarray:
    d = np.array(m, dtype=float)
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def estimate_epsilon(m) -> float:
    """Largest gap between consecutive sorted nearest-neighbour distances."""
    d = check_distance_matrix(m)
    if len(d) < 3:
        raise ValueError("epsilon estimation needs at least three elements")
    nn = np.sort(nearest_neighbor_distances(d))
    return float(np.max(np.diff(nn)))


def _neighbors(d: np.ndarray, eps: float) -> list[np.ndarray]:
    return [np.nonzero(row <= eps)[0] for row in d]


def dbscan(m, eps: float, min_pts: int = DEFAULT_MIN_PTS,
           ids: Optional[Sequence] = None) -> Partition:
    """Density-based clustering on a precomputed distance matrix.

    Neighbourhoods are closed (``d <= eps``) and include the point itself.
    A border point joins the first cluster that reaches it.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    d = check_distance_matrix(m)
    n = len(d)
    neigh = _neighbors(d, eps)
    core = np.array([len(nb) >= min_pts for nb in neigh], dtype=bool)
    labels = np.full(n, -1)
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster
        queue = [i]
        while queue:
            p = queue.pop()
            if not core[p]:
                continue
            for q in neigh[p]:
                if labels[q] == -1:
                    labels[q] = cluster
                    queue.append(q)
        cluster += 1
    return _with_singletons(labels, ids)


def _with_singletons(labels: np.ndarray, ids) -> Partition:
    labels = labels.copy()
    nxt = labels.max(initial=-1) + 1
    for i in range(len(labels)):
        if labels[i] == -1:
            labels[i] = nxt
            nxt += 1
    return Partition.from_labels(labels.tolist(), ids)


@dataclass
class OpticsResult:
    ordering: list[int]
    reachability: np.ndarray
    core_distance: np.ndarray
    predecessor: np.ndarray
    partition: Partition


def optics_order(d: np.ndarray, eps: float, min_pts: int):
    n = len(d)
    neigh = _neighbors(d, eps)
    sorted_rows = np.sort(d, axis=1)
    core = np.full(n, np.inf)
    if min_pts <= n:
        kth = sorted_rows[:, min_pts - 1]
        core = np.where(kth <= eps, kth, np.inf)
    reach = np.full(n, np.inf)
    pred = np.full(n, -1)
    done = np.zeros(n, dtype=bool)
    ordering = []

    def update(p, seeds):
        for o in neigh[p]:
            if done[o]:
                continue
            r = max(core[p], d[p, o])
            if r < reach[o]:
                reach[o] = r
                pred[o] = p
                heapq.heappush(seeds, (r, int(o)))

    for start in range(n):
        if done[start]:
            continue
        done[start] = True
        ordering.append(start)
        if not np.isfinite(core[start]):
            continue
        seeds: list = []
        update(start, seeds)
        while seeds:
            r, q = heapq.heappop(seeds)
            if done[q] or r > reach[q]:
                continue
            done[q] = True
            ordering.append(q)
            if np.isfinite(core[q]):
                update(q, seeds)
    return ordering, reach, core, pred


def optics(m, eps: float, min_pts: int = DEFAULT_MIN_PTS, ids: Optional[Sequence] = None,
           return_details: bool = False):
    """OPTICS ordering bounded by ``eps``, clusters extracted by an ``eps`` cut."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    d = check_distance_matrix(m)
    ordering, reach, core, pred = optics_order(d, eps, min_pts)
    labels = np.full(len(d), -1)
    current = -1
    for p in ordering:
        if reach[p] > eps:
            if core[p] <= eps:
                current += 1
                labels[p] = current
        else:
            labels[p] = current
    part = _with_singletons(labels, ids)
    if return_details:
        return OpticsResult(ordering, reach, core, pred, part)
    return part


def median_pairwise_distance(X: np.ndarray) -> float:
    """Median Euclidean distance over pairs of distinct vectors.

    Duplicate rows are collapsed first, so repeating the whole dataset leaves
    the value unchanged.
    """
    U = np.unique(np.asarray(X, dtype=float), axis=0)
    if len(U) < 2:
        return 0.0
    return float(np.median(pdist(U)))


def mean_shift(vectors, bandwidth: Optional[float] = None, ids: Optional[Sequence] = None,
               max_iter: int = MEAN_SHIFT_MAX_ITER, tol: float = MEAN_SHIFT_TOL) -> Partition:
    """Flat-kernel mean shift seeded from every point.

    Converged modes closer than ``bandwidth / 2`` are merged, visiting modes
    by decreasing kernel population.
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = len(X)
    if n == 0:
        raise ValueError("mean shift needs at least one vector")
    if bandwidth is not None and not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    if bandwidth is None:
        bandwidth = median_pairwise_distance(X)
        if bandwidth == 0.0:
            return Partition.from_labels([0] * n, ids)

    modes = X.copy()
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if not len(idx):
            break
        within = cdist(modes[idx], X) <= bandwidth
        counts = within.sum(axis=1)
        new = np.where(counts[:, None] > 0, (within @ X) / np.maximum(counts, 1)[:, None],
                       modes[idx])
        shift = np.linalg.norm(new - modes[idx], axis=1)
        modes[idx] = new
        active[idx[shift < tol]] = False

    population = (cdist(modes, X) <= bandwidth).sum(axis=1)
    order = sorted(range(n), key=lambda i: (-population[i], i))
    centers: list[int] = []
    for i in order:
        if not centers or np.min(np.linalg.norm(modes[centers] - modes[i], axis=1)) >= bandwidth / 2:
            centers.append(i)
    labels = np.argmin(cdist(modes, modes[centers]), axis=1)
    return Partition.from_labels(labels.tolist(), ids)


ISSUE_ALGORITHMS = ("dbscan", "optics", "mean_shift")


def cluster_matrix(d: np.ndarray, algorithm: str, eps: Optional[float] = None,
                   min_pts: int = DEFAULT_MIN_PTS, ids: Optional[Sequence] = None) -> Partition:
    """DBSCAN/OPTICS on a distance matrix with ``eps`` estimated when not given.

    With fewer than three elements and no ``eps``, only identical elements
    are grouped.
    """
    n = len(d)
    if eps is None:
        eps = estimate_epsilon(d) if n >= 3 else 0.0
    if algorithm == "dbscan":
        return dbscan(d, eps, min_pts, ids)
    if algorithm == "optics":
        return optics(d, eps, min_pts, ids)
    raise ValueError(f"unknown distance-matrix algorithm {algorithm!r}")


def cluster_by_issue(segments: Sequence[tuple], algorithm: str = "dbscan",
                     eps: Optional[float] = None, min_pts: int = DEFAULT_MIN_PTS,
                     bandwidth: Optional[float] = None) -> Partition:
    """Cluster ``(segment id, feature vector)`` pairs by Euclidean proximity."""
    if not segments:
        return Partition({})
    ids = [s[0] for s in segments]
    if len(set(ids)) != len(ids):
        raise ValueError("segment ids must be unique")
    X = np.array([np.asarray(s[1], dtype=float) for s in segments])
    if algorithm == "mean_shift":
        return mean_shift(X, bandwidth, ids)
    if algorithm not in ISSUE_ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose one of {ISSUE_ALGORITHMS}")
    return cluster_matrix(cdist(X, X), algorithm, eps, min_pts, ids)

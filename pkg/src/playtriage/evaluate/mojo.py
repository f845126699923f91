"""MoJo distance and the MoJoFM effectiveness measure.

``mno(A, B)`` is the minimum number of Move and Join operations turning A
into B. Each A-group is tagged with a B-group; elements outside their
group's tag are moved, and A-groups sharing a tag are joined. Tagging every
group with one of its maximum-overlap B-groups is never worse than any other
tagging, so the optimum is::

    mno = |E| - sum_i max_overlap(A_i) + |A| - M

where ``M`` is a maximum matching between A-groups and the B-groups they
overlap maximally (the number of distinct tags).
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from ..partition import Partition

EXACT_MAX_ELEMENTS = 10


def _as_partition(p) -> Partition:
    if isinstance(p, Partition):
        return p
    if isinstance(p, dict):
        return Partition(p)
    return Partition.from_groups(p)


def _max_matching(adj: Sequence[Sequence[int]]) -> int:
    """Size of a maximum bipartite matching (augmenting paths)."""
    match_right: dict[int, int] = {}

    def augment(u, seen):
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    return sum(augment(u, set()) for u in range(len(adj)))


def mno_labels(a: Sequence[int], b: Sequence[int]) -> int:
    """MoJo distance between two label vectors over the same elements."""
    overlap: dict[int, dict[int, int]] = {}
    for x, y in zip(a, b):
        row = overlap.setdefault(x, {})
        row[y] = row.get(y, 0) + 1
    total_max = 0
    adj = []
    for row in overlap.values():
        m = max(row.values())
        total_max += m
        adj.append([g for g, c in row.items() if c == m])
    return len(a) - total_max + len(overlap) - _max_matching(adj)


def _aligned(A: Partition, B: Partition):
    if A.elements != B.elements:
        raise ValueError("partitions cover different element sets")
    els = list(A.assignments)
    return [A[e] for e in els], [B[e] for e in els]


def mno(A, B) -> int:
    A, B = _as_partition(A), _as_partition(B)
    return mno_labels(*_aligned(A, B))


def restricted_growth_strings(n: int):
    """Every set partition of ``range(n)`` as a label list (first appearance order)."""
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i, k):
        if i == n:
            yield list(labels)
            return
        for c in range(k + 1):
            labels[i] = c
            yield from rec(i + 1, max(k, c + 1))

    yield from rec(1, 1)


def _shape_labels(shape: tuple[int, ...]) -> list[int]:
    return [g for g, size in enumerate(shape) for _ in range(size)]


@lru_cache(maxsize=None)
def _max_mno_exact(shape: tuple[int, ...]) -> int:
    b = _shape_labels(shape)
    return max(mno_labels(a, b) for a in restricted_growth_strings(len(b)))


def _candidates(shape: tuple[int, ...]):
    n = sum(shape)
    yield list(range(n))            # all singletons
    yield [0] * n                   # one group
    # k-th member of every B-group together: groups never overlap a B-group twice
    yield [k for size in shape for k in range(size)]
    # one B-group split into singletons, everything else merged
    offsets = [sum(shape[:g]) for g in range(len(shape))]
    for g, size in enumerate(shape):
        lab = [0] * n
        for k in range(size):
            lab[offsets[g] + k] = k + 1
        yield lab


@lru_cache(maxsize=None)
def _max_mno_search(shape: tuple[int, ...]) -> int:
    """Best candidate improved by single-element moves (a lower bound on the true max)."""
    b = _shape_labels(shape)
    n = len(b)
    best_lab, best = None, -1
    for lab in _candidates(shape):
        v = mno_labels(lab, b)
        if v > best:
            best_lab, best = lab, v
    improved = True
    while improved:
        improved = False
        for i in range(n):
            for c in range(max(best_lab) + 2):
                if c == best_lab[i]:
                    continue
                lab = list(best_lab)
                lab[i] = c
                v = mno_labels(lab, b)
                if v > best:
                    best_lab, best, improved = lab, v, True
    return best


def max_mno(B, exact_limit: int = EXACT_MAX_ELEMENTS) -> int:
    """``max over all partitions A' of E of mno(A', B)``.

    Exact enumeration up to ``exact_limit`` elements; beyond that a
    candidate search that may underestimate the true maximum.
    """
    B = _as_partition(B)
    shape = tuple(sorted((len(g) for g in B.groups()), reverse=True))
    if len(B) <= exact_limit:
        return _max_mno_exact(shape)
    return _max_mno_search(shape)


def mojofm(A, B, exact_limit: int = EXACT_MAX_ELEMENTS) -> float:
    """``100 - 100 * mno(A, B) / max mno(., B)``; 100 when A equals B."""
    A, B = _as_partition(A), _as_partition(B)
    d = mno(A, B)
    if d == 0:
        return 100.0
    worst = max_mno(B, exact_limit)
    return max(0.0, 100.0 - 100.0 * d / worst)

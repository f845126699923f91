"""Random forest, kNN and logistic regression classifiers.

All three share :class:`Classifier`, which stores the input feature names, the
ordered class list and the fitted state, and serializes to versioned JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

MODEL_FORMAT_VERSION = 1
ALGORITHMS = ("random_forest", "knn", "logistic")

DEFAULT_PARAMS = {
    "random_forest": {"n_trees": 100, "max_features": None},
    "knn": {"k": 3},
    "logistic": {"l2": 1e-4, "tol": 1e-6, "max_iter": 1000},
}


class ModelError(ValueError):
    pass


@dataclass
class Tree:
    """Flat binary tree. Leaves have ``feature == -1`` and vote for ``leaf_class``."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf_class: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            nd = node[idx]
            go_left = X[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
            active[idx] = self.feature[node[idx]] >= 0
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.leaf_class[self.apply(X)]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "leaf_class": self.leaf_class.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(np.array(d["feature"], dtype=np.int64),
                   np.array(d["threshold"], dtype=float),
                   np.array(d["left"], dtype=np.int64),
                   np.array(d["right"], dtype=np.int64),
                   np.array(d["leaf_class"], dtype=np.int64))

    @property
    def n_nodes(self) -> int:
        return len(self.feature)


def _best_split(x: np.ndarray, y: np.ndarray, n_classes: int):
    """Lowest weighted-Gini threshold on one feature, or None if ``x`` is constant."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    valid = xs[:-1] < xs[1:]
    if not valid.any():
        return None
    onehot = np.eye(n_classes)[y[order]]
    left = np.cumsum(onehot, axis=0)[:-1]
    total = left[-1] + onehot[-1]
    right = total - left
    n_left = np.arange(1, len(x), dtype=float)
    n_right = len(x) - n_left
    gini_left = 1.0 - np.sum((left / n_left[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((right / n_right[:, None]) ** 2, axis=1)
    score = (n_left * gini_left + n_right * gini_right) / len(x)
    score[~valid] = np.inf
    i = int(np.argmin(score))
    lo, hi = xs[i], xs[i + 1]
    thr = lo + (hi - lo) / 2.0
    if not lo <= thr < hi:
        thr = lo
    return score[i], thr


def grow_tree(X: np.ndarray, y: np.ndarray, n_classes: int, max_features: int,
              rng: np.random.Generator) -> Tree:
    """Unpruned CART tree with Gini impurity and ``max_features`` candidates per split.

    When none of the sampled features admits a split, the remaining features
    are tried in random order before the node becomes a leaf.
    """
    feature, threshold, left, right, leaf_class = [], [], [], [], []

    def new_node():
        for lst, v in ((feature, -1), (threshold, 0.0), (left, -1), (right, -1), (leaf_class, -1)):
            lst.append(v)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(len(y)))]
    n_features = X.shape[1]
    while stack:
        node, idx = stack.pop()
        ys = y[idx]
        counts = np.bincount(ys, minlength=n_classes)
        leaf_class[node] = int(np.argmax(counts))
        if len(idx) < 2 or counts.max() == len(idx):
            continue
        perm = rng.permutation(n_features)
        best = None
        for rank, j in enumerate(perm):
            if rank >= max_features and best is not None:
                break
            found = _best_split(X[idx, j], ys, n_classes)
            if found is not None and (best is None or found[0] < best[0]):
                best = (found[0], found[1], int(j))
        if best is None:
            continue
        _, thr, j = best
        mask = X[idx, j] <= thr
        l, r = new_node(), new_node()
        feature[node], threshold[node], left[node], right[node] = j, thr, l, r
        stack.append((r, idx[~mask]))
        stack.append((l, idx[mask]))

    return Tree(np.array(feature, dtype=np.int64), np.array(threshold, dtype=float),
                np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                np.array(leaf_class, dtype=np.int64))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _fit_binary_logistic(Z: np.ndarray, t: np.ndarray, l2: float, tol: float, max_iter: int):
    n, d = Z.shape

    def loss_grad(w):
        b, coef = w[0], w[1:]
        z = Z @ coef + b
        # log(1 + exp(-z)) for t=1, log(1 + exp(z)) for t=0
        loss = np.mean(np.logaddexp(0.0, z) - t * z) + 0.5 * l2 * coef @ coef
        err = (_sigmoid(z) - t) / n
        grad = np.concatenate([[err.sum()], Z.T @ err + l2 * coef])
        return loss, grad

    res = minimize(loss_grad, np.zeros(d + 1), jac=True, method="L-BFGS-B",
                   options={"gtol": tol, "maxiter": max_iter})
    return res.x


@dataclass
class Classifier:
    algorithm: str
    classes: list[str]
    feature_names: list[str]
    seed: int = 0
    params: dict = field(default_factory=dict)
    state: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ModelError(f"expected {self.n_features} features, got {X.shape[1]}")
        return X

    def predict_proba(self, X) -> np.ndarray:
        """Class distribution for each row of ``X`` (columns follow ``classes``)."""
        X = self._check(X)
        k = len(self.classes)
        if self.algorithm == "random_forest":
            votes = np.zeros((len(X), k))
            rows = np.arange(len(X))
            for tree in self.state["trees"]:
                np.add.at(votes, (rows, tree.predict(X)), 1.0)
            return votes / len(self.state["trees"])
        if self.algorithm == "knn":
            train_X, train_y = self.state["X"], self.state["y"]
            kk = min(self.params["k"], len(train_y))
            d2 = ((X[:, None, :] - train_X[None, :, :]) ** 2).sum(axis=2)
            nn = np.argsort(d2, axis=1, kind="stable")[:, :kk]
            proba = np.zeros((len(X), k))
            for c in range(k):
                proba[:, c] = (train_y[nn] == c).sum(axis=1)
            return proba / kk
        if self.algorithm == "logistic":
            Z = (X - self.state["mean"]) / self.state["scale"]
            W = self.state["W"]
            p = _sigmoid(Z @ W[:, 1:].T + W[:, 0])
            if k == 2 and W.shape[0] == 1:
                p = np.column_stack([1.0 - p[:, 0], p[:, 0]])
            s = p.sum(axis=1, keepdims=True)
            return np.where(s > 0, p / np.where(s > 0, s, 1.0), 1.0 / k)
        raise ModelError(f"unknown algorithm {self.algorithm!r}")

    def predict(self, X) -> list[str]:
        # argmax picks the lowest class index on ties
        return [self.classes[i] for i in np.argmax(self.predict_proba(X), axis=1)]

    def proba_for(self, data) -> np.ndarray:
        """Probabilities for a :class:`~playtriage.corpus.Dataset`, columns matched by name."""
        if list(data.feature_names) != self.feature_names:
            data = data.subset(features=self.feature_names)
        return self.predict_proba(data.X)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        state = {}
        if self.algorithm == "random_forest":
            state["trees"] = [t.to_dict() for t in self.state["trees"]]
        elif self.algorithm == "knn":
            state = {"X": self.state["X"].tolist(), "y": self.state["y"].tolist()}
        else:
            state = {k: np.asarray(v).tolist() for k, v in self.state.items()}
        return {
            "format": "playtriage-model",
            "version": MODEL_FORMAT_VERSION,
            "algorithm": self.algorithm,
            "classes": list(self.classes),
            "feature_names": list(self.feature_names),
            "seed": self.seed,
            "params": self.params,
            "state": state,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Classifier":
        if d.get("format") != "playtriage-model":
            raise ModelError("not a model file")
        if d.get("version") != MODEL_FORMAT_VERSION:
            raise ModelError(f"unsupported model version {d.get('version')!r}")
        algo, raw = d["algorithm"], d["state"]
        if algo == "random_forest":
            state = {"trees": [Tree.from_dict(t) for t in raw["trees"]]}
        elif algo == "knn":
            state = {"X": np.array(raw["X"], dtype=float).reshape(len(raw["y"]), -1),
                     "y": np.array(raw["y"], dtype=np.int64)}
        else:
            state = {k: np.array(v, dtype=float) for k, v in raw.items()}
        return cls(algo, list(d["classes"]), list(d["feature_names"]), d.get("seed", 0),
                   dict(d.get("params", {})), state)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Classifier":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train(data, algorithm: str = "random_forest", params: Optional[dict] = None,
          seed: int = 0) -> Classifier:
    """Fit one classifier on a :class:`~playtriage.corpus.Dataset`."""
    if algorithm not in ALGORITHMS:
        raise ModelError(f"unknown algorithm {algorithm!r}; choose one of {ALGORITHMS}")
    p = dict(DEFAULT_PARAMS[algorithm])
    p.update(params or {})
    classes = data.classes
    if len(classes) < 2:
        raise ModelError("training needs at least two classes")
    X = np.asarray(data.X, dtype=float)
    cindex = {c: i for i, c in enumerate(classes)}
    y = np.array([cindex[lab] for lab in data.labels], dtype=np.int64)
    n, n_feat = X.shape

    if algorithm == "random_forest":
        n_trees = int(p["n_trees"])
        mf = p.get("max_features")
        max_features = max(1, int(math.isqrt(n_feat))) if mf is None else max(1, min(int(mf), n_feat))
        p["max_features"] = max_features
        trees = []
        for child in np.random.SeedSequence(seed).spawn(n_trees):
            rng = np.random.default_rng(child)
            boot = rng.integers(0, n, n)
            trees.append(grow_tree(X[boot], y[boot], len(classes), max_features, rng))
        state = {"trees": trees}
    elif algorithm == "knn":
        state = {"X": X.copy(), "y": y}
    else:
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        Z = (X - mean) / scale
        targets = [1] if len(classes) == 2 else range(len(classes))
        W = np.array([_fit_binary_logistic(Z, (y == c).astype(float), p["l2"], p["tol"],
                                           p["max_iter"]) for c in targets])
        state = {"mean": mean, "scale": scale, "W": W}

    return Classifier(algorithm, classes, list(data.feature_names), seed, p, state)


def predict_proba(model: Classifier, x: Sequence[float]) -> dict[str, float]:
    """Class distribution for one feature vector, keyed by class name."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ModelError("expected a single feature vector")
    return dict(zip(model.classes, model.predict_proba(x)[0].tolist()))

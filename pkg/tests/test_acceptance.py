"""Acceptance criteria, one test per criterion (some criteria hold several checks).

Each check appends a ``PASS`` / ``FAIL`` line to ``RESULTS``; the lines are
printed in the terminal summary (see ``conftest.py``) and when this file is
run as a script.
"""

import itertools
import json
import math
import time
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from oracles import (canon, dbscan_oracle, info_gain_oracle, integer_partitions,
                     mojo_distances_to, quantile_oracle, shape_representative, ssim_oracle)
from playtriage.cli import main as cli_main
from playtriage.cluster import dbscan, estimate_epsilon, mean_shift, optics
from playtriage.corpus import Dataset, SubtitleEntry, persist_dataset
from playtriage.evaluate import bh_adjust, cliffs_delta, cohen_kappa, mann_whitney, mno, mojofm
from playtriage.evaluate.mojo import mno_labels, restricted_growth_strings
from playtriage.learner import (PipelineSpec, auc, cross_validate, discretize, info_gain,
                                smote)
from playtriage.partition import Partition
from playtriage.pipeline import PipelineConfig, report_json, report_schema, run_pipeline
from playtriage.segmenter import compute_segments
from playtriage.synthetic import TRANSCRIPT_LABELS, make_fixture
from playtriage.vision import PairSeries, aggregate_features, ssim

RESULTS: list[str] = []


def record(criterion, name, ok, detail="", elapsed=None, limit=None):
    timing = ""
    if elapsed is not None:
        timing = f" [{elapsed:.2f}s" + (f" / limit {limit:g}s]" if limit else "]")
    line = f"{'PASS' if ok else 'FAIL'}  C{criterion:<2} {name}{timing}" + (f"  {detail}" if detail else "")
    RESULTS.append(line)
    print(line)
    return ok


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def mmss(m, s):
    return (m * 60 + s) * 1000


# -- 1 ---------------------------------------------------------------------

def test_c1_worked_example():
    e = SubtitleEntry(1, mmss(13, 45), mmss(13, 45) + 3000, "x")
    (seg,) = compute_segments([e], 5, mmss(30, 0))
    got = (seg.start_ms, seg.end_ms)
    want = (mmss(13, 40), mmss(13, 52))
    ok = got == want
    record(1, "worked example 13:45 + 3 s, t=5 -> [13:40, 13:52]", ok,
           f"got [{got[0] // 60000}:{got[0] // 1000 % 60:02d}, {got[1] // 60000}:{got[1] // 1000 % 60:02d}]")
    assert ok


def test_c1_properties():
    rng = np.random.default_rng(1)
    bad = 0
    with Timer() as t:
        for _ in range(10_000):
            s = int(rng.integers(0, 3_600_000))
            d = int(rng.integers(0, 20_000))
            dur = int(rng.integers(1, 4_000_000))
            t1, t2 = sorted(rng.uniform(0, 15, 2))
            e = SubtitleEntry(1, s, s + d, "x")
            a = compute_segments([e], t1, dur)
            b = compute_segments([e], t2, dur)
            sh = int(round(t1 * 1000))
            lo, hi = max(s - sh, 0), min(s + d + sh, dur)
            if lo < hi:
                bad += not (len(a) == 1 and (a[0].start_ms, a[0].end_ms) == (lo, hi))
                bad += not (len(b) == 1 and b[0].start_ms <= lo and hi <= b[0].end_ms)
            else:
                bad += a != []
    ok = bad == 0 and t.elapsed < 1.0
    record(1, "clamped formula + t-monotonicity on 10,000 entries", ok, f"violations={bad}",
           t.elapsed, 1)
    assert ok


# -- 2 ---------------------------------------------------------------------

def test_c2_ssim_oracle():
    rng = np.random.default_rng(2)
    worst, worst_self = 0.0, 0.0
    with Timer() as t:
        for _ in range(100):
            a = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
            b = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
            worst = max(worst, abs(ssim(a, b) - ssim_oracle(a, b)))
            worst_self = max(worst_self, abs(ssim(a, a) - 1.0))
    ok = worst < 1e-6 and worst_self <= 1e-9 and t.elapsed < 10
    record(2, "SSIM vs windowed oracle on 100 random 16x16 pairs", ok,
           f"max|diff|={worst:.2e}, max|ssim(a,a)-1|={worst_self:.2e}", t.elapsed, 10)
    assert ok


# -- 3 ---------------------------------------------------------------------

def test_c3_video_features():
    rng = np.random.default_rng(3)
    worst, order_bad = 0.0, 0
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        s, h = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        if rng.random() < 0.2:
            s = np.round(s, 1)  # ties
        f = aggregate_features(PairSeries(s, h))
        for name, v in (("ssim", s), ("hsv", h)):
            st = [f[f"{name}_{k}"] for k in ("min", "q1", "median", "q3", "max")]
            order_bad += any(x > y for x, y in zip(st, st[1:]))
            ref = [min(v), quantile_oracle(v, 0.25), quantile_oracle(v, 0.5),
                   quantile_oracle(v, 0.75), max(v)]
            worst = max(worst, max(abs(x - y) for x, y in zip(st, ref)),
                        abs(f[f"{name}_mean"] - math.fsum(v) / len(v)))
    ok = order_bad == 0 and worst <= 1e-9
    record(3, "12 aggregates ordered and equal to quantile oracle", ok,
           f"order violations={order_bad}, max|diff|={worst:.2e}")
    assert ok


# -- 4 ---------------------------------------------------------------------

def _relabel_to_representative(b_labels):
    """Element permutation sending partition ``b`` onto its shape representative."""
    groups: dict[int, list[int]] = {}
    for e, g in enumerate(b_labels):
        groups.setdefault(g, []).append(e)
    ordered = sorted(groups.values(), key=lambda g: -len(g))
    perm = {}
    pos = 0
    for g in ordered:
        for e in g:
            perm[e] = pos
            pos += 1
    shape = tuple(len(g) for g in ordered)
    return perm, shape


def test_c4_mojo_exhaustive():
    pairs = mismatches = 0
    with Timer() as t:
        for n in range(1, 8):
            oracle = {}
            for shape in integer_partitions(n):
                dist = mojo_distances_to(shape_representative(shape))
                oracle[shape] = (dist, max(dist.values()))
            everything = list(restricted_growth_strings(n))
            for b in everything:
                perm, shape = _relabel_to_representative(b)
                dist, worst = oracle[shape]
                B = Partition.from_labels(b)
                for a in everything:
                    groups: dict[int, list[int]] = {}
                    for e, g in enumerate(a):
                        groups.setdefault(g, []).append(perm[e])
                    d = dist[canon(groups.values())]
                    expected = 100.0 if d == 0 else 100.0 - 100.0 * d / worst
                    got_mno = mno_labels(a, b)
                    got_fm = mojofm(Partition.from_labels(a), B)
                    pairs += 1
                    mismatches += got_mno != d or got_fm != expected
    ok_all = mismatches == 0 and t.elapsed < 60
    record(4, "mno and mojofm vs BFS oracle on all partition pairs, |E| <= 7", ok_all,
           f"pairs={pairs}, mismatches={mismatches}", t.elapsed, 60)

    rng = np.random.default_rng(4)
    self_bad = 0
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        A = Partition.from_labels(rng.integers(0, rng.integers(1, n + 1), n).tolist())
        self_bad += mojofm(A, A) != 100.0 or mno(A, A) != 0
    ok_self = self_bad == 0
    record(4, "mojofm(A, A) = 100 on 1,000 random partitions", ok_self, f"failures={self_bad}")
    assert ok_all and ok_self


# -- 5 ---------------------------------------------------------------------

def _instance(rng, n):
    pts = rng.random((n, int(rng.integers(1, 4)))) * rng.choice([1.0, 5.0])
    d = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1))
    vals = np.unique(d)
    eps = float(rng.choice(vals)) if rng.random() < 0.5 else float(rng.uniform(0, vals.max()))
    return d, eps


def _border_free(d, eps, min_pts):
    adj = d <= eps
    core = adj.sum(axis=1) >= min_pts
    return all(core[i] or not (adj[i] & core).any() for i in range(len(d)))


def test_c5_clustering():
    rng = np.random.default_rng(5)
    db_bad = op_bad = op_checked = 0
    for _ in range(200):
        n = int(rng.integers(1, 21))
        d, eps = _instance(rng, n)
        min_pts = int(rng.integers(1, 5))
        got = dbscan(d, eps, min_pts)
        db_bad += canon(got.groups()) != dbscan_oracle(d, eps, min_pts)
        if _border_free(d, eps, min_pts):
            op_checked += 1
            op_bad += optics(d, eps, min_pts) != got
    ok_db = db_bad == 0
    ok_op = op_bad == 0 and op_checked >= 100
    record(5, "DBSCAN vs transitive-closure oracle, 200 instances n <= 20", ok_db,
           f"mismatches={db_bad}")
    record(5, "OPTICS eps-cut == DBSCAN on border-free instances", ok_op,
           f"checked={op_checked}, mismatches={op_bad}")

    sigma, sep = 0.1, 1.0
    wins = default_wins = 0
    for trial in range(50):
        r = np.random.default_rng(1000 + trial)
        X = np.vstack([r.normal(0, sigma, (20, 2)), r.normal(0, sigma, (20, 2)) + [sep, 0.0]])
        truth = Partition.from_labels([0] * 20 + [1] * 20)
        wins += mean_shift(X, bandwidth=sep / 2) == truth
        default_wins += mean_shift(X) == truth
    ok_ms = wins == 50
    record(5, "MeanShift: two sigma=0.1 blobs 10 sigma apart (bandwidth = separation/2), 50 trials",
           ok_ms, f"success={wins}/50; with the median-distance default: {default_wins}/50")
    assert ok_db and ok_op and ok_ms


# -- 6 ---------------------------------------------------------------------

def _from_nn(nn):
    n = 2 * len(nn)
    d = np.full((n, n), 100.0)
    np.fill_diagonal(d, 0.0)
    for i, v in enumerate(nn):
        d[2 * i, 2 * i + 1] = d[2 * i + 1, 2 * i] = v
    return d


def test_c6_epsilon():
    e1 = estimate_epsilon(_from_nn([0.1, 0.12, 0.5]))
    x = np.array([0.0, 1.0, 2.0, 10.0])[:, None]
    e2 = estimate_epsilon(np.abs(x - x.T))
    ok_ex = e1 == 0.38 and e2 == 7.0
    record(6, "NN distances {0.1, 0.12, 0.5} -> 0.38; line 0,1,2,10 -> 7", ok_ex,
           f"got {e1!r}, {e2!r}")

    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(3, 15))
        p = rng.random((n, 3))
        d = np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1))
        c = float(10 ** rng.uniform(-3, 3))
        base = estimate_epsilon(d)
        worst = max(worst, abs(estimate_epsilon(c * d) - c * base) / max(c * base, 1e-300))
    ok_sc = worst <= 1e-12
    record(6, "scale equivariance on 1,000 random matrices", ok_sc, f"max rel err={worst:.1e}")
    assert ok_ex and ok_sc


# -- 7 ---------------------------------------------------------------------

def test_c7_learner():
    rng = np.random.default_rng(7)
    X = np.vstack([rng.standard_normal((100, 2)), rng.standard_normal((100, 2)) + 4.0])
    data = Dataset(["x", "y"], X, ["a"] * 100 + ["b"] * 100)
    m = cross_validate(data, PipelineSpec("random_forest"), folds=10, seed=0)
    ok_cv = m.mean_auc >= 0.95
    record(7, "10-fold CV unweighted AUC on 200-point separable data >= 0.95", ok_cv,
           f"AUC={m.mean_auc:.4f}")

    bad = 0
    for trial in range(20):
        r = np.random.default_rng(trial)
        counts = {"A": int(r.integers(10, 30)), "B": int(r.integers(2, 10)),
                  "C": int(r.integers(2, 10))}
        labels = [c for c, k in counts.items() for _ in range(k)]
        d = Dataset(["f1", "f2", "f3"], r.standard_normal((len(labels), 3)), labels)
        out, pairs = smote(d, seed=trial, return_pairs=True)
        got = {c: out.labels.count(c) for c in counts}
        bad += len(set(got.values())) != 1 or got["A"] != counts["A"]
        for row, (p, q, lam) in zip(out.X[len(d):], pairs):
            bad += not (0 <= lam <= 1 and d.labels[p] == d.labels[q]
                        and np.allclose(row, d.X[p] + lam * (d.X[q] - d.X[p]), atol=1e-12))
    ok_sm = bad == 0
    record(7, "SMOTE exact balance + segment membership (20 datasets)", ok_sm,
           f"violations={bad}")

    worst = 0.0
    for trial in range(50):
        r = np.random.default_rng(100 + trial)
        x = r.standard_normal(int(r.integers(5, 60)))
        y = list(r.choice(["a", "b", "c"], len(x)))
        b = discretize(x)
        worst = max(worst, abs(info_gain(b, y) - info_gain_oracle(b.tolist(), y)))
    ok_ig = worst <= 1e-9
    record(7, "information gain vs entropy oracle", ok_ig, f"max|diff|={worst:.1e}")

    a = auc([0.9, 0.8, 0.7, 0.6], [1, 0, 1, 0])
    ok_auc = a == 0.75
    record(7, "AUC hand example [+,-,+,-] -> 0.75", ok_auc, f"got {a!r}")
    assert ok_cv and ok_sm and ok_ig and ok_auc


# -- 8 ---------------------------------------------------------------------

def test_c8_statistics():
    checks = [
        ("kappa identical raters = 1", cohen_kappa(list("ABCAB"), list("ABCAB")) == 1.0),
        ("kappa [A,A,B,B] vs [A,B,A,B] = 0", cohen_kappa(list("AABB"), list("ABAB")) == 0.0),
        ("kappa systematic disagreement = -1", cohen_kappa(list("AABB"), list("BBAA")) == -1.0),
    ]
    r = mann_whitney([1, 2], [3, 4])
    checks.append(("Mann-Whitney [1,2] vs [3,4]: U=0, p=2/6", r.U == 0 and r.exact
                   and abs(r.p - 2 / 6) < 1e-15))
    checks.append(("Cliff's delta [1,2] vs [3,4] = -1, large",
                   tuple(cliffs_delta([1, 2], [3, 4])) == (-1.0, "large")))
    checks.append(("BH [0.01, 0.04, 0.03] -> [0.03, 0.04, 0.04]",
                   np.allclose(bh_adjust([0.01, 0.04, 0.03]), [0.03, 0.04, 0.04], rtol=0,
                               atol=1e-15)))
    for name, ok in checks:
        record(8, name, ok)
    assert all(ok for _, ok in checks)


def test_c8_cliffs_worked_example():
    r = cliffs_delta([1, 2, 3], [2])
    ok = abs(r.delta - 1 / 3) < 1e-12 and r.magnitude == "medium"
    record(8, "Cliff's delta [1,2,3] vs [2] -> 1/3, medium", ok,
           f"got {r.delta!r}, {r.magnitude} (pairs: 3>2, 1<2, 2=2)")
    assert ok


# -- 9 ---------------------------------------------------------------------

def test_c9_end_to_end(tmp_path):
    with Timer() as t:
        fx = make_fixture(tmp_path / "fixture")
        cfg = PipelineConfig.load(fx.config_path)
        first = report_json(run_pipeline(cfg))
        second = report_json(run_pipeline(PipelineConfig.load(fx.config_path)))
    doc = json.loads(first)
    errors = list(jsonschema.Draft202012Validator(report_schema()).iter_errors(doc))
    segs = [s for c in doc["contexts"] for ty in c["issue_types"] for i in ty["issues"]
            for s in i["segments"]]
    got = sorted(s["transcript"] for s in segs)
    seeded = sorted(k for k, v in TRANSCRIPT_LABELS.items()
                    if v != "non_informative" and k != "nice view from here")
    ok = (not errors and first == second and got == seeded and len(doc["contexts"]) >= 1
          and all(s["predicted_label"] != "non_informative" for s in segs)
          and "catching a bug pokemon" not in got and t.elapsed < 30)
    record(9, "synthetic fixture report: schema-valid, deterministic, seeded segments only", ok,
           f"contexts={len(doc['contexts'])}, segments={len(segs)}, schema errors={len(errors)}",
           t.elapsed, 30)
    assert ok


# -- 10 --------------------------------------------------------------------

def _labeled_split(rng, n, n_feat=6):
    classes = ["logic", "presentation", "balance", "performance", "non_informative"]
    y = rng.integers(0, len(classes), n)
    X = rng.standard_normal((n, n_feat))
    X[:, 0] += y * 1.5
    X[:, 1] += (y == 4) * 2.0
    return Dataset([f"f{i}" for i in range(n_feat)], X, [classes[k] for k in y],
                   {"feature_set": "synthetic"})


def test_c10_harness(tmp_path, capsys):
    rng = np.random.default_rng(10)
    persist_dataset(_labeled_split(rng, 80), tmp_path / "train.csv")
    persist_dataset(_labeled_split(rng, 40), tmp_path / "test.csv")
    truth, pred = tmp_path / "truth", tmp_path / "pred"
    truth.mkdir()
    pred.mkdir()
    for g in ("game1", "game2"):
        labels = rng.integers(0, 3, 9).tolist()
        noisy = [l if rng.random() < 0.7 else int(rng.integers(0, 3)) for l in labels]
        Partition({f"s{i}": l for i, l in enumerate(labels)}).save(truth / f"{g}.json")
        Partition({f"s{i}": l for i, l in enumerate(noisy)}).save(pred / f"{g}.json")

    commands = {
        "grid (categorization AUC tables)": ["evaluate", "grid", "--dataset",
                                             tmp_path / "train.csv", "--folds", "3"],
        "grid --binary": ["evaluate", "grid", "--dataset", tmp_path / "train.csv", "--folds", "3",
                          "--binary"],
        "holdout (test-set P/R/F/AUC)": ["evaluate", "holdout", "--train", tmp_path / "train.csv",
                                         "--test", tmp_path / "test.csv"],
        "tuning (max-features sweep)": ["evaluate", "tuning", "--train", tmp_path / "train.csv",
                                        "--test", tmp_path / "test.csv",
                                        "--max-features-grid", "1", "2", "4"],
        "clustering (per-game MoJoFM)": ["evaluate", "clustering", "--truth", truth,
                                         "--predicted", pred],
    }
    all_ok = True
    for name, argv in commands.items():
        capsys.readouterr()
        code = cli_main([str(a) for a in argv])
        out = capsys.readouterr().out
        ok = code == 0 and out.startswith("|") and out.count("\n") >= 3
        all_ok &= ok
        record(10, f"harness command: {name}", ok, f"exit={code}, rows={out.count(chr(10)) - 2}")
    RESULTS.append("INFO  C10 corpus-dependent figures (categorization AUCs, test-set metrics, "
                   "max-features deltas, MoJoFM percentages) need the original labeled video "
                   "corpus; the commands above recompute them from equivalently formatted data")
    assert all_ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))

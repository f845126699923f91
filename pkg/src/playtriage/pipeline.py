"""End-to-end run: segment, filter, featurize, categorize, group, report."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import cluster, vision
from .corpus import CorpusError, Dataset, IssueType, VideoBundle, load_bundle
from .learner import Classifier
from .partition import Partition
from .segmenter import (DEFAULT_T_SHIFT, KeywordDictionary, SegmentSpec, compute_segments,
                        default_keywords, filter_segments, read_keywords)
from .text import (EmbeddingTable, Vocabulary, bow_vector, embed_average,
                   embedding_feature_names, load_embeddings, tokenize)

log = logging.getLogger(__name__)

FEATURE_SETS = ("bow", "w2v", "video", "w2v+video", "bow+video")
LABEL_ORDER = [t.value for t in IssueType]


class PipelineError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


# --------------------------------------------------------------------------
# featurization

def segment_frames(bundle: VideoBundle, seg: SegmentSpec) -> list[np.ndarray]:
    return bundle.frames_between(seg.start_ms, seg.end_ms)


def featurize_segment(seg: SegmentSpec, frames: Sequence[np.ndarray],
                      feature_set: str = "w2v+video",
                      table: Optional[EmbeddingTable] = None,
                      vocab: Optional[Vocabulary] = None) -> dict[str, float]:
    """Feature dict for one segment; textual features come first."""
    if feature_set not in FEATURE_SETS:
        raise ValueError(f"unknown feature set {feature_set!r}; choose one of {FEATURE_SETS}")
    tokens = tokenize(seg.transcript)
    out: dict[str, float] = {}
    if "w2v" in feature_set:
        if table is None:
            raise ValueError("w2v features need an embedding table")
        out.update(zip(embedding_feature_names(table.dim), embed_average(tokens, table).tolist()))
    if "bow" in feature_set:
        if vocab is None:
            raise ValueError("bow features need a vocabulary")
        out.update(zip((f"bow_{t}" for t in vocab.tokens), bow_vector(tokens, vocab).tolist()))
    if "video" in feature_set:
        out.update(vision.video_features(frames))
    return out


def featurize(bundles: dict[str, VideoBundle], segments: Sequence[SegmentSpec],
              labels: Optional[Sequence[str]] = None, feature_set: str = "w2v+video",
              table: Optional[EmbeddingTable] = None, vocab: Optional[Vocabulary] = None,
              workers: int = 1) -> Dataset:
    """Dataset with one row per segment; segment ids are kept in ``meta['row_ids']``."""
    if feature_set in ("bow", "bow+video") and vocab is None:
        vocab = Vocabulary(t for s in segments for t in tokenize(s.transcript))

    def one(seg):
        frames = segment_frames(bundles[seg.bundle_id], seg) if "video" in feature_set else []
        return featurize_segment(seg, frames, feature_set, table, vocab)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            feats = list(ex.map(one, segments))
    else:
        feats = [one(s) for s in segments]
    names = list(feats[0]) if feats else _feature_names(feature_set, table, vocab)
    X = np.array([[f[n] for n in names] for f in feats], dtype=float).reshape(len(feats), len(names))
    labs = list(labels) if labels is not None else ["unlabeled"] * len(feats)
    meta = {"row_ids": [s.id for s in segments], "feature_set": feature_set}
    if table is not None:
        meta["embedding_dim"] = table.dim
    return Dataset(names, X, labs, meta)


def _feature_names(feature_set, table, vocab) -> list[str]:
    names = []
    if "w2v" in feature_set and table is not None:
        names += embedding_feature_names(table.dim)
    if "bow" in feature_set and vocab is not None:
        names += [f"bow_{t}" for t in vocab.tokens]
    if "video" in feature_set:
        names += list(vision.FEATURE_NAMES)
    return names


def summary_for(bundle: VideoBundle, seg: SegmentSpec,
                threshold: float = vision.KEYFRAME_THRESHOLD) -> np.ndarray:
    return vision.summary_frame(vision.extract_keyframes(segment_frames(bundle, seg), threshold))


# --------------------------------------------------------------------------
# segment files

def write_segments(path, segments: Sequence[SegmentSpec], extra: Optional[Sequence[dict]] = None):
    rows = []
    for i, s in enumerate(segments):
        d = s.to_dict()
        d["id"] = s.id
        if extra is not None:
            d.update(extra[i])
        rows.append(d)
    Path(path).write_text(json.dumps({"segments": rows}, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def read_segments(path) -> tuple[list[SegmentSpec], list[dict]]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    rows = raw["segments"] if isinstance(raw, dict) else raw
    segs = [SegmentSpec.from_dict(r) for r in rows]
    extra = [{k: r[k] for k in ("label", "context_id", "issue_id") if k in r} for r in rows]
    return segs, extra


# --------------------------------------------------------------------------
# configuration and run

@dataclass
class ClusterConfig:
    algorithm: str
    metric: str = "hsv"
    epsilon: Optional[float] = None
    min_pts: int = cluster.DEFAULT_MIN_PTS
    bandwidth: Optional[float] = None


@dataclass
class PipelineConfig:
    bundles: list[str]
    model: str
    embeddings: str
    keywords: Optional[str] = None
    t_shift: float = DEFAULT_T_SHIFT
    seed: int = 0
    keyframe_threshold: float = vision.KEYFRAME_THRESHOLD
    workers: int = 1
    context: ClusterConfig = field(default_factory=lambda: ClusterConfig("optics", "hsv"))
    issue: ClusterConfig = field(default_factory=lambda: ClusterConfig("dbscan"))

    @classmethod
    def from_dict(cls, d: dict, base_dir: Optional[Path] = None) -> "PipelineConfig":
        d = dict(d)
        for key in ("bundles", "model", "embeddings"):
            if key not in d:
                raise CorpusError(f"config is missing {key!r}")

        def resolve(p):
            if p is None or base_dir is None:
                return p
            p = Path(p)
            return str(p if p.is_absolute() else base_dir / p)

        ctx = ClusterConfig(**{"algorithm": "optics", "metric": "hsv", **d.pop("context", {})})
        iss = ClusterConfig(**{"algorithm": "dbscan", **d.pop("issue", {})})
        cfg = cls(**d, context=ctx, issue=iss)
        cfg.bundles = [resolve(b) for b in cfg.bundles]
        cfg.model, cfg.embeddings = resolve(cfg.model), resolve(cfg.embeddings)
        cfg.keywords = resolve(cfg.keywords)
        return cfg

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), path.parent)


@dataclass
class ReportSegment:
    segment: SegmentSpec
    label: str
    confidence: float
    game: str

    def to_dict(self) -> dict:
        s = self.segment
        return {"bundle_id": s.bundle_id, "start_ms": s.start_ms, "end_ms": s.end_ms,
                "transcript": s.transcript, "predicted_label": self.label,
                "confidence": round(float(self.confidence), 6)}


def _seg_key(seg: SegmentSpec):
    return (seg.bundle_id, seg.start_ms, seg.end_ms, seg.entry_index)


@dataclass
class TriageReport:
    contexts: list[dict] = field(default_factory=list)

    def segments(self) -> list[dict]:
        return [s for c in self.contexts for t in c["issue_types"] for i in t["issues"]
                for s in i["segments"]]

    def to_dict(self) -> dict:
        return {"contexts": self.contexts}


def _stage(name):
    def wrap(fn):
        def inner(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except PipelineError:
                raise
            except Exception as exc:
                raise PipelineError(name, f"{type(exc).__name__}: {exc}") from exc
        return inner
    return wrap


@_stage("ingest")
def _ingest(paths, workers) -> list[VideoBundle]:
    if not paths:
        raise CorpusError("no bundles configured")
    with ThreadPoolExecutor(max(1, workers)) as ex:
        return list(ex.map(load_bundle, paths))


@_stage("segment")
def _segment(bundles, cfg, keywords: KeywordDictionary) -> list[SegmentSpec]:
    segs = []
    for b in bundles:
        segs += filter_segments(compute_segments(b.subtitles, cfg.t_shift, b.duration_ms, b.id),
                                keywords)
    return segs


@_stage("featurize")
def _featurize(bundles, segs, cfg) -> Dataset:
    table = load_embeddings(cfg.embeddings)
    return featurize({b.id: b for b in bundles}, segs, table=table, workers=cfg.workers)


@_stage("categorize")
def _categorize(data: Dataset, cfg):
    model = Classifier.load(cfg.model)
    if not len(data):
        return [], np.zeros(0)
    proba = model.proba_for(data)
    idx = np.argmax(proba, axis=1)
    return [model.classes[i] for i in idx], proba[np.arange(len(idx)), idx]


@_stage("cluster-context")
def _cluster_context(bundles, items: list[ReportSegment], cfg) -> dict[str, list[list[int]]]:
    by_id = {b.id: b for b in bundles}
    out = {}
    games = sorted({it.game for it in items})
    for game in games:
        members = [k for k, it in enumerate(items) if it.game == game]
        if len(members) == 1:
            out[game] = [members]
            continue
        summaries = [summary_for(by_id[items[k].segment.bundle_id], items[k].segment,
                                 cfg.keyframe_threshold) for k in members]
        d = cluster.context_distances(summaries, cfg.context.metric)
        part = cluster.cluster_matrix(d, cfg.context.algorithm, cfg.context.epsilon,
                                      cfg.context.min_pts, ids=members)
        out[game] = part.groups()
    return out


@_stage("cluster-issue")
def _cluster_issue(members: list[int], X: np.ndarray, cfg) -> list[list[int]]:
    c = cfg.issue
    part = cluster.cluster_by_issue([(k, X[k]) for k in members], c.algorithm, c.epsilon,
                                    c.min_pts, c.bandwidth)
    return part.groups()


def run_pipeline(cfg: PipelineConfig) -> TriageReport:
    bundles = _ingest(cfg.bundles, cfg.workers)
    keywords = _stage("segment")(
        lambda: read_keywords(cfg.keywords) if cfg.keywords else default_keywords())()
    segs = _segment(bundles, cfg, keywords)
    data = _featurize(bundles, segs, cfg)
    labels, conf = _categorize(data, cfg)

    games = {b.id: b.game_id for b in bundles}
    keep = [k for k, lab in enumerate(labels) if lab != IssueType.NON_INFORMATIVE.value]
    items = [ReportSegment(segs[k], labels[k], float(conf[k]), games[segs[k].bundle_id])
             for k in keep]
    X = data.X[keep] if keep else np.zeros((0, len(data.feature_names)))
    if not items:
        return TriageReport([])

    contexts = _cluster_context(bundles, items, cfg)
    ctx_blocks = []
    for game, groups in contexts.items():
        for members in groups:
            types = []
            for lab in sorted({items[k].label for k in members},
                              key=lambda l: (LABEL_ORDER.index(l) if l in LABEL_ORDER else 99, l)):
                typed = [k for k in members if items[k].label == lab]
                clusters = _cluster_issue(typed, X, cfg)
                issues = []
                for cl in clusters:
                    segs_sorted = sorted(cl, key=lambda k: _seg_key(items[k].segment))
                    issues.append([items[k] for k in segs_sorted])
                issues.sort(key=lambda c: _seg_key(c[0].segment))
                types.append((lab, issues))
            first = min((_seg_key(items[k].segment) for k in members))
            ctx_blocks.append((first, game, types))
    ctx_blocks.sort(key=lambda t: (t[1], t[0]))

    contexts_out = []
    for ci, (_, game, types) in enumerate(ctx_blocks):
        cid = f"ctx{ci:03d}"
        contexts_out.append({
            "context_id": cid,
            "game": game,
            "issue_types": [{
                "label": lab,
                "issues": [{"issue_id": f"{cid}/{lab}/{ii:03d}",
                            "segments": [it.to_dict() for it in iss]}
                           for ii, iss in enumerate(issues)],
            } for lab, issues in types],
        })
    return TriageReport(contexts_out)


def report_json(report: TriageReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, ensure_ascii=False)


def emit_report(report: TriageReport, path, format: str = "json") -> None:
    if format != "json":
        raise ValueError(f"unsupported report format {format!r}")
    try:
        Path(path).write_text(report_json(report), encoding="utf-8")
    except OSError as exc:
        raise PipelineError("report", f"cannot write {path}: {exc}") from exc


def report_schema() -> dict:
    text = resources.files("playtriage.data").joinpath("report.schema.json").read_text("utf-8")
    return json.loads(text)


def partition_to_json_dict(part: Partition) -> dict:
    return {str(k): v for k, v in part.assignments.items()}

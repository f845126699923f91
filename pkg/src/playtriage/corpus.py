"""Subtitle parsing, video bundle loading and dataset persistence."""

from __future__ import annotations

import csv
import enum
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from PIL import Image

from .segmenter import SegmentSpec


class CorpusError(ValueError):
    """Raised for malformed subtitles, bundles or datasets."""


class SubtitleParseError(CorpusError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class IssueType(str, enum.Enum):
    LOGIC = "logic"
    PRESENTATION = "presentation"
    BALANCE = "balance"
    PERFORMANCE = "performance"
    NON_INFORMATIVE = "non_informative"

    @property
    def informative(self) -> bool:
        return self is not IssueType.NON_INFORMATIVE

    @classmethod
    def parse(cls, value) -> "IssueType":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower().replace("-", "_"))


@dataclass(frozen=True)
class SubtitleEntry:
    index: int
    start_ms: int
    end_ms: int
    text: str

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass
class VideoBundle:
    id: str
    frame_paths: list[Path]
    fps: float
    duration_ms: int
    subtitles: list[SubtitleEntry]
    game: Optional[str] = None
    frame_size: tuple[int, int] = (0, 0)  # (width, height)

    @property
    def game_id(self) -> str:
        return self.game if self.game is not None else self.id

    def frame_time_ms(self, i: int) -> float:
        return 1000.0 * i / self.fps

    def load_frame(self, i: int) -> np.ndarray:
        return read_frame(self.frame_paths[i])

    def frames_between(self, start_ms: int, end_ms: int) -> list[np.ndarray]:
        """Frames sampled in ``[start_ms, end_ms)``.

        Falls back to the nearest-following frames so that at least two frames
        are returned whenever the bundle holds two or more.
        """
        n = len(self.frame_paths)
        lo = math.ceil(start_ms * self.fps / 1000.0 - 1e-9)
        hi = math.ceil(end_ms * self.fps / 1000.0 - 1e-9)
        lo = min(max(lo, 0), n - 1)
        hi = min(max(hi, lo + 2), n)
        if hi - lo < 2:
            lo = max(hi - 2, 0)
        return [self.load_frame(i) for i in range(lo, hi)]


@dataclass
class LabeledSegment:
    segment: SegmentSpec
    label: IssueType
    context_id: Optional[str] = None
    issue_id: Optional[str] = None

    def __post_init__(self):
        self.label = IssueType.parse(self.label)
        if self.issue_id is not None and not self.label.informative:
            raise CorpusError("issue_id is only allowed on informative segments")


# --------------------------------------------------------------------------
# subtitles

_TAG_RE = re.compile(r"<[^>]*>|\{\\[^}]*\}")
_SRT_TIME = r"(\d+):(\d{2}):(\d{2})[,.](\d{1,3})"
_VTT_TIME = r"(?:(\d+):)?(\d{2}):(\d{2})\.(\d{3})"
_SRT_CUE_RE = re.compile(rf"^\s*{_SRT_TIME}\s+-->\s+{_SRT_TIME}\s*$")
_VTT_CUE_RE = re.compile(rf"^\s*{_VTT_TIME}\s+-->\s+{_VTT_TIME}(?:\s+.*)?$")


def _to_ms(h, m, s, frac) -> int:
    frac = (frac or "0").ljust(3, "0")
    return ((int(h or 0) * 60 + int(m)) * 60 + int(s)) * 1000 + int(frac)


def _clean_text(lines: Sequence[str]) -> str:
    text = " ".join(_TAG_RE.sub("", ln).strip() for ln in lines)
    return " ".join(text.split())


def parse_subtitles(raw: str, format: str) -> list[SubtitleEntry]:
    """Parse an SRT or WebVTT document into entries sorted by start time.

    Multi-line cue payloads are joined with single spaces and formatting tags
    (``<i>``, ``<c.color>``, ``{\\an8}``...) are removed. Cues whose text is
    empty after cleaning are skipped.
    """
    fmt = format.lower().lstrip(".")
    if fmt not in ("srt", "vtt"):
        raise CorpusError(f"unsupported subtitle format {format!r}")
    lines = raw.lstrip("﻿").replace("\r\n", "\n").replace("\r", "\n").split("\n")
    cue_re = _SRT_CUE_RE if fmt == "srt" else _VTT_CUE_RE

    entries: list[SubtitleEntry] = []
    i = 0
    if fmt == "vtt":
        while i < len(lines) and not lines[i].strip():
            i += 1
        if i < len(lines):
            if not lines[i].startswith("WEBVTT"):
                raise SubtitleParseError(i + 1, "missing WEBVTT header")
            i += 1

    counter = 0
    while i < len(lines):
        # one block = run of non-empty lines
        if not lines[i].strip():
            i += 1
            continue
        block_start = i
        block = []
        while i < len(lines) and lines[i].strip():
            block.append(lines[i])
            i += 1
        if fmt == "vtt" and block[0].split(" ", 1)[0] in ("NOTE", "STYLE", "REGION"):
            continue
        timing_at = next((k for k, ln in enumerate(block) if "->" in ln), None)
        if timing_at is None or timing_at > 1:
            raise SubtitleParseError(block_start + 1, "cue without a timing line")
        lineno = block_start + timing_at + 1
        m = cue_re.match(block[timing_at])
        if m is None:
            raise SubtitleParseError(lineno, f"malformed timestamp line {block[timing_at]!r}")
        g = m.groups()
        start, end = _to_ms(*g[0:4]), _to_ms(*g[4:8])
        if end < start:
            raise SubtitleParseError(lineno, "cue ends before it starts")
        counter += 1
        index = counter
        if timing_at == 1 and fmt == "srt":
            try:
                index = int(block[0].strip())
            except ValueError:
                raise SubtitleParseError(block_start + 1, f"bad cue index {block[0]!r}") from None
        text = _clean_text(block[timing_at + 1:])
        if text:
            entries.append(SubtitleEntry(index, start, end, text))

    entries.sort(key=lambda e: (e.start_ms, e.index))
    return entries


def read_subtitles(path) -> list[SubtitleEntry]:
    path = Path(path)
    return parse_subtitles(path.read_text(encoding="utf-8"), path.suffix)


# --------------------------------------------------------------------------
# bundles

def read_frame(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def load_bundle(dir_path) -> VideoBundle:
    """Load ``meta.json``, ``frames/*.png`` and ``subs.srt``/``subs.vtt``."""
    root = Path(dir_path)
    meta_path = root / "meta.json"
    if not meta_path.is_file():
        raise CorpusError(f"{root}: missing meta.json")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    for key in ("id", "fps", "duration_ms"):
        if key not in meta:
            raise CorpusError(f"{meta_path}: missing key {key!r}")
    fps = float(meta["fps"])
    if not fps > 0:
        raise CorpusError(f"{meta_path}: fps must be positive")

    frames_dir = root / "frames"
    frame_paths = sorted(frames_dir.glob("*.png")) if frames_dir.is_dir() else []
    if not frame_paths:
        raise CorpusError(f"{root}: no frames")
    sizes = set()
    for p in frame_paths:
        with Image.open(p) as im:
            sizes.add(im.size)
    if len(sizes) > 1:
        raise CorpusError(f"{root}: frames have mixed dimensions {sorted(sizes)}")

    subs = [root / "subs.srt", root / "subs.vtt"]
    found = [p for p in subs if p.is_file()]
    if not found:
        raise CorpusError(f"{root}: missing subtitles file (subs.srt or subs.vtt)")

    return VideoBundle(
        id=str(meta["id"]),
        frame_paths=frame_paths,
        fps=fps,
        duration_ms=int(meta["duration_ms"]),
        subtitles=read_subtitles(found[0]),
        game=meta.get("game"),
        frame_size=sizes.pop(),
    )


def write_bundle(dir_path, bundle_id: str, frames: Sequence[np.ndarray], fps: float,
                 subtitles_text: str, format: str = "srt", duration_ms: Optional[int] = None,
                 game: Optional[str] = None) -> Path:
    """Write frames and subtitles in the bundle layout read by :func:`load_bundle`."""
    root = Path(dir_path)
    (root / "frames").mkdir(parents=True, exist_ok=True)
    for i, f in enumerate(frames):
        Image.fromarray(np.asarray(f, dtype=np.uint8), "RGB").save(root / "frames" / f"{i:06d}.png")
    if duration_ms is None:
        duration_ms = int(round(1000 * len(frames) / fps))
    meta = {"id": bundle_id, "fps": fps, "duration_ms": duration_ms}
    if game is not None:
        meta["game"] = game
    (root / "meta.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
    (root / f"subs.{format}").write_text(subtitles_text, encoding="utf-8")
    return root


# --------------------------------------------------------------------------
# datasets

@dataclass
class Dataset:
    """Feature matrix with its ordered column names and one label per row."""

    feature_names: list[str]
    X: np.ndarray
    labels: list[str]
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.labels)

    @property
    def classes(self) -> list[str]:
        return sorted(set(self.labels))

    def subset(self, rows=None, features: Optional[Sequence[str]] = None) -> "Dataset":
        """Row and/or column selection; ``features`` are names, kept in the given order."""
        X, labels, names = self.X, self.labels, self.feature_names
        if rows is not None:
            rows = np.asarray(rows, dtype=int)
            X = X[rows]
            labels = [labels[i] for i in rows]
        if features is not None:
            pos = {n: i for i, n in enumerate(names)}
            missing = [f for f in features if f not in pos]
            if missing:
                raise CorpusError(f"unknown features {missing[:5]}")
            X = X[:, [pos[f] for f in features]]
            names = list(features)
        return Dataset(list(names), X, list(labels), dict(self.meta))

    def binary(self) -> "Dataset":
        """Collapse labels to informative / non_informative."""
        labels = [lab if lab == IssueType.NON_INFORMATIVE.value else "informative"
                  for lab in self.labels]
        return Dataset(list(self.feature_names), self.X.copy(), labels, dict(self.meta))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.feature_names == other.feature_names and self.labels == other.labels
                and self.X.shape == other.X.shape and bool(np.array_equal(self.X, other.X)))


def rows_to_dataset(rows: Sequence[tuple[dict, object]]) -> Dataset:
    """Build a :class:`Dataset` from ``(feature dict, label)`` pairs."""
    if not rows:
        return Dataset([], np.zeros((0, 0)), [])
    names = list(rows[0][0].keys())
    for k, (fv, _) in enumerate(rows):
        if list(fv.keys()) != names:
            raise CorpusError(f"row {k}: feature names differ from row 0")
    X = np.array([[float(fv[n]) for n in names] for fv, _ in rows], dtype=float)
    labels = [_label_str(lab) for _, lab in rows]
    return Dataset(names, X.reshape(len(rows), len(names)), labels)


def _label_str(label) -> str:
    return label.value if isinstance(label, enum.Enum) else str(label)


def _schema_path(path: Path) -> Path:
    return path.with_name(path.name + ".schema.json")


def persist_dataset(data, path) -> None:
    """Write features as CSV plus a ``<file>.schema.json`` sidecar.

    ``data`` is a :class:`Dataset` or a list of ``(feature dict, label)``.
    Floats are written with ``repr`` so that loading is bit-exact.
    """
    if not isinstance(data, Dataset):
        data = rows_to_dataset(data)
    X = np.asarray(data.X, dtype=float)
    if X.ndim != 2 or X.shape != (len(data.labels), len(data.feature_names)):
        raise CorpusError("feature matrix shape does not match names/labels")
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise CorpusError(f"non-finite value at row {bad[0]}, feature {data.feature_names[bad[1]]!r}")
    if "label" in data.feature_names:
        raise CorpusError("'label' is reserved for the label column")

    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*data.feature_names, "label"])
        for row, lab in zip(X.tolist(), data.labels):
            w.writerow([*(repr(v) for v in row), lab])
    schema = {
        "version": 1,
        "feature_names": list(data.feature_names),
        "label_domain": sorted(set(data.labels)),
        **({"meta": data.meta} if data.meta else {}),
    }
    _schema_path(path).write_text(json.dumps(schema, indent=2, sort_keys=True), encoding="utf-8")


def load_dataset(path) -> Dataset:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusError(f"{path}: empty dataset file") from None
        if not header or header[-1] != "label":
            raise CorpusError(f"{path}: last column must be 'label'")
        names = header[:-1]
        values, labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise CorpusError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            values.append([float(v) for v in rec[:-1]])
            labels.append(rec[-1])
    meta = {}
    sp = _schema_path(path)
    if sp.is_file():
        schema = json.loads(sp.read_text(encoding="utf-8"))
        if schema.get("feature_names") != names:
            raise CorpusError(f"{sp}: feature names disagree with CSV header")
        meta = schema.get("meta", {})
    X = np.array(values, dtype=float).reshape(len(labels), len(names))
    return Dataset(names, X, labels, meta)

"""Small deterministic corpora for demos and tests.

``make_fixture`` writes two bundles of one game, a tiny embedding table, a
keyword file, a trained model and a pipeline config. The transcripts are
chosen so the expected report is known in advance: issue remarks over a
static "red" area and a noisy "blue" area, one keyword hit that is labeled
non-informative, and one line without any keyword.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import load_bundle, write_bundle
from .learner import train
from .pipeline import featurize
from .segmenter import compute_segments
from .text import load_embeddings

EMBEDDINGS = {
    # issue direction
    "glitch": [1.0, 0.0, 0.0, 0.1], "glitched": [0.95, 0.05, 0.0, 0.1],
    "crash": [0.0, 1.0, 0.0, 0.1], "crashed": [0.05, 0.95, 0.0, 0.1],
    "lag": [0.0, 0.9, 0.3, 0.1], "again": [0.2, 0.2, 0.0, 0.0],
    # chatter direction
    "bug": [0.0, 0.0, 1.0, 0.9], "catching": [0.0, 0.0, 0.9, 1.0],
    "pokemon": [0.0, 0.0, 0.8, 1.0], "nice": [0.0, 0.0, 0.5, 0.5],
    "view": [0.0, 0.0, 0.4, 0.6],
}

SUBS_A = """1
00:00:01,000 --> 00:00:02,000
<i>oh no</i> that glitch again

2
00:00:05,000 --> 00:00:06,000
nice view from here

3
00:00:08,000 --> 00:00:09,000
the game crashed
"""

SUBS_B = """WEBVTT

00:00:01.000 --> 00:00:02.000
glitch glitched again

00:00:04.000 --> 00:00:05.000
catching a bug pokemon

00:00:07.000 --> 00:00:08.000
it crashed again
"""

TRANSCRIPT_LABELS = {
    "oh no that glitch again": "presentation",
    "glitch glitched again": "presentation",
    "the game crashed": "performance",
    "it crashed again": "performance",
    "catching a bug pokemon": "non_informative",
    "nice view from here": "non_informative",
}


def scene_frames(base_rgb, n: int, size: int = 32, seed: int = 0,
                 static: bool = False) -> list[np.ndarray]:
    """``n`` frames of a textured scene dominated by ``base_rgb``.

    A static scene repeats one frame; otherwise each frame gets fresh noise.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size]
    texture = ((xx // 4 + yy // 4) % 2)[..., None] * 40
    frames = []
    for _ in range(n):
        if static:
            rng = np.random.default_rng(seed)
        noise = rng.integers(-6, 7, (size, size, 3))
        f = np.clip(np.array(base_rgb)[None, None, :] + texture + noise, 0, 255)
        frames.append(f.astype(np.uint8))
    return frames


@dataclass
class Fixture:
    root: Path
    config_path: Path
    bundle_dirs: list[Path]
    model_path: Path
    embeddings_path: Path
    keywords_path: Path


def write_embeddings(path, table: dict) -> Path:
    dim = len(next(iter(table.values())))
    lines = [f"{len(table)} {dim}"] + [f"{w} " + " ".join(repr(float(v)) for v in vec)
                                       for w, vec in table.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def make_fixture(root, keywords=("glitch", "crash", "crashed", "bug"), t_shift: float = 0.5,
                 seed: int = 0) -> Fixture:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    a = write_bundle(root / "bundle_a", "vid_a", scene_frames((200, 40, 40), 10, seed=1, static=True),
                     1.0, SUBS_A, "srt", game="game1")
    b = write_bundle(root / "bundle_b", "vid_b", scene_frames((40, 40, 200), 10, seed=2), 1.0,
                     SUBS_B, "vtt", game="game1")
    emb = write_embeddings(root / "embeddings.txt", EMBEDDINGS)
    kw = root / "keywords.txt"
    kw.write_text("# fixture keywords\n" + "\n".join(keywords) + "\n", encoding="utf-8")

    bundles = {x.id: x for x in (load_bundle(a), load_bundle(b))}
    segs, labels = [], []
    for bd in bundles.values():
        for s in compute_segments(bd.subtitles, t_shift, bd.duration_ms, bd.id):
            segs.append(s)
            labels.append(TRANSCRIPT_LABELS[s.transcript])
    data = featurize(bundles, segs, labels, "w2v+video", load_embeddings(emb))
    model = train(data, "random_forest", seed=seed)
    model_path = root / "model.json"
    model.save(model_path)

    cfg = {
        "bundles": ["bundle_a", "bundle_b"],
        "model": "model.json",
        "embeddings": "embeddings.txt",
        "keywords": "keywords.txt",
        "t_shift": t_shift,
        "seed": seed,
        "context": {"algorithm": "optics", "metric": "hsv"},
        "issue": {"algorithm": "dbscan"},
    }
    config_path = root / "config.json"
    config_path.write_text(json.dumps(cfg, indent=2), encoding="utf-8")
    return Fixture(root, config_path, [a, b], model_path, emb, kw)

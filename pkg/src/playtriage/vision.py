"""Frame similarity and the aggregated video features.

Frames are ``(height, width, 3)`` uint8 RGB arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

K1 = 0.01
K2 = 0.03
DYNAMIC_RANGE = 255.0
WINDOW = 8
HUE_BINS = 50
SAT_BINS = 60
KEYFRAME_THRESHOLD = 0.7

STAT_NAMES = ("mean", "median", "min", "max", "q1", "q3")
FEATURE_NAMES = tuple(f"{series}_{stat}" for series in ("ssim", "hsv") for stat in STAT_NAMES)


def as_frame(a) -> np.ndarray:
    f = np.asarray(a)
    if f.ndim != 3 or f.shape[2] != 3 or f.shape[0] * f.shape[1] == 0:
        raise ValueError(f"expected a non-empty (H, W, 3) frame, got shape {f.shape}")
    if f.dtype != np.uint8:
        if f.min() < 0 or f.max() > 255:
            raise ValueError("pixel values must lie in [0, 255]")
        f = f.astype(np.uint8)
    return f


def luma(frame) -> np.ndarray:
    """Rec.601 luma as float64."""
    f = as_frame(frame).astype(np.float64)
    return 0.299 * f[..., 0] + 0.587 * f[..., 1] + 0.114 * f[..., 2]


def _check_same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise ValueError(f"frame dimensions differ: {a.shape[:2]} vs {b.shape[:2]}")


def ssim(a, b, window: int = WINDOW) -> float:
    """Mean SSIM over all ``window x window`` luma windows (stride 1).

    Window statistics use population (1/N) moments.
    """
    a, b = as_frame(a), as_frame(b)
    _check_same_shape(a, b)
    if min(a.shape[:2]) < window:
        raise ValueError(f"frames must be at least {window}x{window}")
    x = sliding_window_view(luma(a), (window, window))
    y = sliding_window_view(luma(b), (window, window))
    mx = x.mean(axis=(-2, -1))
    my = y.mean(axis=(-2, -1))
    dx = x - mx[..., None, None]
    dy = y - my[..., None, None]
    vx = (dx * dx).mean(axis=(-2, -1))
    vy = (dy * dy).mean(axis=(-2, -1))
    cxy = (dx * dy).mean(axis=(-2, -1))
    c1 = (K1 * DYNAMIC_RANGE) ** 2
    c2 = (K2 * DYNAMIC_RANGE) ** 2
    num = (2 * mx * my + c1) * (2 * cxy + c2)
    den = (mx * mx + my * my + c1) * (vx + vy + c2)
    return float(np.mean(num / den))


def rgb_to_hsv(frame) -> np.ndarray:
    """Hue in degrees ``[0, 360)``, saturation and value in ``[0, 1]``."""
    f = as_frame(frame).astype(np.float64) / 255.0
    r, g, b = f[..., 0], f[..., 1], f[..., 2]
    mx = f.max(axis=-1)
    mn = f.min(axis=-1)
    delta = mx - mn
    safe = np.where(delta > 0, delta, 1.0)
    h = np.zeros_like(mx)
    h = np.where(mx == r, ((g - b) / safe) % 6.0, h)
    h = np.where((mx == g) & (mx != r), (b - r) / safe + 2.0, h)
    h = np.where((mx == b) & (mx != r) & (mx != g), (r - g) / safe + 4.0, h)
    h = np.where(delta > 0, h * 60.0, 0.0) % 360.0
    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)
    return np.stack([h, s, mx], axis=-1)


def hsv_hist(frame, hue_bins: int = HUE_BINS, sat_bins: int = SAT_BINS) -> np.ndarray:
    """Normalized hue x saturation histogram, flattened row-major (hue major)."""
    hsv = rgb_to_hsv(frame)
    hi = np.minimum((hsv[..., 0] / 360.0 * hue_bins).astype(int), hue_bins - 1)
    si = np.minimum((hsv[..., 1] * sat_bins).astype(int), sat_bins - 1)
    counts = np.bincount((hi * sat_bins + si).ravel(), minlength=hue_bins * sat_bins)
    return counts / counts.sum()


def pearson(x, y) -> float:
    """Product-moment correlation.

    If either vector has zero variance the result is 1.0 when the vectors are
    element-wise equal and 0.0 otherwise.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two 1-D vectors of equal length")
    if len(x) < 2:
        raise ValueError("pearson needs at least two values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return 1.0 if np.array_equal(x, y) else 0.0
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def hist_correlation(a, b) -> float:
    return pearson(hsv_hist(a), hsv_hist(b))


@dataclass
class PairSeries:
    s: np.ndarray
    hsv: np.ndarray

    def __len__(self):
        return len(self.s)


def frame_pair_series(frames: Sequence) -> PairSeries:
    """SSIM and histogram correlation of every pair of consecutive frames."""
    if len(frames) < 2:
        raise ValueError("need at least two frames")
    frames = [as_frame(f) for f in frames]
    for f in frames[1:]:
        _check_same_shape(frames[0], f)
    hists = [hsv_hist(f) for f in frames]
    s = [ssim(frames[i], frames[i + 1]) for i in range(len(frames) - 1)]
    h = [pearson(hists[i], hists[i + 1]) for i in range(len(frames) - 1)]
    return PairSeries(np.array(s), np.array(h))


def _six_stats(v: np.ndarray) -> list[float]:
    q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75], method="linear")
    return [float(np.mean(v)), float(med), float(v.min()), float(v.max()), float(q1), float(q3)]


def aggregate_features(series: PairSeries) -> dict[str, float]:
    """The 12 video features: mean, median, min, max, q1, q3 of both series."""
    s = np.asarray(series.s, dtype=float)
    h = np.asarray(series.hsv, dtype=float)
    if s.size == 0 or h.size == 0:
        raise ValueError("cannot aggregate an empty series")
    return dict(zip(FEATURE_NAMES, _six_stats(s) + _six_stats(h)))


def video_features(frames: Sequence) -> dict[str, float]:
    return aggregate_features(frame_pair_series(frames))


def extract_keyframes(frames: Sequence, threshold: float = KEYFRAME_THRESHOLD) -> list[np.ndarray]:
    """Keep a frame when its SSIM to the last kept frame drops below ``threshold``."""
    if not frames:
        raise ValueError("need at least one frame")
    keys = [as_frame(frames[0])]
    for f in frames[1:]:
        f = as_frame(f)
        if ssim(f, keys[-1]) < threshold:
            keys.append(f)
    return keys


def summary_frame(keyframes: Sequence) -> np.ndarray:
    """Pixel-wise mean of the keyframes, rounded half up."""
    if not keyframes:
        raise ValueError("need at least one keyframe")
    frames = [as_frame(f) for f in keyframes]
    for f in frames[1:]:
        _check_same_shape(frames[0], f)
    k = len(frames)
    total = np.sum([f.astype(np.int64) for f in frames], axis=0)
    return ((2 * total + k) // (2 * k)).astype(np.uint8)

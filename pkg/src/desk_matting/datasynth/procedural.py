"""Procedural foregrounds and backgrounds standing in for licensed photo sets."""

import cv2
import numpy as np

from desk_matting.core import snap_to_8bit
from desk_matting.models import RasterError

MIN_SIZE = 32


def _smooth_color_field(rng: np.random.Generator, size: int, spread: float) -> np.ndarray:
    base = rng.uniform(0.15, 0.85, size=3)
    coarse = rng.uniform(-spread, spread, size=(4, 4, 3)).astype(np.float32)
    field = cv2.resize(coarse, (size, size), interpolation=cv2.INTER_CUBIC)
    return np.clip(base[None, None, :] + field, 0.0, 1.0)


def _point(rng: np.random.Generator, size: int, lo: float, hi: float) -> tuple[int, int]:
    x, y = rng.uniform(lo, hi, size=2) * size
    return int(x), int(y)


def synth_foreground(seed: int, size: int, alpha_grid: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Random object made of disks, strokes and polygons with a feathered edge.

    With ``alpha_grid`` > 1 the feathered matte is area-averaged onto a grid
    that many times coarser and bilinearly upsampled back, which band-limits
    it to what a detail map at that scale can express.

    Returns (fg image, alpha), both on the 8-bit grid so they survive a PNG
    round trip unchanged. The same seed always yields the same pair.
    """
    if size < MIN_SIZE:
        raise RasterError(f"foreground size must be >= {MIN_SIZE}, got {size}")
    rng = np.random.default_rng(seed)
    mask = np.zeros((size, size), np.float32)

    # Anchor disk keeps the object non-empty and away from the frame.
    radius = int(rng.uniform(0.15, 0.25) * size)
    cv2.circle(mask, _point(rng, size, 0.4, 0.6), radius, 1.0, thickness=-1, lineType=cv2.LINE_AA)

    for _ in range(int(rng.integers(1, 4))):
        kind = int(rng.integers(3))
        if kind == 0:
            r = int(rng.uniform(0.05, 0.15) * size)
            cv2.circle(mask, _point(rng, size, 0.25, 0.75), r, 1.0, thickness=-1, lineType=cv2.LINE_AA)
        elif kind == 1:
            thickness = int(rng.integers(2, max(3, size // 12)))
            cv2.line(
                mask,
                _point(rng, size, 0.2, 0.8),
                _point(rng, size, 0.2, 0.8),
                1.0,
                thickness=thickness,
                lineType=cv2.LINE_AA,
            )
        else:
            cx, cy = _point(rng, size, 0.3, 0.7)
            n = int(rng.integers(3, 7))
            angles = np.sort(rng.uniform(0, 2 * np.pi, size=n))
            radii = rng.uniform(0.08, 0.2, size=n) * size
            pts = np.stack([cx + radii * np.cos(angles), cy + radii * np.sin(angles)], axis=1)
            cv2.fillPoly(mask, [pts.astype(np.int32)], 1.0, lineType=cv2.LINE_AA)

    # Hair-like strands: thin, partially opaque.
    strands = np.zeros_like(mask)
    for _ in range(int(rng.integers(2, 6))):
        cv2.line(
            strands,
            _point(rng, size, 0.3, 0.7),
            _point(rng, size, 0.15, 0.85),
            float(rng.uniform(0.3, 0.9)),
            thickness=1,
            lineType=cv2.LINE_AA,
        )
    mask = np.maximum(mask, strands)

    sigma = max(0.8, rng.uniform(0.8, 1.6) * size / 64)
    alpha = cv2.GaussianBlur(mask, (0, 0), sigmaX=sigma)
    if alpha_grid > 1:
        coarse = max(1, size // alpha_grid)
        alpha = cv2.resize(alpha, (coarse, coarse), interpolation=cv2.INTER_AREA)
        alpha = cv2.resize(alpha, (size, size), interpolation=cv2.INTER_LINEAR)
    alpha = snap_to_8bit(alpha.astype(np.float64))

    fg = snap_to_8bit(_smooth_color_field(rng, size, 0.25).astype(np.float64))
    return fg, alpha


def synth_background(seed: int, size: int) -> np.ndarray:
    """Gradient backdrop with blurred clutter."""
    if size < MIN_SIZE:
        raise RasterError(f"background size must be >= {MIN_SIZE}, got {size}")
    rng = np.random.default_rng(seed)

    start, end = rng.uniform(0.0, 1.0, size=(2, 3))
    ramp = np.linspace(0.0, 1.0, size)[:, None]
    if rng.random() < 0.5:
        ramp = ramp.T
    bg = start[None, None, :] + (end - start)[None, None, :] * ramp[..., None]
    bg = np.ascontiguousarray(np.broadcast_to(bg, (size, size, 3)), dtype=np.float32)

    for _ in range(int(rng.integers(3, 9))):
        color = tuple(float(c) for c in rng.uniform(0.0, 1.0, size=3))
        if rng.random() < 0.5:
            p1, p2 = _point(rng, size, 0.0, 1.0), _point(rng, size, 0.0, 1.0)
            cv2.rectangle(bg, p1, p2, color, thickness=-1)
        else:
            r = int(rng.uniform(0.05, 0.3) * size)
            cv2.circle(bg, _point(rng, size, 0.0, 1.0), r, color, thickness=-1, lineType=cv2.LINE_AA)

    bg = cv2.GaussianBlur(bg, (0, 0), sigmaX=max(0.5, size / 96))
    return snap_to_8bit(bg.astype(np.float64))

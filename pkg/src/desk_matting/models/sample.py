"""Raster domain types shared by every module.

Images are float arrays of shape (H, W, 3), alpha mattes float arrays of
shape (H, W), both with values in [0, 1]. Tri-class maps are uint8 arrays of
shape (H, W) holding ``TriClass`` values.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from desk_matting.config import MattingError

FLOAT_TOLERANCE = 1e-6


class RasterError(MattingError, ValueError):
    """Raised for invalid images, alphas, labels or mismatched dimensions."""

    pass


class TriClass(IntEnum):
    """Per-pixel semantic class. The ordering fixes argmax tie-breaking."""

    FG = 0
    BG = 1
    TR = 2


# Grayscale codes used when tri-class maps are stored as PNG.
LABEL_PNG_CODES: dict[TriClass, int] = {
    TriClass.FG: 255,
    TriClass.TR: 128,
    TriClass.BG: 0,
}


def validate_image(image: np.ndarray, name: str = "image") -> None:
    if image.ndim != 3 or image.shape[2] != 3:
        raise RasterError(f"{name} must have shape (H, W, 3), got {image.shape}")
    if image.size and (image.min() < 0.0 or image.max() > 1.0):
        raise RasterError(f"{name} values must lie in [0, 1]")


def validate_alpha(alpha: np.ndarray, name: str = "alpha") -> None:
    if alpha.ndim != 2:
        raise RasterError(f"{name} must have shape (H, W), got {alpha.shape}")
    if alpha.size and (alpha.min() < 0.0 or alpha.max() > 1.0):
        raise RasterError(f"{name} values must lie in [0, 1]")


def validate_label(label: np.ndarray) -> None:
    if label.ndim != 2:
        raise RasterError(f"label must have shape (H, W), got {label.shape}")
    if not np.isin(label, [c.value for c in TriClass]).all():
        raise RasterError("label contains values outside {FG, BG, TR}")


def check_same_size(*arrays: np.ndarray) -> None:
    sizes = {a.shape[:2] for a in arrays}
    if len(sizes) > 1:
        raise RasterError(f"dimension mismatch: {sorted(sizes)}")


@dataclass(frozen=True)
class Sample:
    """A composited training/evaluation item."""

    image: np.ndarray
    alpha: np.ndarray
    fg: np.ndarray
    bg: np.ndarray
    label: np.ndarray
    sample_id: str = ""

    def __post_init__(self):
        validate_image(self.image)
        validate_image(self.fg, "fg")
        validate_image(self.bg, "bg")
        validate_alpha(self.alpha)
        validate_label(self.label)
        check_same_size(self.image, self.alpha, self.fg, self.bg, self.label)

"""PNG reading and writing for images, alpha mattes and tri-class maps."""

from pathlib import Path

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError

from desk_matting.config import MattingError
from desk_matting.core import dequantize, label_from_png, label_to_png, quantize, quantize_image


class ImageReadError(MattingError):
    """Raised when a raster cannot be read."""

    pass


def _open(path: Path, mode: str) -> np.ndarray:
    try:
        with PILImage.open(path) as img:
            return np.asarray(img.convert(mode))
    except (FileNotFoundError, UnidentifiedImageError, OSError) as e:
        raise ImageReadError(f"cannot read {path}: {e}") from e


def read_image(path: Path) -> np.ndarray:
    """8-bit RGB PNG (or any Pillow-readable file) -> float64 (H, W, 3) in [0, 1]."""
    return _open(path, "RGB").astype(np.float64) / 255.0


def read_alpha(path: Path) -> np.ndarray:
    return dequantize(_open(path, "L"))


def read_label(path: Path) -> np.ndarray:
    return label_from_png(_open(path, "L"))


def write_image(path: Path, image: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    PILImage.fromarray(quantize_image(image)).save(path, format="PNG")


def write_alpha(path: Path, alpha: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    PILImage.fromarray(quantize(alpha)).save(path, format="PNG")


def write_label(path: Path, label: np.ndarray) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    PILImage.fromarray(label_to_png(label)).save(path, format="PNG")


def write_gray(path: Path, values: np.ndarray) -> None:
    """Min-max normalise an arbitrary 2-D array and store it as 8-bit PNG."""
    lo, hi = float(values.min()), float(values.max())
    scaled = (values - lo) / (hi - lo) if hi > lo else np.zeros_like(values)
    write_alpha(path, scaled)

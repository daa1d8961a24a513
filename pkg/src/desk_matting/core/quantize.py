import numpy as np

from desk_matting.models import validate_alpha


def quantize(alpha: np.ndarray) -> np.ndarray:
    """Map [0, 1] floats to 8-bit codes with round-half-up."""
    validate_alpha(alpha)
    return np.floor(alpha.astype(np.float64) * 255.0 + 0.5).astype(np.uint8)


def dequantize(raster: np.ndarray) -> np.ndarray:
    return raster.astype(np.float64) / 255.0


def quantize_image(image: np.ndarray) -> np.ndarray:
    """Channel-wise ``quantize`` for (H, W, 3) images."""
    return np.floor(np.clip(image, 0.0, 1.0).astype(np.float64) * 255.0 + 0.5).astype(np.uint8)


def snap_to_8bit(values: np.ndarray) -> np.ndarray:
    """Round floats onto the 8-bit grid, keeping float64 dtype."""
    return np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5) / 255.0

import numpy as np

from desk_matting.models import check_same_size, validate_alpha, validate_image


def composite(fg: np.ndarray, bg: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """I = alpha * F + (1 - alpha) * B, per pixel and channel."""
    validate_image(fg, "fg")
    validate_image(bg, "bg")
    validate_alpha(alpha)
    check_same_size(fg, bg, alpha)

    a = alpha[..., None]
    # Rounding can overshoot 1 by an ulp.
    return np.clip(a * fg + (1.0 - a) * bg, 0.0, 1.0)

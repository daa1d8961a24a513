"""Training-time augmentation: pad/crop, resize, distortion, blur, flip.

Exact pixel moves (pad, crop, flip) are applied to every raster of the sample.
Value-changing steps (resize, colour distortion, blur) touch fg, bg and, for
resize, alpha and label; the image is then recomposited so that
image == composite(fg, bg, alpha) keeps holding.
"""

from dataclasses import dataclass

import cv2
import numpy as np

from desk_matting.datasynth.composite import composite
from desk_matting.models import Sample, SynthConfig, TriClass

LUMA = np.array([0.299, 0.587, 0.114])


@dataclass
class _Planes:
    image: np.ndarray
    alpha: np.ndarray
    fg: np.ndarray
    bg: np.ndarray
    label: np.ndarray
    recomposite: bool = False

    def map_pixels(self, fn) -> "_Planes":
        return _Planes(
            image=fn(self.image),
            alpha=fn(self.alpha),
            fg=fn(self.fg),
            bg=fn(self.bg),
            label=fn(self.label),
            recomposite=self.recomposite,
        )


def _pad_to(planes: _Planes, height: int, width: int) -> _Planes:
    """Zero-pad bottom/right: black image/fg/bg, zero alpha, BG label."""
    h, w = planes.alpha.shape
    dh, dw = max(0, height - h), max(0, width - w)
    if dh == 0 and dw == 0:
        return planes

    def pad(a: np.ndarray, fill: float) -> np.ndarray:
        widths = [(0, dh), (0, dw)] + [(0, 0)] * (a.ndim - 2)
        return np.pad(a, widths, mode="constant", constant_values=fill)

    return _Planes(
        image=pad(planes.image, 0.0),
        alpha=pad(planes.alpha, 0.0),
        fg=pad(planes.fg, 0.0),
        bg=pad(planes.bg, 0.0),
        label=pad(planes.label, int(TriClass.BG)),
        recomposite=planes.recomposite,
    )


def _resize(planes: _Planes, size: int) -> _Planes:
    if planes.alpha.shape == (size, size):
        return planes

    def linear(a: np.ndarray) -> np.ndarray:
        out = cv2.resize(a, (size, size), interpolation=cv2.INTER_LINEAR)
        return np.clip(out, 0.0, 1.0)

    return _Planes(
        image=planes.image,
        alpha=linear(planes.alpha),
        fg=linear(planes.fg),
        bg=linear(planes.bg),
        label=cv2.resize(planes.label, (size, size), interpolation=cv2.INTER_NEAREST),
        recomposite=True,
    )


def _distort(rgb: np.ndarray, brightness: float, contrast: float, saturation: float) -> np.ndarray:
    # Every step is affine in the pixel value, so it commutes with compositing
    # up to the final clip.
    out = (rgb - 0.5) * contrast + 0.5 + brightness
    gray = (out @ LUMA)[..., None]
    out = gray + (out - gray) * saturation
    return np.clip(out, 0.0, 1.0)


def augment(sample: Sample, seed: int, config: SynthConfig) -> Sample:
    """Randomly transform ``sample`` to ``config.base_size``; deterministic per seed."""
    rng = np.random.default_rng(seed)
    planes = _Planes(
        image=sample.image, alpha=sample.alpha, fg=sample.fg, bg=sample.bg, label=sample.label
    )

    h, w = planes.alpha.shape
    fitting = [c for c in config.crop_sizes if c <= min(h, w)]
    if fitting:
        crop = int(fitting[int(rng.integers(len(fitting)))])
    else:
        crop = config.crop_sizes[0]
        planes = _pad_to(planes, crop, crop)
        h, w = planes.alpha.shape

    top = int(rng.integers(h - crop + 1))
    left = int(rng.integers(w - crop + 1))
    planes = planes.map_pixels(lambda a: a[top : top + crop, left : left + crop])

    planes = _resize(planes, config.base_size)

    if rng.random() < config.distort_prob:
        b = rng.uniform(-config.brightness, config.brightness)
        c = rng.uniform(1.0 - config.contrast, 1.0 + config.contrast)
        s = rng.uniform(1.0 - config.saturation, 1.0 + config.saturation)
        planes.fg = _distort(planes.fg, b, c, s)
        planes.bg = _distort(planes.bg, b, c, s)
        planes.recomposite = True

    if rng.random() < config.blur_prob:
        sigma = rng.uniform(*config.blur_sigma)
        planes.fg = np.clip(cv2.GaussianBlur(planes.fg, (0, 0), sigmaX=sigma), 0.0, 1.0)
        planes.bg = np.clip(cv2.GaussianBlur(planes.bg, (0, 0), sigmaX=sigma), 0.0, 1.0)
        planes.recomposite = True

    if rng.random() < config.flip_prob:
        planes = planes.map_pixels(lambda a: a[:, ::-1])

    if planes.recomposite:
        planes.image = composite(planes.fg, planes.bg, planes.alpha)

    return Sample(
        image=np.ascontiguousarray(planes.image),
        alpha=np.ascontiguousarray(planes.alpha),
        fg=np.ascontiguousarray(planes.fg),
        bg=np.ascontiguousarray(planes.bg),
        label=np.ascontiguousarray(planes.label),
        sample_id=sample.sample_id,
    )

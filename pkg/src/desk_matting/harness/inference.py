from pathlib import Path

import numpy as np
import torch

from desk_matting.config import get_settings, logger
from desk_matting.harness.evaluation import predict_alpha, run_model
from desk_matting.network import MattingNet, resize_to
from desk_matting.services import load_checkpoint, read_image, write_alpha, write_gray


def tap_images(model: MattingNet, image: np.ndarray) -> dict[str, np.ndarray]:
    """First channel of every exported feature, resampled to the image size."""
    h, w = image.shape[:2]
    output = run_model(model, image, return_taps=True)
    padded_size = output.alpha.shape[-2:]
    images = {}
    for name, tap in output.taps.items():
        first = resize_to(tap[:, :1].float(), padded_size)
        images[name] = first[0, 0, :h, :w].detach().cpu().numpy().astype(np.float64)
    return images


def infer(
    checkpoint: Path,
    image_path: Path,
    out_path: Path,
    export_taps: bool = False,
) -> list[Path]:
    """Write the alpha PNG (and feature visualisations); returns the written paths."""
    ckpt = load_checkpoint(checkpoint, device=get_settings().device)
    image = read_image(image_path)
    out_path = Path(out_path)

    alpha = predict_alpha(ckpt.model, image)
    write_alpha(out_path, alpha)
    written = [out_path]

    if export_taps:
        taps_dir = out_path.parent / f"{out_path.stem}_taps"
        with torch.no_grad():
            for name, values in tap_images(ckpt.model, image).items():
                path = taps_dir / f"{name}.png"
                write_gray(path, values)
                written.append(path)
        logger.info(f"Exported {len(written) - 1} feature maps to {taps_dir}")
    return written

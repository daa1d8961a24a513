from collections.abc import Callable
from pathlib import Path

import numpy as np
import torch
from tqdm import tqdm

from desk_matting.config import get_settings, logger
from desk_matting.metrics import evaluate_per_image, mean_report, write_metrics_csv
from desk_matting.models import MetricReport, Sample
from desk_matting.network import MattingNet
from desk_matting.services import DatasetStore, load_checkpoint

PAD_MULTIPLE = 32

Predictor = Callable[[np.ndarray], np.ndarray]


def pad_to_multiple(image: np.ndarray, multiple: int = PAD_MULTIPLE) -> np.ndarray:
    """Reflect-pad an (H, W, C) array on the bottom/right to a multiple of ``multiple``."""
    h, w = image.shape[:2]
    pad_h, pad_w = (-h) % multiple, (-w) % multiple
    if pad_h == 0 and pad_w == 0:
        return image
    return np.pad(image, ((0, pad_h), (0, pad_w), (0, 0)), mode="reflect")


@torch.no_grad()
def run_model(model: MattingNet, image: np.ndarray, return_taps: bool = False):
    """Forward an (H, W, 3) image in eval mode; returns the ModelOutput at padded size."""
    padded = pad_to_multiple(image)
    tensor = torch.from_numpy(np.ascontiguousarray(padded.transpose(2, 0, 1)))[None]
    param = next(model.parameters())
    tensor = tensor.to(device=param.device, dtype=param.dtype)
    was_training = model.training
    model.eval()
    try:
        return model(tensor, return_taps=return_taps)
    finally:
        model.train(was_training)


def predict_alpha(model: MattingNet, image: np.ndarray) -> np.ndarray:
    """Alpha matte (H, W) float64 in [0, 1] for an image of any size."""
    h, w = image.shape[:2]
    output = run_model(model, image)
    alpha = output.alpha[0, 0, :h, :w].detach().cpu().numpy().astype(np.float64)
    return np.clip(alpha, 0.0, 1.0)


def evaluate_predictor(
    predict: Predictor,
    samples: list[Sample],
    out_csv: Path | None = None,
) -> MetricReport:
    """Score ``predict`` on every sample against its ground-truth alpha."""
    progress = get_settings().progress
    preds = [predict(s.image) for s in tqdm(samples, desc="evaluate", disable=not progress, leave=False)]
    reports = evaluate_per_image(preds, [s.alpha for s in samples])
    ids = [s.sample_id or f"{i:05d}" for i, s in enumerate(samples)]
    if out_csv is not None:
        return write_metrics_csv(out_csv, ids, reports)
    return mean_report(reports)


def evaluate_checkpoint(
    checkpoint: Path,
    dataset_dir: Path,
    out_csv: Path,
    split: str = "test",
) -> MetricReport:
    ckpt = load_checkpoint(checkpoint, device=get_settings().device)
    samples = DatasetStore(dataset_dir).load(split)
    report = evaluate_predictor(lambda image: predict_alpha(ckpt.model, image), samples, out_csv)
    logger.info(
        f"Checkpoint {checkpoint} (iter {ckpt.iteration}) on {split}: "
        f"SAD={report.sad:.4f} MSE={report.mse:.5f} Grad={report.grad:.4f} Conn={report.conn:.4f}"
    )
    return report

"""Training loop: seeded batches, SGD at the poly schedule, periodic checkpoints."""

import csv
import time
from collections.abc import Callable
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn
from tqdm import tqdm

from desk_matting.config import MattingError, configure_torch, get_settings, logger
from desk_matting.datasynth import MattingBatch, augment, collate, derive_seed
from desk_matting.harness.evaluation import evaluate_predictor, predict_alpha
from desk_matting.harness.schedule import poly_lr
from desk_matting.losses import LOSS_COLUMNS, LossBreakdown, total_loss
from desk_matting.models import DetailRegion, FusionMode, LossConfig, MetricReport, Sample, TrainConfig
from desk_matting.network import MattingNet, build_model
from desk_matting.services import DatasetMissingError, DatasetStore, save_checkpoint

LOSS_LOG_NAME = "losses.csv"
CHECKPOINT_DIR = "checkpoints"

_BATCH_STREAM = 2
_AUGMENT_STREAM = 3


class TrainingDivergedError(MattingError):
    """Raised when the objective becomes NaN or infinite."""

    pass


@contextmanager
def log_time(operation: str):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    logger.info(f"{operation}: {elapsed:.2f}s")


@dataclass
class TrainResult:
    model: MattingNet
    iterations: int
    final_checkpoint: Path
    loss_log: Path
    history: list[dict[str, float | int]] = field(default_factory=list)
    evaluations: dict[int, MetricReport] = field(default_factory=dict)


def checkpoint_name(iteration: int) -> str:
    return f"iter_{iteration:06d}"


def effective_loss_config(config: TrainConfig) -> LossConfig:
    """Without a fusion module the detail map is the final alpha, so it is supervised everywhere."""
    if config.model.fusion_mode is FusionMode.NONE and config.loss.detail_region is not DetailRegion.ALL:
        logger.info("fusion mode 'none': detail loss computed over the whole image")
        return config.loss.model_copy(update={"detail_region": DetailRegion.ALL})
    return config.loss


def sample_batch(samples: list[Sample], config: TrainConfig, iteration: int) -> MattingBatch:
    """Pick and augment ``batch_size`` samples; depends only on (seed, iteration)."""
    rng = np.random.default_rng(derive_seed(config.seed, _BATCH_STREAM, iteration))
    replace = len(samples) < config.batch_size
    picks = rng.choice(len(samples), size=config.batch_size, replace=replace)
    augmented = [
        augment(samples[int(i)], derive_seed(config.seed, _AUGMENT_STREAM, iteration, slot), config.synth)
        for slot, i in enumerate(picks)
    ]
    return collate(augmented)


def train_step(
    model: MattingNet,
    optimizer: torch.optim.Optimizer,
    batch: MattingBatch,
    loss_config: LossConfig,
    lr: float,
    iteration: int = 0,
) -> LossBreakdown:
    """One forward/backward/update at learning rate ``lr``."""
    for group in optimizer.param_groups:
        group["lr"] = lr
    model.train()
    optimizer.zero_grad(set_to_none=True)
    output = model(batch.image)
    breakdown = total_loss(output, batch, loss_config)
    if not breakdown.is_finite():
        raise TrainingDivergedError(
            f"non-finite loss at iteration {iteration}: {breakdown.as_row(iteration, lr)}"
        )
    breakdown.total.backward()
    optimizer.step()
    return breakdown


@torch.no_grad()
def calibrate_batchnorm(model: MattingNet, batches: list[MattingBatch]) -> None:
    """Set BatchNorm running statistics to the train-mode batch statistics of ``batches``.

    Each layer gets the pooled mean and biased variance of its inputs, so an
    eval-mode forward over these batches reproduces the train-mode one.
    """
    norms = [m for m in model.modules() if isinstance(m, nn.BatchNorm2d)]
    if not norms or not batches:
        return
    recorded: dict[nn.Module, list[tuple[torch.Tensor, torch.Tensor]]] = {m: [] for m in norms}

    def record(module: nn.Module, inputs: tuple[torch.Tensor, ...]) -> None:
        var, mean = torch.var_mean(inputs[0], dim=(0, 2, 3), correction=0)
        recorded[module].append((mean, var))

    handles = [m.register_forward_pre_hook(record) for m in norms]
    was_training = model.training
    model.train()
    try:
        for batch in batches:
            model(batch.image)
    finally:
        for handle in handles:
            handle.remove()
        model.train(was_training)

    for norm, stats in recorded.items():
        means = torch.stack([mean for mean, _ in stats])
        variances = torch.stack([var for _, var in stats])
        mean = means.mean(dim=0)
        norm.running_mean.copy_(mean)
        norm.running_var.copy_(variances.mean(dim=0) + ((means - mean) ** 2).mean(dim=0))


def make_optimizer(model: MattingNet, config: TrainConfig) -> torch.optim.SGD:
    # weight_decay in torch SGD is the coupled L2 gradient term
    return torch.optim.SGD(
        model.parameters(),
        lr=config.base_lr,
        momentum=config.momentum,
        weight_decay=config.weight_decay,
    )


def train(
    config: TrainConfig,
    out_dir: Path,
    on_iteration: Callable[[int, LossBreakdown, float], None] | None = None,
) -> TrainResult:
    """
    Train a model from scratch.

    Args:
        config: Training run settings (dataset path, model, loss, augmentation)
        out_dir: Directory receiving losses.csv, checkpoints/ and eval_iter_*.csv
        on_iteration: Optional callback(iteration, breakdown, lr) after every update

    Returns:
        TrainResult with the trained model and the final checkpoint path
    """
    settings = get_settings()
    configure_torch()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    store = DatasetStore(config.dataset_dir)
    if not store.exists("train"):
        raise DatasetMissingError(f"no training split in {config.dataset_dir}; run `synth` first")
    with log_time("load train split"):
        train_samples = store.load("train")
    test_samples = store.load("test") if config.eval_at_checkpoints and store.exists("test") else []

    device = settings.device
    model = build_model(config.model, seed=config.seed).to(device)
    optimizer = make_optimizer(model, config)
    loss_config = effective_loss_config(config)
    interval = config.checkpoint_interval

    logger.info(
        f"Training {config.max_iters} iterations, batch {config.batch_size}, "
        f"{len(train_samples)} train samples, checkpoint every {interval}"
    )

    result = TrainResult(
        model=model,
        iterations=0,
        final_checkpoint=out_dir / CHECKPOINT_DIR / "final",
        loss_log=out_dir / LOSS_LOG_NAME,
    )
    with result.loss_log.open("w", newline="", encoding="utf-8") as log_file:
        writer = csv.DictWriter(log_file, fieldnames=LOSS_COLUMNS)
        writer.writeheader()

        bar = tqdm(range(config.max_iters), desc="train", disable=not settings.progress)
        for iteration in bar:
            lr = poly_lr(iteration, config)
            batch = sample_batch(train_samples, config, iteration).to(device)
            breakdown = train_step(model, optimizer, batch, loss_config, lr, iteration)
            done = iteration + 1

            row = breakdown.as_row(done, lr)
            writer.writerow(row)
            log_file.flush()
            result.history.append(row)
            result.iterations = done
            bar.set_postfix(loss=f"{row['L_total']:.4g}")

            if on_iteration:
                on_iteration(done, breakdown, lr)

            if done % interval == 0 or done == config.max_iters:
                if config.bn_calibration_batches:
                    recent = range(max(0, done - config.bn_calibration_batches), done)
                    calibrate_batchnorm(model, [sample_batch(train_samples, config, i).to(device) for i in recent])
                save_checkpoint(out_dir / CHECKPOINT_DIR / checkpoint_name(done), model, done, config)
                logger.info(
                    f"iter {done}: L_total={row['L_total']:.4f} "
                    f"(L_s={row['L_s']:.4f} L_d={row['L_d']:.4f} L_f={row['L_f']:.4f}) lr={lr:.5f}"
                )
                if test_samples:
                    with log_time(f"evaluate iter {done}"):
                        report = evaluate_predictor(
                            lambda image: predict_alpha(model, image),
                            test_samples,
                            out_dir / f"eval_{checkpoint_name(done)}.csv",
                        )
                    result.evaluations[done] = report
                    logger.info(
                        f"iter {done} test: SAD={report.sad:.4f} MSE={report.mse:.5f} "
                        f"Grad={report.grad:.4f} Conn={report.conn:.4f}"
                    )

    save_checkpoint(result.final_checkpoint, model, result.iterations, config)
    model.eval()
    return result

from .schedule import poly_lr
from .evaluation import (
    PAD_MULTIPLE,
    evaluate_checkpoint,
    evaluate_predictor,
    pad_to_multiple,
    predict_alpha,
    run_model,
)
from .trainer import (
    TrainingDivergedError,
    TrainResult,
    calibrate_batchnorm,
    checkpoint_name,
    effective_loss_config,
    log_time,
    make_optimizer,
    sample_batch,
    train,
    train_step,
)
from .ablation import REFERENCE_ROWS, ablate, variant_config, variant_label
from .inference import infer, tap_images

__all__ = [
    "poly_lr",
    "PAD_MULTIPLE",
    "evaluate_checkpoint",
    "evaluate_predictor",
    "pad_to_multiple",
    "predict_alpha",
    "run_model",
    "TrainingDivergedError",
    "TrainResult",
    "calibrate_batchnorm",
    "checkpoint_name",
    "effective_loss_config",
    "log_time",
    "make_optimizer",
    "sample_batch",
    "train",
    "train_step",
    "REFERENCE_ROWS",
    "ablate",
    "variant_config",
    "variant_label",
    "infer",
    "tap_images",
]

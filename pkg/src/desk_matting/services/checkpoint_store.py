"""Checkpoint directories: params.pt (state dict), model_config.json, state.json."""

import json
import pickle
from dataclasses import dataclass
from pathlib import Path

import torch
from pydantic import ValidationError

from desk_matting.config import MattingError, logger
from desk_matting.models import ModelConfig, TrainConfig
from desk_matting.network import MattingNet, build_model

PARAMS_NAME = "params.pt"
MODEL_CONFIG_NAME = "model_config.json"
STATE_NAME = "state.json"


class CheckpointError(MattingError):
    """Raised when a checkpoint is missing, corrupt or does not fit the model."""

    pass


@dataclass
class Checkpoint:
    model: MattingNet
    config: ModelConfig
    iteration: int
    train_config: TrainConfig | None = None


def save_checkpoint(
    directory: Path,
    model: MattingNet,
    iteration: int,
    train_config: TrainConfig | None = None,
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    state_dict = {k: v.detach().cpu().clone() for k, v in model.state_dict().items()}
    torch.save(state_dict, directory / PARAMS_NAME)
    (directory / MODEL_CONFIG_NAME).write_text(model.config.model_dump_json(indent=2), encoding="utf-8")
    state = {"iteration": iteration}
    if train_config is not None:
        state["train_config"] = json.loads(train_config.model_dump_json())
    (directory / STATE_NAME).write_text(json.dumps(state, indent=2, sort_keys=True), encoding="utf-8")
    logger.debug(f"Saved checkpoint at iteration {iteration} to {directory}")
    return directory


def load_checkpoint(directory: Path, device: str = "cpu") -> Checkpoint:
    """Rebuild the model and load parameters; shape disagreement fails loudly."""
    directory = Path(directory)
    for name in (PARAMS_NAME, MODEL_CONFIG_NAME, STATE_NAME):
        if not (directory / name).exists():
            raise CheckpointError(f"checkpoint {directory} is missing {name}")

    try:
        config = ModelConfig.model_validate_json((directory / MODEL_CONFIG_NAME).read_text(encoding="utf-8"))
        state = json.loads((directory / STATE_NAME).read_text(encoding="utf-8"))
        iteration = int(state["iteration"])
        train_config = TrainConfig.model_validate(state["train_config"]) if "train_config" in state else None
        params = torch.load(directory / PARAMS_NAME, map_location=device, weights_only=True)
    except (
        KeyError,
        TypeError,
        ValueError,
        ValidationError,
        json.JSONDecodeError,
        pickle.UnpicklingError,
        RuntimeError,
        EOFError,
        OSError,
    ) as e:
        raise CheckpointError(f"corrupt checkpoint {directory}: {e}") from e

    model = build_model(config).to(device)
    expected = model.state_dict()
    missing = sorted(set(expected) - set(params))
    unexpected = sorted(set(params) - set(expected))
    mismatched = sorted(
        f"{k}: {tuple(params[k].shape)} != {tuple(v.shape)}"
        for k, v in expected.items()
        if k in params and params[k].shape != v.shape
    )
    if missing or unexpected or mismatched:
        raise CheckpointError(
            f"checkpoint {directory} does not match its model config; "
            f"missing={missing[:5]} unexpected={unexpected[:5]} mismatched={mismatched[:5]}"
        )
    model.load_state_dict(params)
    model.eval()
    return Checkpoint(
        model=model,
        config=config,
        iteration=iteration,
        train_config=train_config,
    )

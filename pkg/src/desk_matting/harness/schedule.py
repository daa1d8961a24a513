from desk_matting.config import ConfigError
from desk_matting.models import TrainConfig


def poly_lr(iteration: int, config: TrainConfig) -> float:
    """base_lr * (1 - iteration / max_iters) ** poly_power, for 0 <= iteration <= max_iters."""
    if not 0 <= iteration <= config.max_iters:
        raise ConfigError(f"iteration {iteration} outside [0, {config.max_iters}]")
    return config.base_lr * (1.0 - iteration / config.max_iters) ** config.poly_power

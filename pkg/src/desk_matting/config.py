import logging
import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()


def setup_logging() -> logging.Logger:
    general_level = os.getenv("LOG_LEVEL_GENERAL", "WARNING").upper()
    project_level = os.getenv("LOG_LEVEL", "INFO").upper()

    logging.basicConfig(
        level=getattr(logging, general_level, logging.WARNING),
        format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
        datefmt="%H:%M:%S",
    )

    project_logger = logging.getLogger("desk_matting")
    project_logger.setLevel(getattr(logging, project_level, logging.INFO))
    return project_logger


logger = setup_logging()


class MattingError(Exception):
    """Base class for every error raised by desk_matting."""

    pass


class Settings(BaseModel):
    """Runtime settings (environment driven)."""

    device: str = "cpu"
    num_threads: int = 1
    deterministic: bool = True
    output_dir: Path = Path("output")
    progress: bool = True

    # Metric params
    grad_sigma: float = 1.4
    conn_step: float = 0.1
    conn_tolerance: float = 0.15


def _parse_bool(value: str) -> bool:
    return value.strip().lower() in ("true", "1", "yes")


@lru_cache
def get_settings() -> Settings:
    return Settings(
        device=os.getenv("MATTING_DEVICE") or "cpu",
        num_threads=int(os.getenv("MATTING_NUM_THREADS", "1")),
        deterministic=_parse_bool(os.getenv("MATTING_DETERMINISTIC", "true")),
        output_dir=Path(os.getenv("MATTING_OUTPUT_DIR") or "output"),
        progress=_parse_bool(os.getenv("MATTING_PROGRESS", "true")),
        # Metric params
        grad_sigma=float(os.getenv("METRIC_GRAD_SIGMA", "1.4")),
        conn_step=float(os.getenv("METRIC_CONN_STEP", "0.1")),
        conn_tolerance=float(os.getenv("METRIC_CONN_TOLERANCE", "0.15")),
    )


def configure_torch() -> None:
    """Apply thread count and determinism settings to torch."""
    import torch

    settings = get_settings()
    torch.set_num_threads(settings.num_threads)
    if settings.deterministic:
        torch.use_deterministic_algorithms(True, warn_only=True)


class ConfigError(MattingError, ValueError):
    """Raised for invalid modes, tap sets or schedule arguments."""

    pass

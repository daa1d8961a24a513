import os

os.environ.setdefault("MATTING_PROGRESS", "false")
os.environ.setdefault("MATTING_DEVICE", "cpu")

import numpy as np
import pytest

from desk_matting.config import get_settings
from desk_matting.datasynth import assemble_dataset
from desk_matting.models import LossConfig, ModelConfig, Reduction, SynthConfig, TrainConfig

get_settings.cache_clear()

TINY_MODEL = ModelConfig(
    encoder_widths=(4, 8, 8, 8, 8),
    ppm_bins=(1, 2),
    scb_channels=8,
    hrdb_channels=8,
)

SMALL_SYNTH = SynthConfig(
    seed=3,
    num_fg_train=2,
    num_fg_test=1,
    bg_per_fg_train=2,
    bg_per_fg_test=2,
    image_size=64,
    base_size=64,
    crop_sizes=[64],
)


@pytest.fixture
def tiny_model_config() -> ModelConfig:
    return TINY_MODEL.model_copy()


@pytest.fixture
def small_synth_config() -> SynthConfig:
    return SMALL_SYNTH.model_copy()


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory) -> "os.PathLike":
    root = tmp_path_factory.mktemp("dataset")
    assemble_dataset(SMALL_SYNTH, root)
    return root


@pytest.fixture
def tiny_train_config(dataset_dir) -> TrainConfig:
    return TrainConfig(
        max_iters=2,
        batch_size=2,
        seed=0,
        dataset_dir=dataset_dir,
        model=TINY_MODEL,
        loss=LossConfig(reduction=Reduction.MEAN),
        synth=SMALL_SYNTH,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)

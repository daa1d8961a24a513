"""Dataset assembly: every foreground composited over several distinct backgrounds."""

from pathlib import Path

import numpy as np
from tqdm import tqdm

from desk_matting.config import get_settings, logger
from desk_matting.core import default_dilation_radius, derive_triclass
from desk_matting.datasynth.composite import composite
from desk_matting.datasynth.procedural import synth_background, synth_foreground
from desk_matting.models import Sample, SynthConfig
from desk_matting.services.dataset_store import DatasetStore, Manifest, Pairing

_SPLIT_CODES = {"train": 0, "test": 1}
_FG_STREAM = 0
_BG_STREAM = 1


def derive_seed(*keys: int) -> int:
    """Stable 32-bit seed for a (global seed, stream, index...) key."""
    return int(np.random.SeedSequence(list(keys)).generate_state(1)[0])


def _split_plan(config: SynthConfig, split: str) -> tuple[int, int]:
    if split == "train":
        return config.num_fg_train, config.bg_per_fg_train
    return config.num_fg_test, config.bg_per_fg_test


def build_sample(config: SynthConfig, split: str, fg_index: int, bg_index: int, index: int) -> Sample:
    """Generate one composite; depends only on (seed, split, indices)."""
    code = _SPLIT_CODES[split]
    size = config.image_size
    fg_seed = derive_seed(config.seed, code, _FG_STREAM, fg_index)
    fg, alpha = synth_foreground(fg_seed, size, config.alpha_grid)
    bg = synth_background(derive_seed(config.seed, code, _BG_STREAM, fg_index, bg_index), size)

    radius = config.dilation_radius
    if radius is None:
        radius = default_dilation_radius(size)

    return Sample(
        image=composite(fg, bg, alpha),
        alpha=alpha,
        fg=fg,
        bg=bg,
        label=derive_triclass(alpha, radius),
        sample_id=f"{split}_{index:05d}",
    )


def assemble_dataset(
    config: SynthConfig, out_dir: Path | None = None
) -> tuple[list[Sample], list[Sample]]:
    """Build the train and test splits, optionally writing them to ``out_dir``."""
    store = DatasetStore(out_dir) if out_dir is not None else None
    manifest = Manifest(config=config)
    splits: dict[str, list[Sample]] = {}

    for split in ("train", "test"):
        num_fg, bg_per_fg = _split_plan(config, split)
        pairings = [
            Pairing(index=fg_i * bg_per_fg + bg_i, fg_index=fg_i, bg_index=bg_i)
            for fg_i in range(num_fg)
            for bg_i in range(bg_per_fg)
        ]
        samples = []
        for pairing in tqdm(pairings, desc=f"synth {split}", disable=not get_settings().progress):
            sample = build_sample(config, split, pairing.fg_index, pairing.bg_index, pairing.index)
            if store is not None:
                store.write_sample(split, pairing.index, sample)
            samples.append(sample)
        manifest.splits[split] = pairings
        splits[split] = samples
        logger.info(f"Synthesized {len(samples)} {split} samples ({num_fg} fg x {bg_per_fg} bg)")

    if store is not None:
        store.write_manifest(manifest)
    return splits["train"], splits["test"]

from .composite import composite
from .procedural import synth_background, synth_foreground
from .augment import augment
from .assemble import assemble_dataset, build_sample, derive_seed
from .batch import MattingBatch, collate

__all__ = [
    "composite",
    "synth_background",
    "synth_foreground",
    "augment",
    "assemble_dataset",
    "build_sample",
    "derive_seed",
    "MattingBatch",
    "collate",
]

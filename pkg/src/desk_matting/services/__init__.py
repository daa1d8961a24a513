from .png_io import (
    ImageReadError,
    read_alpha,
    read_image,
    read_label,
    write_alpha,
    write_gray,
    write_image,
    write_label,
)
from .dataset_store import DatasetMissingError, DatasetStore, Manifest, Pairing
from .checkpoint_store import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint

__all__ = [
    "ImageReadError",
    "read_alpha",
    "read_image",
    "read_label",
    "write_alpha",
    "write_gray",
    "write_image",
    "write_label",
    "DatasetMissingError",
    "DatasetStore",
    "Manifest",
    "Pairing",
    "Checkpoint",
    "CheckpointError",
    "load_checkpoint",
    "save_checkpoint",
]

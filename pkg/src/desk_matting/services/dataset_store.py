import json
from pathlib import Path

from pydantic import BaseModel, Field

from desk_matting.config import MattingError
from desk_matting.models import Sample, SynthConfig
from desk_matting.services.png_io import (
    read_alpha,
    read_image,
    read_label,
    write_alpha,
    write_image,
    write_label,
)

SPLITS = ("train", "test")
PLANES = ("fg", "alpha", "bg", "image", "label")
MANIFEST_NAME = "manifest.json"


class DatasetMissingError(MattingError):
    """Raised when a dataset directory or split is absent."""

    pass


class Pairing(BaseModel):
    """Which foreground and background produced a stored sample."""

    index: int
    fg_index: int
    bg_index: int


class Manifest(BaseModel):
    config: SynthConfig
    splits: dict[str, list[Pairing]] = Field(default_factory=dict)


def sample_name(index: int) -> str:
    return f"{index:05d}.png"


class DatasetStore:
    """File layout: <root>/<split>/{fg,alpha,bg,image,label}/00000.png + manifest.json."""

    def __init__(self, root: Path):
        self.root = Path(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    def _plane_path(self, split: str, plane: str, index: int) -> Path:
        return self.root / split / plane / sample_name(index)

    def exists(self, split: str | None = None) -> bool:
        if not self.manifest_path.exists():
            return False
        if split is None:
            return True
        return split in self.read_manifest().splits

    def write_sample(self, split: str, index: int, sample: Sample) -> None:
        write_image(self._plane_path(split, "fg", index), sample.fg)
        write_alpha(self._plane_path(split, "alpha", index), sample.alpha)
        write_image(self._plane_path(split, "bg", index), sample.bg)
        write_image(self._plane_path(split, "image", index), sample.image)
        write_label(self._plane_path(split, "label", index), sample.label)

    def write_manifest(self, manifest: Manifest) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        payload = json.loads(manifest.model_dump_json())
        self.manifest_path.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    def read_manifest(self) -> Manifest:
        if not self.manifest_path.exists():
            raise DatasetMissingError(f"no dataset manifest at {self.manifest_path}")
        return Manifest.model_validate_json(self.manifest_path.read_text(encoding="utf-8"))

    def load(self, split: str) -> list[Sample]:
        manifest = self.read_manifest()
        if split not in manifest.splits:
            raise DatasetMissingError(f"split '{split}' not found in {self.root}")

        samples = []
        for pairing in manifest.splits[split]:
            i = pairing.index
            samples.append(
                Sample(
                    image=read_image(self._plane_path(split, "image", i)),
                    alpha=read_alpha(self._plane_path(split, "alpha", i)),
                    fg=read_image(self._plane_path(split, "fg", i)),
                    bg=read_image(self._plane_path(split, "bg", i)),
                    label=read_label(self._plane_path(split, "label", i)),
                    sample_id=f"{split}_{i:05d}",
                )
            )
        return samples

from dataclasses import dataclass

import numpy as np
import torch

from desk_matting.models import Sample


@dataclass
class MattingBatch:
    """NCHW tensors: image/fg/bg (B, 3, H, W), alpha (B, 1, H, W), label (B, H, W) long."""

    image: torch.Tensor
    alpha: torch.Tensor
    fg: torch.Tensor
    bg: torch.Tensor
    label: torch.Tensor

    def to(self, device: str | torch.device) -> "MattingBatch":
        return MattingBatch(
            image=self.image.to(device),
            alpha=self.alpha.to(device),
            fg=self.fg.to(device),
            bg=self.bg.to(device),
            label=self.label.to(device),
        )


def collate(samples: list[Sample], dtype: torch.dtype = torch.float32) -> MattingBatch:
    def rgb(key: str) -> torch.Tensor:
        stacked = np.stack([getattr(s, key) for s in samples]).transpose(0, 3, 1, 2)
        return torch.from_numpy(np.ascontiguousarray(stacked)).to(dtype)

    alpha = np.stack([s.alpha for s in samples])[:, None]
    label = np.stack([s.label for s in samples]).astype(np.int64)
    return MattingBatch(
        image=rgb("image"),
        alpha=torch.from_numpy(np.ascontiguousarray(alpha)).to(dtype),
        fg=rgb("fg"),
        bg=rgb("bg"),
        label=torch.from_numpy(label),
    )

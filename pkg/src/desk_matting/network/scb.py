import torch
import torch.nn.functional as F
from torch import nn

from desk_matting.models.configs import SCB_BLOCKS
from desk_matting.network.layers import ConvBNReLU

NUM_CLASSES = 3


class SemanticBlock(nn.Module):
    """Three ConvBNReLU followed by a 2x bilinear upsample."""

    def __init__(self, channels: int, bn_momentum: float = 0.1):
        super().__init__()
        self.convs = nn.Sequential(
            *(ConvBNReLU(channels, channels, bn_momentum=bn_momentum) for _ in range(3))
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.interpolate(self.convs(x), scale_factor=2, mode="bilinear", align_corners=False)


class SemanticBranch(nn.Module):
    """Five upsampling blocks from 1/32 to full resolution, then a 3-class head."""

    def __init__(self, channels: int, bn_momentum: float = 0.1):
        super().__init__()
        self.blocks = nn.ModuleList(SemanticBlock(channels, bn_momentum) for _ in range(SCB_BLOCKS))
        self.head = nn.Conv2d(channels, NUM_CLASSES, kernel_size=3, padding=1)

    def forward(self, x: torch.Tensor) -> tuple[torch.Tensor, dict[int, torch.Tensor]]:
        """Returns (logits, taps) with taps[k] the output of block k (1-based)."""
        taps = {}
        for k, block in enumerate(self.blocks, start=1):
            x = block(x)
            taps[k] = x
        return self.head(x), taps

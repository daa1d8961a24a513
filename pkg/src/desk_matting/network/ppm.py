import torch
from torch import nn

from desk_matting.network.layers import ConvBNReLU, resize_to


class PyramidPooling(nn.Module):
    """Pool the deepest map at several bin sizes, upsample back and project.

    Pooled branches carry no BatchNorm: a 1x1 bin of a single image holds one
    value per channel.
    """

    def __init__(
        self,
        in_channels: int,
        bins: tuple[int, ...],
        out_channels: int,
        bn_momentum: float = 0.1,
    ):
        super().__init__()
        reduced = max(1, in_channels // len(bins))
        self.stages = nn.ModuleList(
            nn.Sequential(
                nn.AdaptiveAvgPool2d(b),
                nn.Conv2d(in_channels, reduced, kernel_size=1, bias=False),
                nn.ReLU(),
            )
            for b in bins
        )
        self.project = ConvBNReLU(
            in_channels + reduced * len(bins), out_channels, kernel_size=1, bn_momentum=bn_momentum
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        size = x.shape[-2:]
        pooled = [resize_to(stage(x), size) for stage in self.stages]
        return self.project(torch.cat([x, *pooled], dim=1))

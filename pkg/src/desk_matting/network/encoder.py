"""Multi-resolution encoder with parallel streams and repeated cross-scale fusion.

The stem brings the input to 1/2 and 1/4 scale. Four stages then grow one new
stream per stage (1/8, 1/16, 1/32); every stage ends by fusing all streams
into each other, so the 1/4 output already carries information from the
deepest scale.
"""

from dataclasses import dataclass

import torch
import torch.nn.functional as F
from torch import nn

from desk_matting.config import MattingError
from desk_matting.network.layers import ConvBNReLU, ResidualBlock, resize_to

class ShapeContractError(MattingError, ValueError):
    """Raised when an input violates the network's size contract."""

    pass


def check_input_size(height: int, width: int, multiple: int = 32) -> None:
    if height % multiple or width % multiple:
        raise ShapeContractError(
            f"input size {height}x{width} is not a multiple of {multiple}"
        )


@dataclass
class EncoderFeatures:
    """Feature maps at 1/2, 1/4, 1/8, 1/16 and 1/32 of the input."""

    levels: tuple[torch.Tensor, ...]

    @property
    def low_level(self) -> torch.Tensor:
        return self.levels[1]

    @property
    def deepest(self) -> torch.Tensor:
        return self.levels[-1]


class FuseLayer(nn.Module):
    """Every output stream sums all input streams resampled to its scale."""

    def __init__(self, widths: tuple[int, ...], bn_momentum: float):
        super().__init__()
        self.rows = nn.ModuleList()
        for i, ci in enumerate(widths):
            row = nn.ModuleList()
            for j, cj in enumerate(widths):
                if j == i:
                    row.append(nn.Identity())
                elif j > i:
                    row.append(ConvBNReLU(cj, ci, kernel_size=1, bn_momentum=bn_momentum, relu=False))
                else:
                    steps = []
                    for k in range(i - j):
                        last = k == i - j - 1
                        steps.append(
                            ConvBNReLU(
                                cj,
                                ci if last else cj,
                                stride=2,
                                bn_momentum=bn_momentum,
                                relu=not last,
                            )
                        )
                    row.append(nn.Sequential(*steps))
            self.rows.append(row)

    def forward(self, xs: list[torch.Tensor]) -> list[torch.Tensor]:
        outs = []
        for i, row in enumerate(self.rows):
            size = xs[i].shape[-2:]
            total = xs[i]
            for j, branch in enumerate(row):
                if j != i:
                    total = total + resize_to(branch(xs[j]), size)
            outs.append(F.relu(total))
        return outs


class HRStage(nn.Module):
    def __init__(self, widths: tuple[int, ...], bn_momentum: float):
        super().__init__()
        self.blocks = nn.ModuleList(ResidualBlock(c, bn_momentum) for c in widths)
        self.fuse = FuseLayer(widths, bn_momentum) if len(widths) > 1 else None

    def forward(self, xs: list[torch.Tensor]) -> list[torch.Tensor]:
        xs = [block(x) for block, x in zip(self.blocks, xs)]
        if self.fuse is not None:
            xs = self.fuse(xs)
        return xs


class HREncoder(nn.Module):
    def __init__(self, widths: tuple[int, int, int, int, int], bn_momentum: float = 0.1):
        super().__init__()
        self.widths = tuple(widths)
        self.stem_half = ConvBNReLU(3, widths[0], stride=2, bn_momentum=bn_momentum)
        self.stem_quarter = ConvBNReLU(widths[0], widths[1], stride=2, bn_momentum=bn_momentum)

        streams = widths[1:]
        self.stages = nn.ModuleList(
            HRStage(tuple(streams[: n + 1]), bn_momentum) for n in range(len(streams))
        )
        self.transitions = nn.ModuleList(
            ConvBNReLU(streams[n], streams[n + 1], stride=2, bn_momentum=bn_momentum)
            for n in range(len(streams) - 1)
        )

    def forward(self, image: torch.Tensor) -> EncoderFeatures:
        check_input_size(*image.shape[-2:])
        half = self.stem_half(image)
        xs = [self.stem_quarter(half)]
        for n, stage in enumerate(self.stages):
            xs = stage(xs)
            if n < len(self.transitions):
                xs.append(self.transitions[n](xs[-1]))
        return EncoderFeatures(levels=(half, *xs))

import torch
from torch import nn

from desk_matting.config import ConfigError
from desk_matting.models.configs import MAX_GUIDANCE_SLOTS, SCB_BLOCKS
from desk_matting.network.encoder import EncoderFeatures
from desk_matting.network.gcl import GatedConv
from desk_matting.network.layers import ConvBNReLU, ResidualBlock, resize_to


def plan_guidance(taps: tuple[int, ...], stack_excess_taps: bool = False) -> list[list[int]]:
    """Assign semantic taps, in order, to the insertion points before each residual block.

    Up to three taps get one point each and later points stay empty. With
    stacking enabled, larger sets are split as evenly as possible, earlier
    points taking the remainder: (1, 2, 3, 4, 5) -> [1, 2], [3, 4], [5].
    """
    taps = tuple(sorted(taps))
    if any(t < 1 or t > SCB_BLOCKS for t in taps) or len(set(taps)) != len(taps):
        raise ConfigError(f"invalid guidance taps {taps}")
    if len(taps) <= MAX_GUIDANCE_SLOTS:
        return [[t] for t in taps] + [[] for _ in range(MAX_GUIDANCE_SLOTS - len(taps))]
    if not stack_excess_taps:
        raise ConfigError(
            f"{len(taps)} guidance taps exceed {MAX_GUIDANCE_SLOTS} insertion points"
        )
    base, extra = divmod(len(taps), MAX_GUIDANCE_SLOTS)
    slots, start = [], 0
    for i in range(MAX_GUIDANCE_SLOTS):
        n = base + (1 if i < extra else 0)
        slots.append(list(taps[start : start + n]))
        start += n
    return slots


class DetailBranch(nn.Module):
    """Residual path at 1/4 scale, gated by semantic taps, ending in a sigmoid matte."""

    def __init__(
        self,
        low_channels: int,
        deep_channels: int,
        channels: int,
        semantic_channels: int,
        taps: tuple[int, ...] = (1, 3, 5),
        stack_excess_taps: bool = False,
        bn_momentum: float = 0.1,
    ):
        super().__init__()
        self.slots = plan_guidance(taps, stack_excess_taps)
        self.stem = ConvBNReLU(low_channels + deep_channels, channels, bn_momentum=bn_momentum)
        self.gates = nn.ModuleList(
            nn.ModuleList(GatedConv(channels, semantic_channels, bn_momentum) for _ in slot)
            for slot in self.slots
        )
        self.blocks = nn.ModuleList(
            ResidualBlock(channels, bn_momentum) for _ in range(MAX_GUIDANCE_SLOTS)
        )
        self.head = nn.Conv2d(channels, 1, kernel_size=3, padding=1)

    def forward(
        self,
        features: EncoderFeatures,
        semantic_taps: dict[int, torch.Tensor],
        out_size: tuple[int, int],
    ) -> tuple[torch.Tensor, list[torch.Tensor]]:
        """Returns (detail matte at ``out_size``, one gated output per GCL)."""
        low = features.low_level
        deep = resize_to(features.deepest, low.shape[-2:])
        d = self.stem(torch.cat([low, deep], dim=1))

        guided = []
        for slot, gates, block in zip(self.slots, self.gates, self.blocks):
            for tap, gate in zip(slot, gates):
                d, _ = gate(d, semantic_taps[tap])
                guided.append(d)
            d = block(d)

        detail = torch.sigmoid(self.head(d))
        return resize_to(detail, out_size), guided

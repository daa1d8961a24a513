import torch
from torch import nn

from desk_matting.network.layers import resize_to


class GatedConv(nn.Module):
    """Gated convolution letting a semantic feature steer a detail feature.

    g     = sigmoid(BN(conv1x1(s || d)))      single channel, s resized to d
    d_hat = w(d * g + d)                      w is a channel-wise 1x1 kernel
    """

    def __init__(self, detail_channels: int, semantic_channels: int, bn_momentum: float = 0.1):
        super().__init__()
        self.gate_conv = nn.Conv2d(semantic_channels + detail_channels, 1, kernel_size=1)
        self.gate_norm = nn.BatchNorm2d(1, momentum=bn_momentum)
        self.channel_weight = nn.Conv2d(detail_channels, detail_channels, kernel_size=1, bias=False)

    def gate(self, d: torch.Tensor, s: torch.Tensor) -> torch.Tensor:
        s = resize_to(s, d.shape[-2:])
        if s.shape[-2:] != d.shape[-2:]:
            raise RuntimeError(f"gate inputs misaligned: {tuple(s.shape)} vs {tuple(d.shape)}")
        return torch.sigmoid(self.gate_norm(self.gate_conv(torch.cat([s, d], dim=1))))

    def forward(self, d: torch.Tensor, s: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Returns (d_hat, g)."""
        g = self.gate(d, s)
        return self.channel_weight(d * g + d), g

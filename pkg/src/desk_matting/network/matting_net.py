from dataclasses import dataclass, field

import torch
from torch import nn

from desk_matting.models import ModelConfig
from desk_matting.network.encoder import HREncoder
from desk_matting.network.fusion import FusionRegistry
from desk_matting.network.gcl import GatedConv
from desk_matting.network.hrdb import DetailBranch
from desk_matting.network.ppm import PyramidPooling
from desk_matting.network.scb import SemanticBranch


@dataclass
class ModelOutput:
    """Network outputs, all (B, C, H, W) at input resolution.

    semantic: 3-class probabilities (FG, BG, TR order);
    detail/alpha: single-channel mattes in [0, 1];
    taps: s1..s5 semantic block outputs and g1.. gated detail features,
    filled only when requested.
    """

    semantic: torch.Tensor
    detail: torch.Tensor
    alpha: torch.Tensor
    taps: dict[str, torch.Tensor] = field(default_factory=dict)


class MattingNet(nn.Module):
    """Shared encoder feeding a semantic context branch and a guided detail branch."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        widths = config.encoder_widths
        momentum = config.bn_momentum
        self.encoder = HREncoder(widths, momentum)
        self.ppm = PyramidPooling(widths[-1], config.ppm_bins, config.scb_channels, momentum)
        self.scb = SemanticBranch(config.scb_channels, momentum)
        self.hrdb = DetailBranch(
            low_channels=widths[1],
            deep_channels=widths[-1],
            channels=config.hrdb_channels,
            semantic_channels=config.scb_channels,
            taps=config.guidance_taps,
            stack_excess_taps=config.stack_excess_taps,
            bn_momentum=momentum,
        )
        self.fusion = FusionRegistry.get(config.fusion_mode)()

    def forward(self, image: torch.Tensor, return_taps: bool = False) -> ModelOutput:
        size = tuple(image.shape[-2:])
        features = self.encoder(image)
        logits, semantic_taps = self.scb(self.ppm(features.deepest))
        semantic = torch.softmax(logits, dim=1)
        detail, guided = self.hrdb(features, semantic_taps, size)
        alpha = self.fusion(semantic, detail)

        taps: dict[str, torch.Tensor] = {}
        if return_taps:
            taps.update({f"s{k}": t for k, t in semantic_taps.items()})
            taps.update({f"g{i}": g for i, g in enumerate(guided, start=1)})
        return ModelOutput(semantic=semantic, detail=detail, alpha=alpha, taps=taps)


def init_weights(model: nn.Module) -> None:
    """Fan-in scaled normal init for convolutions, zero biases, unit BatchNorm."""
    for module in model.modules():
        if isinstance(module, nn.Conv2d):
            nn.init.kaiming_normal_(module.weight, mode="fan_in", nonlinearity="relu")
            if module.bias is not None:
                nn.init.zeros_(module.bias)
        elif isinstance(module, nn.BatchNorm2d):
            nn.init.ones_(module.weight)
            nn.init.zeros_(module.bias)
    for module in model.modules():
        if isinstance(module, GatedConv):
            nn.init.zeros_(module.gate_conv.bias)


def build_model(config: ModelConfig, seed: int = 0) -> MattingNet:
    """Construct a network whose parameters depend only on (config, seed)."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        model = MattingNet(config)
        init_weights(model)
    return model

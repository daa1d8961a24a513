"""Strategies that turn the semantic map and the detail map into the final alpha."""

from abc import ABC, abstractmethod
from typing import Type

import torch
from torch import nn

from desk_matting.config import ConfigError
from desk_matting.models import FusionMode, TriClass
from desk_matting.network.encoder import ShapeContractError


class BaseFusion(nn.Module, ABC):
    """Abstract fusion module: (3-class probabilities, detail) -> alpha."""

    mode: FusionMode

    def forward(self, semantic: torch.Tensor, detail: torch.Tensor) -> torch.Tensor:
        if semantic.shape[-2:] != detail.shape[-2:]:
            raise ShapeContractError(
                f"semantic {tuple(semantic.shape)} and detail {tuple(detail.shape)} differ in size"
            )
        return self.fuse(semantic, detail)

    @abstractmethod
    def fuse(self, semantic: torch.Tensor, detail: torch.Tensor) -> torch.Tensor:
        pass


class FusionRegistry:
    """Registry of fusion strategies keyed by mode."""

    _fusions: dict[FusionMode, Type[BaseFusion]] = {}

    @classmethod
    def register(cls, fusion_class: Type[BaseFusion]) -> Type[BaseFusion]:
        """Decorator to register a fusion class."""
        cls._fusions[fusion_class.mode] = fusion_class
        return fusion_class

    @classmethod
    def get(cls, mode: FusionMode | str) -> Type[BaseFusion]:
        try:
            return cls._fusions[FusionMode(mode)]
        except (KeyError, ValueError):
            raise ConfigError(f"unknown fusion mode: {mode!r}") from None

    @classmethod
    def modes(cls) -> list[FusionMode]:
        return list(cls._fusions.keys())


@FusionRegistry.register
class RepFusion(BaseFusion):
    """Argmax class per pixel: FG -> 1, BG -> 0, TR -> detail value."""

    mode = FusionMode.REP

    def fuse(self, semantic: torch.Tensor, detail: torch.Tensor) -> torch.Tensor:
        # argmax returns the first maximal index, so ties resolve FG < BG < TR.
        cls = semantic.argmax(dim=1, keepdim=True)
        ones = torch.ones_like(detail)
        zeros = torch.zeros_like(detail)
        return torch.where(
            cls == int(TriClass.FG),
            ones,
            torch.where(cls == int(TriClass.BG), zeros, detail),
        )


@FusionRegistry.register
class ConvFusion(BaseFusion):
    """1x1 convolution over (detail || semantic) followed by a sigmoid."""

    mode = FusionMode.CONV

    def __init__(self):
        super().__init__()
        self.conv = nn.Conv2d(4, 1, kernel_size=1)

    def fuse(self, semantic: torch.Tensor, detail: torch.Tensor) -> torch.Tensor:
        return torch.sigmoid(self.conv(torch.cat([detail, semantic], dim=1)))


@FusionRegistry.register
class NoFusion(BaseFusion):
    """The detail map is the final alpha."""

    mode = FusionMode.NONE

    def fuse(self, semantic: torch.Tensor, detail: torch.Tensor) -> torch.Tensor:
        return detail

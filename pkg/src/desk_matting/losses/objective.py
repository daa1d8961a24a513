from dataclasses import dataclass

import torch

from desk_matting.datasynth.batch import MattingBatch
from desk_matting.losses.terms import alpha_loss, composition_loss, grad_loss, semantic_loss
from desk_matting.models import DetailRegion, LossConfig, TriClass
from desk_matting.network import ModelOutput

LOSS_COLUMNS = ("iter", "L_s", "L_d", "L_f", "L_total", "lr")


@dataclass
class LossBreakdown:
    """Weighted objective and its unweighted terms (scalar tensors)."""

    semantic: torch.Tensor
    detail: torch.Tensor
    fusion: torch.Tensor
    total: torch.Tensor

    def is_finite(self) -> bool:
        return all(
            bool(torch.isfinite(v.detach()).item()) for v in (self.semantic, self.detail, self.fusion, self.total)
        )

    def as_row(self, iteration: int, lr: float) -> dict[str, float | int]:
        return {
            "iter": iteration,
            "L_s": self.semantic.detach().item(),
            "L_d": self.detail.detach().item(),
            "L_f": self.fusion.detach().item(),
            "L_total": self.total.detach().item(),
            "lr": lr,
        }


def detail_loss(
    detail: torch.Tensor,
    gt: torch.Tensor,
    label: torch.Tensor,
    config: LossConfig,
) -> torch.Tensor:
    if config.detail_region is DetailRegion.ALL:
        mask = None
    else:
        mask = (label == int(TriClass.TR)).unsqueeze(1)
    eps, red = config.epsilon, config.reduction
    return alpha_loss(detail, gt, mask, eps, red) + grad_loss(detail, gt, mask, eps, red)


def fusion_loss(alpha_p: torch.Tensor, batch: MattingBatch, config: LossConfig) -> torch.Tensor:
    eps, red = config.epsilon, config.reduction
    return (
        alpha_loss(alpha_p, batch.alpha, None, eps, red)
        + grad_loss(alpha_p, batch.alpha, None, eps, red)
        + composition_loss(alpha_p, batch.image, batch.fg, batch.bg, eps, red)
    )


def total_loss(output: ModelOutput, batch: MattingBatch, config: LossConfig) -> LossBreakdown:
    """lambda1 * semantic + lambda2 * detail + lambda3 * fusion, with the terms kept for logging."""
    l_s = semantic_loss(output.semantic, batch.label, config.reduction)
    l_d = detail_loss(output.detail, batch.alpha, batch.label, config)
    l_f = fusion_loss(output.alpha, batch, config)
    total = config.lambda1 * l_s + config.lambda2 * l_d + config.lambda3 * l_f
    return LossBreakdown(semantic=l_s, detail=l_d, fusion=l_f, total=total)

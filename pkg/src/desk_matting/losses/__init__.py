from .terms import (
    alpha_loss,
    charbonnier,
    composition_loss,
    grad_loss,
    semantic_loss,
    sobel_magnitude,
)
from .objective import LOSS_COLUMNS, LossBreakdown, detail_loss, fusion_loss, total_loss

__all__ = [
    "alpha_loss",
    "charbonnier",
    "composition_loss",
    "grad_loss",
    "semantic_loss",
    "sobel_magnitude",
    "LOSS_COLUMNS",
    "LossBreakdown",
    "detail_loss",
    "fusion_loss",
    "total_loss",
]

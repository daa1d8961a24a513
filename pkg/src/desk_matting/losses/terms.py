"""Per-term losses over NCHW tensors.

Masks are (B, 1, H, W) tensors of 0/1 (or bools); ``None`` means every pixel.
With ``Reduction.SUM`` a term is the plain sum over masked pixels; with
``Reduction.MEAN`` it is divided by the number of masked pixels.
"""

import torch
import torch.nn.functional as F

from desk_matting.models import Reduction

PROB_FLOOR = 1e-12

SOBEL_X = ((-1.0, 0.0, 1.0), (-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0))


def _as_mask(mask: torch.Tensor | None, like: torch.Tensor) -> torch.Tensor:
    if mask is None:
        return torch.ones_like(like)
    return mask.to(like.dtype).expand_as(like)


def _reduce(per_pixel: torch.Tensor, mask: torch.Tensor, reduction: Reduction) -> torch.Tensor:
    total = (per_pixel * mask).sum()
    if Reduction(reduction) is Reduction.MEAN:
        return total / mask.sum().clamp_min(1.0)
    return total


def charbonnier(x: torch.Tensor, epsilon: float) -> torch.Tensor:
    return torch.sqrt(x * x + epsilon * epsilon)


def sobel_magnitude(alpha: torch.Tensor, epsilon: float = 1e-6) -> torch.Tensor:
    """sqrt(gx^2 + gy^2 + eps^2) of 3x3 Sobel responses, replicate-padded borders."""
    kx = torch.tensor(SOBEL_X, dtype=alpha.dtype, device=alpha.device)
    kernel = torch.stack([kx, kx.t()]).unsqueeze(1)
    padded = F.pad(alpha, (1, 1, 1, 1), mode="replicate")
    g = F.conv2d(padded, kernel)
    return torch.sqrt(g[:, :1] ** 2 + g[:, 1:] ** 2 + epsilon * epsilon)


def alpha_loss(
    pred: torch.Tensor,
    gt: torch.Tensor,
    mask: torch.Tensor | None = None,
    epsilon: float = 1e-6,
    reduction: Reduction = Reduction.SUM,
) -> torch.Tensor:
    return _reduce(charbonnier(pred - gt, epsilon), _as_mask(mask, pred), reduction)


def grad_loss(
    pred: torch.Tensor,
    gt: torch.Tensor,
    mask: torch.Tensor | None = None,
    epsilon: float = 1e-6,
    reduction: Reduction = Reduction.SUM,
) -> torch.Tensor:
    diff = torch.abs(sobel_magnitude(pred, epsilon) - sobel_magnitude(gt, epsilon))
    return _reduce(diff, _as_mask(mask, pred), reduction)


def semantic_loss(
    probs: torch.Tensor,
    label: torch.Tensor,
    reduction: Reduction = Reduction.SUM,
) -> torch.Tensor:
    """Cross-entropy of 3-class probabilities (B, 3, H, W) against labels (B, H, W)."""
    if probs.shape[0] != label.shape[0] or probs.shape[-2:] != label.shape[-2:]:
        raise ValueError(f"probs {tuple(probs.shape)} and label {tuple(label.shape)} differ")
    true_prob = probs.gather(1, label.long().unsqueeze(1))
    nll = -torch.log(true_prob.clamp_min(PROB_FLOOR))
    return _reduce(nll, torch.ones_like(nll), reduction)


def composition_loss(
    alpha_p: torch.Tensor,
    image: torch.Tensor,
    fg: torch.Tensor,
    bg: torch.Tensor,
    epsilon: float = 1e-6,
    reduction: Reduction = Reduction.SUM,
) -> torch.Tensor:
    """Charbonnier distance between the recomposited and the given image, summed over channels."""
    recomposed = alpha_p * fg + (1.0 - alpha_p) * bg
    per_pixel = charbonnier(recomposed - image, epsilon).sum(dim=1, keepdim=True)
    return _reduce(per_pixel, torch.ones_like(per_pixel), reduction)

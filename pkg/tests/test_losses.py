import math
import warnings

import numpy as np
import pytest
import torch

from desk_matting.datasynth import MattingBatch
from desk_matting.losses import (
    LossBreakdown,
    alpha_loss,
    composition_loss,
    detail_loss,
    fusion_loss,
    grad_loss,
    semantic_loss,
    sobel_magnitude,
    total_loss,
)
from desk_matting.models import DetailRegion, LossConfig, Reduction, TriClass
from desk_matting.network import ModelOutput

from oracles import naive_fusion_loss, naive_sobel_magnitude

EPS = 1e-6
F64 = torch.float64


def _alpha(h=8, w=8, seed=0) -> torch.Tensor:
    g = torch.Generator().manual_seed(seed)
    return torch.rand(1, 1, h, w, generator=g, dtype=F64)


def _batch(alpha: torch.Tensor, seed: int = 1) -> MattingBatch:
    g = torch.Generator().manual_seed(seed)
    _, _, h, w = alpha.shape
    fg = torch.rand(1, 3, h, w, generator=g, dtype=F64)
    bg = torch.rand(1, 3, h, w, generator=g, dtype=F64)
    image = alpha * fg + (1 - alpha) * bg
    label = torch.full((1, h, w), int(TriClass.TR), dtype=torch.int64)
    label[alpha[:, 0] == 1.0] = int(TriClass.FG)
    label[alpha[:, 0] == 0.0] = int(TriClass.BG)
    return MattingBatch(image=image, alpha=alpha, fg=fg, bg=bg, label=label)


def _one_hot(label: torch.Tensor) -> torch.Tensor:
    return torch.nn.functional.one_hot(label, 3).permute(0, 3, 1, 2).to(F64)


# semantic


def test_semantic_loss_zero_for_correct_one_hot():
    label = torch.randint(0, 3, (2, 5, 5))
    assert semantic_loss(_one_hot(label), label).item() == 0.0


def test_semantic_loss_uniform():
    label = torch.randint(0, 3, (1, 4, 4))
    probs = torch.full((1, 3, 4, 4), 1 / 3, dtype=F64)
    assert semantic_loss(probs, label).item() == pytest.approx(16 * math.log(3))


def test_semantic_loss_single_pixel_half():
    probs = torch.tensor([0.5, 0.25, 0.25], dtype=F64).view(1, 3, 1, 1)
    label = torch.zeros(1, 1, 1, dtype=torch.int64)
    assert semantic_loss(probs, label).item() == pytest.approx(math.log(2))


def test_semantic_loss_zero_probability_is_floored():
    probs = torch.tensor([0.0, 1.0, 0.0], dtype=F64).view(1, 3, 1, 1)
    label = torch.zeros(1, 1, 1, dtype=torch.int64)
    assert semantic_loss(probs, label).item() == pytest.approx(-math.log(1e-12))


def test_semantic_loss_decreases_with_true_class_probability():
    label = torch.zeros(1, 1, 1, dtype=torch.int64)
    values = []
    for p in (0.1, 0.3, 0.6, 0.9):
        probs = torch.tensor([p, (1 - p) / 2, (1 - p) / 2], dtype=F64).view(1, 3, 1, 1)
        values.append(semantic_loss(probs, label).item())
    assert values == sorted(values, reverse=True)


def test_semantic_loss_mean_reduction():
    label = torch.randint(0, 3, (1, 4, 4))
    probs = torch.full((1, 3, 4, 4), 1 / 3, dtype=F64)
    assert semantic_loss(probs, label, Reduction.MEAN).item() == pytest.approx(math.log(3))


# alpha / gradient


def test_alpha_loss_at_perfect_prediction():
    a = _alpha()
    assert alpha_loss(a, a, epsilon=EPS).item() == pytest.approx(64 * EPS, abs=64e-12)


def test_alpha_loss_single_pixel_values():
    gt = torch.zeros(1, 1, 1, 1, dtype=F64)
    small = alpha_loss(gt + 3e-6, gt, epsilon=EPS).item()
    assert small == pytest.approx(math.sqrt(10) * 1e-6, rel=1e-9)
    assert alpha_loss(gt + 1.0, gt, epsilon=EPS).item() == pytest.approx(1.0)


def test_alpha_loss_respects_mask():
    pred, gt = _alpha(seed=1), _alpha(seed=2)
    mask = torch.zeros_like(pred)
    mask[..., :2, :] = 1
    expected = torch.sqrt((pred - gt) ** 2 + EPS**2)[..., :2, :].sum()
    torch.testing.assert_close(alpha_loss(pred, gt, mask, EPS), expected)


def test_alpha_loss_lower_bound():
    pred, gt = _alpha(seed=3), _alpha(seed=4)
    assert alpha_loss(pred, gt, epsilon=EPS).item() >= 64 * EPS


def test_grad_loss_identical_and_constant():
    a = _alpha()
    assert grad_loss(a, a).item() == 0.0
    c1 = torch.full((1, 1, 6, 6), 0.3, dtype=F64)
    c2 = torch.full((1, 1, 6, 6), 0.8, dtype=F64)
    assert grad_loss(c1, c2).item() == pytest.approx(0.0, abs=1e-15)


def test_sobel_constant_is_zero_at_borders():
    mag = sobel_magnitude(torch.full((1, 1, 5, 5), 0.4, dtype=F64), epsilon=0.0)
    assert mag.abs().max().item() < 1e-12


def test_grad_loss_ramp_matches_naive_sobel():
    ramp = torch.linspace(0, 1, 5, dtype=F64).repeat(5, 1).view(1, 1, 5, 5)
    flat = torch.full_like(ramp, 0.5)
    interior = torch.zeros_like(ramp)
    interior[..., 1:4, 1:4] = 1

    mag_ramp = naive_sobel_magnitude(ramp[0, 0].numpy())
    mag_flat = naive_sobel_magnitude(flat[0, 0].numpy())
    expected = np.abs(mag_ramp - mag_flat)[1:4, 1:4].sum()
    assert grad_loss(ramp, flat, interior).item() == pytest.approx(expected, rel=1e-12)
    # interior Sobel response of a unit-step ramp is 8 * 0.25
    assert mag_ramp[2, 2] == pytest.approx(2.0, rel=1e-9)


# detail / composition / fusion


def test_detail_loss_empty_transition_is_zero():
    alpha = torch.zeros(1, 1, 6, 6, dtype=F64)
    alpha[..., :, 3:] = 1.0
    batch = _batch(alpha)
    config = LossConfig()
    assert detail_loss(alpha * 0.5, alpha, batch.label, config).item() == 0.0


def test_detail_loss_perfect_on_transition():
    alpha = _alpha()
    batch = _batch(alpha)
    n_tr = int((batch.label == int(TriClass.TR)).sum())
    value = detail_loss(alpha, alpha, batch.label, LossConfig()).item()
    assert value == pytest.approx(n_tr * EPS, abs=1e-12)


def test_detail_loss_all_region_is_full_image():
    pred, gt = _alpha(seed=5), _alpha(seed=6)
    label = torch.full((1, 8, 8), int(TriClass.BG))
    config = LossConfig(detail_region=DetailRegion.ALL)
    expected = alpha_loss(pred, gt, None, EPS) + grad_loss(pred, gt, None, EPS)
    torch.testing.assert_close(detail_loss(pred, gt, label, config), expected)


def test_composition_loss_at_perfect_prediction():
    alpha = _alpha()
    batch = _batch(alpha)
    value = composition_loss(alpha, batch.image, batch.fg, batch.bg, EPS).item()
    assert value == pytest.approx(3 * 64 * EPS, abs=1e-10)


def test_composition_loss_opposite_alpha():
    ones = torch.ones(1, 3, 4, 4, dtype=F64)
    value = composition_loss(torch.zeros(1, 1, 4, 4, dtype=F64), ones, ones, 0 * ones, EPS).item()
    assert value == pytest.approx(3 * 16, rel=1e-9)


def test_composition_loss_ignores_alpha_when_fg_equals_bg():
    fg = torch.rand(1, 3, 4, 4, dtype=F64)
    a = composition_loss(torch.rand(1, 1, 4, 4, dtype=F64), fg, fg, fg, EPS).item()
    assert a == pytest.approx(3 * 16 * EPS, abs=1e-12)


def test_fusion_loss_at_perfect_prediction():
    alpha = _alpha()
    batch = _batch(alpha)
    assert fusion_loss(alpha, batch, LossConfig()).item() == pytest.approx(4 * 64 * EPS, abs=1e-10)


@pytest.mark.parametrize("seed", range(3))
def test_fusion_loss_matches_naive_loop(seed):
    gt = _alpha(seed=seed)
    pred = _alpha(seed=seed + 10)
    batch = _batch(gt, seed=seed + 20)
    expected = naive_fusion_loss(
        pred[0, 0].numpy(),
        gt[0, 0].numpy(),
        batch.image[0].permute(1, 2, 0).numpy(),
        batch.fg[0].permute(1, 2, 0).numpy(),
        batch.bg[0].permute(1, 2, 0).numpy(),
        EPS,
    )
    assert fusion_loss(pred, batch, LossConfig()).item() == pytest.approx(expected, rel=1e-10)


def test_mean_reduction_divides_by_mask_size():
    pred, gt = _alpha(seed=7), _alpha(seed=8)
    mask = torch.zeros_like(pred)
    mask[..., 0, :] = 1
    total = alpha_loss(pred, gt, mask, EPS, Reduction.SUM)
    mean = alpha_loss(pred, gt, mask, EPS, Reduction.MEAN)
    torch.testing.assert_close(mean, total / 8)


# total


def _output(batch: MattingBatch, seed=0) -> ModelOutput:
    g = torch.Generator().manual_seed(seed)
    _, _, h, w = batch.alpha.shape
    semantic = torch.softmax(torch.randn(1, 3, h, w, generator=g, dtype=F64), dim=1)
    detail = torch.rand(1, 1, h, w, generator=g, dtype=F64)
    alpha = torch.rand(1, 1, h, w, generator=g, dtype=F64)
    return ModelOutput(semantic=semantic, detail=detail, alpha=alpha)


def test_total_loss_weighting_and_linearity():
    batch = _batch(_alpha())
    out = _output(batch)
    plain = total_loss(out, batch, LossConfig())
    torch.testing.assert_close(plain.total, plain.semantic + plain.detail + plain.fusion)

    only_fusion = total_loss(out, batch, LossConfig(lambda1=0, lambda2=0, lambda3=1))
    torch.testing.assert_close(only_fusion.total, fusion_loss(out.alpha, batch, LossConfig()))

    doubled = total_loss(out, batch, LossConfig(lambda1=2, lambda2=2, lambda3=2))
    torch.testing.assert_close(doubled.total, 2 * plain.total)

    weights = LossConfig(lambda1=0.5, lambda2=3.0, lambda3=0.25)
    mixed = total_loss(out, batch, weights)
    torch.testing.assert_close(
        mixed.total, 0.5 * plain.semantic + 3.0 * plain.detail + 0.25 * plain.fusion
    )


def test_loss_breakdown_row():
    batch = _batch(_alpha())
    row = total_loss(_output(batch), batch, LossConfig()).as_row(12, 0.005)
    assert list(row) == ["iter", "L_s", "L_d", "L_f", "L_total", "lr"]
    assert row["iter"] == 12 and row["lr"] == 0.005
    assert all(v >= 0 for v in row.values())


def test_loss_breakdown_is_finite_without_warnings():
    ok = torch.tensor(0.5, requires_grad=True) * 2
    bad = torch.tensor(float("nan"), requires_grad=True) * 2
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert LossBreakdown(ok, ok, ok, ok).is_finite()
        assert not LossBreakdown(ok, bad, ok, ok).is_finite()
        assert not LossBreakdown(ok, ok, ok, ok * float("inf")).is_finite()
        assert LossBreakdown(ok, ok, ok, ok).as_row(1, 0.1)["L_total"] == 1.0


def _ramp(seed: int, size: int = 8, noise: float = 0.01) -> torch.Tensor:
    # steep horizontal ramp: Sobel magnitudes stay well away from zero
    g = torch.Generator().manual_seed(seed)
    ramp = torch.linspace(0, 0.6, size, dtype=F64).repeat(size, 1)
    return (ramp + noise * torch.rand(size, size, generator=g, dtype=F64)).view(1, 1, size, size)


def _separated_batch(alpha: torch.Tensor, seed: int) -> MattingBatch:
    g = torch.Generator().manual_seed(seed)
    _, _, h, w = alpha.shape
    fg = 0.7 + 0.3 * torch.rand(1, 3, h, w, generator=g, dtype=F64)
    bg = 0.3 * torch.rand(1, 3, h, w, generator=g, dtype=F64)
    image = alpha * fg + (1 - alpha) * bg
    label = torch.full((1, h, w), int(TriClass.TR), dtype=torch.int64)
    return MattingBatch(image=image, alpha=alpha, fg=fg, bg=bg, label=label)


def _gradcheck(fn, *inputs) -> bool:
    return torch.autograd.gradcheck(fn, inputs, eps=1e-4, atol=1e-6, rtol=1e-3)


@pytest.mark.parametrize("seed", range(5))
def test_loss_gradients_match_finite_differences(seed):
    gt = _ramp(seed + 100)
    batch = _separated_batch(gt, seed)
    noise = 0.005 * torch.rand(gt.shape, generator=torch.Generator().manual_seed(seed), dtype=F64)
    pred = (gt + 0.1 + noise).requires_grad_(True)

    assert _gradcheck(lambda p: alpha_loss(p, gt, None, EPS), pred)
    assert _gradcheck(lambda p: composition_loss(p, batch.image, batch.fg, batch.bg, EPS), pred)
    assert _gradcheck(lambda p: grad_loss(p, 0.2 * gt, None, EPS), pred)

    logits = torch.randn(1, 3, 8, 8, dtype=F64, generator=torch.Generator().manual_seed(seed))
    logits.requires_grad_(True)
    assert _gradcheck(lambda z: semantic_loss(torch.softmax(z, dim=1), batch.label), logits)


def test_total_loss_gradients_match_finite_differences():
    gt = _ramp(0)
    batch = _separated_batch(gt, 1)
    logits = torch.randn(1, 3, 8, 8, dtype=F64, generator=torch.Generator().manual_seed(3))
    logits.requires_grad_(True)
    detail = (1.5 * gt + 0.1).requires_grad_(True)

    def fn(z, d):
        semantic = torch.softmax(z, dim=1)
        out = ModelOutput(semantic=semantic, detail=d, alpha=d)
        return total_loss(out, batch, LossConfig(detail_region=DetailRegion.ALL)).total

    assert _gradcheck(fn, logits, detail)

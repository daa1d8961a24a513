import csv
import math
from dataclasses import replace

import numpy as np
import pytest
import torch
from PIL import Image
from pydantic import ValidationError

from desk_matting.config import ConfigError
from desk_matting.datasynth import assemble_dataset
from desk_matting.harness import (
    REFERENCE_ROWS,
    TrainingDivergedError,
    ablate,
    calibrate_batchnorm,
    effective_loss_config,
    evaluate_checkpoint,
    evaluate_predictor,
    infer,
    make_optimizer,
    pad_to_multiple,
    poly_lr,
    predict_alpha,
    sample_batch,
    train,
    train_step,
    variant_config,
    variant_label,
)
from desk_matting.models import (
    AblationAxis,
    AblationSpec,
    DetailRegion,
    FusionMode,
    LossConfig,
    SynthConfig,
    TrainConfig,
)
from desk_matting.network import build_model
from desk_matting.services import DatasetMissingError, DatasetStore, load_checkpoint, write_image


# schedule


def test_poly_lr_endpoints_and_midpoint():
    config = TrainConfig(max_iters=100)
    assert poly_lr(0, config) == pytest.approx(0.01)
    assert poly_lr(100, config) == 0.0
    assert poly_lr(50, config) == pytest.approx(0.01 * 0.5**0.9)


def test_poly_lr_strictly_decreasing():
    config = TrainConfig(max_iters=50)
    values = [poly_lr(i, config) for i in range(51)]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("iteration", [-1, 101])
def test_poly_lr_out_of_range(iteration):
    with pytest.raises(ConfigError):
        poly_lr(iteration, TrainConfig(max_iters=100))


def test_checkpoint_interval_defaults_to_a_tenth():
    assert TrainConfig(max_iters=2000).checkpoint_interval == 200
    assert TrainConfig(max_iters=5).checkpoint_interval == 1
    assert TrainConfig(max_iters=5, checkpoint_every=2).checkpoint_interval == 2


def test_batch_of_one_needs_spatial_extent_at_deepest_scale():
    with pytest.raises(ValidationError, match="BatchNorm"):
        TrainConfig(batch_size=1, synth=SynthConfig(base_size=32, crop_sizes=[32]))
    assert TrainConfig(batch_size=1, synth=SynthConfig(base_size=64, crop_sizes=[64])).batch_size == 1
    assert TrainConfig(batch_size=2, synth=SynthConfig(base_size=32, crop_sizes=[32])).batch_size == 2


# training


def test_zero_learning_rate_leaves_parameters_unchanged(tiny_train_config):
    samples = DatasetStore(tiny_train_config.dataset_dir).load("train")
    model = build_model(tiny_train_config.model)
    optimizer = make_optimizer(model, tiny_train_config)
    before = {k: v.clone() for k, v in model.named_parameters()}
    batch = sample_batch(samples, tiny_train_config, 0)

    train_step(model, optimizer, batch, tiny_train_config.loss, lr=0.0)

    for name, param in model.named_parameters():
        assert torch.equal(param, before[name]), name


def test_train_step_changes_parameters(tiny_train_config):
    samples = DatasetStore(tiny_train_config.dataset_dir).load("train")
    model = build_model(tiny_train_config.model)
    optimizer = make_optimizer(model, tiny_train_config)
    before = model.hrdb.head.weight.clone()
    breakdown = train_step(model, optimizer, sample_batch(samples, tiny_train_config, 0), tiny_train_config.loss, lr=0.01)
    assert breakdown.is_finite()
    assert not torch.equal(model.hrdb.head.weight, before)


def test_calibrated_batchnorm_matches_train_mode(tiny_train_config):
    samples = DatasetStore(tiny_train_config.dataset_dir).load("train")
    model = build_model(tiny_train_config.model, seed=1).eval()
    batch = sample_batch(samples, tiny_train_config, 0)

    calibrate_batchnorm(model, [batch])
    assert not model.training

    with torch.no_grad():
        evaluated = model(batch.image).alpha
        model.train()
        trained = model(batch.image).alpha
    torch.testing.assert_close(evaluated, trained, rtol=1e-3, atol=1e-4)


def test_batchnorm_calibration_pools_batches(tiny_train_config):
    samples = DatasetStore(tiny_train_config.dataset_dir).load("train")
    model = build_model(tiny_train_config.model, seed=1)
    batches = [sample_batch(samples, tiny_train_config, i) for i in range(2)]

    calibrate_batchnorm(model, batches)

    # the stem sees raw images, so its statistics are those of the concatenated inputs
    stem = model.encoder.stem_half
    with torch.no_grad():
        features = stem[0](torch.cat([b.image for b in batches]))
    var, mean = torch.var_mean(features, dim=(0, 2, 3), correction=0)
    torch.testing.assert_close(stem[1].running_mean, mean, rtol=1e-4, atol=1e-5)
    torch.testing.assert_close(stem[1].running_var, var, rtol=1e-4, atol=1e-5)


def test_non_finite_loss_aborts(tiny_train_config):
    samples = DatasetStore(tiny_train_config.dataset_dir).load("train")
    model = build_model(tiny_train_config.model)
    with torch.no_grad():
        model.hrdb.head.bias.fill_(float("nan"))
    optimizer = make_optimizer(model, tiny_train_config)
    with pytest.raises(TrainingDivergedError, match="iteration 3"):
        train_step(model, optimizer, sample_batch(samples, tiny_train_config, 0), tiny_train_config.loss, 0.01, 3)


def test_sample_batch_is_deterministic(tiny_train_config):
    samples = DatasetStore(tiny_train_config.dataset_dir).load("train")
    a = sample_batch(samples, tiny_train_config, 5)
    b = sample_batch(samples, tiny_train_config, 5)
    assert torch.equal(a.image, b.image)
    assert a.image.shape == (2, 3, 64, 64)


def test_single_iteration_run(tiny_train_config, tmp_path):
    config = tiny_train_config.model_copy(update={"max_iters": 1})
    calls = []
    result = train(config, tmp_path / "run", on_iteration=lambda i, b, lr: calls.append(i))

    assert calls == [1]
    assert result.iterations == 1
    assert load_checkpoint(result.final_checkpoint).iteration == 1
    assert (tmp_path / "run" / "checkpoints" / "iter_000001").is_dir()

    with result.loss_log.open() as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == ["iter", "L_s", "L_d", "L_f", "L_total", "lr"]
    assert len(rows) == 1
    assert float(rows[0]["lr"]) == pytest.approx(0.01)


def test_checkpoints_and_evaluations(tiny_train_config, tmp_path):
    config = tiny_train_config.model_copy(update={"max_iters": 4, "checkpoint_every": 2})
    result = train(config, tmp_path / "run")
    names = sorted(p.name for p in (tmp_path / "run" / "checkpoints").iterdir())
    assert names == ["final", "iter_000002", "iter_000004"]
    assert sorted(result.evaluations) == [2, 4]
    assert (tmp_path / "run" / "eval_iter_000004.csv").exists()
    for report in result.evaluations.values():
        assert all(math.isfinite(v) and v >= 0 for v in (report.sad, report.mse, report.grad, report.conn))


def test_training_is_reproducible(tiny_train_config, tmp_path):
    a = train(tiny_train_config, tmp_path / "a")
    b = train(tiny_train_config, tmp_path / "b")
    assert a.loss_log.read_text() == b.loss_log.read_text()

    ckpt_a = load_checkpoint(a.final_checkpoint)
    ckpt_b = load_checkpoint(b.final_checkpoint)
    for (name, pa), (_, pb) in zip(ckpt_a.model.state_dict().items(), ckpt_b.model.state_dict().items()):
        assert torch.equal(pa, pb), name


def test_missing_dataset_is_reported(tiny_train_config, tmp_path):
    config = tiny_train_config.model_copy(update={"dataset_dir": tmp_path / "none"})
    with pytest.raises(DatasetMissingError):
        train(config, tmp_path / "run")


def test_no_fusion_supervises_detail_everywhere(tiny_train_config):
    model = tiny_train_config.model.model_copy(update={"fusion_mode": FusionMode.NONE})
    config = tiny_train_config.model_copy(update={"model": model})
    assert effective_loss_config(config).detail_region is DetailRegion.ALL
    assert effective_loss_config(tiny_train_config).detail_region is DetailRegion.TRANSITION_ONLY


# evaluation / inference


def test_pad_to_multiple_reflects():
    image = np.random.default_rng(0).random((33, 40, 3))
    padded = pad_to_multiple(image)
    assert padded.shape == (64, 64, 3)
    np.testing.assert_array_equal(padded[:33, :40], image)
    np.testing.assert_array_equal(padded[33, :40], image[31])
    np.testing.assert_array_equal(padded[:33, 40], image[:, 38])


def test_predict_alpha_keeps_original_size(tiny_model_config):
    model = build_model(tiny_model_config)
    alpha = predict_alpha(model, np.random.default_rng(0).random((100, 100, 3)))
    assert alpha.shape == (100, 100)
    assert alpha.min() >= 0 and alpha.max() <= 1
    assert model.training


def test_oracle_predictor_scores_zero(dataset_dir):
    samples = DatasetStore(dataset_dir).load("test")
    lookup = {s.image.tobytes(): s.alpha for s in samples}
    report = evaluate_predictor(lambda image: lookup[image.tobytes()], samples)
    assert (report.sad, report.mse, report.grad, report.conn) == (0.0, 0.0, 0.0, 0.0)


def test_constant_predictor_on_binary_alpha(dataset_dir):
    samples = DatasetStore(dataset_dir).load("test")
    binary = [replace(s, alpha=(s.alpha > 0.5).astype(np.float64)) for s in samples]
    report = evaluate_predictor(lambda image: np.full(image.shape[:2], 0.5), binary)
    n = binary[0].alpha.size
    assert report.sad == pytest.approx(0.5 * n / 1000)
    assert report.mse == pytest.approx(0.25)


def test_evaluate_checkpoint_writes_csv(tiny_train_config, tmp_path):
    config = tiny_train_config.model_copy(update={"max_iters": 1, "eval_at_checkpoints": False})
    result = train(config, tmp_path / "run")
    report = evaluate_checkpoint(result.final_checkpoint, config.dataset_dir, tmp_path / "eval.csv")
    assert report.count == len(DatasetStore(config.dataset_dir).load("test"))
    assert all(math.isfinite(v) and v >= 0 for v in (report.sad, report.mse, report.grad, report.conn))
    assert (tmp_path / "eval.csv").read_text().strip().splitlines()[-1].startswith("mean,")


def test_infer_writes_alpha_and_taps(tiny_train_config, tmp_path):
    config = tiny_train_config.model_copy(update={"max_iters": 1, "eval_at_checkpoints": False})
    result = train(config, tmp_path / "run")
    image_path = tmp_path / "input.png"
    write_image(image_path, np.random.default_rng(1).random((100, 100, 3)))

    written = infer(result.final_checkpoint, image_path, tmp_path / "alpha.png", export_taps=True)

    with Image.open(written[0]) as img:
        assert img.size == (100, 100)
        assert img.mode == "L"
    names = sorted(p.stem for p in written[1:])
    assert names == ["g1", "g2", "g3", "s1", "s2", "s3", "s4", "s5"]


# ablation


def test_variant_labels():
    assert variant_label(AblationAxis.GUIDANCE_TAPS, []) == "w/o GF"
    assert variant_label(AblationAxis.GUIDANCE_TAPS, [5]) == "5"
    assert variant_label(AblationAxis.GUIDANCE_TAPS, [5, 3, 1]) == "1, 3, 5"
    assert variant_label(AblationAxis.FUSION_MODE, FusionMode.CONV) == "Conv FM"
    assert REFERENCE_ROWS["1, 3, 5"][0] == 50.79


def test_guidance_variants_share_stacked_layout():
    spec = AblationSpec(axis=AblationAxis.GUIDANCE_TAPS, variants=[[], [1, 2, 3, 4, 5]])
    config = variant_config(spec, [1, 2, 3, 4, 5])
    assert config.model.guidance_taps == (1, 2, 3, 4, 5)
    assert config.model.stack_excess_taps


def test_ablation_spec_needs_two_variants():
    with pytest.raises(ValueError):
        AblationSpec(axis=AblationAxis.FUSION_MODE, variants=[FusionMode.REP])
    with pytest.raises(ValueError):
        AblationSpec(axis=AblationAxis.FUSION_MODE, variants=[[1], [3]])


def test_fusion_ablation_table(tiny_train_config, tmp_path):
    train_config = tiny_train_config.model_copy(update={"max_iters": 1, "eval_at_checkpoints": False})
    spec = AblationSpec(
        axis=AblationAxis.FUSION_MODE,
        variants=[FusionMode.NONE, FusionMode.CONV, FusionMode.REP],
        train=train_config,
    )
    table = ablate(spec, tmp_path / "ablate")
    assert [r.label for r in table.rows] == ["w/o FM", "Conv FM", "Rep FM"]
    for row in table.rows:
        assert row.reference is not None
        assert all(math.isfinite(v) for v in (row.report.sad, row.report.mse, row.report.grad, row.report.conn))
    text = (tmp_path / "ablate" / "ablation.txt").read_text()
    assert "50.79" in text
    assert (tmp_path / "ablate" / "ablation.csv").exists()


def test_ablation_is_deterministic(tiny_train_config, tmp_path):
    train_config = tiny_train_config.model_copy(update={"max_iters": 1, "eval_at_checkpoints": False})
    spec = AblationSpec(axis=AblationAxis.GUIDANCE_TAPS, variants=[[], [5]], train=train_config)
    first = ablate(spec, tmp_path / "one")
    second = ablate(spec, tmp_path / "two")
    assert first == second


@pytest.mark.slow
def test_guidance_ablation_rows(tiny_train_config, tmp_path):
    train_config = tiny_train_config.model_copy(update={"max_iters": 200, "eval_at_checkpoints": False})
    spec = AblationSpec(
        axis=AblationAxis.GUIDANCE_TAPS,
        variants=[[], [5], [1, 3, 5], [1, 2, 3, 4, 5]],
        train=train_config,
    )
    table = ablate(spec, tmp_path / "ablate")
    assert [r.label for r in table.rows] == ["w/o GF", "5", "1, 3, 5", "1, 2, 3, 4, 5"]
    assert all(math.isfinite(r.report.sad) for r in table.rows)
    assert [r.reference for r in table.rows] == [REFERENCE_ROWS[r.label] for r in table.rows]
    assert min(r.report.sad for r in table.rows[1:]) <= 1.2 * table.rows[0].report.sad


@pytest.mark.slow
def test_toy_run_overfits(tmp_path, small_synth_config):
    synth = small_synth_config.model_copy(
        update={
            "num_fg_train": 1,
            "bg_per_fg_train": 4,
            "distort_prob": 0.0,
            "blur_prob": 0.0,
            "flip_prob": 0.0,
        }
    )
    assemble_dataset(synth, tmp_path / "data")
    config = TrainConfig(
        max_iters=2000,
        batch_size=4,
        dataset_dir=tmp_path / "data",
        eval_at_checkpoints=False,
        loss=LossConfig(reduction="mean"),
        synth=synth,
    )
    result = train(config, tmp_path / "run")
    losses = [row["L_total"] for row in result.history]
    assert losses[-1] < 0.05 * losses[9]

    samples = DatasetStore(tmp_path / "data").load("train")
    for sample in samples:
        pred = predict_alpha(result.model, sample.image)
        assert float(((pred - sample.alpha) ** 2).mean()) < 0.01

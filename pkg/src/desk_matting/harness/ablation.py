"""Train and evaluate each variant of one ablation axis under a shared budget."""

import csv
from pathlib import Path

from tqdm import tqdm

from desk_matting.config import get_settings, logger
from desk_matting.harness.evaluation import evaluate_predictor, predict_alpha
from desk_matting.harness.trainer import log_time, train
from desk_matting.models import (
    AblationAxis,
    AblationRow,
    AblationSpec,
    AblationTable,
    FusionMode,
    ModelConfig,
    TrainConfig,
)
from desk_matting.services import DatasetStore

# Published SAD / MSE / Grad / Conn per variant, printed next to measured rows.
REFERENCE_ROWS: dict[str, tuple[float, float, float, float]] = {
    "w/o GF": (52.52, 0.0118, 54.22, 53.42),
    "5": (51.07, 0.0119, 53.12, 51.88),
    "1, 3, 5": (50.79, 0.0113, 52.99, 51.40),
    "1, 2, 3, 4, 5": (49.55, 0.0116, 53.20, 50.67),
    "w/o FM": (58.71, 0.0156, 67.81, 60.58),
    "Conv FM": (51.82, 0.0124, 53.39, 53.16),
    "Rep FM": (50.79, 0.0113, 52.99, 51.40),
}

_FUSION_LABELS = {
    FusionMode.NONE: "w/o FM",
    FusionMode.CONV: "Conv FM",
    FusionMode.REP: "Rep FM",
}

ABLATION_CSV = "ablation.csv"
ABLATION_TXT = "ablation.txt"


def variant_label(axis: AblationAxis, variant: list[int] | FusionMode) -> str:
    if axis is AblationAxis.FUSION_MODE:
        return _FUSION_LABELS[FusionMode(variant)]
    if not variant:
        return "w/o GF"
    return ", ".join(str(t) for t in sorted(variant))


def variant_slug(label: str) -> str:
    return label.replace("w/o ", "no_").replace(", ", "_").replace(" ", "_").lower()


def variant_config(spec: AblationSpec, variant: list[int] | FusionMode) -> TrainConfig:
    """Shared training config with one model setting swapped."""
    if spec.axis is AblationAxis.FUSION_MODE:
        update = {"fusion_mode": FusionMode(variant)}
    else:
        # every guidance row shares the stacked detail-branch layout
        update = {"guidance_taps": tuple(variant), "stack_excess_taps": True}
    model = ModelConfig.model_validate({**spec.train.model.model_dump(), **update})
    return spec.train.model_copy(update={"model": model})


def write_ablation_csv(path: Path, table: AblationTable) -> None:
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["variant", "SAD", "MSE", "Grad", "Conn", "ref_SAD", "ref_MSE", "ref_Grad", "ref_Conn"])
        for row in table.rows:
            r = row.report
            ref = list(row.reference) if row.reference is not None else ["", "", "", ""]
            writer.writerow([row.label, r.sad, r.mse, r.grad, r.conn, *ref])


def ablate(spec: AblationSpec, out_dir: Path) -> AblationTable:
    """One row per variant; each trained from the same seed and evaluated on the test split."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    test_samples = DatasetStore(spec.train.dataset_dir).load("test")
    table = AblationTable(axis=spec.axis.value)

    for variant in tqdm(spec.variants, desc=f"ablate {spec.axis.value}", disable=not get_settings().progress):
        label = variant_label(spec.axis, variant)
        run_dir = out_dir / variant_slug(label)
        config = variant_config(spec, variant)
        with log_time(f"variant {label}"):
            result = train(config, run_dir)
        report = evaluate_predictor(
            lambda image: predict_alpha(result.model, image),
            test_samples,
            run_dir / "eval_final.csv",
        )
        logger.info(f"{label}: SAD={report.sad:.4f} MSE={report.mse:.5f} Grad={report.grad:.4f} Conn={report.conn:.4f}")
        table.rows.append(AblationRow(label=label, report=report, reference=REFERENCE_ROWS.get(label)))

    write_ablation_csv(out_dir / ABLATION_CSV, table)
    (out_dir / ABLATION_TXT).write_text(table.format() + "\n", encoding="utf-8")
    return table

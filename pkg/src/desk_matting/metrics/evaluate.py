import csv
from pathlib import Path

import numpy as np

from desk_matting.metrics.registry import MetricRegistry
from desk_matting.models import MetricReport

CSV_COLUMNS = ("image_id", *(metric_cls.column for metric_cls in MetricRegistry.all()))


def metrics_row(image_id: str, report: MetricReport) -> dict[str, str | float]:
    return {"image_id": image_id, **{m.column: getattr(report, m.key) for m in MetricRegistry.all()}}


def score_pair(pred: np.ndarray, gt: np.ndarray) -> MetricReport:
    """All registered metrics for one prediction."""
    values = {metric_cls.key: metric_cls().compute(pred, gt) for metric_cls in MetricRegistry.all()}
    return MetricReport(**values)


def mean_report(reports: list[MetricReport]) -> MetricReport:
    if not reports:
        raise ValueError("cannot average an empty set of reports")
    return MetricReport(
        sad=float(np.mean([r.sad for r in reports])),
        mse=float(np.mean([r.mse for r in reports])),
        grad=float(np.mean([r.grad for r in reports])),
        conn=float(np.mean([r.conn for r in reports])),
        count=len(reports),
    )


def evaluate_per_image(preds: list[np.ndarray], gts: list[np.ndarray]) -> list[MetricReport]:
    if len(preds) != len(gts):
        raise ValueError(f"got {len(preds)} predictions for {len(gts)} ground truths")
    if not preds:
        raise ValueError("nothing to evaluate")
    return [score_pair(p, g) for p, g in zip(preds, gts)]


def evaluate(preds: list[np.ndarray], gts: list[np.ndarray]) -> MetricReport:
    """Per-image metrics averaged over an aligned set."""
    return mean_report(evaluate_per_image(preds, gts))


def write_metrics_csv(
    path: Path,
    image_ids: list[str],
    reports: list[MetricReport],
) -> MetricReport:
    """One row per image and a final ``mean`` row; returns the mean."""
    mean = mean_report(reports)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for image_id, report in zip(image_ids, reports, strict=True):
            writer.writerow(metrics_row(image_id, report))
        writer.writerow(metrics_row("mean", mean))
    return mean

from .matting import (
    conn_metric,
    connectivity_levels,
    gaussian_derivative_kernels,
    grad_metric,
    gradient_magnitude,
    largest_component,
    mse,
    sad,
)
from .registry import BaseMetric, ConnMetric, GradMetric, MetricRegistry, MSEMetric, SADMetric
from .evaluate import (
    CSV_COLUMNS,
    evaluate,
    evaluate_per_image,
    mean_report,
    metrics_row,
    score_pair,
    write_metrics_csv,
)

__all__ = [
    "conn_metric",
    "connectivity_levels",
    "gaussian_derivative_kernels",
    "grad_metric",
    "gradient_magnitude",
    "largest_component",
    "mse",
    "sad",
    "BaseMetric",
    "ConnMetric",
    "GradMetric",
    "MetricRegistry",
    "MSEMetric",
    "SADMetric",
    "CSV_COLUMNS",
    "evaluate",
    "evaluate_per_image",
    "mean_report",
    "metrics_row",
    "score_pair",
    "write_metrics_csv",
]

from abc import ABC, abstractmethod
from typing import Type

import numpy as np

from desk_matting.config import get_settings
from desk_matting.metrics.matting import conn_metric, grad_metric, mse, sad


class BaseMetric(ABC):
    """A per-image matting error; ``key`` names the MetricReport field it fills."""

    key: str = "base"
    column: str = "Base"

    @abstractmethod
    def compute(self, pred: np.ndarray, gt: np.ndarray) -> float:
        pass


class MetricRegistry:
    """Registry of metrics, evaluated in registration order."""

    _metrics: dict[str, Type[BaseMetric]] = {}

    @classmethod
    def register(cls, metric_class: Type[BaseMetric]) -> Type[BaseMetric]:
        """Decorator to register a metric class."""
        cls._metrics[metric_class.key] = metric_class
        return metric_class

    @classmethod
    def all(cls) -> list[Type[BaseMetric]]:
        return list(cls._metrics.values())

    @classmethod
    def keys(cls) -> list[str]:
        return list(cls._metrics.keys())


@MetricRegistry.register
class SADMetric(BaseMetric):
    key = "sad"
    column = "SAD"

    def compute(self, pred: np.ndarray, gt: np.ndarray) -> float:
        return sad(pred, gt)


@MetricRegistry.register
class MSEMetric(BaseMetric):
    key = "mse"
    column = "MSE"

    def compute(self, pred: np.ndarray, gt: np.ndarray) -> float:
        return mse(pred, gt)


@MetricRegistry.register
class GradMetric(BaseMetric):
    key = "grad"
    column = "Grad"

    def __init__(self, sigma: float | None = None):
        self.sigma = sigma if sigma is not None else get_settings().grad_sigma

    def compute(self, pred: np.ndarray, gt: np.ndarray) -> float:
        return grad_metric(pred, gt, self.sigma)


@MetricRegistry.register
class ConnMetric(BaseMetric):
    key = "conn"
    column = "Conn"

    def __init__(self, step: float | None = None, tolerance: float | None = None):
        settings = get_settings()
        self.step = step if step is not None else settings.conn_step
        self.tolerance = tolerance if tolerance is not None else settings.conn_tolerance

    def compute(self, pred: np.ndarray, gt: np.ndarray) -> float:
        return conn_metric(pred, gt, self.step, self.tolerance)

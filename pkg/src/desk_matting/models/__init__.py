from .sample import (
    FLOAT_TOLERANCE,
    LABEL_PNG_CODES,
    RasterError,
    Sample,
    TriClass,
    check_same_size,
    validate_alpha,
    validate_image,
    validate_label,
)
from .configs import (
    AblationAxis,
    AblationSpec,
    DetailRegion,
    FusionMode,
    LossConfig,
    ModelConfig,
    Reduction,
    SynthConfig,
    TrainConfig,
)
from .report import AblationRow, AblationTable, MetricReport

__all__ = [
    "FLOAT_TOLERANCE",
    "LABEL_PNG_CODES",
    "RasterError",
    "Sample",
    "TriClass",
    "check_same_size",
    "validate_alpha",
    "validate_image",
    "validate_label",
    "AblationAxis",
    "AblationSpec",
    "DetailRegion",
    "FusionMode",
    "LossConfig",
    "ModelConfig",
    "Reduction",
    "SynthConfig",
    "TrainConfig",
    "AblationRow",
    "AblationTable",
    "MetricReport",
]

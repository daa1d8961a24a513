"""Experiment configuration documents.

Every field documents its default and where the value comes from. Documents
are stored as JSON and parsed with ``model_validate_json``.
"""

from enum import Enum
from pathlib import Path

from pydantic import BaseModel, Field, field_validator, model_validator


class FusionMode(str, Enum):
    REP = "rep"
    CONV = "conv"
    NONE = "none"


class DetailRegion(str, Enum):
    TRANSITION_ONLY = "transition_only"
    ALL = "all"


class Reduction(str, Enum):
    SUM = "sum"
    MEAN = "mean"


class AblationAxis(str, Enum):
    GUIDANCE_TAPS = "guidance_taps"
    FUSION_MODE = "fusion_mode"


MAX_GUIDANCE_SLOTS = 3
SCB_BLOCKS = 5


class SynthConfig(BaseModel):
    """Dataset synthesis and augmentation settings."""

    seed: int = Field(default=0, description="Global seed (default 0).")
    num_fg_train: int = Field(default=4, gt=0, description="Training foregrounds (desk default 4; published protocol 431/596).")
    num_fg_test: int = Field(default=2, gt=0, description="Test foregrounds (desk default 2; published protocol 50).")
    bg_per_fg_train: int = Field(default=4, gt=0, description="Backgrounds per training foreground (published protocol 100).")
    bg_per_fg_test: int = Field(default=2, gt=0, description="Backgrounds per test foreground (published protocol 20).")
    image_size: int = Field(default=96, ge=32, description="Side of each synthesized composite in pixels (desk default 96).")
    base_size: int = Field(default=64, ge=32, description="Training resolution after augmentation (desk 64; published 512).")
    crop_sizes: list[int] = Field(default_factory=lambda: [64, 80, 96], description="Random crop sizes (desk 64/80/96; published 512/640/800).")
    dilation_radius: int | None = Field(default=None, ge=0, description="Transition dilation; None scales 15 px at 512 to image_size.")
    alpha_grid: int = Field(
        default=4,
        ge=1,
        description="Feather alpha on a grid this many times coarser than the image (desk 4, the detail branch scale; 1 keeps pixel-sharp strands).",
    )
    distort_prob: float = Field(default=0.5, ge=0.0, le=1.0, description="Probability of photometric distortion (unstated in the source; 0.5).")
    brightness: float = Field(default=0.2, ge=0.0, description="Max additive brightness shift (±0.2).")
    contrast: float = Field(default=0.2, ge=0.0, description="Max relative contrast change (±0.2).")
    saturation: float = Field(default=0.2, ge=0.0, description="Max relative saturation change (±0.2).")
    blur_prob: float = Field(default=0.1, ge=0.0, le=1.0, description="Probability of Gaussian blur (0.1).")
    blur_sigma: tuple[float, float] = Field(default=(0.1, 2.0), description="Blur sigma range ([0.1, 2]).")
    flip_prob: float = Field(default=0.5, ge=0.0, le=1.0, description="Probability of horizontal flip (0.5).")

    @field_validator("crop_sizes")
    @classmethod
    def _crop_sizes_valid(cls, value: list[int]) -> list[int]:
        if not value:
            raise ValueError("crop_sizes must be non-empty")
        if any(c <= 0 for c in value):
            raise ValueError("crop sizes must be positive")
        return sorted(value)


class ModelConfig(BaseModel):
    """Network architecture settings."""

    encoder_widths: tuple[int, int, int, int, int] = Field(
        default=(16, 32, 64, 128, 256),
        description="Channels at scales 1/2, 1/4, 1/8, 1/16, 1/32 (desk default; published encoder is far wider).",
    )
    ppm_bins: tuple[int, ...] = Field(default=(1, 2, 3, 6), description="Pyramid pooling bin sizes (1, 2, 3, 6).")
    scb_channels: int = Field(default=64, gt=0, description="Semantic branch width (desk 64).")
    hrdb_channels: int = Field(default=32, gt=0, description="Detail branch width (desk 32).")
    guidance_taps: tuple[int, ...] = Field(default=(1, 3, 5), description="Semantic blocks guiding the detail branch (1, 3, 5).")
    stack_excess_taps: bool = Field(default=False, description="Allow more than three taps by stacking gates per insertion point.")
    fusion_mode: FusionMode = Field(default=FusionMode.REP, description="Final alpha fusion (rep).")
    bn_momentum: float = Field(default=0.1, gt=0.0, lt=1.0, description="BatchNorm momentum, torch convention (running average 0.9).")

    @field_validator("encoder_widths")
    @classmethod
    def _widths_positive(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(w <= 0 for w in value):
            raise ValueError("encoder widths must be positive")
        return value

    @field_validator("ppm_bins")
    @classmethod
    def _bins_positive(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value or any(b <= 0 for b in value):
            raise ValueError("ppm bins must be positive and non-empty")
        return value

    @field_validator("guidance_taps")
    @classmethod
    def _taps_valid(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(t < 1 or t > SCB_BLOCKS for t in value):
            raise ValueError(f"guidance taps must be block indices in 1..{SCB_BLOCKS}")
        if len(set(value)) != len(value):
            raise ValueError("guidance taps must be unique")
        return tuple(sorted(value))

    @model_validator(mode="after")
    def _tap_count(self) -> "ModelConfig":
        if len(self.guidance_taps) > MAX_GUIDANCE_SLOTS and not self.stack_excess_taps:
            raise ValueError(
                f"at most {MAX_GUIDANCE_SLOTS} guidance taps unless stack_excess_taps is set"
            )
        return self


class LossConfig(BaseModel):
    """Training objective settings."""

    epsilon: float = Field(default=1e-6, gt=0.0, description="Charbonnier epsilon (1e-6).")
    lambda1: float = Field(default=1.0, ge=0.0, description="Semantic loss weight (1.0).")
    lambda2: float = Field(default=1.0, ge=0.0, description="Detail loss weight (1.0).")
    lambda3: float = Field(default=1.0, ge=0.0, description="Fusion loss weight (1.0).")
    detail_region: DetailRegion = Field(default=DetailRegion.TRANSITION_ONLY, description="Detail loss region (transition only).")
    reduction: Reduction = Field(default=Reduction.SUM, description="Sum over pixels (literal objective) or per-pixel mean.")


class TrainConfig(BaseModel):
    """Training run settings."""

    base_lr: float = Field(default=0.01, gt=0.0, description="Initial learning rate (0.01).")
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0, description="SGD momentum (0.9).")
    weight_decay: float = Field(default=4e-5, ge=0.0, description="L2 weight decay (4e-5).")
    poly_power: float = Field(default=0.9, ge=0.0, description="Poly schedule power (0.9).")
    max_iters: int = Field(default=2000, ge=1, description="Iterations (desk 2000; published 300k).")
    batch_size: int = Field(default=4, ge=1, description="Batch size (4).")
    seed: int = Field(default=0, description="Parameter and sampling seed.")
    checkpoint_every: int | None = Field(default=None, ge=1, description="Checkpoint cadence; None means max_iters / 10.")
    eval_at_checkpoints: bool = Field(default=True, description="Evaluate on the test split at each checkpoint.")
    bn_calibration_batches: int = Field(
        default=4,
        ge=0,
        description="Recent training batches used to set BatchNorm statistics before each checkpoint (0 keeps running averages).",
    )
    dataset_dir: Path = Field(default=Path("data/desk"), description="Dataset produced by `synth`.")
    model: ModelConfig = Field(default_factory=ModelConfig)
    loss: LossConfig = Field(default_factory=LossConfig)
    synth: SynthConfig = Field(default_factory=SynthConfig, description="Augmentation settings used while sampling batches.")

    @model_validator(mode="after")
    def _batchnorm_has_values(self) -> "TrainConfig":
        deepest = (self.synth.base_size // 32) ** 2
        if self.batch_size * deepest < 2:
            raise ValueError(
                f"batch_size {self.batch_size} at base_size {self.synth.base_size} leaves one value "
                "per channel at 1/32 scale; BatchNorm needs at least two"
            )
        return self

    @property
    def checkpoint_interval(self) -> int:
        if self.checkpoint_every is not None:
            return self.checkpoint_every
        return max(1, self.max_iters // 10)


class AblationSpec(BaseModel):
    """One ablation axis evaluated under a shared training budget."""

    axis: AblationAxis
    variants: list[list[int] | FusionMode] = Field(description="Tap sets or fusion modes, one per row.")
    train: TrainConfig = Field(default_factory=TrainConfig)

    @model_validator(mode="after")
    def _variants_valid(self) -> "AblationSpec":
        if len(self.variants) < 2:
            raise ValueError("an ablation needs at least two variants")
        for variant in self.variants:
            if self.axis == AblationAxis.GUIDANCE_TAPS and not isinstance(variant, list):
                raise ValueError("guidance_taps variants must be lists of block indices")
            if self.axis == AblationAxis.FUSION_MODE and not isinstance(variant, FusionMode):
                raise ValueError("fusion_mode variants must be fusion modes")
        return self

from .layers import ConvBNReLU, ResidualBlock, resize_to
from .encoder import EncoderFeatures, HREncoder, ShapeContractError, check_input_size
from .ppm import PyramidPooling
from .scb import NUM_CLASSES, SemanticBranch
from .gcl import GatedConv
from .hrdb import DetailBranch, plan_guidance
from .fusion import BaseFusion, ConvFusion, FusionRegistry, NoFusion, RepFusion
from .matting_net import MattingNet, ModelOutput, build_model, init_weights

__all__ = [
    "ConvBNReLU",
    "ResidualBlock",
    "resize_to",
    "EncoderFeatures",
    "HREncoder",
    "ShapeContractError",
    "check_input_size",
    "PyramidPooling",
    "NUM_CLASSES",
    "SemanticBranch",
    "GatedConv",
    "DetailBranch",
    "plan_guidance",
    "BaseFusion",
    "ConvFusion",
    "FusionRegistry",
    "NoFusion",
    "RepFusion",
    "MattingNet",
    "ModelOutput",
    "build_model",
    "init_weights",
]

from .triclass import default_dilation_radius, derive_triclass, label_from_png, label_to_png
from .quantize import dequantize, quantize, quantize_image, snap_to_8bit

__all__ = [
    "default_dilation_radius",
    "derive_triclass",
    "label_from_png",
    "label_to_png",
    "dequantize",
    "quantize",
    "quantize_image",
    "snap_to_8bit",
]

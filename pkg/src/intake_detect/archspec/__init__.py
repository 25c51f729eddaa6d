"""Shape inference and parameter counting for the built-in model instantiations."""

from .builtin import ARCH_NAMES, REFERENCE_PARAMS, builtin_arch
from .engine import (
    ArchSpec,
    Kind,
    Lateral,
    LayerSpec,
    LayerTrace,
    Pathway,
    ShapeState,
    count_params,
    layer_params,
    output_shape,
    propagate_shapes,
    relative_error,
)

__all__ = [
    "ARCH_NAMES",
    "REFERENCE_PARAMS",
    "ArchSpec",
    "Kind",
    "Lateral",
    "LayerSpec",
    "LayerTrace",
    "Pathway",
    "ShapeState",
    "builtin_arch",
    "count_params",
    "layer_params",
    "output_shape",
    "propagate_shapes",
    "relative_error",
]

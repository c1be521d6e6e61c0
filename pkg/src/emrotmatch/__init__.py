"""Rotation matching of images through virtual electromagnetic interaction.

Edges become virtual current elements; the original image's current exerts
forces on the rotated image's current, and the sign of the resulting total
moment about the image center says which way to turn it back.
"""

from .analysis import (
    AngleRange,
    SignDistribution,
    SweepParams,
    detect_convergence,
    detect_oscillating_angles,
    moment_at_angle,
    sweep_moment_signs,
)
from .edgecurrent import (
    CurrentElement,
    CurrentSet,
    EdgeParams,
    EmptyCurrentSetError,
    GradientField,
    extract_currents,
    extract_significant_edges,
    gradient_to_current,
    sobel_gradient,
)
from .emfield import (
    ForceSample,
    MomentResult,
    SceneConfig,
    field_at,
    force_field,
    force_on_element,
    moment_of_force,
    total_moment,
)
from .matcher import MatchParams, MatchResult, estimate_rotation, match_rotation
from .raster import GrayImage, RotationSpec, load_image, rotate, rotate_image, save_image
from .viz import export_sign_diagram

__all__ = [
    "AngleRange",
    "SignDistribution",
    "SweepParams",
    "detect_convergence",
    "detect_oscillating_angles",
    "moment_at_angle",
    "sweep_moment_signs",
    "CurrentElement",
    "CurrentSet",
    "EdgeParams",
    "EmptyCurrentSetError",
    "GradientField",
    "extract_currents",
    "extract_significant_edges",
    "gradient_to_current",
    "sobel_gradient",
    "ForceSample",
    "MomentResult",
    "SceneConfig",
    "field_at",
    "force_field",
    "force_on_element",
    "moment_of_force",
    "total_moment",
    "MatchParams",
    "MatchResult",
    "estimate_rotation",
    "match_rotation",
    "GrayImage",
    "RotationSpec",
    "load_image",
    "rotate",
    "rotate_image",
    "save_image",
    "export_sign_diagram",
]

__version__ = "0.1.0"

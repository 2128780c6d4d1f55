"""Polar (center + rays) instance-mask representation toolkit."""

from ._kernels import BACKEND
from .codec import (
    AngleGrid,
    CodecConfig,
    PolarInstance,
    decode,
    encode,
    encode_raycast,
    encode_traversal,
    reconstruction_iou,
)
from .errors import (
    BothEmpty,
    DegenerateContour,
    DimensionMismatch,
    EmptyMask,
    EmptyRasterWarning,
    InvalidRays,
    NonFiniteLoss,
    OutOfExtent,
    OutOfRange,
    ParseError,
    PolarError,
)
from .geometry import (
    BitMask,
    Box,
    Contour,
    Point,
    box_center,
    box_iou,
    extract_contour,
    mass_center,
    pixel_iou,
    polygon_area,
    rasterize,
)
from .losses import (
    RayPair,
    SamplingConfig,
    SmoothL1Config,
    center_samples,
    fused_score,
    polar_centerness,
    polar_iou_loss,
    polar_iou_loss_grad,
    polar_iou_power,
    polar_iou_simplified,
    smooth_l1_loss,
)
from .postprocess import Candidate, NmsConfig, assemble, mask_bbox, nms, select_candidates

__version__ = "0.1.0"

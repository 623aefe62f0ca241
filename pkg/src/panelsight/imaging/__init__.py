"""Pure image-processing primitives shared by all artifact readers."""

from .buffer import Box, ImageBuffer, crop_roi, decode_png, encode_png, read_png, write_png
from .contours import Contour, extract_contours
from .filters import (
    BINARY,
    BINARY_INVERTED,
    gaussian_blur,
    gaussian_kernel,
    median_filter,
    threshold,
    to_grayscale,
)
from .geometry import Homography, Point2, homography_from_points, warp_perspective
from .hough import PolarLine, hough_lines
from .matching import MatchResult, match_template_ssd

__all__ = [
    "Box",
    "ImageBuffer",
    "crop_roi",
    "read_png",
    "write_png",
    "encode_png",
    "decode_png",
    "Contour",
    "extract_contours",
    "BINARY",
    "BINARY_INVERTED",
    "to_grayscale",
    "gaussian_blur",
    "gaussian_kernel",
    "median_filter",
    "threshold",
    "Homography",
    "Point2",
    "homography_from_points",
    "warp_perspective",
    "PolarLine",
    "hough_lines",
    "MatchResult",
    "match_template_ssd",
]

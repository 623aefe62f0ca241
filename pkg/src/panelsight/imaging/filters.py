"""Pointwise and neighborhood filters: grayscale, blur, median, threshold."""

from __future__ import annotations

import numpy as np

from ..errors import ImagingError
from .buffer import ImageBuffer

BINARY = "binary"
BINARY_INVERTED = "binary-inverted"


def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    """ITU-R 601 luma: round(0.299 R + 0.587 G + 0.114 B)."""
    if img.channels != 3:
        raise ImagingError("to_grayscale expects a 3-channel image")
    rgb = img.data.astype(np.float64)
    gray = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return ImageBuffer(np.clip(np.round(gray), 0, 255).astype(np.uint8))


def gaussian_kernel(kernel_size: int, sigma: float) -> np.ndarray:
    """1-D Gaussian weights normalized to sum 1."""
    if kernel_size % 2 == 0 or kernel_size < 1:
        raise ImagingError(f"kernel size must be odd and >= 1, got {kernel_size}")
    if sigma <= 0:
        raise ImagingError(f"sigma must be > 0, got {sigma}")
    half = kernel_size // 2
    d = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(d * d) / (2.0 * sigma * sigma))
    return k / k.sum()


def _convolve_axis(arr: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    half = len(kernel) // 2
    if half == 0:
        return arr.copy()
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (half, half)
    padded = np.pad(arr, pad, mode="edge")
    out = np.zeros_like(arr)
    n = arr.shape[axis]
    sl = [slice(None)] * arr.ndim
    for i, w in enumerate(kernel):
        sl[axis] = slice(i, i + n)
        out += w * padded[tuple(sl)]
    return out


def gaussian_blur(img: ImageBuffer, kernel_size: int, sigma: float) -> ImageBuffer:
    """Separable Gaussian with edge-replicate borders."""
    if kernel_size > min(img.width, img.height):
        raise ImagingError(
            f"kernel {kernel_size} larger than image {img.width}x{img.height}"
        )
    k = gaussian_kernel(kernel_size, sigma)
    acc = img.data.astype(np.float64)
    acc = _convolve_axis(acc, k, axis=0)
    acc = _convolve_axis(acc, k, axis=1)
    return ImageBuffer(np.clip(np.round(acc), 0, 255).astype(np.uint8))


def median_filter(img: ImageBuffer, kernel_size: int) -> ImageBuffer:
    """k x k median over a replicate-padded neighborhood, 1-channel only."""
    if img.channels != 1:
        raise ImagingError("median_filter expects a 1-channel image")
    if kernel_size % 2 == 0 or kernel_size < 1:
        raise ImagingError(f"kernel size must be odd and >= 1, got {kernel_size}")
    if kernel_size == 1:
        return ImageBuffer(img.data.copy())
    half = kernel_size // 2
    padded = np.pad(img.data, half, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(
        padded, (kernel_size, kernel_size)
    )
    med = np.median(windows, axis=(2, 3))
    return ImageBuffer(med.astype(np.uint8))


def threshold(img: ImageBuffer, t: int, mode: str = BINARY) -> ImageBuffer:
    """Strict binary threshold: 255 where pixel > t (inverted mode swaps)."""
    if img.channels != 1:
        raise ImagingError("threshold expects a 1-channel image")
    if not 0 <= t <= 255:
        raise ImagingError(f"threshold must be in [0,255], got {t}")
    if mode not in (BINARY, BINARY_INVERTED):
        raise ImagingError(f"unknown threshold mode {mode!r}")
    above = img.data > t
    if mode == BINARY_INVERTED:
        above = ~above
    return ImageBuffer(np.where(above, 255, 0).astype(np.uint8))

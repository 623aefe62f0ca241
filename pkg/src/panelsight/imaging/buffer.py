"""8-bit image container, ROI cropping and PNG I/O."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import ImagingError


@dataclass(frozen=True)
class Box:
    """Axis-aligned pixel rectangle, top-left anchored."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ImagingError(f"box must have positive size, got {self.w}x{self.h}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def contains(self, other: "Box") -> bool:
        return (
            other.x >= self.x
            and other.y >= self.y
            and other.x2 <= self.x2
            and other.y2 <= self.y2
        )


class ImageBuffer:
    """Owned 8-bit raster, 1 (gray) or 3 (RGB) channels.

    The backing array is frozen so every op stays pure; use ``to_array``
    for a writable copy.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data)
        if arr.dtype != np.uint8:
            raise ImagingError(f"pixel data must be uint8, got {arr.dtype}")
        if arr.ndim == 2:
            pass
        elif arr.ndim == 3 and arr.shape[2] == 3:
            pass
        else:
            raise ImagingError(f"expected (h,w) or (h,w,3) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ImagingError("image must be at least 1x1")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ImageBuffer is immutable")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    def to_array(self) -> np.ndarray:
        return self.data.copy()

    def __eq__(self, other) -> bool:
        return isinstance(other, ImageBuffer) and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"ImageBuffer({self.width}x{self.height}x{self.channels})"

    @staticmethod
    def zeros(width: int, height: int, channels: int = 1) -> "ImageBuffer":
        shape = (height, width) if channels == 1 else (height, width, 3)
        return ImageBuffer(np.zeros(shape, dtype=np.uint8))

    @staticmethod
    def full(width: int, height: int, value, channels: int = 1) -> "ImageBuffer":
        shape = (height, width) if channels == 1 else (height, width, 3)
        out = np.empty(shape, dtype=np.uint8)
        out[...] = value
        return ImageBuffer(out)


def crop_roi(img: ImageBuffer, roi: Box) -> ImageBuffer:
    """Owned copy of a rectangle; out-of-bounds is an error, never clamped."""
    if roi.x < 0 or roi.y < 0 or roi.x2 > img.width or roi.y2 > img.height:
        raise ImagingError(
            f"roi {roi} outside image bounds {img.width}x{img.height}"
        )
    return ImageBuffer(img.data[roi.y : roi.y2, roi.x : roi.x2].copy())


def read_png(path: str | Path) -> ImageBuffer:
    with Image.open(path) as im:
        return _from_pil(im)


def decode_png(blob: bytes) -> ImageBuffer:
    with Image.open(io.BytesIO(blob)) as im:
        return _from_pil(im)


def _from_pil(im: Image.Image) -> ImageBuffer:
    if im.mode == "L":
        return ImageBuffer(np.asarray(im, dtype=np.uint8))
    return ImageBuffer(np.asarray(im.convert("RGB"), dtype=np.uint8))


def write_png(img: ImageBuffer, path: str | Path) -> None:
    _to_pil(img).save(path, format="PNG")


def encode_png(img: ImageBuffer) -> bytes:
    buf = io.BytesIO()
    _to_pil(img).save(buf, format="PNG")
    return buf.getvalue()


def _to_pil(img: ImageBuffer) -> Image.Image:
    mode = "L" if img.channels == 1 else "RGB"
    return Image.fromarray(img.data, mode=mode)

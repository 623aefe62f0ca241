"""Planar geometry: homography estimation and perspective warping."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import GeometryError, ImagingError
from .buffer import ImageBuffer

_COLLINEAR_EPS = 1e-7
_SINGULAR_EPS = 1e-9


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Homography:
    """3x3 projective map, normalized so m[2][2] = 1 when possible."""

    m: tuple

    @staticmethod
    def from_matrix(mat: np.ndarray) -> "Homography":
        mat = np.asarray(mat, dtype=np.float64)
        if mat.shape != (3, 3):
            raise GeometryError(f"homography must be 3x3, got {mat.shape}")
        if abs(np.linalg.det(mat)) <= _SINGULAR_EPS:
            raise GeometryError("homography matrix is singular")
        if abs(mat[2, 2]) > 1e-12:
            mat = mat / mat[2, 2]
        return Homography(tuple(tuple(float(v) for v in row) for row in mat))

    @staticmethod
    def identity() -> "Homography":
        return Homography.from_matrix(np.eye(3))

    def as_array(self) -> np.ndarray:
        return np.array(self.m, dtype=np.float64)

    def inverse(self) -> "Homography":
        return Homography.from_matrix(np.linalg.inv(self.as_array()))

    def apply(self, p: Point2) -> Point2:
        v = self.as_array() @ np.array([p.x, p.y, 1.0])
        if abs(v[2]) <= _SINGULAR_EPS:
            raise GeometryError(f"point ({p.x},{p.y}) maps to infinity")
        return Point2(v[0] / v[2], v[1] / v[2])


def _any_collinear(pts: list[Point2]) -> bool:
    # normalized triple-product test so the check is scale independent
    for i in range(4):
        for j in range(i + 1, 4):
            for k in range(j + 1, 4):
                a, b, c = pts[i], pts[j], pts[k]
                cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
                scale = max(
                    abs(b.x - a.x) + abs(b.y - a.y),
                    abs(c.x - a.x) + abs(c.y - a.y),
                    1.0,
                )
                if abs(cross) <= _COLLINEAR_EPS * scale * scale:
                    return True
    return False


def homography_from_points(src: list[Point2], dst: list[Point2]) -> Homography:
    """Solve the 8x8 DLT system mapping four source points to four targets."""
    if len(src) != 4 or len(dst) != 4:
        raise GeometryError("exactly four point pairs required")
    if _any_collinear(src):
        raise GeometryError("three of the source points are collinear")
    if _any_collinear(dst):
        raise GeometryError("three of the destination points are collinear")
    a = np.zeros((8, 8), dtype=np.float64)
    b = np.zeros(8, dtype=np.float64)
    for i, (s, d) in enumerate(zip(src, dst)):
        a[2 * i] = [s.x, s.y, 1, 0, 0, 0, -s.x * d.x, -s.y * d.x]
        a[2 * i + 1] = [0, 0, 0, s.x, s.y, 1, -s.x * d.y, -s.y * d.y]
        b[2 * i] = d.x
        b[2 * i + 1] = d.y
    try:
        h = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"singular homography system: {exc}") from exc
    mat = np.append(h, 1.0).reshape(3, 3)
    return Homography.from_matrix(mat)


def warp_perspective(
    img: ImageBuffer, h: Homography, out_w: int, out_h: int
) -> ImageBuffer:
    """Inverse-map warp with bilinear sampling; out-of-bounds reads are black.

    ``h`` maps input coordinates to output coordinates.
    """
    if out_w < 1 or out_h < 1:
        raise ImagingError(f"output size must be positive, got {out_w}x{out_h}")
    hinv = h.inverse().as_array().astype(np.float64)

    xs, ys = np.meshgrid(
        np.arange(out_w, dtype=np.float64), np.arange(out_h, dtype=np.float64)
    )
    denom = hinv[2, 0] * xs + hinv[2, 1] * ys + hinv[2, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = (hinv[0, 0] * xs + hinv[0, 1] * ys + hinv[0, 2]) / denom
        sy = (hinv[1, 0] * xs + hinv[1, 1] * ys + hinv[1, 2]) / denom
    valid = np.isfinite(sx) & np.isfinite(sy)
    sx = np.where(valid, sx, -1.0)
    sy = np.where(valid, sy, -1.0)

    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0

    src = img.data.astype(np.float64)
    if img.channels == 1:
        src = src[..., None]

    height, width = img.height, img.width
    out = np.zeros((out_h, out_w, src.shape[2]), dtype=np.float64)
    # accumulate the four bilinear taps, masking taps that fall outside
    for dy in (0, 1):
        for dx in (0, 1):
            px = x0 + dx
            py = y0 + dy
            inb = (px >= 0) & (px < width) & (py >= 0) & (py < height)
            w = (fx if dx else (1 - fx)) * (fy if dy else (1 - fy))
            w = np.where(inb, w, 0.0)
            pxc = np.clip(px, 0, width - 1)
            pyc = np.clip(py, 0, height - 1)
            out += w[..., None] * src[pyc, pxc]

    out = np.clip(np.round(out), 0, 255).astype(np.uint8)
    if img.channels == 1:
        out = out[..., 0]
    return ImageBuffer(out)

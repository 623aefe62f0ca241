"""Connected-component contours via border following."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import ImagingError
from .buffer import Box, ImageBuffer
from .geometry import Point2

_EIGHT_CONN = np.ones((3, 3), dtype=np.int32)

# Moore neighborhood scanned clockwise from west, (dy, dx)
_OFFSETS = [(0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1)]


@dataclass(frozen=True)
class Contour:
    points: list
    area: int
    bbox: Box


def extract_contours(bin_img: ImageBuffer) -> list[Contour]:
    """Boundary, pixel-count area and bbox per 8-connected foreground component,
    sorted by area descending."""
    if bin_img.channels != 1:
        raise ImagingError("expected a 1-channel binary image")
    vals = np.unique(bin_img.data)
    if not np.isin(vals, (0, 255)).all():
        raise ImagingError("expected a binary image containing only {0, 255}")

    mask = bin_img.data > 0
    labels, count = ndimage.label(mask, structure=_EIGHT_CONN)
    if count == 0:
        return []

    contours = []
    slices = ndimage.find_objects(labels)
    for lab, sl in enumerate(slices, start=1):
        comp = labels[sl] == lab
        y_off, x_off = sl[0].start, sl[1].start
        area = int(comp.sum())
        bbox = Box(x=x_off, y=y_off, w=comp.shape[1], h=comp.shape[0])
        start = np.argwhere(comp)[0]  # topmost, then leftmost (row-major)
        boundary = _trace_boundary(comp, int(start[0]), int(start[1]))
        points = [Point2(float(x + x_off), float(y + y_off)) for y, x in boundary]
        contours.append(Contour(points=points, area=area, bbox=bbox))

    contours.sort(key=lambda c: (-c.area, c.bbox.y, c.bbox.x))
    return contours


def _trace_boundary(mask: np.ndarray, sy: int, sx: int) -> list:
    """Moore-neighbor tracing with Jacob's stopping criterion."""
    h, w = mask.shape

    def fg(y, x):
        return 0 <= y < h and 0 <= x < w and mask[y, x]

    path = [(sy, sx)]
    cur = (sy, sx)
    back = 0  # entered from the west, which is background for the start pixel
    first_move = None
    limit = 4 * int(mask.sum()) + 8
    for _ in range(limit):
        nxt = None
        for k in range(1, 9):
            idx = (back + k) % 8
            ny, nx = cur[0] + _OFFSETS[idx][0], cur[1] + _OFFSETS[idx][1]
            if fg(ny, nx):
                nxt = (ny, nx)
                dir_idx = idx
                break
        if nxt is None:
            return path  # isolated pixel
        if first_move is None:
            first_move = (cur, nxt)
        elif (cur, nxt) == first_move:
            return path[:-1] if path[-1] == path[0] and len(path) > 1 else path
        path.append(nxt)
        back = (dir_idx + 4) % 8
        cur = nxt
    return path

"""Sum-of-squared-difference template matching."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ImagingError
from .buffer import Box, ImageBuffer
from .geometry import Point2


@dataclass(frozen=True)
class MatchResult:
    top_left: Point2
    score: float
    normalized_score: float


def match_template_ssd(
    img: ImageBuffer, tmpl: ImageBuffer, search: Box | None = None
) -> tuple[MatchResult, np.ndarray]:
    """Best SSD placement of ``tmpl`` inside ``search`` plus the full score map.

    Scores are exact integer sums so ties are deterministic (smaller y, then
    smaller x wins). The returned map is indexed [dy, dx] relative to the
    search origin.
    """
    if search is None:
        search = Box(0, 0, img.width, img.height)
    if img.channels != tmpl.channels:
        raise ImagingError(
            f"channel mismatch: image has {img.channels}, template {tmpl.channels}"
        )
    full = Box(0, 0, img.width, img.height)
    if not full.contains(search):
        raise ImagingError(f"search box {search} outside image bounds")
    if tmpl.width > search.w or tmpl.height > search.h:
        raise ImagingError(
            f"template {tmpl.width}x{tmpl.height} larger than search window "
            f"{search.w}x{search.h}"
        )

    region = img.data[search.y : search.y2, search.x : search.x2].astype(np.int64)
    t = tmpl.data.astype(np.int64)
    th, tw = tmpl.height, tmpl.width
    out_h = search.h - th + 1
    out_w = search.w - tw + 1

    scores = np.zeros((out_h, out_w), dtype=np.int64)
    for i in range(th):
        for j in range(tw):
            diff = region[i : i + out_h, j : j + out_w] - t[i, j]
            if diff.ndim == 3:
                scores += (diff * diff).sum(axis=2)
            else:
                scores += diff * diff

    flat = int(np.argmin(scores))
    dy, dx = divmod(flat, out_w)
    best = int(scores[dy, dx])
    denom = th * tw * tmpl.channels * 255 * 255
    result = MatchResult(
        top_left=Point2(float(search.x + dx), float(search.y + dy)),
        score=float(best),
        normalized_score=best / denom,
    )
    return result, scores

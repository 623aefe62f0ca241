"""Hough line transform over a (rho, theta) accumulator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ImagingError
from .buffer import ImageBuffer

_MAX_THETA_RES = math.pi / 36 + 1e-12


@dataclass(frozen=True)
class PolarLine:
    """Line x*cos(theta) + y*sin(theta) = rho with its accumulator votes."""

    rho: float
    theta: float
    votes: int

    def distance_to(self, x: float, y: float) -> float:
        return abs(x * math.cos(self.theta) + y * math.sin(self.theta) - self.rho)


def _check_binary(img: ImageBuffer) -> None:
    if img.channels != 1:
        raise ImagingError("expected a 1-channel binary image")
    vals = np.unique(img.data)
    if not np.isin(vals, (0, 255)).all():
        raise ImagingError("expected a binary image containing only {0, 255}")


def hough_lines(
    bin_img: ImageBuffer,
    rho_res: float,
    theta_res: float,
    vote_threshold: int,
) -> list[PolarLine]:
    """Vote foreground pixels into the accumulator and return 3x3 local maxima.

    Results are sorted by votes descending; ties break toward smaller theta,
    then smaller rho.
    """
    _check_binary(bin_img)
    if rho_res <= 0:
        raise ImagingError(f"rho_res must be > 0, got {rho_res}")
    if not 0 < theta_res <= _MAX_THETA_RES:
        raise ImagingError(f"theta_res must be in (0, pi/36], got {theta_res}")
    if vote_threshold < 1:
        raise ImagingError("vote_threshold must be >= 1")

    ys, xs = np.nonzero(bin_img.data)
    if len(xs) == 0:
        return []

    n_theta = max(1, int(round(math.pi / theta_res)))
    thetas = np.arange(n_theta) * theta_res
    diag = math.hypot(bin_img.width, bin_img.height)
    half_bins = int(math.ceil(diag / rho_res)) + 1
    n_rho = 2 * half_bins + 1

    acc = np.zeros((n_theta, n_rho), dtype=np.int32)
    xs_f = xs.astype(np.float64)
    ys_f = ys.astype(np.float64)
    for ti in range(n_theta):
        rho = xs_f * math.cos(thetas[ti]) + ys_f * math.sin(thetas[ti])
        idx = np.round(rho / rho_res).astype(np.int64) + half_bins
        acc[ti] = np.bincount(idx, minlength=n_rho)

    peaks = _local_maxima(acc, vote_threshold)
    lines = [
        PolarLine(rho=(ri - half_bins) * rho_res, theta=ti * theta_res, votes=int(v))
        for ti, ri, v in peaks
    ]
    lines.sort(key=lambda l: (-l.votes, l.theta, l.rho))
    return lines


def _local_maxima(acc: np.ndarray, threshold: int) -> list[tuple[int, int, int]]:
    """3x3 non-max suppression; equal-valued plateau keeps the lexicographically
    first cell so output is deterministic."""
    n_theta, n_rho = acc.shape
    candidates = np.argwhere(acc >= threshold)
    peaks = []
    for ti, ri in candidates:
        v = acc[ti, ri]
        keep = True
        for dt in (-1, 0, 1):
            for dr in (-1, 0, 1):
                if dt == 0 and dr == 0:
                    continue
                nt, nr = ti + dt, ri + dr
                if not (0 <= nt < n_theta and 0 <= nr < n_rho):
                    continue
                nv = acc[nt, nr]
                if nv > v or (nv == v and (nt, nr) < (ti, ri)):
                    keep = False
                    break
            if not keep:
                break
        if keep:
            peaks.append((int(ti), int(ri), int(v)))
    return peaks

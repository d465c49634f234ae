"""Texture-driven channel selection: CLAHE enhancement, gray-level
co-occurrence matrices and the Haralick contrast statistic.

The principal-component plane that depicts colonies has the lowest spatial
frequency content after local contrast enhancement, so the plane with the
minimum average GLCM contrast over four unit offsets is selected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .imaging import ParameterError, minmax_normalize

#: unit-displacement offsets (dx, dy) covering the four axes
#: (horizontal, diagonal, vertical, anti-diagonal)
DEFAULT_OFFSETS = ((0, 1), (-1, 1), (-1, 0), (-1, -1))

DEFAULT_LEVELS = 64


@dataclass(frozen=True)
class ClaheParams:
    tiles_x: int = 16
    tiles_y: int = 16
    clip_limit: float = 0.008  # relative histogram-mass cap per bin
    bins: int = 256

    def __post_init__(self):
        if self.tiles_x < 1 or self.tiles_y < 1:
            raise ParameterError("tile counts must be >= 1")
        if not (0 < self.clip_limit <= 1):
            raise ParameterError("clip_limit must be in (0, 1]")


@dataclass
class GlcmMatrix:
    levels: int
    offset: tuple
    counts: np.ndarray  # levels x levels, normalized to sum 1


def _tile_edges(size, tiles):
    return np.linspace(0, size, tiles + 1).round().astype(int)


def clahe(plane, params=ClaheParams()):
    """Contrast-limited adaptive histogram equalization.

    Per-tile histograms are clipped at ``clip_limit`` times the tile pixel
    count, the excess is redistributed uniformly (one pass, then re-clipped
    once), and each tile gets a uniform-equalization mapping.  Pixels are
    mapped by bilinear interpolation between the four surrounding tile
    mappings.
    """
    plane = np.asarray(plane, dtype=np.float64)
    h, w = plane.shape
    ey = _tile_edges(h, params.tiles_y)
    ex = _tile_edges(w, params.tiles_x)
    if np.diff(ey).min() < 2 or np.diff(ex).min() < 2:
        raise ParameterError("tiles smaller than 2x2 pixels")

    bins = params.bins
    idx = np.minimum((plane * bins).astype(int), bins - 1)
    idx = np.maximum(idx, 0)

    mappings = np.empty((params.tiles_y, params.tiles_x, bins))
    for ty in range(params.tiles_y):
        for tx in range(params.tiles_x):
            tile = idx[ey[ty] : ey[ty + 1], ex[tx] : ex[tx + 1]]
            hist = np.bincount(tile.ravel(), minlength=bins).astype(np.float64)
            clip = params.clip_limit * tile.size
            excess = np.maximum(hist - clip, 0.0).sum()
            hist = np.minimum(hist, clip)
            hist += excess / bins
            hist = np.minimum(hist, clip)  # residual overflow dropped
            cdf = np.cumsum(hist)
            mappings[ty, tx] = cdf / cdf[-1]

    # interpolation positions relative to tile centers
    cy = (ey[:-1] + ey[1:]) / 2.0 - 0.5
    cx = (ex[:-1] + ex[1:]) / 2.0 - 0.5
    ty0, wy = _interp_coords(np.arange(h), cy)
    tx0, wx = _interp_coords(np.arange(w), cx)

    ty1 = np.minimum(ty0 + 1, params.tiles_y - 1)
    tx1 = np.minimum(tx0 + 1, params.tiles_x - 1)
    b = idx
    m00 = mappings[ty0[:, None], tx0[None, :], b]
    m01 = mappings[ty0[:, None], tx1[None, :], b]
    m10 = mappings[ty1[:, None], tx0[None, :], b]
    m11 = mappings[ty1[:, None], tx1[None, :], b]
    wyc = wy[:, None]
    wxc = wx[None, :]
    out = ((1 - wyc) * (1 - wxc) * m00 + (1 - wyc) * wxc * m01
           + wyc * (1 - wxc) * m10 + wyc * wxc * m11)
    return np.clip(out, 0.0, 1.0)


def _interp_coords(pos, centers):
    """Lower tile index and fractional weight for each pixel coordinate,
    clamped so border pixels extrapolate with the nearest tile mapping."""
    if len(centers) == 1:
        # degenerate: single tile row/column, duplicate it
        return np.zeros(len(pos), dtype=int), np.zeros(len(pos))
    lo = np.clip(np.searchsorted(centers, pos) - 1, 0, len(centers) - 2)
    span = centers[lo + 1] - centers[lo]
    wfrac = np.clip((pos - centers[lo]) / span, 0.0, 1.0)
    return lo, wfrac


def quantize(plane, levels):
    """Uniform quantization of [min, max] into ``levels`` bins (0-based);
    a constant plane maps everything to bin 0."""
    plane = np.asarray(plane, dtype=np.float64)
    lo, hi = plane.min(), plane.max()
    if hi == lo:
        return np.zeros(plane.shape, dtype=np.int64)
    q = ((plane - lo) / (hi - lo) * levels).astype(np.int64)
    return np.minimum(q, levels - 1)


def glcm(plane, offset, levels=DEFAULT_LEVELS):
    """Normalized co-occurrence matrix for one (dx, dy) displacement.

    Entry (i, j) is the relative frequency of a pixel of quantized level i
    whose partner at (x+dx, y+dy) has level j; pairs whose partner falls
    outside the image are skipped.
    """
    if levels < 2:
        raise ParameterError("levels must be >= 2")
    dx, dy = offset
    q = quantize(plane, levels)
    h, w = q.shape
    y0, y1 = max(0, -dy), min(h, h - dy)
    x0, x1 = max(0, -dx), min(w, w - dx)
    counts = np.zeros((levels, levels), dtype=np.float64)
    if y1 > y0 and x1 > x0:
        src = q[y0:y1, x0:x1]
        dst = q[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
        flat = np.bincount((src * levels + dst).ravel(), minlength=levels * levels)
        counts = flat.reshape(levels, levels).astype(np.float64)
        counts /= counts.sum()
    return GlcmMatrix(levels=levels, offset=(dx, dy), counts=counts)


def glcm_contrast(g):
    """Haralick contrast: sum over (i, j) of |i - j|^2 times the normalized
    frequency; 0 for a constant image, at most (levels - 1)^2."""
    i = np.arange(g.levels)
    d2 = (i[:, None] - i[None, :]) ** 2
    return float((d2 * g.counts).sum())


def average_contrast(plane, offsets=DEFAULT_OFFSETS, levels=DEFAULT_LEVELS):
    """Mean Haralick contrast over the given offsets."""
    return float(np.mean([glcm_contrast(glcm(plane, o, levels)) for o in offsets]))


def select_pc_channel(planes, clahe_params=ClaheParams(),
                      offsets=DEFAULT_OFFSETS, levels=DEFAULT_LEVELS):
    """Pick the plane with minimum average contrast after normalization and
    CLAHE.  Returns (index, contrasts); the index is 0-based and ties break
    toward the lower index."""
    contrasts = []
    for p in planes:
        enhanced = clahe(minmax_normalize(p), clahe_params)
        contrasts.append(average_contrast(enhanced, offsets, levels))
    return int(np.argmin(contrasts)), contrasts

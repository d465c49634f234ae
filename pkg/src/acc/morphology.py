"""Grayscale and binary morphology: reconstruction-based operators, minima
extraction, exact Euclidean distance transform and marker-controlled
watershed.

Connectivity conventions: 8-connectivity for grayscale reconstruction,
regional minima and component labeling; 4-connectivity for hole
identification.  Grayscale erosion/dilation treat pixels outside the image
as +inf / -inf respectively (out-of-bounds samples never win).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from skimage.morphology import local_minima, reconstruction

from .imaging import ParameterError

_CONN8 = np.ones((3, 3), dtype=bool)
_NBR8 = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


@dataclass(frozen=True)
class StructuringElement:
    shape: str = "disk"  # "disk" or "square"
    radius: int = 1

    def footprint(self):
        r = int(self.radius)
        if r < 0:
            raise ParameterError("radius must be >= 0")
        if self.shape == "square":
            return np.ones((2 * r + 1, 2 * r + 1), dtype=bool)
        if self.shape == "disk":
            yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
            return (yy * yy + xx * xx) <= r * r
        raise ParameterError(f"unknown structuring element shape: {self.shape}")


def grey_erode(plane, se):
    """Minimum filter over the structuring element; outside treated as +inf."""
    fp = se.footprint()
    return ndimage.grey_erosion(
        np.asarray(plane, dtype=np.float64), footprint=fp, mode="constant", cval=np.inf
    )


def grey_dilate(plane, se):
    """Maximum filter over the structuring element; outside treated as -inf."""
    fp = se.footprint()
    return ndimage.grey_dilation(
        np.asarray(plane, dtype=np.float64), footprint=fp, mode="constant", cval=-np.inf
    )


def open_close_by_reconstruction(plane, se):
    """Opening-by-reconstruction followed by closing-by-reconstruction.

    Used for background estimation: flat structures smaller than the
    structuring element are removed while larger shapes keep their exact
    contours.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if se.radius < 1:
        raise ParameterError("structuring element radius must be >= 1")
    if se.radius > min(plane.shape):
        raise ParameterError("structuring element larger than image")
    opened = reconstruction(grey_erode(plane, se), plane, method="dilation",
                            footprint=_CONN8)
    closed = reconstruction(grey_dilate(opened, se), opened, method="erosion",
                            footprint=_CONN8)
    return closed


def regional_minima(plane):
    """8-connected regional minima (plateaus strictly below all neighbors)."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.min() == plane.max():
        return np.ones(plane.shape, dtype=bool)
    return local_minima(plane, connectivity=2, allow_borders=True)


def extended_minima(plane, h):
    """Basin seeds deeper than ``h``: regional minima of the
    erosion-reconstruction of ``plane`` from ``plane + h``."""
    if h <= 0:
        raise ParameterError("h must be > 0")
    plane = np.asarray(plane, dtype=np.float64)
    rec = reconstruction(plane + h, plane, method="erosion", footprint=_CONN8)
    return regional_minima(rec)


def distance_transform(mask):
    """Exact Euclidean distance from each true pixel to the nearest false
    pixel (0 on false pixels; +inf if the mask has no false pixel)."""
    mask = np.asarray(mask, dtype=bool)
    if mask.all():
        return np.full(mask.shape, np.inf)
    return ndimage.distance_transform_edt(mask)


def connected_components(mask):
    """8-connected labeling; labels assigned in raster-scan order of each
    component's first pixel."""
    mask = np.asarray(mask, dtype=bool)
    labels, _ = ndimage.label(mask, structure=_CONN8)
    return labels.astype(np.int32)


def fill_holes(mask):
    """Fill every false region not 4-connected to the image border."""
    return ndimage.binary_fill_holes(np.asarray(mask, dtype=bool))


def dilate(mask, se):
    """Binary Minkowski dilation by the structuring element."""
    return ndimage.binary_dilation(np.asarray(mask, dtype=bool),
                                   structure=se.footprint())


def impose_minima(topography, markers):
    """Suppress every regional minimum except the marker locations.

    Standard reconstruction-based imposition: markers are forced below the
    global minimum and the surface is rebuilt by erosion-reconstruction, so
    each descending path ends at a marker.
    """
    topo = np.asarray(topography, dtype=np.float64)
    finite = topo[np.isfinite(topo)]
    lo = finite.min() if finite.size else 0.0
    hi = finite.max() if finite.size else 0.0
    span = max(hi - lo, 1.0)
    low = lo - span
    high = hi + span
    seed = np.where(markers, low, high)
    capped = np.minimum(np.where(np.isfinite(topo), topo, hi), hi)
    mask = np.minimum(capped, seed)
    return reconstruction(seed, mask, method="erosion", footprint=_CONN8)


def marker_watershed(topography, markers, domain):
    """Priority-flood watershed from imposed marker minima.

    Every domain pixel is assigned to exactly one marker's catchment basin
    or to label 0 (watershed line / unreachable pocket); pixels outside the
    domain are 0.  Flooding order is deterministic: a stable priority queue
    keyed by (height, insertion index).

    Empty markers return an all-zero map (unsplittable blob signal).
    """
    topography = np.asarray(topography, dtype=np.float64)
    markers = np.asarray(markers, dtype=bool)
    domain = np.asarray(domain, dtype=bool)
    if (markers & ~domain).any():
        raise ParameterError("markers must lie inside the domain")
    out = np.zeros(topography.shape, dtype=np.int32)
    if not markers.any():
        return out
    if not np.isfinite(topography[domain]).all():
        raise ParameterError("topography must be finite on the domain")

    topography = impose_minima(topography, markers)
    seeds = connected_components(markers)
    out[markers] = seeds[markers]
    h, w = topography.shape
    line = -1  # sentinel for watershed-line pixels

    heap = []
    counter = 0
    ys, xs = np.nonzero(markers)
    for y, x in zip(ys.tolist(), xs.tolist()):
        for dy, dx in _NBR8:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and domain[ny, nx] and out[ny, nx] == 0:
                heapq.heappush(heap, (topography[ny, nx], counter, ny, nx))
                counter += 1

    while heap:
        _, _, y, x = heapq.heappop(heap)
        if out[y, x] != 0:
            continue
        label = 0
        conflict = False
        for dy, dx in _NBR8:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w:
                v = out[ny, nx]
                if v > 0:
                    if label == 0:
                        label = v
                    elif v != label:
                        conflict = True
        if label == 0:
            continue  # stale entry, only line neighbors remain
        if conflict:
            out[y, x] = line
            continue
        out[y, x] = label
        for dy, dx in _NBR8:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h and 0 <= nx < w and domain[ny, nx] and out[ny, nx] == 0:
                heapq.heappush(heap, (topography[ny, nx], counter, ny, nx))
                counter += 1

    out[out == line] = 0
    out[~domain] = 0
    return out

"""Foreground extraction: background suppression on the selected PC plane,
9-neighborhood pixel features, two-class clustering into a colony mask and
post-processing of the mask into blob records.

A blob is one connected foreground component, possibly several merged
colonies; splitting happens downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np
from scipy import ndimage

from .imaging import ParameterError, gaussian_filter, minmax_normalize
from .morphology import (StructuringElement, connected_components, dilate,
                         fill_holes, open_close_by_reconstruction)

# neighbor order: N, NE, E, SE, S, SW, W, NW as (dy, dx)
_NEIGHBORS = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)]


@dataclass
class Blob:
    id: int
    mask: np.ndarray  # bool, tight bounding box crop
    bbox: tuple       # (x, y, w, h) in image coordinates
    area: int
    circularity: float


def suppress_background(pc_plane, r_obrcbr, smooth=(3.0, 3.0)):
    """Residual of the plane against its reconstruction-based background
    estimate, smoothed and rescaled to [0, 1].  Colonies come out bright
    regardless of staining polarity."""
    if r_obrcbr < 1:
        raise ParameterError("r_obrcbr must be >= 1")
    plane = np.asarray(pc_plane, dtype=np.float64)
    background = open_close_by_reconstruction(
        plane, StructuringElement("disk", int(r_obrcbr)))
    residual = np.abs(plane - background)
    residual = gaussian_filter(residual, smooth[0], smooth[1])
    return minmax_normalize(residual)


def build_pixel_features(plane):
    """9 x (H*W) matrix: row 0 the pixel itself, rows 1-8 its 8-connected
    neighbors in N, NE, E, SE, S, SW, W, NW order, replicate-padded."""
    plane = np.asarray(plane, dtype=np.float64)
    padded = np.pad(plane, 1, mode="edge")
    h, w = plane.shape
    rows = [plane.ravel()]
    for dy, dx in _NEIGHBORS:
        rows.append(padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w].ravel())
    return np.vstack(rows)


def kmeans_blob_mask(features, width, height, max_iter=100):
    """Two-class Lloyd clustering anchored at the all-zeros and all-ones
    centroids; the cluster whose converged centroid has the larger mean is
    foreground."""
    z = np.asarray(features, dtype=np.float64)
    c0 = np.zeros(z.shape[0])
    c1 = np.ones(z.shape[0])
    assign = None
    for _ in range(max_iter):
        d0 = ((z - c0[:, None]) ** 2).sum(axis=0)
        d1 = ((z - c1[:, None]) ** 2).sum(axis=0)
        new_assign = d1 < d0
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        if (~assign).any():
            c0 = z[:, ~assign].mean(axis=1)
        if assign.any():
            c1 = z[:, assign].mean(axis=1)
    foreground = assign if c1.mean() >= c0.mean() else ~assign
    return foreground.reshape(height, width)


def region_perimeter(mask):
    """Length of the 8-connected boundary chain, diagonal steps weighted
    sqrt(2)."""
    m = np.asarray(mask, dtype=np.uint8)
    contours, _ = cv2.findContours(m, cv2.RETR_EXTERNAL, cv2.CHAIN_APPROX_NONE)
    return float(sum(cv2.arcLength(c, True) for c in contours))


def region_circularity(mask):
    """4*pi*area / perimeter^2, clamped to [0, 1]; degenerate tiny regions
    count as perfectly circular."""
    area = int(np.count_nonzero(mask))
    if area == 0:
        return 0.0
    p = region_perimeter(mask)
    if p <= 0:
        return 1.0
    return float(min(1.0, 4.0 * np.pi * area / (p * p)))


def postprocess_blobs(mask, a_min, dilate_radius=1):
    """Dilate, fill holes, drop specks below half the minimum colony area
    and wrap the surviving components as blob records."""
    if a_min < 1:
        raise ParameterError("a_min must be >= 1")
    m = np.asarray(mask, dtype=bool)
    if dilate_radius > 0:
        m = dilate(m, StructuringElement("disk", dilate_radius))
    m = fill_holes(m)
    labels = connected_components(m)
    blobs = []
    next_id = 1
    for sl, lab in zip(ndimage.find_objects(labels), range(1, labels.max() + 1)):
        if sl is None:
            continue
        region = labels[sl] == lab
        area = int(region.sum())
        if area < 0.5 * a_min:
            continue
        y0, x0 = sl[0].start, sl[1].start
        blobs.append(Blob(
            id=next_id,
            mask=region,
            bbox=(x0, y0, region.shape[1], region.shape[0]),
            area=area,
            circularity=region_circularity(region),
        ))
        next_id += 1
    return blobs

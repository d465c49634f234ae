"""Fuzzy-scored multi-threshold watershed splitting of merged colony blobs.

For each blob an h-sweep of extended-minima markers drives a
marker-controlled watershed on the negated distance transform of the blob
mask; every candidate partition is graded by pi-shaped membership functions
of colony area, circularity and expected count, and the best-scoring
threshold wins.  Implausible children are split again recursively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blobs import Blob, region_circularity
from .imaging import ParameterError
from .morphology import (StructuringElement, connected_components, dilate,
                         distance_transform, extended_minima, fill_holes,
                         marker_watershed)


@dataclass(frozen=True)
class FuzzyPiParams:
    e1: float
    e2: float
    e3: float
    e4: float

    def __post_init__(self):
        if not (self.e1 <= self.e2 <= self.e3 <= self.e4):
            raise ParameterError("pi-shape edges must be non-decreasing")


@dataclass
class SegParams:
    a_min: float
    a_max: float
    h_min: float = 0.15
    h_max: float = 0.37
    dh: float = 0.01
    circ_edges: tuple = (0.15, 0.5, 0.9, 1.0)
    a_thresh_factor: float = 0.6
    circ_split: float = 0.6
    max_recursion_depth: int = 5
    gray_smooth: tuple = (3.0, 3.0)  # (sigma_x, sigma_y) for the gray plane

    def __post_init__(self):
        if not self.h_min < self.h_max:
            raise ParameterError("h_min must be < h_max")
        if not self.a_min < self.a_max:
            raise ParameterError("a_min must be < a_max")
        c1, c2, c3, c4 = self.circ_edges
        if not (0 <= c1 < c2 < c3 < c4 <= 1):
            raise ParameterError("circularity edges must be increasing in [0, 1]")

    def h_grid(self):
        n = int(round((self.h_max - self.h_min) / self.dh)) + 1
        return [self.h_min + i * self.dh for i in range(n)]

    def area_edges(self):
        return FuzzyPiParams(0.5 * self.a_min, self.a_min,
                             max(2 * self.a_min, self.a_max), 2 * self.a_max)

    def circ_pi(self):
        return FuzzyPiParams(*self.circ_edges)


@dataclass
class BlobSegmentation:
    blob_id: int
    h_opt: float | None
    labels: np.ndarray   # int32 over the blob bounding box, 0 = line/background
    bbox: tuple          # (x, y, w, h)
    q: float
    colonies: list       # [(area, circularity)] per positive label, in order


def fuzzy_pi(u, p):
    """Spline-based pi-shaped membership grade: quadratic ramps on
    [e1, e2] and [e3, e4], 1 on the plateau [e2, e3], 0 outside [e1, e4].
    Coincident ramp edges degenerate to steps."""
    if u < p.e1 or u > p.e4:
        return 0.0
    if p.e2 <= u <= p.e3:
        return 1.0
    if u < p.e2:
        t = (p.e2 - p.e1)
        if u <= (p.e1 + p.e2) / 2.0:
            return 2.0 * ((u - p.e1) / t) ** 2
        return 1.0 - 2.0 * ((u - p.e2) / t) ** 2
    t = (p.e4 - p.e3)
    if u <= (p.e3 + p.e4) / 2.0:
        return 1.0 - 2.0 * ((u - p.e3) / t) ** 2
    return 2.0 * ((u - p.e4) / t) ** 2


def count_edges(blob_area, median_area):
    """Expected-count membership edges (1, E, 2E, 3E-1) with
    E = ceil(blob_area / median_area)."""
    e = max(1, math.ceil(blob_area / median_area))
    return FuzzyPiParams(1.0, float(e), 2.0 * e, 3.0 * e - 1.0)


def blob_quality(colonies, blob_area, median_area, params):
    """Quality Q of one candidate partition: the mean per-colony grade
    (area membership times circularity membership) scaled by the
    expected-count membership of the colony count."""
    if not colonies:
        return 0.0
    mu_area = params.area_edges()
    mu_circ = params.circ_pi()
    scores = [fuzzy_pi(a, mu_area) * fuzzy_pi(c, mu_circ) for a, c in colonies]
    mu_count = fuzzy_pi(float(len(colonies)), count_edges(blob_area, median_area))
    return float(np.mean(scores) * mu_count)


def _unsplit(blob, median_area, params):
    labels = blob.mask.astype(np.int32)
    colonies = [(blob.area, blob.circularity)]
    return BlobSegmentation(
        blob_id=blob.id, h_opt=None, labels=labels, bbox=blob.bbox,
        q=blob_quality(colonies, blob.area, median_area, params),
        colonies=colonies)


def _prepare_blob_plane(gray, blob, margin=3):
    """Crop the enhanced gray plane around the blob with a small margin,
    flip polarity so colonies form basins, normalize over the blob support
    and park the outside at 1.0 (never a minimum)."""
    x, y, w, h = blob.bbox
    ih, iw = gray.shape
    y0, y1 = max(0, y - margin), min(ih, y + h + margin)
    x0, x1 = max(0, x - margin), min(iw, x + w + margin)
    plane = np.array(gray[y0:y1, x0:x1], dtype=np.float64)
    mask = np.zeros(plane.shape, dtype=bool)
    mask[y - y0 : y - y0 + h, x - x0 : x - x0 + w] = blob.mask
    ring = dilate(mask, StructuringElement("disk", margin)) & ~mask
    if ring.any() and plane[mask].mean() > plane[ring].mean():
        plane = -plane
    vals = plane[mask]
    lo, hi = vals.min(), vals.max()
    norm = np.ones(plane.shape)
    if hi > lo:
        norm[mask] = (vals - lo) / (hi - lo)
    else:
        norm[mask] = 0.0
    return norm, mask, (x0, y0)


def _region_stats(labels):
    """(area, circularity) per positive label, in label order."""
    out = []
    for lab in range(1, labels.max() + 1):
        region = labels == lab
        out.append((int(region.sum()), region_circularity(region)))
    return out


def split_blob(blob, gray_enhanced, median_area, params, depth=0):
    """Partition one blob into colonies via the h-sweep.

    Blobs already plausible as single colonies (small area or high
    circularity) are passed through; otherwise the extended-minima marker
    sweep runs and the candidate maximizing the quality criterion wins,
    with ties resolved toward the smallest threshold.  Children that still
    look like conglomerations are split again up to the recursion limit.
    """
    a_thresh = params.a_thresh_factor * median_area
    if blob.area <= a_thresh or blob.circularity >= params.circ_split:
        return _unsplit(blob, median_area, params)

    plane, mask, (ox, oy) = _prepare_blob_plane(gray_enhanced, blob)
    topo = -distance_transform(mask)

    best = None  # (q, h, labels)
    for h in params.h_grid():
        markers = extended_minima(plane, h) & mask
        n_markers = connected_components(markers).max()
        if n_markers < 2:
            continue
        cand = marker_watershed(topo, markers, mask)
        colonies = _region_stats(cand)
        q = blob_quality(colonies, blob.area, median_area, params)
        if best is None or q > best[0]:
            best = (q, h, cand)

    if best is None:
        return _unsplit(blob, median_area, params)
    _, h_opt, cand = best

    # recurse into children that are still large and irregular
    x, y, w, h_box = blob.bbox
    out = np.zeros((h_box, w), dtype=np.int32)
    inner = cand[y - oy : y - oy + h_box, x - ox : x - ox + w]
    next_label = 1
    colonies = []
    for lab in range(1, inner.max() + 1):
        region = inner == lab
        area = int(region.sum())
        if area == 0:
            continue
        circ = region_circularity(region)
        recurse = (area > a_thresh and circ < params.circ_split
                   and depth + 1 <= params.max_recursion_depth)
        if recurse:
            ys, xs = np.nonzero(region)
            ry0, ry1 = ys.min(), ys.max() + 1
            rx0, rx1 = xs.min(), xs.max() + 1
            child = Blob(id=blob.id, mask=region[ry0:ry1, rx0:rx1],
                         bbox=(x + rx0, y + ry0, rx1 - rx0, ry1 - ry0),
                         area=area, circularity=circ)
            sub = split_blob(child, gray_enhanced, median_area, params,
                             depth=depth + 1)
            for sl in range(1, sub.labels.max() + 1):
                sm = sub.labels == sl
                if not sm.any():
                    continue
                out[ry0:ry1, rx0:rx1][sm] = next_label
                colonies.append((int(sm.sum()), region_circularity(sm)))
                next_label += 1
        else:
            out[region] = next_label
            colonies.append((area, circ))
            next_label += 1

    q = blob_quality(colonies, blob.area, median_area, params)
    return BlobSegmentation(blob_id=blob.id, h_opt=h_opt, labels=out,
                            bbox=blob.bbox, q=q, colonies=colonies)


def segment_image(blobs, gray_enhanced, params):
    """Split every blob and assemble the image-level result.

    Post-segmentation correction: colonies below half the minimum area are
    dropped and each surviving colony is hole-filled; colony ids are
    renumbered in raster order of each region's first pixel.  Watershed
    lines stay at 0 so touching colonies remain separated.

    Returns (binary segmentation mask, label map, per-blob segmentations).
    """
    shape = gray_enhanced.shape
    canvas = np.zeros(shape, dtype=np.int32)
    if not blobs:
        return canvas > 0, canvas, []

    median_area = float(np.median([b.area for b in blobs]))
    segs = []
    tmp_label = 1
    for blob in blobs:
        seg = split_blob(blob, gray_enhanced, median_area, params)
        segs.append(seg)
        x, y, w, h = seg.bbox
        for lab in range(1, seg.labels.max() + 1):
            region = seg.labels == lab
            if not region.any():
                continue
            region = fill_holes(region)
            if region.sum() < 0.5 * params.a_min:
                continue
            target = canvas[y : y + h, x : x + w]
            target[region & (target == 0)] = tmp_label
            tmp_label += 1

    canvas = _relabel_raster_order(canvas)
    return canvas > 0, canvas, segs


def _relabel_raster_order(labels):
    flat = labels.ravel()
    ids, first = np.unique(flat, return_index=True)
    order = [i for _, i in sorted((f, i) for i, f in zip(ids, first) if i != 0)]
    mapping = np.zeros(labels.max() + 1, dtype=np.int32)
    for new, old in enumerate(order, start=1):
        mapping[old] = new
    return mapping[labels]

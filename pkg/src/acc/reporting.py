"""Per-colony feature extraction and file outputs (CSV tables, binary mask
and red-outline overlay)."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .blobs import region_circularity
from .imaging import save_mask, save_rgb
from .morphology import fill_holes

CSV_COLUMNS = ["image", "colony_id", "centroid_x", "centroid_y", "area_px",
               "circularity", "mean_r", "std_r", "mean_g", "std_g",
               "mean_b", "std_b", "mean_gray", "std_gray", "mean_pc", "std_pc"]


@dataclass
class ColonyRecord:
    image: str
    colony_id: int
    centroid_x: float
    centroid_y: float
    area: int
    circularity: float
    mean_rgb: tuple
    std_rgb: tuple
    mean_gray: float
    std_gray: float
    mean_pc: float
    std_pc: float


def extract_colony_features(labels, img, gray, pc_plane, image_id=""):
    """One record per positive label: unweighted centroid, area,
    circularity and intensity statistics over the region's pixels."""
    records = []
    for lab in range(1, int(labels.max()) + 1):
        region = labels == lab
        if not region.any():
            continue
        ys, xs = np.nonzero(region)
        rgb = img[region]
        g = gray[region]
        pc = pc_plane[region]
        records.append(ColonyRecord(
            image=image_id,
            colony_id=lab,
            centroid_x=float(xs.mean()),
            centroid_y=float(ys.mean()),
            area=int(region.sum()),
            circularity=region_circularity(region),
            mean_rgb=tuple(rgb.mean(axis=0)),
            std_rgb=tuple(rgb.std(axis=0)),
            mean_gray=float(g.mean()),
            std_gray=float(g.std()),
            mean_pc=float(pc.mean()),
            std_pc=float(pc.std()),
        ))
    return records


def _fmt(v):
    return f"{v:.6f}"


def write_outputs(records, i_seg, summary, out_dir, image_id, img=None):
    """Write ``<image>_colonies.csv``, ``<image>_summary.csv``,
    ``<image>_mask.png`` (colonies filled) and, when the source image is
    given, ``<image>_overlay.png`` with red colony outlines."""
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, image_id)

    with open(stem + "_colonies.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([r.image, r.colony_id, _fmt(r.centroid_x),
                        _fmt(r.centroid_y), r.area, _fmt(r.circularity),
                        _fmt(r.mean_rgb[0]), _fmt(r.std_rgb[0]),
                        _fmt(r.mean_rgb[1]), _fmt(r.std_rgb[1]),
                        _fmt(r.mean_rgb[2]), _fmt(r.std_rgb[2]),
                        _fmt(r.mean_gray), _fmt(r.std_gray),
                        _fmt(r.mean_pc), _fmt(r.std_pc)])

    with open(stem + "_summary.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["key", "value"])
        w.writerow(["image", image_id])
        w.writerow(["colony_count", len(records)])
        for k in sorted(summary):
            v = summary[k]
            w.writerow([k, _fmt(v) if isinstance(v, float) else v])

    save_mask(stem + "_mask.png", fill_holes(i_seg))

    if img is not None:
        overlay = np.array(img, dtype=np.float64)
        outline = _boundaries(np.asarray(i_seg, dtype=bool))
        overlay[outline] = (1.0, 0.0, 0.0)
        save_rgb(stem + "_overlay.png", overlay)


def _boundaries(mask):
    """8-connected boundary pixels of the foreground."""
    eroded = ndimage.binary_erosion(mask, structure=np.ones((3, 3)),
                                    border_value=0)
    return mask & ~eroded

"""Region-wise detection metrics against ground-truth colony marks.

A predicted region counts as a true positive when it contains at least one
ground-truth mark; marks outside every region, or sharing a region with
another mark, are false negatives.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .morphology import connected_components


class InputError(ValueError):
    """Raised for malformed ground-truth inputs."""


@dataclass
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    degenerate: bool = False  # no predictions or no marks


def match_gt_marks(labels, marks):
    """Count TP/FP/FN for a label map against (x, y) mark coordinates.

    Marks on watershed lines (label 0) count as outside every region.
    """
    labels = np.asarray(labels)
    h, w = labels.shape
    n_regions = int(labels.max())
    hit = set()
    for x, y in marks:
        xi, yi = int(round(x)), int(round(y))
        if not (0 <= xi < w and 0 <= yi < h):
            raise InputError(f"mark ({x}, {y}) outside image bounds")
        lab = int(labels[yi, xi])
        if lab > 0:
            hit.add(lab)
    tp = len(hit)
    fp = n_regions - tp
    fn = len(marks) - tp
    c = ConfusionCounts(tp=tp, fp=fp, fn=fn,
                        degenerate=(n_regions == 0 or len(marks) == 0))
    assert c.tp + c.fp == n_regions
    assert c.tp + c.fn == len(marks)
    return c


def prf1(c):
    """(precision, recall, F1); degenerate denominators yield 0 with the
    confusion flagged."""
    if c.tp + c.fp == 0 or c.tp + c.fn == 0 or c.tp == 0:
        return 0.0, 0.0, 0.0
    pre = c.tp / (c.tp + c.fp)
    rec = c.tp / (c.tp + c.fn)
    f1 = 2.0 / (1.0 / pre + 1.0 / rec)
    return pre, rec, f1


def f1_from_pr(pre, rec):
    """Harmonic mean of precision and recall."""
    if pre <= 0 or rec <= 0:
        return 0.0
    return 2.0 / (1.0 / pre + 1.0 / rec)


def count_rmse(pairs):
    """Root-mean-square of per-image relative count errors
    (predicted - truth) / truth."""
    errs = []
    for cnt, gt in pairs:
        if gt <= 0:
            raise InputError("ground-truth count must be positive")
        errs.append((cnt - gt) / gt)
    return float(np.sqrt(np.mean(np.square(errs))))


def marks_from_mask(gt_mask):
    """Reduce a ground-truth binary mask to one centroid mark per
    8-connected component, so mask and mark ground truths share one
    matching code path."""
    labels = connected_components(gt_mask)
    marks = []
    for lab in range(1, int(labels.max()) + 1):
        ys, xs = np.nonzero(labels == lab)
        marks.append((float(xs.mean()), float(ys.mean())))
    return marks


def load_marks_csv(path):
    """Read a ``image,x,y`` CSV into {image: [(x, y), ...]}."""
    out = {}
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header and header[:3] != ["image", "x", "y"]:
            f.seek(0)
            reader = csv.reader(f)
        for row in reader:
            if not row:
                continue
            image, x, y = row[0], float(row[1]), float(row[2])
            out.setdefault(image, []).append((x, y))
    return out


def write_metrics_csv(path, rows):
    """Write per-image metric rows:
    image, tp, fp, fn, precision, recall, f1, pred_count, gt_count."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["image", "tp", "fp", "fn", "precision", "recall", "f1",
                    "pred_count", "gt_count"])
        for r in rows:
            w.writerow([r["image"], r["tp"], r["fp"], r["fn"],
                        f"{r['precision']:.6f}", f"{r['recall']:.6f}",
                        f"{r['f1']:.6f}", r["pred_count"], r["gt_count"]])

"""Per-image orchestration and batch execution.

Each image goes through three phases: channel decomposition and selection,
blob extraction, and fuzzy watershed splitting; results are written per
image and summarized per batch.  A failing image never aborts the batch.
"""

from __future__ import annotations

import csv
import glob
import os
import traceback
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import blobs as blobmod
from . import evaluation, reporting, splitting, texture
from .imaging import gaussian_filter, load_mask, load_rgb, minmax_normalize, to_gray
from .pca import build_observation_matrix, pca_transform


def enhance_gray(gray, cfg):
    """Gray-plane preparation for watershed: Gaussian smoothing, adaptive
    equalization (no clip limit) and min-max normalization."""
    sx, sy = cfg.gray_smooth
    smoothed = gaussian_filter(gray, sx, sy)
    ahe = texture.ClaheParams(tiles_x=cfg.clahe_tiles[0],
                              tiles_y=cfg.clahe_tiles[1], clip_limit=1.0)
    enhanced = texture.clahe(minmax_normalize(smoothed), ahe)
    return minmax_normalize(enhanced)


def run_image(cfg, path, gt_marks=None, write=True):
    """Run the full pipeline on one image.

    Returns a dict with colony records, counts, the chosen PC channel and,
    when ground-truth marks are supplied, detection metrics.
    """
    image_id = os.path.splitext(os.path.basename(path))[0]
    img = load_rgb(path)
    h, w = img.shape[:2]

    dec = pca_transform(build_observation_matrix(img), w, h)
    channel, contrasts = texture.select_pc_channel(
        dec.planes, cfg.clahe_params(), levels=cfg.glcm_levels)
    pc_plane = dec.planes[channel]

    sx, sy = cfg.pca_smooth
    residual = blobmod.suppress_background(pc_plane, cfg.r_obrcbr, (sx, sy))
    features = blobmod.build_pixel_features(residual)
    blob_mask = blobmod.kmeans_blob_mask(features, w, h)
    blob_list = blobmod.postprocess_blobs(blob_mask, cfg.a_min,
                                          cfg.blob_dilate_radius)

    gray = to_gray(img)
    gray_enhanced = enhance_gray(gray, cfg)
    i_seg, labels, segs = splitting.segment_image(blob_list, gray_enhanced,
                                                  cfg.seg_params())

    records = reporting.extract_colony_features(labels, img, gray, pc_plane,
                                                image_id)
    result = {
        "image": image_id,
        "count": len(records),
        "channel": channel,
        "contrasts": contrasts,
        "records": records,
        "labels": labels,
        "i_seg": i_seg,
    }

    if gt_marks is not None:
        c = evaluation.match_gt_marks(labels, gt_marks)
        pre, rec, f1 = evaluation.prf1(c)
        result["metrics"] = {
            "image": image_id, "tp": c.tp, "fp": c.fp, "fn": c.fn,
            "precision": pre, "recall": rec, "f1": f1,
            "pred_count": len(records), "gt_count": len(gt_marks),
        }

    if write:
        h_opts = [s.h_opt for s in segs if s.h_opt is not None]
        summary = {
            "pc_channel": channel + 1,
            "blob_count": len(blob_list),
            "h_opt_mean": float(np.mean(h_opts)) if h_opts else 0.0,
            "h_opt_min": float(min(h_opts)) if h_opts else 0.0,
            "h_opt_max": float(max(h_opts)) if h_opts else 0.0,
            "a_min": cfg.a_min,
            "a_max": cfg.a_max,
            "r_obrcbr": cfg.r_obrcbr,
        }
        reporting.write_outputs(records, i_seg, summary, cfg.output,
                                image_id, img=img)
    return result


def _collect_inputs(cfg):
    if os.path.isdir(cfg.input):
        paths = []
        for ext in ("*.png", "*.tif", "*.tiff", "*.jpg", "*.jpeg"):
            paths.extend(glob.glob(os.path.join(cfg.input, ext)))
    else:
        paths = glob.glob(cfg.input)
    return sorted(paths)


def _gt_for(cfg, path):
    image_id = os.path.splitext(os.path.basename(path))[0]
    if cfg.gt_marks:
        return evaluation.load_marks_csv(cfg.gt_marks).get(image_id)
    if cfg.gt_masks:
        for ext in (".png", ".tif", ".tiff"):
            gt_path = os.path.join(cfg.gt_masks, image_id + ext)
            if os.path.exists(gt_path):
                return evaluation.marks_from_mask(load_mask(gt_path))
    return None


def _worker(args):
    cfg, path = args
    try:
        gt = _gt_for(cfg, path)
        res = run_image(cfg, path, gt_marks=gt)
        return {"image": res["image"], "status": "ok", "count": res["count"],
                "channel": res["channel"], "metrics": res.get("metrics")}
    except Exception:
        image_id = os.path.splitext(os.path.basename(path))[0]
        return {"image": image_id, "status": "failed",
                "error": traceback.format_exc(limit=5)}


def run_batch(cfg):
    """Process every input image; returns (exit_code, per-image rows).

    Exit codes: 0 all images ok, 1 partial failures, 2 usage error.
    Outputs are per-image, so results are independent of worker count.
    """
    paths = _collect_inputs(cfg)
    if not paths:
        return 2, []
    os.makedirs(cfg.output, exist_ok=True)

    jobs = [(cfg, p) for p in paths]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_worker, jobs))
    else:
        results = [_worker(j) for j in jobs]
    results.sort(key=lambda r: r["image"])

    with open(os.path.join(cfg.output, "batch_summary.csv"), "w",
              newline="") as f:
        w = csv.writer(f)
        w.writerow(["image", "status", "colony_count", "pc_channel"])
        for r in results:
            channel = r["channel"] + 1 if r["status"] == "ok" else ""
            w.writerow([r["image"], r["status"], r.get("count", ""), channel])

    metric_rows = [r["metrics"] for r in results if r.get("metrics")]
    if metric_rows:
        evaluation.write_metrics_csv(os.path.join(cfg.output, "metrics.csv"),
                                     metric_rows)

    failures = [r for r in results if r["status"] != "ok"]
    return (1 if failures else 0), results

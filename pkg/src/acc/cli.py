"""Command-line interface: ``acc run`` for batch segmentation, ``acc eval``
for metrics from saved masks, ``acc synth`` for synthetic dishes."""

from __future__ import annotations

import csv
import json
import os
import sys
from dataclasses import replace

import click
import numpy as np

from . import evaluation, pipeline, synth
from .config import PipelineConfig, load_config, serialize_config
from .imaging import load_mask, save_mask, save_rgb
from .morphology import connected_components


@click.group()
def main():
    """Automated colony counting for clonogenic assay images."""


@main.command(name="run")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="INI configuration file")
@click.option("--input", "input_", default=None, help="input dir or glob")
@click.option("--output", default=None, help="output directory")
@click.option("--gt-marks", default=None, help="ground-truth marks CSV")
@click.option("--gt-masks", default=None, help="ground-truth mask directory")
@click.option("--threads", default=None, type=int, help="worker count")
def run_cmd(config_path, input_, output, gt_marks, gt_masks, threads):
    """Segment and count every image of a batch."""
    try:
        cfg = load_config(config_path) if config_path else PipelineConfig()
        overrides = {k: v for k, v in [("input", input_), ("output", output),
                                       ("gt_marks", gt_marks),
                                       ("gt_masks", gt_masks),
                                       ("threads", threads)] if v is not None}
        cfg = replace(cfg, **overrides).validate()
        if not cfg.input:
            raise click.UsageError("no input given (--input or config)")
    except click.UsageError:
        raise
    except Exception as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(2)

    code, results = pipeline.run_batch(cfg)
    if code == 2:
        click.echo("no input images found", err=True)
        sys.exit(2)
    for r in results:
        if r["status"] == "ok":
            click.echo(f"{r['image']}: {r['count']} colonies")
        else:
            click.echo(f"{r['image']}: FAILED", err=True)
    sys.exit(code)


@main.command(name="eval")
@click.option("--masks", required=True,
              help="directory of predicted mask PNGs (<image>_mask.png)")
@click.option("--gt-marks", default=None, help="ground-truth marks CSV")
@click.option("--gt-masks", default=None, help="ground-truth mask directory")
@click.option("--output", default="metrics.csv", help="metrics CSV path")
def eval_cmd(masks, gt_marks, gt_masks, output):
    """Compute detection metrics from saved segmentation masks."""
    if not gt_marks and not gt_masks:
        click.echo("need --gt-marks or --gt-masks", err=True)
        sys.exit(2)
    marks_by_image = evaluation.load_marks_csv(gt_marks) if gt_marks else {}
    rows = []
    for name in sorted(os.listdir(masks)):
        if not name.endswith("_mask.png"):
            continue
        image_id = name[: -len("_mask.png")]
        labels = connected_components(load_mask(os.path.join(masks, name)))
        if gt_marks:
            marks = marks_by_image.get(image_id)
        else:
            gt_path = os.path.join(gt_masks, image_id + ".png")
            marks = (evaluation.marks_from_mask(load_mask(gt_path))
                     if os.path.exists(gt_path) else None)
        if marks is None:
            continue
        c = evaluation.match_gt_marks(labels, marks)
        pre, rec, f1 = evaluation.prf1(c)
        rows.append({"image": image_id, "tp": c.tp, "fp": c.fp, "fn": c.fn,
                     "precision": pre, "recall": rec, "f1": f1,
                     "pred_count": int(labels.max()), "gt_count": len(marks)})
    if not rows:
        click.echo("no evaluable images", err=True)
        sys.exit(2)
    evaluation.write_metrics_csv(output, rows)
    mean_f1 = float(np.mean([r["f1"] for r in rows]))
    click.echo(f"{len(rows)} images, mean F1 {mean_f1:.3f}")


@main.command(name="synth")
@click.option("--spec", "spec_path", type=click.Path(exists=True),
              help="JSON file of generator fields")
@click.option("--out", "out_dir", required=True, help="output directory")
@click.option("--seed", default=None, type=int, help="override the seed")
@click.option("--count", default=None, type=int, help="override colony count")
def synth_cmd(spec_path, out_dir, seed, count):
    """Generate a synthetic dish with exact ground truth."""
    kwargs = {}
    if spec_path:
        with open(spec_path) as f:
            kwargs = json.load(f)
    for key in ("radius_range", "eccentricity_range", "stain_color",
                "background"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    if seed is not None:
        kwargs["seed"] = seed
    if count is not None:
        kwargs["colony_count"] = count
    spec = synth.SynthSpec(**kwargs)
    dish = synth.generate(spec)

    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, f"dish_{spec.seed:04d}")
    save_rgb(stem + ".png", dish.image)
    save_mask(stem + "_gtmask.png", dish.union_mask)
    with open(stem + "_marks.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["image", "x", "y"])
        for x, y in dish.marks:
            w.writerow([f"dish_{spec.seed:04d}", f"{x:.2f}", f"{y:.2f}"])
    click.echo(f"wrote {stem}.png with {len(dish.marks)} colonies")


@main.command(name="config")
def config_cmd():
    """Print a default configuration file to stdout."""
    click.echo(serialize_config(PipelineConfig()), nl=False)

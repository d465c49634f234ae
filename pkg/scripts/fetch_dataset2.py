#!/usr/bin/env python3
"""Download the public 12-image bacterial dish benchmark used by the
full-dataset acceptance check.

The images and ground-truth masks are hosted in the AutoCellSeg repository
(https://github.com/AngeloTorelli/AutoCellSeg, GPL); this script fetches the
four species folders (E. coli, Klebsiella pneumoniae, Pseudomonas
aeruginosa, Staphylococcus aureus, three dishes each) and writes a manifest
the acceptance suite reads.

Usage:
    python3 scripts/fetch_dataset2.py [--dest data/dataset2]

Layout produced:
    <dest>/<species>_<k>.jpg        dish image (k = 1..3 per species)
    <dest>/<species>_<k>_gt.png     binary ground-truth mask
    <dest>/manifest.csv             image,species,path,gt_mask
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import urllib.request

BASE = ("https://raw.githubusercontent.com/AngeloTorelli/AutoCellSeg/"
        "master/DATA/samples")

#: remote folder name and the three dish image stems per species
SPECIES = {
    "ecoli": ("E.coli", ["1", "2", "3"]),
    "klebsiella": ("Klebsiella_pneumoniae", ["1", "2", "3"]),
    "pseudomonas": ("Pseudomonas_aeruginosa", ["1", "2", "3"]),
    "staphylococcus": ("Staphylococcus_aureus", ["1", "2", "3"]),
}


def fetch(url, dest):
    print(f"  {url} -> {dest}")
    with urllib.request.urlopen(url, timeout=60) as r, open(dest, "wb") as f:
        f.write(r.read())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dest", default="data/dataset2")
    args = ap.parse_args()
    os.makedirs(args.dest, exist_ok=True)

    rows = []
    for species, (folder, stems) in SPECIES.items():
        for k, stem in enumerate(stems, start=1):
            img = os.path.join(args.dest, f"{species}_{k}.jpg")
            gt = os.path.join(args.dest, f"{species}_{k}_gt.png")
            fetch(f"{BASE}/{folder}/{stem}.jpg", img)
            fetch(f"{BASE}/{folder}/{stem}_gt.png", gt)
            rows.append({"image": f"{species}_{k}", "species": species,
                         "path": img, "gt_mask": gt})

    manifest = os.path.join(args.dest, "manifest.csv")
    with open(manifest, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["image", "species", "path",
                                          "gt_mask"])
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {manifest} ({len(rows)} images)")


if __name__ == "__main__":
    try:
        main()
    except OSError as e:
        print(f"download failed: {e}", file=sys.stderr)
        print("this environment may have no outbound network access",
              file=sys.stderr)
        sys.exit(1)

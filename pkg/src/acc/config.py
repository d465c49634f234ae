"""Pipeline configuration: a flat INI file with sections, mirroring the
tunable acquisition parameters plus the fixed segmentation constants."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, fields

from .imaging import ParameterError
from .splitting import SegParams
from .texture import ClaheParams


@dataclass
class PipelineConfig:
    input: str = ""            # directory or glob of input images
    output: str = "out"
    pca_smooth: tuple = (3.0, 3.0)
    gray_smooth: tuple = (3.0, 3.0)
    r_obrcbr: int = 40
    a_min: float = 40.0
    a_max: float = 8000.0
    h_min: float = 0.15
    h_max: float = 0.37
    dh: float = 0.01
    circ_edges: tuple = (0.15, 0.5, 0.9, 1.0)
    clahe_tiles: tuple = (16, 16)
    clahe_clip: float = 0.008
    glcm_levels: int = 64
    a_thresh_factor: float = 0.6
    circ_split: float = 0.6
    max_recursion_depth: int = 5
    blob_dilate_radius: int = 1
    gt_marks: str = ""         # optional marks CSV
    gt_masks: str = ""         # optional directory of GT mask PNGs
    threads: int = 1

    def seg_params(self):
        return SegParams(
            a_min=self.a_min, a_max=self.a_max, h_min=self.h_min,
            h_max=self.h_max, dh=self.dh, circ_edges=self.circ_edges,
            a_thresh_factor=self.a_thresh_factor, circ_split=self.circ_split,
            max_recursion_depth=self.max_recursion_depth,
            gray_smooth=self.gray_smooth)

    def clahe_params(self):
        return ClaheParams(tiles_x=self.clahe_tiles[0],
                           tiles_y=self.clahe_tiles[1],
                           clip_limit=self.clahe_clip)

    def validate(self):
        self.seg_params()
        self.clahe_params()
        if self.r_obrcbr < 1:
            raise ParameterError("r_obrcbr must be >= 1")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")
        return self


_SECTIONS = {
    "io": ["input", "output", "gt_marks", "gt_masks"],
    "pca": ["pca_smooth", "r_obrcbr"],
    "gray": ["gray_smooth"],
    "texture": ["clahe_tiles", "clahe_clip", "glcm_levels"],
    "blob": ["a_min", "a_max", "blob_dilate_radius"],
    "watershed": ["h_min", "h_max", "dh", "circ_edges", "a_thresh_factor",
                  "circ_split", "max_recursion_depth"],
    "runtime": ["threads"],
}

_TUPLE_FIELDS = {"pca_smooth", "gray_smooth", "circ_edges", "clahe_tiles"}
_INT_FIELDS = {"r_obrcbr", "glcm_levels", "max_recursion_depth",
               "blob_dilate_radius", "threads"}
_STR_FIELDS = {"input", "output", "gt_marks", "gt_masks"}


def _parse_value(name, raw):
    raw = raw.strip()
    if name in _STR_FIELDS:
        return raw
    if name in _TUPLE_FIELDS:
        parts = [p for p in raw.replace(",", " ").split() if p]
        conv = int if name == "clahe_tiles" else float
        return tuple(conv(p) for p in parts)
    if name in _INT_FIELDS:
        return int(raw)
    return float(raw)


def _format_value(name, value):
    if name in _TUPLE_FIELDS:
        return ", ".join(repr(v) for v in value)
    return str(value)


def parse_config(text):
    """Parse INI text into a PipelineConfig; unknown keys are rejected."""
    cp = configparser.ConfigParser()
    cp.read_string(text)
    known = {f.name for f in fields(PipelineConfig)}
    kwargs = {}
    for section in cp.sections():
        for key, raw in cp.items(section):
            if key not in known:
                raise ParameterError(f"unknown config key: {key}")
            kwargs[key] = _parse_value(key, raw)
    return PipelineConfig(**kwargs).validate()


def serialize_config(cfg):
    """Render a PipelineConfig back to INI text (parse/serialize round-trips)."""
    cp = configparser.ConfigParser()
    for section, names in _SECTIONS.items():
        cp[section] = {n: _format_value(n, getattr(cfg, n)) for n in names}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def load_config(path):
    with open(path) as f:
        return parse_config(f.read())

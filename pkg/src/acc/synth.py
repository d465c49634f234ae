"""Deterministic synthetic dish generator with exact ground truth.

Renders stained elliptical colonies on a dish with optional illumination
gradient, sensor noise and a flask ring.  The same spec and seed always
produce identical bytes, so generated dishes double as regression and
acceptance fixtures.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class PackingError(RuntimeError):
    """Raised when colonies cannot be placed within the retry budget."""


@dataclass(frozen=True)
class SynthSpec:
    width: int = 512
    height: int = 512
    colony_count: int = 30
    radius_range: tuple = (9.0, 16.0)
    eccentricity_range: tuple = (1.0, 1.3)  # major/minor axis ratio
    overlap_fraction: float = 0.0           # fraction of colonies placed touching
    stain_color: tuple = (0.45, 0.20, 0.55) # colony rgb before darkness scaling
    darkness: float = 0.55                  # contrast of colony vs background
    core_shading: float = 0.35              # center-to-rim density falloff
    background: tuple = (0.93, 0.90, 0.86)
    gradient_amplitude: float = 0.0
    noise_sigma: float = 0.0
    flask_ring: bool = False
    seed: int = 0
    max_tries: int = 5000


@dataclass
class SynthDish:
    image: np.ndarray   # (H, W, 3) float64 in [0, 1]
    marks: list         # [(x, y)] true colony centers
    masks: list         # per-colony bool arrays (exact rendered supports)

    @property
    def union_mask(self):
        out = np.zeros(self.image.shape[:2], dtype=bool)
        for m in self.masks:
            out |= m
        return out


def _place_colonies(spec, rng):
    """Sample ellipse (cx, cy, a, b, angle) tuples.  Non-overlapping
    colonies keep a small clearance; a fraction is deliberately placed
    touching an earlier colony to exercise blob splitting."""
    placed = []
    margin = spec.radius_range[1] + 4
    tries = 0
    while len(placed) < spec.colony_count:
        if tries > spec.max_tries:
            raise PackingError("could not place all colonies; dish too crowded")
        tries += 1
        r = rng.uniform(*spec.radius_range)
        ecc = rng.uniform(*spec.eccentricity_range)
        a, b = r * ecc, r / ecc
        angle = rng.uniform(0, np.pi)
        touch = bool(placed) and rng.random() < spec.overlap_fraction
        if touch:
            # near-tangent contact: confluent colonies meet at a shallow neck
            anchor = int(rng.integers(len(placed)))
            ox, oy, oa, ob, _ = placed[anchor]
            d = (max(oa, ob) + max(a, b)) * rng.uniform(1.00, 1.08)
            phi = rng.uniform(0, 2 * np.pi)
            cx, cy = ox + d * np.cos(phi), oy + d * np.sin(phi)
            if not (margin <= cx < spec.width - margin
                    and margin <= cy < spec.height - margin):
                continue
            ok = True
            for k, (px, py, pa, pb, _) in enumerate(placed):
                if k == anchor:
                    continue
                if np.hypot(cx - px, cy - py) < max(a, b) + max(pa, pb) + 5:
                    ok = False
                    break
            if not ok:
                continue
        else:
            cx = rng.uniform(margin, spec.width - margin)
            cy = rng.uniform(margin, spec.height - margin)
            ok = True
            for ox, oy, oa, ob, _ in placed:
                if np.hypot(cx - ox, cy - oy) < max(a, b) + max(oa, ob) + 5:
                    ok = False
                    break
            if not ok:
                continue
        placed.append((cx, cy, a, b, angle))
    return placed


def _ellipse_field(spec, cx, cy, a, b, angle):
    """Signed interior field: >= 0 inside the ellipse, scaled so one unit
    corresponds to roughly one pixel near the boundary."""
    yy, xx = np.mgrid[0 : spec.height, 0 : spec.width]
    dx, dy = xx - cx, yy - cy
    u = dx * np.cos(angle) + dy * np.sin(angle)
    v = -dx * np.sin(angle) + dy * np.cos(angle)
    rho = np.sqrt((u / a) ** 2 + (v / b) ** 2)
    return (1.0 - rho) * min(a, b)


def generate(spec):
    """Render the dish described by ``spec``; identical spec and seed give
    identical output arrays."""
    if spec.colony_count < 0:
        raise ValueError("colony_count must be >= 0")
    rng = np.random.default_rng(spec.seed)
    h, w = spec.height, spec.width

    img = np.empty((h, w, 3))
    img[:] = spec.background
    if spec.gradient_amplitude > 0:
        gy = np.linspace(-1, 1, h)[:, None]
        gx = np.linspace(-1, 1, w)[None, :]
        grad = spec.gradient_amplitude * 0.5 * (gy + gx)
        img += grad[:, :, None]

    if spec.flask_ring:
        yy, xx = np.mgrid[0:h, 0:w]
        rr = np.hypot(yy - (h - 1) / 2.0, xx - (w - 1) / 2.0)
        ring_r = 0.48 * min(h, w)
        ring = np.exp(-0.5 * ((rr - ring_r) / 2.0) ** 2)
        img -= 0.35 * ring[:, :, None]

    placements = _place_colonies(spec, rng)
    marks = []
    masks = []
    colony_rgb = np.asarray(spec.background) - spec.darkness * (
        np.asarray(spec.background) - np.asarray(spec.stain_color))
    for cx, cy, a, b, angle in placements:
        fieldv = _ellipse_field(spec, cx, cy, a, b, angle)
        mask = fieldv >= 0
        alpha = np.clip(fieldv + 1.0, 0.0, 1.0)  # 1-px soft edge
        if spec.core_shading > 0:
            # stain density falls off from center to rim
            rho = 1.0 - np.clip(fieldv, 0.0, None) / min(a, b)
            alpha = alpha * (1.0 - spec.core_shading * np.clip(rho, 0.0, 1.0) ** 2)
        img = img * (1 - alpha[:, :, None]) + alpha[:, :, None] * colony_rgb
        masks.append(mask)
        marks.append((float(cx), float(cy)))

    if spec.noise_sigma > 0:
        img = img + rng.normal(0.0, spec.noise_sigma, size=img.shape)

    return SynthDish(image=np.clip(img, 0.0, 1.0), marks=marks, masks=masks)

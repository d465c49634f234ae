import dataclasses

import numpy as np
import pytest

from acc.synth import PackingError, SynthSpec, generate


BASE = SynthSpec(width=256, height=256, colony_count=8, seed=5)


def test_deterministic_bytes():
    d1 = generate(BASE)
    d2 = generate(BASE)
    assert np.array_equal(d1.image, d2.image)
    assert d1.marks == d2.marks
    for a, b in zip(d1.masks, d2.masks):
        assert np.array_equal(a, b)


def test_seed_changes_output():
    d1 = generate(BASE)
    d2 = generate(dataclasses.replace(BASE, seed=6))
    assert not np.array_equal(d1.image, d2.image)


def test_counts_and_ranges():
    dish = generate(BASE)
    assert dish.image.shape == (256, 256, 3)
    assert dish.image.min() >= 0.0 and dish.image.max() <= 1.0
    assert len(dish.marks) == 8
    assert len(dish.masks) == 8
    for x, y in dish.marks:
        assert 0 <= x < 256 and 0 <= y < 256


def test_mask_areas_match_radii():
    dish = generate(dataclasses.replace(BASE, eccentricity_range=(1.0, 1.0)))
    lo = np.pi * BASE.radius_range[0] ** 2
    hi = np.pi * BASE.radius_range[1] ** 2
    for m in dish.masks:
        assert 0.8 * lo <= m.sum() <= 1.2 * hi


def test_marks_inside_their_masks():
    dish = generate(BASE)
    for (x, y), m in zip(dish.marks, dish.masks):
        assert m[int(round(y)), int(round(x))]


def test_colonies_darker_than_background():
    dish = generate(BASE)
    union = dish.union_mask
    inside = dish.image[union].mean()
    outside = dish.image[~union].mean()
    assert inside < outside - 0.1


def test_no_overlap_without_touch_placement():
    dish = generate(dataclasses.replace(BASE, colony_count=12, seed=7))
    total = sum(m.sum() for m in dish.masks)
    assert total == dish.union_mask.sum()  # pairwise disjoint


def test_touch_placement_produces_contact():
    spec = dataclasses.replace(BASE, colony_count=20, overlap_fraction=0.5,
                               width=512, height=512, seed=8)
    dish = generate(spec)
    dists = []
    for i, (xi, yi) in enumerate(dish.marks):
        for xj, yj in dish.marks[i + 1 :]:
            dists.append(np.hypot(xi - xj, yi - yj))
    # some pairs sit near tangency (within ~2.2 max radii)
    assert min(dists) < 2.2 * spec.radius_range[1]


def test_noise_and_gradient_fields():
    spec = dataclasses.replace(BASE, noise_sigma=0.02, gradient_amplitude=0.1)
    dish = generate(spec)
    clean = generate(dataclasses.replace(spec, noise_sigma=0.0,
                                         gradient_amplitude=0.0))
    assert not np.array_equal(dish.image, clean.image)
    assert dish.image.min() >= 0.0 and dish.image.max() <= 1.0


def test_flask_ring_darkens_rim():
    spec = dataclasses.replace(BASE, colony_count=0, flask_ring=True)
    dish = generate(spec)
    ring_r = int(0.48 * 256)
    center = dish.image[128, 128].mean()
    rim = dish.image[128, 128 + ring_r].mean()
    assert rim < center - 0.2


def test_overcrowded_dish_raises():
    spec = dataclasses.replace(BASE, colony_count=500, max_tries=2000)
    with pytest.raises(PackingError):
        generate(spec)


def test_rejects_negative_count():
    with pytest.raises(ValueError):
        generate(dataclasses.replace(BASE, colony_count=-1))

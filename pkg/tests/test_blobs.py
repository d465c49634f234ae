import numpy as np
import pytest

from acc.blobs import (build_pixel_features, kmeans_blob_mask,
                       postprocess_blobs, region_circularity,
                       suppress_background)
from acc.imaging import ParameterError

import oracles


def disk_mask(shape, cy, cx, r):
    yy, xx = np.mgrid[0 : shape[0], 0 : shape[1]]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r


def test_suppress_background_constant():
    out = suppress_background(np.full((24, 24), 0.6), 4, (1.0, 1.0))
    assert np.allclose(out, 0.0)


def test_suppress_background_block_residual():
    plane = np.full((64, 64), 0.3)
    plane[28:33, 28:33] = 0.9
    out = suppress_background(plane, 20, (1.0, 1.0))
    assert out[30, 30] == 1.0
    far = np.ones_like(plane, dtype=bool)
    far[20:41, 20:41] = False
    assert out[far].max() < 0.2


def test_suppress_background_gradient_flattened():
    yy, xx = np.mgrid[0:48, 0:48]
    plane = 0.2 + 0.4 * xx / 48.0
    background = oracles.open_close_by_reconstruction(plane, 2)
    # reconstruction keeps the slow ramp, so the residual is tiny
    assert np.abs(plane - background).max() < 0.1


def test_pixel_features_single_pixel():
    feats = build_pixel_features(np.array([[0.7]]))
    assert feats.shape == (9, 1)
    assert np.allclose(feats, 0.7)


def test_pixel_features_center_order():
    plane = np.arange(9, dtype=float).reshape(3, 3)
    feats = build_pixel_features(plane)
    center = feats[:, 4]
    # N, NE, E, SE, S, SW, W, NW around value 4
    assert np.array_equal(center, [4, 1, 2, 5, 8, 7, 6, 3, 0])


def test_pixel_features_corner_padding():
    plane = np.arange(9, dtype=float).reshape(3, 3)
    feats = build_pixel_features(plane)
    corner = feats[:, 0]  # top-left pixel 0
    # replicate padding clamps out-of-range neighbors
    assert np.array_equal(corner, [0, 0, 1, 1, 4, 3, 3, 0, 0])


def test_pixel_features_row0_is_plane():
    rng = np.random.default_rng(40)
    plane = rng.random((7, 9))
    feats = build_pixel_features(plane)
    assert np.array_equal(feats[0], plane.ravel())


def test_kmeans_all_zero():
    feats = np.zeros((9, 12))
    mask = kmeans_blob_mask(feats, 4, 3)
    assert not mask.any()


def test_kmeans_exact_bisection():
    feats = np.zeros((9, 10))
    feats[:, 5:] = 1.0
    mask = kmeans_blob_mask(feats, 10, 1)
    assert np.array_equal(mask.ravel(), np.arange(10) >= 5)


def test_kmeans_matches_two_cluster_oracle():
    rng = np.random.default_rng(41)
    n = 200
    labels_true = rng.random(n) < 0.5
    feats = np.where(labels_true, 0.9, 0.1) + rng.normal(0, 0.05, n)
    feats = np.clip(np.tile(feats, (9, 1)), 0, 1)
    mask = kmeans_blob_mask(feats, n, 1)
    assert np.array_equal(mask.ravel(), labels_true)


def test_kmeans_objective_descends():
    rng = np.random.default_rng(42)
    z = rng.random((9, 300))

    # re-run Lloyd manually, tracking the objective
    c0 = np.zeros(9)
    c1 = np.ones(9)
    prev = np.inf
    assign = None
    for _ in range(100):
        d0 = ((z - c0[:, None]) ** 2).sum(axis=0)
        d1 = ((z - c1[:, None]) ** 2).sum(axis=0)
        new_assign = d1 < d0
        obj = d0[~new_assign].sum() + d1[new_assign].sum()
        assert obj <= prev + 1e-9
        prev = obj
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        if (~assign).any():
            c0 = z[:, ~assign].mean(axis=1)
        if assign.any():
            c1 = z[:, assign].mean(axis=1)


def test_postprocess_empty():
    assert postprocess_blobs(np.zeros((8, 8), dtype=bool), 10) == []


def test_postprocess_two_disks():
    mask = disk_mask((64, 64), 16, 16, 10) | disk_mask((64, 64), 44, 44, 10)
    blobs = postprocess_blobs(mask, 40)
    assert len(blobs) == 2
    for b in blobs:
        assert b.circularity >= 0.85
        assert b.area >= mask.sum() / 2  # dilation only grows regions


def test_postprocess_drops_specks():
    mask = np.zeros((16, 16), dtype=bool)
    mask[3, 3:6] = True
    assert postprocess_blobs(mask, 40) == []


def test_postprocess_mask_monotone():
    rng = np.random.default_rng(43)
    mask = rng.random((32, 32)) > 0.7
    blobs = postprocess_blobs(mask, 1)
    covered = np.zeros((32, 32), dtype=bool)
    for b in blobs:
        x, y, w, h = b.bbox
        covered[y : y + h, x : x + w] |= b.mask
    assert (covered | ~mask).all()  # postprocessed area contains the input


def test_postprocess_rejects_bad_amin():
    with pytest.raises(ParameterError):
        postprocess_blobs(np.zeros((4, 4), dtype=bool), 0)


def test_circularity_disk_vs_bar():
    disk = disk_mask((40, 40), 20, 20, 12)
    bar = np.zeros((40, 40), dtype=bool)
    bar[19:22, 2:38] = True
    assert region_circularity(disk) > 0.85
    assert region_circularity(bar) < 0.5
    assert 0.0 <= region_circularity(bar) <= 1.0

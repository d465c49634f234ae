import numpy as np
import pytest

from acc.evaluation import (ConfusionCounts, InputError, count_rmse,
                            f1_from_pr, load_marks_csv, marks_from_mask,
                            match_gt_marks, prf1, write_metrics_csv)

import oracles


def label_map():
    labels = np.zeros((20, 20), dtype=np.int32)
    labels[2:6, 2:6] = 1
    labels[10:15, 10:15] = 2
    labels[2:6, 14:18] = 3
    return labels


def test_match_basic():
    c = match_gt_marks(label_map(), [(3, 3), (12, 12)])
    assert (c.tp, c.fp, c.fn) == (2, 1, 0)
    assert not c.degenerate


def test_match_mark_outside_regions_is_fn():
    c = match_gt_marks(label_map(), [(0, 0)])
    assert (c.tp, c.fp, c.fn) == (0, 3, 1)


def test_match_two_marks_one_region():
    # a merged detection covering two colonies yields one TP and one FN
    c = match_gt_marks(label_map(), [(3, 3), (4, 4)])
    assert (c.tp, c.fp, c.fn) == (1, 2, 1)


def test_match_identities_random():
    rng = np.random.default_rng(70)
    labels = label_map()
    for _ in range(20):
        marks = [(float(rng.uniform(0, 19)), float(rng.uniform(0, 19)))
                 for _ in range(rng.integers(0, 8))]
        c = match_gt_marks(labels, marks)
        assert c.tp + c.fp == labels.max()
        assert c.tp + c.fn == len(marks)
        ref = oracles.point_in_region_confusion(labels, marks)
        assert (c.tp, c.fp, c.fn) == ref


def test_match_rejects_out_of_bounds():
    with pytest.raises(InputError):
        match_gt_marks(label_map(), [(25, 3)])


def test_match_degenerate_flags():
    assert match_gt_marks(np.zeros((4, 4), dtype=np.int32), [(1, 1)]).degenerate
    assert match_gt_marks(label_map(), []).degenerate


def test_prf1_hand_values():
    pre, rec, f1 = prf1(ConfusionCounts(tp=8, fp=2, fn=4))
    assert pre == pytest.approx(0.8)
    assert rec == pytest.approx(8 / 12)
    assert f1 == pytest.approx(2 * 0.8 * (8 / 12) / (0.8 + 8 / 12))


def test_prf1_degenerate_zero():
    assert prf1(ConfusionCounts(tp=0, fp=0, fn=0)) == (0.0, 0.0, 0.0)
    assert prf1(ConfusionCounts(tp=0, fp=3, fn=2)) == (0.0, 0.0, 0.0)


def test_f1_from_pr():
    assert f1_from_pr(1.0, 1.0) == 1.0
    assert f1_from_pr(0.0, 0.5) == 0.0
    assert f1_from_pr(0.5, 1.0) == pytest.approx(2 / 3)


def test_count_rmse_hand_value():
    # errors: +0.1 and -0.2 -> sqrt((0.01 + 0.04) / 2)
    val = count_rmse([(110, 100), (40, 50)])
    assert val == pytest.approx(np.sqrt(0.025))


def test_count_rmse_exact_counts():
    assert count_rmse([(30, 30), (7, 7)]) == 0.0


def test_count_rmse_rejects_zero_truth():
    with pytest.raises(InputError):
        count_rmse([(5, 0)])


def test_marks_from_mask_centroids():
    mask = np.zeros((20, 20), dtype=bool)
    mask[2:6, 2:6] = True
    mask[10:13, 14:17] = True
    marks = marks_from_mask(mask)
    assert len(marks) == 2
    assert marks[0] == (3.5, 3.5)
    assert marks[1] == (15.0, 11.0)


def test_marks_csv_roundtrip(tmp_path):
    p = tmp_path / "marks.csv"
    p.write_text("image,x,y\ndish_0001,3.5,4.0\ndish_0001,10,11\ndish_0002,1,2\n")
    marks = load_marks_csv(str(p))
    assert marks["dish_0001"] == [(3.5, 4.0), (10.0, 11.0)]
    assert marks["dish_0002"] == [(1.0, 2.0)]


def test_marks_csv_headerless(tmp_path):
    p = tmp_path / "marks.csv"
    p.write_text("dish_0001,3,4\n")
    assert load_marks_csv(str(p)) == {"dish_0001": [(3.0, 4.0)]}


def test_write_metrics_csv(tmp_path):
    p = tmp_path / "metrics.csv"
    write_metrics_csv(str(p), [{
        "image": "a", "tp": 3, "fp": 1, "fn": 0, "precision": 0.75,
        "recall": 1.0, "f1": 6 / 7, "pred_count": 4, "gt_count": 3}])
    lines = p.read_text().strip().splitlines()
    assert lines[0].startswith("image,tp,fp,fn,precision")
    assert lines[1].startswith("a,3,1,0,0.750000,1.000000,0.857143")

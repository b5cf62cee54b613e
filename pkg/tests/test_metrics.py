import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogtags.metrics import f1_at_k, map_metric, mrr, ndcg_at_k, precision_at_k, recall_at_k

TAGS = list("abcdefghijkl")


def test_precision_examples():
    assert precision_at_k(["a", "b", "c"], {"a", "c"}, 3) == pytest.approx(2 / 3)
    assert precision_at_k([], {"a"}, 5) == 0.0
    assert precision_at_k(["a", "b"], {"a"}, 10) == 0.5
    assert precision_at_k(["a", "b"], {"a"}, 10, strict=True) == 0.1
    with pytest.raises(ValueError):
        precision_at_k(["a"], {"a"}, 0)


def test_recall_examples():
    assert recall_at_k(["a", "b", "c"], {"a", "c"}, 3) == 1.0
    assert recall_at_k(["a", "x", "y"], {"a", "c"}, 1) == 0.5
    assert recall_at_k(["x", "y"], {"a"}, 2) == 0.0


def test_f1_examples():
    # P = R = 0.5
    assert f1_at_k(["a", "x"], {"a", "b"}, 2) == 0.5
    # P = 1/2, R = 0 impossible; P=0 R=0 -> 0
    assert f1_at_k(["x"], {"a"}, 1) == 0.0
    # P = 2/3, R = 1
    assert f1_at_k(["a", "b", "x"], {"a", "b"}, 3) == pytest.approx(0.8)


def test_rank_metric_examples():
    assert mrr(["x", "a"], {"a"}) == 0.5
    assert mrr(["x"], {"a"}) == 0.0
    assert map_metric(["a", "b"], {"a", "b"}) == 1.0
    assert ndcg_at_k(["a", "b"], {"a", "b"}, 2) == 1.0
    expected = (1 / math.log2(3)) / (1 + 1 / math.log2(3))
    assert ndcg_at_k(["x", "a"], {"a", "b"}, 2) == pytest.approx(expected, abs=1e-12)
    assert round(expected, 3) == 0.387
    # missing relevant item counts as zero
    assert map_metric(["a"], {"a", "b"}) == 0.5


ranked = st.lists(st.sampled_from(TAGS), max_size=10, unique=True)
relevant = st.frozensets(st.sampled_from(TAGS), min_size=1, max_size=6)


@given(ranked, relevant)
def test_bounds_and_monotone_recall(rec, rel):
    recalls = [recall_at_k(rec, rel, k) for k in range(1, 11)]
    assert recalls == sorted(recalls)
    assert precision_at_k(rec, rel, 1) in (0.0, 1.0)
    values = recalls + [precision_at_k(rec, rel, k) for k in range(1, 11)]
    values += [f1_at_k(rec, rel, 5), mrr(rec, rel), map_metric(rec, rel), ndcg_at_k(rec, rel, 10)]
    assert all(0.0 <= v <= 1.0 for v in values)


@given(ranked, relevant, st.randoms(use_true_random=False))
def test_permuting_tail_irrelevant_items(rec, rel, rnd):
    hits = [i for i, t in enumerate(rec) if t in rel]
    cut = hits[-1] + 1 if hits else 0
    tail = rec[cut:]
    rnd.shuffle(tail)
    other = rec[:cut] + tail
    for k in range(1, 11):
        assert precision_at_k(rec, rel, k) == precision_at_k(other, rel, k)
        assert recall_at_k(rec, rel, k) == recall_at_k(other, rel, k)
    assert (mrr(rec, rel), map_metric(rec, rel), ndcg_at_k(rec, rel, 10)) == (
        mrr(other, rel),
        map_metric(other, rel),
        ndcg_at_k(other, rel, 10),
    )

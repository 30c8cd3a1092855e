import numpy as np
import pytest
from hypothesis import given, strategies as st

from toxicspans.metrics import brute_force_f1, comment_f1, evaluate_corpus

from _scorer import HANDMADE, task_scorer_f1


@pytest.mark.parametrize("gold, pred, expected", HANDMADE)
def test_handmade_against_task_scorer(gold, pred, expected):
    assert comment_f1(gold, pred) == pytest.approx(expected, abs=1e-12)
    assert task_scorer_f1(pred, gold) == pytest.approx(expected, abs=1e-12)
    assert brute_force_f1(gold, pred) == pytest.approx(expected, abs=1e-12)


def test_scorer_doc_example():
    assert task_scorer_f1([0, 1, 4, 5], [0, 1, 6]) == pytest.approx(0.5714285714285715)


offset_sets = st.sets(st.integers(0, 60), max_size=30)


@given(offset_sets, offset_sets)
def test_oracle_agreement_and_symmetry(g, p):
    f = comment_f1(g, p)
    assert abs(f - brute_force_f1(g, p)) <= 1e-12
    assert f == pytest.approx(comment_f1(p, g), abs=1e-15)
    assert 0.0 <= f <= 1.0
    assert (f == 1.0) == (g == p)


@given(offset_sets, st.data())
def test_adding_gold_offset_never_hurts(g, data):
    if not g:
        return
    pred = data.draw(st.sets(st.sampled_from(sorted(g))))
    extra = data.draw(st.sampled_from(sorted(g)))
    assert comment_f1(g, pred | {extra}) >= comment_f1(g, pred)


def test_evaluate_corpus():
    result = evaluate_corpus([[1], [2]], [[1], [3]])
    assert result.per_comment_f1 == (1.0, 0.0)
    assert result.mean_f1 == 0.5
    assert evaluate_corpus([[1, 2], []], [[1, 2], []]).mean_f1 == 1.0
    r = evaluate_corpus([[], [1]], [[], []])
    assert (r.empty_gold, r.empty_pred) == (1, 2)
    assert r.mean_f1 == pytest.approx(np.mean(r.per_comment_f1))


def test_evaluate_corpus_errors():
    with pytest.raises(ValueError):
        evaluate_corpus([], [])
    with pytest.raises(ValueError):
        evaluate_corpus([[1]], [])

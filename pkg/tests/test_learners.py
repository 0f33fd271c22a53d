from __future__ import annotations

import numpy as np
import pytest

from sqslab.domain import Dictator, SetMembership, FullCube, density
from sqslab.learners import Hypothesis, LearnerError, dictator_sq_learner, trivial_sparse_learner
from sqslab.oracles import HonestSQL


def test_dictator_learner_exact():
    sql = HonestSQL(Dictator(3, 8))
    h = dictator_sq_learner(sql)
    assert h.kind == "dictator" and h.index == 3
    assert sql.queries_used == 8


def test_dictator_learner_smallest_case():
    assert dictator_sq_learner(HonestSQL(Dictator(0, 2))).index == 0


@pytest.mark.parametrize("n", [4, 12, 20])
def test_dictator_learner_worst_noise(n):
    rng = np.random.default_rng(n)
    for _ in range(20 if n < 20 else 3):
        i = int(rng.integers(n))
        sql = HonestSQL(Dictator(i, n), "worst_noise", rng=rng)
        assert dictator_sq_learner(sql, xi=0.25).index == i


def test_dictator_learner_rejects_non_dictator():
    f = SetMembership(frozenset({1, 2, 3}), FullCube(5))
    with pytest.raises(LearnerError):
        dictator_sq_learner(HonestSQL(f))


def test_trivial_learner_error_equals_density():
    n = 16
    f = SetMembership(frozenset({12345}), FullCube(n))
    h = trivial_sparse_learner(2**-n, 0.01, n)
    xs = FullCube(n).elements()
    err = np.mean(h.evaluate(xs) != f.evaluate(xs))
    assert err == density(f) == 2**-16


def test_trivial_learner_precondition():
    with pytest.raises(ValueError):
        trivial_sparse_learner(0.1, 0.01, 8)


def test_hypothesis_json_round_trip():
    for h in (Hypothesis("dictator", 6, index=2), Hypothesis("constant", 6, value=1)):
        again = Hypothesis.from_json(h.to_json(), 6)
        xs = np.arange(64)
        assert np.array_equal(again.evaluate(xs), h.evaluate(xs))
    assert Hypothesis("dictator", 6, index=2).to_json() == {"kind": "dictator", "index": 2}

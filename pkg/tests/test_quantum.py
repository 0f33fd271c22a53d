from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqslab.domain import BitVector, DomainError, positive_set
from sqslab.quantum import (
    ShorInstance,
    SimonInstance,
    continued_fraction_order,
    gf2_solve,
    order_of,
    recover_order,
    shor_hidden_set,
    shor_ideal_samples,
    simon_end_to_end,
)


def prime_factors(r):
    out, d = set(), 2
    while d * d <= r:
        while r % d == 0:
            out.add(d)
            r //= d
        d += 1
    if r > 1:
        out.add(r)
    return out


@pytest.mark.parametrize("a,N,r", [(7, 15, 4), (1, 8, 1), (2, 9, 6), (2, 21, 6), (3, 7, 6)])
def test_order_examples(a, N, r):
    assert order_of(a, N) == r


def test_order_requires_coprime():
    with pytest.raises(ValueError):
        order_of(6, 15)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 2000), st.data())
def test_order_is_minimal(N, data):
    a = data.draw(st.integers(1, N - 1).filter(lambda a: math.gcd(a, N) == 1))
    r = order_of(a, N)
    assert pow(a, r, N) == 1 % N
    for q in prime_factors(r):
        assert pow(a, r // q, N) != 1


def test_shor_sets_frozen():
    assert shor_ideal_samples(ShorInstance(15, 7, 8)) == [0, 64, 128, 192]
    assert shor_ideal_samples(ShorInstance(21, 2, 9)) == [0, 85, 171, 256, 341, 427]
    assert positive_set(shor_hidden_set(ShorInstance(15, 7, 8))) == [0, 64, 128, 192]
    assert shor_ideal_samples(ShorInstance(15, 1, 4)) == [0]


def test_rounding_ties_to_even():
    from fractions import Fraction

    from sqslab.quantum import _round_half_even

    assert _round_half_even(Fraction(5, 2)) == 2 and _round_half_even(Fraction(7, 2)) == 4


def test_continued_fraction_examples():
    assert continued_fraction_order(192, 256, 15, 7) == 4
    assert continued_fraction_order(64, 256, 15) == 4
    assert continued_fraction_order(0, 256, 15) is None
    assert continued_fraction_order(128, 256, 15, 7) is None  # 1/2 only gives a divisor


def test_cf_recovers_order_from_every_coprime_sample():
    inst = ShorInstance(15, 7, 8)
    r = inst.r
    for t, y in enumerate(shor_ideal_samples(inst)):
        if math.gcd(t, r) == 1:
            assert continued_fraction_order(y, inst.Q, inst.N, inst.a) == r


@pytest.mark.parametrize("seed", range(3))
def test_recover_order_random_instances(seed):
    rng = np.random.default_rng(seed)
    for _ in range(15):
        N = int(rng.integers(3, 1001))
        a = int(rng.integers(1, N))
        while math.gcd(a, N) != 1:
            a = int(rng.integers(1, N))
        inst = ShorInstance.for_recovery(N, a)
        assert inst.Q >= N * N
        ys = rng.permutation(shor_ideal_samples(inst))
        assert recover_order(ys, inst.Q, N, a) == inst.r


def test_gf2_examples():
    rows = [BitVector.from_str(s) for s in ("010", "101", "111")]
    assert gf2_solve(rows).secret == BitVector.from_str("101")
    full = gf2_solve([BitVector.from_str(s) for s in ("100", "010", "001")])
    assert full.secret == BitVector(0, 3) and full.rank == 3
    under = gf2_solve([BitVector.from_str("110")])
    assert not under.determined and under.rank == 1


def test_gf2_mixed_widths():
    with pytest.raises(ValueError):
        gf2_solve([BitVector.from_str("10"), BitVector.from_str("101")])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 16), st.data())
def test_gf2_recovers_secret_from_hidden_set(n, data):
    s = data.draw(st.integers(1, 2**n - 1))
    seed = data.draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    src = SimonInstance(n, s).standard_source()
    rows = []
    while gf2_solve(rows, n).rank < n - 1:
        rows.append(src(rng))
    assert gf2_solve(rows, n).secret.value == s
    assert all(bin(y & s).count("1") % 2 == 0 for y in rows)


@pytest.mark.parametrize("n", [3, 8, 12])
def test_simon_hidden_set_size(n):
    inst = SimonInstance(n, 0b101 << (n - 3))
    assert inst.hidden_set().positive_count() == inst.hidden_size() == 2 ** (n - 1) - 1
    zero = SimonInstance(n, 0)
    assert zero.hidden_set().positive_count() == 2**n - 1


def test_simon_degenerate():
    inst = SimonInstance(1, 1)
    assert inst.degenerate
    with pytest.raises(DomainError):
        inst.hidden_set()
    assert simon_end_to_end(inst, inst.random_guess_source(), 2, np.random.default_rng(0))["degenerate"]


def test_simon_end_to_end_rates():
    rng = np.random.default_rng(7)
    inst = SimonInstance(12, 0b100110101101)
    good = sum(simon_end_to_end(inst, inst.standard_source(), 24, rng)["success"] for _ in range(300))
    bad = sum(simon_end_to_end(inst, inst.random_guess_source(), 24, rng)["success"] for _ in range(300))
    assert good >= 297 and bad <= 3

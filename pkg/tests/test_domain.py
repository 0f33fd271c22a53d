from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqslab.domain import (
    AllNegParity,
    BitVector,
    BoolLinear,
    Constant,
    Dictator,
    DictatorClass,
    Domain,
    DomainError,
    FullCube,
    NegParity,
    NormalizedBoolLinear,
    PuncturedCube,
    PuncturedZp,
    ResourceError,
    SetMembership,
    ZpVector,
    class_from_descriptor,
    class_stats_boollinear,
    density,
    density_exact,
    dot_gf2,
    negparity_point_counts,
    popcount,
    positive_set,
    predicate_from_descriptor,
)


def brute_zp_points(n, p):
    return [x for x in itertools.product(range(p), repeat=n) if any(x[1:])]


# -- bit vectors --------------------------------------------------------------


def test_bitvector_msb_first():
    v = BitVector.from_str("101")
    assert v.value == 5 and v.bits == (1, 0, 1)
    assert v[0] == 1 and v[1] == 0
    assert str(v) == "101"


def test_dot_gf2_examples():
    assert dot_gf2(BitVector.from_str("110"), BitVector.from_str("011")) == 1
    assert dot_gf2(BitVector.from_str("111"), BitVector.from_str("111")) == 1
    assert dot_gf2(BitVector.from_str("000"), BitVector.from_str("101")) == 0


def test_dot_gf2_width_mismatch():
    with pytest.raises(ValueError):
        dot_gf2(BitVector.from_str("10"), BitVector.from_str("101"))


@given(st.integers(0, 2**20 - 1), st.integers(0, 2**20 - 1))
def test_popcount_matches_bin(a, b):
    assert popcount(a & b) == bin(a & b).count("1")
    assert dot_gf2(BitVector(a, 20), BitVector(b, 20)) == bin(a & b).count("1") % 2


# -- domains --------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 3, 6])
def test_cube_cardinalities(n):
    assert FullCube(n).cardinality == 2**n == len(FullCube(n).elements())
    assert PuncturedCube(n).cardinality == 2**n - 1 == len(PuncturedCube(n).elements())
    assert not PuncturedCube(n).contains(0)


@pytest.mark.parametrize("n,p", [(2, 3), (3, 3), (2, 5), (3, 5), (4, 3)])
def test_zp_elements_match_brute_force(n, p):
    dom = PuncturedZp(n, p)
    pts = [tuple(r) for r in dom.elements().tolist()]
    assert pts == brute_zp_points(n, p)
    assert dom.cardinality == p**n - p
    for i, x in enumerate(pts):
        assert dom.index_of(x) == i


def test_zp_rejects_even_modulus():
    with pytest.raises(ValueError):
        PuncturedZp(3, 4)
    with pytest.raises(ValueError):
        ZpVector((1, 0), 2)


def test_cap_enforced():
    with pytest.raises(ResourceError):
        FullCube(30).elements()


def test_sample_frequencies_uniform():
    rng = np.random.default_rng(0)
    draws = PuncturedCube(3).sample(rng, 100_000)
    freq = np.bincount(draws, minlength=8)[1:] / len(draws)
    sigma = np.sqrt((1 / 7) * (6 / 7) / len(draws))
    assert np.all(np.abs(freq - 1 / 7) <= 3 * sigma + 1e-12)
    assert not np.any(draws == 0)


# -- predicates -------------------------------------------------------------------


def test_negparity_small_example():
    f = NegParity(0b101, 3)
    assert positive_set(f) == [0b010, 0b101, 0b111]


@pytest.mark.parametrize("n", [3, 5, 8])
def test_negparity_density(n):
    rng = np.random.default_rng(n)
    s = int(rng.integers(1, 2**n))
    assert density_exact(NegParity(s, n)) == Fraction(2 ** (n - 1) - 1, 2**n - 1)


def test_negparity_outside_domain():
    with pytest.raises(DomainError):
        NegParity(1, 3)(0)


def test_boollinear_examples():
    f = BoolLinear(ZpVector((1, 0, 0), 3))
    xs = [x for x in brute_zp_points(3, 3) if f(x)]
    assert len(xs) == 3**2 - 1
    assert all(x[0] == 1 for x in xs)


def test_dictator_and_constant():
    assert density(Dictator(2, 6)) == 0.5
    assert positive_set(Constant(1, FullCube(2))) == [0, 1, 2, 3]
    assert positive_set(Constant(0, FullCube(2))) == []


@pytest.mark.parametrize(
    "f",
    [
        NegParity(0b1011, 4),
        BoolLinear(ZpVector((1, 2, 1), 3)),
        SetMembership(frozenset({1, 7}), FullCube(3)),
        Dictator(1, 4),
        Constant(1, PuncturedCube(3)),
    ],
)
def test_descriptor_round_trip(f):
    g = predicate_from_descriptor(f.to_descriptor())
    assert np.array_equal(f.mask(), g.mask())
    assert f.domain == g.domain


# -- classes -----------------------------------------------------------------------


@pytest.mark.parametrize("n,p", [(3, 3), (2, 3), (2, 5), (3, 5), (4, 3)])
def test_boollinear_class_counts_brute_force(n, p):
    pts = brute_zp_points(n, p)
    coeffs = [a for a in itertools.product(range(p), repeat=n) if a[0] == 1]
    masks = np.array([[sum(ai * xi for ai, xi in zip(a, x)) % p == 1 for a in coeffs] for x in pts])
    st_ = class_stats_boollinear(n, p)
    assert st_.matches
    assert st_.brute["positive_size"] == sorted(set(masks.sum(axis=0).tolist()))
    assert st_.brute["per_point_positive_count"] == sorted(set(masks.sum(axis=1).tolist()))


def test_class_stats_frozen_values():
    st_ = class_stats_boollinear(3, 3)
    assert st_.formula == {
        "domain_size": 24,
        "class_size": 9,
        "positive_size": [8],
        "pairwise_agreement": [12],
        "per_point_positive_count": [3],
    }


@pytest.mark.parametrize("n", [3, 4, 6])
def test_allnegparity_fast_paths_match_mask_matrix(n):
    cls = AllNegParity(n)
    M = np.stack([f.mask() for f in cls.members()], axis=1)
    rng = np.random.default_rng(n)
    vals = rng.normal(size=2**n - 1)
    assert np.allclose(cls.positive_sums(vals), vals @ M)
    alive = rng.random(cls.size) < 0.5
    assert np.array_equal(cls.point_counts(alive), M @ alive.astype(int))


def test_negparity_point_counts_conventions():
    counts = negparity_point_counts(4)
    assert counts == {"nonzero_s": [2**3 - 1], "all_s": [2**3]}


def test_class_descriptors():
    for cls in (AllNegParity(4), NormalizedBoolLinear(3, 3), DictatorClass(5)):
        again = class_from_descriptor(cls.to_descriptor())
        assert again.size == cls.size
        assert np.array_equal(again.positive_sizes(), cls.positive_sizes())


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.sampled_from([3, 5]), st.data())
def test_zp_index_round_trip(n, p, data):
    dom = PuncturedZp(n, p)
    i = data.draw(st.integers(0, dom.cardinality - 1))
    x = tuple(int(e) for e in dom.elements()[i])
    assert dom.index_of(x) == i
    assert dom.contains(x)


def test_domain_descriptor_round_trip():
    for d in (FullCube(3), PuncturedCube(5), PuncturedZp(3, 5)):
        assert Domain.from_descriptor(d.to_descriptor()) == d

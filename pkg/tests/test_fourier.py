from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sqslab.domain import FullCube, InvariantViolation, NormalizedBoolLinear, PuncturedCube, PuncturedZp
from sqslab.fourier import (
    ParityCoefficientCounts,
    TableError,
    TruthTable,
    boollinear_basis_coefficients,
    boollinear_correlation,
    count_dependent_boollinear,
    count_dependent_negparity,
    encoded_negparity_coefficient,
    fwht,
    negparity_positive_means,
    orthonormalize_correlated,
    parity_coefficient_from_counts,
    parseval_gap,
    read_table_csv,
    wht,
)


def naive_wht(values: np.ndarray) -> np.ndarray:
    N = len(values)
    xs = np.arange(N)
    return np.array([np.mean(values * (1 - 2 * (np.vectorize(lambda v: bin(v).count("1"))(xs & s) % 2))) for s in range(N)])


def pm1_table(n, rng):
    return TruthTable(rng.choice(np.array([-1.0, 1.0]), size=2**n), FullCube(n))


def test_wht_of_character():
    n = 4
    xs = np.arange(2**n)
    g = TruthTable(1.0 - 2.0 * ((xs >> (n - 1)) & 1), FullCube(n))  # (-1)^{x_0}
    spec = wht(g)
    assert spec[0b1000] == 1.0
    assert np.count_nonzero(spec.coefficients) == 1


def test_wht_of_constant():
    spec = wht(TruthTable(np.ones(8), FullCube(3)))
    assert spec[0] == 1.0 and spec.energy() == 1.0


@pytest.mark.parametrize("n", [1, 3, 6, 9])
def test_wht_matches_naive(n):
    rng = np.random.default_rng(n)
    g = TruthTable(rng.normal(size=2**n), FullCube(n))
    assert np.allclose(wht(g).coefficients, naive_wht(g.values), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(arrays(np.int8, 32, elements=st.sampled_from([-1, 1])))
def test_parseval_for_pm1_tables(vals):
    g = TruthTable(vals.astype(float), FullCube(5))
    assert parseval_gap(g, wht(g)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, 16, elements=st.floats(-4, 4)))
def test_fwht_is_involution_up_to_scale(vals):
    assert np.allclose(fwht(fwht(vals)) / 16, vals, atol=1e-9)


def test_fwht_rejects_non_power_of_two():
    with pytest.raises(TableError):
        fwht(np.ones(6))


@pytest.mark.parametrize("seed", range(5))
def test_coefficient_from_counts_matches_wht(seed):
    rng = np.random.default_rng(seed)
    g = pm1_table(8, rng)
    spec = wht(g)
    for s in rng.integers(1, 256, size=10):
        c = ParityCoefficientCounts.from_table(g, int(s))
        assert parity_coefficient_from_counts(c) == pytest.approx(spec[int(s)], abs=1e-12)
        assert encoded_negparity_coefficient(c) == pytest.approx(-spec[int(s)], abs=1e-12)


def test_counts_brute_force_definition():
    rng = np.random.default_rng(7)
    n, s = 5, 0b10110
    g = pm1_table(n, rng)
    a = sum(1 for x in range(2**n) if g.values[x] > 0)
    b = sum(1 for x in range(1, 2**n) if g.values[x] > 0 and bin(x & s).count("1") % 2 == 0)
    c = ParityCoefficientCounts.from_table(g, s)
    assert (c.a, c.b, c.t) == (a, b, 1 if g.values[0] > 0 else -1)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_negparity_positive_means_brute_force(n):
    rng = np.random.default_rng(n)
    vals = rng.normal(size=2**n)
    means = negparity_positive_means(vals)
    for s in range(1, 2**n):
        pos = [x for x in range(1, 2**n) if bin(x & s).count("1") % 2 == 0]
        assert means[s - 1] == pytest.approx(np.mean(vals[pos]), abs=1e-12)


# -- uniformly correlated families ---------------------------------------------------


@pytest.mark.parametrize("n,p,lam", [(3, 3, 0.0), (4, 3, 1 / 13), (2, 3, -1 / 3), (2, 5, 0.2)])
def test_lambda_frozen(n, p, lam):
    assert boollinear_correlation(n, p).lam == pytest.approx(lam, abs=1e-15)


@pytest.mark.parametrize("n,p", [(2, 3), (3, 3), (2, 5), (3, 5)])
def test_lambda_matches_brute_inner_products(n, p):
    dom = PuncturedZp(n, p)
    F = 2.0 * NormalizedBoolLinear(n, p).mask_matrix().T - 1.0
    gram = F @ F.T / dom.cardinality
    off = gram[~np.eye(len(F), dtype=bool)]
    assert np.allclose(off, boollinear_correlation(n, p).lam, atol=1e-12)


@pytest.mark.parametrize("n,p", [(3, 3), (2, 3), (2, 5), (3, 5)])
def test_orthonormalization(n, p):
    dom = PuncturedZp(n, p)
    tables = [TruthTable(2.0 * c - 1.0, dom) for c in NormalizedBoolLinear(n, p).mask_matrix().T]
    B = np.stack([b.values for b in orthonormalize_correlated(tables)])
    assert np.allclose(B @ B.T / dom.cardinality, np.eye(len(B)), atol=1e-9)


def test_orthonormalization_random_equicorrelated_family():
    # f_i = sqrt(lam) z + sqrt(1-lam) e_i on a space where z, e_i are orthonormal
    d, lam, N = 5, 0.3, 64
    rng = np.random.default_rng(0)
    Q, _ = np.linalg.qr(rng.normal(size=(N, d + 1)))
    Q *= math.sqrt(N)
    F = math.sqrt(lam) * Q[:, :1].T + math.sqrt(1 - lam) * Q[:, 1:].T
    dom = FullCube(6)
    out = orthonormalize_correlated([TruthTable(r, dom) for r in F])
    B = np.stack([b.values for b in out])
    assert np.allclose(B @ B.T / N, np.eye(d), atol=1e-9)


def test_orthonormalization_rejects_nonuniform():
    dom = FullCube(2)
    fs = [TruthTable(np.array(v, float), dom) for v in ([1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, 1, 1, -1])]
    with pytest.raises(ValueError):
        orthonormalize_correlated(fs)


def test_basis_coefficients_match_explicit_basis():
    n, p = 3, 3
    dom = PuncturedZp(n, p)
    rng = np.random.default_rng(1)
    g = TruthTable(rng.choice(np.array([-1.0, 1.0]), size=dom.cardinality), dom)
    tables = [TruthTable(2.0 * c - 1.0, dom) for c in NormalizedBoolLinear(n, p).mask_matrix().T]
    basis = orthonormalize_correlated(tables)
    explicit = np.array([np.dot(g.values, b.values) / dom.cardinality for b in basis])
    assert np.allclose(boollinear_basis_coefficients(g), explicit, atol=1e-12)


# -- dependence counts -----------------------------------------------------------------


def test_single_parity_query_has_one_dependent():
    n = 10
    xs = np.arange(2**n)
    s = 0b1011001110
    g = TruthTable(1.0 - 2.0 * (np.vectorize(lambda v: bin(v).count("1"))(xs & s) % 2), FullCube(n))
    res = count_dependent_negparity(g, 2 ** (-n / 4))
    assert res.count == 1 and list(res.dependent) == [s]


def test_dependent_count_brute_force():
    n, xi = 6, 0.3
    rng = np.random.default_rng(3)
    g = pm1_table(n, rng)
    brute = 0
    for s in range(1, 2**n):
        pos = [x for x in range(1, 2**n) if bin(x & s).count("1") % 2 == 0]
        brute += abs(np.mean(g.values[pos]) - g.mean()) > xi
    assert count_dependent_negparity(g, xi, check=False).count == brute


def test_dependent_count_needs_large_xi():
    with pytest.raises(ValueError):
        count_dependent_negparity(pm1_table(4, np.random.default_rng(0)), 6 / 16)


def test_boollinear_dependent_count_reports_heavy():
    dom = PuncturedZp(4, 3)
    g = TruthTable(2.0 * NormalizedBoolLinear(4, 3).mask_matrix()[:, 0] - 1.0, dom)
    res = count_dependent_boollinear(g)
    assert res.count >= 1 and res.within_bound
    assert 0 in res.dependent
    assert res.extra["basis_energy"] <= 1 + 1e-9
    assert res.extra["regime_xi"] and isinstance(res.extra["dependent_subset_of_heavy"], bool)
    assert not count_dependent_boollinear(g, xi=0.3).extra["regime_xi"]


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    g = pm1_table(3, rng)
    path = tmp_path / "t.csv"
    rows = [(format(x, "x"), int(v)) for x, v in enumerate(g.values)]
    rng.shuffle(rows)
    path.write_text("x_hex,value\n" + "".join(f"{a},{b}\n" for a, b in rows))
    assert np.array_equal(read_table_csv(path).values, g.values)
    single = tmp_path / "s.csv"
    single.write_text("".join(f"{int(v)}\n" for v in g.values))
    assert np.array_equal(read_table_csv(single).values, g.values)
    spec_path = tmp_path / "spec.csv"
    wht(g).to_csv(spec_path)
    assert spec_path.read_text().splitlines()[0] == "s_hex,coefficient"


def test_truth_table_restrict():
    t = TruthTable(np.arange(8.0), FullCube(3))
    r = t.restrict(PuncturedCube(3))
    assert list(r.values) == list(range(1, 8))
    with pytest.raises(TableError):
        t.restrict(PuncturedZp(3, 3))


def test_invariant_violation_is_assertion():
    assert issubclass(InvariantViolation, AssertionError)

"""Spectral tools: truth tables, Walsh-Hadamard transform, correlated bases.

The Walsh-Hadamard coefficient of ``g`` at ``s`` is
``2^-n * sum_x g(x) * (-1)^(s.x)``, i.e. the inner product of ``g`` with the
character ``(-1)^(s.x)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .domain import (
    DEFAULT_CAP,
    Domain,
    FullCube,
    InvariantViolation,
    NormalizedBoolLinear,
    popcount,
)


class TableError(ValueError):
    pass


@dataclass
class TruthTable:
    """Real values in the domain's enumeration order."""

    values: np.ndarray
    domain: Domain

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.cardinality,):
            raise TableError(
                f"table has shape {self.values.shape}, domain has {self.domain.cardinality} points"
            )

    def mean(self) -> float:
        return float(self.values.mean())

    def restrict(self, domain: Domain) -> "TruthTable":
        """Restrict a full-cube table to the punctured cube of the same width."""
        if domain == self.domain:
            return self
        if self.domain.kind == "full_cube" and domain.kind == "punctured_cube" and domain.n == self.domain.n:
            return TruthTable(self.values[1:], domain)
        raise TableError(f"cannot restrict {self.domain} to {domain}")


QueryLike = TruthTable | np.ndarray | Callable


def materialize(g: QueryLike, domain: Domain, cap: int = DEFAULT_CAP) -> TruthTable:
    """Evaluate a query once over every point of ``domain``.

    ``g`` may be a :class:`TruthTable`, a bare array already aligned with
    ``domain.elements()``, or a vectorized callable on that element array.
    """
    if isinstance(g, TruthTable):
        return g.restrict(domain)
    if isinstance(g, np.ndarray):
        return TruthTable(g, domain)
    return TruthTable(np.asarray(g(domain.elements(cap)), dtype=float), domain)


def inner_product(f: TruthTable, g: TruthTable) -> float:
    """Normalized inner product ``|D|^-1 * sum_x f(x) g(x)``."""
    if f.domain != g.domain:
        raise TableError(f"domain mismatch: {f.domain} vs {g.domain}")
    return float(np.dot(f.values, g.values) / f.domain.cardinality)


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform along the last axis.

    Returns ``out[..., s] = sum_x a[..., x] * (-1)^popcount(s & x)``.
    """
    a = np.array(a, dtype=float)
    size = a.shape[-1]
    if size & (size - 1):
        raise TableError("length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        a = a.reshape(lead + (-1, 2, h))
        x, y = a[..., 0, :], a[..., 1, :]
        a = np.stack([x + y, x - y], axis=-2)
        h *= 2
    return a.reshape(lead + (size,))


@dataclass
class SpectrumGF2:
    n: int
    coefficients: np.ndarray

    def __getitem__(self, s: int) -> float:
        return float(self.coefficients[int(s)])

    def energy(self) -> float:
        return float(np.sum(self.coefficients**2))

    def heavy(self, tau: float) -> np.ndarray:
        """Indices ``s`` with ``|coef| > tau``."""
        return np.flatnonzero(np.abs(self.coefficients) > tau)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s_hex", "coefficient"])
            for s, c in enumerate(self.coefficients):
                w.writerow([format(s, "x"), repr(float(c))])


def wht(g: TruthTable) -> SpectrumGF2:
    """All Walsh-Hadamard coefficients of a full-cube table in O(n 2^n)."""
    if g.domain.kind != "full_cube":
        raise TableError("wht needs a full-cube table")
    n = g.domain.n
    return SpectrumGF2(n, fwht(g.values) / (1 << n))


def parseval_gap(g: TruthTable, spec: SpectrumGF2) -> float:
    return abs(spec.energy() - float(np.mean(g.values**2)))


def read_table_csv(path) -> TruthTable:
    """Load a full-cube table.

    Accepts either a ``x_hex,value`` file (any row order) or a single column of
    values in lexicographic order, with an optional header.
    """
    rows = [r for r in csv.reader(Path(path).read_text().splitlines()) if r]
    if rows and not _is_number(rows[0][-1]):
        rows = rows[1:]
    if not rows:
        raise TableError("empty table")
    size = len(rows)
    n = size.bit_length() - 1
    if size != 1 << n:
        raise TableError(f"{size} rows is not a power of two")
    values = np.empty(size)
    if len(rows[0]) >= 2:
        seen = np.zeros(size, dtype=bool)
        for r in rows:
            x = int(r[0], 16)
            if not 0 <= x < size or seen[x]:
                raise TableError(f"bad or repeated index {r[0]!r}")
            seen[x] = True
            values[x] = float(r[1])
    else:
        values[:] = [float(r[0]) for r in rows]
    return TruthTable(values, FullCube(n))


def _is_number(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# Parity coefficient from counts


@dataclass(frozen=True)
class ParityCoefficientCounts:
    """Counts behind one parity coefficient of a +-1 query ``g``.

    a: points of the cube with g = +1;  b: points of the positive set of
    ``not-xor_s`` (punctured) with g = +1;  t: g(0^n) in {-1, +1}.
    """

    a: int
    b: int
    t: int
    n: int

    def __post_init__(self):
        if self.t not in (-1, 1):
            raise ValueError("t must be -1 or +1")
        if not 0 <= self.b <= self.a <= (1 << self.n):
            raise ValueError("need 0 <= b <= a <= 2^n")

    @classmethod
    def from_table(cls, g: TruthTable, s: int) -> "ParityCoefficientCounts":
        if g.domain.kind != "full_cube":
            raise TableError("counts are taken over the full cube")
        n = g.domain.n
        xs = np.arange(1 << n, dtype=np.int64)
        plus = g.values > 0
        in_set = ((popcount(xs & s) & 1) == 0) & (xs != 0)
        return cls(int(plus.sum()), int((plus & in_set).sum()), 1 if plus[0] else -1, n)


def parity_coefficient_from_counts(c: ParityCoefficientCounts) -> float:
    """Coefficient of ``g`` on ``(-1)^(s.x)`` for ``s != 0`` from its counts.

    The even half ``{x : s.x = 0}`` holds ``b + [t = +1]`` of the +1 points;
    the coefficient is ``(4b + 4[t=+1] - 2a) / 2^n``.
    """
    tau = (1 + c.t) // 2
    return (4 * c.b + 4 * tau - 2 * c.a) / (1 << c.n)


def encoded_negparity_coefficient(c: ParityCoefficientCounts) -> float:
    """Coefficient on the +-1 encoding ``1 - 2 * negparity_s``, i.e. on ``-(-1)^(s.x)``.

    Equals ``(2a - 4b - 4[t=+1]) / 2^n``, the negation of
    :func:`parity_coefficient_from_counts`.
    """
    tau = (1 + c.t) // 2
    return (2 * c.a - 4 * c.b - 4 * tau) / (1 << c.n)


# ---------------------------------------------------------------------------
# Uniformly correlated families


@dataclass(frozen=True)
class CorrelatedClassStats:
    d: int
    lam: float


def boollinear_correlation(n: int, p: int) -> CorrelatedClassStats:
    """Size and common pairwise inner product of the +-1 normalized class."""
    lam = ((p * p - 4 * p + 4) * p ** (n - 2) - p) / (p**n - p)
    return CorrelatedClassStats(p ** (n - 1), lam)


def _correlation_weights(stats: CorrelatedClassStats) -> tuple[float, float]:
    d, lam = stats.d, stats.lam
    if d == 1:
        return 1.0, 0.0
    if lam >= 1 or 1 + (d - 1) * lam <= 0:
        raise ValueError(f"degenerate correlation lambda={lam} for d={d}")
    alpha = 1 / math.sqrt(1 - lam)
    beta = (alpha - 1 / math.sqrt(1 + (d - 1) * lam)) / d
    return alpha, beta


def orthonormalize_correlated(
    functions: Sequence[TruthTable],
    stats: CorrelatedClassStats | None = None,
    tol: float = 1e-9,
) -> list[TruthTable]:
    """Turn a family with equal pairwise inner products into an orthonormal one.

    Each output is ``alpha * f_i - beta * sum_j f_j``.  The family is checked
    for unit norms and a common pairwise inner product before transforming.
    """
    d = len(functions)
    if d == 0:
        return []
    dom = functions[0].domain
    F = np.stack([materialize(f, dom).values for f in functions])
    gram = F @ F.T / dom.cardinality
    if np.max(np.abs(np.diag(gram) - 1)) > tol:
        raise ValueError("functions must have unit norm")
    off = gram[~np.eye(d, dtype=bool)]
    lam = float(off.mean()) if d > 1 else 0.0
    if d > 1 and np.max(np.abs(off - lam)) > tol:
        raise ValueError("pairwise inner products are not uniform")
    if stats is None:
        stats = CorrelatedClassStats(d, lam)
    elif stats.d != d or (d > 1 and abs(stats.lam - lam) > tol):
        raise ValueError(f"stats {stats} do not match the family (d={d}, lambda={lam})")
    alpha, beta = _correlation_weights(stats)
    out = alpha * F - beta * F.sum(axis=0)
    return [TruthTable(row, dom) for row in out]


def boollinear_basis_coefficients(g: TruthTable) -> np.ndarray:
    """Coefficients of ``g`` on the orthonormalized normalized class.

    Uses linearity: ``<g, hat L_a> = alpha <g, ~L_a> - beta sum_b <g, ~L_b>``,
    so no basis tables are built.
    """
    dom = g.domain
    cls = NormalizedBoolLinear(dom.n, dom.p)
    pm = 2.0 * cls.mask_matrix() - 1.0
    ips = g.values @ pm / dom.cardinality
    alpha, beta = _correlation_weights(boollinear_correlation(dom.n, dom.p))
    return alpha * ips - beta * ips.sum()


# ---------------------------------------------------------------------------
# Independence counting


def negparity_positive_means(g_full: np.ndarray, include_zero: bool = False) -> np.ndarray:
    """Mean of a full-cube table over each negative-parity positive set.

    Spectral path: the sum over ``{x : s.x = 0}`` is ``(raw[0] + raw[s]) / 2``
    for the unnormalized transform ``raw``; ``0^n`` is then removed.
    """
    g_full = np.asarray(g_full, dtype=float)
    n = g_full.size.bit_length() - 1
    raw = fwht(g_full)
    sums = (raw[0] + raw) / 2.0 - g_full[0]
    sizes = np.full(raw.size, (1 << (n - 1)) - 1, dtype=float)
    sizes[0] = (1 << n) - 1
    means = sums / sizes
    return means if include_zero else means[1:]


@dataclass
class DependentCount:
    count: int
    bound: float
    xi: float
    dependent: np.ndarray = field(repr=False)
    extra: dict = field(default_factory=dict)

    @property
    def within_bound(self) -> bool:
        return self.count <= self.bound


def count_dependent_negparity(g: TruthTable, xi: float, check: bool = True) -> DependentCount:
    """Negative parities (``s != 0``) that are not ``xi``-independent from ``g``.

    Reference mean is over the full cube.  ``bound = 1/(xi - 6/2^n)^2``; with
    ``check`` a count above it raises :class:`InvariantViolation`.
    """
    if g.domain.kind != "full_cube":
        raise TableError("query must be a full-cube table")
    n = g.domain.n
    slack = 6 / (1 << n)
    if xi <= slack:
        raise ValueError(f"xi={xi} must exceed 6/2^n={slack}")
    means = negparity_positive_means(g.values)
    ref = g.mean()
    dependent = np.flatnonzero(np.abs(means - ref) > xi) + 1
    bound = 1 / (xi - slack) ** 2
    res = DependentCount(
        len(dependent), bound, xi, dependent,
        {"reference_mean": ref, "lemma_bound": 2 ** (n / 2 + 2)},
    )
    if check and not res.within_bound:
        raise InvariantViolation(f"{res.count} dependent parities exceed bound {bound}")
    return res


def count_dependent_boollinear(g: TruthTable, xi: float | None = None, check: bool = True) -> DependentCount:
    """Normalized booleanized linear predicates not ``xi``-independent from ``g``.

    ``xi`` defaults to ``p^(-n/3)``, the only tolerance at which the closed
    form ``p^(2n/3+2)`` is stated.  ``extra`` also reports how many
    orthonormal-basis coefficients reach ``p^-(n/3+1)`` and whether every
    dependent predicate is among them (the implication needs large n).
    """
    dom = g.domain
    if dom.kind != "punctured_zp":
        raise TableError("query must live on the punctured Z_p space")
    n, p = dom.n, dom.p
    if xi is None:
        xi = p ** (-n / 3)
    cls = NormalizedBoolLinear(n, p)
    means = cls.positive_means(g.values)
    dependent = np.flatnonzero(np.abs(means - g.mean()) > xi)
    bound = p ** (2 * n / 3 + 2)
    coefs = boollinear_basis_coefficients(g)
    thresh = p ** (-(n / 3 + 1))
    heavy = np.abs(coefs) >= thresh
    res = DependentCount(
        len(dependent), bound, xi, dependent,
        {
            "reference_mean": g.mean(),
            "regime_xi": math.isclose(xi, p ** (-n / 3)),
            "coefficient_threshold": thresh,
            "heavy_coefficients": int(heavy.sum()),
            "dependent_subset_of_heavy": bool(np.all(heavy[dependent])),
            "basis_energy": float(np.sum(coefs**2)),
        },
    )
    if check and not res.within_bound:
        raise InvariantViolation(f"{res.count} dependent predicates exceed bound {bound}")
    return res


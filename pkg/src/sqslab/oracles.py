"""Statistical query oracles: honest SQS/SQL answerers and the pruning adversary."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domain import (
    AllNegParity,
    Domain,
    FullCube,
    NormalizedBoolLinear,
    Predicate,
    PredicateClass,
)
from .fourier import QueryLike, TruthTable, materialize

MODES = ("exact", "sampled", "worst_noise")


class OracleError(RuntimeError):
    pass


class BudgetExceeded(OracleError):
    pass


class UndefinedOracle(OracleError):
    """The predicate has an empty positive set."""


class AdversaryExhausted(OracleError):
    """Pruning would leave no candidate predicate."""


@dataclass
class OracleAnswer:
    value: float
    true_mean: float
    tolerance_used: float
    extra: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return abs(self.value - self.true_mean) <= self.tolerance_used


@dataclass(frozen=True)
class QueryBudget:
    """Maximum number of queries and smallest tolerance a session accepts."""

    max_queries: int | None = None
    min_tolerance: float = 0.0

    def check(self, queries_used: int, xi: float) -> None:
        if self.max_queries is not None and queries_used >= self.max_queries:
            raise BudgetExceeded(f"query budget of {self.max_queries} exhausted")
        if xi < self.min_tolerance:
            raise BudgetExceeded(f"tolerance {xi} below minimum {self.min_tolerance}")

    @staticmethod
    def _below(x: float) -> int:
        # largest integer strictly below x
        return math.ceil(x) - 1

    @classmethod
    def negparity_regime(cls, n: int) -> "QueryBudget":
        """Fewer than ``2^(n/4)`` queries at tolerance ``2^(-n/4)``."""
        return cls(cls._below(2 ** (n / 4)), 2 ** (-n / 4))

    @classmethod
    def boollinear_regime(cls, n: int, p: int) -> "QueryBudget":
        """Fewer than ``p^(n/4)`` queries at tolerance ``p^(-n/3)``."""
        return cls(cls._below(p ** (n / 4)), p ** (-n / 3))

    def to_dict(self) -> dict:
        return {"max_queries": self.max_queries, "min_tolerance": self.min_tolerance}


def _check_xi(xi: float) -> None:
    if not 0 < xi <= 1:
        raise ValueError(f"tolerance must lie in (0, 1], got {xi}")


def _noisy(sigma: float, values: np.ndarray, xi: float, mode: str, m, rng) -> tuple[float, dict]:
    if mode == "exact":
        return sigma, {}
    if rng is None:
        raise ValueError(f"mode {mode!r} needs an rng")
    if mode == "sampled":
        if not m or m < 1:
            raise ValueError("sampled mode needs m >= 1")
        draws = values[rng.integers(0, len(values), size=m)]
        # +-1 values: two-sided Hoeffding with range 2
        return float(draws.mean()), {"m": m, "failure_bound": min(1.0, 2 * math.exp(-m * xi * xi / 2))}
    if mode == "worst_noise":
        return sigma + float(rng.uniform(-xi, xi)), {}
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def honest_sqs_answer(
    f: Predicate,
    g: QueryLike,
    xi: float,
    mode: str = "exact",
    *,
    m: int | None = None,
    rng: np.random.Generator | None = None,
) -> OracleAnswer:
    """Answer ``(g, xi)`` about the uniform distribution on ``f``'s positive set."""
    _check_xi(xi)
    table = materialize(g, f.domain)
    vals = table.values[f.mask()]
    if vals.size == 0:
        raise UndefinedOracle("positive set is empty")
    sigma = float(vals.mean())
    value, meta = _noisy(sigma, vals, xi, mode, m, rng)
    return OracleAnswer(value, sigma, xi, {"mode": mode, **meta})


LabeledQuery = Callable | tuple


def materialize_labeled(g: LabeledQuery, domain: Domain) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(g(x, 0), g(x, 1))`` tables over ``domain``."""
    if isinstance(g, tuple):
        g0, g1 = (np.asarray(materialize(h, domain).values) for h in g)
        return g0, g1
    xs = domain.elements()
    zeros = np.zeros(len(xs), dtype=np.int64)
    return (
        np.asarray(g(xs, zeros), dtype=float),
        np.asarray(g(xs, zeros + 1), dtype=float),
    )


def honest_sql_answer(
    f: Predicate,
    g: LabeledQuery,
    xi: float,
    mode: str = "exact",
    *,
    m: int | None = None,
    rng: np.random.Generator | None = None,
) -> OracleAnswer:
    """Answer a labeled query ``g(x, f(x))`` under the uniform cube distribution."""
    _check_xi(xi)
    if f.domain.kind != "full_cube":
        raise ValueError("learning oracles are defined over the full cube")
    g0, g1 = materialize_labeled(g, f.domain)
    vals = np.where(f.mask(), g1, g0)
    sigma = float(vals.mean())
    value, meta = _noisy(sigma, vals, xi, mode, m, rng)
    return OracleAnswer(value, sigma, xi, {"mode": mode, **meta})


def xi_independent(f: Predicate, g: QueryLike, xi: float, reference: Domain) -> bool:
    """True iff the mean of ``g`` on ``S_f`` is within ``xi`` of its mean on ``reference``."""
    if isinstance(g, TruthTable) and g.domain != f.domain:
        on_f = g.restrict(f.domain)
    else:
        on_f = materialize(g, f.domain)
    vals = on_f.values[f.mask()]
    if vals.size == 0:
        raise UndefinedOracle("positive set is empty")
    return abs(float(vals.mean()) - materialize(g, reference).mean()) <= xi


# ---------------------------------------------------------------------------
# Sessions


class Session:
    """Common budget and transcript bookkeeping for an oracle session."""

    domain: Domain

    def __init__(self, budget: QueryBudget | None = None):
        self.budget = budget or QueryBudget()
        self.transcript: list[dict] = []

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def queries_used(self) -> int:
        return sum(1 for t in self.transcript if "query_index" in t)

    @property
    def tolerances(self) -> list[float]:
        return [t["xi"] for t in self.transcript if "query_index" in t]

    def query(self, g, xi: float) -> float:
        return self.answer(g, xi).value

    def answer(self, g, xi: float) -> OracleAnswer:
        _check_xi(xi)
        self.budget.check(self.queries_used, xi)
        ans = self._answer(g, xi)
        self.transcript.append(
            {"query_index": self.queries_used, "xi": xi, "answer": ans.value, **self._log_extra(ans)}
        )
        return ans

    def _answer(self, g, xi: float) -> OracleAnswer:
        raise NotImplementedError

    def _log_extra(self, ans: OracleAnswer) -> dict:
        return {}

    def write_transcript(self, fh) -> None:
        """Write the transcript as JSON lines."""
        for row in self.transcript:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


class HonestSQS(Session):
    """An SQS oracle for a fixed predicate."""

    def __init__(self, f: Predicate, mode: str = "exact", *, m=None, rng=None, budget=None):
        super().__init__(budget)
        self.f, self.mode, self.m, self.rng = f, mode, m, rng
        self.domain = f.domain
        self._mask = f.mask()
        if not self._mask.any():
            raise UndefinedOracle("positive set is empty")
        self._positives = None

    def _positive_values(self, g) -> np.ndarray:
        if not callable(g) or isinstance(g, TruthTable):
            return materialize(g, self.domain).values[self._mask]
        if self._positives is None:
            self._positives = self.domain.elements()[self._mask]
        vals = np.asarray(g(self._positives), dtype=float)
        if vals.shape != self._positives.shape[:1]:
            raise ValueError(f"query returned shape {vals.shape}, expected {self._positives.shape[:1]}")
        return vals

    def _answer(self, g, xi):
        vals = self._positive_values(g)
        sigma = float(vals.mean())
        value, meta = _noisy(sigma, vals, xi, self.mode, self.m, self.rng)
        return OracleAnswer(value, sigma, xi, {"mode": self.mode, **meta})


class HonestSQL(Session):
    """An SQL oracle for a fixed predicate over the full cube."""

    def __init__(self, f: Predicate, mode: str = "exact", *, m=None, rng=None, budget=None):
        super().__init__(budget)
        if f.domain.kind != "full_cube":
            raise ValueError("learning oracles are defined over the full cube")
        self.f, self.mode, self.m, self.rng = f, mode, m, rng
        self.domain = f.domain
        self._mask = f.mask()

    def _answer(self, g, xi):
        g0, g1 = materialize_labeled(g, self.domain)
        vals = np.where(self._mask, g1, g0)
        sigma = float(vals.mean())
        value, meta = _noisy(sigma, vals, xi, self.mode, self.m, self.rng)
        return OracleAnswer(value, sigma, xi, {"mode": self.mode, **meta})


class AdversaryState(Session):
    """Candidate-set adversary.

    Every query is answered with the mean of ``g`` over ``reference`` and
    every candidate whose positive-set mean is farther than ``xi`` from that
    value is dropped.  At the end :meth:`commit` picks a survivor uniformly.
    """

    def __init__(
        self,
        cls: PredicateClass,
        reference: Domain | None = None,
        budget: QueryBudget | None = None,
    ):
        super().__init__(budget)
        self.cls = cls
        self.domain = cls.domain
        if reference is None:
            reference = FullCube(cls.domain.n) if isinstance(cls, AllNegParity) else cls.domain
        self.reference = reference
        self.alive = np.ones(cls.size, dtype=bool)
        self.committed: Predicate | None = None
        self._queries: list[tuple[TruthTable, float, float]] = []

    @property
    def remaining(self) -> int:
        return int(self.alive.sum())

    def _answer(self, g, xi):
        if self.committed is not None:
            raise OracleError("adversary has already committed")
        ref_table = materialize(g, self.reference)
        table = ref_table.restrict(self.domain)
        ref_mean = ref_table.mean()
        means = self.cls.positive_means(table.values)
        drop = self.alive & (np.abs(means - ref_mean) > xi)
        removed = int(drop.sum())
        if removed == self.remaining:
            raise AdversaryExhausted(f"query would remove all {removed} remaining candidates")
        self.alive &= ~drop
        self._queries.append((table, xi, ref_mean))
        return OracleAnswer(
            ref_mean, math.nan, xi,
            {"removed": removed, "remaining": self.remaining, "domain_mean": table.mean()},
        )

    def _log_extra(self, ans):
        return {
            "removed": ans.extra["removed"],
            "remaining": ans.extra["remaining"],
            "domain_mean": ans.extra["domain_mean"],
        }

    def commit(self, rng: np.random.Generator) -> Predicate:
        if self.remaining == 0:
            raise AdversaryExhausted("no candidates left")
        idx = int(rng.choice(np.flatnonzero(self.alive)))
        self.committed = self.cls.member(idx)
        self.transcript.append({"committed_index": idx, "committed": self.committed.to_descriptor()})
        return self.committed

    def replay_consistent(self) -> bool:
        """Every logged answer is within its tolerance of the committed predicate's mean."""
        if self.committed is None:
            raise OracleError("nothing committed yet")
        mask = self.committed.mask()
        return all(
            abs(float(table.values[mask].mean()) - answer) <= xi
            for table, xi, answer in self._queries
        )

    def optimal_success(self) -> tuple[object, float]:
        """Best point and its chance of being positive under a uniform survivor."""
        counts = self.cls.point_counts(self.alive)
        best = int(np.argmax(counts))
        x = self.domain.elements()[best]
        x = int(x) if self.domain.is_cube else tuple(int(e) for e in x)
        return x, float(counts[best]) / self.remaining


def adversary_answer(state: AdversaryState, g, xi: float) -> OracleAnswer:
    return state.answer(g, xi)


def adversary_commit(state: AdversaryState, rng: np.random.Generator) -> Predicate:
    return state.commit(rng)


def optimal_success(state: AdversaryState) -> dict:
    x, prob = state.optimal_success()
    return {"best_x": x, "probability": prob}


def negparity_adversary(n: int, budget: QueryBudget | None = None, include_zero: bool = False) -> AdversaryState:
    return AdversaryState(AllNegParity(n, include_zero), FullCube(n), budget)


def boollinear_adversary(n: int, p: int, budget: QueryBudget | None = None) -> AdversaryState:
    cls = NormalizedBoolLinear(n, p)
    return AdversaryState(cls, cls.domain, budget)

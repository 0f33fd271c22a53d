"""Samplers run against SQS sessions: random guessing, bit fixing and learn-then-sample."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import Domain, FullCube, PredicateClass, popcount
from .fourier import TruthTable, materialize
from .learners import Hypothesis
from .oracles import OracleAnswer, OracleError, Session, materialize_labeled
from .stats import required_samples_sqs


class ProtocolError(OracleError):
    """Oracle answers are inconsistent with any positive set."""


@dataclass
class SamplerOutcome:
    output: object
    queries_used: int
    tolerances_used: list[float]
    is_positive: bool | None = None
    notes: str = ""
    hypothesis: Hypothesis | None = None

    def output_hex(self, domain: Domain | None = None) -> str:
        if domain is not None:
            return domain.format_element(self.output)
        return format(int(self.output), "x")


def random_guess(domain: Domain, rng: np.random.Generator):
    """A uniform point of ``domain``; ignores the oracle entirely."""
    x = domain.sample(rng)
    return int(x) if domain.is_cube else tuple(int(e) for e in x)


def prefix_query(prefix: int, length: int, n: int):
    """+1 on points whose top ``length + 1`` bits are ``prefix`` then 1, else -1."""
    target = (prefix << 1) | 1
    shift = n - length - 1

    def g(xs):
        return np.where((np.asarray(xs) >> shift) == target, 1.0, -1.0)

    return g


def bit_fixing_sampler(
    oracle: Session,
    n: int,
    size_bound: int,
    max_queries: int | None = None,
    rng: np.random.Generator | None = None,
) -> SamplerOutcome:
    """Fix the bits of a positive point left to right.

    Query ``i`` asks for the +-1 indicator of "committed prefix followed by
    1" at tolerance ``1/(2 size_bound)``.  A nonempty extension has mean at
    least ``2/size_bound - 1``, an empty one has mean -1, so the answer is
    compared with the midpoint ``-1 + 1/size_bound``.  With ``max_queries < n``
    the remaining bits are drawn uniformly from ``rng``.
    """
    if size_bound < 1:
        raise ValueError("size_bound must be >= 1")
    xi = 1 / (2 * size_bound)
    threshold = -1 + 1 / size_bound
    limit = n if max_queries is None else min(n, max_queries)
    if limit < n and rng is None:
        raise ValueError("a truncated walk needs an rng for the unfixed bits")
    prefix = 0
    for i in range(limit):
        y = oracle.query(prefix_query(prefix, i, n), xi)
        prefix = (prefix << 1) | int(y > threshold)
    notes = ""
    if limit < n:
        free = n - limit
        prefix = (prefix << free) | int(rng.integers(0, 1 << free))
        notes = f"truncated:{free}_random_bits"
    if not oracle.domain.contains(prefix):
        raise ProtocolError(f"walk ended at {prefix:x}, outside the domain")
    return SamplerOutcome(prefix, limit, [xi] * limit, notes=notes)


QUERY_FAMILIES = ("random", "parity", "hyperplane")


def query_family(kind: str, domain: Domain, count: int, rng: np.random.Generator) -> list[TruthTable]:
    """``count`` +-1 query tables.

    ``"random"`` tables are uniform signs; ``"parity"`` tables are characters
    ``(-1)^(s.x)`` on the full cube of the same width; ``"hyperplane"`` tables
    are the +-1 indicator of ``a.x = c (mod p)`` on a ``Z_p`` domain.
    """
    base = FullCube(domain.n) if domain.is_cube else domain
    pts = base.elements()
    out = []
    for _ in range(count):
        if kind == "random":
            vals = rng.choice(np.array([-1.0, 1.0]), size=len(pts))
        elif kind == "parity":
            if not domain.is_cube:
                raise ValueError("parity queries need a cube domain")
            s = int(rng.integers(1, 1 << domain.n))
            vals = 1.0 - 2.0 * (popcount(pts & s) % 2)
        elif kind == "hyperplane":
            if domain.is_cube:
                raise ValueError("hyperplane queries need a Z_p domain")
            a = rng.integers(0, domain.p, size=domain.n)
            c = int(rng.integers(0, domain.p))
            vals = np.where((pts @ a) % domain.p == c, 1.0, -1.0)
        else:
            raise ValueError(f"unknown query family {kind!r}; expected one of {QUERY_FAMILIES}")
        out.append(TruthTable(np.asarray(vals, dtype=float), base))
    return out


def consistent_set_sampler(
    oracle: Session,
    cls: PredicateClass,
    queries: list,
    xi: float,
    rng: np.random.Generator,
) -> SamplerOutcome:
    """Ask ``queries``, keep the class members consistent with every answer, output the most covered point.

    Against the pruning adversary this reproduces its candidate set, so its
    success equals the adversary's optimal success.
    """
    alive = np.ones(cls.size, dtype=bool)
    for g in queries:
        y = oracle.query(g, xi)
        means = cls.positive_means(materialize(g, cls.domain).values)
        alive &= np.abs(means - y) <= xi
    if not alive.any():
        raise ProtocolError("no class member is consistent with the answers")
    counts = cls.point_counts(alive)
    x = cls.domain.elements()[int(np.argmax(counts))]
    x = int(x) if cls.domain.is_cube else tuple(int(e) for e in x)
    return SamplerOutcome(x, len(queries), [xi] * len(queries))


# ---------------------------------------------------------------------------
# Learn-then-sample reduction


@dataclass(frozen=True)
class ReductionParams:
    """Parameters of the reduction from SQ learning to SQ sampling.

    ``q`` is the learner's query count and ``rho`` the target's density.
    The default ``preset="unit"`` sizes the label-0 estimate for queries with
    values in a unit-length range; ``"pm1"`` covers +-1 valued queries (four
    times as many samples).
    """

    eps_prime: float
    rho: float
    q: int
    preset: str = "unit"

    def __post_init__(self):
        if not 0 < self.eps_prime < 1:
            raise ValueError("eps_prime must lie in (0, 1)")
        if not 0 < self.rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.preset not in ("unit", "pm1"):
            raise ValueError(f"unknown preset {self.preset!r}")
        assert self.eps < self.rho

    @property
    def eps(self) -> float:
        """Learner accuracy."""
        return self.rho * self.eps_prime / (4 * math.log(4 / self.eps_prime))

    @property
    def delta(self) -> float:
        """Learner confidence."""
        return self.eps_prime / 4

    @property
    def second_phase_rounds(self) -> int:
        return math.ceil(math.log(1 / self.delta) / self.rho)

    def sample_size(self, xi: float) -> int:
        """Uniform samples used to estimate the label-0 mean of a tolerance-``xi`` query."""
        fp = self.delta / self.q
        if self.preset == "unit":
            return required_samples_sqs(xi / 3, fp, "reduction")
        return required_samples_sqs(xi / 3, fp, "signature")

    def to_dict(self) -> dict:
        return {
            "eps_prime": self.eps_prime, "rho": self.rho, "q": self.q, "preset": self.preset,
            "eps": self.eps, "delta": self.delta, "second_phase_rounds": self.second_phase_rounds,
        }


def _label_tables(g, xs: np.ndarray):
    zeros = np.zeros(len(xs), dtype=np.int64)
    if isinstance(g, tuple):
        raise TypeError("simulation needs a callable labeled query")
    return np.asarray(g(xs, zeros), dtype=float), np.asarray(g(xs, zeros + 1), dtype=float)


def _simulate(g, xi: float, sqs: Session, rho: float, rng, M: int) -> dict:
    n = sqs.n
    xs = FullCube(n).sample(rng, M)
    s = float(_label_tables(g, xs)[0].mean())

    def g0(pts):
        return g(pts, np.zeros(len(pts), dtype=np.int64))

    def g1(pts):
        return g(pts, np.ones(len(pts), dtype=np.int64))

    y0 = sqs.query(g0, xi / 3)
    y1 = sqs.query(g1, xi / 3)
    return {"s": s, "y0": y0, "y1": y1, "y": s + (y1 - y0) * rho, "M": M}


def simulate_sql_from_sqs(
    g,
    xi: float,
    sqs: Session,
    rho: float,
    rng: np.random.Generator,
    *,
    M: int | None = None,
    params: ReductionParams | None = None,
) -> float:
    """Answer a labeled query ``g(x, f(x))`` using two SQS queries and ``M`` cube samples.

    Uses ``g(x, f(x)) = g(x, 0) + [g(x, 1) - g(x, 0)] f(x)``: the first term is
    estimated from uniform samples, the second is ``rho`` times the
    difference of the SQS answers.
    """
    if M is None:
        if params is None:
            raise ValueError("give M or params")
        M = params.sample_size(xi)
    return _simulate(g, xi, sqs, rho, rng, M)["y"]


class SimulatedSQL(Session):
    """An SQL session backed by an SQS session; every answer is logged with its parts."""

    def __init__(self, sqs: Session, params: ReductionParams, rng: np.random.Generator, truth=None):
        super().__init__()
        self.sqs, self.params, self.rng = sqs, params, rng
        self.domain = FullCube(sqs.n)
        self.truth = truth
        self.records: list[dict] = []

    def _answer(self, g, xi):
        rec = _simulate(g, xi, self.sqs, self.params.rho, self.rng, self.params.sample_size(xi))
        true_mean = math.nan
        if self.truth is not None:
            g0, g1 = materialize_labeled(g, self.domain)
            true_mean = float(np.where(self.truth.mask(), g1, g0).mean())
        rec["true"] = true_mean
        self.records.append(rec)
        return OracleAnswer(rec["y"], true_mean, xi, rec)


def learn_then_sample(
    learner,
    sqs: Session,
    params: ReductionParams,
    rng: np.random.Generator,
    domain: Domain | None = None,
) -> SamplerOutcome:
    """Learn a hypothesis through simulated SQL queries, then rejection-sample against it.

    ``learner(sql, eps, delta)`` returns a :class:`Hypothesis`.  A learner
    error is recorded in ``notes`` and the phase falls through to a uniform
    draw.  Phase-two draws come from ``domain`` (default: the session's).
    """
    domain = domain or sqs.domain
    sql = SimulatedSQL(sqs, params, rng)
    notes = []
    hyp = None
    try:
        hyp = learner(sql, params.eps, params.delta)
    except Exception as exc:  # flagged, not fatal
        notes.append(f"learner_failed:{type(exc).__name__}")
    output = None
    if hyp is not None:
        draws = domain.sample(rng, params.second_phase_rounds)
        hits = np.flatnonzero(hyp.evaluate(draws))
        if hits.size:
            output = draws[hits[0]]
        else:
            notes.append("phase2_exhausted")
    if output is None:
        output = domain.sample(rng)
    output = int(output) if domain.is_cube else tuple(int(e) for e in output)
    return SamplerOutcome(output, sqs.queries_used, sqs.tolerances, notes=";".join(notes), hypothesis=hyp)

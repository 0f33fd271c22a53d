"""Toy signature scheme and the breaker that simulates an SQS oracle for its verifier.

The toy scheme is a keyed mixing function used as a deterministic signer.
It has no security whatsoever; determinism makes the exact oracle value
``sigma`` computable by enumerating messages.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .domain import FullCube, SigVerify
from .oracles import OracleAnswer, QueryBudget, Session
from .stats import breaker_sample_params


def _mix64(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64)
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class ToyScheme:
    """Deterministic keyed signer on n-bit messages with n-bit signatures."""

    n: int
    key: bytes

    def __post_init__(self):
        if not 1 <= self.n <= 31:
            raise ValueError("toy scheme supports 1 <= n <= 31")

    @property
    def _k(self) -> np.uint64:
        return np.uint64(int.from_bytes(hashlib.blake2b(self.key, digest_size=8).digest(), "little"))

    def sign_many(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=np.int64)
        out = _mix64(m.astype(np.uint64) ^ self._k)
        return (out & np.uint64((1 << self.n) - 1)).astype(np.int64)

    def verify_many(self, m, s) -> np.ndarray:
        return self.sign_many(m) == np.asarray(s, dtype=np.int64)

    def sign(self, m: int) -> int:
        return int(self.sign_many(np.array([m]))[0])

    def verify(self, m: int, s: int) -> bool:
        return bool(self.verify_many(np.array([m]), np.array([s]))[0])

    def gen(self) -> tuple[bytes, bytes]:
        """``(sk, vk)``; both are the key, since verification recomputes."""
        return self.key, self.key

    def pack(self, m, s):
        return (np.asarray(m, dtype=np.int64) << self.n) | np.asarray(s, dtype=np.int64)

    def predicate(self) -> SigVerify:
        return SigVerify(self)

    def to_descriptor(self) -> dict:
        return {"kind": "toy_prf", "n": self.n, "key_hex": self.key.hex()}


def toy_scheme(n: int, key: bytes | str | int) -> ToyScheme:
    if isinstance(key, int):
        key = key.to_bytes(8, "little")
    elif isinstance(key, str):
        key = bytes.fromhex(key)
    return ToyScheme(n, key)


def scheme_from_descriptor(d: dict) -> ToyScheme:
    if d.get("kind") != "toy_prf":
        raise ValueError(f"unknown scheme kind {d.get('kind')!r}")
    return toy_scheme(int(d["n"]), d["key_hex"])


# ---------------------------------------------------------------------------
# Breaker


@dataclass
class BreakerState:
    """Per-run state: parameters, the signing history and the answer log.

    In the fast path only the history size is tracked; membership of the
    final message is then decided by a Bernoulli draw with the exact
    collision probability of ``|H|`` uniform messages.
    """

    scheme: ToyScheme
    eps: float
    q: int
    xi: float
    exact_sigma: bool = True
    history: list[np.ndarray] = field(default_factory=list)
    history_size: int = 0
    log: list[dict] = field(default_factory=list)

    def __post_init__(self):
        self.xi0, self.M = breaker_sample_params(self.xi, self.eps, self.q)
        if not self.xi > 2 * self.xi0:
            raise ValueError("tolerance must exceed 2 * xi0")

    def sigma(self, g) -> float:
        """Exact mean of ``g`` over valid pairs, by enumerating messages."""
        m = np.arange(1 << self.scheme.n, dtype=np.int64)
        return float(np.mean(g(self.scheme.pack(m, self.scheme.sign_many(m)))))

    def in_history(self, m: int, rng: np.random.Generator | None = None) -> bool:
        if self.history:
            return bool(any((h == m).any() for h in self.history))
        if self.history_size and rng is not None:
            p = -math.expm1(self.history_size * math.log1p(-(2.0 ** -self.scheme.n)))
            return bool(rng.random() < p)
        return False


def breaker_answer_query(
    state: BreakerState,
    g,
    xi: float,
    sign_oracle=None,
    rng: np.random.Generator | None = None,
    *,
    fast: bool = False,
) -> float:
    """Answer ``(g, xi)`` from ``M`` fresh signatures plus uniform noise of width ``xi``.

    ``fast=True`` draws the number of +1 values from a binomial with the exact
    mean; this matches the real path in distribution for +-1 valued ``g``.
    """
    if not xi > 2 * state.xi0:
        raise ValueError("tolerance must exceed 2 * xi0")
    sign_oracle = sign_oracle or state.scheme.sign_many
    M, n = state.M, state.scheme.n
    sigma = state.sigma(g) if (fast or state.exact_sigma) else math.nan
    entry = {"M": M, "xi": xi}
    if fast:
        plus = int(rng.binomial(M, (1 + sigma) / 2))
        x = (2 * plus - M) / M
        state.history_size += M
        entry["fast"] = True
    else:
        msgs = rng.integers(0, 1 << n, size=M, dtype=np.int64)
        vals = np.asarray(g(state.scheme.pack(msgs, sign_oracle(msgs))), dtype=float)
        x = float(vals.mean())
        state.history.append(msgs)
        state.history_size += M
        entry["U_digest"] = hashlib.blake2b(msgs.tobytes(), digest_size=8).hexdigest()
    y = float(rng.uniform(x - xi / 2, x + xi / 2))
    entry.update({"x": x, "y": y, "sigma": sigma, "typical": bool(abs(x - sigma) <= state.xi0)})
    state.log.append(entry)
    return y


def answer_sd_bound(x0: float, x1: float, xi: float) -> float:
    """Upper bound on the distance between uniform answers centred at ``x0`` and ``x1``."""
    if xi <= 0:
        raise ValueError("xi must be positive")
    return min(1.0, abs(x0 - x1) / xi)


class BreakerOracle(Session):
    """SQS session over (message, signature) pairs answered by the breaker."""

    def __init__(self, state: BreakerState, rng: np.random.Generator, fast: bool = False):
        super().__init__(QueryBudget(state.q, 0.0))
        self.state, self.rng, self.fast = state, rng, fast
        self.domain = FullCube(2 * state.scheme.n)

    def _answer(self, g, xi):
        y = breaker_answer_query(self.state, g, xi, rng=self.rng, fast=self.fast)
        e = self.state.log[-1]
        return OracleAnswer(y, e["sigma"], xi, {"typical": e["typical"]})


def breaker_run(
    sampler,
    scheme: ToyScheme,
    eps: float,
    q: int,
    rng: np.random.Generator,
    xi: float = 0.1,
    *,
    fast: bool = False,
) -> dict:
    """Run ``sampler(oracle, rng) -> (m, s)`` against the breaker and classify its output."""
    state = BreakerState(scheme, eps, q, xi)
    oracle = BreakerOracle(state, rng, fast)
    m, s = sampler(oracle, rng)
    if not scheme.verify(m, s):
        outcome = "invalid"
    elif state.in_history(m, rng):
        outcome = "seen"
    else:
        outcome = "forged"
    return {"outcome": outcome, "H_size": state.history_size, "transcript": oracle.transcript,
            "log": state.log, "output": (int(m), int(s))}


def key_holding_sampler(scheme: ToyScheme, queries: int, xi: float):
    """Cheating sampler: issues ``queries`` fixed queries, then signs a random message itself."""

    def run(oracle, rng):
        for _ in range(queries):
            oracle.query(lambda xs: np.ones(len(xs)), xi)
        m = int(rng.integers(0, 1 << scheme.n))
        return m, scheme.sign(m)

    return run


def invalid_sampler(scheme: ToyScheme):
    def run(oracle, rng):
        m = int(rng.integers(0, 1 << scheme.n))
        return m, scheme.sign(m) ^ 1

    return run

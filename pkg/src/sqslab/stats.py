"""Hoeffding tails, sample-size planning and statistical distance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping

import numpy as np


def hoeffding_tail(num_samples: int, deviation: float) -> float:
    """``exp(-2 n eps^2)``: bound on a Bernoulli mean falling ``eps`` below its expectation."""
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if not 0 < deviation < 0.5:
        raise ValueError("deviation must lie in (0, 1/2)")
    return math.exp(-2 * num_samples * deviation * deviation)


PRESETS = ("signature", "reduction")


def required_samples_sqs(xi0: float, failure_prob: float, preset: str = "signature") -> int:
    """Samples so that an empirical mean is ``xi0``-accurate except with ``failure_prob``.

    ``"signature"`` treats +-1 outcomes (range 2): ``M = 2 ln(2/fp) / xi0^2``.
    ``"reduction"`` treats 0/1 outcomes (range 1): ``M = ln(2/fp) / (2 xi0^2)``.
    """
    if xi0 <= 0:
        raise ValueError("xi0 must be positive")
    if not 0 < failure_prob < 1:
        raise ValueError("failure_prob must lie in (0, 1)")
    log_term = math.log(2 / failure_prob)
    if preset == "signature":
        return math.ceil(2 * log_term / xi0**2)
    if preset == "reduction":
        return math.ceil(log_term / (2 * xi0**2))
    raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")


def breaker_sample_params(xi: float, eps: float, q: int) -> tuple[float, int]:
    """``(xi0, M)`` with ``xi0 = xi eps / 10q`` and ``M = 2 ln(10q/eps) / xi0^2``."""
    xi0 = xi * eps / (10 * q)
    return xi0, required_samples_sqs(xi0, eps / (5 * q), "signature")


def reduction_sample_size(xi: float, q: int, delta: float) -> int:
    """``M = 9 ln(2q/delta) / (2 xi^2)``: per-query sample count of the learn-then-sample reduction."""
    return required_samples_sqs(xi / 3, delta / q, "reduction")


# ---------------------------------------------------------------------------
# Statistical distance


class Pmf(dict):
    """Finite distribution as ``{point: probability}``."""

    def __init__(self, probs: Mapping[Hashable, float] | None = None, tol: float = 1e-12):
        super().__init__(probs or {})
        if any(p < 0 for p in self.values()):
            raise ValueError("negative probability")
        total = sum(self.values())
        if abs(total - 1) > tol:
            raise ValueError(f"probabilities sum to {total}")

    @classmethod
    def uniform(cls, support) -> "Pmf":
        support = list(support)
        return cls({x: 1 / len(support) for x in support})

    def prob(self, event) -> float:
        return sum(p for x, p in self.items() if event(x))

    def product(self, other: "Pmf") -> "Pmf":
        return Pmf({(a, b): pa * pb for a, pa in self.items() for b, pb in other.items()}, tol=1e-9)


def statistical_distance(A: Mapping, B: Mapping) -> float:
    """Half the L1 distance over the union of supports."""
    support = set(A) | set(B)
    return 0.5 * sum(abs(A.get(x, 0.0) - B.get(x, 0.0)) for x in support)


@dataclass(frozen=True)
class UniformInterval:
    center: float
    half_width: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")

    @property
    def low(self) -> float:
        return self.center - self.half_width

    @property
    def length(self) -> float:
        return 2 * self.half_width

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.low) & (x <= self.center + self.half_width)
        return np.where(inside, 1 / self.length, 0.0)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.uniform(self.low, self.center + self.half_width, size=size)


def uniform_interval_sd(D1: UniformInterval, D2: UniformInterval) -> float:
    """Exact distance between equal-length uniform intervals: ``min(1, |c1-c2| / length)``."""
    if not math.isclose(D1.half_width, D2.half_width, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError("intervals must have equal length")
    return min(1.0, abs(D1.center - D2.center) / D1.length)


def uniform_interval_sd_bound(D1: UniformInterval, D2: UniformInterval) -> float:
    """The ``|a-b|/l`` upper bound on the distance (not capped at 1)."""
    return abs(D1.low - D2.low) / D1.length

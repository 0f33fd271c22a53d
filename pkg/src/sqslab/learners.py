"""SQ learners used to drive the learn-then-sample reduction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import bit_of


class LearnerError(RuntimeError):
    pass


@dataclass(frozen=True)
class Hypothesis:
    """A total predicate on n-bit points: a dictator or a constant."""

    kind: str
    n: int
    index: int | None = None
    value: int | None = None
    description: str = ""

    def evaluate(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        if self.kind == "dictator":
            return bit_of(xs, self.index, self.n).astype(np.uint8)
        if self.kind == "constant":
            return np.full(xs.shape, self.value, dtype=np.uint8)
        raise ValueError(self.kind)

    def __call__(self, x) -> int:
        return int(self.evaluate(np.array([x]))[0])

    def to_json(self) -> dict:
        if self.kind == "dictator":
            return {"kind": "dictator", "index": self.index}
        return {"kind": "constant", "value": self.value}

    @classmethod
    def from_json(cls, d: dict, n: int) -> "Hypothesis":
        if d["kind"] == "dictator":
            return cls("dictator", n, index=int(d["index"]))
        return cls("constant", n, value=int(d["value"]))


def dictator_query(i: int, n: int):
    """``g_i(x, y) = (2y - 1) (-1)^(x_i)``; -1 everywhere iff the target is ``x_i``."""

    def g(xs, ys):
        return (2 * np.asarray(ys) - 1) * (1 - 2 * bit_of(np.asarray(xs), i, n))

    return g


def dictator_sq_learner(sql, eps: float | None = None, delta: float | None = None, xi: float = 0.25) -> Hypothesis:
    """Learn a dictator ``f(x) = x_i`` with one correlation query per coordinate.

    The true index answers -1 and every other index answers 0, so any oracle
    of tolerance below 1/2 separates them.  ``eps`` and ``delta`` are accepted
    for the learner interface; recovery is exact whenever the answers are valid.
    """
    n = sql.n
    responses = np.array([sql.query(dictator_query(i, n), xi) for i in range(n)])
    best = int(np.argmin(responses))
    if responses[best] >= -0.5:
        raise LearnerError(f"no response below -1/2 (min {responses[best]:.3f})")
    return Hypothesis("dictator", n, index=best, description=f"x_{best}")


def trivial_sparse_learner(density_bound: float, eps: float, n: int) -> Hypothesis:
    """All-zero hypothesis; its error is the target's density."""
    if eps < density_bound:
        raise ValueError(f"accuracy {eps} is finer than the density bound {density_bound}")
    return Hypothesis("constant", n, value=0, description="all zero")

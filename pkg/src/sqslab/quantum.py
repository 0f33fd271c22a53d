"""Classical models of Simon's and Shor's hidden sets, with their post-processing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .domain import (
    BitVector,
    DomainError,
    FullCube,
    NegParity,
    PuncturedCube,
    SetMembership,
    popcount,
)

MAX_ORDER_MODULUS = 1 << 20


def order_of(a: int, N: int) -> int:
    """Least ``r > 0`` with ``a^r = 1 (mod N)``, by iterating powers."""
    if N < 1 or N > MAX_ORDER_MODULUS:
        raise ValueError(f"modulus {N} outside 1..2^20")
    if math.gcd(a, N) != 1:
        raise ValueError(f"gcd({a}, {N}) != 1")
    if N == 1:
        return 1
    x, r = a % N, 1
    while x != 1:
        x = x * a % N
        r += 1
    return r


@dataclass(frozen=True)
class ShorInstance:
    """Order-finding instance with first-register width ``n``."""

    N: int
    a: int
    n: int

    def __post_init__(self):
        if math.gcd(self.a, self.N) != 1:
            raise ValueError(f"gcd({self.a}, {self.N}) != 1")
        if (1 << self.n) < self.N:
            raise ValueError("register too narrow for the modulus")

    @property
    def Q(self) -> int:
        return 1 << self.n

    @property
    def r(self) -> int:
        return order_of(self.a, self.N)

    @classmethod
    def for_recovery(cls, N: int, a: int) -> "ShorInstance":
        """Smallest width with ``2^n >= N^2``."""
        return cls(N, a, max(1, (N * N - 1).bit_length()))

    def to_descriptor(self) -> dict:
        return {"kind": "shor", "N": self.N, "a": self.a, "n": self.n}


def _round_half_even(x: Fraction) -> int:
    return round(x)  # Fraction.__round__ rounds ties to even


def shor_ideal_samples(inst: ShorInstance) -> list[int]:
    """``round(t 2^n / r)`` for ``0 <= t < r`` in order of ``t``."""
    r = inst.r
    return [_round_half_even(Fraction(t * inst.Q, r)) for t in range(r)]


def shor_hidden_set(inst: ShorInstance) -> SetMembership:
    return SetMembership(frozenset(shor_ideal_samples(inst)), FullCube(inst.n))


def continued_fraction_order(y: int, Q: int, N: int, a: int | None = None) -> int | None:
    """Candidate order from one measurement ``y`` of a ``Q``-point register.

    Walks the convergents of ``y/Q`` with denominator below ``N`` and returns
    the least denominator within ``1/(2Q)`` of ``y/Q`` (and, if ``a`` is
    given, with ``a^d = 1 mod N``).  Returns ``None`` for ``y = 0`` or when no
    convergent qualifies.
    """
    if not 0 <= y < Q:
        raise ValueError("need 0 <= y < Q")
    if y == 0:
        return None
    target = Fraction(y, Q)
    bound = Fraction(1, 2 * Q)
    h0, h1, k0, k1 = 0, 1, 1, 0
    x = target
    while True:
        c = math.floor(x)
        h0, h1 = h1, c * h1 + h0
        k0, k1 = k1, c * k1 + k0
        if k1 >= N:
            return None
        if k1 > 0 and abs(target - Fraction(h1, k1)) <= bound:
            if a is None or pow(a, k1, N) == 1:
                return k1
        frac = x - c
        if frac == 0:
            return None
        x = 1 / frac


def cf_denominator(y: int, Q: int, N: int) -> int | None:
    """Denominator of the closest qualifying convergent, without the order check."""
    return continued_fraction_order(y, Q, N, None)


def recover_order(samples, Q: int, N: int, a: int) -> int | None:
    """Combine convergent denominators by lcm until ``a^L = 1 (mod N)``."""
    L = 1
    if pow(a, 1, N) == 1 % N:
        return 1
    for y in samples:
        d = cf_denominator(int(y), Q, N)
        if d is None:
            continue
        L = math.lcm(L, d)
        if pow(a, L, N) == 1:
            # the order divides L; take the least divisor that works
            return next(d for d in range(1, L + 1) if L % d == 0 and pow(a, d, N) == 1)
    return None


# ---------------------------------------------------------------------------
# Simon


@dataclass(frozen=True)
class GF2Solution:
    """Result of :func:`gf2_solve`: a secret or the rank of an underdetermined system."""

    rank: int
    n: int
    secret: BitVector | None

    @property
    def determined(self) -> bool:
        return self.secret is not None


def gf2_rref(rows: list[int], n: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon basis and pivot columns (bit index, 0 = leftmost)."""
    basis: list[int] = []
    pivots: list[int] = []
    for row in rows:
        for b, col in zip(basis, pivots):
            if (row >> (n - 1 - col)) & 1:
                row ^= b
        if row == 0:
            continue
        col = n - row.bit_length()
        for i, b in enumerate(basis):
            if (b >> (n - 1 - col)) & 1:
                basis[i] = b ^ row
        basis.append(row)
        pivots.append(col)
    order = sorted(range(len(basis)), key=lambda i: pivots[i])
    return [basis[i] for i in order], [pivots[i] for i in order]


def gf2_solve(samples, n: int | None = None) -> GF2Solution:
    """Solve ``y . s = 0`` for every sample ``y``."""
    rows = []
    for y in samples:
        if isinstance(y, BitVector):
            if n is None:
                n = y.n
            elif y.n != n:
                raise ValueError("samples have mixed widths")
            rows.append(y.value)
        else:
            rows.append(int(y))
    if n is None:
        raise ValueError("width unknown: pass n or BitVector samples")
    basis, pivots = gf2_rref(rows, n)
    rank = len(basis)
    if rank == n:
        return GF2Solution(rank, n, BitVector(0, n))
    if rank < n - 1:
        return GF2Solution(rank, n, None)
    free = next(c for c in range(n) if c not in pivots)
    s = 1 << (n - 1 - free)
    for b, col in zip(basis, pivots):
        if (b >> (n - 1 - free)) & 1:
            s |= 1 << (n - 1 - col)
    return GF2Solution(rank, n, BitVector(s, n))


@dataclass(frozen=True)
class SimonInstance:
    n: int
    secret: int

    def __post_init__(self):
        if not 0 <= self.secret < (1 << self.n):
            raise ValueError("secret wider than n bits")

    @property
    def degenerate(self) -> bool:
        """No nonzero ``y`` is orthogonal to the secret."""
        return self.n == 1 and self.secret == 1

    def hidden_set(self) -> NegParity:
        """Nonzero ``y`` with ``y . s = 0``."""
        if self.degenerate:
            raise DomainError("hidden set is empty")
        return NegParity(self.secret, self.n, PuncturedCube(self.n))

    def hidden_size(self) -> int:
        return (1 << self.n) - 1 if self.secret == 0 else (1 << (self.n - 1)) - 1

    def standard_source(self):
        """Uniform draws from the hidden set, by rejection."""

        def draw(rng: np.random.Generator) -> int:
            while True:
                y = int(rng.integers(1, 1 << self.n))
                if popcount(y & self.secret) % 2 == 0:
                    return y

        return draw

    def random_guess_source(self):
        def draw(rng: np.random.Generator) -> int:
            return int(rng.integers(1, 1 << self.n))

        return draw

    def to_descriptor(self) -> dict:
        return {"kind": "simon", "n": self.n, "secret_hex": format(self.secret, "x")}


def simon_end_to_end(inst: SimonInstance, source, num_samples: int, rng: np.random.Generator) -> dict:
    """Collect samples from ``source(rng)`` and compare the solved secret with the truth."""
    if inst.degenerate:
        return {"recovered": None, "success": False, "rank": 0, "degenerate": True}
    sol = gf2_solve([source(rng) for _ in range(num_samples)], inst.n)
    recovered = None if sol.secret is None else sol.secret.value
    return {"recovered": recovered, "success": recovered == inst.secret, "rank": sol.rank, "degenerate": False}

"""Input spaces, bit/Z_p vectors, predicates and predicate classes.

Conventions used across the package:

* A point of the boolean cube ``{0,1}^n`` is a Python/numpy integer.  Entry 0
  is the most significant bit, so ``"101"`` is the integer 5 and bit ``i`` of
  ``x`` is ``(x >> (n - 1 - i)) & 1``.  Integer order is therefore the
  lexicographic order with entry 0 most significant.
* A point of ``Z_p^n`` is a length-n row of ints.  Domains over ``Z_p`` are
  enumerated as an ``(N, n)`` array in lexicographic order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_CAP = 1 << 24
MAX_WIDTH = 64


class DomainError(ValueError):
    """A point was evaluated outside a predicate's domain."""


class ResourceError(RuntimeError):
    """An enumeration would exceed the configured cap."""


class InvariantViolation(AssertionError):
    """A closed-form count disagreed with brute force."""


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    return all(p % d for d in range(3, int(p**0.5) + 1, 2))


def popcount(x):
    """Population count for ints or integer arrays."""
    if isinstance(x, np.ndarray):
        return np.bitwise_count(x.astype(np.uint64, copy=False)).astype(np.int64)
    return int(x).bit_count()


def bit_of(x, i: int, n: int):
    """Entry ``i`` (0 = leftmost) of an n-bit point or array of points."""
    return (x >> (n - 1 - i)) & 1


@dataclass(frozen=True)
class BitVector:
    """Fixed-width binary vector packed into an int."""

    value: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_WIDTH:
            raise ValueError(f"width {self.n} outside 1..{MAX_WIDTH}")
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_str(cls, bits: str) -> "BitVector":
        bits = bits.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return cls(int(bits, 2), len(bits))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitVector":
        return cls.from_str("".join(str(int(b)) for b in bits))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(bit_of(self.value, i, self.n) for i in range(self.n))

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return bit_of(self.value, i, self.n)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b")

    def hex(self) -> str:
        return format(self.value, "x")


def dot_gf2(x: BitVector | int, s: BitVector | int) -> int:
    """``s . x mod 2``.  BitVector arguments must have equal widths."""
    if isinstance(x, BitVector) and isinstance(s, BitVector):
        if x.n != s.n:
            raise ValueError(f"width mismatch: {x.n} vs {s.n}")
    return popcount(int(x) & int(s)) & 1


@dataclass(frozen=True)
class ZpVector:
    entries: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if not _is_odd_prime(self.p):
            raise ValueError(f"p={self.p} is not an odd prime")
        if not self.entries:
            raise ValueError("empty vector")
        if any(not 0 <= e < self.p for e in self.entries):
            raise ValueError(f"entries must lie in [0, {self.p})")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def dot(self, other: Sequence[int]) -> int:
        if len(other) != self.n:
            raise ValueError("width mismatch")
        return sum(a * int(b) for a, b in zip(self.entries, other)) % self.p

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.entries)) + ")"


# ---------------------------------------------------------------------------
# Domains


@dataclass(frozen=True)
class Domain:
    """An enumerable input space.

    ``kind`` is one of ``"full_cube"``, ``"punctured_cube"`` (``{0,1}^n``
    without ``0^n``) or ``"punctured_zp"`` (vectors over ``Z_p`` whose last
    ``n-1`` entries are not all zero).
    """

    kind: str
    n: int
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("full_cube", "punctured_cube", "punctured_zp"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "punctured_zp":
            if self.p is None or not _is_odd_prime(self.p):
                raise ValueError("punctured_zp needs an odd prime p")
            if self.n < 2:
                raise ValueError("punctured_zp needs n >= 2")
        elif self.p is not None:
            raise ValueError("cube domains take no modulus")
        if not 1 <= self.n <= MAX_WIDTH:
            raise ValueError(f"width {self.n} out of range")

    @property
    def is_cube(self) -> bool:
        return self.kind != "punctured_zp"

    @property
    def cardinality(self) -> int:
        if self.kind == "full_cube":
            return 1 << self.n
        if self.kind == "punctured_cube":
            return (1 << self.n) - 1
        return self.p**self.n - self.p

    def check_cap(self, cap: int = DEFAULT_CAP) -> None:
        if self.cardinality > cap:
            raise ResourceError(
                f"{self.kind}(n={self.n}) has {self.cardinality} points, cap is {cap}"
            )

    def elements(self, cap: int = DEFAULT_CAP) -> np.ndarray:
        """All points in lexicographic order."""
        self.check_cap(cap)
        if self.kind == "full_cube":
            return np.arange(1 << self.n, dtype=np.int64)
        if self.kind == "punctured_cube":
            return np.arange(1, 1 << self.n, dtype=np.int64)
        return _zp_elements(self.n, self.p)

    def contains(self, x) -> bool:
        if self.is_cube:
            x = int(x)
            return (0 if self.kind == "full_cube" else 1) <= x < (1 << self.n)
        if isinstance(x, ZpVector):
            if x.p != self.p:
                return False
            x = x.entries
        x = tuple(int(e) for e in x)
        return (
            len(x) == self.n
            and all(0 <= e < self.p for e in x)
            and any(e != 0 for e in x[1:])
        )

    def index_of(self, x) -> int:
        """Row of ``x`` in :meth:`elements`."""
        if not self.contains(x):
            raise DomainError(f"{x} not in {self}")
        if self.is_cube:
            return int(x) - (0 if self.kind == "full_cube" else 1)
        if isinstance(x, ZpVector):
            x = x.entries
        code = 0
        for e in x:
            code = code * self.p + int(e)
        # excluded codes below ``code`` are x0 * p^(n-1) for x0 <= leading entry
        return code - (int(x[0]) + 1)

    def sample(self, rng: np.random.Generator, size=None):
        """Uniform draw(s) from the domain."""
        if self.kind == "full_cube":
            return rng.integers(0, 1 << self.n, size=size, dtype=np.int64)
        if self.kind == "punctured_cube":
            return rng.integers(1, 1 << self.n, size=size, dtype=np.int64)
        idx = rng.integers(0, self.cardinality, size=size)
        return _zp_from_index(np.asarray(idx), self.n, self.p)

    def format_element(self, x) -> str:
        if self.is_cube:
            return format(int(x), "x")
        return "(" + ",".join(str(int(e)) for e in x) + ")"

    def to_descriptor(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        if self.p is not None:
            d["p"] = self.p
        return d

    @classmethod
    def from_descriptor(cls, d: dict) -> "Domain":
        return cls(d["kind"], int(d["n"]), d.get("p"))


def FullCube(n: int) -> Domain:
    return Domain("full_cube", n)


def PuncturedCube(n: int) -> Domain:
    return Domain("punctured_cube", n)


def PuncturedZp(n: int, p: int) -> Domain:
    return Domain("punctured_zp", n, p)


def _zp_from_index(idx: np.ndarray, n: int, p: int) -> np.ndarray:
    # punctured index -> code: skip the excluded code x0 * p^(n-1) of each block
    block = p ** (n - 1) - 1
    code = (idx // block) * p ** (n - 1) + idx % block + 1
    out = np.empty(idx.shape + (n,), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[..., i] = code % p
        code = code // p
    return out


def _zp_elements(n: int, p: int) -> np.ndarray:
    full = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)
    keep = np.any(full[:, 1:] != 0, axis=1)
    return full[keep]


# ---------------------------------------------------------------------------
# Predicates


class Predicate:
    """A {0,1}-valued function on a finite domain."""

    domain: Domain

    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> int:
        if not self.domain.contains(x):
            raise DomainError(f"{x!r} is outside {self.domain}")
        if self.domain.is_cube:
            arr = np.array([int(x)], dtype=np.int64)
        else:
            entries = x.entries if isinstance(x, ZpVector) else x
            arr = np.array([list(entries)], dtype=np.int64)
        return int(self.evaluate(arr)[0])

    def mask(self, cap: int = DEFAULT_CAP) -> np.ndarray:
        """Boolean positivity mask aligned with ``domain.elements()``."""
        return self.evaluate(self.domain.elements(cap)).astype(bool)

    def positive_elements(self, cap: int = DEFAULT_CAP) -> np.ndarray:
        return self.domain.elements(cap)[self.mask(cap)]

    def positive_count(self, cap: int = DEFAULT_CAP) -> int:
        return int(self.mask(cap).sum())

    def to_descriptor(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class NegParity(Predicate):
    """``1 - (s . x mod 2)``; punctured cube by default."""

    s: int
    n: int
    domain: Domain = None

    def __post_init__(self):
        object.__setattr__(self, "s", int(self.s))
        if self.domain is None:
            object.__setattr__(self, "domain", PuncturedCube(self.n))
        if not self.domain.is_cube or self.domain.n != self.n:
            raise ValueError("negative parity lives on an n-bit cube")
        if not 0 <= self.s < (1 << self.n):
            raise ValueError("s does not fit in n bits")

    def evaluate(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        return (1 - (popcount(xs & self.s) & 1)).astype(np.uint8)

    def to_descriptor(self):
        return {
            "kind": "negparity",
            "n": self.n,
            "params": {"s_hex": format(self.s, "x"), "domain": self.domain.kind},
        }


@dataclass(frozen=True, eq=True)
class BoolLinear(Predicate):
    """Indicator of ``a . x = 1 (mod p)`` on the punctured Z_p space."""

    a: ZpVector
    domain: Domain = None

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(self, "domain", PuncturedZp(self.a.n, self.a.p))

    @property
    def normalized(self) -> bool:
        return self.a[0] == 1

    @property
    def p(self) -> int:
        return self.a.p

    def evaluate(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        a = np.array(self.a.entries, dtype=np.int64)
        return ((xs @ a) % self.a.p == 1).astype(np.uint8)

    def to_descriptor(self):
        return {
            "kind": "boollinear",
            "n": self.a.n,
            "p": self.a.p,
            "params": {"a": list(self.a.entries)},
        }


@dataclass(frozen=True, eq=True)
class SetMembership(Predicate):
    """Explicit positive set over a cube domain."""

    positives: frozenset
    domain: Domain

    def __post_init__(self):
        object.__setattr__(self, "positives", frozenset(int(x) for x in self.positives))
        if not self.domain.is_cube:
            raise ValueError("explicit sets are supported over cube domains")
        bad = [x for x in self.positives if not self.domain.contains(x)]
        if bad:
            raise DomainError(f"points outside domain: {bad[:5]}")

    def evaluate(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        pos = np.fromiter(sorted(self.positives), dtype=np.int64, count=len(self.positives))
        return np.isin(xs, pos).astype(np.uint8)

    def positive_elements(self, cap=DEFAULT_CAP):
        return np.array(sorted(self.positives), dtype=np.int64)

    def positive_count(self, cap=DEFAULT_CAP):
        return len(self.positives)

    def to_descriptor(self):
        return {
            "kind": "set",
            "n": self.domain.n,
            "params": {
                "positives_hex": [format(x, "x") for x in sorted(self.positives)],
                "domain": self.domain.kind,
            },
        }


@dataclass(frozen=True, eq=True)
class Dictator(Predicate):
    """``f(x) = x_index`` over the full cube."""

    index: int
    n: int
    domain: Domain = None

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(self, "domain", FullCube(self.n))
        if not 0 <= self.index < self.n:
            raise ValueError("index out of range")

    def evaluate(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        return bit_of(xs, self.index, self.n).astype(np.uint8)

    def to_descriptor(self):
        return {"kind": "dictator", "n": self.n, "params": {"index": self.index}}


@dataclass(frozen=True, eq=True)
class Constant(Predicate):
    value: int
    domain: Domain

    def evaluate(self, xs):
        xs = np.asarray(xs)
        shape = xs.shape if self.domain.is_cube else xs.shape[:-1]
        return np.full(shape, int(bool(self.value)), dtype=np.uint8)

    def to_descriptor(self):
        return {
            "kind": "constant",
            "n": self.domain.n,
            "params": {"value": int(bool(self.value)), "domain": self.domain.to_descriptor()},
        }


@dataclass(frozen=True, eq=False)
class SigVerify(Predicate):
    """Signature verification over message/signature pairs.

    A pair ``(m, s)`` of n-bit strings is packed as ``(m << n) | s``, so the
    domain is the full cube of width ``2n``.
    """

    scheme: object
    domain: Domain = field(default=None)

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(self, "domain", FullCube(2 * self.scheme.n))

    def evaluate(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        n = self.scheme.n
        m, s = xs >> n, xs & ((1 << n) - 1)
        return self.scheme.verify_many(m, s).astype(np.uint8)

    def positive_elements(self, cap=DEFAULT_CAP):
        # each message has exactly the signatures the scheme accepts; enumerate
        # messages rather than the 2^(2n) pair space
        n = self.scheme.n
        if (1 << n) > cap:
            raise ResourceError(f"2^{n} messages exceed cap {cap}")
        m = np.arange(1 << n, dtype=np.int64)
        s = self.scheme.sign_many(m)
        pairs = (m << n) | s
        return pairs[self.scheme.verify_many(m, s).astype(bool)]

    def positive_count(self, cap=DEFAULT_CAP):
        return len(self.positive_elements(cap))

    def to_descriptor(self):
        return {"kind": "sigverify", "n": self.scheme.n, "params": self.scheme.to_descriptor()}


def positive_set(f: Predicate, cap: int = DEFAULT_CAP) -> list:
    """Positive inputs of ``f`` in lexicographic order."""
    pts = f.positive_elements(cap)
    if f.domain.is_cube:
        return [int(x) for x in pts]
    return [tuple(int(e) for e in row) for row in pts]


def density_exact(f: Predicate, cap: int = DEFAULT_CAP) -> Fraction:
    return Fraction(f.positive_count(cap), f.domain.cardinality)


def density(f: Predicate, cap: int = DEFAULT_CAP) -> float:
    """Fraction of the domain on which ``f`` is 1."""
    return float(density_exact(f, cap))


def predicate_from_descriptor(d: dict, scheme_factory=None) -> Predicate:
    kind = d["kind"]
    n = int(d["n"])
    params = d.get("params", {})
    if kind == "negparity":
        dom = Domain(params.get("domain", "punctured_cube"), n)
        return NegParity(int(params["s_hex"], 16), n, dom)
    if kind == "boollinear":
        return BoolLinear(ZpVector(tuple(params["a"]), int(d["p"])))
    if kind == "set":
        dom = Domain(params.get("domain", "full_cube"), n)
        return SetMembership(frozenset(int(h, 16) for h in params["positives_hex"]), dom)
    if kind == "dictator":
        return Dictator(int(params["index"]), n)
    if kind == "constant":
        dom = Domain.from_descriptor(params.get("domain", {"kind": "full_cube", "n": n}))
        return Constant(int(params["value"]), dom)
    if kind == "sigverify":
        if scheme_factory is None:
            from .crypto import scheme_from_descriptor as scheme_factory
        return SigVerify(scheme_factory(params))
    raise ValueError(f"unknown predicate kind {kind!r}")


# ---------------------------------------------------------------------------
# Predicate classes


class PredicateClass:
    """A finite family of predicates on a common domain.

    Members are addressed by position ``0..size-1``.  ``mask_matrix`` is the
    ``(|domain|, size)`` positivity table used by the exact adversaries.
    """

    domain: Domain

    @property
    def size(self) -> int:
        raise NotImplementedError

    def member(self, i: int) -> Predicate:
        raise NotImplementedError

    def members(self) -> Iterator[Predicate]:
        for i in range(self.size):
            yield self.member(i)

    def mask_matrix(self, cap: int = DEFAULT_CAP) -> np.ndarray:
        pts = self.domain.elements(cap)
        return np.stack([f.evaluate(pts).astype(bool) for f in self.members()], axis=1)

    def positive_sizes(self) -> np.ndarray:
        return self.mask_matrix().sum(axis=0)

    def positive_sums(self, values: np.ndarray) -> np.ndarray:
        """Sum of ``values`` (aligned with domain elements) over each positive set."""
        return values @ self.mask_matrix()

    def positive_means(self, values: np.ndarray) -> np.ndarray:
        sizes = self.positive_sizes()
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.positive_sums(values) / sizes

    def point_counts(self, alive: np.ndarray) -> np.ndarray:
        """For each domain point, how many alive members are positive there."""
        return self.mask_matrix() @ alive.astype(np.int64)

    def to_descriptor(self) -> dict:
        raise NotImplementedError


class AllNegParity(PredicateClass):
    """Negative parities ``not-xor_s`` on the punctured cube.

    ``include_zero`` selects the index set: ``s != 0`` (default) or all ``s``.
    Expectations use a Walsh-Hadamard fast path instead of the mask matrix.
    """

    def __init__(self, n: int, include_zero: bool = False):
        self.n = n
        self.include_zero = include_zero
        self.domain = PuncturedCube(n)

    @property
    def size(self) -> int:
        return (1 << self.n) - (0 if self.include_zero else 1)

    @property
    def offset(self) -> int:
        return 0 if self.include_zero else 1

    def index_set(self) -> np.ndarray:
        return np.arange(self.offset, 1 << self.n, dtype=np.int64)

    def member(self, i: int) -> NegParity:
        return NegParity(i + self.offset, self.n)

    def positive_sizes(self) -> np.ndarray:
        sizes = np.full(self.size, (1 << (self.n - 1)) - 1, dtype=np.int64)
        if self.include_zero:
            sizes[0] = (1 << self.n) - 1
        return sizes

    def positive_sums(self, values: np.ndarray) -> np.ndarray:
        from .fourier import fwht

        # values are over the punctured cube; pad 0^n with 0 to use the cube WHT
        full = np.concatenate([[0.0], np.asarray(values, dtype=float)])
        raw = fwht(full)  # sum_x g(x) (-1)^{s.x}
        # sum over {x != 0 : s.x = 0} = (raw[0] + raw[s]) / 2
        sums = (raw[0] + raw) / 2.0
        return sums[self.offset:]

    def point_counts(self, alive: np.ndarray) -> np.ndarray:
        from .fourier import fwht

        ind = np.zeros(1 << self.n)
        ind[self.offset:] = alive
        raw = fwht(ind)  # sum_{s alive} (-1)^{s.x}
        counts = (raw[0] + raw) / 2.0
        return np.rint(counts[1:]).astype(np.int64)

    def to_descriptor(self):
        return {"kind": "negparity_class", "n": self.n, "params": {"include_zero": self.include_zero}}


class NormalizedBoolLinear(PredicateClass):
    """All ``L_a`` with ``a[0] = 1`` over the punctured Z_p space."""

    def __init__(self, n: int, p: int):
        if n < 2:
            raise ValueError("need n >= 2")
        self.n, self.p = n, p
        self.domain = PuncturedZp(n, p)
        self._mask = None

    @property
    def size(self) -> int:
        return self.p ** (self.n - 1)

    def coefficients(self) -> np.ndarray:
        tails = np.array(list(itertools.product(range(self.p), repeat=self.n - 1)), dtype=np.int64)
        tails = tails.reshape(self.size, self.n - 1)
        return np.concatenate([np.ones((self.size, 1), dtype=np.int64), tails], axis=1)

    def member(self, i: int) -> BoolLinear:
        tail = []
        for _ in range(self.n - 1):
            tail.append(i % self.p)
            i //= self.p
        return BoolLinear(ZpVector((1, *reversed(tail)), self.p))

    def mask_matrix(self, cap: int = DEFAULT_CAP) -> np.ndarray:
        if self._mask is None:
            self.domain.check_cap(cap)
            if self.domain.cardinality * self.size > 1 << 28:
                raise ResourceError("class-by-domain table too large")
            X = self.domain.elements(cap)
            self._mask = (X @ self.coefficients().T) % self.p == 1
        return self._mask

    def positive_sizes(self) -> np.ndarray:
        return np.full(self.size, self.p ** (self.n - 1) - 1, dtype=np.int64)

    def positive_sums(self, values):
        return np.asarray(values, dtype=float) @ self.mask_matrix()

    def to_descriptor(self):
        return {"kind": "boollinear_class", "n": self.n, "p": self.p, "params": {}}


class CustomClass(PredicateClass):
    def __init__(self, predicates: Iterable[Predicate]):
        self.predicates = list(predicates)
        if not self.predicates:
            raise ValueError("empty class")
        doms = {f.domain for f in self.predicates}
        if len(doms) != 1:
            raise ValueError("members must share a domain")
        self.domain = doms.pop()
        self._mask = None

    @property
    def size(self):
        return len(self.predicates)

    def member(self, i):
        return self.predicates[i]

    def mask_matrix(self, cap=DEFAULT_CAP):
        if self._mask is None:
            self._mask = super().mask_matrix(cap)
        return self._mask

    def to_descriptor(self):
        return {
            "kind": "custom_class",
            "n": self.domain.n,
            "params": {"members": [f.to_descriptor() for f in self.predicates]},
        }


class DictatorClass(PredicateClass):
    """All dictators ``x_i`` on the full cube."""

    def __init__(self, n: int):
        self.n = n
        self.domain = FullCube(n)

    @property
    def size(self):
        return self.n

    def member(self, i):
        return Dictator(i, self.n)

    def positive_sizes(self):
        return np.full(self.n, 1 << (self.n - 1), dtype=np.int64)

    def to_descriptor(self):
        return {"kind": "dictator_class", "n": self.n, "params": {}}


def class_from_descriptor(d: dict) -> PredicateClass:
    kind = d["kind"]
    params = d.get("params", {})
    if kind == "negparity_class":
        return AllNegParity(int(d["n"]), bool(params.get("include_zero", False)))
    if kind == "boollinear_class":
        return NormalizedBoolLinear(int(d["n"]), int(d["p"]))
    if kind == "dictator_class":
        return DictatorClass(int(d["n"]))
    if kind == "custom_class":
        return CustomClass(predicate_from_descriptor(m) for m in params["members"])
    raise ValueError(f"unknown class kind {kind!r}")


# ---------------------------------------------------------------------------
# Counting facts


@dataclass
class ClassStats:
    n: int
    p: int
    formula: dict
    brute: dict

    @property
    def matches(self) -> bool:
        return self.formula == self.brute


def class_stats_boollinear(n: int, p: int, cap: int = DEFAULT_CAP, strict: bool = True) -> ClassStats:
    """Closed-form and brute-force counts for the normalized class.

    With ``strict``, raises :class:`InvariantViolation` if any count disagrees.
    """
    cls = NormalizedBoolLinear(n, p)
    M = cls.mask_matrix(cap).astype(np.int64)
    N, d = M.shape
    agree = M.T @ M + (1 - M).T @ (1 - M)
    off = agree[~np.eye(d, dtype=bool)]
    brute = {
        "domain_size": N,
        "class_size": d,
        "positive_size": sorted(set(M.sum(axis=0).tolist())),
        "pairwise_agreement": sorted(set(off.tolist())),
        "per_point_positive_count": sorted(set(M.sum(axis=1).tolist())),
    }
    formula = {
        "domain_size": p**n - p,
        "class_size": p ** (n - 1),
        "positive_size": [p ** (n - 1) - 1],
        "pairwise_agreement": [(p * p - 2 * p + 2) * p ** (n - 2) - p] if d > 1 else [],
        "per_point_positive_count": [p ** (n - 2)],
    }
    stats = ClassStats(n, p, formula, brute)
    if strict and not stats.matches:
        raise InvariantViolation(f"class counts disagree: {formula} vs {brute}")
    return stats


def negparity_point_counts(n: int) -> dict:
    """Per-point positive counts for negative parities on the punctured cube.

    Returns the counts under both index-set conventions (``s != 0`` and all
    ``s``) as sorted lists of the distinct values seen over all points.
    """
    xs = np.arange(1, 1 << n, dtype=np.int64)
    counts_all = np.zeros(len(xs), dtype=np.int64)
    for s in range(1 << n):
        counts_all += 1 - (popcount(xs & s) & 1)
    counts_nonzero = counts_all - 1  # s = 0 is positive everywhere
    return {
        "nonzero_s": sorted(set(counts_nonzero.tolist())),
        "all_s": sorted(set(counts_all.tolist())),
    }

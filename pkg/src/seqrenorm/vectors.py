"""Finitely supported sequences and the elementary operators acting on them.

Vectors are immutable, 1-indexed, and stored in canonical zero-free sparse
form.  Coefficients are floats by default; exact rationals (``fractions.
Fraction`` or ``int``) are accepted everywhere and preserved by the purely
rational operations (rearrangement, permutation, signs, dilation, Tsirelson
recursion).
"""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Scalar = Union[int, float, Fraction]

INF = math.inf


def _is_exact(x: Scalar) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class FiniteVector:
    """A finitely supported real sequence, indices starting at 1.

    Zero coefficients are dropped on construction, so two vectors are equal
    iff they have identical support and coefficients.
    """

    __slots__ = ("_items",)

    def __init__(self, entries: Union[Mapping[int, Scalar], Iterable[tuple]] = ()):
        if isinstance(entries, Mapping):
            pairs = entries.items()
        else:
            pairs = list(entries)
        seen = {}
        for i, a in pairs:
            if not isinstance(i, int) or i < 1:
                raise ValueError(f"index must be a positive integer, got {i!r}")
            if i in seen:
                raise ValueError(f"duplicate index {i}")
            if a != 0:
                seen[i] = a
        self._items = tuple(sorted(seen.items()))

    @classmethod
    def from_dense(cls, values: Iterable[Scalar]) -> "FiniteVector":
        return cls((i, a) for i, a in enumerate(values, start=1))

    @classmethod
    def basis(cls, n: int, coeff: Scalar = 1.0) -> "FiniteVector":
        return cls([(n, coeff)])

    @classmethod
    def ones(cls, length: int) -> "FiniteVector":
        """The constant-one vector on indices 1..length."""
        return cls((i, 1.0) for i in range(1, length + 1))

    @property
    def items(self) -> tuple:
        return self._items

    @property
    def support(self) -> tuple:
        return tuple(i for i, _ in self._items)

    @property
    def is_zero(self) -> bool:
        return not self._items

    @property
    def max_index(self) -> int:
        if not self._items:
            raise ValueError("zero vector has no max index")
        return self._items[-1][0]

    def __getitem__(self, i: int) -> Scalar:
        for j, a in self._items:
            if j == i:
                return a
            if j > i:
                break
        return 0.0

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self):
        return iter(self._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteVector) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {a!r}" for i, a in self._items)
        return f"FiniteVector({{{body}}})"

    def __add__(self, other: "FiniteVector") -> "FiniteVector":
        acc = dict(self._items)
        for i, a in other._items:
            acc[i] = acc.get(i, 0) + a
        return FiniteVector(acc)

    def __sub__(self, other: "FiniteVector") -> "FiniteVector":
        return self + (-other)

    def __neg__(self) -> "FiniteVector":
        return FiniteVector((i, -a) for i, a in self._items)

    def __mul__(self, c: Scalar) -> "FiniteVector":
        return FiniteVector((i, c * a) for i, a in self._items)

    __rmul__ = __mul__

    def abs(self) -> "FiniteVector":
        return FiniteVector((i, abs(a)) for i, a in self._items)

    def is_exact(self) -> bool:
        """True when every coefficient is an int or Fraction."""
        return all(_is_exact(a) for _, a in self._items)

    def to_floats(self) -> "FiniteVector":
        return FiniteVector((i, float(a)) for i, a in self._items)

    def canonical_seed(self) -> int:
        """Deterministic, process-independent seed derived from the entries."""
        blob = repr([(i, float(a)) for i, a in self._items]).encode()
        return zlib.crc32(blob)

    def to_json(self) -> str:
        """Canonical sparse wire form: a JSON array of [index, value] pairs."""
        return json.dumps([[i, float(a)] for i, a in self._items],
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "FiniteVector":
        """Accepts both dense ``[a1, a2, ...]`` and sparse ``[[i, v], ...]``."""
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("vector JSON must be an array")
        if all(isinstance(x, (int, float)) for x in data):
            return cls.from_dense(data)
        pairs = []
        for x in data:
            if (not isinstance(x, list) or len(x) != 2
                    or not isinstance(x[0], int)):
                raise ValueError(f"bad sparse entry {x!r}")
            pairs.append((x[0], x[1]))
        return cls(pairs)


@dataclass(frozen=True)
class SortedVector:
    """A non-increasing list of nonnegative reals (a decreasing rearrangement)."""

    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        object.__setattr__(self, "values", vals)
        for k in range(len(vals)):
            if vals[k] < 0:
                raise ValueError("rearrangement values must be nonnegative")
            if k + 1 < len(vals) and vals[k] < vals[k + 1]:
                raise ValueError("values must be non-increasing")

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, k):
        return self.values[k]


class TailedVector:
    """A nonnegative non-increasing sequence with an exact harmonic tail.

    The sequence is zero below ``head_start``, takes the explicit ``head``
    values on ``head_start .. head_start+len(head)-1``, and equals
    ``tail_mass / n`` for every ``n >= tail_first``.  Instances produced by
    :func:`hat_transform` have ``head_start == 1`` and a contiguous tail.
    Left/right restrictions adjust the window without losing the analytic
    tail.
    """

    __slots__ = ("head", "tail_mass", "head_start", "tail_first")

    def __init__(self, head: Iterable[float], tail_mass: float,
                 head_start: int = 1, tail_first: int | None = None):
        head = tuple(float(a) for a in head)
        if head_start < 1:
            raise ValueError("head_start must be >= 1")
        if tail_mass < 0:
            raise ValueError("tail mass must be nonnegative")
        default_first = head_start + len(head)
        if tail_first is None:
            tail_first = default_first
        if tail_first < default_first:
            raise ValueError("tail overlaps head")
        for k, a in enumerate(head):
            if a < 0:
                raise ValueError("head values must be nonnegative")
            if k + 1 < len(head) and a < head[k + 1] * (1 - 1e-12):
                raise ValueError("head must be non-increasing")
        if head and tail_mass > 0 and tail_first == default_first:
            if head[-1] < (tail_mass / tail_first) * (1 - 1e-12):
                raise ValueError("sequence must be non-increasing across the "
                                 "head/tail boundary")
        self.head = head
        self.tail_mass = float(tail_mass)
        self.head_start = head_start
        self.tail_first = tail_first

    def value_at(self, n: int) -> float:
        if n < 1:
            raise ValueError("indices start at 1")
        if self.head_start <= n < self.head_start + len(self.head):
            return self.head[n - self.head_start]
        if n >= self.tail_first:
            return self.tail_mass / n
        return 0.0

    @property
    def head_end(self) -> int:
        return self.head_start + len(self.head) - 1

    def truncate(self, M: int) -> FiniteVector:
        """Explicit finite vector keeping only indices <= M."""
        pairs = [(self.head_start + k, a) for k, a in enumerate(self.head)
                 if self.head_start + k <= M]
        if self.tail_mass > 0:
            pairs.extend((n, self.tail_mass / n)
                         for n in range(self.tail_first, M + 1))
        return FiniteVector(pairs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, TailedVector)
                and self.head == other.head
                and self.tail_mass == other.tail_mass
                and self.head_start == other.head_start
                and self.tail_first == other.tail_first)

    def __repr__(self) -> str:
        return (f"TailedVector(head={self.head!r}, tail_mass={self.tail_mass!r}, "
                f"head_start={self.head_start}, tail_first={self.tail_first})")


class FinitePermutation:
    """A bijection of a finite index set onto itself, identity elsewhere."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Mapping[int, int]):
        m = {int(i): int(j) for i, j in mapping.items() if i != j}
        if set(m.keys()) != set(m.values()):
            raise ValueError("mapping must be a bijection of its domain onto itself")
        if any(i < 1 for i in m) or any(j < 1 for j in m.values()):
            raise ValueError("indices must be positive")
        self._map = m

    @classmethod
    def identity(cls) -> "FinitePermutation":
        return cls({})

    @classmethod
    def transposition(cls, i: int, j: int) -> "FinitePermutation":
        return cls({i: j, j: i})

    @classmethod
    def from_one_line(cls, images: Iterable[int]) -> "FinitePermutation":
        """images[k] is the image of k+1."""
        return cls({k + 1: j for k, j in enumerate(images)})

    def __call__(self, i: int) -> int:
        return self._map.get(i, i)

    @property
    def domain(self) -> tuple:
        return tuple(sorted(self._map))

    def inverse(self) -> "FinitePermutation":
        return FinitePermutation({j: i for i, j in self._map.items()})

    def __repr__(self) -> str:
        return f"FinitePermutation({self._map!r})"


def decreasing_rearrangement(v: FiniteVector) -> SortedVector:
    """Absolute values of the coefficients sorted non-increasingly, zeros trimmed."""
    return SortedVector(tuple(sorted((abs(a) for _, a in v), reverse=True)))


def apply_permutation(v: FiniteVector, sigma: FinitePermutation) -> FiniteVector:
    return FiniteVector((sigma(i), a) for i, a in v)


def apply_signs(v: FiniteVector, signs: Mapping[int, int]) -> FiniteVector:
    for i, e in signs.items():
        if e not in (1, -1):
            raise ValueError(f"sign at {i} must be +1 or -1")
    return FiniteVector((i, signs.get(i, 1) * a) for i, a in v)


def dilate(v: FiniteVector, m: int) -> FiniteVector:
    """Repeat each coefficient m times: v(n) lands on indices (n-1)m+1 .. nm."""
    if m < 1:
        raise ValueError("dilation factor must be >= 1")
    if m == 1:
        return v
    pairs = []
    for n, a in v:
        base = (n - 1) * m
        pairs.extend((base + j, a) for j in range(1, m + 1))
    return FiniteVector(pairs)


def restrict(v, N: int, M=INF):
    """Zero out all coefficients outside [N, M]; same kind in, same kind out.

    For a TailedVector, M=inf keeps the analytic tail; a finite M folds the
    kept tail samples into the head and drops the tail mass.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > M:
        raise ValueError(f"empty restriction window: N={N} > M={M}")
    if isinstance(v, FiniteVector):
        return FiniteVector((i, a) for i, a in v if N <= i <= M)
    if isinstance(v, TailedVector):
        head_pairs = [(v.head_start + k, a) for k, a in enumerate(v.head)
                      if N <= v.head_start + k <= M]
        if M == INF:
            if head_pairs:
                return TailedVector([a for _, a in head_pairs], v.tail_mass,
                                    head_start=head_pairs[0][0],
                                    tail_first=v.tail_first)
            return TailedVector((), v.tail_mass, head_start=1,
                                tail_first=max(v.tail_first, N))
        M = int(M)
        if v.tail_mass > 0:
            head_pairs.extend((n, v.tail_mass / n)
                              for n in range(max(v.tail_first, N), M + 1))
        if head_pairs:
            return TailedVector([a for _, a in head_pairs], 0.0,
                                head_start=head_pairs[0][0], tail_first=M + 1)
        return TailedVector((), 0.0, head_start=1, tail_first=M + 1)
    raise TypeError(f"cannot restrict {type(v).__name__}")


def hat_transform(v: FiniteVector) -> TailedVector:
    """Cesaro averages of the decreasing rearrangement, with exact S/n tail.

    The head has one entry per support point; beyond the support the running
    average of the rearrangement is exactly (sum of all |coefficients|) / n,
    which is kept analytically instead of being truncated.
    """
    stars = [float(a) for a in decreasing_rearrangement(v)]
    head = []
    acc = 0.0
    for n, a in enumerate(stars, start=1):
        acc += a
        head.append(acc / n)
    total = math.fsum(stars)
    return TailedVector(head, total)


@dataclass(frozen=True)
class PointwiseBoundWitness:
    """Outcome of a pointwise sequence comparison, with the first violation."""

    ok: bool
    first_violation: tuple | None = None  # (index, lhs, rhs); index 0 = tail mass


def hat_pointwise_sum_bound(x: FiniteVector, y: FiniteVector,
                            tol: float = 1e-12) -> PointwiseBoundWitness:
    """Check (x+y)^(n) <= x^(n) + y^(n) for all n, including the analytic tails.

    Indices up to every head length are compared explicitly; beyond all heads
    the comparison reduces to the tail masses.
    """
    hx, hy, hs = hat_transform(x), hat_transform(y), hat_transform(x + y)
    n_max = max(len(hx.head), len(hy.head), len(hs.head), 1)
    for n in range(1, n_max + 1):
        lhs = hs.value_at(n)
        rhs = hx.value_at(n) + hy.value_at(n)
        if lhs > rhs + tol * max(1.0, rhs):
            return PointwiseBoundWitness(False, (n, lhs, rhs))
    s_lhs, s_rhs = hs.tail_mass, hx.tail_mass + hy.tail_mass
    if s_lhs > s_rhs + tol * max(1.0, s_rhs):
        return PointwiseBoundWitness(False, (0, s_lhs, s_rhs))
    return PointwiseBoundWitness(True)

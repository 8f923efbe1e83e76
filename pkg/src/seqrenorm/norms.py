"""Base norm evaluators and certified evaluation of tailed vectors.

A :class:`NormDescriptor` is a small immutable tree: a base kind (``lp``,
``sup``, ``l1``, ``day``, ``lorentz``, ``tsirelson``) or a combinator node
built by :mod:`seqrenorm.combinators`.  ``eval_norm`` returns exact (float)
values for every kind with a finite formula; enclosure-valued kinds are
evaluated through :func:`evaluate`, which returns an :class:`IntervalValue`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .vectors import (FiniteVector, SortedVector, TailedVector,
                      FinitePermutation, decreasing_rearrangement,
                      apply_permutation, apply_signs)

REL_TOL = 1e-9
ABS_TOL = 1e-12
OUTWARD_EPS = 2.0 ** -50

_BASE_KINDS = ("lp", "sup", "l1", "day", "lorentz", "tsirelson",
               "weighted_l2", "summing")
_COMBINATOR_KINDS = ("day_aug", "sc_base", "davis", "y_space", "sym2r")


class NormError(ValueError):
    """Base class for norm evaluation errors."""


class UnsupportedEvaluation(NormError):
    """The descriptor/vector combination has no implemented evaluation."""


class TailNotSummable(NormError):
    """The harmonic tail has no finite certified bound under this norm."""


class SignEnumerationTooLarge(NormError):
    """Sign-pattern enumeration would exceed the configured support cap."""


@dataclass(frozen=True)
class NormDescriptor:
    """A composable description of a norm: base kind or combinator node."""

    kind: str
    params: tuple = ()
    children: tuple = ()

    def __post_init__(self):
        if self.kind not in _BASE_KINDS + _COMBINATOR_KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def is_1_unconditional(self) -> bool:
        k = self.kind
        if k in ("lp", "sup", "l1", "day", "lorentz", "tsirelson",
                 "weighted_l2", "sc_base", "sym2r"):
            return True
        if k == "summing":
            return False
        if k == "day_aug":
            return self.children[0].is_1_unconditional
        if k in ("davis", "y_space"):
            return (self.children[0].is_1_unconditional
                    and self.children[1].is_1_unconditional)
        raise AssertionError(k)

    @property
    def is_1_symmetric(self) -> bool:
        k = self.kind
        if k in ("lp", "sup", "l1", "day", "lorentz", "sym2r"):
            return True
        if k in ("tsirelson", "weighted_l2", "sc_base", "summing"):
            return False
        if k == "day_aug":
            return self.children[0].is_1_symmetric
        if k in ("davis", "y_space"):
            return (self.children[0].is_1_symmetric
                    and self.children[1].is_1_symmetric)
        raise AssertionError(k)

    @property
    def has_fundamental_function(self) -> bool:
        # phi(L) is exposed only where the norm is 1-symmetric and admits an
        # exact (non-enclosure) evaluation.
        if self.kind in ("y_space", "sym2r"):
            return False
        return self.is_1_symmetric

    def __str__(self) -> str:
        from .cli import format_space
        return format_space(self)


def lp(p: float) -> NormDescriptor:
    p = float(p)
    if not (1.0 <= p < math.inf):
        raise ValueError(f"lp requires 1 <= p < inf, got {p}")
    return NormDescriptor("lp", (p,))


def sup_norm() -> NormDescriptor:
    return NormDescriptor("sup")


def l1_norm() -> NormDescriptor:
    return NormDescriptor("l1")


def day_norm() -> NormDescriptor:
    return NormDescriptor("day")


def lorentz_harmonic() -> NormDescriptor:
    return NormDescriptor("lorentz")


def tsirelson_norm() -> NormDescriptor:
    return NormDescriptor("tsirelson")


def weighted_l2() -> NormDescriptor:
    """(sum 2^-n a_n^2)^(1/2) by position; deliberately not symmetric.

    Test instrument for the symmetry-constant estimator; not part of the
    space-expression grammar.
    """
    return NormDescriptor("weighted_l2")


def summing_norm() -> NormDescriptor:
    """sup_k |a_1 + ... + a_k|, the summing-basis norm.

    The one deliberately non-unconditional norm in the zoo; it exercises the
    sign-enumeration branch of the strictly convex base construction.  Not
    part of the space-expression grammar.
    """
    return NormDescriptor("summing")


@dataclass(frozen=True)
class IntervalValue:
    """Certified enclosure [lo, hi] of a nonnegative value; hi may be +inf."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (0.0 <= self.lo):
            raise ValueError(f"lo must be >= 0, got {self.lo}")
        if self.hi < self.lo:
            raise ValueError(f"invalid enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x: float) -> "IntervalValue":
        return cls(float(x), float(x))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def outward(self) -> "IntervalValue":
        if math.isinf(self.hi):
            return self
        return IntervalValue(self.lo, self.hi * (1.0 + OUTWARD_EPS))


@dataclass(frozen=True)
class Truncation:
    """Truncation parameters for enclosure-valued evaluations.

    tail_index bounds explicit harmonic-tail samples (sym2R / eval_tailed);
    terms bounds the number of interpolation norms summed in a Y-space norm.
    """

    tail_index: int = 4096
    terms: int = 12


# ---------------------------------------------------------------------------
# exact evaluators


def _abs_floats(v: FiniteVector) -> list:
    return [abs(float(a)) for _, a in v]


def eval_day(v: FiniteVector) -> float:
    """Day's norm (sum 4^-n (a_n*)^2)^(1/2) of the decreasing rearrangement."""
    stars = decreasing_rearrangement(v)
    return math.sqrt(math.fsum(4.0 ** -n * float(a) * float(a)
                               for n, a in enumerate(stars, start=1)))


def eval_lorentz_harmonic(v: FiniteVector) -> float:
    """Lorentz d_{w,1} norm with weights w = (1/n): sum a_n*/n."""
    stars = decreasing_rearrangement(v)
    return math.fsum(float(a) / n for n, a in enumerate(stars, start=1))


def eval_tsirelson(v: FiniteVector):
    """Tsirelson norm by the implicit Figiel-Johnson equation.

    ||x|| = max(||x||_inf, 1/2 sup sum_j ||E_j x||) over families of
    successive intervals E_1 < ... < E_k with k <= min E_1.  Computed by
    dynamic programming over consecutive chunks of the support (interval
    endpoints may be moved to support points without changing the supremum),
    memoized per call.  Exact over the rationals when the input is exact.
    """
    if v.is_zero:
        return Fraction(0) if v.is_exact() else 0.0
    exact = v.is_exact()
    idx = [i for i, _ in v]
    vals = [abs(a) if exact else abs(float(a)) for _, a in v]
    half = Fraction(1, 2) if exact else 0.5
    n = len(idx)
    t_memo: dict = {}
    p_memo: dict = {}

    def parts(s: int, j: int, k: int):
        # best sum of chunk norms over partitions of positions s..j into
        # exactly k consecutive nonempty chunks
        if k == 1:
            return T(s, j)
        key = (s, j, k)
        got = p_memo.get(key)
        if got is not None:
            return got
        best = None
        for t in range(s, j - k + 2):
            cand = T(s, t) + parts(t + 1, j, k - 1)
            if best is None or cand > best:
                best = cand
        p_memo[key] = best
        return best

    def T(i: int, j: int):
        key = (i, j)
        got = t_memo.get(key)
        if got is not None:
            return got
        best = max(vals[i:j + 1])
        for s in range(i, j + 1):
            cap = min(idx[s], j - s + 1)
            k_min = 2 if s == i else 1
            for k in range(k_min, cap + 1):
                cand = half * parts(s, j, k)
                if cand > best:
                    best = cand
        t_memo[key] = best
        return best

    return T(0, n - 1)


def _eval_lp(p: float, v: FiniteVector) -> float:
    if v.is_zero:
        return 0.0
    a = _abs_floats(v)
    if p == 1.0:
        return math.fsum(a)
    s = math.fsum(x ** p for x in a)
    return s ** (1.0 / p)


def eval_norm(norm: NormDescriptor, v: FiniteVector) -> float:
    """Exact norm value (up to float arithmetic) for non-enclosure kinds."""
    k = norm.kind
    if k == "lp":
        return _eval_lp(norm.params[0], v)
    if k == "sup":
        return max(_abs_floats(v), default=0.0)
    if k == "l1":
        return math.fsum(_abs_floats(v))
    if k == "day":
        return eval_day(v)
    if k == "lorentz":
        return eval_lorentz_harmonic(v)
    if k == "tsirelson":
        return float(eval_tsirelson(v))
    if k == "weighted_l2":
        return math.sqrt(math.fsum(2.0 ** -i * float(a) * float(a)
                                   for i, a in v))
    if k == "summing":
        best = acc = 0.0
        for _, a in v:
            acc += float(a)
            best = max(best, abs(acc))
        return best
    if k in ("day_aug", "sc_base", "davis"):
        from . import combinators
        if k == "day_aug":
            return math.hypot(eval_norm(norm.children[0], v), eval_day(v))
        if k == "sc_base":
            return combinators.eval_strictly_convex_base(norm.children[0], v)
        E, F = norm.children
        return combinators.davis_interpolation(E, F, norm.params[0], v)
    if k in ("y_space", "sym2r"):
        raise UnsupportedEvaluation(
            f"{k} norms are enclosure-valued; use evaluate()")
    raise UnsupportedEvaluation(f"no evaluator for kind {k!r}")


def evaluate(norm: NormDescriptor, v: FiniteVector,
             trunc: Truncation = Truncation()) -> IntervalValue:
    """Uniform entry point: exact kinds collapse to [x, x] enclosures."""
    if norm.kind == "sym2r":
        from . import combinators
        return combinators.symmetric_2R_norm(norm.children[0], v,
                                             trunc.tail_index)
    if norm.kind == "y_space":
        from . import combinators
        E, F, X = norm.children
        return combinators.y_space_norm(E, F, X, combinators.DavisParams(),
                                        v, trunc.terms)
    return IntervalValue.exact(eval_norm(norm, v))


def fundamental_function(norm: NormDescriptor, L: int) -> float:
    """phi(L) = norm of the constant-one vector of length L.

    Computed by direct evaluation; requires the 1-symmetric flag, since the
    quantity is basis-position dependent otherwise.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    if not norm.has_fundamental_function:
        raise UnsupportedEvaluation(
            f"{norm.kind} descriptor does not expose a fundamental function")
    return eval_norm(norm, FiniteVector.ones(L))


# ---------------------------------------------------------------------------
# certified evaluation of tailed vectors


def _ranked_nonzero(w: TailedVector, M: int) -> np.ndarray:
    """Nonzero values of the truncation at M, in non-increasing order."""
    vals = [a for a in w.head if a > 0]
    if w.tail_mass > 0 and w.tail_first <= M:
        ns = np.arange(w.tail_first, M + 1, dtype=float)
        vals = np.concatenate([np.asarray(vals, dtype=float),
                               w.tail_mass / ns])
    return np.asarray(vals, dtype=float)


def _tailed_lp(p: float, w: TailedVector, M: int) -> IntervalValue:
    vals = _ranked_nonzero(w, M)
    S = w.tail_mass
    if p == 1.0:
        lo = float(math.fsum(vals.tolist()))
        if S == 0.0:
            return IntervalValue.exact(lo)
        return IntervalValue(lo, math.inf)
    lo_p = float(np.sum(vals ** p))
    lo = lo_p ** (1.0 / p)
    if S == 0.0:
        return IntervalValue.exact(lo)
    # sum_{n>M} (S/n)^p  <=  S^p * M^(1-p) / (p-1)
    tail_p = S ** p * M ** (1.0 - p) / (p - 1.0)
    return IntervalValue(lo, (lo_p + tail_p) ** (1.0 / p)).outward()


def _tailed_sup(w: TailedVector, M: int) -> IntervalValue:
    vals = list(w.head)
    S = w.tail_mass
    if S > 0 and w.tail_first <= M:
        vals.append(S / w.tail_first)
    lo = max(vals, default=0.0)
    if S == 0.0:
        return IntervalValue.exact(lo)
    return IntervalValue(lo, max(lo, S / (M + 1))).outward()


def _tailed_day(w: TailedVector, M: int) -> IntervalValue:
    vals = _ranked_nonzero(w, M)
    K = len(vals)
    ranks = np.arange(1, K + 1, dtype=float)
    lo_sq = float(np.sum(4.0 ** -ranks * vals * vals))
    S = w.tail_mass
    if S == 0.0:
        return IntervalValue.exact(math.sqrt(lo_sq))
    # ranks K+1, K+2, ... carry values S/(M+1), S/(M+2), ...
    tail_sq = 4.0 ** -K * (S / M) ** 2 / 3.0
    return IntervalValue(math.sqrt(lo_sq),
                         math.sqrt(lo_sq + tail_sq)).outward()


def _tailed_lorentz(w: TailedVector, M: int) -> IntervalValue:
    vals = _ranked_nonzero(w, M)
    K = len(vals)
    ranks = np.arange(1, K + 1, dtype=float)
    lo = float(np.sum(vals / ranks))
    S = w.tail_mass
    if S == 0.0:
        return IntervalValue.exact(lo)
    # sum_{j>=1} (S/(M+j))/(K+j) <= S * sum_{j>=1} (K+j)^-2 < S/K
    tail = S / max(K, 1)
    return IntervalValue(lo, lo + tail).outward()


def eval_tailed(norm: NormDescriptor, w: TailedVector, M: int) -> IntervalValue:
    """Certified enclosure of ||w|| for a head-plus-harmonic-tail vector.

    lo is the exact norm of the truncation at M.  hi adds a per-kind bound on
    the tail (the harmonic tail dominated dyadically / by integral
    comparison); it is +inf when the tail series has no finite bound under
    the norm (l1).  Enclosures are nested: doubling M never widens them.
    """
    if not (norm.is_1_unconditional and norm.is_1_symmetric):
        raise UnsupportedEvaluation(
            "tailed evaluation requires a 1-unconditional 1-symmetric norm, "
            f"got {norm.kind!r}")
    if w.head and M < w.head_end:
        raise ValueError(f"truncation M={M} must cover the head (>= {w.head_end})")
    M = int(M)
    k = norm.kind
    if k == "lp":
        return _tailed_lp(norm.params[0], w, M)
    if k == "l1":
        return _tailed_lp(1.0, w, M)
    if k == "sup":
        return _tailed_sup(w, M)
    if k == "day":
        return _tailed_day(w, M)
    if k == "lorentz":
        return _tailed_lorentz(w, M)
    if k == "day_aug":
        base = eval_tailed(norm.children[0], w, M)
        daypart = _tailed_day(w, M)
        return IntervalValue(math.hypot(base.lo, daypart.lo),
                             math.hypot(base.hi, daypart.hi)).outward()
    raise UnsupportedEvaluation(
        f"tailed evaluation not implemented for kind {k!r}")


# ---------------------------------------------------------------------------
# symmetry-constant estimation


@dataclass(frozen=True)
class SymmetryPlan:
    """Sampling plan for the K-symmetry lower estimator."""

    samples: int = 200
    seed: int = 0
    max_support: int = 6
    max_index: int = 12
    coeff_bound: float = 10.0


def _compact_permutation(v: FiniteVector) -> FinitePermutation:
    """Move the support onto 1..k in order, completed to a finite bijection."""
    supp = list(v.support)
    targets = list(range(1, len(supp) + 1))
    images = dict(zip(supp, targets))
    dom = sorted(set(supp) | set(targets))
    used = set(images.values())
    free = [j for j in dom if j not in used]
    for i in dom:
        if i not in images:
            images[i] = free.pop(0)
    return FinitePermutation(images)


def estimate_symmetry_constant(norm: NormDescriptor,
                               plan: SymmetryPlan = SymmetryPlan()) -> float:
    """Lower estimate of the symmetry constant K by sampled maximization.

    Maximizes ||eps . sigma . v|| / ||v|| over random and adversarial
    (support-compacting, reversing) permutations and sign patterns.  Returns
    exactly 1.0 on rearrangement-invariant norms since the identity pair is
    always sampled.
    """
    rng = random.Random(plan.seed)
    vectors = [FiniteVector.basis(i) for i in range(1, 6)]
    vectors.append(FiniteVector.ones(4))
    for _ in range(plan.samples):
        size = rng.randint(1, plan.max_support)
        idxs = rng.sample(range(1, plan.max_index + 1), size)
        vectors.append(FiniteVector(
            (i, rng.uniform(-plan.coeff_bound, plan.coeff_bound))
            for i in idxs))
    best = 1.0
    for v in vectors:
        if v.is_zero:
            continue
        base_val = eval_norm(norm, v)
        if base_val <= 0:
            continue
        perms = [FinitePermutation.identity(), _compact_permutation(v)]
        supp = list(v.support)
        rev = dict(zip(supp, reversed(supp)))
        perms.append(FinitePermutation(rev))
        for _ in range(3):
            shuffled = supp[:]
            rng.shuffle(shuffled)
            perms.append(FinitePermutation(dict(zip(supp, shuffled))))
        sign_choices = [{}, {i: -1 for i in supp}]
        sign_choices.append({i: rng.choice((1, -1)) for i in supp})
        for sigma in perms:
            moved = apply_permutation(v, sigma)
            for signs in sign_choices:
                ratio = eval_norm(norm, apply_signs(moved, signs)) / base_val
                if ratio > best:
                    best = ratio
    return best

"""The renorming constructions, as composable combinators.

Five constructions: the Day-norm augmentation, the strictly convex
unconditional base norm, the shifted norm ||y||_x, the weighted sum over
absolute-equivalence classes (with a certified tail), and the Davis
interpolation machinery (single norm, Y-space norm, and the hat-transform
symmetric norm).  Exact values where the formula is finite, certified
enclosures where truncation is involved.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .vectors import FiniteVector, TailedVector, hat_transform, apply_signs
from .norms import (NormDescriptor, IntervalValue, NormError,
                    UnsupportedEvaluation, TailNotSummable,
                    SignEnumerationTooLarge, eval_norm, eval_day, eval_tailed)

SIGN_ENUMERATION_CAP = 20


# ---------------------------------------------------------------------------
# descriptor factories


def day_augment(base: NormDescriptor) -> NormDescriptor:
    """|||x||| = (||x||^2 + ||(a_n)||_Day^2)^(1/2)."""
    return NormDescriptor("day_aug", (), (base,))


def strictly_convex_unconditional_base(base: NormDescriptor) -> NormDescriptor:
    """||x|| = sup_signs |sum +-a_n e_n| + (sum 2^-4n a_n^2)^(1/2).

    Strictly convex, and the basis is 1-unconditional by the sign supremum.
    """
    return NormDescriptor("sc_base", (), (base,))


def davis_norm(E: NormDescriptor, F: NormDescriptor, m: float) -> NormDescriptor:
    if m <= 0:
        raise ValueError("interpolation parameter m must be positive")
    return NormDescriptor("davis", (float(m),), (E, F))


def y_space(E: NormDescriptor, F: NormDescriptor, X: NormDescriptor,
            m_rule: str = "pow2") -> NormDescriptor:
    if m_rule != "pow2":
        raise ValueError(f"unsupported m-sequence rule {m_rule!r}")
    return NormDescriptor("y_space", (m_rule,), (E, F, X))


def symmetric_2R(base: NormDescriptor) -> NormDescriptor:
    """|||x||| = (||hat x||^2 + ||x||_Day^2)^(1/2) as a descriptor node."""
    return NormDescriptor("sym2r", (), (base,))


# ---------------------------------------------------------------------------
# strictly convex base and shifted norm


def eval_strictly_convex_base(base: NormDescriptor, v: FiniteVector) -> float:
    if v.is_zero:
        return 0.0
    if base.is_1_unconditional:
        sup_part = eval_norm(base, v)
    else:
        supp = v.support
        if len(supp) > SIGN_ENUMERATION_CAP:
            raise SignEnumerationTooLarge(
                f"sign enumeration over {len(supp)} support points exceeds "
                f"the cap of {SIGN_ENUMERATION_CAP}")
        sup_part = 0.0
        for mask in range(1 << len(supp)):
            signs = {supp[j]: -1 for j in range(len(supp)) if mask >> j & 1}
            val = eval_norm(base, apply_signs(v, signs))
            if val > sup_part:
                sup_part = val
    weighted = math.sqrt(math.fsum(2.0 ** (-4 * i) * float(a) * float(a)
                                   for i, a in v))
    return sup_part + weighted


def shifted_norm(base: NormDescriptor, x: FiniteVector,
                 y: FiniteVector) -> float:
    """||y||_x = || ||y|| x + y || + || ||y|| x - y || in the base norm."""
    ny = eval_norm(base, y)
    shift = x * ny
    return eval_norm(base, shift + y) + eval_norm(base, shift - y)


# ---------------------------------------------------------------------------
# weighted sum over absolute-equivalence classes


@dataclass(frozen=True)
class EquivClassEnumeration:
    """Finite window into the absolute-equivalence classes of rational vectors.

    Classes are ranked by a bound-independent global stream (by level =
    max(support index, coefficient height), then length, then lexicographic),
    so enlarging any bound extends the enumerated set without renumbering:
    that is what makes refined enclosures nested.  The class weight is
    p_A = decay^rank / (|A| + sum_{c in A} ||c||), which both satisfies the
    summability constraint and makes the certified tail exactly geometric.
    """

    max_support: int = 2
    denominator_bound: int = 2
    coefficient_bound: int = 1
    weight_decay: float = 0.5

    def __post_init__(self):
        if self.max_support < 1 or self.denominator_bound < 1 \
                or self.coefficient_bound < 1:
            raise ValueError("enumeration bounds must be >= 1")
        if not (0.0 < self.weight_decay < 1.0):
            raise ValueError("weight decay must lie in (0, 1)")
        if self.stream_level() > 4:
            raise ValueError(
                "enumeration bounds require stream level "
                f"{self.stream_level()} > 4; the class count would be huge")

    def stream_level(self) -> int:
        return max(self.max_support,
                   self.coefficient_bound * self.denominator_bound)

    def admits(self, pattern: tuple) -> bool:
        if len(pattern) > self.max_support:
            return False
        for c in pattern:
            if c.denominator > self.denominator_bound or c > self.coefficient_bound:
                return False
        return True


def _coefficient_set(level: int) -> list:
    vals = {Fraction(0)}
    for d in range(1, level + 1):
        for k in range(1, level + 1):
            q = Fraction(k, d)
            if max(q.numerator, q.denominator) <= level:
                vals.add(q)
    return sorted(vals)


def _pattern_stream(level_max: int):
    """All nonnegative rational patterns, in the canonical global order.

    Yields (rank, pattern) with pattern a trailing-zero-free tuple of
    Fractions; the zero pattern is rank 0.
    """
    rank = 0
    yield rank, ()
    for level in range(1, level_max + 1):
        coeffs = _coefficient_set(level)
        bucket = []
        for length in range(1, level + 1):
            for tup in product(coeffs, repeat=length):
                if tup[-1] == 0:
                    continue
                height = max((max(c.numerator, c.denominator) for c in tup
                              if c != 0), default=0)
                if max(length, height) != level:
                    continue
                bucket.append(tup)
        bucket.sort(key=lambda t: (len(t), t))
        for tup in bucket:
            rank += 1
            yield rank, tup


def enumerate_classes(enum: EquivClassEnumeration) -> list:
    """(global_rank, pattern) for every class within the bounds."""
    out = []
    for rank, pat in _pattern_stream(enum.stream_level()):
        if enum.admits(pat):
            out.append((rank, pat))
    return out


def _class_members(pattern: tuple) -> list:
    supp = [i for i, c in enumerate(pattern, start=1) if c != 0]
    members = []
    for mask in range(1 << len(supp)):
        pairs = []
        for j, i in enumerate(supp):
            s = -1 if mask >> j & 1 else 1
            pairs.append((i, s * float(pattern[i - 1])))
        members.append(FiniteVector(pairs))
    return members


def os_unconditional_2R(base: NormDescriptor, enum: EquivClassEnumeration,
                        v: FiniteVector) -> IntervalValue:
    """Enclosure of |||v||| = sum_A p_A sum_{c in A} ||v||_c.

    The finite sum over enumerated classes gives lo; the unenumerated tail is
    dominated through ||v||_c <= (2 + 2||c||)||v||, which the weight choice
    turns into 2||v|| sum_unenumerated decay^rank — computed exactly as the
    complement of the enumerated geometric weights.
    """
    if not base.is_1_unconditional:
        raise NormError("the class-sum construction needs a 1-unconditional "
                        "base norm (wrap with strictly_convex_unconditional_base)")
    q = enum.weight_decay
    classes = enumerate_classes(enum)
    terms = []
    weights = []
    for rank, pat in classes:
        members = _class_members(pat)
        norm_c = eval_norm(base, members[0])
        p_a = q ** rank / (len(members) * (1.0 + norm_c))
        class_sum = math.fsum(shifted_norm(base, c, v) for c in members)
        terms.append(p_a * class_sum)
        weights.append(q ** rank)
    lo = math.fsum(terms)
    if v.is_zero:
        return IntervalValue.exact(0.0)
    tail_weight = 1.0 / (1.0 - q) - math.fsum(weights)
    hi = lo + 2.0 * eval_norm(base, v) * max(tail_weight, 0.0)
    return IntervalValue(lo, hi).outward()


# ---------------------------------------------------------------------------
# Davis interpolation


@dataclass(frozen=True)
class DavisParams:
    """The interpolation sequence (m_n); only m_n = 2^n is implemented.

    single_m carries a one-shot parameter for contexts that pass the whole
    params object around instead of a bare m.
    """

    m_rule: str = "pow2"
    single_m: float | None = None

    def __post_init__(self):
        if self.m_rule != "pow2":
            raise ValueError(f"unsupported m-sequence rule {self.m_rule!r}")
        if self.single_m is not None and self.single_m <= 0:
            raise ValueError("single_m must be positive")

    def m_at(self, n: int) -> float:
        return 2.0 ** n


class OptimizerError(RuntimeError):
    """Davis optimizer failed to stabilize; carries the best bound pair."""

    def __init__(self, message: str, best_upper: float, lower_bound: float):
        super().__init__(f"{message} (best upper {best_upper!r}, "
                         f"lower bound {lower_bound!r})")
        self.best_upper = best_upper
        self.lower_bound = lower_bound


_order_checked: dict = {}

_ORDER_SAMPLES = (
    FiniteVector.basis(1),
    FiniteVector.basis(3),
    FiniteVector.ones(2),
    FiniteVector.ones(5),
    FiniteVector.ones(8),
    FiniteVector((i, 2.0 ** -i) for i in range(1, 7)),
    FiniteVector([(1, 0.3), (2, 1.7), (4, 0.9), (7, 2.2)]),
)


def _check_norm_order(E: NormDescriptor, F: NormDescriptor) -> None:
    key = (E, F)
    if _order_checked.get(key):
        return
    for w in _ORDER_SAMPLES:
        ne, nf = eval_norm(E, w), eval_norm(F, w)
        if ne > nf * (1.0 + 1e-9) + 1e-12:
            raise NormError(
                f"interpolation requires ||.||_E <= ||.||_F; sampled "
                f"||w||_E={ne!r} > ||w||_F={nf!r}")
    _order_checked[key] = True


_INV_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, a: float, b: float, tol: float):
    """Golden-section minimum of a unimodal f on [a, b]; returns (x, f(x))."""
    best_x, best_v = a, f(a)
    for x in (b,):
        v = f(x)
        if v < best_v:
            best_x, best_v = x, v
    c = b - _INV_GOLD * (b - a)
    d = a + _INV_GOLD * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLD * (b - a)
            fd = f(d)
    for x, v in ((c, fc), (d, fd)):
        if v < best_v:
            best_x, best_v = x, v
    return best_x, best_v


def _soft_threshold(pairs: list, u: float) -> FiniteVector:
    return FiniteVector((i, a - u) for i, a in pairs if a > u)


def _davis_sup_side(other: NormDescriptor, m: float, pairs: list,
                    sup_is_E: bool) -> float:
    """Exact 1-D reduction when E or F is the sup norm.

    With E = sup, fixing u = max alpha_i |x_i| forces the lattice-minimal
    remainder (|x_i| - u)^+ on the other side, so the infimum is a convex
    1-D problem in u (and symmetrically when F = sup).
    """
    xmax = max(a for _, a in pairs)

    if sup_is_E:
        def f(u: float) -> float:
            z = _soft_threshold(pairs, u)
            return math.hypot(m * u, eval_norm(other, z) / m)
    else:
        def f(t: float) -> float:
            y = _soft_threshold(pairs, t)
            return math.hypot(m * eval_norm(other, y), t / m)

    _, val = _golden_min(f, 0.0, xmax, tol=1e-13 * max(1.0, xmax))
    return val


def _davis_general(E: NormDescriptor, F: NormDescriptor, m: float,
                   pairs: list, seed: int) -> float:
    """Projected coordinate descent with golden line searches and multistart.

    Adequate for smooth E, F; max-type norms go through the exact reduction
    in _davis_sup_side instead, because coordinate descent can stall at
    coordinatewise-stationary points of a max.
    """
    idx = [i for i, _ in pairs]
    mags = [a for _, a in pairs]
    s = len(idx)

    def objective(alpha: list) -> float:
        y = FiniteVector((i, m * al * a)
                         for i, al, a in zip(idx, alpha, mags) if al > 0)
        z = FiniteVector((i, (1.0 - al) * a / m)
                         for i, al, a in zip(idx, alpha, mags) if al < 1)
        return math.hypot(eval_norm(E, y), eval_norm(F, z))

    rng = random.Random(seed)
    starts = [[0.5] * s, [0.0] * s, [1.0] * s]
    starts += [[rng.random() for _ in range(s)] for _ in range(5)]
    scale = max(mags)
    best = math.inf
    for alpha in starts:
        val = objective(alpha)
        for _ in range(80):
            improved = 0.0
            for j in range(s):
                def line(t, j=j):
                    trial = alpha[:]
                    trial[j] = t
                    return objective(trial)
                t_best, v_best = _golden_min(line, 0.0, 1.0, tol=1e-12)
                if v_best < val:
                    improved += val - v_best
                    alpha[j] = t_best
                    val = v_best
            if improved <= 1e-13 * max(1.0, scale):
                break
        # diagonal polish: line searches toward random corners escape
        # coordinatewise-stationary points of mildly kinked objectives
        for _ in range(4):
            corner = [rng.choice((0.0, 1.0)) for _ in range(s)]

            def ray(t):
                trial = [al + t * (c - al) for al, c in zip(alpha, corner)]
                return objective(trial)

            t_best, v_best = _golden_min(ray, 0.0, 1.0, tol=1e-12)
            if v_best < val:
                alpha = [al + t_best * (c - al)
                         for al, c in zip(alpha, corner)]
                val = v_best
        if val < best:
            best = val
    if not math.isfinite(best):
        raise OptimizerError("coordinate descent produced no finite value",
                             best, 0.0)
    return best


def davis_interpolation(E: NormDescriptor, F: NormDescriptor, m: float,
                        x: FiniteVector) -> float:
    """||x||_m = inf {(||y||_E^2 + ||z||_F^2)^(1/2) : x = y/m + m z}.

    For 1-unconditional E, F the infimum is attained on aligned
    coordinatewise splits y_i = m alpha_i x_i, z_i = (1-alpha_i) x_i / m with
    alpha in [0,1]^s, which is what the solver searches.
    """
    if m <= 0:
        raise ValueError("interpolation parameter m must be positive")
    if not (E.is_1_unconditional and F.is_1_unconditional):
        raise NormError("Davis interpolation requires 1-unconditional E and F")
    if x.is_zero:
        return 0.0
    _check_norm_order(E, F)
    pairs = [(i, abs(float(a))) for i, a in x]
    if E.kind == "sup":
        return _davis_sup_side(F, m, pairs, sup_is_E=True)
    if F.kind == "sup":
        return _davis_sup_side(E, m, pairs, sup_is_E=False)
    return _davis_general(E, F, m, pairs, seed=x.canonical_seed())


def _unit_vector_norm_bound(X: NormDescriptor) -> float:
    """Certified upper bound on sup_n ||e_n||_X."""
    k = X.kind
    if k in ("lp", "sup", "l1", "lorentz", "tsirelson"):
        return 1.0
    if k == "day":
        return 0.5
    if k == "weighted_l2":
        return math.sqrt(0.5)
    if k == "day_aug":
        return math.hypot(_unit_vector_norm_bound(X.children[0]), 0.5)
    if k == "sc_base":
        return _unit_vector_norm_bound(X.children[0]) + 0.25
    if k == "davis":
        E, F = X.children
        m = X.params[0]
        return min(m * _unit_vector_norm_bound(E),
                   _unit_vector_norm_bound(F) / m)
    if k == "sym2r":
        return symmetric_2R_norm(X.children[0], FiniteVector.basis(1), 64).hi
    if k == "y_space":
        E, F, Xin = X.children
        return y_space_norm(E, F, Xin, DavisParams(),
                            FiniteVector.basis(1), 16).hi
    raise UnsupportedEvaluation(f"no unit-vector bound for kind {k!r}")


def y_space_norm(E: NormDescriptor, F: NormDescriptor, X: NormDescriptor,
                 params: DavisParams, x: FiniteVector,
                 K: int) -> IntervalValue:
    """Enclosure of ||x||_Y = || sum_n ||x||_{m_n} f_n ||_X with m_n = 2^n.

    lo evaluates the first K interpolation norms in X; the dropped terms are
    dominated coordinatewise by ||x||_F / m_n times the unit-vector bound of
    X, a geometric series summed in closed form.  K is capped at 48: with
    m_n = 2^n the remaining tail is already below double precision.
    """
    if not X.is_1_unconditional:
        raise NormError("the outer space X must be 1-unconditional")
    if x.is_zero:
        return IntervalValue.exact(0.0)
    K = max(1, min(int(K), 48))
    coeffs = [davis_interpolation(E, F, params.m_at(n), x)
              for n in range(1, K + 1)]
    lo = eval_norm(X, FiniteVector(
        (n, c) for n, c in enumerate(coeffs, start=1)))
    tail = eval_norm(F, x) * 2.0 ** -K * _unit_vector_norm_bound(X)
    return IntervalValue(lo, lo + tail).outward()


# ---------------------------------------------------------------------------
# the hat-transform symmetric norm


def symmetric_2R_norm(base: NormDescriptor, x: FiniteVector,
                      M: int) -> IntervalValue:
    """Enclosure of (||hat x||^2 + ||x||_Day^2)^(1/2).

    The hat term is certified by eval_tailed (truncation at max(M, head
    length)); the Day term is an exact finite sum.  Depends on x only through
    its decreasing rearrangement, so permutations and sign flips of x produce
    bit-identical enclosures.
    """
    if not (base.is_1_unconditional and base.is_1_symmetric):
        raise NormError("the hat-transform norm needs a 1-unconditional "
                        f"1-symmetric base, got {base.kind!r}")
    if x.is_zero:
        return IntervalValue.exact(0.0)
    w = hat_transform(x)
    enc = eval_tailed(base, w, max(int(M), len(w.head)))
    if math.isinf(enc.hi):
        raise TailNotSummable(
            f"harmonic tail of the hat transform is not summable in "
            f"{base.kind!r}; the construction needs a base with lower Boyd "
            "index above 1")
    d = eval_day(x)
    return IntervalValue(math.hypot(enc.lo, d),
                         math.hypot(enc.hi, d)).outward()

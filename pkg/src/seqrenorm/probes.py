"""Finite-sample verification of the inequalities and rotundity conditions.

Every probe is deterministic given (seed, parameters) and returns a
:class:`ProbeReport` whose verdict is ``fail`` exactly when a genuine
violation was found.  Comparisons against enclosure-valued quantities use
the safe sides (the small side's hi against the large side's lo), so a
reported violation is never an artifact of truncation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from typing import Callable

from .vectors import (FiniteVector, dilate, restrict, hat_transform,
                      hat_pointwise_sum_bound)
from .norms import (NormDescriptor, IntervalValue, Truncation, NormError,
                    eval_norm, evaluate, eval_tailed)
from . import combinators

DEFAULT_EPSILON = 1e-6
DEFAULT_SEPARATION = 0.1
DEFAULT_PREFIX = 64
DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Violation:
    """A replayable violation record: inputs, both sides, and the margin."""

    sample_index: int
    inputs: dict
    lhs: float
    rhs: float
    margin: float


@dataclass(frozen=True)
class ProbeReport:
    suite_name: str
    samples_run: int
    violations: tuple
    worst_margin: float
    verdict: str
    seed: int
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))
        if self.verdict not in ("pass", "fail", "inconclusive"):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if (self.verdict == "fail") != bool(self.violations):
            raise ValueError("verdict must be 'fail' iff violations exist")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True,
                          separators=(",", ":"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["suite", "sample_index", "lhs", "rhs", "margin",
                         "inputs"])
        for v in self.violations:
            writer.writerow([self.suite_name, v.sample_index, repr(v.lhs),
                             repr(v.rhs), repr(v.margin),
                             json.dumps(v.inputs, sort_keys=True)])
        return buf.getvalue()


def _make_report(suite: str, samples: int, violations: list, seed: int,
                 margins: list, params: dict, details: dict | None = None,
                 inconclusive: bool = False) -> ProbeReport:
    if violations:
        verdict = "fail"
    elif inconclusive:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    worst = max(margins) if margins else -math.inf
    return ProbeReport(suite, samples, tuple(violations), worst, verdict,
                       seed, params, details or {})


def _wire(v: FiniteVector) -> list:
    return [[i, float(a)] for i, a in v]


def random_vector(rng: random.Random, max_support: int = 12,
                  max_index: int = 24, bound: float = 10.0,
                  rational: bool = False) -> FiniteVector:
    size = rng.randint(1, max_support)
    idxs = rng.sample(range(1, max_index + 1), min(size, max_index))
    if rational:
        return FiniteVector(
            (i, Fraction(rng.randint(-16, 16), rng.randint(1, 16)))
            for i in idxs)
    return FiniteVector((i, rng.uniform(-bound, bound)) for i in idxs)


# ---------------------------------------------------------------------------
# sequence scenarios


@dataclass(frozen=True)
class SequenceScenario:
    """A deterministic rule producing the test sequence x_1, x_2, ..."""

    name: str
    description: str
    generator: Callable[[int], list]

    def prefix(self, length: int) -> list:
        return self.generator(length)


def c0_failure_witness() -> SequenceScenario:
    """x_n = e_1 + ... + e_n: unit sup norms, flat parallelograms, diameter 1."""
    return SequenceScenario(
        "c0-witness",
        "partial sums of the basis; canonical non-2R witness for the sup norm",
        lambda L: [FiniteVector.ones(n) for n in range(1, L + 1)])


def converging_scenario() -> SequenceScenario:
    return SequenceScenario(
        "converging",
        "x_n = (1 - 1/n) e_1, norm-convergent",
        lambda L: [FiniteVector.basis(1, 1.0 - 1.0 / n)
                   for n in range(1, L + 1)])


def normalized_ones_scenario(norm: NormDescriptor) -> SequenceScenario:
    def gen(L: int) -> list:
        out = []
        for n in range(1, L + 1):
            v = FiniteVector.ones(n)
            out.append(v * (1.0 / eval_norm(norm, v)))
        return out
    return SequenceScenario(
        "normalized-ones",
        "partial sums of the basis, normalized in the probed norm",
        gen)


def random_scenario(seed: int, max_support: int = 6, max_index: int = 12,
                    bound: float = 2.0) -> SequenceScenario:
    def gen(L: int) -> list:
        rng = random.Random(seed)
        return [random_vector(rng, max_support, max_index, bound)
                for _ in range(L)]
    return SequenceScenario(
        f"random-{seed}", "iid random vectors", gen)


SCENARIOS = {
    "c0-witness": lambda norm: c0_failure_witness(),
    "converging": lambda norm: converging_scenario(),
    "normalized-ones": normalized_ones_scenario,
}


# ---------------------------------------------------------------------------
# rotundity probes


def two_r_probe(norm: NormDescriptor, scenario: SequenceScenario,
                prefix_len: int = DEFAULT_PREFIX,
                epsilon: float = DEFAULT_EPSILON,
                separation: float = DEFAULT_SEPARATION) -> ProbeReport:
    """Finite-scale probe of the parallelogram characterization of 2R.

    Over the tail half of the prefix, a pair (x_i, x_j) is a finite-scale
    counterexample when its parallelogram defect |  ||x_i+x_j||^2
    - 2(||x_i||^2 + ||x_j||^2) | is below epsilon while ||x_i - x_j||
    exceeds the separation.  fail = such a pair exists; pass = none does;
    inconclusive = fewer than two tail points to compare.
    """
    xs = scenario.prefix(prefix_len)
    tail = xs[prefix_len // 2:]
    if len(tail) < 2:
        return _make_report("two-r", 0, [], 0, [],
                            {"scenario": scenario.name,
                             "prefix_len": prefix_len, "epsilon": epsilon,
                             "separation": separation}, inconclusive=True)
    norms = [eval_norm(norm, x) for x in tail]
    violations = []
    margins = []
    diameter = 0.0
    min_defect = math.inf
    pairs = 0
    for i in range(len(tail)):
        for j in range(i + 1, len(tail)):
            pairs += 1
            sum_norm = eval_norm(norm, tail[i] + tail[j])
            defect = abs(sum_norm * sum_norm
                         - 2.0 * (norms[i] ** 2 + norms[j] ** 2))
            dist = eval_norm(norm, tail[i] - tail[j])
            diameter = max(diameter, dist)
            min_defect = min(min_defect, defect)
            margins.append(separation - dist if defect < epsilon else -dist)
            if defect < epsilon and dist > separation:
                violations.append(Violation(
                    pairs - 1,
                    {"x": _wire(tail[i]), "y": _wire(tail[j]),
                     "defect": defect, "distance": dist},
                    defect, dist, dist - separation))
    return _make_report("two-r", pairs, violations, 0, margins,
                        {"scenario": scenario.name, "prefix_len": prefix_len,
                         "epsilon": epsilon, "separation": separation},
                        {"diameter": diameter, "min_defect": min_defect})


def strict_convexity_probe(norm: NormDescriptor, samples: int = 10000,
                           seed: int = 0) -> ProbeReport:
    """Search the unit sphere for a flat pair: ||x+y|| = 2 with x != y.

    Random pairs plus an adversarial catalog of aligned-support pairs (the
    sup norm's flat directions).  fail = flat pair found.
    """
    rng = random.Random(seed)
    catalog = [
        (FiniteVector.basis(1), FiniteVector.ones(2)),
        (FiniteVector.basis(1), FiniteVector.ones(3)),
        (FiniteVector.basis(2), FiniteVector([(2, 1.0), (3, 1.0)])),
        (FiniteVector.ones(2), FiniteVector.ones(4)),
    ]
    violations = []
    margins = []
    checked = 0

    def check(x: FiniteVector, y: FiniteVector, k: int) -> None:
        nx, ny = eval_norm(norm, x), eval_norm(norm, y)
        if nx <= 0 or ny <= 0:
            return
        x, y = x * (1.0 / nx), y * (1.0 / ny)
        sum_norm = eval_norm(norm, x + y)
        diff_norm = eval_norm(norm, x - y)
        margins.append(sum_norm - (2.0 - 1e-9))
        if sum_norm > 2.0 - 1e-9 and diff_norm > 1e-6:
            violations.append(Violation(
                k, {"x": _wire(x), "y": _wire(y)}, sum_norm, 2.0,
                sum_norm - 2.0))

    for x, y in catalog:
        check(x, y, checked)
        checked += 1
    while checked < samples:
        v = random_vector(rng, max_support=6, max_index=10, bound=2.0)
        if rng.random() < 0.5:
            w = v + random_vector(rng, max_support=3, max_index=10, bound=0.5)
        else:
            w = random_vector(rng, max_support=6, max_index=10, bound=2.0)
        check(v, w, checked)
        checked += 1
    return _make_report("strict-convexity", checked, violations, seed,
                        margins, {"samples": samples})


# ---------------------------------------------------------------------------
# Boyd index estimation


def _snap_ratio(r: float, tol: float = 1e-9) -> float:
    """Snap to a small rational when within tol.

    Dilation norm ratios of exactly homogeneous norms are rational numbers
    recovered through pow/log round-trips whose float noise (~1e-15) would
    otherwise leak into the reported index.
    """
    if not math.isfinite(r):
        return r
    frac = Fraction(r).limit_denominator(16)
    snapped = frac.numerator / frac.denominator
    if abs(snapped - r) <= tol * max(1.0, abs(r)):
        return snapped
    return r


@dataclass(frozen=True)
class BoydRow:
    m: int
    bound: float
    ratio: float


@dataclass(frozen=True)
class BoydReport:
    rows: tuple
    p_estimate: float
    params: dict

    def to_json(self) -> str:
        return json.dumps({"rows": [asdict(r) for r in self.rows],
                           "p_estimate": self.p_estimate,
                           "params": self.params},
                          sort_keys=True, separators=(",", ":"))


def boyd_estimate(norm: NormDescriptor, m_max: int = 8, dim: int = 12,
                  samples: int = 40, seed: int = 0) -> BoydReport:
    """Lower bounds on ||D_m|| and the induced upper estimates of log m / log ||D_m||.

    Candidates: constant blocks, geometric profiles, and seeded random
    vectors up to the given dimension.  Underestimating ||D_m|| inflates the
    per-m ratio, so p_estimate (the min over m) is an upper-leaning estimate
    of the true ratios; it is +inf when every bound equals 1.  Keep dim small
    for recursively evaluated norms.
    """
    if not norm.is_1_unconditional:
        raise NormError("Boyd estimation requires a 1-unconditional norm")
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    rng = random.Random(seed)
    candidates = [FiniteVector.ones(L) for L in range(1, dim + 1)]
    for r in (0.5, 0.8):
        candidates.append(FiniteVector(
            (i, r ** i) for i in range(1, dim + 1)))
    for _ in range(samples):
        candidates.append(random_vector(rng, max_support=dim, max_index=dim,
                                        bound=4.0))
    base_norms = [eval_norm(norm, v) for v in candidates]
    rows = []
    ratios = []
    for m in range(2, m_max + 1):
        bound = 1.0
        for v, nv in zip(candidates, base_norms):
            if nv <= 0:
                continue
            ratio = eval_norm(norm, dilate(v, m)) / nv
            if ratio > bound:
                bound = ratio
        if bound <= 1.0 + 1e-12:
            ratio = math.inf
        else:
            ratio = _snap_ratio(math.log(m) / math.log(bound))
        rows.append(BoydRow(m, bound, ratio))
        ratios.append(ratio)
    p_est = min(ratios)
    return BoydReport(tuple(rows), p_est,
                      {"m_max": m_max, "dim": dim, "samples": samples,
                       "seed": seed})


# ---------------------------------------------------------------------------
# inequality suites


def _interval_abs_diff_exceeds(a: IntervalValue, b: IntervalValue,
                               bound: float) -> float:
    """Genuine violation margin of |A - B| <= bound for enclosed A, B."""
    certain_gap = max(a.lo - b.hi, b.lo - a.hi, 0.0)
    return certain_gap - bound


def _suite_hat_subadditive(norm, samples, seed, tol, trunc):
    rng = random.Random(seed)
    violations = []
    margins = []
    for k in range(samples):
        x = random_vector(rng, max_support=8, max_index=16)
        y = random_vector(rng, max_support=8, max_index=16)
        witness = hat_pointwise_sum_bound(x, y, tol=tol)
        if not witness.ok:
            n, lhs, rhs = witness.first_violation
            violations.append(Violation(
                k, {"x": _wire(x), "y": _wire(y), "index": n}, lhs, rhs,
                lhs - rhs))
            margins.append(lhs - rhs)
        else:
            margins.append(-math.inf)
    return _make_report("hat-subadditive", samples, violations, seed,
                        margins, {"tol": tol})


def _suite_davis_sandwich(norm, samples, seed, tol, trunc):
    if norm.kind != "davis":
        raise NormError("davis-sandwich expects a davis(E, F, m) space")
    E, F = norm.children
    m = norm.params[0]
    rng = random.Random(seed)
    violations = []
    margins = []
    for k in range(samples):
        x = random_vector(rng, max_support=8, max_index=12)
        dav = combinators.davis_interpolation(E, F, m, x)
        ne, nf = eval_norm(E, x), eval_norm(F, x)
        checks = [
            ("lower", dav / m, ne),
            ("upper", ne, 2.0 * m * dav),
            ("feasible", dav, nf / m),
        ]
        for name, lhs, rhs in checks:
            margin = lhs - rhs - tol * max(1.0, abs(rhs))
            margins.append(margin)
            if margin > 0:
                violations.append(Violation(
                    k, {"x": _wire(x), "m": m, "check": name}, lhs, rhs,
                    margin))
    return _make_report("davis-sandwich", samples, violations, seed, margins,
                        {"m": m, "tol": tol})


def _suite_shifted_bounds(norm, samples, seed, tol, trunc):
    rng = random.Random(seed)
    violations = []
    margins = []
    cases = [(FiniteVector(()), random_vector(random.Random(seed + 1)))]
    cases += [(random_vector(rng, max_support=8, max_index=12),
               random_vector(rng, max_support=8, max_index=12))
              for _ in range(samples - 1)]
    for k, (x, y) in enumerate(cases):
        ny = eval_norm(norm, y)
        nx = eval_norm(norm, x)
        shifted = combinators.shifted_norm(norm, x, y)
        checks = [
            ("lower", 2.0 * ny, shifted),
            ("upper", shifted, (2.0 + 2.0 * nx) * ny),
        ]
        for name, lhs, rhs in checks:
            margin = lhs - rhs - tol * max(1.0, abs(rhs))
            margins.append(margin)
            if margin > 0:
                violations.append(Violation(
                    k, {"x": _wire(x), "y": _wire(y), "check": name},
                    lhs, rhs, margin))
    return _make_report("shifted-bounds", len(cases), violations, seed,
                        margins, {"tol": tol})


def _hat_constant(p: float) -> float:
    # Boyd-index bound for lp: ||D_m|| = m^(1/p), so c = 1/(2^(1-1/p) - 1)
    return 1.0 / (2.0 ** (1.0 - 1.0 / p) - 1.0)


def _suite_hat_domination(norm, samples, seed, tol, trunc):
    if norm.kind != "lp" or norm.params[0] <= 1.0:
        raise NormError("hat-domination expects lp(p) with p > 1")
    p = norm.params[0]
    c = _hat_constant(p)
    rng = random.Random(seed)
    violations = []
    margins = []
    for k in range(samples):
        x = random_vector(rng, max_support=12, max_index=24)
        enc = eval_tailed(norm, hat_transform(x), trunc.tail_index)
        bound = c * eval_norm(norm, x)
        margin = enc.hi - bound - tol * max(1.0, bound)
        margins.append(margin)
        if margin > 0:
            violations.append(Violation(
                k, {"x": _wire(x), "p": p, "c": c}, enc.hi, bound, margin))
    return _make_report("hat-domination", samples, violations, seed, margins,
                        {"p": p, "c": c, "truncate": trunc.tail_index,
                         "tol": tol})


def _suite_hat_lower_bound(norm, samples, seed, tol, trunc):
    if not (norm.is_1_unconditional and norm.is_1_symmetric):
        raise NormError("hat-lower-bound expects a 1-symmetric norm")
    rng = random.Random(seed)
    violations = []
    margins = []
    for k in range(samples):
        x = random_vector(rng, max_support=12, max_index=24)
        enc = eval_tailed(norm, hat_transform(x), trunc.tail_index)
        nx = eval_norm(norm, x)
        margin = nx - enc.lo - tol * max(1.0, enc.lo)
        margins.append(margin)
        if margin > 0:
            violations.append(Violation(
                k, {"x": _wire(x)}, nx, enc.lo, margin))
    return _make_report("hat-lower-bound", samples, violations, seed,
                        margins, {"truncate": trunc.tail_index, "tol": tol})


def _suite_hat_lipschitz(norm, samples, seed, tol, trunc):
    if norm.kind != "lp" or norm.params[0] <= 1.0:
        raise NormError("hat-lipschitz expects lp(p) with p > 1")
    p = norm.params[0]
    c = _hat_constant(p)
    rng = random.Random(seed)
    violations = []
    margins = []
    for k in range(samples):
        x = random_vector(rng, max_support=8, max_index=16)
        y = random_vector(rng, max_support=8, max_index=16)
        N = rng.randint(1, 8)
        enc_x = eval_tailed(norm, restrict(hat_transform(x), N),
                            trunc.tail_index)
        enc_y = eval_tailed(norm, restrict(hat_transform(y), N),
                            trunc.tail_index)
        bound = c * eval_norm(norm, x - y)
        margin = _interval_abs_diff_exceeds(enc_x, enc_y,
                                            bound + tol * max(1.0, bound))
        margins.append(margin)
        if margin > 0:
            violations.append(Violation(
                k, {"x": _wire(x), "y": _wire(y), "N": N},
                max(enc_x.lo - enc_y.hi, enc_y.lo - enc_x.hi), bound,
                margin))
    return _make_report("hat-lipschitz", samples, violations, seed, margins,
                        {"p": p, "c": c, "truncate": trunc.tail_index,
                         "tol": tol})


def _suite_hat_lower_blocks(norm, samples, seed, tol, trunc):
    """Finite form of the escaping-blocks lower bound.

    x is finitely supported and the blocks y_n start beyond it, so the
    approximation slack is zero; with a 1-symmetric base (K = 1) the claim is
    || hat(x + y_n) . 1_[N, inf) || >= ||y_n|| - N ||y_n||_inf.
    """
    if not (norm.is_1_unconditional and norm.is_1_symmetric):
        raise NormError("hat-lower-blocks expects a 1-symmetric norm")
    rng = random.Random(seed)
    violations = []
    margins = []
    count = 0
    for k in range(samples):
        x = random_vector(rng, max_support=6, max_index=8, bound=4.0)
        start = 9
        for n in range(1, 5):
            length = 4 * 2 ** n
            block = FiniteVector(
                (i, 1.0) for i in range(start, start + length))
            scale = 1.0 / eval_norm(norm, block)
            y = block * scale
            delta = eval_norm(norm, y)
            y_sup = eval_norm(NormDescriptor("sup"), y)
            start += length
            for N in (1, 2, 4):
                count += 1
                enc = eval_tailed(norm, restrict(hat_transform(x + y), N),
                                  trunc.tail_index)
                rhs = delta - N * y_sup
                margin = rhs - enc.hi - tol * max(1.0, abs(rhs))
                margins.append(margin)
                if margin > 0:
                    violations.append(Violation(
                        count, {"x": _wire(x), "y": _wire(y), "N": N},
                        rhs, enc.hi, margin))
    return _make_report("hat-lower-blocks", count, violations, seed, margins,
                        {"truncate": trunc.tail_index, "tol": tol})


def _suite_norm_axioms(norm, samples, seed, tol, trunc):
    rng = random.Random(seed)
    violations = []
    margins = []
    for k in range(samples):
        x = random_vector(rng, max_support=12, max_index=24)
        y = random_vector(rng, max_support=12, max_index=24)
        ex = evaluate(norm, x, trunc)
        ey = evaluate(norm, y, trunc)
        es = evaluate(norm, x + y, trunc)
        checks = [("triangle", es.lo, ex.hi + ey.hi)]
        alpha = rng.uniform(-3.0, 3.0)
        ea = evaluate(norm, x * alpha, trunc)
        scaled_lo, scaled_hi = abs(alpha) * ex.lo, abs(alpha) * ex.hi
        checks.append(("homogeneity-upper", ea.lo, scaled_hi))
        checks.append(("homogeneity-lower", scaled_lo, ea.hi))
        if not x.is_zero:
            checks.append(("definiteness", 1e-15, ex.hi))
            # reversed comparison: violation when hi is still zero
        for name, lhs, rhs in checks:
            if name == "definiteness":
                margin = lhs - rhs
            else:
                margin = lhs - rhs - tol * max(1.0, abs(rhs))
            margins.append(margin)
            if margin > 0:
                violations.append(Violation(
                    k, {"x": _wire(x), "y": _wire(y), "alpha": alpha,
                        "check": name}, lhs, rhs, margin))
    return _make_report("norm-axioms", samples, violations, seed, margins,
                        {"tol": tol, "truncate": trunc.tail_index})


SUITES = {
    "hat-subadditive": _suite_hat_subadditive,
    "davis-sandwich": _suite_davis_sandwich,
    "shifted-bounds": _suite_shifted_bounds,
    "hat-domination": _suite_hat_domination,
    "hat-lower-bound": _suite_hat_lower_bound,
    "hat-lipschitz": _suite_hat_lipschitz,
    "hat-lower-blocks": _suite_hat_lower_blocks,
    "norm-axioms": _suite_norm_axioms,
}


def inequality_suite(name: str, norm: NormDescriptor, samples: int = 500,
                     seed: int = 0, tol: float = DEFAULT_TOL,
                     trunc: Truncation = Truncation()) -> ProbeReport:
    """Run a registered inequality suite on deterministic samples."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise NormError(f"unknown suite {name!r}; registered: "
                        f"{', '.join(sorted(SUITES))}") from None
    return fn(norm, samples, seed, tol, trunc)

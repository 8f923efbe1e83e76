"""Independent oracles, coded separately from the package implementations.

The Tsirelson oracle enumerates every admissible family recursively with no
memoization; the Davis oracle is a dense grid search over the coordinatewise
split parameters.  Both exist to cross-check the production evaluators, so
they deliberately avoid the production code paths (dynamic programming,
1-D reductions, coordinate descent).
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from seqrenorm import eval_norm
from seqrenorm.vectors import FiniteVector


def tsirelson_bruteforce(v: FiniteVector):
    """Exhaustive recursion over admissible interval families.

    Families are all ways to drop a prefix of the support and split what
    remains into successive groups E_1 < ... < E_k with k <= min E_1; each
    group recurses.  Exponential, usable for supports of size <= 6 or so.
    """
    if v.is_zero:
        return Fraction(0) if v.is_exact() else 0.0
    exact = v.is_exact()
    half = Fraction(1, 2) if exact else 0.5
    pairs = [(i, abs(a) if exact else abs(float(a))) for i, a in v]

    def rec(chunk):
        best = max(val for _, val in chunk)
        n = len(chunk)
        for s in range(n):
            rest = chunk[s:]
            cap = min(rest[0][0], len(rest))
            for k in range(1, cap + 1):
                if s == 0 and k == 1:
                    continue
                for cuts in itertools.combinations(range(1, len(rest)), k - 1):
                    total = 0
                    prev = 0
                    for c in list(cuts) + [len(rest)]:
                        total += rec(rest[prev:c])
                        prev = c
                    cand = half * total
                    if cand > best:
                        best = cand
        return best

    return rec(pairs)


def _batch_norm(norm, rows: np.ndarray, supp) -> np.ndarray:
    k = norm.kind
    a = np.abs(rows)
    if k == "sup":
        return a.max(axis=1)
    if k == "l1":
        return a.sum(axis=1)
    if k == "lp":
        p = norm.params[0]
        return (a ** p).sum(axis=1) ** (1.0 / p)
    if k == "day":
        s = -np.sort(-a, axis=1)
        w = 4.0 ** -np.arange(1, s.shape[1] + 1)
        return np.sqrt((s * s) @ w)
    if k == "lorentz":
        s = -np.sort(-a, axis=1)
        w = 1.0 / np.arange(1, s.shape[1] + 1)
        return s @ w
    return np.array([eval_norm(norm, FiniteVector(zip(supp, row)))
                     for row in rows])


def davis_grid_oracle(E, F, m: float, x: FiniteVector,
                      steps: int = 64) -> float:
    """min over alpha in {0, 1/steps, ..., 1}^s of the split objective."""
    supp = [i for i, _ in x]
    mags = np.array([abs(float(a)) for _, a in x])
    s = len(supp)
    axes = np.linspace(0.0, 1.0, steps + 1)
    grid = np.array(np.meshgrid(*([axes] * s), indexing="ij"),
                    dtype=float).reshape(s, -1).T
    y = m * grid * mags
    z = (1.0 - grid) * mags / m
    ne = _batch_norm(E, y, supp)
    nf = _batch_norm(F, z, supp)
    return float(np.min(np.hypot(ne, nf)))


def hat_values_direct(v: FiniteVector, upto: int) -> list:
    """(1/n) sum_{i<=n} x*(i) computed straight from the definition."""
    stars = sorted((abs(float(a)) for _, a in v), reverse=True)
    out = []
    for n in range(1, upto + 1):
        out.append(math.fsum(stars[:n]) / n)
    return out

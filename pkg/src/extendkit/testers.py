"""Property testers for subadditive, XOS, and nonmonotone subadditive
functions over query oracles, with exact violation checks and query
accounting.

Each run draws ceil(1/eps) sets from the middle-weighted slice M_lambda
of the cube, queries the subsets of the drawn set, and rejects on an
exactly verified violation. lambda uses the natural logarithm in both
samplers: the two Chernoff arguments need e^{-lambda^2}, so sqrt(ln(4/eps))
is the proof-consistent reading of the two differing notations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .errors import EpsilonOutOfRange, TooLarge
from .ground import ONE, ZERO, Rational, elements, popcount, submasks

ONESIDED = "onesided"
TWOSIDED = "twosided"


class FunctionOracle:
    """Oracle access to f: 2^[m] -> Q_(>=0) with a monotone query counter
    (one increment per evaluate call)."""

    def __init__(self, m: int, fn: Callable[[int], Rational]):
        self.m = m
        self._fn = fn
        self.query_count = 0

    @classmethod
    def from_table(cls, table) -> "FunctionOracle":
        """Wrap a FullTable (anything with .m and mask-indexable .values)."""
        values = table.values
        return cls(table.m, lambda mask: values[mask])

    def evaluate(self, mask: int) -> Rational:
        self.query_count += 1
        return self._fn(mask)


def _as_fraction(epsilon) -> Fraction:
    if isinstance(epsilon, float):
        eps = Fraction(str(epsilon))
    else:
        eps = Fraction(epsilon)
    if not 0 < eps < 1:
        raise EpsilonOutOfRange(f"epsilon must lie in (0,1), got {epsilon}")
    return eps


def layer_bounds(m: int, epsilon, variant: str) -> tuple[int, int, float]:
    """(kmin, kmax, lambda) for M_lambda."""
    eps = _as_fraction(epsilon)
    lam = math.sqrt(math.log(4 / float(eps)))
    hw = lam * math.sqrt(m)
    kmax = min(m, math.floor(m / 2 + hw))
    if variant == ONESIDED:
        kmin = 0
    elif variant == TWOSIDED:
        kmin = max(0, math.ceil(m / 2 - hw))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return kmin, kmax, lam


def sample_M_lambda(m: int, epsilon, variant: str, rng: random.Random) -> int:
    """Uniform draw from M_lambda = sets with kmin <= |S| <= kmax."""
    kmin, kmax, _ = layer_bounds(m, epsilon, variant)
    weights = [math.comb(m, k) for k in range(kmin, kmax + 1)]
    total = sum(weights)
    r = rng.randrange(total)
    for k, w in zip(range(kmin, kmax + 1), weights):
        if r < w:
            mask = 0
            for e in rng.sample(range(m), k):
                mask |= 1 << e
            return mask
        r -= w
    raise AssertionError("unreachable")


def query_bound(m: int, epsilon, variant: str) -> float:
    """The class bound on total queries: |Q(T)|/eps with |Q(T)| at most
    2^(m/2 + lambda sqrt(m)) (monotone testers) or the layer-restricted
    subset count (nonmonotone)."""
    eps = _as_fraction(epsilon)
    kmin, kmax, lam = layer_bounds(m, epsilon, variant)
    if variant == ONESIDED:
        per_iter = 2.0 ** (m / 2 + lam * math.sqrt(m))
    else:
        per_iter = float(
            sum(math.comb(kmax, j) for j in range(kmin, kmax + 1))
        )
    return per_iter / float(eps)


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class MonotonicityWitness:
    target: int
    subset: int
    target_value: Rational
    subset_value: Rational

    def verify(self, oracle: FunctionOracle) -> bool:
        return (
            self.subset & ~self.target == 0
            and oracle.evaluate(self.target) == self.target_value
            and oracle.evaluate(self.subset) == self.subset_value
            and self.target_value < self.subset_value
        )

    def _to_jsonable(self):
        return {
            "kind": "monotonicity",
            "target": list(elements(self.target)),
            "subset": list(elements(self.subset)),
            "target_value": str(self.target_value),
            "subset_value": str(self.subset_value),
        }


@dataclass(frozen=True)
class CoverWitness:
    target: int
    cover: tuple[int, ...]
    cover_sum: Rational
    target_value: Rational

    def verify(self, oracle: FunctionOracle) -> bool:
        union = 0
        total = ZERO
        for s in self.cover:
            if s & ~self.target:
                return False
            union |= s
            total += oracle.evaluate(s)
        return (
            union == self.target
            and total == self.cover_sum
            and oracle.evaluate(self.target) == self.target_value
            and total < self.target_value
        )

    def _to_jsonable(self):
        return {
            "kind": "cover",
            "target": list(elements(self.target)),
            "cover": [list(elements(s)) for s in self.cover],
            "cover_sum": str(self.cover_sum),
            "target_value": str(self.target_value),
        }


@dataclass(frozen=True)
class FractionalCoverWitness:
    target: int
    weights: tuple[tuple[int, Rational], ...]
    cost: Rational
    target_value: Rational

    def verify(self, oracle: FunctionOracle) -> bool:
        coverage = {e: ZERO for e in elements(self.target)}
        total = ZERO
        for s, w in self.weights:
            if w < 0 or s & ~self.target:
                return False
            total += w * oracle.evaluate(s)
            for e in elements(s):
                coverage[e] += w
        return (
            all(c >= 1 for c in coverage.values())
            and total == self.cost
            and oracle.evaluate(self.target) == self.target_value
            and total < self.target_value
        )

    def _to_jsonable(self):
        return {
            "kind": "fractional-cover",
            "target": list(elements(self.target)),
            "weights": [
                {"set": list(elements(s)), "weight": str(w)} for s, w in self.weights
            ],
            "cost": str(self.cost),
            "target_value": str(self.target_value),
        }


@dataclass(frozen=True)
class TesterReport:
    verdict: str  # "accept" | "reject"
    queries: int
    witness: Optional[object]
    iterations_run: int
    seed: Optional[int]

    def _to_jsonable(self):
        from .ground import to_jsonable

        return {
            "verdict": self.verdict,
            "queries": self.queries,
            "iterations_run": self.iterations_run,
            "seed": self.seed,
            "witness": to_jsonable(self.witness) if self.witness else None,
        }


# ---------------------------------------------------------------------------
# exact per-target checks


def min_union_cover(values: dict[int, Rational], target: int, available):
    """Minimum-cost family of available subsets of ``target`` whose union
    is exactly ``target``: (cost, cover) or None.

    Superset-minimization first (covering already-covered elements is
    free), then a cover DP over the 3^|T| (footprint, remainder) pairs.
    """
    if target == 0:
        # families have r >= 1 sets and every set is a subset of the
        # target; only the empty set itself can cover the empty target
        return (values[0], (0,)) if 0 in available else None
    elems = elements(target)
    t = len(elems)
    full = (1 << t) - 1
    pos = {e: i for i, e in enumerate(elems)}

    def pack(mask):
        p = 0
        for e in elements(mask):
            p |= 1 << pos[e]
        return p

    unpack = {}
    psi: list = [None] * (full + 1)
    arg: list = [None] * (full + 1)
    for sub in submasks(target):
        if sub and sub in available:
            p = pack(sub)
            v = values[sub]
            if psi[p] is None or v < psi[p]:
                psi[p] = v
                arg[p] = sub
            unpack[p] = sub
    for i in range(t):
        bit = 1 << i
        for p in range(full, -1, -1):
            if p & bit:
                continue
            q = p | bit
            if psi[q] is not None and (psi[p] is None or psi[q] < psi[p]):
                psi[p] = psi[q]
                arg[p] = arg[q]

    dp: list = [None] * (full + 1)
    par: list = [None] * (full + 1)
    dp[0] = ZERO
    for mask in range(1, full + 1):
        low = mask & -mask
        best = None
        best_p = None
        sub = mask
        while sub:
            if sub & low and psi[sub] is not None and dp[mask ^ sub] is not None:
                cand = dp[mask ^ sub] + psi[sub]
                if best is None or cand < best:
                    best, best_p = cand, sub
            sub = (sub - 1) & mask
        dp[mask] = best
        par[mask] = best_p
    if dp[full] is None:
        return None
    cover = []
    mask = full
    while mask:
        p = par[mask]
        cover.append(arg[p])
        mask ^= p
    return dp[full], tuple(cover)


def fractional_cover_min(values: dict[int, Rational], target: int):
    """Optimal fractional cover of ``target`` by its own subsets:
    (value, weights). Row generation on the dual (variables per element)
    keeps the LP small even though there are 2^|T| candidate sets."""
    from . import lp

    elems = elements(target)
    t = len(elems)
    if t == 0:
        return ZERO, ()
    full = (1 << t) - 1
    pos = {e: i for i, e in enumerate(elems)}
    packed_value: dict[int, Rational] = {}
    packed_orig: dict[int, int] = {}
    for sub in submasks(target):
        if not sub:
            continue
        p = 0
        for e in elements(sub):
            p |= 1 << pos[e]
        v = values[sub]
        if p not in packed_value or v < packed_value[p]:
            packed_value[p] = v
            packed_orig[p] = sub

    names = tuple(f"b{i}" for i in range(t))
    generated: list[int] = [1 << i for i in range(t)]
    gen_set = set(generated)
    while True:
        cons = tuple(
            lp.Constraint(
                tuple(ONE if p >> i & 1 else ZERO for i in range(t)),
                "<=",
                packed_value[p],
            )
            for p in generated
        )
        out = lp.solve(
            lp.ExactLP(
                names,
                cons,
                (tuple(ONE for _ in range(t)), "max"),
                lower=(ZERO,) * t,
            )
        )
        assert isinstance(out, lp.Optimal)
        beta = [out.assignment[f"b{i}"] for i in range(t)]
        sums: list = [ZERO] * (full + 1)
        for p in range(1, full + 1):
            low = p & -p
            sums[p] = sums[p ^ low] + beta[low.bit_length() - 1]
        worst, worst_p = ZERO, None
        for p, v in packed_value.items():
            slack = sums[p] - v
            if slack > worst:
                worst, worst_p = slack, p
        if worst_p is None:
            break
        generated.append(worst_p)
        gen_set.add(worst_p)

    # primal over the generated columns recovers the optimal weights
    cols = generated
    names_p = tuple(f"a{j}" for j in range(len(cols)))
    cons = []
    for i in range(t):
        cons.append(
            lp.Constraint(
                tuple(ONE if p >> i & 1 else ZERO for p in cols), ">=", ONE
            )
        )
    objective = (tuple(packed_value[p] for p in cols), "min")
    opt = lp.solve(
        lp.ExactLP(names_p, tuple(cons), objective, lower=(ZERO,) * len(cols))
    )
    assert isinstance(opt, lp.Optimal) and opt.value == out.value
    weights = tuple(
        (packed_orig[p], opt.assignment[f"a{j}"])
        for j, p in enumerate(cols)
        if opt.assignment[f"a{j}"] != 0
    )
    return opt.value, weights


# ---------------------------------------------------------------------------
# the testers


def _prepare(epsilon, rng):
    eps = _as_fraction(epsilon)
    iterations = math.ceil(1 / eps)
    if isinstance(rng, random.Random):
        return eps, iterations, rng, None
    seed = int(rng)
    return eps, iterations, random.Random(seed), seed


def _iteration_values(oracle, masks) -> dict[int, Rational]:
    # per-iteration cache: each distinct set is queried exactly once
    return {s: oracle.evaluate(s) for s in masks}


def test_subadditive(oracle: FunctionOracle, epsilon, rng) -> TesterReport:
    """Monotone subadditive tester: draw T from the one-sided M_lambda,
    query all subsets, reject on f(T) < f(T') for T' inside T or on an
    exact-union cover cheaper than f(T)."""
    eps, iterations, rng, seed = _prepare(epsilon, rng)
    if oracle.m > 24:
        raise TooLarge("testers query 2^|T| sets; m <= 24 only")
    start = oracle.query_count
    for it in range(1, iterations + 1):
        target = sample_M_lambda(oracle.m, eps, ONESIDED, rng)
        subs = submasks(target)
        values = _iteration_values(oracle, subs)
        ft = values[target]
        for s in subs:
            if s != target and values[s] > ft:
                w = MonotonicityWitness(target, s, ft, values[s])
                return TesterReport(
                    "reject", oracle.query_count - start, w, it, seed
                )
        hit = min_union_cover(values, target, values.keys())
        if hit is not None and hit[0] < ft:
            cost, cover = hit
            w = CoverWitness(target, cover, cost, ft)
            return TesterReport("reject", oracle.query_count - start, w, it, seed)
    return TesterReport("accept", oracle.query_count - start, None, iterations, seed)


def test_xos(oracle: FunctionOracle, epsilon, rng) -> TesterReport:
    """XOS tester: like the subadditive tester but the cover check is the
    fractional-cover LP over the subsets of T."""
    eps, iterations, rng, seed = _prepare(epsilon, rng)
    if oracle.m > 24:
        raise TooLarge("testers query 2^|T| sets; m <= 24 only")
    start = oracle.query_count
    for it in range(1, iterations + 1):
        target = sample_M_lambda(oracle.m, eps, ONESIDED, rng)
        subs = submasks(target)
        values = _iteration_values(oracle, subs)
        ft = values[target]
        for s in subs:
            if s != target and values[s] > ft:
                w = MonotonicityWitness(target, s, ft, values[s])
                return TesterReport(
                    "reject", oracle.query_count - start, w, it, seed
                )
        cost, weights = fractional_cover_min(values, target)
        if cost < ft:
            w = FractionalCoverWitness(target, weights, cost, ft)
            return TesterReport("reject", oracle.query_count - start, w, it, seed)
    return TesterReport("accept", oracle.query_count - start, None, iterations, seed)


def test_nonmonotone_subadditive(oracle: FunctionOracle, epsilon, rng) -> TesterReport:
    """Nonmonotone subadditive tester: two-sided M_lambda, queries only
    Q(T) = subsets of T inside M_lambda, rejects only on exact-union
    covers by Q(T) members."""
    eps, iterations, rng, seed = _prepare(epsilon, rng)
    if oracle.m > 24:
        raise TooLarge("testers query subsets of the drawn set; m <= 24 only")
    kmin, kmax, _ = layer_bounds(oracle.m, eps, TWOSIDED)
    start = oracle.query_count
    for it in range(1, iterations + 1):
        target = sample_M_lambda(oracle.m, eps, TWOSIDED, rng)
        qt = [
            s for s in submasks(target) if kmin <= popcount(s) <= kmax
        ]
        values = _iteration_values(oracle, qt)
        ft = values[target]
        hit = min_union_cover(values, target, set(values.keys()))
        if hit is not None and hit[0] < ft:
            cost, cover = hit
            w = CoverWitness(target, cover, cost, ft)
            return TesterReport("reject", oracle.query_count - start, w, it, seed)
    return TesterReport("accept", oracle.query_count - start, None, iterations, seed)

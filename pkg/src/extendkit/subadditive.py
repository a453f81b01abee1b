"""Monotone and nonmonotone subadditive extension: decision via minimum
covers, exact approximation factor, cover-free-family utilities, and the
set-cover hardness gadget as a test generator.

A partial function extends to a monotone subadditive function exactly when
every defined set T satisfies min-cover-cost(T) >= f(T), where covers are
families of defined sets whose union contains T. For the nonmonotone class
the family's union must equal T exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .errors import ValueNotPositive
from .ground import PartialSetFunction, Rational, elements, mask_of

MONOTONE = "monotone"
EXACT_UNION = "exact_union"


@dataclass(frozen=True)
class CoverViolation:
    """A family of defined sets witnessing non-extendibility."""

    target: int
    cover: tuple[int, ...]
    cover_sum: Rational
    target_value: Rational

    def check(self, h: PartialSetFunction, variant: str = MONOTONE) -> bool:
        """Re-verify the violation from the partial function alone."""
        values = h.as_dict()
        if self.target not in values or any(c not in values for c in self.cover):
            return False
        union = 0
        total = Rational(0)
        for c in self.cover:
            union |= c
            total += values[c]
        if variant == MONOTONE:
            covered = union | self.target == union
        else:
            covered = union == self.target
        return (
            covered
            and total == self.cover_sum
            and values[self.target] == self.target_value
            and total < values[self.target]
        )

    def _to_jsonable(self):
        return {
            "target": list(elements(self.target)),
            "cover": [list(elements(c)) for c in self.cover],
            "cover_sum": str(self.cover_sum),
            "target_value": str(self.target_value),
        }


@dataclass(frozen=True)
class Extendible:
    pass


@dataclass(frozen=True)
class NotExtendible:
    violation: CoverViolation


@dataclass(frozen=True)
class ApproxWitness:
    """The argmax target of f(T)/min-cover-cost(T) and its optimal cover."""

    target: int
    cover: tuple[int, ...]
    cover_sum: Rational
    target_value: Rational

    def _to_jsonable(self):
        return {
            "target": list(elements(self.target)),
            "cover": [list(elements(c)) for c in self.cover],
            "cover_sum": str(self.cover_sum),
            "target_value": str(self.target_value),
        }


def min_cover_value(
    h: PartialSetFunction, target: int, variant: str = MONOTONE
) -> Optional[tuple[Rational, tuple[int, ...]]]:
    """Exact minimum cover cost of ``target`` by defined sets, with an
    optimal cover; None when no cover exists.

    monotone: families whose union contains target (only the part of each
    defined set inside target matters). exact_union: families of defined
    subsets of target whose union is exactly target.
    """
    if variant not in (MONOTONE, EXACT_UNION):
        raise ValueError(f"unknown variant {variant!r}")
    if target == 0:
        # covers need r >= 1 sets; for the empty target that is any single
        # defined set (monotone) or the empty set itself (exact union)
        if variant == EXACT_UNION:
            for mask, value in h.points:
                if mask == 0:
                    return value, (0,)
            return None
        best_mask, best = min(h.points, key=lambda p: (p[1], p[0]))
        return best, (best_mask,)
    usable = []  # (footprint inside target, cost, original mask)
    for mask, value in h.points:
        if variant == EXACT_UNION and mask & ~target:
            continue
        foot = mask & target
        usable.append((foot, value, mask))

    # dp over submasks of target, re-indexed to the target's own elements
    elems = elements(target)
    t = len(elems)
    pos = {e: i for i, e in enumerate(elems)}
    packed = []
    for foot, value, mask in usable:
        p = 0
        for e in elements(foot):
            p |= 1 << pos[e]
        packed.append((p, value, mask))

    size = 1 << t
    dp: list = [None] * size
    dp[0] = Rational(0)
    choice = [None] * size
    # each step covers the lowest uncovered element
    for mask in range(1, size):
        low = mask & -mask
        best = None
        best_set = None
        for p, value, orig in packed:
            if not p & low:
                continue
            rest = dp[mask & ~p]
            if rest is None:
                continue
            cost = rest + value
            if best is None or cost < best:
                best = cost
                best_set = orig
        dp[mask] = best
        choice[mask] = best_set
    if dp[size - 1] is None:
        return None
    cover = []
    mask = size - 1
    while mask:
        orig = choice[mask]
        cover.append(orig)
        p = 0
        for e in elements(orig & target):
            p |= 1 << pos[e]
        mask &= ~p
    return dp[size - 1], tuple(cover)


def _decide(h: PartialSetFunction, variant: str):
    h.require_nonnegative(
        "subadditive" if variant == MONOTONE else "subadditive-nonmonotone"
    )
    for target, value in h.points:
        result = min_cover_value(h, target, variant)
        assert result is not None  # the self-cover always exists
        cost, cover = result
        if cost < value:
            violation = CoverViolation(target, cover, cost, value)
            assert violation.check(h, variant)
            return NotExtendible(violation)
    return Extendible()


def extend_monotone_subadditive(h: PartialSetFunction):
    """Extendibility to a monotone subadditive function on 2^[m]."""
    return _decide(h, MONOTONE)


def extend_general_subadditive(h: PartialSetFunction):
    """Extendibility to a (not necessarily monotone) subadditive function."""
    return _decide(h, EXACT_UNION)


def approx_monotone_subadditive_exact(h: PartialSetFunction):
    """The optimal multiplicative factor alpha* for monotone subadditive
    extension, with the argmax target and its minimum cover as witness.

    alpha* = max over defined T of f(T) / min-cover-cost(T); the pointwise
    maximal monotone subadditive function below upper bounds alpha*f is the
    cover roof of those bounds, and the roof scales linearly with alpha.
    """
    _require_positive(h)
    best = Rational(1)
    best_target = h.points[0][0]
    best_cover: tuple[int, ...] = (best_target,)
    for target, value in h.points:
        cost, cover = min_cover_value(h, target, MONOTONE)  # self-cover exists
        ratio = value / cost
        if ratio > best:
            best, best_target, best_cover = ratio, target, cover
    values = h.as_dict()
    total = sum((values[c] for c in best_cover), Rational(0))
    return best, ApproxWitness(best_target, best_cover, total, values[best_target])


def approx_subadditive_via_xos(h: PartialSetFunction) -> Rational:
    """Upper bound for the subadditive factor via the optimal XOS factor.

    Every XOS function is subadditive, and any subadditive function is
    within O(log m) of an XOS one, so alpha_sub <= alpha_xos <= O(log m)
    times alpha_sub.
    """
    from .xos import approx_xos

    _require_positive(h)
    alpha, _vectors = approx_xos(h)
    return alpha


def _require_positive(h: PartialSetFunction):
    for mask, v in h.points:
        if v <= 0:
            raise ValueNotPositive(
                f"approximation factors need values > 0; "
                f"f({sorted(elements(mask))}) = {v}"
            )


def is_r_cover_free(family, r: int):
    """Exhaustive r-cover-freeness check; False comes with the witness
    (covered set, covering r-tuple). Exponential in r by design."""
    fam = list(family)
    if len(set(fam)) != len(fam):
        raise ValueError("family must consist of distinct sets")
    for idx, target in enumerate(fam):
        others = fam[:idx] + fam[idx + 1 :]
        for combo in combinations(others, r):
            union = 0
            for c in combo:
                union |= c
            if target & ~union == 0:
                return False, (target, combo)
    return True, None


def gen_set_cover_gadget(m: int, cover_sets, k: int) -> PartialSetFunction:
    """The coNP-hardness instance: each set of the cover family has value 1
    and the full ground set has value k+1. Extendible exactly when every
    cover of [m] needs more than k sets.

    The full ground set may not itself belong to the cover family (it
    would need two conflicting values), and k must be nonnegative."""
    from .errors import InfeasibleParameters

    full = (1 << m) - 1
    if k < 0:
        raise InfeasibleParameters("k must be >= 0")
    masks = [s if isinstance(s, int) else mask_of(s) for s in cover_sets]
    if full in masks:
        raise InfeasibleParameters("the full ground set cannot be a cover set")
    points = [(s, Rational(1)) for s in masks]
    points.append((full, Rational(k + 1)))
    return PartialSetFunction(m, tuple(points))

"""XOS (max-of-nonnegative-linear, equivalently fractionally subadditive)
extension: exact decision via per-point fractional-cover LPs, the optimal
approximation factor via one LP, and roof evaluation.

A partial function extends to an XOS function iff every defined set's
fractional cover by defined sets costs at least its own value; on the
extendible side the n supporting linear functions are reconstructed from
the witness LP with one vector per defined point.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lp
from .errors import UnattainableFactor, ValueNotPositive
from .ground import ONE, ZERO, PartialSetFunction, Rational, elements


@dataclass(frozen=True)
class XosExtendible:
    """Supporting vectors w_i >= 0 with max_j w_j . chi(T_i) = w_i . chi(T_i) = f_i."""

    vectors: tuple[tuple[Rational, ...], ...]

    def evaluate(self, mask: int) -> Rational:
        best = ZERO
        for w in self.vectors:
            v = sum((w[e] for e in elements(mask)), ZERO)
            if v > best:
                best = v
        return best

    def check(self, h: PartialSetFunction) -> bool:
        if any(c < 0 for w in self.vectors for c in w):
            return False
        return all(self.evaluate(mask) == value for mask, value in h.points)

    def _to_jsonable(self):
        return {"vectors": [[str(c) for c in w] for w in self.vectors]}


@dataclass(frozen=True)
class XosNotExtendible:
    """A fractional cover of ``target`` by defined sets costing < f(target)."""

    target: int
    weights: tuple[tuple[int, Rational], ...]

    def check(self, h: PartialSetFunction) -> bool:
        values = h.as_dict()
        if self.target not in values:
            return False
        cost = ZERO
        coverage = {e: ZERO for e in elements(self.target)}
        for mask, w in self.weights:
            if mask not in values or w < 0:
                return False
            cost += w * values[mask]
            for e in elements(mask & self.target):
                coverage[e] += w
        return all(c >= 1 for c in coverage.values()) and cost < values[self.target]

    def _to_jsonable(self):
        return {
            "target": list(elements(self.target)),
            "weights": [
                {"set": list(elements(mask)), "weight": str(w)}
                for mask, w in self.weights
            ],
        }


def eval_xos_roof(h: PartialSetFunction, target: int):
    """Minimum cost of a fractional cover of ``target`` by defined sets:
    (value, optimal weights), or None when some element of ``target`` lies
    in no defined set."""
    h.require_nonnegative("xos")
    elems = elements(target)
    for e in elems:
        if not any(mask >> e & 1 for mask, _ in h.points):
            return None
    n = len(h.points)
    names = tuple(f"a{i}" for i in range(n))
    cons = []
    for e in elems:
        row = tuple(ONE if mask >> e & 1 else ZERO for mask, _ in h.points)
        cons.append(lp.Constraint(row, ">=", ONE))
    objective = (tuple(v for _, v in h.points), "min")
    out = lp.solve(
        lp.ExactLP(names, tuple(cons), objective, lower=(ZERO,) * n)
    )
    assert isinstance(out, lp.Optimal)
    weights = tuple(
        (mask, out.assignment[f"a{i}"])
        for i, (mask, _) in enumerate(h.points)
        if out.assignment[f"a{i}"] != 0
    )
    return out.value, weights


def extend_xos(h: PartialSetFunction):
    """Decide XOS extendibility: the minimizing fractional cover is the
    witness on the negative side; on the positive side the supporting
    vectors come from the one-vector-per-point feasibility LP at alpha=1."""
    h.require_nonnegative("xos")
    for target, value in h.points:
        roof = eval_xos_roof(h, target)
        assert roof is not None  # target covers itself
        cost, weights = roof
        if cost < value:
            witness = XosNotExtendible(target, weights)
            assert witness.check(h)
            return witness
    vectors = _support_vectors(h)
    witness = XosExtendible(vectors)
    assert witness.check(h)
    return witness


def _support_vectors(h: PartialSetFunction) -> tuple[tuple[Rational, ...], ...]:
    """Feasible vectors for the exact-extension LP: w_i . chi(T_i) = f_i and
    w_i . chi(T_i) >= w_k . chi(T_i) for all k, every w_i >= 0."""
    n, m = len(h.points), h.m
    nv = n * m
    names = tuple(f"w{i}_{j}" for i in range(n) for j in range(m))
    var = lambda i, j: i * m + j

    cons = []
    for i, (mask, value) in enumerate(h.points):
        row = [ZERO] * nv
        for e in elements(mask):
            row[var(i, e)] = ONE
        cons.append(lp.Constraint(tuple(row), "=", value))
        for k in range(n):
            if k == i:
                continue
            row = [ZERO] * nv
            for e in elements(mask):
                row[var(i, e)] = ONE
                row[var(k, e)] = -ONE
            cons.append(lp.Constraint(tuple(row), ">=", ZERO))
    out = lp.solve(lp.ExactLP(names, tuple(cons), lower=(ZERO,) * nv))
    assert isinstance(out, lp.Feasible), "roof checks passed but vector LP infeasible"
    return tuple(
        tuple(out.assignment[f"w{i}_{j}"] for j in range(m)) for i in range(n)
    )


def approx_xos(h: PartialSetFunction):
    """Optimal alpha for approximate XOS extension plus the optimal
    vectors, from the single LP with variables alpha and the n*m entries."""
    for mask, v in h.points:
        if v <= 0:
            raise ValueNotPositive(
                f"approximate XOS extension needs values > 0; "
                f"f({sorted(elements(mask))}) = {v}"
            )
        if mask == 0:
            raise UnattainableFactor(
                "the empty set carries a positive value but every XOS "
                "function is 0 there; no finite factor exists"
            )
    n, m = len(h.points), h.m
    nv = n * m + 1  # alpha is the last variable
    names = tuple(f"w{i}_{j}" for i in range(n) for j in range(m)) + ("alpha",)
    var = lambda i, j: i * m + j
    alpha_col = nv - 1

    cons = []
    for i, (mask, value) in enumerate(h.points):
        lo = [ZERO] * nv
        hi = [ZERO] * nv
        for e in elements(mask):
            lo[var(i, e)] = ONE
            hi[var(i, e)] = ONE
        cons.append(lp.Constraint(tuple(lo), ">=", value))
        hi[alpha_col] = -value
        cons.append(lp.Constraint(tuple(hi), "<=", ZERO))
        for k in range(n):
            if k == i:
                continue
            row = [ZERO] * nv
            for e in elements(mask):
                row[var(i, e)] = ONE
                row[var(k, e)] = -ONE
            cons.append(lp.Constraint(tuple(row), ">=", ZERO))
    objective = (tuple(ZERO for _ in range(nv - 1)) + (ONE,), "min")
    lower = (ZERO,) * (nv - 1) + (ONE,)
    out = lp.solve(lp.ExactLP(names, tuple(cons), objective, lower=lower))
    assert isinstance(out, lp.Optimal), "approx XOS LP must be solvable"
    vectors = tuple(
        tuple(out.assignment[f"w{i}_{j}"] for j in range(m)) for i in range(n)
    )
    return out.value, vectors

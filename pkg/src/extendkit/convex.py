"""Convex extension in Q^m: roof values via the primal transportation LP,
extension decision, optimal approximation factor, dual-polyhedron vertex
enumeration, and the canonical extension (max over dual vertices) inside
and outside the hull.

The roof of x is min sum lambda_i f_i over convex combinations of the
defined points hitting x; a partial function extends to a convex function
iff the roof equals the pinned value at every defined point. Outside the
hull the canonical extension is the max over vertices (y, mu) of the dual
{T_i . y + mu <= f_i} of x . y + mu, which needs vertex enumeration and is
exponential in m (it is NP-hard in general), hence the dimension guard.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from . import lp
from .errors import DegenerateHull, DimensionMismatch, TooLarge, ValueNotPositive
from .ground import ONE, ZERO, ConvexPartialFunction, Rational

EVAL_TILDE_MAX_DIM = 8


@dataclass(frozen=True)
class DualVertex:
    y: tuple[Rational, ...]
    mu: Rational
    tight: tuple[int, ...]  # indices of tight constraints

    def value_at(self, x) -> Rational:
        return sum((a * b for a, b in zip(x, self.y)), ZERO) + self.mu

    def _to_jsonable(self):
        return {
            "y": [str(c) for c in self.y],
            "mu": str(self.mu),
            "tight": list(self.tight),
        }


@dataclass(frozen=True)
class ConvexViolation:
    index: int
    point: tuple[Rational, ...]
    value: Rational
    roof: Rational

    def _to_jsonable(self):
        return {
            "index": self.index,
            "x": [str(c) for c in self.point],
            "value": str(self.value),
            "roof": str(self.roof),
        }


def affine_dimension(points) -> int:
    """Dimension of the affine hull, by exact rank of the difference set."""
    pts = [tuple(Rational(c) for c in p) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    base = pts[0]
    rows = [[c - b for c, b in zip(p, base)] for p in pts[1:]]
    return _rank(rows)


def _rank(rows) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        inv = ONE / prow[col]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        rank += 1
    return rank


def _check_dim(ch: ConvexPartialFunction, x) -> tuple:
    x = tuple(Rational(c) for c in x)
    if len(x) != ch.m:
        raise DimensionMismatch(f"point has dimension {len(x)}, expected {ch.m}")
    return x


def roof_value(ch: ConvexPartialFunction, x) -> Optional[Rational]:
    """Optimal value of the roof LP at x, or None when x is outside the
    convex hull of the defined points."""
    x = _check_dim(ch, x)
    n = len(ch.points)
    names = tuple(f"l{i}" for i in range(n))
    cons = []
    for j in range(ch.m):
        row = tuple(vec[j] for vec, _ in ch.points)
        cons.append(lp.Constraint(row, "=", x[j]))
    cons.append(lp.Constraint((ONE,) * n, "=", ONE))
    objective = (tuple(v for _, v in ch.points), "min")
    out = lp.solve(lp.ExactLP(names, tuple(cons), objective, lower=(ZERO,) * n))
    if isinstance(out, lp.Infeasible):
        return None
    assert isinstance(out, lp.Optimal)
    return out.value


def extend_convex(ch: ConvexPartialFunction):
    """Extendible iff the roof reproduces every pinned value (the roof
    never exceeds a pinned value, so only drops below can occur)."""
    for i, (vec, value) in enumerate(ch.points):
        roof = roof_value(ch, vec)
        assert roof is not None and roof <= value
        if roof < value:
            return ConvexViolation(i, vec, value, roof)
    return None  # extendible


def approx_convex(ch: ConvexPartialFunction, audit: bool = False):
    """Minimal alpha admitting a convex f with f_i <= f(T_i) <= alpha f_i.

    Closed form: the roof is linear in the upper-bound values, so alpha* =
    max_i f_i / roof(T_i). With audit=True the box-feasibility bisection
    (re-solving the roof LPs of the scaled instance at every probe) must
    bracket the same number to 2^-40.
    """
    for vec, v in ch.points:
        if v <= 0:
            raise ValueNotPositive(f"approximation needs values > 0; f({vec}) = {v}")
    alpha = ONE
    for vec, value in ch.points:
        roof = roof_value(ch, vec)
        ratio = value / roof
        if ratio > alpha:
            alpha = ratio
    if audit:
        lo, hi = bisect_approx_convex(ch, tol=Rational(1, 2**40))
        assert lo <= alpha <= hi, "closed form escaped the bisection bracket"
    return alpha


def feasible_at_alpha(ch: ConvexPartialFunction, alpha) -> bool:
    """Box-constrained convex feasibility at a given factor: a convex f
    with f_i <= f(T_i) <= alpha f_i exists iff the roof of the scaled
    instance {(T_i, alpha f_i)} stays >= f_i at every point."""
    alpha = Rational(alpha)
    scaled = ConvexPartialFunction(
        ch.m, tuple((vec, alpha * v) for vec, v in ch.points)
    )
    for (vec, value), _ in zip(ch.points, scaled.points):
        roof = roof_value(scaled, vec)
        assert roof is not None
        if roof < value:
            return False
    return True


def bisect_approx_convex(ch: ConvexPartialFunction, tol) -> tuple[Rational, Rational]:
    """Bracket the optimal factor with the feasibility probe alone."""
    tol = Rational(tol)
    if feasible_at_alpha(ch, ONE):
        return ONE, ONE
    lo, hi = ONE, Rational(2)
    while not feasible_at_alpha(ch, hi):
        lo, hi = hi, hi * 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if feasible_at_alpha(ch, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def enumerate_dual_vertices(ch: ConvexPartialFunction) -> tuple[DualVertex, ...]:
    """All vertices of Q = {(y, mu) : T_i . y + mu <= f_i}: solve every
    (m+1)-subset of constraints as equalities, keep nonsingular feasible
    solutions, deduplicate exact coordinates."""
    m, n = ch.m, len(ch.points)
    if affine_dimension(ch.vectors) < m:
        raise DegenerateHull(
            "the defined points span less than the ambient dimension; "
            "the dual polyhedron has no vertex (project to the affine hull)"
        )
    rows = [tuple(vec) + (ONE,) for vec, _ in ch.points]
    rhs = [v for _, v in ch.points]
    found: dict[tuple, DualVertex] = {}
    for subset in combinations(range(n), m + 1):
        sol = _solve_square([rows[i] for i in subset], [rhs[i] for i in subset])
        if sol is None:
            continue
        y, mu = tuple(sol[:m]), sol[m]
        key = y + (mu,)
        if key in found:
            continue
        vals = [
            sum((a * b for a, b in zip(rows[i], sol)), ZERO) for i in range(n)
        ]
        if any(v > r for v, r in zip(vals, rhs)):
            continue
        tight = tuple(i for i in range(n) if vals[i] == rhs[i])
        found[key] = DualVertex(y, mu, tight)
    assert found, "a full-dimensional hull guarantees at least one vertex"
    return tuple(found[k] for k in sorted(found))


def _solve_square(rows, rhs):
    """Exact solve of a square system; None when singular."""
    k = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(k):
        piv = next((i for i in range(col, k) if a[i][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = ONE / a[col][col]
        a[col] = [c * inv for c in a[col]]
        for i in range(k):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [c - f * d for c, d in zip(a[i], a[col])]
    return [a[i][k] for i in range(k)]


def eval_tilde(ch: ConvexPartialFunction, x, max_dim: int = EVAL_TILDE_MAX_DIM):
    """The canonical extension: max over dual vertices of x . y + mu.
    Refuses m > max_dim by default (vertex enumeration is O(n^(m+1)))."""
    x = _check_dim(ch, x)
    if ch.m > max_dim:
        raise TooLarge(
            f"eval_tilde enumerates O(n^(m+1)) vertex candidates; "
            f"m={ch.m} exceeds the default guard {max_dim}"
        )
    vertices = enumerate_dual_vertices(ch)
    return max(v.value_at(x) for v in vertices), vertices

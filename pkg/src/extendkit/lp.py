"""Exact rational linear programs: simplex with Bland's rule, Farkas
infeasibility witnesses, and unboundedness rays.

Every decision procedure in the package funnels through solve(). All
arithmetic is exact; tableau entries are rationals kept in lowest terms by
the rational type itself.

Farkas convention: a witness assigns one multiplier per *expanded* row
(declared constraints, then lower-bound rows in variable order, then
upper-bound rows in variable order). Rows are oriented "<=" for the
combination: "<=" rows enter as-is, ">=" rows enter negated, "=" rows
enter as-is with a free-sign multiplier; inequality multipliers must be
nonnegative. A valid witness combines rows to 0 <= c with c < 0.
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass
from typing import Optional

from .errors import DimensionMismatch
from .ground import ONE, ZERO, Rational

DEBUG = bool(os.environ.get("EXTENDKIT_DEBUG_LP"))

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = (LE, EQ, GE)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    rhs: Rational

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise DimensionMismatch(f"unknown relation {self.relation!r}")


@dataclass(frozen=True)
class ExactLP:
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]
    objective: Optional[tuple[tuple, str]] = None  # (coeffs, "min"|"max")
    lower: Optional[tuple] = None  # per-variable lower bound or None
    upper: Optional[tuple] = None

    def __post_init__(self):
        nv = len(self.variables)
        for c in self.constraints:
            if len(c.coeffs) != nv:
                raise DimensionMismatch(
                    f"row width {len(c.coeffs)} != variable count {nv}"
                )
        if self.objective is not None:
            coeffs, direction = self.objective
            if len(coeffs) != nv:
                raise DimensionMismatch("objective width != variable count")
            if direction not in ("min", "max"):
                raise DimensionMismatch(f"bad objective direction {direction!r}")
        for bounds in (self.lower, self.upper):
            if bounds is not None and len(bounds) != nv:
                raise DimensionMismatch("bounds width != variable count")

    def expanded_rows(self) -> list[tuple[tuple, str, Rational]]:
        """Constraints plus bound rows, in the canonical witness order."""
        nv = len(self.variables)
        rows = [(c.coeffs, c.relation, c.rhs) for c in self.constraints]
        for j in range(nv):
            lo = self.lower[j] if self.lower else None
            if lo is not None:
                unit = tuple(ONE if k == j else ZERO for k in range(nv))
                rows.append((unit, GE, lo))
        for j in range(nv):
            hi = self.upper[j] if self.upper else None
            if hi is not None:
                unit = tuple(ONE if k == j else ZERO for k in range(nv))
                rows.append((unit, LE, hi))
        return rows


@dataclass(frozen=True)
class FarkasWitness:
    multipliers: tuple


@dataclass(frozen=True)
class Optimal:
    assignment: dict
    value: Rational


@dataclass(frozen=True)
class Feasible:
    assignment: dict


@dataclass(frozen=True)
class Infeasible:
    witness: FarkasWitness


@dataclass(frozen=True)
class Unbounded:
    ray: dict


def verify_farkas(lp: ExactLP, witness: FarkasWitness) -> bool:
    """Exact check that the multipliers combine the rows into 0 <= c, c < 0.

    Independent of solve(): recomputes the combination from scratch.
    """
    rows = lp.expanded_rows()
    mults = witness.multipliers
    if len(mults) != len(rows):
        raise DimensionMismatch(
            f"{len(mults)} multipliers for {len(rows)} expanded rows"
        )
    nv = len(lp.variables)
    combo = [ZERO] * nv
    rhs = ZERO
    for (coeffs, rel, b), lam in zip(rows, mults):
        if rel != EQ and lam < 0:
            return False
        if lam == 0:
            continue
        sign = -ONE if rel == GE else ONE
        term = lam * sign
        for j, a in enumerate(coeffs):
            if a:
                combo[j] += term * a
        rhs += term * b
    return all(c == 0 for c in combo) and rhs < 0


# ---------------------------------------------------------------------------
# simplex internals


class _Tableau:
    """Dense tableau with row 0 holding reduced costs and -objective."""

    def __init__(self, rows, ncols):
        self.rows = rows  # list of lists, each length ncols+1
        self.ncols = ncols
        self.basis = []  # basic column per row

    def pivot(self, r, c):
        row = self.rows[r]
        piv = row[c]
        inv = ONE / piv
        w = self.ncols + 1
        if inv != 1:
            for j in range(w):
                if row[j]:
                    row[j] *= inv
        nz = [j for j in range(w) if row[j]]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
        self.basis[r - 1] = c

    def bland_min(self, eligible):
        """One phase of Bland's-rule simplex on a min objective in row 0.

        Returns "optimal" or ("unbounded", entering_col).
        """
        obj = self.rows[0]
        nrows = len(self.rows) - 1
        while True:
            enter = -1
            for j in eligible:
                if obj[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best = None
            for r in range(1, nrows + 1):
                a = self.rows[r][enter]
                if a > 0:
                    ratio = self.rows[r][self.ncols] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[r - 1] < self.basis[leave - 1]
                    ):
                        best = ratio
                        leave = r
            if leave < 0:
                return ("unbounded", enter)
            if DEBUG:
                print(
                    f"[lp] pivot enter={enter} leave_row={leave} ratio={best}",
                    file=sys.stderr,
                )
            self.pivot(leave, enter)


def solve(lp: ExactLP):
    """Exact outcome for the LP: Optimal, Feasible, Infeasible (with a
    verifiable Farkas witness), or Unbounded (with an improving ray).

    Two-phase primal simplex with Bland's anti-cycling rule throughout, so
    identical inputs take identical pivots.
    """
    nv = len(lp.variables)
    lower = lp.lower if lp.lower is not None else (None,) * nv
    upper = lp.upper if lp.upper is not None else (None,) * nv

    # Column layout for original variable j:
    #   shifted : x_j = lower_j + col  (col >= 0)
    #   split   : x_j = col_p - col_n
    col_of = []  # per variable: ("shift", col) | ("split", col_p, col_n)
    ncols = 0
    for j in range(nv):
        if lower[j] is not None:
            col_of.append(("shift", ncols))
            ncols += 1
        else:
            col_of.append(("split", ncols, ncols + 1))
            ncols += 2
    nstruct = ncols

    # Solver rows: declared constraints then upper-bound rows.
    solver_rows = [(c.coeffs, c.relation, c.rhs) for c in lp.constraints]
    upper_rows_vars = []
    for j in range(nv):
        if upper[j] is not None:
            unit = tuple(ONE if k == j else ZERO for k in range(nv))
            solver_rows.append((unit, LE, upper[j]))
            upper_rows_vars.append(j)

    # Express each row over columns, fold lower-bound shifts into the rhs,
    # then normalize to nonnegative rhs (tracking the sign flip).
    norm = []  # (colcoeffs: dict, rel, rhs, flip)
    for coeffs, rel, rhs in solver_rows:
        cc = {}
        b = Rational(rhs)
        for j, a in enumerate(coeffs):
            if not a:
                continue
            a = Rational(a)
            loc = col_of[j]
            if loc[0] == "shift":
                cc[loc[1]] = a
                b -= a * lower[j]
            else:
                cc[loc[1]] = a
                cc[loc[2]] = -a
        flip = 1
        if b < 0:
            flip = -1
            b = -b
            cc = {k: -v for k, v in cc.items()}
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        norm.append((cc, rel, b, flip))

    nrows = len(norm)
    # slack/surplus columns, then artificial columns
    slack_col = [None] * nrows
    art_col = [None] * nrows
    c = nstruct
    for i, (cc, rel, b, flip) in enumerate(norm):
        if rel in (LE, GE):
            slack_col[i] = c
            c += 1
    for i, (cc, rel, b, flip) in enumerate(norm):
        if rel in (EQ, GE):
            art_col[i] = c
            c += 1
    ncols = c
    art_set = {a for a in art_col if a is not None}

    rows = [[ZERO] * (ncols + 1)]  # row 0 = objective row, filled per phase
    basis = []
    for i, (cc, rel, b, flip) in enumerate(norm):
        row = [ZERO] * (ncols + 1)
        for col, a in cc.items():
            row[col] = a
        if slack_col[i] is not None:
            row[slack_col[i]] = ONE if rel == LE else -ONE
        if art_col[i] is not None:
            row[art_col[i]] = ONE
            basis.append(art_col[i])
        else:
            basis.append(slack_col[i])
        row[ncols] = b
        rows.append(row)

    tab = _Tableau(rows, ncols)
    tab.basis = basis

    # ---- phase 1: minimize the sum of artificials
    if art_set:
        obj = rows[0]
        for j in range(ncols + 1):
            s = ZERO
            for i in range(nrows):
                if tab.basis[i] in art_set:
                    s += rows[i + 1][j]
            obj[j] = (ONE if j in art_set else ZERO) - s
        status = tab.bland_min(range(ncols))
        assert status == "optimal", "phase 1 cannot be unbounded"
        infeas_amount = -rows[0][ncols]
        if infeas_amount > 0:
            return Infeasible(
                _farkas_from_tableau(
                    lp, tab, norm, slack_col, art_col, col_of, upper_rows_vars
                )
            )
        # drive artificials out of the basis where possible
        for i in range(nrows):
            if tab.basis[i] in art_set:
                row = rows[i + 1]
                for j in range(ncols):
                    if j not in art_set and row[j]:
                        tab.pivot(i + 1, j)
                        break
                # an all-zero row is redundant; its basic artificial stays 0

    def read_assignment():
        vals = [ZERO] * ncols
        for i in range(nrows):
            vals[tab.basis[i]] = rows[i + 1][ncols]
        out = {}
        for j, name in enumerate(lp.variables):
            loc = col_of[j]
            if loc[0] == "shift":
                out[name] = lower[j] + vals[loc[1]]
            else:
                out[name] = vals[loc[1]] - vals[loc[2]]
        return out

    if lp.objective is None:
        assignment = read_assignment()
        _assert_satisfies(lp, assignment)
        return Feasible(assignment)

    # ---- phase 2
    coeffs, direction = lp.objective
    sign = ONE if direction == "min" else -ONE
    cost = [ZERO] * ncols
    const_term = ZERO
    for j, a in enumerate(coeffs):
        if not a:
            continue
        a = sign * Rational(a)
        loc = col_of[j]
        if loc[0] == "shift":
            cost[loc[1]] += a
            const_term += a * lower[j]
        else:
            cost[loc[1]] += a
            cost[loc[2]] -= a
    obj = rows[0]
    for j in range(ncols + 1):
        s = ZERO
        for i in range(nrows):
            cb = cost[tab.basis[i]]
            if cb:
                s += cb * rows[i + 1][j]
        obj[j] = (cost[j] if j < ncols else ZERO) - s

    eligible = [j for j in range(ncols) if j not in art_set]
    status = tab.bland_min(eligible)
    if status != "optimal":
        _, enter = status
        dirvec = [ZERO] * ncols
        dirvec[enter] = ONE
        for i in range(nrows):
            a = rows[i + 1][enter]
            if a:
                dirvec[tab.basis[i]] = -a
        ray = {}
        for j, name in enumerate(lp.variables):
            loc = col_of[j]
            if loc[0] == "shift":
                ray[name] = dirvec[loc[1]]
            else:
                ray[name] = dirvec[loc[1]] - dirvec[loc[2]]
        _assert_ray(lp, ray)
        return Unbounded(ray)

    assignment = read_assignment()
    _assert_satisfies(lp, assignment)
    value = sign * (-rows[0][ncols] + const_term)
    return Optimal(assignment, value)


def _farkas_from_tableau(lp, tab, norm, slack_col, art_col, col_of, upper_rows_vars):
    """Build expanded-row multipliers from the optimal phase-1 tableau."""
    rows = tab.rows
    obj = rows[0]
    nconstraints = len(lp.constraints)
    nv = len(lp.variables)

    lam_solver = []
    for i, (cc, rel, b, flip) in enumerate(norm):
        tracker = art_col[i] if art_col[i] is not None else slack_col[i]
        ctrack = ONE if art_col[i] is not None else ZERO
        y = ctrack - obj[tracker]
        w = -flip * y
        # orient per the original relation of this solver row
        lam_solver.append(-w if rel_of_solver_row(lp, i, upper_rows_vars) == GE else w)

    # lower-bound multipliers are the reduced costs of the shifted columns
    lam_lower = []
    lower = lp.lower if lp.lower is not None else (None,) * nv
    for j in range(nv):
        if lower[j] is not None:
            loc = col_of[j]
            lam_lower.append(obj[loc[1]])

    mults = tuple(lam_solver[:nconstraints]) + tuple(lam_lower) + tuple(
        lam_solver[nconstraints:]
    )
    witness = FarkasWitness(mults)
    assert verify_farkas(lp, witness), "internal error: unverifiable Farkas witness"
    return witness


def rel_of_solver_row(lp, i, upper_rows_vars):
    if i < len(lp.constraints):
        return lp.constraints[i].relation
    return LE  # upper-bound rows


def _assert_satisfies(lp, assignment):
    vals = [assignment[name] for name in lp.variables]
    for coeffs, rel, rhs in lp.expanded_rows():
        s = ZERO
        for a, v in zip(coeffs, vals):
            if a:
                s += a * v
        ok = s <= rhs if rel == LE else s >= rhs if rel == GE else s == rhs
        assert ok, "internal error: simplex returned an infeasible point"


def _assert_ray(lp, ray):
    vals = [ray[name] for name in lp.variables]
    coeffs, direction = lp.objective
    gain = sum((a * v for a, v in zip(coeffs, vals)), ZERO)
    assert (gain < 0) if direction == "min" else (gain > 0), (
        "internal error: ray does not improve the objective"
    )
    for rcoeffs, rel, _rhs in lp.expanded_rows():
        s = sum((a * v for a, v in zip(rcoeffs, vals)), ZERO)
        ok = s <= 0 if rel == LE else s >= 0 if rel == GE else s == 0
        assert ok, "internal error: ray leaves the feasible region"

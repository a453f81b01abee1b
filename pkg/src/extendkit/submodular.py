"""Submodular extension over the interval family of the lattice closure,
square certificates of non-extendibility, their boolean-circuit form, the
fixing algorithm for cyclic monotone circuits, and certificate rewriting
into the lattice closure.

Square certificates: a multiset of tuples ({A,B}, A|B, A&B) such that
every set appearing unequally often as a middle point and as a
top/bottom point must be a defined set (balance), and the defined values
weighted by
(top/bottom count - middle count) sum to a positive number. A partial
function extends to a submodular function iff no square certificate
exists; certificates fall out of the Farkas witness of the extension LP.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from typing import Optional

from . import lp
from .errors import (
    ClosureCapExceeded,
    IncompleteAssignment,
    InvariantBroken,
    MalformedCircuit,
    MalformedDocument,
    MergeStuck,
    ValueNotPositive,
    WitnessInvalid,
)
from .ground import (
    ONE,
    ZERO,
    PartialSetFunction,
    Rational,
    elements,
    is_subset,
    lex_key,
)

DEFAULT_CLOSURE_CAP = 50_000


# ---------------------------------------------------------------------------
# lattice closure and the interval family


def lattice_closure(family, cap: int = DEFAULT_CLOSURE_CAP) -> frozenset[int]:
    """Minimal superfamily closed under union and intersection, by
    saturation; refuses (with the partial size) once past ``cap``."""
    seeds = list(dict.fromkeys(family))
    if not seeds:
        raise ValueError("family must be nonempty")
    accepted: list[int] = []
    seen: set[int] = set()
    pending = list(reversed(seeds))
    while pending:
        x = pending.pop()
        if x in seen:
            continue
        seen.add(x)
        if len(seen) > cap:
            raise ClosureCapExceeded(len(seen), cap)
        for y in accepted:
            u, n = x | y, x & y
            if u not in seen:
                pending.append(u)
            if n not in seen:
                pending.append(n)
        accepted.append(x)
    return frozenset(seen)


def interval_family(family, cap: int = DEFAULT_CLOSURE_CAP) -> tuple[int, ...]:
    """Lattice closure filtered to sets sandwiched between two members of
    the original family, sorted canonically."""
    fam = list(dict.fromkeys(family))
    closure = lattice_closure(fam, cap)
    kept = [
        s
        for s in closure
        if any(is_subset(s, t) for t in fam) and any(is_subset(t, s) for t in fam)
    ]
    return tuple(sorted(kept, key=lex_key))


def is_antichain(family) -> bool:
    fam = list(family)
    for i, a in enumerate(fam):
        for b in fam[i + 1 :]:
            if is_subset(a, b) or is_subset(b, a):
                return False
    return True


# ---------------------------------------------------------------------------
# square certificates


@dataclass(frozen=True)
class SquareTuple:
    a: int
    b: int
    top: int
    bottom: int

    def __post_init__(self):
        if self.top != self.a | self.b or self.bottom != self.a & self.b:
            raise MalformedDocument("square tuple must have top=a|b, bottom=a&b")


def square(a: int, b: int) -> SquareTuple:
    if lex_key(b) < lex_key(a):
        a, b = b, a
    return SquareTuple(a, b, a | b, a & b)


@dataclass(frozen=True)
class SquareCertificate:
    """Multiset of square tuples with multiplicities, optionally carrying
    the partial function it refutes."""

    m: int
    tuples: tuple[tuple[SquareTuple, int], ...]
    context: Optional[PartialSetFunction] = None

    def __post_init__(self):
        merged: dict[SquareTuple, int] = {}
        for t, k in self.tuples:
            if k <= 0:
                raise MalformedDocument("tuple multiplicities must be positive")
            merged[t] = merged.get(t, 0) + k
        normal = tuple(
            sorted(merged.items(), key=lambda e: (lex_key(e[0].a), lex_key(e[0].b)))
        )
        object.__setattr__(self, "tuples", normal)

    def counts(self) -> dict[int, tuple[int, int]]:
        """Per involved set: (times a middle point, times a top/bottom)."""
        out: dict[int, list[int]] = {}
        for t, k in self.tuples:
            for s in (t.a, t.b):
                out.setdefault(s, [0, 0])[0] += k
            for s in (t.top, t.bottom):
                out.setdefault(s, [0, 0])[1] += k
        return {s: (mc, tbc) for s, (mc, tbc) in out.items()}

    def involved_sets(self) -> tuple[int, ...]:
        return tuple(sorted(self.counts(), key=lex_key))

    def size(self) -> int:
        return sum(k for _, k in self.tuples)

    def _to_jsonable(self):
        return {
            "m": self.m,
            "tuples": [
                {"a": list(elements(t.a)), "b": list(elements(t.b)), "count": k}
                for t, k in self.tuples
            ],
        }


def parse_square_certificate(data, context: PartialSetFunction | None = None):
    """Load the certificate JSON ({"m":..., "tuples":[{"a":...,"b":...,
    "count":...}]}); top and bottom points are recomputed."""
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from exc
    else:
        doc = data
    if not isinstance(doc, dict) or "tuples" not in doc:
        raise MalformedDocument('certificate document needs a "tuples" array')
    m = doc.get("m", context.m if context is not None else None)
    if not isinstance(m, int):
        raise MalformedDocument('certificate document needs an integer "m"')
    tuples = []
    for entry in doc["tuples"]:
        if not isinstance(entry, dict) or "a" not in entry or "b" not in entry:
            raise MalformedDocument(f"tuple entry must have 'a' and 'b': {entry!r}")
        a = sum(1 << i for i in entry["a"])
        b = sum(1 << i for i in entry["b"])
        tuples.append((square(a, b), int(entry.get("count", 1))))
    return SquareCertificate(m, tuple(tuples), context)


def verify_square_certificate(cert: SquareCertificate, h: PartialSetFunction) -> bool:
    """Exact check of the balance and positivity properties against the
    partial function."""
    if not cert.tuples:
        return False
    defined = h.as_dict()
    counts = cert.counts()
    for s, (mc, tbc) in counts.items():
        if mc != tbc and s not in defined:
            return False  # undefined set out of balance
    total = ZERO
    for s, value in defined.items():
        mc, tbc = counts.get(s, (0, 0))
        total += value * (tbc - mc)
    return total > 0  # weighted positivity


def refuting_square(cert: SquareCertificate, assignment) -> Optional[SquareTuple]:
    """A tuple with F(A)+F(B) < F(top)+F(bottom) under the given total
    assignment on the involved sets; None when no tuple is violated."""
    for s in cert.involved_sets():
        if s not in assignment:
            raise IncompleteAssignment(
                f"assignment missing involved set {sorted(elements(s))}"
            )
    for t, _k in cert.tuples:
        if assignment[t.a] + assignment[t.b] < assignment[t.top] + assignment[t.bottom]:
            return t
    return None


# ---------------------------------------------------------------------------
# the interval-family LP


@dataclass(frozen=True)
class SubmodularResult:
    kind: str  # "extendible" | "antichain" | "not_extendible"
    values: Optional[dict[int, Rational]] = None  # on the family, when extendible
    certificate: Optional[SquareCertificate] = None
    family: tuple[int, ...] = ()

    @property
    def extendible(self) -> bool:
        return self.kind != "not_extendible"


def _family_lp(h: PartialSetFunction, fam: tuple[int, ...], *, boxes: bool):
    """LP over one variable per family set: submodularity rows for pairs
    whose union and intersection stay in the family, plus value pins
    (equality) or [f_i, alpha f_i] boxes with a minimized alpha."""
    fam_index = {s: i for i, s in enumerate(fam)}
    nf = len(fam)
    nv = nf + (1 if boxes else 0)
    names = tuple(f"w{s}" for s in fam) + (("alpha",) if boxes else ())
    cons = []
    for i, a in enumerate(fam):
        for b in fam[i + 1 :]:
            if is_subset(a, b) or is_subset(b, a):
                continue
            u, n = a | b, a & b
            if u not in fam_index or n not in fam_index:
                continue
            row = [ZERO] * nv
            row[fam_index[a]] += ONE
            row[fam_index[b]] += ONE
            row[fam_index[u]] -= ONE
            row[fam_index[n]] -= ONE
            cons.append(lp.Constraint(tuple(row), ">=", ZERO))
    for mask, value in h.points:
        row = [ZERO] * nv
        row[fam_index[mask]] = ONE
        if boxes:
            cons.append(lp.Constraint(tuple(row), ">=", value))
            row = list(row)
            row[-1] = -value
            cons.append(lp.Constraint(tuple(row), "<=", ZERO))
        else:
            cons.append(lp.Constraint(tuple(row), "=", value))
    objective = None
    lower = None
    if boxes:
        objective = ((ZERO,) * nf + (ONE,), "min")
        lower = (None,) * nf + (ONE,)
    return lp.ExactLP(names, tuple(cons), objective, lower=lower)


def extend_submodular(
    h: PartialSetFunction, cap: int = DEFAULT_CLOSURE_CAP
) -> SubmodularResult:
    """Decide submodular extendibility. Antichains extend immediately; in
    general feasibility over the interval family settles the whole cube,
    and infeasibility converts into a verified square certificate."""
    masks = h.masks
    if is_antichain(masks):
        return SubmodularResult("antichain", values=h.as_dict(), family=tuple(
            sorted(masks, key=lex_key)
        ))
    fam = interval_family(masks, cap)
    problem = _family_lp(h, fam, boxes=False)
    out = lp.solve(problem)
    if isinstance(out, lp.Feasible):
        values = {s: out.assignment[f"w{s}"] for s in fam}
        return SubmodularResult("extendible", values=values, family=fam)
    assert isinstance(out, lp.Infeasible)
    cert = extract_square_certificate(h, out.witness, problem)
    return SubmodularResult("not_extendible", certificate=cert, family=fam)


def approx_submodular(h: PartialSetFunction, cap: int = DEFAULT_CLOSURE_CAP):
    """Minimal alpha with a submodular f obeying f_i <= f(T_i) <= alpha f_i,
    via the interval-family LP with box constraints."""
    for mask, v in h.points:
        if v <= 0:
            raise ValueNotPositive(
                f"approximate submodular extension needs values > 0; "
                f"f({sorted(elements(mask))}) = {v}"
            )
    masks = h.masks
    fam = (
        tuple(sorted(masks, key=lex_key))
        if is_antichain(masks)
        else interval_family(masks, cap)
    )
    out = lp.solve(_family_lp(h, fam, boxes=True))
    assert isinstance(out, lp.Optimal), "box LP is always feasible for alpha large"
    return out.value


def extract_square_certificate(
    h: PartialSetFunction, witness: lp.FarkasWitness, problem: lp.ExactLP
) -> SquareCertificate:
    """Turn a Farkas witness of the family LP into a square certificate:
    positive multipliers on submodularity rows, scaled to integers, become
    tuple multiplicities; the pin-row multipliers supply the positive weighting implicitly."""
    if not lp.verify_farkas(problem, witness):
        raise WitnessInvalid("witness does not verify against the LP")
    var_mask = {}
    for i, name in enumerate(problem.variables):
        if name.startswith("w"):
            var_mask[i] = int(name[1:])
    pairs = []
    for row, lam in zip(problem.constraints, witness.multipliers):
        if row.relation != ">=" or row.rhs != 0 or lam == 0:
            continue
        pos = [var_mask[j] for j, c in enumerate(row.coeffs) if c == 1]
        neg = [var_mask[j] for j, c in enumerate(row.coeffs) if c == -1]
        if len(pos) != 2 or len(neg) != 2:
            continue  # not a submodularity row
        a, b = pos
        if {a | b, a & b} != set(neg):
            raise WitnessInvalid("unrecognized row pattern in the family LP")
        if lam < 0:
            raise WitnessInvalid("negative multiplier on a submodularity row")
        pairs.append(((a, b), lam))
    if not pairs:
        raise WitnessInvalid("witness places no weight on submodularity rows")
    scale = 1
    for _, lam in pairs:
        scale = scale * lam.denominator // gcd(scale, lam.denominator)
    tuples = []
    for (a, b), lam in pairs:
        count = int(lam * scale)
        if a != b:  # trivial squares are pruned from extractor output
            tuples.append((square(a, b), count))
    cert = SquareCertificate(h.m, tuple(tuples), context=h)
    if not verify_square_certificate(cert, h):
        raise WitnessInvalid("extracted certificate fails verification")
    return cert


# ---------------------------------------------------------------------------
# boolean certificates


@dataclass(frozen=True)
class Gate:
    gid: int
    op: str  # "input" | "and" | "or"
    role: str  # "ip" | "im" | "op"


@dataclass(frozen=True)
class BooleanCircuitCertificate:
    """A cyclic AND/OR circuit with a creator map, Farkas-equivalent to a
    square certificate.

    Structural invariants (validated): inputs have indegree 0 and
    outdegree 2, outputs indegree 2 and outdegree 0, intermediates 2 and
    2; the and-gates' input pairs coincide with the or-gates' input pairs
    (so every non-output gate feeds exactly one AND and one OR through the
    same sibling); creators respect the gate logic coordinatewise (each
    coordinate of the creator map is a satisfying assignment); input and
    output gates map into the defined sets; and the defined values
    weighted by (output-gate count - input-gate count) sum positive.
    """

    m: int
    gates: tuple[Gate, ...]
    edges: tuple[tuple[int, int], ...]
    creators: tuple[int, ...]
    context: Optional[PartialSetFunction] = None

    def __post_init__(self):
        object.__setattr__(self, "_in", None)
        object.__setattr__(self, "_out", None)

    def in_edges(self) -> dict[int, tuple[int, ...]]:
        if self._in is None:
            ins = {g.gid: [] for g in self.gates}
            for u, v in self.edges:
                ins[v].append(u)
            object.__setattr__(
                self, "_in", {k: tuple(v) for k, v in ins.items()}
            )
        return self._in

    def out_edges(self) -> dict[int, tuple[int, ...]]:
        if self._out is None:
            outs = {g.gid: [] for g in self.gates}
            for u, v in self.edges:
                outs[u].append(v)
            object.__setattr__(
                self, "_out", {k: tuple(v) for k, v in outs.items()}
            )
        return self._out

    def input_ids(self) -> tuple[int, ...]:
        return tuple(g.gid for g in self.gates if g.role == "ip")

    def output_ids(self) -> tuple[int, ...]:
        return tuple(g.gid for g in self.gates if g.role == "op")

    def intermediate_ids(self) -> tuple[int, ...]:
        return tuple(g.gid for g in self.gates if g.role == "im")

    def gate(self, gid: int) -> Gate:
        return self.gates[self._index[gid]]

    @property
    def _index(self) -> dict[int, int]:
        return {g.gid: i for i, g in enumerate(self.gates)}

    def targets(self, gid: int) -> tuple[int, int, int]:
        """(or-target, and-target, sibling) of a non-output gate."""
        outs = self.out_edges()[gid]
        ops = {t: self.gate(t).op for t in outs}
        or_t = next(t for t in outs if ops[t] == "or")
        and_t = next(t for t in outs if ops[t] == "and")
        ins = self.in_edges()[or_t]
        sibling = ins[0] if ins[1] == gid else ins[1]
        return or_t, and_t, sibling

    def validate(self) -> None:
        ins, outs = self.in_edges(), self.out_edges()
        ids = [g.gid for g in self.gates]
        if len(set(ids)) != len(ids):
            raise MalformedCircuit("duplicate gate ids")
        if len(self.creators) != len(self.gates):
            raise MalformedCircuit("creator map must cover every gate")
        full = (1 << self.m) - 1
        and_pairs: list[frozenset[int]] = []
        or_pairs: list[frozenset[int]] = []
        for g in self.gates:
            ind, outd = len(ins[g.gid]), len(outs[g.gid])
            if g.role == "ip":
                if g.op != "input" or ind != 0 or outd != 2:
                    raise MalformedCircuit(f"bad input gate {g.gid}")
            elif g.role == "op":
                if g.op not in ("and", "or") or ind != 2 or outd != 0:
                    raise MalformedCircuit(f"bad output gate {g.gid}")
            else:
                if g.op not in ("and", "or") or ind != 2 or outd != 2:
                    raise MalformedCircuit(f"bad intermediate gate {g.gid}")
            if g.op in ("and", "or"):
                pair = frozenset(ins[g.gid])
                if len(pair) != 2:
                    raise MalformedCircuit(f"gate {g.gid} fed twice by one gate")
                (and_pairs if g.op == "and" else or_pairs).append(pair)
        if sorted(and_pairs, key=sorted) != sorted(or_pairs, key=sorted):
            raise MalformedCircuit(
                "and-gates' input pairs must match or-gates' input pairs"
            )
        creator = dict(zip(ids, self.creators))
        for s in self.creators:
            if s & ~full:
                raise MalformedCircuit("creator outside the ground set")
        for g in self.gates:
            if g.op == "and":
                u, v = ins[g.gid]
                if creator[g.gid] != creator[u] & creator[v]:
                    raise MalformedCircuit(
                        f"creator of AND gate {g.gid} is not the intersection"
                    )
            elif g.op == "or":
                u, v = ins[g.gid]
                if creator[g.gid] != creator[u] | creator[v]:
                    raise MalformedCircuit(
                        f"creator of OR gate {g.gid} is not the union"
                    )
        if self.context is not None:
            defined = self.context.as_dict()
            for g in self.gates:
                if g.role in ("ip", "op") and creator[g.gid] not in defined:
                    raise MalformedCircuit(
                        f"gate {g.gid} (role {g.role}) maps to an undefined set"
                    )
            total = ZERO
            for mask, value in self.context.points:
                n_op = sum(
                    1
                    for g in self.gates
                    if g.role == "op" and creator[g.gid] == mask
                )
                n_ip = sum(
                    1
                    for g in self.gates
                    if g.role == "ip" and creator[g.gid] == mask
                )
                total += value * (n_op - n_ip)
            if not total > 0:
                raise MalformedCircuit("defined-value weighting is not positive")


def square_to_boolean(cert: SquareCertificate) -> BooleanCircuitCertificate:
    """Per tuple: two input gates, an output OR (creator = union), an
    output AND (creator = intersection), inputs wired to both outputs;
    then same-creator (input, output) pairs merge into intermediate gates,
    lexicographically smallest creator and earliest-created gates first.

    Trivial and comparable squares contribute equally to middle and
    top/bottom counts, so they are dropped before conversion (they would
    merge into self-loops)."""
    h = cert.context
    if h is None:
        raise WitnessInvalid("certificate carries no partial-function context")
    if not verify_square_certificate(cert, h):
        raise WitnessInvalid("certificate does not verify")

    nxt = 0
    op_of: dict[int, str] = {}
    creator: dict[int, int] = {}
    is_input: dict[int, bool] = {}
    ins: dict[int, list[int]] = {}
    outs: dict[int, list[int]] = {}

    def new_gate(op, c, srcs):
        nonlocal nxt
        gid = nxt
        nxt += 1
        op_of[gid] = op
        creator[gid] = c
        is_input[gid] = op == "input"
        ins[gid] = list(srcs)
        outs[gid] = []
        for s in srcs:
            outs[s].append(gid)
        return gid

    for t, k in cert.tuples:
        if t.a == t.b or is_subset(t.a, t.b) or is_subset(t.b, t.a):
            continue
        for _ in range(k):
            g1 = new_gate("input", t.a, ())
            g2 = new_gate("input", t.b, ())
            new_gate("or", t.top, (g1, g2))
            new_gate("and", t.bottom, (g1, g2))
    if not op_of:
        raise MergeStuck("certificate holds only trivial or comparable squares")

    alive = set(op_of)

    def mergeable():
        by_creator: dict[int, tuple[list[int], list[int]]] = {}
        for gid in alive:
            entry = by_creator.setdefault(creator[gid], ([], []))
            if is_input[gid]:
                entry[0].append(gid)
            elif not outs[gid]:
                entry[1].append(gid)
        cands = {c: e for c, e in by_creator.items() if e[0] and e[1]}
        if not cands:
            return None
        c = min(cands, key=lex_key)
        inputs_c, outputs_c = cands[c]
        return min(inputs_c), min(outputs_c)

    while True:
        pair = mergeable()
        if pair is None:
            break
        g_in, g_out = pair
        g3 = new_gate(op_of[g_out], creator[g_in], ())
        ins[g3] = list(ins[g_out])
        outs[g3] = list(outs[g_in])
        for u in ins[g3]:
            outs[u] = [g3 if x == g_out else x for x in outs[u]]
        for v in outs[g3]:
            ins[v] = [g3 if x == g_in else x for x in ins[v]]
        alive.discard(g_in)
        alive.discard(g_out)
        alive.add(g3)

    defined = set(h.masks)
    for gid in alive:
        terminal = is_input[gid] or not outs[gid]
        if terminal and creator[gid] not in defined:
            raise MergeStuck(
                f"unmergeable terminal gate maps to undefined set "
                f"{sorted(elements(creator[gid]))}"
            )

    # reindex in the canonical order: inputs, then outputs, then intermediates
    inputs_l = sorted(g for g in alive if is_input[g])
    outputs_l = sorted(g for g in alive if not is_input[g] and not outs[g])
    inters_l = sorted(g for g in alive if not is_input[g] and outs[g])
    order = inputs_l + outputs_l + inters_l
    remap = {old: new for new, old in enumerate(order)}
    gates = []
    for old in order:
        role = "ip" if is_input[old] else ("op" if not outs[old] else "im")
        gates.append(Gate(remap[old], op_of[old], role))
    edges = tuple(
        sorted((remap[u], remap[v]) for u in alive for v in outs[u])
    )
    creators = tuple(creator[old] for old in order)
    bc = BooleanCircuitCertificate(cert.m, tuple(gates), edges, creators, h)
    bc.validate()
    return bc


def boolean_to_square(bc: BooleanCircuitCertificate) -> SquareCertificate:
    """Split every intermediate gate into an input/output pair, then read
    one square off each OR/AND component."""
    bc.validate()
    ins = {g: list(v) for g, v in bc.in_edges().items()}
    outs = {g: list(v) for g, v in bc.out_edges().items()}
    op_of = {g.gid: g.op for g in bc.gates}
    creator = dict(zip((g.gid for g in bc.gates), bc.creators))
    is_input = {g.gid: g.role == "ip" for g in bc.gates}
    nxt = max(op_of) + 1 if op_of else 0

    for g in [g.gid for g in bc.gates if bc.gate(g.gid).role == "im"]:
        gin = nxt
        nxt += 1
        op_of[gin] = "input"
        creator[gin] = creator[g]
        is_input[gin] = True
        ins[gin] = []
        outs[gin] = outs[g]
        for v in outs[g]:
            ins[v] = [gin if x == g else x for x in ins[v]]
        outs[g] = []
        is_input[g] = False  # g keeps its op and becomes an output gate

    pair_gates: dict[frozenset[int], dict[str, int]] = {}
    for g, op in op_of.items():
        if op == "input":
            continue
        srcs = frozenset(ins[g])
        if len(srcs) != 2:
            raise MalformedCircuit("output gate without two distinct feeders")
        pair_gates.setdefault(srcs, {})[op] = g
    tuples: list[tuple[SquareTuple, int]] = []
    for srcs, by_op in pair_gates.items():
        if set(by_op) != {"and", "or"}:
            raise MalformedCircuit("input pair lacks its AND/OR partner")
        u, v = sorted(srcs)
        sq = square(creator[u], creator[v])
        if creator[by_op["or"]] != sq.top or creator[by_op["and"]] != sq.bottom:
            raise MalformedCircuit("component creators violate the set algebra")
        tuples.append((sq, 1))
    cert = SquareCertificate(bc.m, tuple(tuples), bc.context)
    if bc.context is not None and not verify_square_certificate(cert, bc.context):
        raise MalformedCircuit("converted certificate does not verify")
    return cert


# ---------------------------------------------------------------------------
# fixing


@dataclass(frozen=True)
class FixReport:
    """Per-gate result of the fixing walk; fixed gates carry a proof tree.

    A proof is a nested tuple: ("leaf", gate, bit) at input gates,
    ("one", gate, bit, child) for single-child steps, and
    ("two", gate, bit, left, right) for two-child steps. A gate may label
    several nodes when subproofs are shared; each tree edge is a circuit
    edge directed toward the root.
    """

    fixed: dict[int, tuple[int, tuple]]
    unfixed: frozenset[int]

    def bit(self, gid: int) -> Optional[int]:
        entry = self.fixed.get(gid)
        return entry[0] if entry else None


def fixing_algorithm(bc: BooleanCircuitCertificate, inputs) -> FixReport:
    """The deterministic fixing walk: from each input gate in order, push
    forced values through the paired OR/AND targets until an output gate
    is reached. Every output gate ends up fixed.

    The walk discovers a subset of the gates that are fixed in the
    proof-tree sense; a saturation pass afterwards closes the report under
    the derivation rules, so Fixed/Unfixed reflects fixedness itself (this
    is what makes the fixed-functions assignment monotone in the inputs).
    """
    ips = bc.input_ids()
    if len(inputs) != len(ips):
        raise IncompleteAssignment(
            f"{len(inputs)} input bits for {len(ips)} input gates"
        )
    if any(b not in (0, 1) for b in inputs):
        raise IncompleteAssignment("input bits must be 0 or 1")
    val: dict[int, int] = {}
    proof: dict[int, tuple] = {}
    roles = {g.gid: g.role for g in bc.gates}
    for x, bit in zip(ips, inputs):
        val[x] = bit
        proof[x] = ("leaf", x, bit)
        cg = x
        while roles[cg] != "op":
            g_or, g_and, sib = bc.targets(cg)
            vor, vand = val.get(g_or), val.get(g_and)
            b = val[cg]
            if vor is not None and vand is not None:
                raise InvariantBroken(
                    "both paired targets already valued; certificate invalid"
                )
            if vor is not None:
                # the OR got its value without cg, so the sibling is fixed to 1
                if val.get(sib) != 1:
                    raise InvariantBroken("sibling of a valued OR is not fixed to 1")
                proof[g_and] = (
                    ("two", g_and, 1, proof[cg], proof[sib])
                    if b == 1
                    else ("one", g_and, 0, proof[cg])
                )
                val[g_and] = b
                cg = g_and
            elif vand is not None:
                if val.get(sib) != 0:
                    raise InvariantBroken("sibling of a valued AND is not fixed to 0")
                proof[g_or] = (
                    ("two", g_or, 0, proof[cg], proof[sib])
                    if b == 0
                    else ("one", g_or, 1, proof[cg])
                )
                val[g_or] = b
                cg = g_or
            elif b == 0:
                val[g_and] = 0
                proof[g_and] = ("one", g_and, 0, proof[cg])
                cg = g_and
            else:
                val[g_or] = 1
                proof[g_or] = ("one", g_or, 1, proof[cg])
                cg = g_or
    assert all(o in val for o in bc.output_ids()), "every output gate must be fixed"

    # saturate: close the walk's fixes under the one-child/two-child rules
    ins = bc.in_edges()
    logic = [g for g in bc.gates if g.op != "input"]
    changed = True
    while changed:
        changed = False
        for g in logic:
            if g.gid in val:
                continue
            u, v = ins[g.gid]
            bu, bv = val.get(u), val.get(v)
            if g.op == "and":
                if bu == 0 or bv == 0:
                    child = u if bu == 0 else v
                    val[g.gid] = 0
                    proof[g.gid] = ("one", g.gid, 0, proof[child])
                elif bu == 1 and bv == 1:
                    val[g.gid] = 1
                    proof[g.gid] = ("two", g.gid, 1, proof[u], proof[v])
            else:
                if bu == 1 or bv == 1:
                    child = u if bu == 1 else v
                    val[g.gid] = 1
                    proof[g.gid] = ("one", g.gid, 1, proof[child])
                elif bu == 0 and bv == 0:
                    val[g.gid] = 0
                    proof[g.gid] = ("two", g.gid, 0, proof[u], proof[v])
            if g.gid in val:
                changed = True

    fixed = {g: (val[g], proof[g]) for g in val}
    unfixed = frozenset(g.gid for g in bc.gates if g.gid not in val)
    report = FixReport(fixed, unfixed)
    for gid, (bit, prf) in report.fixed.items():
        validate_proof(bc, inputs, gid, bit, prf)
    return report


def validate_proof(bc, inputs, gid, bit, prf) -> None:
    """Check a proof tree against the fixing definition: leaf values match
    the input assignment, one-child steps are AND-0 or OR-1, two-child
    steps are AND-1 or OR-0, and every tree edge is a circuit edge."""
    ips = bc.input_ids()
    given = dict(zip(ips, inputs))
    ins = bc.in_edges()
    ops = {g.gid: g.op for g in bc.gates}

    def walk(node):
        kind = node[0]
        g, b = node[1], node[2]
        if kind == "leaf":
            if ops[g] != "input" or given.get(g) != b:
                raise InvariantBroken(f"bad leaf at gate {g}")
            return g, b
        if kind == "one":
            cg, cb = walk(node[3])
            if cg not in ins[g]:
                raise InvariantBroken(f"proof edge {cg}->{g} is not a circuit edge")
            ok = (ops[g] == "and" and b == cb == 0) or (
                ops[g] == "or" and b == cb == 1
            )
            if not ok:
                raise InvariantBroken(f"one-child rule violated at gate {g}")
            return g, b
        if kind == "two":
            lg, lb = walk(node[3])
            rg, rb = walk(node[4])
            if {lg, rg} != set(ins[g]):
                raise InvariantBroken(f"children of {g} are not its circuit inputs")
            ok = (ops[g] == "and" and b == lb == rb == 1) or (
                ops[g] == "or" and b == lb == rb == 0
            )
            if not ok:
                raise InvariantBroken(f"two-child rule violated at gate {g}")
            return g, b
        raise InvariantBroken(f"unknown proof node {kind!r}")

    rg, rb = walk(prf)
    if rg != gid or rb != bit:
        raise InvariantBroken("proof root does not match the fixed gate")


def fixed_functions_assignment(bc: BooleanCircuitCertificate, inputs) -> dict[int, int]:
    """Fixed gates take their fixed bit, unfixed gates take 1; always a
    satisfying assignment of the circuit."""
    report = fixing_algorithm(bc, inputs)
    out = {}
    for g in bc.gates:
        bit = report.bit(g.gid)
        out[g.gid] = 1 if bit is None else bit
    return out


def is_satisfying(bc: BooleanCircuitCertificate, assignment: dict[int, int]) -> bool:
    ins = bc.in_edges()
    for g in bc.gates:
        if g.op == "and":
            u, v = ins[g.gid]
            if assignment[g.gid] != (assignment[u] & assignment[v]):
                return False
        elif g.op == "or":
            u, v = ins[g.gid]
            if assignment[g.gid] != (assignment[u] | assignment[v]):
                return False
    return True


# ---------------------------------------------------------------------------
# lattice rewriting


def lattice_rewrite(cert: SquareCertificate, h: PartialSetFunction) -> SquareCertificate:
    """Rewrite a certificate so every involved set lives in the lattice
    closure (indeed in the interval family) of the defined sets: convert
    to a boolean certificate, replace each creator by the bits the fixing
    walk forces coordinatewise (unfixed gates take 1), convert back."""
    if cert.context is None:
        cert = SquareCertificate(cert.m, cert.tuples, h)
    if not verify_square_certificate(cert, h):
        raise WitnessInvalid("certificate does not verify")
    bc = square_to_boolean(cert)
    ips = bc.input_ids()
    new_creator = {g.gid: 0 for g in bc.gates}
    creator = dict(zip((g.gid for g in bc.gates), bc.creators))
    for i in range(bc.m):
        bits = fixed_functions_assignment(
            bc, tuple((creator[x] >> i) & 1 for x in ips)
        )
        for gid, b in bits.items():
            if b:
                new_creator[gid] |= 1 << i
    for g in bc.gates:
        if g.role in ("ip", "op"):
            assert new_creator[g.gid] == creator[g.gid], (
                "rewrite must not move defined-set gates"
            )
    bc2 = BooleanCircuitCertificate(
        bc.m,
        bc.gates,
        bc.edges,
        tuple(new_creator[g.gid] for g in bc.gates),
        h,
    )
    bc2.validate()
    return boolean_to_square(bc2)

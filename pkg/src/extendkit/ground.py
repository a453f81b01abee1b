"""Exact arithmetic, subset algebra, partial-function containers, and the
JSON interchange format shared by every solver in the package.

Rationals are gmpy2.mpq values (stdlib Fraction is the drop-in fallback):
always in lowest terms, positive denominator, exact field arithmetic.
Subsets of {0,...,m-1} are plain int bitmasks; Python ints are
arbitrary-precision, so the same representation covers m <= 63 and beyond
at O(m/word) per operation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    DuplicatePoint,
    IndexOutOfRange,
    MalformedDocument,
    MalformedRational,
    NegativeValueForClass,
)

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rational

ZERO = Rational(0)
ONE = Rational(1)

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")

# Classes whose codomain is the nonnegative rationals.
NONNEGATIVE_CLASSES = frozenset({"subadditive", "subadditive-nonmonotone", "xos"})


def rational(num, den=1) -> Rational:
    return Rational(num, den)


def parse_rational(text: str) -> Rational:
    """Parse "p" or "p/q" with decimal integer p and positive integer q."""
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise MalformedRational(f"not a rational literal: {text!r}")
    if "/" in text:
        p, q = text.split("/")
        if int(q) == 0:
            raise MalformedRational(f"zero denominator: {text!r}")
        return Rational(int(p), int(q))
    return Rational(int(text))


def format_rational(value) -> str:
    """Canonical "p" or "p/q" form, always in lowest terms."""
    value = Rational(value)
    return str(value)


# ---------------------------------------------------------------------------
# subset algebra on int bitmasks


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def elements(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return mask.bit_count()


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def submasks(mask: int) -> list[int]:
    """All submasks of mask, ascending by the standard subset enumeration."""
    subs = []
    s = 0
    while True:
        subs.append(s)
        if s == mask:
            return subs
        s = (s - mask) & mask


def lex_key(mask: int) -> tuple[int, ...]:
    """Sort key giving lexicographic order of the sorted element tuples."""
    return elements(mask)


# ---------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class PartialSetFunction:
    """Finitely many (subset, value) pairs over the ground set {0,...,m-1}."""

    m: int
    points: tuple[tuple[int, Rational], ...]

    def __post_init__(self):
        if self.m <= 0:
            raise MalformedDocument(f"ground-set size must be positive, got {self.m}")
        full = (1 << self.m) - 1
        seen = set()
        for mask, _value in self.points:
            if mask & ~full:
                raise IndexOutOfRange(
                    f"set {sorted(elements(mask))} has elements outside [0,{self.m})"
                )
            if mask in seen:
                raise DuplicatePoint(f"set {sorted(elements(mask))} defined twice")
            seen.add(mask)
        # canonical point order, so equal functions compare equal
        object.__setattr__(
            self,
            "points",
            tuple(sorted(self.points, key=lambda p: lex_key(p[0]))),
        )

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask for mask, _ in self.points)

    def value_at(self, mask: int) -> Rational:
        for pm, v in self.points:
            if pm == mask:
                return v
        raise KeyError(f"undefined point {sorted(elements(mask))}")

    def as_dict(self) -> dict[int, Rational]:
        return {mask: v for mask, v in self.points}

    def require_nonnegative(self, klass: str = "subadditive") -> None:
        for mask, v in self.points:
            if v < 0:
                raise NegativeValueForClass(
                    f"class {klass!r} requires values >= 0; "
                    f"f({sorted(elements(mask))}) = {format_rational(v)}"
                )

    def scaled(self, factor: Rational) -> "PartialSetFunction":
        factor = Rational(factor)
        return PartialSetFunction(
            self.m, tuple((mask, v * factor) for mask, v in self.points)
        )


@dataclass(frozen=True)
class ConvexPartialFunction:
    """Finitely many (vector, value) pairs with vectors in Q^m."""

    m: int
    points: tuple[tuple[tuple[Rational, ...], Rational], ...]

    def __post_init__(self):
        if self.m <= 0:
            raise MalformedDocument(f"dimension must be positive, got {self.m}")
        seen = set()
        for vec, _value in self.points:
            if len(vec) != self.m:
                raise MalformedDocument(
                    f"point {vec} has dimension {len(vec)}, expected {self.m}"
                )
            if vec in seen:
                raise DuplicatePoint(f"point {vec} defined twice")
            seen.add(vec)
        object.__setattr__(self, "points", tuple(sorted(self.points)))

    @property
    def vectors(self) -> tuple[tuple[Rational, ...], ...]:
        return tuple(vec for vec, _ in self.points)

    @property
    def values(self) -> tuple[Rational, ...]:
        return tuple(v for _, v in self.points)


# ---------------------------------------------------------------------------
# JSON interchange


def _parse_set_array(arr, m: int) -> int:
    if not isinstance(arr, list) or not all(isinstance(i, int) for i in arr):
        raise MalformedDocument(f"set must be an array of integers: {arr!r}")
    if any(b <= a for a, b in zip(arr, arr[1:])):
        raise MalformedDocument(f"set indices must be strictly increasing: {arr!r}")
    if arr and (arr[0] < 0 or arr[-1] >= m):
        raise IndexOutOfRange(f"set {arr!r} has elements outside [0,{m})")
    return mask_of(arr)


def parse_partial_function(data, klass: str | None = None):
    """Parse the JSON interchange document into a PartialSetFunction or
    ConvexPartialFunction (dispatching on the "m" / "dim" key).

    When ``klass`` names a nonnegative class the values are checked here,
    at parse time.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"invalid JSON: {exc}") from exc
    else:
        doc = data
    if not isinstance(doc, dict):
        raise MalformedDocument("top-level JSON value must be an object")

    if "m" in doc:
        m = doc["m"]
        if not isinstance(m, int):
            raise MalformedDocument(f'"m" must be an integer, got {m!r}')
        pts = doc.get("points")
        if not isinstance(pts, list):
            raise MalformedDocument('"points" must be an array')
        points = []
        for entry in pts:
            if not isinstance(entry, dict) or "set" not in entry or "value" not in entry:
                raise MalformedDocument(f"point must have 'set' and 'value': {entry!r}")
            mask = _parse_set_array(entry["set"], m if isinstance(m, int) else 0)
            points.append((mask, parse_rational(entry["value"])))
        psf = PartialSetFunction(m, tuple(points))
        if klass in NONNEGATIVE_CLASSES:
            psf.require_nonnegative(klass)
        return psf

    if "dim" in doc:
        m = doc["dim"]
        if not isinstance(m, int):
            raise MalformedDocument(f'"dim" must be an integer, got {m!r}')
        pts = doc.get("points")
        if not isinstance(pts, list):
            raise MalformedDocument('"points" must be an array')
        points = []
        for entry in pts:
            if not isinstance(entry, dict) or "x" not in entry or "value" not in entry:
                raise MalformedDocument(f"point must have 'x' and 'value': {entry!r}")
            x = entry["x"]
            if not isinstance(x, list):
                raise MalformedDocument(f"'x' must be an array of rationals: {x!r}")
            vec = tuple(parse_rational(c) for c in x)
            points.append((vec, parse_rational(entry["value"])))
        return ConvexPartialFunction(m, tuple(points))

    raise MalformedDocument('document must carry "m" (set function) or "dim" (convex)')


def to_jsonable(obj):
    """Convert a domain object to plain JSON-ready data.

    Set functions, convex partial functions, rationals, and masks are
    handled here; richer objects (certificates, witnesses, reports)
    register their own converters by defining ``_to_jsonable``.
    """
    if hasattr(obj, "_to_jsonable"):
        return obj._to_jsonable()
    if isinstance(obj, PartialSetFunction):
        return {
            "m": obj.m,
            "points": [
                {"set": list(elements(mask)), "value": format_rational(v)}
                for mask, v in sorted(obj.points, key=lambda p: lex_key(p[0]))
            ],
        }
    if isinstance(obj, ConvexPartialFunction):
        return {
            "dim": obj.m,
            "points": [
                {"x": [format_rational(c) for c in vec], "value": format_rational(v)}
                for vec, v in obj.points
            ],
        }
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    # rationals (mpq or Fraction) land here
    return format_rational(obj)


def serialize(obj) -> str:
    """Canonical UTF-8 JSON for any domain object; parse(serialize(x)) == x."""
    return json.dumps(to_jsonable(obj), separators=(",", ":"), sort_keys=False)

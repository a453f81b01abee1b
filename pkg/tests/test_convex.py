"""Convex roofs, extension, factor, dual vertices, canonical extension."""

import random

import pytest

from extendkit import convex as cx
from extendkit.errors import DegenerateHull, ValueNotPositive
from extendkit.ground import ConvexPartialFunction, Rational as Q


def cpf(m, *pairs):
    return ConvexPartialFunction(
        m, tuple((tuple(Q(c) for c in vec), Q(v)) for vec, v in pairs)
    )


LINE = cpf(1, ((0,), 0), ((2,), 2))
KINK = cpf(1, ((0,), 0), ((1,), 2), ((2,), 2))


def test_affine_dimension():
    assert cx.affine_dimension([(0, 0), (1, 0), (0, 1)]) == 2
    assert cx.affine_dimension([(0, 0), (1, 1), (2, 2)]) == 1
    assert cx.affine_dimension([(3, 4)]) == 0


def test_roof_midpoint():
    assert cx.roof_value(LINE, (Q(1),)) == 1


def test_roof_beats_middle_point():
    assert cx.roof_value(KINK, (Q(1),)) == 1


def test_roof_outside_hull():
    assert cx.roof_value(KINK, (Q(3),)) is None
    assert cx.roof_value(KINK, (Q(-1),)) is None


def test_extend_linear():
    assert cx.extend_convex(cpf(1, ((0,), 0), ((1,), 1), ((2,), 2))) is None


def test_extend_kink_violation():
    out = cx.extend_convex(KINK)
    assert out is not None
    assert out.point == (Q(1),) and out.roof == 1 and out.value == 2


def test_two_points_always_extend():
    rng = random.Random(3)
    for _ in range(20):
        a, b = sorted(rng.sample(range(-5, 6), 2))
        h = cpf(1, ((a,), rng.randint(-5, 5)), ((b,), rng.randint(-5, 5)))
        assert cx.extend_convex(h) is None


def test_approx_extendible_is_one():
    assert cx.approx_convex(cpf(1, ((0,), 1), ((1,), 1), ((2,), 1))) == 1


def test_approx_kink():
    h = cpf(1, ((0,), 1), ((1,), 2), ((2,), 2))
    assert cx.approx_convex(h, audit=True) == Q(4, 3)
    doubled = cpf(1, ((0,), 2), ((1,), 4), ((2,), 4))
    assert cx.approx_convex(doubled) == Q(4, 3)


def test_approx_requires_positive():
    with pytest.raises(ValueNotPositive):
        cx.approx_convex(cpf(1, ((0,), 0), ((1,), 1)))


def test_dual_vertices_segment():
    verts = cx.enumerate_dual_vertices(cpf(1, ((0,), 0), ((1,), 1)))
    assert len(verts) == 1
    assert verts[0].y == (Q(1),) and verts[0].mu == 0


def test_dual_vertices_kink_value_zero_two_two():
    # constraints mu<=0, y+mu<=2, 2y+mu<=2: the only feasible tight pair
    # is rows {1,3}, the vertex (y,mu)=(1,0)
    verts = cx.enumerate_dual_vertices(cpf(1, ((0,), 0), ((1,), 2), ((2,), 2)))
    assert [(v.y, v.mu) for v in verts] == [((Q(1),), Q(0))]


def test_dual_vertices_degenerate():
    with pytest.raises(DegenerateHull):
        cx.enumerate_dual_vertices(cpf(2, ((0, 0), 0), ((1, 1), 1), ((2, 2), 2)))


def test_eval_tilde_outside_segment():
    value, _ = cx.eval_tilde(cpf(1, ((0,), 0), ((1,), 1)), (Q(2),))
    assert value == 2


def test_eval_tilde_kink_exterior():
    h = cpf(1, ((0,), 0), ((1,), 2), ((2,), 2))
    value, _ = cx.eval_tilde(h, (Q(3),))
    assert value == 3  # single dual vertex (1,0)


def test_eval_tilde_equals_roof_inside():
    h = cpf(1, ((0,), 1), ((1,), 2), ((2,), 2))
    rng = random.Random(9)
    for _ in range(25):
        x = (Q(rng.randint(0, 8), 4),)
        tilde, _ = cx.eval_tilde(h, x)
        assert tilde == cx.roof_value(h, x)


def test_roof_convex_along_segments():
    h = cpf(2, ((0, 0), 0), ((2, 0), 3), ((0, 2), 1), ((2, 2), 5), ((1, 1), 7))
    rng = random.Random(13)
    for _ in range(15):
        x1 = (Q(rng.randint(0, 8), 4), Q(rng.randint(0, 8), 4))
        x2 = (Q(rng.randint(0, 8), 4), Q(rng.randint(0, 8), 4))
        g1, g2 = cx.roof_value(h, x1), cx.roof_value(h, x2)
        if g1 is None or g2 is None:
            continue
        for t in (Q(1, 4), Q(1, 2), Q(3, 4)):
            mid = tuple(t * a + (1 - t) * b for a, b in zip(x1, x2))
            gm = cx.roof_value(h, mid)
            assert gm is not None and gm <= t * g1 + (1 - t) * g2


def test_maximality_inside_hull():
    """Any max of supporting affine functions below the data stays below
    the roof at interior points."""
    h = cpf(2, ((0, 0), 1), ((2, 0), 3), ((0, 2), 2), ((2, 2), 5))
    rng = random.Random(21)
    planes = []
    for _ in range(12):
        y = (Q(rng.randint(-4, 4), 2), Q(rng.randint(-4, 4), 2))
        mu = min(
            v - (y[0] * vec[0] + y[1] * vec[1]) for vec, v in h.points
        )
        planes.append((y, mu))
    for _ in range(25):
        x = (Q(rng.randint(0, 8), 4), Q(rng.randint(0, 8), 4))
        roof = cx.roof_value(h, x)
        if roof is None:
            continue
        g = max(y[0] * x[0] + y[1] * x[1] + mu for y, mu in planes)
        assert g <= roof


def test_bisection_matches_closed_form():
    rng = random.Random(37)
    for _ in range(10):
        pts = [(Q(i), Q(rng.randint(1, 9), rng.randint(1, 3))) for i in range(4)]
        h = ConvexPartialFunction(1, tuple(((p,), v) for p, v in pts))
        alpha = cx.approx_convex(h)
        lo, hi = cx.bisect_approx_convex(h, Q(1, 2**40))
        assert lo <= alpha <= hi and hi - lo <= Q(1, 2**40)

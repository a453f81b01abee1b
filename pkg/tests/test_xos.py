"""XOS roof LPs, extension decision, and optimal factor."""

import random

import pytest

from extendkit import xos
from extendkit.errors import UnattainableFactor, ValueNotPositive
from extendkit.ground import PartialSetFunction, Rational as Q, mask_of


def psf(m, *pairs):
    return PartialSetFunction(m, tuple((mask_of(s), Q(v)) for s, v in pairs))


GADGET = psf(3, ([0, 1], 2), ([1, 2], 2), ([0, 2], 2), ([0, 1, 2], Q(7, 2)))


def test_roof_two_singletons():
    h = psf(2, ([0], 1), ([1], 1))
    value, _ = xos.eval_xos_roof(h, 0b11)
    assert value == 2


def test_roof_symmetric_half_weights():
    h = psf(3, ([0, 1], 2), ([1, 2], 2), ([0, 2], 2))
    value, weights = xos.eval_xos_roof(h, 0b111)
    assert value == 3
    total = sum((w for _, w in weights), Q(0))
    assert total == Q(3, 2)


def test_roof_uncoverable():
    h = psf(2, ([0], 1))
    assert xos.eval_xos_roof(h, 0b10) is None


def test_extend_linear_function():
    h = psf(2, ([0], 1), ([1], 2), ([0, 1], 3))
    out = xos.extend_xos(h)
    assert isinstance(out, xos.XosExtendible)
    assert out.evaluate(0b01) == 1 and out.evaluate(0b10) == 2 and out.evaluate(0b11) == 3


def test_extend_gadget_not_extendible():
    out = xos.extend_xos(GADGET)
    assert isinstance(out, xos.XosNotExtendible)
    assert out.target == 0b111
    cost = sum((w * GADGET.value_at(mask) for mask, w in out.weights), Q(0))
    assert cost == 3  # weights 1/2 each
    assert out.check(GADGET)


def test_extend_gadget_with_smaller_top_value():
    h = psf(3, ([0, 1], 2), ([1, 2], 2), ([0, 2], 2), ([0, 1, 2], 3))
    out = xos.extend_xos(h)
    assert isinstance(out, xos.XosExtendible)
    assert out.check(h)


def test_extendible_reconstruction_is_exact_and_monotone():
    rng = random.Random(11)
    found = 0
    while found < 20:
        masks = rng.sample(range(1, 16), rng.randint(2, 5))
        h = PartialSetFunction(
            4, tuple((s, Q(rng.randint(0, 12), rng.randint(1, 3))) for s in masks)
        )
        out = xos.extend_xos(h)
        if not isinstance(out, xos.XosExtendible):
            continue
        found += 1
        assert out.check(h)
        for mask in range(16):  # monotone nonnegative by construction
            assert out.evaluate(mask) >= 0
            for e in range(4):
                if not mask >> e & 1:
                    assert out.evaluate(mask | 1 << e) >= out.evaluate(mask)


def test_empty_set_values():
    assert isinstance(xos.extend_xos(psf(2, ([], 0), ([0], 1))), xos.XosExtendible)
    out = xos.extend_xos(psf(2, ([], 1), ([0], 1)))
    assert isinstance(out, xos.XosNotExtendible)
    assert out.target == 0 and out.weights == ()


def test_approx_extendible_is_one():
    alpha, _ = xos.approx_xos(psf(2, ([0], 1), ([1], 2), ([0, 1], 3)))
    assert alpha == 1


def test_approx_gadget():
    alpha, vectors = xos.approx_xos(GADGET)
    assert alpha == Q(7, 6)
    assert len(vectors) == 4 and all(len(w) == 3 for w in vectors)


def test_approx_matches_roof_ratio():
    rng = random.Random(23)
    for _ in range(40):
        masks = rng.sample(range(1, 16), rng.randint(2, 5))
        h = PartialSetFunction(
            4, tuple((s, Q(rng.randint(1, 12), rng.randint(1, 3))) for s in masks)
        )
        alpha, _ = xos.approx_xos(h)
        best = Q(1)
        for mask, value in h.points:
            roof, _ = xos.eval_xos_roof(h, mask)
            if value / roof > best:
                best = value / roof
        assert alpha == best


def test_approx_errors():
    with pytest.raises(ValueNotPositive):
        xos.approx_xos(psf(2, ([0], 0), ([1], 1)))
    with pytest.raises(UnattainableFactor):
        xos.approx_xos(psf(2, ([], 1), ([0], 1)))


def test_xos_extendible_implies_subadditive_extendible():
    from extendkit import subadditive as sub

    rng = random.Random(29)
    for _ in range(60):
        masks = rng.sample(range(1, 16), rng.randint(2, 5))
        h = PartialSetFunction(
            4, tuple((s, Q(rng.randint(0, 10), rng.randint(1, 3))) for s in masks)
        )
        if isinstance(xos.extend_xos(h), xos.XosExtendible):
            assert isinstance(
                sub.extend_monotone_subadditive(h), sub.Extendible
            )

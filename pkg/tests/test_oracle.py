"""Full-domain LP oracles, distance-to-class, and generators."""

import random

import pytest

from extendkit import oracle as orc
from extendkit import submodular as sm
from extendkit.errors import TooLarge
from extendkit.ground import PartialSetFunction, Rational as Q, mask_of, serialize


def psf(m, *pairs):
    return PartialSetFunction(m, tuple((mask_of(s), Q(v)) for s, v in pairs))


CUBE_VIOLATION = psf(2, ([], 0), ([0], 0), ([1], 0), ([0, 1], 1))


def test_full_domain_submodular_cube():
    assert not orc.full_domain_extend(CUBE_VIOLATION, "submodular")
    ok = psf(2, ([], 0), ([0], 1), ([1], 1), ([0, 1], 1))
    assert orc.full_domain_extend(ok, "submodular")


def test_full_domain_monotone_subadditive_cube():
    assert not orc.full_domain_extend(CUBE_VIOLATION, "monotone-subadditive")


def test_full_domain_antichain_submodular_random_values():
    rng = random.Random(51)
    fam = orc.random_antichain(3, 3, rng)
    for _ in range(100):
        h = PartialSetFunction(
            3, tuple((s, orc.random_rational(rng, -10, 10)) for s in fam)
        )
        assert orc.full_domain_extend(h, "submodular")


def test_full_domain_too_large():
    h = psf(6, ([0], 1))
    with pytest.raises(TooLarge):
        orc.full_domain_extend(h, "submodular")
    h5 = psf(5, ([0], 1))
    with pytest.raises(TooLarge):
        orc.full_domain_extend(h5, "monotone-subadditive")


def test_full_domain_negative_values_for_nonnegative_class():
    h = psf(2, ([0], -1))
    assert not orc.full_domain_extend(h, "monotone-subadditive")
    assert not orc.full_domain_extend(h, "xos")


def test_distance_in_class_table():
    table = orc.FullTable(2, (Q(0), Q(1), Q(1), Q(2)))
    assert orc.distance_to_class(table, "monotone-subadditive") == 0
    assert orc.distance_to_class(table, "submodular") == 0


def test_distance_one_repair():
    table = orc.FullTable(2, (Q(0), Q(0), Q(0), Q(1)))
    assert orc.distance_to_class(table, "monotone-subadditive") == Q(1, 4)


def test_distance_two_disjoint_violations():
    # f == 1 except two boosted triples; each needs its own repair
    m = 4
    values = [Q(1)] * 16
    values[0] = Q(0)
    values[mask_of([0, 1, 2])] = Q(4)
    values[mask_of([0, 1, 3])] = Q(4)
    table = orc.FullTable(m, tuple(values))
    assert orc.distance_to_class(table, "monotone-subadditive") == Q(2, 16)


def test_table_roundtrip():
    table = orc.FullTable(2, (Q(0), Q(1, 2), Q(1), Q(2)))
    assert orc.parse_full_table(serialize(table)) == table


def test_random_antichain_is_antichain():
    rng = random.Random(77)
    for _ in range(50):
        fam = orc.random_antichain(6, 10, rng)
        assert len(fam) == 10 and sm.is_antichain(fam)


def test_random_partial_function_ranges():
    rng = random.Random(88)
    for _ in range(50):
        h = orc.random_partial_function(4, 6, (0, 10), rng)
        assert len(h.points) == 6
        assert all(0 <= v <= 10 for _, v in h.points)
        hp = orc.random_partial_function(4, 6, (0, 10), rng, positive=True)
        assert all(v > 0 for _, v in hp.points)


def test_random_square_certificates_verify():
    rng = random.Random(99)
    for _ in range(100):
        cert, h = orc.random_valid_square_certificate(rng.randint(2, 5), rng)
        assert sm.verify_square_certificate(cert, h)


def test_oracle_agrees_with_cover_characterization_smoke():
    from extendkit import subadditive as sub

    rng = random.Random(123)
    for _ in range(60):
        m = rng.randint(2, 4)
        n = rng.randint(1, min(6, (1 << m) - 1))
        h = orc.random_partial_function(m, n, (0, 6), rng)
        fast = isinstance(sub.extend_monotone_subadditive(h), sub.Extendible)
        slow = orc.full_domain_extend(h, "monotone-subadditive")
        assert fast == slow

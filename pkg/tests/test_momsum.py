"""Moment sums S_n: closed forms, brute force, geometric classes."""

from fractions import Fraction

import pytest

from manypoints import momsum
from manypoints.errors import EvenQForS8, IntegralityViolation, UnsupportedN


@pytest.mark.parametrize("n,q,g", [(2, 3, 2), (4, 3, 2), (6, 5, 2), (2, 3, 3)])
def test_closed_matches_brute(n, q, g):
    assert momsum.S_closed_form(n, q, g).value == momsum.S_bruteforce(n, q, g).value


def test_known_small_values():
    assert momsum.S_closed_form(2, 3, 2).value == 80
    # n = 0 counts the models themselves: q^(2g-1) after symmetrization
    assert momsum.S_bruteforce(0, 3, 2).value == 3 ** 3
    assert momsum.S_bruteforce(0, 5, 2).value == 5 ** 3


def test_odd_moments_vanish():
    # twisting sends tau to -tau, so odd moments cancel exactly
    for q, g in [(3, 2), (5, 2)]:
        assert momsum.S_bruteforce(1, q, g).value == 0
        assert momsum.S_bruteforce(3, q, g).value == 0


def test_unsupported_n_and_even_q():
    with pytest.raises(UnsupportedN):
        momsum.S_closed_form(3, 5, 2)
    with pytest.raises(UnsupportedN):
        momsum.S_closed_form(10, 5, 2)
    with pytest.raises(EvenQForS8):
        momsum.S_closed_form(8, 4, 2)


def test_s8_needs_odd_q_but_works_there():
    assert momsum.S_closed_form(8, 3, 2).value == momsum.S_bruteforce(8, 3, 2).value


def test_lower_bound_exact_rational_comparison():
    lb = momsum.lower_bound_a(4, 13, 3)
    assert lb.a_q_power_exceeds(Fraction(13, 10))
    # the float and the exact test must agree away from the boundary
    assert lb.a_q > 1.3
    assert not lb.a_q_power_exceeds(Fraction(4, 1))


def test_geometric_classes_partition_and_integrality():
    q, g = 3, 2
    classes = momsum.geometric_classes(q, g)
    assert len(classes) == q ** (2 * g - 1)
    for c in classes:
        assert len(c.members) == q ** 3 - q  # full class mass
    for n in (2, 4, 6):
        s = 0
        for c in classes:
            v = momsum.s_n_curve(c, n, q)
            assert isinstance(v, int)
            s += v
        assert s == momsum.S_closed_form(n, q, g).value


def test_s_n_curve_rejects_non_integer():
    class Fake:
        representative = (0,)
        members = [((0,), 1)]

        def s_n(self, n, q):
            return Fraction(1, 3)

    with pytest.raises(IntegralityViolation):
        momsum.s_n_curve(Fake(), 2, 3)

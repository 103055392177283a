"""Katz-Sarnak limit distribution: density, CDF, moments."""

import math

import pytest

from manypoints import ksdist
from manypoints.errors import GTooLarge


@pytest.mark.parametrize("g", [1, 2, 3])
def test_cdf_endpoints_and_monotonicity(g):
    assert ksdist.cdf_F(-2 * g - 1, g) == 0.0
    assert ksdist.cdf_F(2 * g + 1, g) == 1.0
    xs = [-2 * g + 0.5 * i for i in range(8 * g + 1)]
    vals = [ksdist.cdf_F(x, g) for x in xs]
    for lo, hi in zip(vals, vals[1:]):
        assert hi >= lo - 1e-9
    # total mass
    assert abs(vals[-1] - 1.0) < 1e-6


def test_density_nonnegative():
    import numpy as np

    rng = np.random.default_rng(3)
    pts = rng.uniform(0.0, math.pi, size=(200, 2))
    assert (ksdist.density_delta_g(pts) >= 0).all()


def test_moment_dp_small_values():
    # a_0 = 1; odd moments vanish; classical small even moments
    for g in (1, 2, 3, 4):
        assert ksdist.moment_usp_dp(0, g) == 1
        assert ksdist.moment_usp_dp(1, g) == 0
        assert ksdist.moment_usp_dp(3, g) == 0
        assert ksdist.moment_usp_dp(2, g) == 1
    assert ksdist.moment_usp_dp(4, 2) == 3
    assert ksdist.moment_usp_dp(6, 2) == 14
    assert ksdist.moment_usp_dp(6, 3) == 15
    assert ksdist.moment_usp_dp(8, 4) == 105


def test_moment_g1_is_catalan():
    # USp(2) = SU(2): a_2n(1) is the Catalan number C_n
    catalan = [1, 1, 2, 5, 14, 42, 132]
    for n, c in enumerate(catalan):
        assert ksdist.moment_usp_dp(2 * n, 1) == c


@pytest.mark.parametrize("n,g", [(2, 1), (4, 2), (6, 2), (6, 3), (8, 3)])
def test_integral_matches_dp(n, g):
    exact = ksdist.moment_usp_dp(n, g)
    assert abs(ksdist.moment_usp_integral(n, g) - exact) < 1e-5


def test_g_too_large():
    with pytest.raises(GTooLarge):
        ksdist.moment_usp_integral(2, 5)
    with pytest.raises(GTooLarge):
        ksdist.cdf_F(0.0, 5)


def test_limit_check_rows():
    rows = ksdist.limit_check(2, 6)
    assert [r.two_n for r in rows] == [2, 4, 6, 8, 10, 12]
    assert rows[0].moment == 1 and rows[1].moment == 3 and rows[2].moment == 14
    roots = [r.root for r in rows]
    assert all(b >= a - 1e-12 for a, b in zip(roots, roots[1:]))
    assert all(r <= 4.0 for r in roots)


@pytest.mark.parametrize("q", [5, 7])
def test_empirical_vs_theory_report(q):
    rep = ksdist.empirical_vs_theory(q, g=2)
    assert rep.q == q and rep.g == 2
    assert 0.0 <= rep.sup_distance <= 1.0
    assert rep.grid and all(len(row) == 3 for row in rep.grid)
    # empirical CDF ends at 1
    assert abs(rep.grid[-1][2] - 1.0) < 1e-9

"""Katz-Sarnak numerics for USp(2g) Frobenius-angle statistics.

The density delta_g on [0, pi]^g, its CDF for the normalized trace, the
moment sequence a_n(g) computed two independent ways (exact Weyl-chamber
walk counting and Gauss-Legendre quadrature), the 2g moment limit, and
the comparison of the brute-force trace distribution over H_2(F_q)
against the theoretical CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import GTooLarge

_NODES_SMALL_G = 64  # g <= 3
_NODES_G4 = 32
_MAX_QUAD_G = 4


def density_delta_g(theta) -> float:
    """delta_g(theta) = (1/g!) prod_{j<k} (2cos t_j - 2cos t_k)^2
    * prod_j (2/pi) sin^2 t_j."""
    theta = np.asarray(theta, dtype=float)
    g = theta.shape[-1]
    c = 2.0 * np.cos(theta)
    val = np.ones(theta.shape[:-1])
    for j in range(g):
        for k in range(j + 1, g):
            val = val * (c[..., j] - c[..., k]) ** 2
    val = val * np.prod((2.0 / math.pi) * np.sin(theta) ** 2, axis=-1)
    return val / math.factorial(g)


@lru_cache(maxsize=None)
def _gl_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _nodes_for_g(g):
    if g > _MAX_QUAD_G:
        raise GTooLarge(f"quadrature supported for g <= {_MAX_QUAD_G}")
    return _NODES_G4 if g == _MAX_QUAD_G else _NODES_SMALL_G


@lru_cache(maxsize=None)
def _outer_grid(g, n_nodes):
    """Tensor Gauss-Legendre grid over [0, pi]^(g-1): (points, weights)."""
    x, w = _gl_nodes(n_nodes)
    t = (x + 1.0) * (math.pi / 2.0)
    wt = w * (math.pi / 2.0)
    if g == 1:
        return np.zeros((1, 0)), np.ones(1)
    grids = np.meshgrid(*([t] * (g - 1)), indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids], axis=-1)
    wgt = np.ones(pts.shape[0])
    wgrids = np.meshgrid(*([wt] * (g - 1)), indexing="ij")
    for wg in wgrids:
        wgt = wgt * wg.ravel()
    return pts, wgt


def cdf_F(x: float, g: int, tol: float = 1e-8) -> float:
    """F(x) = mu_g({theta : sum_j 2cos theta_j <= x}).

    The first g-1 angles run over the full box on tensor Gauss-Legendre
    nodes; the last angle is integrated exactly over [arccos(s), pi],
    the true section of the region, with remapped nodes.
    """
    if x <= -2 * g:
        return 0.0
    if x >= 2 * g:
        return 1.0
    n_nodes = _nodes_for_g(g)
    pts, wgt = _outer_grid(g, n_nodes)
    xi, wi = _gl_nodes(n_nodes)
    # lower limit of the last angle, per outer point
    s = (x - 2.0 * np.cos(pts).sum(axis=-1)) / 2.0
    a = np.arccos(np.clip(s, -1.0, 1.0))
    half = (math.pi - a) / 2.0  # vector over outer points
    theta_g = a[:, None] + (xi[None, :] + 1.0) * half[:, None]
    full = np.concatenate(
        [np.repeat(pts[:, None, :], n_nodes, axis=1),
         theta_g[:, :, None]],
        axis=-1,
    )
    dens = density_delta_g(full)
    inner = (dens * wi[None, :]).sum(axis=1) * half
    val = float((inner * wgt).sum())
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# moments

def moment_usp_dp(n: int, g: int) -> int:
    """a_n(g): multiplicity of the trivial representation in the n-th
    tensor power of the standard representation of USp(2g).

    Counted exactly as closed n-step walks from (g, g-1, ..., 1) to itself
    with steps +-e_i, confined to strictly decreasing positive tuples
    (the shifted dominant chamber of type C_g).
    """
    start = tuple(range(g, 0, -1))
    layer = {start: 1}
    for _ in range(n):
        nxt = {}
        for state, ways in layer.items():
            for i in range(g):
                for d in (1, -1):
                    v = state[i] + d
                    if v <= 0:
                        continue
                    if i > 0 and v >= state[i - 1]:
                        continue
                    if i < g - 1 and v <= state[i + 1]:
                        continue
                    new = state[:i] + (v,) + state[i + 1:]
                    nxt[new] = nxt.get(new, 0) + ways
        layer = nxt
    return layer.get(start, 0)


def moment_usp_integral(n: int, g: int, tol: float = 1e-6) -> float:
    """a_n(g) by tensor Gauss-Legendre quadrature of (sum 2cos)^n dmu_g."""
    n_nodes = _nodes_for_g(g)
    x, w = _gl_nodes(n_nodes)
    t = (x + 1.0) * (math.pi / 2.0)
    wt = w * (math.pi / 2.0)
    grids = np.meshgrid(*([t] * g), indexing="ij")
    pts = np.stack([gr.ravel() for gr in grids], axis=-1)
    wgt = np.ones(pts.shape[0])
    for wg in np.meshgrid(*([wt] * g), indexing="ij"):
        wgt = wgt * wg.ravel()
    tr = 2.0 * np.cos(pts).sum(axis=-1)
    return float((tr ** n * density_delta_g(pts) * wgt).sum())


@dataclass(frozen=True)
class LimitRow:
    two_n: int
    moment: int
    root: float  # moment ** (1 / two_n)


def limit_check(g: int, n_max: int):
    """Rows ((2n, a_2n, a_2n^(1/2n))) for n = 1..n_max, with the moment-root
    sanity conditions asserted: the roots are non-decreasing and <= 2g."""
    rows = []
    prev = 0.0
    for n in range(1, n_max + 1):
        m = moment_usp_dp(2 * n, g)
        root = m ** (1.0 / (2 * n))
        assert m <= (2 * g) ** (2 * n), "moment exceeds the (2g)^n bound"
        # exact monotonicity check: a_{2n}^(1/2n) >= a_{2(n-1)}^(1/(2n-2))
        if rows:
            prev_m = rows[-1].moment
            assert m ** (n - 1) * 1 >= prev_m ** n or prev_m == 0, (
                "moment roots must be non-decreasing"
            )
        rows.append(LimitRow(two_n=2 * n, moment=m, root=root))
        prev = root
    return rows


# ---------------------------------------------------------------------------
# empirical trace distribution over H_2(F_q)

@dataclass
class DistributionReport:
    q: int
    g: int
    sup_distance: float
    grid: list  # (x, F(x), empirical(x)) rows


def empirical_vs_theory(q: int, g: int = 2, bins: int = 101) -> DistributionReport:
    """Weighted empirical CDF of the normalized trace over all genus-g
    models vs the Katz-Sarnak CDF; sup distance taken over the atoms of
    the empirical distribution (where a step CDF attains its extremes)."""
    from .momsum import trace_histogram

    hist, _ = trace_histogram(q, g)
    # symmetrize over leading coefficients: tau and -tau both occur, so the
    # normalized trace (#C - q - 1)/sqrt(q) has weight hist[t]+hist[-t] at
    # each +-t pair; total weighted mass is 1 after normalization
    sym = {}
    for t, m in hist.items():
        sym[t] = sym.get(t, 0) + m
        sym[-t] = sym.get(-t, 0) + m
    total = sum(sym.values())
    atoms = sorted(sym)
    sq = math.sqrt(q)
    sup = 0.0
    cum = 0
    rows = []
    for t in atoms:
        x = t / sq
        f_here = cdf_F(x, g)
        below = cum / total
        cum += sym[t]
        here = cum / total
        sup = max(sup, abs(here - f_here), abs(below - f_here))
        rows.append((x, f_here, here))
    # extend the reporting grid to an even mesh for plotting
    grid = []
    ri = 0
    for i in range(bins):
        x = -2 * g + 4 * g * i / (bins - 1)
        while ri < len(rows) and rows[ri][0] <= x:
            ri += 1
        emp = rows[ri - 1][2] if ri else 0.0
        grid.append((x, cdf_F(x, g), emp))
    return DistributionReport(q=q, g=g, sup_distance=sup, grid=grid)

"""Tests for the exponential-environment limit shape via concave duality.

PSI_MIX_11 below was frozen from an independent 40-digit oracle: g evaluated
by golden-section maximization of a - y*u(a) with u(a) in closed form for the
two-atom measure, and the crossing t found by long bisection on t*g(1/t) = 1.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from rowlpp.envmodel import RateMeasure, measure_expectation
from rowlpp.expshape import (
    AsymptoticConstants,
    BoundaryResult,
    BoundaryWindowError,
    DualState,
    a_of_u,
    asymptotic_constants,
    asymptotic_psi,
    boundary_psi,
    g_of_y,
    psi_g,
    u_star,
)

DELTA_1 = RateMeasure(c=1.0, atoms=((1.0, 1.0),))
MIX_12 = RateMeasure(c=1.0, atoms=((1.0, 0.5), (2.0, 0.5)))
POLY_TAIL = RateMeasure(c=1.0, tail=(1.0, 2.0, 1.0))  # density 3(xi-1)^2 on (1,2]
SQRT_TAIL = RateMeasure(c=1.0, tail=(1.0, -0.5, 1.0))

PSI_MIX_11 = 3.2664760482060899  # 40-digit duality oracle (see module docstring)


# --- u* ------------------------------------------------------------------------


def test_u_star_atom_at_c_diverges():
    assert u_star(DELTA_1) == math.inf
    assert u_star(MIX_12) == math.inf


def test_u_star_mixed_hand_value():
    # tail kappa=1/2, nu=1 contributes 2*kappa = 1; the atom at 2 contributes
    # w * c/(2-c) = 1/2: total 3/2.
    m = RateMeasure(c=1.0, atoms=((2.0, 0.5),), tail=(0.5, 1.0, 1.0))
    assert u_star(m) == pytest.approx(1.5, abs=1e-12)
    assert u_star(POLY_TAIL) == pytest.approx(1.5, abs=1e-12)


def test_u_star_sqrt_tail_vs_graded_mesh():
    # independent oracle: integrate (c/s) * kappa*(nu+1)*s^nu over a geometric
    # mesh down to 1e-22 (the omitted stub is ~3e-11 for nu = 1/2)
    kappa, nu, width, c = 1.0, 0.5, 1.0, 1.0
    nodes, weights = np.polynomial.legendre.leggauss(10)
    edges = width * np.geomspace(1e-22, 1.0, 801)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        s = mid + half * nodes
        total += half * float(weights @ (c / s * kappa * (nu + 1.0) * s**nu))
    m = RateMeasure(c=c, tail=(kappa, nu, width))
    assert u_star(m) == pytest.approx(total, abs=1e-9)
    assert u_star(m) == pytest.approx(3.0, abs=1e-12)  # c*kappa*(nu+1)*width^nu/nu


# --- a(u) ----------------------------------------------------------------------


def test_a_of_u_closed_form_single_atom():
    # one atom at xi: u = a/(xi - a) inverts to a = xi*u/(1+u)
    for u in (0.25, 1.0, 3.0):
        assert a_of_u(DELTA_1, u) == pytest.approx(u / (1.0 + u), rel=1e-12)
    d2 = RateMeasure(c=2.0, atoms=((2.0, 1.0),))
    assert a_of_u(d2, 0.5) == pytest.approx(2.0 * 0.5 / 1.5, rel=1e-12)


def test_a_of_u_edges():
    assert a_of_u(DELTA_1, 0.0) == 0.0
    with pytest.raises(ValueError):
        a_of_u(DELTA_1, -0.1)
    # finite u*: pinned at c beyond it, and continuous approach from below
    assert u_star(POLY_TAIL) == pytest.approx(1.5)
    assert a_of_u(POLY_TAIL, 1.5) == 1.0
    assert a_of_u(POLY_TAIL, 2.7) == 1.0
    assert a_of_u(POLY_TAIL, 1.5 - 1e-6) == pytest.approx(1.0, abs=1e-5)


def test_a_of_u_increasing_and_concave():
    for m in (DELTA_1, MIX_12, POLY_TAIL, SQRT_TAIL):
        ustar = u_star(m)
        hi = min(ustar, 4.0) * 0.98
        us = np.linspace(0.05, hi, 9)
        avals = [a_of_u(m, float(u)) for u in us]
        assert all(b > a for a, b in zip(avals, avals[1:]))
        assert all(0.0 < a < m.c for a in avals)
        for i in range(len(us) - 2):
            mid = a_of_u(m, float(0.5 * (us[i] + us[i + 2])))
            assert mid >= 0.5 * (avals[i] + avals[i + 2]) - 1e-10


def test_dual_state_memo_and_threads():
    state = DualState(MIX_12)
    direct = [a_of_u(MIX_12, u) for u in (0.3, 0.7, 0.3)]
    assert [state.a(0.3), state.a(0.7), state.a(0.3)] == direct
    with ThreadPoolExecutor(max_workers=4) as pool:
        concurrent = list(pool.map(state.a, [0.3, 0.7] * 6))
    assert concurrent == [direct[0], direct[1]] * 6
    assert state.psi(1.0, 1.0) == psi_g(MIX_12, 1.0, 1.0)


# --- g(y) ----------------------------------------------------------------------


def test_g_closed_form_single_atom():
    # delta_1: g(y) = (1 - sqrt(y))^2 on [0, 1], zero after
    for y in (0.04, 0.25, 0.81):
        assert g_of_y(DELTA_1, y) == pytest.approx((1.0 - math.sqrt(y)) ** 2, rel=1e-10)
    assert g_of_y(DELTA_1, 1.0) == 0.0
    assert g_of_y(DELTA_1, 1.7) == 0.0


def test_g_edges_and_linear_segment():
    assert g_of_y(DELTA_1, 0.0) == 1.0  # sup of a(u) is c
    with pytest.raises(ValueError):
        g_of_y(DELTA_1, -0.5)
    # POLY_TAIL has finite u* = 3/2 and finite D(c-) = 4.5, so g is linear
    # c - y*u* below the slope threshold 1/4.5
    for y in (0.05, 0.2):
        assert g_of_y(POLY_TAIL, y) == pytest.approx(1.0 - 1.5 * y, rel=1e-12)
    # zero regime: 1/mu_G with mu_G = integral 3(xi-1)^2/xi = 3 log 2 - 3/2
    mu_g = 3.0 * math.log(2.0) - 1.5
    assert g_of_y(POLY_TAIL, 1.0 / mu_g + 1e-9) == 0.0


def test_g_nonincreasing():
    ys = np.linspace(0.0, 1.6, 17)
    for m in (DELTA_1, MIX_12, POLY_TAIL, SQRT_TAIL):
        gv = [g_of_y(m, float(y)) for y in ys]
        assert all(b <= a + 1e-12 for a, b in zip(gv, gv[1:]))
        assert all(v >= 0.0 for v in gv)


# --- psi -----------------------------------------------------------------------


def test_psi_rost_value():
    assert psi_g(DELTA_1, 1.0, 1.0) == pytest.approx(4.0, abs=1e-9)


def test_psi_deterministic_rate_collapse():
    # a single atom at xi collapses to (sqrt(x)+sqrt(y))^2 / xi
    for xi in (0.5, 1.0, 2.5):
        m = RateMeasure(c=xi, atoms=((xi, 1.0),))
        for x in (0.3, 1.0, 4.0):
            for y in (0.5, 1.0, 2.0):
                want = (math.sqrt(x) + math.sqrt(y)) ** 2 / xi
                assert psi_g(m, x, y) == pytest.approx(want, rel=1e-9)


def test_psi_mix_oracle_value():
    assert psi_g(MIX_12, 1.0, 1.0) == pytest.approx(PSI_MIX_11, abs=1e-8)


def test_psi_homogeneity():
    for m in (MIX_12, SQRT_TAIL):
        base = psi_g(m, 1.3, 0.7)
        for cnum in (0.5, 2.0, 7.0):
            assert psi_g(m, cnum * 1.3, cnum * 0.7) == pytest.approx(
                cnum * base, abs=1e-10 * max(1.0, cnum * base))


def test_psi_duality_residual():
    # at t = psi(x, y), t*g(y/t) returns x whenever y/t is in g's strictly
    # decreasing range
    for m in (DELTA_1, MIX_12, SQRT_TAIL):
        for x, y in [(1.0, 1.0), (2.0, 0.5), (0.4, 1.7)]:
            t = psi_g(m, x, y)
            assert abs(t * g_of_y(m, y / t) - x) <= 1e-10 * x


def test_psi_concave_in_direction():
    ts = np.linspace(0.15, 1.85, 9)
    for m in (MIX_12, POLY_TAIL):
        vals = [psi_g(m, float(t), float(2.0 - t)) for t in ts]
        for i in range(len(ts) - 2):
            tm = 0.5 * (ts[i] + ts[i + 2])
            mid = psi_g(m, float(tm), float(2.0 - tm))
            assert mid >= 0.5 * (vals[i] + vals[i + 2]) - 1e-10


def test_psi_near_y_axis_expansion():
    # psi(alpha, 1) = mu_G + 2 sigma_G sqrt(alpha) + O(alpha), with
    # mu_G = E[1/xi] and sigma_G^2 = E[1/xi^2]
    mu, sig = 0.75, math.sqrt(0.625)
    prev = math.inf
    for alpha in (1e-2, 1e-3, 1e-4):
        r = abs(psi_g(MIX_12, alpha, 1.0) - mu - 2.0 * sig * math.sqrt(alpha))
        r /= math.sqrt(alpha)
        assert r <= 5.0 * math.sqrt(alpha)
        assert r < prev
        prev = r


def test_psi_validation():
    with pytest.raises(ValueError):
        psi_g(MIX_12, 0.0, 1.0)
    with pytest.raises(ValueError):
        psi_g(MIX_12, 1.0, -1.0)


# --- boundary ------------------------------------------------------------------


def test_boundary_pinned_case():
    # POLY_TAIL: integral (xi-c)^-1 dm = 3/2 and window alpha_max = 1/3
    for alpha in (1e-2, 1e-3, 0.3):
        br = boundary_psi(POLY_TAIL, alpha)
        assert br.case == "pinned"
        assert br.psi == pytest.approx(1.0 + 1.5 * alpha, rel=1e-13)
        assert br.a0 == 1.0
        assert br.u0 == pytest.approx(1.5)
    with pytest.raises(BoundaryWindowError) as err:
        boundary_psi(POLY_TAIL, 0.5)
    assert err.value.alpha_max == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_boundary_interior_case():
    for alpha in (1e-2, 1e-3):
        br = boundary_psi(SQRT_TAIL, alpha)
        assert br.case == "interior"
        assert 0.0 < br.a0 < 1.0
        lhs = 1.0 / br.a0**2
        rhs = alpha * measure_expectation(SQRT_TAIL, "1/(xi-a)^2", br.a0)
        assert abs(lhs - rhs) <= 1e-12 * lhs
        assert br.u0 == pytest.approx(
            measure_expectation(SQRT_TAIL, "a/(xi-a)", br.a0), rel=1e-12)


def test_boundary_agrees_with_psi():
    for m in (POLY_TAIL, SQRT_TAIL):
        for alpha in (1e-2, 1e-3):
            br = boundary_psi(m, alpha)
            ps = psi_g(m, 1.0, alpha)
            assert abs(br.psi - ps) <= 1e-8 * ps


def test_boundary_validation():
    with pytest.raises(ValueError):
        boundary_psi(POLY_TAIL, 0.0)


# --- asymptotics ---------------------------------------------------------------


def test_constants_closed_forms():
    c0 = asymptotic_constants(0.0, 1.0, 1.0)
    assert c0.a_nu == 0.5
    assert c0.a_nu2 is None
    ch = asymptotic_constants(-0.5, 1.0, 1.0)
    assert ch.a_nu == pytest.approx(math.pi / 8.0, abs=1e-12)
    assert ch.a_nu2 == pytest.approx(math.pi / 2.0, abs=1e-12)
    assert ch.b == pytest.approx(ch.b0 + ch.b0**-0.5 * math.pi / 2.0, rel=1e-14)
    cm = asymptotic_constants(-1.0, 0.5, 1.0)
    assert cm.a_nu == 0.5
    assert cm.b == pytest.approx(math.sqrt(2.0), rel=1e-13)  # 2 sqrt(kappa)/c


def test_constants_series_matches_beta_identity():
    rng = np.random.default_rng(515)
    for nu in rng.uniform(-1.0, 1.0, size=50):
        nu = float(nu)
        series = asymptotic_constants(nu, 1.0, 1.0).a_nu
        beta = math.gamma(1.0 - nu) * math.gamma(2.0 + nu) / 2.0
        assert abs(series - beta) <= 1e-10 * max(1.0, abs(beta))


def test_constants_nu_one_degenerate():
    c1 = asymptotic_constants(1.0, 2.0, 3.0)
    assert c1.a_nu == math.inf
    assert c1.b0 is None and c1.b is None


def test_constants_validation():
    with pytest.raises(ValueError):
        asymptotic_constants(1.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        asymptotic_constants(0.0, -1.0, 1.0)


def test_asymptotic_psi_positive_nu_linear():
    for alpha in (1e-2, 1e-3):
        assert asymptotic_psi(POLY_TAIL, alpha) == pytest.approx(
            1.0 + 1.5 * alpha, rel=1e-13)


def test_asymptotic_psi_log_regime():
    m = RateMeasure(c=1.0, tail=(1.0, 0.0, 1.0))
    alpha = 1e-6
    assert asymptotic_psi(m, alpha) == 1.0 - alpha * math.log(alpha)
    # the exact curve approaches the expansion: within 10% at alpha = 1e-6
    ratio = (psi_g(m, 1.0, alpha) - 1.0) / (-alpha * math.log(alpha))
    assert abs(ratio - 1.0) <= 0.10


def test_asymptotic_psi_negative_nu_power():
    cst = asymptotic_constants(-0.5, 1.0, 1.0)
    alpha = 1e-6
    assert asymptotic_psi(SQRT_TAIL, alpha) == pytest.approx(
        1.0 + cst.b * alpha ** (2.0 / 3.0), rel=1e-13)
    ratio = (boundary_psi(SQRT_TAIL, alpha).psi - 1.0) / alpha ** (2.0 / 3.0)
    assert abs(ratio / cst.b - 1.0) <= 0.10


def test_asymptotic_psi_atom_regime_slope():
    # atom at c: correction is B sqrt(alpha); exact curve's log-log slope
    m = RateMeasure(c=1.0, atoms=((2.0, 0.5),), tail=(0.5, -1.0, 1.0))
    alphas = np.array([1e-3, 1e-4, 1e-5, 1e-6])
    vals = np.array([psi_g(m, 1.0, float(a)) - 1.0 for a in alphas])
    slope = np.polyfit(np.log(alphas), np.log(vals), 1)[0]
    assert abs(slope - 0.5) <= 0.05
    assert asymptotic_constants(-1.0, 0.5, 1.0).b == pytest.approx(math.sqrt(2.0))


def test_asymptotic_psi_requires_tail():
    with pytest.raises(ValueError):
        asymptotic_psi(MIX_12, 1e-3)
    with pytest.raises(ValueError):
        asymptotic_psi(SQRT_TAIL, 0.0)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edl.extremal import (BISECT_ITERS, Q, QBAR, TIE, ExtremalPoint, SolverError, bisect, curve,
                          curve_intersection, family_profile, indep_poly, kk_bound, lemma_ineq_margin,
                          lemma_ineq_root, local_maximize, m_bound, optimize_profile, phi_max,
                          project_simplex, rho_maxmin, solve_q, start_point, support_family,
                          _densities_and_grads)
from edl.threshold import Profile, p_density, q_density


def family_value(family, r, s, p):
    # largest theta-member of the family whose independent r-density is >= p,
    # found on the profile formulas alone
    def q_of(theta):
        return q_density(family_profile(family, theta), r)
    lo, hi = 0.0, 1.0
    # Q: q decreases in theta; Qbar: q increases in theta
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        ok = q_of(mid) >= p
        if family == Q:
            lo, hi = (mid, hi) if ok else (lo, mid)
        else:
            lo, hi = (lo, mid) if ok else (mid, hi)
    theta = lo if family == Q else hi
    return p_density(family_profile(family, theta), s)


def test_bisect_basics():
    assert bisect(lambda t: t - 0.3, 0.0, 1.0) == pytest.approx(0.3, abs=1e-15)
    assert bisect(lambda t: t, 0.0, 1.0) == 0.0
    with pytest.raises(SolverError):
        bisect(lambda t: 1.0, 0.0, 1.0)
    assert BISECT_ITERS == 200


@pytest.mark.parametrize("r", [2, 3, 5])
def test_solve_q_examples(r):
    assert solve_q(r, 0.0) == 0.0
    assert solve_q(r, 1.0) == 1.0
    for p in np.linspace(0, 1, 23):
        assert abs(indep_poly(r, solve_q(r, p)) - p) <= 1e-12


def test_solve_q_specific():
    assert solve_q(3, 0.5) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(SolverError):
        solve_q(3, 1.5)
    with pytest.raises(SolverError):
        solve_q(1, 0.5)


def test_m_bound_examples():
    pt = m_bound(3, 3, 0.0)
    assert pt.value == 1.0 and pt.family == TIE
    assert m_bound(4, 3, 1.0).value == pytest.approx(0.0, abs=1e-15)
    pt = m_bound(3, 3, 0.5)
    assert pt.value == pytest.approx(0.125, abs=1e-12)
    assert pt.family == Q and pt.t == pytest.approx(0.5, abs=1e-12)
    assert pt.roots["value_Qbar"] == pytest.approx(0.1101184, abs=1e-6)
    with pytest.raises(SolverError):
        m_bound(1, 3, 0.5)


@pytest.mark.parametrize("r,s", [(3, 3), (3, 4), (4, 3), (4, 4), (2, 3)])
def test_m_bound_nonincreasing(r, s):
    vals = [m_bound(r, s, p).value for p in np.linspace(0, 1, 100)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("r,s", [(3, 3), (3, 4), (4, 5)])
def test_m_bound_two_family_reduction(r, s):
    for p in np.linspace(0, 1, 21)[1:-1]:
        direct = max(family_value(Q, r, s, p), family_value(QBAR, r, s, p))
        assert abs(m_bound(r, s, p).value - direct) <= 1e-10


@pytest.mark.parametrize("s", [3, 4, 5])
def test_m_bound_r2_matches_kruskal_katona(s):
    for p in np.linspace(0, 1, 11):
        pt = m_bound(2, s, p)
        c = pt.roots["t_Qbar"]
        assert c == pytest.approx(np.sqrt(p), abs=1e-12)
        P = family_profile(QBAR, c)
        assert q_density(P, 2) == pytest.approx(p, abs=1e-12)
        assert q_density(P, s) == pytest.approx(kk_bound(2, s, p), abs=1e-12)
        assert pt.roots["value_Qbar"] == pytest.approx(p_density(P, s), abs=1e-12)


def test_kk_bound_examples():
    assert kk_bound(2, 3, 1.0) == 1.0
    assert kk_bound(2, 3, 0.0) == 0.0
    assert kk_bound(2, 4, 0.25) == pytest.approx(0.0625)
    with pytest.raises(SolverError):
        kk_bound(3, 3, 0.5)
    with pytest.raises(SolverError):
        kk_bound(2, 3, 2.0)


@pytest.mark.parametrize("r", [3, 4, 5, 6])
def test_phi_max_symmetric_equals_rho(r):
    pt, rho = phi_max(1, 1, r, r), rho_maxmin(r)
    assert abs(pt.value - rho.value) <= 1e-10
    assert pt.roots["alpha"] == pytest.approx(rho.t, abs=1e-10)
    assert pt.family == TIE


def test_phi_max_limits_and_errors():
    pt = phi_max(1, 1e6, 3, 4)
    assert pt.roots["alpha"] > 0.99 and pt.value == pytest.approx(1.0, abs=1e-3)
    for bad in [(0, 1, 3, 3), (1, -1, 3, 3), (1, 1, 2, 3), (1, 1, 3, 2)]:
        with pytest.raises(SolverError):
            phi_max(*bad)


@settings(max_examples=40)
@given(st.floats(0.1, 10), st.floats(0.1, 10), st.integers(3, 6), st.integers(3, 6))
def test_phi_max_roots_satisfy_equations(a, b, r, s):
    pt = phi_max(a, b, r, s)
    al, be = pt.roots["alpha"], pt.roots["beta"]
    assert abs(a * al ** s - b * indep_poly(r, 1 - al)) <= 1e-10 * max(a, b)
    assert abs(b * be ** r - a * indep_poly(s, 1 - be)) <= 1e-10 * max(a, b)
    assert pt.value == max(a * al ** s, b * be ** r)


def test_extremal_point_residual_guard():
    with pytest.raises(SolverError):
        ExtremalPoint(Q, 0.5, 0.1, residuals={"q": 1e-6})


def test_rho_examples():
    pt = rho_maxmin(3)
    rho = pt.t
    assert abs(rho ** 3 - (1 - rho) ** 3 - 3 * rho * (1 - rho) ** 2) <= 1e-12
    assert rho == pytest.approx(0.65270, abs=1e-5)
    assert pt.value == pytest.approx(0.27807, abs=1e-5)
    for r in range(3, 9):
        assert rho_maxmin(r).t > 0.5
    with pytest.raises(SolverError):
        rho_maxmin(2)


def test_curve_shape():
    rows = curve(3, 3, 5)
    assert len(rows) == 10
    q0 = [r for r in rows if r.family == Q and r.theta == 0.0][0]
    q1 = [r for r in rows if r.family == Q and r.theta == 1.0][0]
    assert (q0.q_density, q0.p_density) == (1.0, 0.0)
    assert (q1.q_density, q1.p_density) == (0.0, 1.0)
    mid = [r for r in rows if r.family == Q and r.theta == 0.5][0]
    assert (mid.q_density, mid.p_density) == (0.5, 0.125)
    with pytest.raises(SolverError):
        curve(3, 3, 1)


@pytest.mark.parametrize("r", [3, 4])
def test_curve_intersection_is_rho(r):
    q, p = curve_intersection(curve(r, r, 20001))
    v = rho_maxmin(r).value
    assert abs(q - v) <= 1e-6 and abs(p - v) <= 1e-6


def test_lemma_inequality():
    assert lemma_ineq_root(3, 3) == pytest.approx(2.0, abs=1e-12)
    assert lemma_ineq_margin(3, 3) == pytest.approx(0.234375, abs=1e-12)
    for r in range(3, 9):
        for s in range(3, 9):
            assert lemma_ineq_margin(r, s) > 0
    with pytest.raises(SolverError):
        lemma_ineq_root(2, 3)


def test_project_simplex():
    assert project_simplex([0.2, 0.3, 0.5]) == pytest.approx([0.2, 0.3, 0.5])
    z = project_simplex([2.0, -1.0, 0.5])
    assert sum(z) == pytest.approx(1.0) and min(z) >= 0
    assert z == pytest.approx([1.0, 0.0, 0.0])
    rng = np.random.default_rng(1)
    for _ in range(50):
        v = rng.normal(size=6)
        z = np.array(project_simplex(list(v)))
        assert z.sum() == pytest.approx(1.0) and z.min() >= 0
        # optimality: no simplex vertex is closer than the projection along any edge
        for w in np.eye(6):
            for t in (1e-3, 1e-2):
                y = (1 - t) * z + t * w
                assert np.linalg.norm(v - y) >= np.linalg.norm(v - z) - 1e-12


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(5)
    for k in (1, 2, 3):
        z = list(rng.dirichlet(np.ones(2 * k)))
        p, q, gp, gq = _densities_and_grads(z, 4, 3)
        P = Profile.from_blocks(z)
        assert p == pytest.approx(p_density(P, 3)) and q == pytest.approx(q_density(P, 4))
        for i in range(2 * k):
            h = 1e-6
            up = list(z)
            up[i] += h
            dn = list(z)
            dn[i] -= h
            pu, qu, _, _ = _densities_and_grads(up, 4, 3)
            pd, qd, _, _ = _densities_and_grads(dn, 4, 3)
            assert gp[i] == pytest.approx((pu - pd) / (2 * h), abs=1e-6)
            assert gq[i] == pytest.approx((qu - qd) / (2 * h), abs=1e-6)


def test_start_points_are_reproducible():
    assert start_point(3, 7, 2) == start_point(3, 7, 2)
    assert start_point(3, 7, 2) != start_point(3, 8, 2)
    assert sum(start_point(0, 0, 3)) == pytest.approx(1.0)


def test_local_maximize_boundary_face():
    # runs that approach the Qbar face must not stall short of it
    a, b, r, s = 5.200021593591282, 8.276363057918143, 4, 4
    target = phi_max(a, b, r, s)
    assert target.family == QBAR
    run = local_maximize(start_point(4, 20, 2), a, b, r, s)
    assert run.converged and abs(run.value - target.value) <= 1e-6


def test_optimize_maxmin():
    res = optimize_profile(1, 1, 3, 3, 3, 64, 0)
    assert abs(res.value - rho_maxmin(3).value) <= 1e-6
    assert res.gap <= 1e-6 and res.support in (Q, QBAR)
    assert res.reached_bound and res.value <= res.bound + 1e-6


def test_optimize_k1_is_the_q_family():
    res = optimize_profile(1, 1, 3, 4, 1, 16, 0)
    fam = phi_max(1, 1, 3, 4)
    assert fam.roots["value_Q"] == pytest.approx(res.value, abs=1e-6)
    if fam.family == Q:
        assert abs(res.value - fam.value) <= 1e-6


def test_optimize_support_collapse():
    res = optimize_profile(1, 1, 4, 3, 3, 32, 2)
    assert res.support in (Q, QBAR)
    assert res.gap <= 1e-6


def test_optimize_grid_oracle():
    # coarse grid over W_2 then local polish; never above the closed form
    res = optimize_profile(1, 1, 3, 4, 3, 64, 1)
    best = 0.0
    for z in np.ndindex(*(11,) * 3):
        if sum(z) > 10:
            continue
        blocks = [v / 10 for v in z] + [1 - sum(z) / 10]
        P = Profile.from_blocks(blocks)
        best = max(best, min(p_density(P, 4), q_density(P, 3)))
    assert res.value >= best - 1e-12
    assert abs(res.value - phi_max(1, 1, 3, 4).value) <= 1e-6


def test_optimize_initial_profile():
    P = family_profile(Q, phi_max(1, 1, 3, 4).roots["alpha"])
    res = optimize_profile(1, 1, 3, 4, 1, 1, 0, initial=P)
    assert res.starts == 2
    with pytest.raises(SolverError):
        optimize_profile(1, 1, 3, 4, 2, 1, 0, initial=P)


def test_optimize_rejects():
    with pytest.raises(SolverError):
        optimize_profile(1, 1, 3, 3, 0)
    with pytest.raises(SolverError):
        optimize_profile(1, 1, 3, 3, 2, starts=0)
    with pytest.raises(SolverError):
        optimize_profile(0, 1, 3, 3, 2)


def test_support_family():
    assert support_family(Profile((0.4, 0.0), (0.6, 0.0))) == Q
    assert support_family(Profile((0.0, 0.4), (0.6, 0.0))) == QBAR
    assert support_family(Profile((0.2, 0.4), (0.4, 0.0))) is None

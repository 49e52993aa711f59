import math

import numpy as np
import pytest

from cone_forge import edge
from cone_forge.bessel import bessel_i, bessel_k

from _manufactured import manufactured_pair, bump

FINE = edge.log_grid(1e-8, 1.0, 16384)
COARSE = edge.log_grid()


def make_problem(n, mu, zfn, support=0.8, grid=COARSE):
    return edge.ModeProblem(n=n, mu=mu, grid=grid, rhs=zfn(grid),
                            support_max=support, rhs_fn=zfn)


def test_mode_problem_validation():
    g = COARSE
    with pytest.raises(ValueError):
        edge.ModeProblem(n=1, mu=1.0, grid=g[::-1], rhs=np.zeros_like(g),
                         support_max=0.5)
    with pytest.raises(ValueError):
        edge.ModeProblem(n=1, mu=1.0, grid=g, rhs=np.ones_like(g),
                         support_max=0.5)  # support record violated
    with pytest.raises(ValueError):
        edge.ModeProblem(n=1, mu=1.0, grid=g, rhs=np.zeros_like(g),
                         support_max=1.0)
    with pytest.raises(ValueError):
        edge.ModeProblem(n=1, mu=-1.0, grid=g, rhs=np.zeros_like(g),
                         support_max=0.5)


def test_smooth_cutoff_shape():
    assert edge.smooth_cutoff(0.5) == 1.0
    assert edge.smooth_cutoff(2.5) == 0.0
    mid = edge.smooth_cutoff(np.linspace(1.05, 1.95, 11))
    assert np.all((mid > 0) & (mid < 1)) and np.all(np.diff(mid) <= 0)
    assert mid[0] > 0.9 and mid[-1] < 0.1


def test_zero_rhs_gives_zero():
    prob = make_problem(2, 1.0, lambda x: np.zeros_like(np.asarray(x)),
                        support=0.5)
    assert np.allclose(edge.solve_mode(prob), 0.0)


def test_unsupported_mode():
    with pytest.raises(edge.UnsupportedMode):
        edge.solve_mode(make_problem(0, 0.0, bump(0.25, 0.5), support=0.5))


def test_manufactured_recovery():
    yfn, zfn = manufactured_pair(3, 1.5)
    prob = make_problem(3, 1.5, zfn, grid=FINE)
    y = edge.solve_mode(prob)
    assert np.max(np.abs(y - yfn(FINE))) <= 1e-6
    assert edge.operator_residual(prob, y) <= 1e-6 * (
        1.0 + np.max(np.abs(prob.rhs)))


def test_manufactured_sweep_residuals():
    for n, mu in [(1, 0.5), (7, 2.3), (0, 1.2)]:
        yfn, zfn = manufactured_pair(n, mu)
        prob = make_problem(n, mu, zfn, grid=FINE)
        y = edge.solve_mode(prob)
        assert edge.operator_residual(prob, y) <= 1e-6 * (
            1.0 + np.max(np.abs(prob.rhs)))
        if n != 0:
            assert np.max(np.abs(y - yfn(FINE))) <= 1e-6


def test_sampled_rhs_matches_callable_path():
    # without rhs_fn the solver interpolates the samples; on a smooth bump
    # the two paths agree to spline accuracy
    zfn = bump(0.25, 0.5)
    with_fn = make_problem(3, 1.5, zfn, support=0.5)
    sampled = edge.ModeProblem(n=3, mu=1.5, grid=COARSE, rhs=zfn(COARSE),
                               support_max=0.5)
    y1 = edge.solve_mode(with_fn)
    y2 = edge.solve_mode(sampled)
    assert np.max(np.abs(y1 - y2)) <= 1e-8 * (1 + np.max(np.abs(y1)))


def test_linearity():
    z1, z2 = bump(0.25, 0.5), bump(0.3, 0.6)
    zc = lambda x: z1(x) + 2.0 * z2(x)
    y1 = edge.solve_mode(make_problem(2, 1.0, z1, support=0.5))
    y2 = edge.solve_mode(make_problem(2, 1.0, z2, support=0.6))
    yc = edge.solve_mode(make_problem(2, 1.0, zc, support=0.6))
    assert np.max(np.abs(yc - y1 - 2.0 * y2)) <= 1e-10


def test_green_symmetry():
    z1, z2 = bump(0.25, 0.5), bump(0.4, 0.7)
    p1 = make_problem(3, 1.5, z1, support=0.5)
    p2 = make_problem(3, 1.5, z2, support=0.7)
    w = np.gradient(np.log(COARSE))
    s12 = float(np.sum(z1(COARSE) * edge.solve_mode(p2) * w))
    s21 = float(np.sum(z2(COARSE) * edge.solve_mode(p1) * w))
    assert abs(s12 - s21) <= 1e-8


def test_split_zero_rhs():
    prob = make_problem(2, 1.0, lambda x: np.zeros_like(np.asarray(x)),
                        support=0.5)
    sol = edge.split_solution(prob, 0.5, 1.5)
    assert sol.c_low == 0.0
    assert np.allclose(sol.y_high, 0.0)


def test_split_weight_order():
    prob = make_problem(2, 1.0, bump(0.25, 0.5), support=0.5)
    with pytest.raises(edge.WeightOrderViolation):
        edge.split_solution(prob, 1.5, 0.5)
    with pytest.raises(edge.WeightOrderViolation):
        edge.split_solution(prob, -2.0, 1.5)


def test_split_basis_fit_oracle():
    """c_low agrees with fitting y against {I, K} on r < 1/8."""
    prob = make_problem(2, 1.0, bump(0.25, 0.5), support=0.5)
    sol = edge.split_solution(prob, 0.5, 1.5)
    mask = COARSE < 0.125
    A = np.stack([bessel_i(1.0, 2.0 * COARSE[mask]),
                  bessel_k(1.0, 2.0 * COARSE[mask])], axis=1)
    coef, *_ = np.linalg.lstsq(A, sol.y[mask], rcond=None)
    assert coef[0] == pytest.approx(-2.0 * sol.c_low, rel=1e-6)
    assert abs(coef[1]) <= 1e-12 * max(1.0, abs(coef[0]))


def test_split_remainder_in_weighted_space():
    prob = make_problem(2, 1.0, bump(0.25, 0.5), support=0.5)
    sol = edge.split_solution(prob, 0.5, 1.5)
    # below both the support and the cutoff the remainder vanishes
    # identically, so the deep shells hold only weighted roundoff
    assert np.max(sol.shell_norms[2:]) <= 1e-12
    assert np.max(np.abs(sol.y_high[COARSE < 0.2])) <= 1e-16


def test_split_consistency_with_operator():
    # applying the operator to y_high returns z minus the operator on y_low
    yfn, zfn = manufactured_pair(2, 1.0)
    prob = make_problem(2, 1.0, zfn, grid=FINE)
    sol = edge.split_solution(prob, 0.5, 1.6)
    u = np.log(FINE)
    h = u[1] - u[0]
    y_low = sol.y - sol.y_high

    def apply_op(y):
        d2 = (-y[:-4] + 16 * y[1:-3] - 30 * y[2:-2] + 16 * y[3:-1] - y[4:]) \
            / (12 * h * h)
        return d2 - ((prob.n ** 2) * FINE[2:-2] ** 2 + prob.mu ** 2) * y[2:-2]

    resid = apply_op(sol.y_high) - (prob.rhs[2:-2] - apply_op(y_low))
    assert np.max(np.abs(resid)) <= 1e-5 * (1.0 + np.max(np.abs(prob.rhs)))


def test_split_n0_variant():
    # the captured piece follows the r^mu double-quadrature definition;
    # the coefficient is checked against an independent nested quadrature
    from scipy.integrate import quad
    mu = 1.2
    zfn = bump(0.25, 0.5)
    prob = make_problem(0, mu, zfn, support=0.5)
    sol = edge.split_solution(prob, 0.5, 1.5)

    def inner(s):
        val, _ = quad(lambda t: t ** (mu - 1.0) * float(zfn(t)), 0.25,
                      min(s, 0.5), limit=200)
        return val

    ref, _ = quad(lambda s: inner(s) * s ** (-2.0 * mu - 1.0), 0.25, 1.0,
                  limit=200)
    assert sol.c_low == pytest.approx(ref, rel=1e-6)
    y_low = sol.y - sol.y_high
    mask = COARSE < 0.2
    assert np.allclose(y_low[mask], COARSE[mask] ** mu * sol.c_low)


def test_coefficient_bound_zero():
    prob = make_problem(2, 1.0, lambda x: np.zeros_like(np.asarray(x)),
                        support=0.5)
    lhs, rhs = edge.coefficient_bound_check(prob, 1.5)
    assert lhs == 0.0 and rhs == 0.0 and lhs <= rhs


def test_coefficient_bound_random_instances():
    # delta'' must exceed mu - 2 for the constant integral to converge
    rng = np.random.default_rng(11)
    for _ in range(30):
        n = int(rng.integers(1, 50))
        mu, dpp = (1.0, 0.25) if rng.random() < 0.5 else (2.3, 0.5)
        a = float(rng.uniform(0.05, 0.4))
        b = float(rng.uniform(a + 0.05, 0.85))
        amp = float(rng.uniform(0.1, 10.0))
        zf = bump(a, b)
        zfn = lambda x, zf=zf, amp=amp: amp * zf(x)
        prob = make_problem(n, mu, zfn, support=b)
        lhs, rhs = edge.coefficient_bound_check(prob, dpp)
        assert lhs <= rhs


def test_coefficient_decay_regression():
    delta_pp = 0.25
    zfn = bump(0.25, 0.5)
    cs = []
    ns = range(1, 51)
    for n in ns:
        prob = make_problem(n, 1.0, zfn, support=0.5)
        lhs, _ = edge.coefficient_bound_check(prob, delta_pp)
        cs.append(lhs)
    cs = np.array(cs)
    keep = cs > 1e-280
    slope = np.polyfit(np.log(np.array(ns)[keep]), np.log(cs[keep]), 1)[0]
    assert slope <= -delta_pp - 2.0 + 0.1


def test_coefficient_bound_divergent_constant():
    prob = make_problem(2, 1.0, bump(0.25, 0.5), support=0.5)
    with pytest.raises(edge.DivergentConstant):
        edge.coefficient_bound_check(prob, -1.5)


def test_kernel_modes_counts_and_residuals():
    modes = edge.kernel_modes(10)
    assert len(modes) == 20
    assert {m.n for m in modes} == set(range(-10, 0)) | set(range(1, 11))
    for m in modes:
        assert m.identity_residual <= 1e-8
        assert m.ode0_residual <= 1e-8
        assert m.ode1_residual <= 1e-8


def test_kernel_mode_count_grows():
    for nmax in (1, 3, 7):
        assert len(edge.kernel_modes(nmax)) == 2 * nmax
    with pytest.raises(ValueError):
        edge.kernel_modes(0)


def test_kernel_mode_leading_behaviour():
    modes = edge.kernel_modes(10)
    for m in modes:
        assert abs(m.log_ratio - 1.0) <= 1e-2
        assert abs(m.inverse_ratio - 1.0) <= 1e-6
    lead = [m for m in modes if abs(m.n) == 1]
    assert all("sin(theta) r^-1 dr ^ phi_21" == m.normal_form for m in lead)


def test_no_decaying_kernel_examples():
    assert edge.no_decaying_kernel_check(4.0, 0.0)
    assert edge.no_decaying_kernel_check(0.0, -1.0)
    assert edge.no_decaying_kernel_check(1.0, -1.9)
    with pytest.raises(ValueError):
        edge.no_decaying_kernel_check(1.0, -2.5)

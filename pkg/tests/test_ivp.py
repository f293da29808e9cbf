"""Initial-value solving, algebraic identities, and the 4x4 system."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from complex_sturm import (
    ArgumentError,
    ContractionError,
    combine,
    kodaira_check,
    lagrange_residual,
    neumann_solve,
    parse_interval,
    parse_potential,
    solve_ivp,
    solve_quad_system,
    solve_semiregular,
    wronskian,
)

# ---------------------------------------------------------------------------
# solve_ivp
# ---------------------------------------------------------------------------


def test_zero_potential_constant_solution(free_unit):
    traj = solve_ivp(free_unit, 0.0, 0.0, 1.0, 0.0)
    xs = np.linspace(0.0, 1.0, 21)
    assert np.allclose(traj.f(xs), 1.0, atol=1e-12)
    assert np.allclose(traj.df(xs), 0.0, atol=1e-12)


def test_zero_potential_sine_solution(free_unit):
    traj = solve_ivp(free_unit, 1.0, 0.0, 0.0, 1.0)
    xs = np.linspace(0.0, 1.0, 37)
    assert np.allclose(traj.f(xs), np.sin(xs), atol=1e-10)
    assert np.allclose(traj.df(xs), np.cos(xs), atol=1e-10)


def test_linear_potential_against_marching_oracle():
    p = parse_potential("x", parse_interval("0,1"))
    traj = solve_ivp(p, 0.0, 0.0, 1.0, 0.0)
    target = oracles.fd_march_richardson(lambda x: x, 0.0, 0.0, 1.0, 0.0, 1.0,
                                         n=3000)
    assert abs(traj.f(1.0) - target) < 1e-6


def test_overflow_cap_truncates_and_flags():
    # lam = -2500 grows like exp(50 x); the cap bites long before x = 10.
    p = parse_potential("0", parse_interval("0,10"))
    traj = solve_ivp(p, -2500.0, 0.0, 1.0, 0.0)
    assert traj.truncated
    assert traj.span[1] < 10.0
    with pytest.raises(ArgumentError):
        traj.f(9.9)


def test_solution_uniqueness_across_step_controls():
    p = parse_potential("(1 - 0.5i) * x^2", parse_interval("0,1"))
    kw = dict(p0=0.3 + 0.1j, p1=-1.0 + 0.25j)
    loose = solve_ivp(p, 2.0 + 1.0j, 0.5, rtol=1e-7, atol=1e-9, **kw)
    tight = solve_ivp(p, 2.0 + 1.0j, 0.5, rtol=1e-12, atol=1e-14, **kw)
    for x in (0.0, 1.0):
        fa, fb = loose.f(x), tight.f(x)
        assert abs(fa - fb) <= 1e-6 * (1.0 + abs(fb))


_coeff = st.complex_numbers(max_magnitude=1.0, allow_nan=False,
                            allow_infinity=False)


@given(coeffs=st.lists(_coeff, min_size=1, max_size=4),
       seed=st.integers(0, 2 ** 16))
def test_wronskian_constant_for_random_polynomials(coeffs, seed):
    p = parse_potential(oracles.poly_potential_text(coeffs),
                        parse_interval("0,1"))
    rng = np.random.default_rng(seed)
    iv = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    u = solve_ivp(p, lam, 0.5, iv[0], iv[1])
    v = solve_ivp(p, lam, 0.5, iv[2], iv[3])
    xs = np.linspace(0.0, 1.0, 50)
    w = wronskian(u, v, xs)
    drift = np.max(np.abs(w - w[25])) / (1.0 + abs(w[25]))
    assert drift < 1e-6


# ---------------------------------------------------------------------------
# solve_semiregular
# ---------------------------------------------------------------------------


def test_semiregular_zero_potential_is_identity(free_unit):
    traj = solve_semiregular(free_unit, 0.0, "a", 1.0)
    xs = np.linspace(0.0, traj.span[1], 15)
    assert np.allclose(traj.f(xs), xs, atol=1e-11)


def test_semiregular_reciprocal_against_series_oracle():
    p = parse_potential("1/x", parse_interval("0,1"))
    traj = solve_semiregular(p, 0.0, "a", 1.0)
    xs_o, fs_o = oracles.picard_semiregular(lambda x: 1.0 / x, 0.0, 0.0, 1.0,
                                            width=0.08, n=6000)
    sel = slice(200, None, 400)
    assert np.max(np.abs(traj.f(xs_o[sel]) - fs_o[sel])) < 1e-6
    # Leading behavior f = x + x^2/2 (1 + o(1)).
    eps = np.array([1e-3, 1e-4, 1e-5])
    ratio = traj.f(eps) / eps
    assert np.max(np.abs(ratio - 1.0 - eps / 2.0)) < 1e-4
    assert abs(ratio[-1] - 1.0) < 1e-4


def test_semiregular_rejects_reciprocal_square():
    p = parse_potential("1/x^2", parse_interval("0,1"))
    with pytest.raises(ArgumentError):
        solve_semiregular(p, 0.0, "a", 1.0)


# ---------------------------------------------------------------------------
# neumann_solve
# ---------------------------------------------------------------------------


def test_neumann_double_integration(free_unit):
    traj = neumann_solve(free_unit, 0.5, lambda x: np.ones_like(x),
                         (0.05, 0.95))
    xs = np.linspace(0.1, 0.9, 17)
    assert np.allclose(traj.f(xs), -0.5 * (xs - 0.5) ** 2, atol=1e-10)


def test_neumann_zero_forcing(free_unit):
    traj = neumann_solve(free_unit, 0.5, lambda x: np.zeros_like(x),
                         (0.1, 0.9))
    xs = np.linspace(0.1, 0.9, 9)
    assert np.max(np.abs(traj.f(xs))) < 1e-14


def test_neumann_matches_forced_ivp():
    p = parse_potential("10 * x^2", parse_interval("0,1"))
    g = lambda x: np.exp(1j * np.asarray(x, dtype=float))
    window = (0.35, 0.65)
    it = neumann_solve(p, 0.5, g, window)
    direct = solve_ivp(p, 0.0, 0.5, 0.0, 0.0, g=g, span=window)
    xs = np.linspace(0.36, 0.64, 15)
    assert np.max(np.abs(it.f(xs) - direct.f(xs))) < 1e-8


def test_neumann_rejects_non_contracting_window():
    p = parse_potential("40 + 0i", parse_interval("0,1"))
    with pytest.raises(ContractionError):
        neumann_solve(p, 0.5, lambda x: np.ones_like(x), (0.01, 0.99))


# ---------------------------------------------------------------------------
# wronskian / lagrange_residual / kodaira_check
# ---------------------------------------------------------------------------


def test_wronskian_cos_sin_is_one(free_pi):
    u = solve_ivp(free_pi, 1.0, 0.0, 1.0, 0.0)   # cos
    v = solve_ivp(free_pi, 1.0, 0.0, 0.0, 1.0)   # sin
    for x in (0.0, 0.7, 1.9, math.pi):
        assert abs(wronskian(u, v, x) - 1.0) < 1e-9


def test_wronskian_self_is_zero(free_unit):
    u = solve_ivp(free_unit, 2.0 - 1.0j, 0.3, 1.0, -2.0j)
    assert wronskian(u, u, 0.6) == 0


def test_wronskian_constancy_linear_potential_vs_oracle():
    p = parse_potential("x", parse_interval("0,1"))
    u = solve_ivp(p, 0.0, 0.0, 1.0, 0.0)
    v = solve_ivp(p, 0.0, 0.0, 0.0, 1.0)
    xs = np.linspace(0.0, 1.0, 50)
    w = wronskian(u, v, xs)
    assert np.max(np.abs(w - 1.0)) < 1e-8  # W at 0 is exactly 1
    # Independent endpoint cross-check with the RK4 oracle.
    rhs = oracles.schrodinger_rhs(lambda x: x, 0.0)
    fu = oracles.rk4_final(rhs, 0.0, [1.0, 0.0], 1.0, n=4000)
    fv = oracles.rk4_final(rhs, 0.0, [0.0, 1.0], 1.0, n=4000)
    w_oracle = fu[0] * fv[1] - fu[1] * fv[0]
    assert abs(w[-1] - w_oracle) < 1e-8


def test_lagrange_residual_homogeneous(free_unit):
    u = solve_ivp(free_unit, 3.0, 0.2, 1.0, 2.0)
    v = solve_ivp(free_unit, -1.0 + 1.0j, 0.2, 0.5j, 1.0)
    assert abs(lagrange_residual(u, v, 0.05, 0.95)) < 1e-9


def test_lagrange_residual_forced_small_case(free_unit):
    # u solves L u = g with g = 1 (so u = -x^2/2 from zero data), v = x.
    u = solve_ivp(free_unit, 0.0, 0.0, 0.0, 0.0,
                  g=lambda x: np.ones_like(x))
    v = solve_ivp(free_unit, 0.0, 0.0, 0.0, 1.0)
    assert abs(lagrange_residual(u, v, 0.0, 1.0)) < 1e-8


@given(coeffs=st.lists(_coeff, min_size=1, max_size=4),
       seed=st.integers(0, 2 ** 16))
def test_lagrange_residual_random(coeffs, seed):
    p = parse_potential(oracles.poly_potential_text(coeffs),
                        parse_interval("0,1"))
    rng = np.random.default_rng(seed)
    iv = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    u = solve_ivp(p, complex(rng.standard_normal(), rng.standard_normal()),
                  0.4, iv[0], iv[1])
    v = solve_ivp(p, complex(rng.standard_normal(), rng.standard_normal()),
                  0.4, iv[2], iv[3])
    assert abs(lagrange_residual(u, v, 0.1, 0.9)) < 1e-6


def test_kodaira_explicit_cases():
    assert kodaira_check((1, 0), (0, 1), (1, 1), (1, -1)) == 0
    f = (0.3 - 2.0j, 1.5 + 0.25j)
    assert kodaira_check(f, f, (1, 2), (3, 4j)) == 0


def test_kodaira_thousand_random_tuples(rng):
    zs = rng.standard_normal((1000, 4, 2)) + 1j * rng.standard_normal(
        (1000, 4, 2))
    worst = max(abs(kodaira_check(*map(tuple, row))) for row in zs)
    assert worst < 1e-12


# ---------------------------------------------------------------------------
# combine
# ---------------------------------------------------------------------------


def test_combine_is_pointwise_linear(free_unit):
    u = solve_ivp(free_unit, 1.0, 0.0, 1.0, 0.0)
    v = solve_ivp(free_unit, 1.0, 0.0, 0.0, 1.0)
    w = combine(u, v, 2.0, -1.5j)
    xs = np.linspace(0.0, 1.0, 11)
    assert np.allclose(w.f(xs), 2.0 * u.f(xs) - 1.5j * v.f(xs), atol=1e-12)


def test_combine_rejects_mixed_lambda(free_unit):
    u = solve_ivp(free_unit, 1.0, 0.5, 1.0, 0.0)
    v = solve_ivp(free_unit, 2.0, 0.5, 1.0, 0.0)
    with pytest.raises(ArgumentError):
        combine(u, v, 1.0, 1.0)


# ---------------------------------------------------------------------------
# Canonical bisolution independence
# ---------------------------------------------------------------------------


def test_canonical_bisolution_basis_independence():
    p = parse_potential("(0.4 + 0.3i) * x^3 - 1", parse_interval("0,1"))
    u1 = solve_ivp(p, 0.0, 0.3, 1.0, 0.0)
    v1 = solve_ivp(p, 0.0, 0.3, 0.0, 1.0)        # W(u1, v1; .) = 1
    u2 = solve_ivp(p, 0.0, 0.7, 1.0, 0.5)
    v2 = solve_ivp(p, 0.0, 0.7, 2.0, 0.0)        # W(u2, v2) = 1*0 - .5*2 ...
    # Normalize the second basis to W(u2, v2) = 1 exactly.
    w2 = wronskian(u2, v2, 0.7)
    v2 = combine(v2, None, 1.0 / w2, 0.0)
    rng = np.random.default_rng(3)
    xs = rng.uniform(0.05, 0.95, 20)
    ys = rng.uniform(0.05, 0.95, 20)
    k1 = u1.f(xs) * v1.f(ys) - u1.f(ys) * v1.f(xs)
    k2 = u2.f(xs) * v2.f(ys) - u2.f(ys) * v2.f(xs)
    assert np.max(np.abs(k1 - k2)) < 1e-8


# ---------------------------------------------------------------------------
# The 4x4 first-order system
# ---------------------------------------------------------------------------


def test_quad_system_constant_first_component(free_unit):
    traj = solve_quad_system(free_unit, 0.0, 0.5, (1.0, 0.0, 0.0, 0.0))
    xs = np.linspace(0.0, 1.0, 13)
    phi = traj.phi(xs)
    assert np.max(np.abs(phi[0] - 1.0)) < 1e-11
    assert np.max(np.abs(phi[1])) < 1e-11


def test_quad_system_second_component_consistency():
    p = parse_potential("x - 0.5i", parse_interval("0,1"))
    lam = 1.0 + 0.5j
    traj = solve_quad_system(p, lam, 0.5, (1.0, -0.5j, 0.25, 1.0))
    xs = np.linspace(0.2, 0.8, 7)
    h = 1e-4
    phi1 = lambda t: traj.phi(t)[0]
    second = (phi1(xs - h) - 2.0 * phi1(xs) + phi1(xs + h)) / h ** 2
    vbar = np.conj(p.eval(xs))
    lhs = traj.phi(xs)[1]
    rhs = vbar * phi1(xs) - second
    assert np.max(np.abs(lhs - rhs)) < 1e-5 * (1.0 + np.max(np.abs(lhs)))


def test_quad_system_four_independent_seeds(free_unit):
    seeds = np.eye(4)
    states = [solve_quad_system(free_unit, 1.0j, 0.5, s).phi(0.85)
              for s in seeds]
    det = np.linalg.det(np.asarray(states))
    assert abs(det) > 1e-6


def _tail_is_finite(trajs, edges):
    """Ratio test on shell increments of int |phi_1|^2 toward the endpoint."""
    for traj in trajs:
        increments = []
        for lo, hi in zip(edges[1:], edges[:-1]):
            xs = np.linspace(lo, hi, 201)
            d = np.abs(traj.phi(xs)[0]) ** 2
            increments.append(np.trapezoid(d, xs))
        increments = np.asarray(increments)
        tail = increments[-4:]
        if not np.all(tail[1:] <= 0.9 * tail[:-1] + 1e-300):
            return False
    return True


def test_atkinson_lambda_independence_of_weighted_tails():
    p = parse_potential("1/x", parse_interval("0,1"))
    edges = [0.5 * 2.0 ** -k for k in range(12)]
    verdicts = {}
    for lam in (1.0, 2.0 + 1.0j):
        trajs = [solve_quad_system(p, lam, 0.5, seed,
                                   span=(edges[-1], 0.5))
                 for seed in np.eye(4)]
        verdicts[lam] = _tail_is_finite(trajs, edges)
    assert verdicts[1.0], "tails at the probe spectral point must be finite"
    assert verdicts[2.0 + 1.0j] == verdicts[1.0]

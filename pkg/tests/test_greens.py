"""The five kernels: case tables, application, identities, jump structure."""

import numpy as np
import pytest

import oracles
from complex_sturm import (
    DIFFERENCE_IDENTITIES,
    DegenerateBasisError,
    KERNEL_KINDS,
    apply_kernel,
    build_kernel,
    combine,
    difference_identity_residual,
    jump_diagnostics,
    kernel_eval,
    parse_interval,
    parse_potential,
    solve_ivp,
    wronskian,
)


def _free_basis(free_unit):
    """u = x, v = 1 - x on ]0,1[ with W(v, u) = 1."""
    u = solve_ivp(free_unit, 0.0, 0.0, 0.0, 1.0)
    v = solve_ivp(free_unit, 0.0, 0.0, 1.0, -1.0)
    return u, v


# ---------------------------------------------------------------------------
# build_kernel / kernel_eval case tables
# ---------------------------------------------------------------------------


def test_two_sided_dirichlet_closed_form(free_unit):
    u, v = _free_basis(free_unit)
    k = build_kernel("two_sided", u, v)
    assert abs(kernel_eval(k, 0.25, 0.5) - 0.125) < 1e-12
    xs = np.linspace(0.05, 0.95, 10)
    for x in xs:
        for y in xs:
            expected = x * (1.0 - y) if x <= y else y * (1.0 - x)
            assert abs(kernel_eval(k, x, y) - expected) < 1e-10


def test_forward_kernel_closed_form(free_unit):
    u = solve_ivp(free_unit, 0.0, 0.0, 1.0, 0.0)      # 1
    v = solve_ivp(free_unit, 0.0, 0.0, 0.0, -1.0)     # -x, W(v, u) = 1
    k = build_kernel("forward", u, v)
    pts = np.linspace(0.1, 0.9, 7)
    for x in pts:
        for y in pts:
            expected = y - x if x > y else 0.0
            assert abs(kernel_eval(k, x, y) - expected) < 1e-10


def test_bisolution_closed_form(free_unit):
    # u = x, v = 1 has W(v, u) = 1; the canonical combination built from any
    # such pair is y - x (equivalently u = 1, v = x with W(u, v) = 1 in the
    # opposite-order convention), consistent with forward minus backward.
    u, _ = _free_basis(free_unit)                     # x
    v = solve_ivp(free_unit, 0.0, 0.0, 1.0, 0.0)      # 1
    k = build_kernel("bisolution", u, v)
    pts = np.linspace(0.1, 0.9, 6)
    for x in pts:
        for y in pts:
            assert abs(kernel_eval(k, x, y) - (y - x)) < 1e-10
            assert abs(kernel_eval(k, x, y) + kernel_eval(k, y, x)) < 1e-12


def test_bisolution_equals_forward_minus_backward(free_unit):
    u, v = _free_basis(free_unit)
    bis = build_kernel("bisolution", u, v)
    fwd = build_kernel("forward", u, v)
    bwd = build_kernel("backward", u, v)
    rng = np.random.default_rng(2)
    for x, y in zip(rng.uniform(0.05, 0.95, 10), rng.uniform(0.05, 0.95, 10)):
        diff = kernel_eval(fwd, x, y) - kernel_eval(bwd, x, y)
        assert abs(kernel_eval(bis, x, y) - diff) < 1e-10


def test_degenerate_basis_rejected(free_unit):
    u = solve_ivp(free_unit, 0.0, 0.0, 0.0, 1.0)
    also_u = solve_ivp(free_unit, 0.0, 0.0, 0.0, 1.0 + 1e-12)
    with pytest.raises(DegenerateBasisError):
        build_kernel("two_sided", u, also_u)


def test_kernel_kinds_catalog():
    assert set(KERNEL_KINDS) == {"two_sided", "forward", "backward",
                                 "at_d", "bisolution"}


# ---------------------------------------------------------------------------
# apply_kernel
# ---------------------------------------------------------------------------


def test_apply_two_sided_solves_dirichlet_bvp(free_unit):
    u, v = _free_basis(free_unit)
    k = build_kernel("two_sided", u, v)
    xs = np.linspace(0.05, 0.95, 11)
    got = apply_kernel(k, lambda y: np.ones_like(y), xs, support=(0.0, 1.0))
    assert np.max(np.abs(got - xs * (1.0 - xs) / 2.0)) < 1e-9


def test_apply_forward_vanishes_left_of_support(free_unit):
    u = solve_ivp(free_unit, 0.0, 0.0, 1.0, 0.0)
    v = solve_ivp(free_unit, 0.0, 0.0, 0.0, -1.0)
    k = build_kernel("forward", u, v)
    got = apply_kernel(k, lambda y: np.ones_like(y), np.array([0.5]),
                       support=(0.6, 0.8))
    assert abs(got[0]) < 1e-14


def test_apply_zero_function(free_unit):
    u, v = _free_basis(free_unit)
    k = build_kernel("two_sided", u, v)
    got = apply_kernel(k, lambda y: np.zeros_like(y),
                       np.linspace(0.2, 0.8, 5), support=(0.1, 0.9))
    assert np.max(np.abs(got)) == 0.0


# ---------------------------------------------------------------------------
# Difference identities
# ---------------------------------------------------------------------------


def test_difference_identities_free_truncated_one(free_unit):
    u, v = _free_basis(free_unit)
    probes = np.linspace(0.08, 0.92, 10)
    g = lambda y: np.ones_like(y)
    for identity in DIFFERENCE_IDENTITIES:
        res = difference_identity_residual(identity, u, v, g, probes,
                                           support=(0.2, 0.8))
        assert abs(res) < 1e-8, identity


def test_difference_identities_zero_function(free_unit):
    u, v = _free_basis(free_unit)
    res = difference_identity_residual(
        "two_sided_minus_forward", u, v, lambda y: np.zeros_like(y),
        np.array([0.5]), support=(0.2, 0.8))
    assert abs(res) == 0.0


@pytest.mark.parametrize("seed", [11, 12])
def test_difference_identities_random_cubic(seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    p = parse_potential(oracles.poly_potential_text(coeffs),
                        parse_interval("0,1"))
    lam = complex(rng.standard_normal(), rng.standard_normal())
    u = solve_ivp(p, lam, 0.0, 1.0, 0.3 - 0.2j)
    v = solve_ivp(p, lam, 1.0, 0.4 + 1.0j, 1.0)
    w = wronskian(u, v, 0.5)
    v = combine(v, None, 1.0 / w, 0.0)   # normalize W(v, u) = 1
    g, support = oracles.bump(rng.uniform(0.35, 0.65), 0.25)
    probes = rng.uniform(0.1, 0.9, 6)
    for identity in DIFFERENCE_IDENTITIES:
        res = difference_identity_residual(identity, u, v, g, probes,
                                           support=support)
        assert abs(res) < 1e-6, identity


# ---------------------------------------------------------------------------
# Jump diagnostics
# ---------------------------------------------------------------------------


def test_jump_structure_free_dirichlet(free_unit):
    u, v = _free_basis(free_unit)
    k = build_kernel("two_sided", u, v)
    for x in (0.5, 0.25):
        rec = jump_diagnostics(k, x)
        assert abs(rec.value_jump) < 1e-8
        assert abs(rec.derivative_jump - 1.0) < 1e-8


def test_jump_structure_random_potential():
    rng = np.random.default_rng(5)
    coeffs = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    p = parse_potential(oracles.poly_potential_text(coeffs),
                        parse_interval("0,1"))
    u = solve_ivp(p, 0.3j, 0.0, 0.0, 1.0)
    v = solve_ivp(p, 0.3j, 1.0, 0.0, 1.0)
    w = wronskian(u, v, 0.4)
    v = combine(v, None, 1.0 / w, 0.0)
    k = build_kernel("two_sided", u, v)
    for x in (0.3, 0.5, 0.7):
        rec = jump_diagnostics(k, x)
        assert abs(rec.value_jump) < 1e-6
        assert abs(rec.derivative_jump - 1.0) < 1e-6


def test_bisolution_is_smooth_through_diagonal(free_unit):
    u, _ = _free_basis(free_unit)
    v = solve_ivp(free_unit, 0.0, 0.0, 1.0, 0.0)
    k = build_kernel("bisolution", u, v)
    rec = jump_diagnostics(k, 0.5)
    assert abs(rec.value_jump) < 1e-10
    assert abs(rec.derivative_jump) < 1e-8


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------


def _normalized_pair(p, lam, data_u, data_v, du, dv):
    u = solve_ivp(p, lam, du, *data_u)
    v = solve_ivp(p, lam, dv, *data_v)
    w = wronskian(v, u, 0.5)
    v = combine(v, None, 1.0 / w, 0.0)
    return u, v


@pytest.mark.parametrize("kind", ["forward", "backward", "at_d",
                                  "bisolution"])
def test_basis_independence(kind):
    p = parse_potential("(0.2 - 0.7i) * x^2 + 0.3", parse_interval("0,1"))
    lam = 0.8 + 0.4j
    u1, v1 = _normalized_pair(p, lam, (1.0, 0.0), (0.0, 1.0), 0.2, 0.8)
    u2, v2 = _normalized_pair(p, lam, (0.7, -0.3), (0.2j, 1.1), 0.5, 0.4)
    d = 0.6 if kind == "at_d" else None
    k1 = build_kernel(kind, u1, v1, d=d)
    k2 = build_kernel(kind, u2, v2, d=d)
    rng = np.random.default_rng(9)
    xs = rng.uniform(0.05, 0.95, 12)
    ys = rng.uniform(0.05, 0.95, 12)
    vals1 = np.array([kernel_eval(k1, x, y) for x, y in zip(xs, ys)])
    vals2 = np.array([kernel_eval(k2, x, y) for x, y in zip(xs, ys)])
    assert np.max(np.abs(vals1 - vals2)) < 1e-8


def test_green_property_on_random_bumps():
    """Second-difference application of L recovers g at interior probes."""
    p = parse_potential("0.5 * x - 0.25i", parse_interval("0,1"))
    lam = 0.0
    u, v = _normalized_pair(p, lam, (0.0, 1.0), (0.3, 1.0), 0.0, 1.0)
    k = build_kernel("two_sided", u, v)
    rng = np.random.default_rng(17)
    h = 1e-3
    for _ in range(20):
        g, support = oracles.bump(rng.uniform(0.3, 0.7), rng.uniform(0.15, 0.25))
        probes = rng.uniform(0.15, 0.85, 20)
        stencil = np.concatenate([probes - h, probes, probes + h])
        vals = apply_kernel(k, g, stencil, support=support)
        fm, f0, fp = np.split(vals, 3)
        second = (fm - 2.0 * f0 + fp) / h ** 2
        lf = -second + (p.eval(probes) - lam) * f0
        assert np.max(np.abs(lf - g(probes))) < 1e-3


def test_two_sided_transpose_symmetry():
    p = parse_potential("(1 + 2i) * x^3 - x", parse_interval("0,1"))
    u, v = _normalized_pair(p, 0.5j, (0.0, 1.0), (0.1, 1.0), 0.0, 1.0)
    k = build_kernel("two_sided", u, v)
    rng = np.random.default_rng(23)
    for x, y in zip(rng.uniform(0.1, 0.9, 10), rng.uniform(0.1, 0.9, 10)):
        assert abs(kernel_eval(k, x, y) - kernel_eval(k, y, x)) < 1e-10


def test_forward_kernel_hilbert_schmidt_bound(free_pi):
    # u = sin, v = cos at lam = 1: W(v, u) = 1, both square integrable.
    u = solve_ivp(free_pi, 1.0, 0.0, 0.0, 1.0)
    v = solve_ivp(free_pi, 1.0, 0.0, 1.0, 0.0)
    k = build_kernel("forward", u, v)
    xs = np.linspace(1e-3, np.pi - 1e-3, 121)
    grid = np.array([[abs(kernel_eval(k, x, y)) ** 2 for y in xs]
                     for x in xs])
    hs_sq = oracles.trapezoid_2d(grid, xs, xs)
    norm_u = oracles.simpson(lambda t: np.abs(u.f(t)) ** 2, 0.0, np.pi).real
    norm_v = oracles.simpson(lambda t: np.abs(v.f(t)) ** 2, 0.0, np.pi).real
    assert hs_sq <= 2.0 * norm_u * norm_v + 1e-9

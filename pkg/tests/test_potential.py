"""Expression grammar, endpoint probes, and the step-potential generator."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from complex_sturm import (
    ArgumentError,
    ExpressionSyntaxError,
    Interval,
    parse_expr,
    parse_interval,
    parse_potential,
    pathological_potential,
    potential_from_json,
    potential_to_json,
    probe_endpoint,
)

# ---------------------------------------------------------------------------
# Interval
# ---------------------------------------------------------------------------


def test_interval_words_and_order():
    iv = parse_interval("0,pi")
    assert iv.a == 0.0 and iv.b == math.pi
    iv = parse_interval("-inf,inf")
    assert iv.a == -math.inf and iv.b == math.inf
    with pytest.raises(ArgumentError):
        parse_interval("1,0")
    with pytest.raises(ArgumentError):
        parse_interval("1,1")
    with pytest.raises(ArgumentError):
        parse_interval("oops,1")


def test_interval_finiteness_flags():
    iv = Interval(0.0, math.inf)
    assert iv.a_finite and not iv.b_finite


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_parse_zero_potential():
    p = parse_potential("0", parse_interval("0,1"))
    xs = np.linspace(0.1, 0.9, 7)
    assert np.all(p.eval(xs) == 0)


def test_parse_reciprocal_square():
    p = parse_potential("1/x^2", parse_interval("0,inf"))
    xs = np.array([0.5, 1.0, 2.0, 10.0])
    assert np.allclose(p.eval(xs), xs ** -2.0, rtol=0, atol=0)


def test_parse_oscillator_with_imaginary_coefficient():
    p = parse_potential("x^6 - 1.5i*x^2", parse_interval("1,inf"))
    xs = np.array([1.5, 2.0, 3.0])
    assert np.allclose(p.eval(xs), xs ** 6 - 1.5j * xs ** 2, rtol=1e-15)


def test_syntax_error_reports_position():
    with pytest.raises(ExpressionSyntaxError) as err:
        parse_expr("1 + $x")
    assert err.value.position == 4


def test_unknown_identifier_rejected():
    with pytest.raises(ExpressionSyntaxError):
        parse_expr("2 * y")
    with pytest.raises(ExpressionSyntaxError):
        parse_expr("foo(x)")


def test_non_integer_exponent_rejected():
    with pytest.raises(ExpressionSyntaxError):
        parse_expr("x^0.5")
    with pytest.raises(ExpressionSyntaxError):
        parse_expr("x^(1/2)")


def test_imaginary_literal_suffix():
    e = parse_expr("2.5i")
    assert e.eval(np.array([0.3]))[0] == 2.5j


# ---------------------------------------------------------------------------
# Round-trip stability
# ---------------------------------------------------------------------------

_CORPUS = [
    "0",
    "1/x^2",
    "x^6 - 1.5i*x^2",
    "-x^4",
    "sin(x) * exp(-x)",
    "piecewise(0, 1.0, 1i, 2.0, -x)",
    "(1.5 - 0.25i) * cos(x^2) + sqrt(x)",
    "x * (x - 1) * (x - 2.5) / (x + 4)",
    "tanh(x) - abs(x - 2) + log(x + 1)",
    "--x + -(x^3)",
]


@pytest.mark.parametrize("text", _CORPUS)
def test_round_trip_corpus(text):
    e = parse_expr(text)
    again = parse_expr(e.unparse())
    assert again.root == e.root
    xs = np.random.default_rng(0).uniform(2.0, 3.0, size=100)
    va = e.eval(xs)
    vb = again.eval(xs)
    assert np.array_equal(va, vb)


_finite = st.floats(min_value=-2.0, max_value=2.0,
                    allow_nan=False, allow_infinity=False)


def _const_text(draw):
    r = draw(_finite)
    if draw(st.booleans()):
        return repr(abs(r)) + "i"
    return repr(abs(r))


_leaf = st.one_of(
    st.just("x"),
    st.builds(lambda r: repr(abs(r)), _finite),
    st.builds(lambda r: repr(abs(r)) + "i", _finite),
)


def _combine(children):
    op = st.sampled_from(["+", "-", "*"])
    fn = st.sampled_from(["sin", "cos", "exp", "sinh", "tanh", "abs", "sqrt"])
    return st.one_of(
        st.tuples(children, op, children).map(
            lambda t: "({0} {1} {2})".format(*t)),
        st.tuples(fn, children).map(lambda t: "{0}({1})".format(*t)),
        st.tuples(children, st.integers(2, 4)).map(
            lambda t: "({0})^{1}".format(*t)),
        st.tuples(children, _finite).map(
            lambda t: "({0} / (x + {1}))".format(t[0], repr(3.0 + abs(t[1])))),
        children.map(lambda s: "-" + s if not s.startswith("-") else s),
    )


_expr_text = st.recursive(_leaf, _combine, max_leaves=12)


@given(text=_expr_text)
def test_round_trip_random_expressions(text):
    e = parse_expr(text)
    again = parse_expr(e.unparse())
    assert again.root == e.root
    xs = np.random.default_rng(7).uniform(2.0, 3.0, size=100)
    assert np.array_equal(again.eval(xs), e.eval(xs))


def test_scalar_and_array_eval_agree():
    e = parse_expr("(0.5 + 0.5i) * x^3 - sin(x)")
    xs = np.linspace(0.2, 1.7, 9)
    arr = e.eval(xs)
    fn = e.scalar_fn()
    scal = np.array([fn(float(t)) for t in xs])
    assert np.allclose(arr, scal, rtol=1e-15, atol=1e-300)


# ---------------------------------------------------------------------------
# Endpoint probes
# ---------------------------------------------------------------------------


def test_probe_zero_potential_regular(free_unit):
    assert probe_endpoint(free_unit, "a") == "regular"
    assert probe_endpoint(free_unit, "b") == "regular"


def test_probe_reciprocal_square_neither():
    p = parse_potential("1/x^2", parse_interval("0,1"))
    assert probe_endpoint(p, "a") == "neither"


def test_probe_reciprocal_semiregular_only():
    p = parse_potential("1/x", parse_interval("0,1"))
    verdict, info = probe_endpoint(p, "a", return_info=True)
    assert verdict == "semiregular_only"
    assert info["abs_V"]["status"] == "divergent"
    assert info["weighted"]["status"] == "convergent"


def test_probe_infinite_endpoint_is_neither(free_halfline):
    assert probe_endpoint(free_halfline, "b") == "neither"


@pytest.mark.parametrize("s, expected", [
    (0.25, "regular"),
    (0.4, "regular"),
    (1.0, "semiregular_only"),
    (1.3, "semiregular_only"),
    (2.0, "neither"),
    (2.5, "neither"),
])
def test_probe_power_family_matches_integral_oracle(s, expected):
    """For V = x^-s at 0: |V| integrable iff s < 1, |x| |V| iff s < 2."""
    # Only integer exponents exist in the grammar; exp(s log(1/x)) = x^-s.
    p = parse_potential("exp({0} * log(1/x))".format(repr(s)),
                        parse_interval("0,1"))
    verdict = probe_endpoint(p, "a")
    assert verdict == expected
    # Independent quadrature oracle: shrinking-window integrals of |V| and
    # |x V| settle (or keep growing) exactly as the verdict claims.
    def tail(weighted, eps):
        fn = (lambda x: x ** (1.0 - s)) if weighted else (lambda x: x ** -s)
        return oracles.simpson(fn, eps, 0.5, n=4000).real
    for weighted, conv in ((False, s < 1.0), (True, s < 2.0)):
        seq = [tail(weighted, 2.0 ** -k) for k in (8, 12, 16)]
        increments = np.abs(np.diff(seq))
        if conv:
            assert increments[-1] < 0.05 * (1.0 + abs(seq[-1]))
        else:
            assert seq[-1] > 2.0 * seq[0] or increments[-1] > increments[0]


def test_probe_monotone_regular_implies_semiregular():
    """A regular verdict must coexist with a convergent weighted integral."""
    for text in ("0", "sin(x)", "1 / sqrt(sqrt(x))"):
        p = parse_potential(text, parse_interval("0,1"))
        verdict, info = probe_endpoint(p, "a", return_info=True)
        assert verdict == "regular"
        assert "convergent" in info["weighted"]["status"]


# ---------------------------------------------------------------------------
# Step potential on sparse interval unions
# ---------------------------------------------------------------------------


def test_pathological_requires_positive_count():
    with pytest.raises(ArgumentError):
        pathological_potential(0)


def test_pathological_breakpoints_are_prime_power_intervals():
    p = pathological_potential(1, max_x=100.0)
    # J_2 keeps n = 2, 4, 8 (next power 16 starts at 240 > 100).
    expected = sorted({float(n * n - n) for n in (2, 4, 8)} |
                      {float(n * n + n) for n in (2, 4, 8)})
    assert list(p.expr.breakpoints()) == expected


def test_pathological_value_on_first_interval():
    p = pathological_potential(1)
    inside = p.eval(np.array([3.5]))[0]
    assert inside != 0
    # Same constant across the whole family J_2 = I_2 u I_4 u I_8 u ...
    assert p.eval(np.array([4.5]))[0] == inside
    assert p.eval(np.array([13.0]))[0] == inside
    assert p.eval(np.array([58.0]))[0] == inside


def test_pathological_zero_outside_support():
    p = pathological_potential(2)
    # Gaps of both J_2 (n = 2, 4, 8, ...) and J_3 (n = 3, 9, ...).
    for x in (1.0, 21.0, 100.0, 500.0, 800.0):
        assert p.eval(np.array([x]))[0] == 0


def test_pathological_piecewise_constant_between_breakpoints():
    p = pathological_potential(3, max_x=500.0)
    breaks = [0.0] + list(p.expr.breakpoints()) + [500.0]
    rng = np.random.default_rng(1)
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi - lo < 1e-9:
            continue
        xs = rng.uniform(lo + 1e-6 * (1 + lo), hi - 1e-6 * (1 + hi), size=5)
        vals = p.eval(xs)
        assert np.all(vals == vals[0])


def test_pathological_distinct_prime_values():
    p = pathological_potential(2)
    v2 = p.eval(np.array([3.5]))[0]   # I_2 = ]2, 6[
    v3 = p.eval(np.array([7.0]))[0]   # I_3 = ]6, 12[
    assert v2 != v3


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_potential_json_round_trip():
    p = parse_potential("x^2 - 0.5i", parse_interval("0,inf"))
    probe_endpoint(p, "a")
    doc = potential_to_json(p)
    assert doc["interval"]["b_finite"] is False
    q = potential_from_json(doc)
    xs = np.linspace(0.3, 5.0, 11)
    assert np.array_equal(p.eval(xs), q.eval(xs))
    assert q.interval.a == 0.0 and q.interval.b == math.inf

"""Potentials V(x) on an open interval ]a, b[.

A potential is a closed-form expression tree over the variable ``x`` with
complex constants, arithmetic, integer powers, a few elementary functions,
and first-class piecewise definitions. The expression grammar is the
serialization format: ``unparse`` emits text whose reparse reproduces the
tree node for node.

The module also classifies finite endpoints by adaptive quadrature into
``regular`` / ``semiregular_only`` / ``neither`` according to whether
``|V|`` or ``|x - e| |V|`` is integrable near the endpoint ``e``, and
constructs a family of bounded step potentials supported on sparse interval
unions indexed by prime powers (useful as an adversarial test case: bounded,
piecewise constant, yet badly behaved spectrally).
"""

import cmath
import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import jsonify, pair_to_complex
from .exceptions import ArgumentError, ExpressionSyntaxError, IndeterminateError
from .quadrature import integrate

__all__ = [
    "Interval",
    "parse_interval",
    "PotentialExpr",
    "Potential",
    "parse_expr",
    "parse_potential",
    "probe_endpoint",
    "pathological_potential",
    "potential_to_json",
    "potential_from_json",
]


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Open interval ]a, b[ with possibly infinite endpoints."""

    a: float
    b: float

    def __post_init__(self):
        a = float(self.a)
        b = float(self.b)
        if math.isnan(a) or math.isnan(b):
            raise ArgumentError("interval endpoints must not be NaN")
        if not a < b:
            raise ArgumentError("interval must satisfy a < b, got [{0}, {1}]".format(a, b))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def a_finite(self):
        return math.isfinite(self.a)

    @property
    def b_finite(self):
        return math.isfinite(self.b)

    def endpoint(self, which):
        if which == "a":
            return self.a
        if which == "b":
            return self.b
        raise ArgumentError("endpoint must be 'a' or 'b', got {0!r}".format(which))

    def contains(self, x):
        return self.a < x < self.b

    def __str__(self):
        return "]{0}, {1}[".format(self.a, self.b)


_INTERVAL_WORD = {"inf": math.inf, "+inf": math.inf, "-inf": -math.inf,
                  "pi": math.pi, "-pi": -math.pi, "2pi": 2 * math.pi}


def _interval_number(tok):
    t = tok.strip().lower()
    if t in _INTERVAL_WORD:
        return _INTERVAL_WORD[t]
    try:
        return float(t)
    except ValueError:
        raise ArgumentError("cannot read interval endpoint {0!r}".format(tok)) from None


def parse_interval(text):
    """Parse ``"a,b"`` into an :class:`Interval`.

    Endpoints are float literals or the words ``inf``, ``-inf``, ``pi``,
    ``-pi``, ``2pi``.
    """
    if isinstance(text, Interval):
        return text
    if isinstance(text, (tuple, list)) and len(text) == 2:
        return Interval(_interval_number(str(text[0])), _interval_number(str(text[1])))
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ArgumentError("interval must be 'a,b', got {0!r}".format(text))
    return Interval(_interval_number(parts[0]), _interval_number(parts[1]))


# ---------------------------------------------------------------------------
# Expression AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


@dataclass(frozen=True)
class Piecewise:
    """Right-open pieces: value is ``pieces[k]`` on ``[breaks[k-1], breaks[k])``
    with ``pieces[0]`` left of ``breaks[0]`` and ``pieces[-1]`` from
    ``breaks[-1]`` on."""

    breaks: tuple
    pieces: tuple


_FUNCTIONS = {
    "sqrt": (np.sqrt, cmath.sqrt),
    "exp": (np.exp, cmath.exp),
    "log": (np.log, cmath.log),
    "sin": (np.sin, cmath.sin),
    "cos": (np.cos, cmath.cos),
    "tan": (np.tan, cmath.tan),
    "sinh": (np.sinh, cmath.sinh),
    "cosh": (np.cosh, cmath.cosh),
    "tanh": (np.tanh, cmath.tanh),
    "abs": (np.abs, abs),
}

_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


def _prec(node):
    if isinstance(node, BinOp):
        return _ADD if node.op in "+-" else _MUL
    if isinstance(node, Neg):
        return _NEG
    if isinstance(node, Pow):
        return _POW
    if isinstance(node, Const):
        # Constants that print with a leading '-' bind like a unary minus.
        return _NEG if _const_is_negative(node.value) else _ATOM
    return _ATOM


def _const_is_negative(v):
    # copysign catches -0.0, whose text form also starts with '-'.
    if v.imag == 0.0:
        return math.copysign(1.0, v.real) < 0.0
    if v.real == 0.0:
        return math.copysign(1.0, v.imag) < 0.0
    return False


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?i?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),])"
    r")"
)


def _tokenize(src):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            stripped = src[pos:].lstrip()
            if not stripped:
                break
            bad_at = n - len(stripped)
            raise ExpressionSyntaxError("unrecognized character {0!r}".format(src[bad_at]),
                                        src, bad_at)
        kind = m.lastgroup
        text = m.group(kind)
        tokens.append((kind, text, m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind == "op" and text == op:
            return self.next()
        raise ExpressionSyntaxError("expected {0!r}".format(op), self.src, pos)

    def fail(self, message):
        raise ExpressionSyntaxError(message, self.src, self.peek()[2])

    # expression := term { (+|-) term }
    def expression(self):
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.next()
                node = BinOp(text, node, self.term())
            else:
                return node

    # term := unary { (*|/) unary }
    def term(self):
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.next()
                node = BinOp(text, node, self.unary())
            else:
                return node

    # unary := '-' unary | '+' unary | postfix
    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.next()
            return _fold_neg(self.unary())
        if kind == "op" and text == "+":
            self.next()
            return self.unary()
        return self.postfix()

    # postfix := atom [ ('^'|'**') integer ]
    def postfix(self):
        node = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text in ("^", "**"):
            self.next()
            node = Pow(node, self.exponent())
        return node

    def exponent(self):
        sign = 1
        kind, text, pos = self.peek()
        paren = kind == "op" and text == "("
        if paren:
            self.next()
            kind, text, pos = self.peek()
        if kind == "op" and text in "+-":
            if text == "-":
                sign = -1
            self.next()
            kind, text, pos = self.peek()
        if kind != "number":
            raise ExpressionSyntaxError("exponent must be an integer literal", self.src, pos)
        self.next()
        if text.endswith("i") or "." in text or "e" in text or "E" in text:
            raise ExpressionSyntaxError("exponent must be an integer literal", self.src, pos)
        if paren:
            self.expect_op(")")
        return sign * int(text)

    def atom(self):
        kind, text, pos = self.next()
        if kind == "number":
            if text.endswith("i"):
                return Const(complex(0.0, float(text[:-1] or "1")))
            return Const(complex(float(text), 0.0))
        if kind == "ident":
            if text == "x":
                return Var()
            if text == "i":
                return Const(1j)
            if text == "pi":
                return Const(complex(math.pi, 0.0))
            if text == "piecewise":
                return self.piecewise(pos)
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expression()
                self.expect_op(")")
                return Call(text, arg)
            raise ExpressionSyntaxError("unknown identifier {0!r}".format(text), self.src, pos)
        if kind == "op" and text == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        raise ExpressionSyntaxError("expected a value", self.src, pos)

    def piecewise(self, start_pos):
        self.expect_op("(")
        args = [self.expression()]
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == ",":
                self.next()
                args.append(self.expression())
            else:
                break
        self.expect_op(")")
        if len(args) < 3 or len(args) % 2 == 0:
            raise ExpressionSyntaxError(
                "piecewise needs an odd number of arguments >= 3 "
                "(expr, break, expr, ...)", self.src, start_pos)
        pieces = args[0::2]
        breaks = []
        for node in args[1::2]:
            val = _real_literal(node)
            if val is None:
                raise ExpressionSyntaxError(
                    "piecewise breakpoints must be real numeric literals",
                    self.src, start_pos)
            breaks.append(val)
        if any(b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])):
            raise ExpressionSyntaxError(
                "piecewise breakpoints must be strictly increasing",
                self.src, start_pos)
        return Piecewise(tuple(breaks), tuple(pieces))


def _fold_neg(node):
    if isinstance(node, Const):
        return Const(-node.value)
    return Neg(node)


def _real_literal(node):
    if isinstance(node, Const) and node.value.imag == 0.0:
        return node.value.real
    if isinstance(node, Neg):
        inner = _real_literal(node.arg)
        return None if inner is None else -inner
    return None


# ---------------------------------------------------------------------------
# Unparse
# ---------------------------------------------------------------------------

def _fmt_real(r):
    if math.isnan(r) or math.isinf(r):
        raise ArgumentError("cannot serialize non-finite constant {0!r}".format(r))
    return repr(float(r))


def _fmt_const(v):
    if v.imag == 0.0:
        return _fmt_real(v.real)
    if v.real == 0.0:
        return _fmt_real(v.imag) + "i"
    # Mixed constants cannot arise from parsing; emit an equivalent sum.
    sign = "+" if v.imag >= 0 else "-"
    return "({0} {1} {2}i)".format(_fmt_real(v.real), sign, _fmt_real(abs(v.imag)))


def _unparse(node):
    if isinstance(node, Const):
        return _fmt_const(node.value)
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        inner = _unparse(node.arg)
        if _prec(node.arg) < _NEG:
            inner = "(" + inner + ")"
        return "-" + inner
    if isinstance(node, BinOp):
        level = _ADD if node.op in "+-" else _MUL
        left = _unparse(node.left)
        if _prec(node.left) < level:
            left = "(" + left + ")"
        right = _unparse(node.right)
        if _prec(node.right) <= level:
            right = "(" + right + ")"
        return "{0} {1} {2}".format(left, node.op, right)
    if isinstance(node, Pow):
        base = _unparse(node.base)
        if _prec(node.base) < _ATOM:
            base = "(" + base + ")"
        return "{0}^{1}".format(base, node.exponent)
    if isinstance(node, Call):
        return "{0}({1})".format(node.func, _unparse(node.arg))
    if isinstance(node, Piecewise):
        parts = []
        for k, piece in enumerate(node.pieces):
            if k:
                parts.append(_fmt_real(node.breaks[k - 1]))
            parts.append(_unparse(piece))
        return "piecewise({0})".format(", ".join(parts))
    raise TypeError("not an expression node: {0!r}".format(node))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _eval_array(node, x):
    if isinstance(node, Const):
        return np.broadcast_to(np.asarray(node.value, dtype=complex), x.shape)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval_array(node.arg, x)
    if isinstance(node, BinOp):
        left = _eval_array(node.left, x)
        right = _eval_array(node.right, x)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    if isinstance(node, Pow):
        return _eval_array(node.base, x) ** node.exponent
    if isinstance(node, Call):
        return np.asarray(_FUNCTIONS[node.func][0](_eval_array(node.arg, x)),
                          dtype=complex)
    if isinstance(node, Piecewise):
        idx = np.searchsorted(np.asarray(node.breaks), x.real, side="right")
        out = np.empty(x.shape, dtype=complex)
        for k, piece in enumerate(node.pieces):
            mask = idx == k
            if mask.any():
                out[mask] = _eval_array(piece, x[mask])
        return out
    raise TypeError("not an expression node: {0!r}".format(node))


def _compile_scalar(node):
    """Build a fast scalar evaluator float -> complex using cmath."""
    if isinstance(node, Const):
        v = node.value
        return lambda x: v
    if isinstance(node, Var):
        return lambda x: x
    if isinstance(node, Neg):
        f = _compile_scalar(node.arg)
        return lambda x: -f(x)
    if isinstance(node, BinOp):
        lf = _compile_scalar(node.left)
        rf = _compile_scalar(node.right)
        if node.op == "+":
            return lambda x: lf(x) + rf(x)
        if node.op == "-":
            return lambda x: lf(x) - rf(x)
        if node.op == "*":
            return lambda x: lf(x) * rf(x)

        def _div(x):
            num = lf(x)
            den = rf(x)
            try:
                return num / den
            except ZeroDivisionError:
                return complex(math.inf, math.inf)
        return _div
    if isinstance(node, Pow):
        bf = _compile_scalar(node.base)
        n = node.exponent

        def _pow(x):
            try:
                return bf(x) ** n
            except ZeroDivisionError:
                return complex(math.inf, math.inf)
        return _pow
    if isinstance(node, Call):
        fn = _FUNCTIONS[node.func][1]
        af = _compile_scalar(node.arg)
        return lambda x: fn(af(x))
    if isinstance(node, Piecewise):
        breaks = list(node.breaks)
        fns = [_compile_scalar(p) for p in node.pieces]

        def _pw(x):
            r = x.real if isinstance(x, complex) else x
            return fns[bisect_right(breaks, r)](x)
        return _pw
    raise TypeError("not an expression node: {0!r}".format(node))


def _collect_breaks(node, acc):
    if isinstance(node, Piecewise):
        acc.update(node.breaks)
        for piece in node.pieces:
            _collect_breaks(piece, acc)
    elif isinstance(node, BinOp):
        _collect_breaks(node.left, acc)
        _collect_breaks(node.right, acc)
    elif isinstance(node, (Neg, Pow)):
        _collect_breaks(node.arg if isinstance(node, Neg) else node.base, acc)
    elif isinstance(node, Call):
        _collect_breaks(node.arg, acc)


# ---------------------------------------------------------------------------
# Public expression wrapper
# ---------------------------------------------------------------------------

class PotentialExpr:
    """Immutable expression tree with evaluation and exact serialization."""

    __slots__ = ("root", "_scalar", "_breaks")

    def __init__(self, root):
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "_scalar", None)
        object.__setattr__(self, "_breaks", None)

    def __setattr__(self, name, value):
        raise AttributeError("PotentialExpr is immutable")

    def __eq__(self, other):
        return isinstance(other, PotentialExpr) and self.root == other.root

    def __hash__(self):
        return hash(_unparse(self.root))

    def __repr__(self):
        return "PotentialExpr({0!r})".format(self.unparse())

    def eval(self, x):
        """Evaluate at ``x`` (scalar or array); returns complex of same shape."""
        arr = np.asarray(x, dtype=complex)
        scalar = arr.ndim == 0
        flat = np.atleast_1d(arr)
        with np.errstate(all="ignore"):
            out = np.asarray(_eval_array(self.root, flat), dtype=complex)
        return out[0] if scalar else out.reshape(arr.shape)

    def scalar_fn(self):
        """Fast scalar evaluator ``float -> complex`` (cached)."""
        if self._scalar is None:
            object.__setattr__(self, "_scalar", _compile_scalar(self.root))
        return self._scalar

    def unparse(self):
        """Serialize so that ``parse_expr(self.unparse()).root == self.root``."""
        return _unparse(self.root)

    def breakpoints(self):
        """Sorted piecewise breakpoints anywhere in the tree."""
        if self._breaks is None:
            acc = set()
            _collect_breaks(self.root, acc)
            object.__setattr__(self, "_breaks", tuple(sorted(acc)))
        return self._breaks


def parse_expr(text):
    """Parse expression text into a :class:`PotentialExpr`."""
    parser = _Parser(str(text))
    node = parser.expression()
    kind, _, pos = parser.peek()
    if kind != "end":
        raise ExpressionSyntaxError("unexpected trailing input", parser.src, pos)
    return PotentialExpr(node)


# ---------------------------------------------------------------------------
# Potential = expression + interval + endpoint metadata
# ---------------------------------------------------------------------------

class Potential:
    """A potential V on an open interval.

    The expression and interval are immutable; ``endpoint_meta`` caches the
    result of :func:`probe_endpoint` per endpoint (``None`` until probed).
    """

    __slots__ = ("expr", "interval", "endpoint_meta")

    def __init__(self, expr, interval):
        if not isinstance(expr, PotentialExpr):
            expr = parse_expr(expr)
        object.__setattr__(self, "expr", expr)
        object.__setattr__(self, "interval", parse_interval(interval))
        object.__setattr__(self, "endpoint_meta", {"a": None, "b": None})

    def __setattr__(self, name, value):
        raise AttributeError("Potential is immutable; endpoint_meta is the only "
                             "mutable cache and is updated in place")

    def __repr__(self):
        return "Potential({0!r} on {1})".format(self.expr.unparse(), self.interval)

    def eval(self, x):
        return self.expr.eval(x)

    def scalar_fn(self):
        return self.expr.scalar_fn()

    def breakpoints_within(self, lo, hi):
        """Piecewise breakpoints strictly inside ``(lo, hi)``."""
        return [t for t in self.expr.breakpoints() if lo < t < hi]


def parse_potential(text, interval):
    """Parse expression text and an interval into a :class:`Potential`.

    Endpoint metadata is left unprobed; call :func:`probe_endpoint` to fill it.
    """
    return Potential(parse_expr(text), parse_interval(interval))


# ---------------------------------------------------------------------------
# Endpoint probing
# ---------------------------------------------------------------------------

_PROBE_MAX_PANELS = 48
_PROBE_REL = 1e-8


def _probe_integral(p, e, sign, eps0, weight_power):
    """Classify convergence of int |x-e|^w |V| near endpoint e.

    Panels are the dyadic shells [e + sign*eps0/2^(k+1), e + sign*eps0/2^k].
    Returns (status, info) with status in {'convergent', 'divergent',
    'indeterminate'}.
    """
    fn = p.expr
    breaks = p.expr.breakpoints()

    def integrand(x):
        w = np.abs(x - e) ** weight_power if weight_power else 1.0
        return w * np.abs(fn.eval(x))

    panels = []
    sums = []
    total = 0.0
    converge_hits = 0
    double_hits = 0
    flat_run = 0
    for k in range(_PROBE_MAX_PANELS):
        x_far = e + sign * eps0 / (2.0 ** k)
        x_near = e + sign * eps0 / (2.0 ** (k + 1))
        if x_near == x_far or x_near == e:
            break  # below float resolution near the endpoint
        lo, hi = (x_near, x_far) if sign > 0 else (x_far, x_near)
        val = integrate(integrand, lo, hi, rtol=1e-10, atol=1e-16,
                        points=breaks, max_panels=400)
        pk = float(abs(val))
        if not math.isfinite(pk):
            return "divergent", {"panels": panels, "partial_sums": sums,
                                 "note": "non-finite panel"}
        prev_total = total
        total += pk
        panels.append(pk)
        sums.append(total)
        scale = 1.0 + abs(total)
        # Convergence: three successive halvings change the sum negligibly.
        if k > 0 and abs(total - prev_total) <= _PROBE_REL * scale:
            converge_hits += 1
            if converge_hits >= 3:
                return "convergent", {"panels": panels, "partial_sums": sums,
                                      "value": total}
        else:
            converge_hits = 0
        # Divergence, route 1: the partial sum keeps doubling.
        if k > 0 and prev_total > 1e-300 and total >= 2.0 * prev_total:
            double_hits += 1
            if double_hits >= 3:
                return "divergent", {"panels": panels, "partial_sums": sums,
                                     "note": "partial sums doubling"}
        # Divergence, route 2: shell integrals refuse to decay (catches
        # logarithmic divergence, where sums grow without ever doubling).
        if k > 0 and panels[-1] > 1e-14 * scale and panels[-1] > 0.9 * panels[-2]:
            flat_run += 1
            if flat_run >= 8:
                return "divergent", {"panels": panels, "partial_sums": sums,
                                     "note": "shell integrals not decaying"}
        else:
            flat_run = 0
    return "indeterminate", {"panels": panels, "partial_sums": sums}


def probe_endpoint(p, which, return_info=False):
    """Classify endpoint ``which`` ('a' or 'b') of potential ``p``.

    Returns one of ``'regular'`` (finite endpoint, ``|V|`` integrable up to
    it), ``'semiregular_only'`` (finite, only ``|x - e| |V|`` integrable), or
    ``'neither'``. Infinite endpoints are always ``'neither'``. The result is
    cached in ``p.endpoint_meta``.

    Raises
    ------
    IndeterminateError
        When the dyadic-shell evidence neither settles nor clearly diverges
        within the panel budget. The partial sums travel in ``.evidence``.
    """
    e = p.interval.endpoint(which)
    info = {"endpoint": which, "value": e}
    if not math.isfinite(e):
        p.endpoint_meta[which] = "neither"
        return ("neither", info) if return_info else "neither"

    width = p.interval.b - p.interval.a
    eps0 = min(width, 2.0) / 2.0
    sign = 1.0 if which == "a" else -1.0

    status_v, detail_v = _probe_integral(p, e, sign, eps0, 0)
    info["abs_V"] = dict(detail_v, status=status_v)
    if status_v == "convergent":
        result = "regular"
        p.endpoint_meta[which] = result
        info["weighted"] = {"status": "implied convergent"}
        return (result, info) if return_info else result

    status_w, detail_w = _probe_integral(p, e, sign, eps0, 1)
    info["weighted"] = dict(detail_w, status=status_w)
    if status_w == "indeterminate" or status_v == "indeterminate":
        raise IndeterminateError(
            "endpoint {0} probe did not settle within the panel budget".format(which),
            evidence=info)
    result = "semiregular_only" if status_w == "convergent" else "neither"
    p.endpoint_meta[which] = result
    return (result, info) if return_info else result


# ---------------------------------------------------------------------------
# Step potential on sparse prime-power interval unions
# ---------------------------------------------------------------------------

def _first_primes(count):
    primes = []
    n = 2
    while len(primes) < count:
        if all(n % q for q in primes if q * q <= n):
            primes.append(n)
        n += 1
    return primes


def _signed_rational(k):
    """Enumerate all rationals: 0, 1, -1, 1/2, -1/2, 2, -2, 1/3, ...

    Index 0 maps to 0; odd 2n-1 to the n-th Calkin-Wilf rational, even 2n to
    its negative. Every rational appears exactly once.
    """
    if k == 0:
        return Fraction(0)
    n = (k + 1) // 2
    q = Fraction(1)
    for _ in range(n - 1):
        q = 1 / (2 * (q.numerator // q.denominator) - q + 1)
    return q if k % 2 == 1 else -q


def _complex_rational(m):
    """m-th complex rational (m >= 1) via the diagonal pairing
    m = t(t+1)/2 + j, value rational(j) + i * rational(t - j)."""
    t = int((math.isqrt(8 * m + 1) - 1) // 2)
    while t * (t + 1) // 2 > m:
        t -= 1
    while (t + 1) * (t + 2) // 2 <= m:
        t += 1
    j = m - t * (t + 1) // 2
    re = _signed_rational(j)
    im = _signed_rational(t - j)
    return complex(float(re), float(im))


def pathological_potential(count, max_x=1.0e6):
    """Bounded step potential supported on sparse prime-power interval unions.

    For the first ``count`` primes p (in order), the potential takes the
    constant value ``c_p`` on ``J_p``, the union of the intervals
    ``]n^2 - n, n^2 + n[`` over prime powers ``n = p, p^2, p^3, ...``, and 0
    elsewhere on ``]0, inf[``. The values ``c_p`` walk an enumeration of the
    complex rationals, so with enough primes they visit any neighborhood in
    the complex plane.

    ``max_x`` truncates the construction: intervals starting beyond it are
    dropped. Interval counts grow only logarithmically in ``max_x``, so the
    default horizon of 1e6 keeps the expression small.
    """
    count = int(count)
    if count < 1:
        raise ArgumentError("count must be >= 1")
    max_x = float(max_x)
    if not max_x > 2.0:
        raise ArgumentError("max_x must exceed 2 so at least one interval fits")

    events = []  # (left, right, value)
    for m, prime in enumerate(_first_primes(count), start=1):
        c = _complex_rational(m)
        n = prime
        while n * n - n < max_x:
            events.append((float(n * n - n), float(n * n + n), c))
            n *= prime
    events.sort()

    breaks = []
    pieces = [Const(0j)]
    for left, right, c in events:
        node = (Const(complex(c.real, 0.0)) if c.imag == 0.0 else
                Const(complex(0.0, c.imag)) if c.real == 0.0 else
                BinOp("+", Const(complex(c.real, 0.0)), Const(complex(0.0, c.imag))))
        if breaks and breaks[-1] == left:
            # The previous interval ends exactly where this one starts:
            # overwrite the zero-width gap piece instead of adding a break.
            pieces[-1] = node
        else:
            breaks.append(left)
            pieces.append(node)
        breaks.append(right)
        pieces.append(Const(0j))

    root = Piecewise(tuple(breaks), tuple(pieces))
    return Potential(PotentialExpr(root), Interval(0.0, math.inf))


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def potential_to_json(p):
    """JSON-safe dict: expression text, interval record, endpoint metadata."""
    return jsonify({
        "expr": p.expr.unparse(),
        "interval": {"a": p.interval.a, "b": p.interval.b,
                     "a_finite": p.interval.a_finite,
                     "b_finite": p.interval.b_finite},
        "meta": dict(p.endpoint_meta),
    })


def potential_from_json(doc):
    """Inverse of :func:`potential_to_json`."""
    try:
        expr = parse_expr(doc["expr"])
        iv = doc["interval"]
        interval = Interval(_interval_number(str(iv["a"])),
                            _interval_number(str(iv["b"])))
    except (KeyError, TypeError, IndexError) as exc:
        raise ArgumentError("malformed potential document: {0}".format(exc)) from None
    p = Potential(expr, interval)
    meta = doc.get("meta") or {}
    for side in ("a", "b"):
        if meta.get(side) in ("regular", "semiregular_only", "neither"):
            p.endpoint_meta[side] = meta[side]
    return p

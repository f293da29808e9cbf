"""Initial-value solutions of L f = -f'' + V f = lam f + g.

Solutions are represented as :class:`SolutionTrajectory` objects: piecewise
dense interpolants over a covered span, evaluable together with their first
derivative at arbitrary points. Integration is segmented at the potential's
piecewise breakpoints, runs both directions from the anchor point, and stops
with a recorded truncation when the state magnitude reaches an overflow cap.

Also here: a fixed-point solver for endpoints where only ``(x-e) V`` is
integrable (solutions seeded by ``f(e) = 0``, ``f'(e) = p1``), a windowed
fixed-point solver for the Cauchy problem with both seeds at an interior
point, Wronskians and the Lagrange-identity residual, the four-term
Wronskian cyclic identity, and the associated first-order 4x4 system whose
first component solves ``(L conj(L) + lam) f = 0``.
"""

import math

import numpy as np
import scipy.integrate as _si
from scipy.interpolate import CubicSpline

from .exceptions import (ArgumentError, ContractionError, ConvergenceError)
from .potential import Potential, PotentialExpr, probe_endpoint
from .quadrature import integrate

__all__ = [
    "SolutionTrajectory",
    "QuadSystemTrajectory",
    "solve_ivp",
    "solve_semiregular",
    "neumann_solve",
    "combine",
    "wronskian",
    "lagrange_residual",
    "kodaira_check",
    "solve_quad_system",
    "OVERFLOW_CAP",
]

OVERFLOW_CAP = 1.0e150
_RTOL = 1.0e-10
_ATOL = 1.0e-12


def _cumulative_simpson(y, x):
    """Complex-safe cumulative Simpson (scipy's casts to the input dtype)."""
    re = _si.cumulative_simpson(np.real(y), x=x, initial=0.0)
    im = _si.cumulative_simpson(np.imag(y), x=x, initial=0.0)
    return re + 1j * im


def _as_scalar_fn(g):
    """Normalize a right-hand side to a scalar callable (or None)."""
    if g is None:
        return None
    if isinstance(g, Potential):
        return g.scalar_fn()
    if isinstance(g, PotentialExpr):
        return g.scalar_fn()
    if callable(g):
        return g
    raise ArgumentError("right-hand side must be callable or an expression")


def _as_array_fn(g):
    if g is None:
        return None
    if isinstance(g, (Potential, PotentialExpr)):
        return g.eval
    if callable(g):
        def wrapped(x):
            arr = np.asarray(x, dtype=float)
            try:
                out = np.asarray(g(arr), dtype=complex)
                if out.shape == arr.shape:
                    return out
            except (TypeError, ValueError):
                pass
            return np.asarray([g(float(t)) for t in np.atleast_1d(arr)],
                              dtype=complex).reshape(arr.shape)
        return wrapped
    raise ArgumentError("right-hand side must be callable or an expression")


class _Segment:
    """One dense piece of a trajectory: evaluator over [lo, hi]."""

    __slots__ = ("lo", "hi", "_fn")

    def __init__(self, lo, hi, fn):
        self.lo = float(min(lo, hi))
        self.hi = float(max(lo, hi))
        self._fn = fn

    def eval(self, x):
        return np.asarray(self._fn(x), dtype=complex)


def _spline_segment(x_nodes, rows):
    """Segment backed by one cubic spline per state component.

    ``rows`` has shape (dim, len(x_nodes)).
    """
    splines = [CubicSpline(x_nodes, row) for row in rows]

    def fn(x):
        return np.vstack([s(x) for s in splines])
    return _Segment(x_nodes[0], x_nodes[-1], fn)


class _TrajectoryBase:
    """Dense piecewise solution over a covered span."""

    def __init__(self, potential, lam, segments, mesh, values, rhs=None,
                 truncated=False, truncation=None):
        self.potential = potential
        self.lam = complex(lam)
        self.rhs = rhs
        self.segments = sorted(segments, key=lambda s: s.lo)
        self.mesh = np.asarray(mesh, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        self.truncated = bool(truncated)
        self.truncation = truncation
        self.span = (self.segments[0].lo, self.segments[-1].hi)
        self._edges = np.asarray([s.hi for s in self.segments])

    def eval(self, x):
        """State at ``x``: array of shape (dim,) + shape(x)."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        flat = np.atleast_1d(arr).astype(float).ravel()
        lo, hi = self.span
        slack = 1e-9 * (1.0 + abs(lo) + abs(hi))
        if flat.size and (flat.min() < lo - slack or flat.max() > hi + slack):
            raise ArgumentError(
                "evaluation point outside covered span [{0}, {1}]"
                " (trajectory truncated: {2})".format(lo, hi, self.truncated))
        flat = np.clip(flat, lo, hi)
        idx = np.minimum(np.searchsorted(self._edges, flat, side="left"),
                         len(self.segments) - 1)
        dim = self.values.shape[1]
        out = np.empty((dim, flat.size), dtype=complex)
        for k in np.unique(idx):
            mask = idx == k
            out[:, mask] = self.segments[k].eval(flat[mask])
        return out.reshape((dim,) + arr.shape)

    def covered(self, x):
        lo, hi = self.span
        return lo <= x <= hi


class SolutionTrajectory(_TrajectoryBase):
    """Solution f of ``-f'' + V f = lam f + g`` with dense ``(f, f')``."""

    def f(self, x):
        return self.eval(x)[0]

    def df(self, x):
        return self.eval(x)[1]

    def lf(self, x):
        """Value of L f = lam f + g at ``x``."""
        val = self.lam * self.f(x)
        if self.rhs is not None:
            val = val + _as_array_fn(self.rhs)(x)
        return val

    def is_homogeneous(self):
        return self.rhs is None


class QuadSystemTrajectory(_TrajectoryBase):
    """Solution of the first-order 4x4 system associated with L.

    The state is ``phi = (phi1, phi2, phi3, phi4)`` obeying::

        phi1' = -phi3
        phi2' = -phi4
        phi3' = -conj(V) phi1 + phi2
        phi4' = -(lam phi1 + V phi2)

    so that ``phi2 = conj(L) phi1`` and the first component solves
    ``(L conj(L) + lam) phi1 = 0``. The natural weight of the system is
    ``<phi, A phi> = |phi1|^2``.
    """

    def phi(self, x):
        return self.eval(x)

    def weight_density(self, x):
        return np.abs(self.eval(x)[0]) ** 2


def _segmented_integrate(rhs_fn, x0, x1, y0, break_points, rtol, atol, cap):
    """Integrate rhs from x0 toward x1, splitting at break points.

    Returns (segments, ts, ys, truncated, x_reached, y_end).
    """
    direction = 1.0 if x1 >= x0 else -1.0
    inner = [t for t in break_points if min(x0, x1) < t < max(x0, x1)]
    inner.sort(reverse=direction < 0)
    bounds = [x0] + inner + [x1]

    def cap_event(t, y):
        return float(np.max(np.abs(y))) - cap
    cap_event.terminal = True
    cap_event.direction = 1

    segments = []
    ts = []
    ys = []
    y = np.asarray(y0, dtype=complex)
    truncated = False
    x_reached = x0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if lo == hi:
            continue
        sol = _si.solve_ivp(rhs_fn, (lo, hi), y, method="DOP853",
                            rtol=rtol, atol=atol, dense_output=True,
                            events=cap_event)
        if sol.status == -1:
            raise ConvergenceError("integrator failed on [{0}, {1}]: {2}"
                                   .format(lo, hi, sol.message))
        seg_end = sol.t[-1]
        if seg_end != sol.t[0]:
            segments.append(_Segment(sol.t[0], seg_end, sol.sol))
            ts.append(sol.t)
            ys.append(sol.y)
        y = sol.y[:, -1]
        x_reached = seg_end
        if sol.status == 1:
            truncated = True
            break
    return segments, ts, ys, truncated, x_reached, y


def _assemble(potential, lam, parts, rhs, klass):
    """Merge directional integration parts into a trajectory."""
    segments = []
    mesh_list = []
    val_list = []
    truncated = False
    truncation = None
    for part, side in parts:
        segs, ts, ys, trunc, x_reached, _ = part
        segments.extend(segs)
        if ts:
            t_all = np.concatenate(ts)
            y_all = np.concatenate(ys, axis=1)
            order = np.argsort(t_all)
            mesh_list.append(t_all[order])
            val_list.append(y_all[:, order].T)
        if trunc:
            truncated = True
            truncation = {"side": side, "x": x_reached}
    if not segments:
        raise ArgumentError("empty integration span")
    mesh = np.concatenate(mesh_list) if mesh_list else np.empty(0)
    values = np.concatenate(val_list, axis=0) if val_list else np.empty((0, 2))
    order = np.argsort(mesh)
    return klass(potential, lam, segments, mesh[order], values[order],
                 rhs=rhs, truncated=truncated, truncation=truncation)


def _check_span(p, d, span):
    if span is None:
        a, b = p.interval.a, p.interval.b
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ArgumentError("interval endpoint is infinite; "
                                "pass an explicit finite span")
        span = (a, b)
    lo, hi = float(span[0]), float(span[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ArgumentError("span must be a finite ordered pair")
    if not (lo <= d <= hi):
        raise ArgumentError("anchor d={0} outside span [{1}, {2}]".format(d, lo, hi))
    eps = 1e-12 * (1.0 + abs(p.interval.a) + abs(p.interval.b))
    if lo < p.interval.a - eps or hi > p.interval.b + eps:
        raise ArgumentError("span exceeds the potential's interval")
    return lo, hi


def solve_ivp(p, lam, d, p0, p1, g=None, span=None, rtol=_RTOL, atol=_ATOL,
              cap=OVERFLOW_CAP):
    """Solve ``-f'' + V f = lam f + g`` with ``f(d) = p0``, ``f'(d) = p1``.

    Integration proceeds from ``d`` toward both span ends, split at piecewise
    breakpoints of V, and stops early (recording ``truncated``/``truncation``)
    if ``max(|f|, |f'|)`` reaches ``cap``.

    Parameters
    ----------
    p : Potential
    lam : complex
        Spectral parameter.
    d : float
        Anchor point inside the span.
    p0, p1 : complex
        Value and derivative at ``d``.
    g : callable or PotentialExpr, optional
        Inhomogeneity; ``None`` solves the homogeneous equation.
    span : (float, float), optional
        Finite subinterval to cover; defaults to the full interval when that
        is finite.

    Returns
    -------
    SolutionTrajectory
    """
    lo, hi = _check_span(p, d, span)
    lam = complex(lam)
    Vs = p.scalar_fn()
    gs = _as_scalar_fn(g)
    if gs is None:
        def rhs_fn(x, y):
            return (y[1], (Vs(x) - lam) * y[0])
    else:
        def rhs_fn(x, y):
            return (y[1], (Vs(x) - lam) * y[0] - gs(x))

    y0 = np.asarray([complex(p0), complex(p1)])
    breaks = p.expr.breakpoints()
    parts = []
    if hi > d:
        parts.append((_segmented_integrate(rhs_fn, d, hi, y0, breaks,
                                           rtol, atol, cap), "b"))
    if lo < d:
        parts.append((_segmented_integrate(rhs_fn, d, lo, y0, breaks,
                                           rtol, atol, cap), "a"))
    if not parts:
        raise ArgumentError("span has zero length")
    return _assemble(p, lam, parts, g, SolutionTrajectory)


def solve_quad_system(p, lam, d, phi0, span=None, rtol=_RTOL, atol=_ATOL,
                      cap=OVERFLOW_CAP):
    """Solve the associated first-order 4x4 system from state ``phi0`` at ``d``.

    See :class:`QuadSystemTrajectory` for the system. All four coordinates of
    ``phi0`` are free, so four independent seeds span the full solution space.
    """
    lo, hi = _check_span(p, d, span)
    lam = complex(lam)
    Vs = p.scalar_fn()

    def rhs_fn(x, y):
        V = Vs(x)
        return (-y[2], -y[3],
                -V.conjugate() * y[0] + y[1],
                -(lam * y[0] + V * y[1]))

    phi0 = np.asarray(phi0, dtype=complex)
    if phi0.shape != (4,):
        raise ArgumentError("phi0 must have exactly 4 components")
    breaks = p.expr.breakpoints()
    parts = []
    if hi > d:
        parts.append((_segmented_integrate(rhs_fn, d, hi, phi0, breaks,
                                           rtol, atol, cap), "b"))
    if lo < d:
        parts.append((_segmented_integrate(rhs_fn, d, lo, phi0, breaks,
                                           rtol, atol, cap), "a"))
    return _assemble(p, lam, parts, None, QuadSystemTrajectory)


# ---------------------------------------------------------------------------
# Fixed point at a semiregular endpoint
# ---------------------------------------------------------------------------

def _head_window(p, lam, e, sign, limit):
    """Largest dyadic window [0, delta] with int |(V - lam)(y) (y-e)| <= 1/2."""
    arr_V = p.eval
    breaks = p.expr.breakpoints()

    def weighted(x):
        return np.abs((arr_V(x) - lam) * (x - e))

    delta = limit
    floor = 1e-10 * (1.0 + abs(e))
    while True:
        lo, hi = (e, e + delta) if sign > 0 else (e - delta, e)
        val = float(abs(integrate(weighted, lo, hi, rtol=1e-8, atol=1e-14,
                                  points=breaks, max_panels=2000)))
        if val <= 0.5:
            return delta
        delta *= 0.5
        if delta < floor:
            raise ContractionError(
                "no contraction window at endpoint {0}; weighted integral "
                "stuck at {1:.3g}".format(e, val))


def solve_semiregular(p, lam, endpoint, p1, until=None, grid_n=4000,
                      tol=1e-13, max_iter=120):
    """Solution seeded at a finite endpoint where ``(x-e) V`` is integrable.

    Returns the unique solution of ``-f'' + V f = lam f`` with ``f(e) = 0``
    and ``f'(e) = p1``, built by a contracting fixed point for
    ``h = f / (x - e)`` on a window where ``int |(V-lam)(y)(y-e)| dy <= 1/2``,
    then continued by ordinary integration up to ``until``.

    The endpoint must probe as ``regular`` or ``semiregular_only``.
    The trajectory is evaluable at the endpoint itself: ``f(e) = 0``,
    ``f'(e) = p1``.
    """
    if endpoint not in ("a", "b"):
        raise ArgumentError("endpoint must be 'a' or 'b'")
    e = p.interval.endpoint(endpoint)
    if not math.isfinite(e):
        raise ArgumentError("endpoint {0} is infinite".format(endpoint))
    meta = p.endpoint_meta.get(endpoint)
    if meta is None:
        meta = probe_endpoint(p, endpoint)
    if meta == "neither":
        raise ArgumentError(
            "endpoint {0} is not semiregular: (x-e) V is not integrable there"
            .format(endpoint))

    sign = 1.0 if endpoint == "a" else -1.0
    lam = complex(lam)
    other = p.interval.b if endpoint == "a" else p.interval.a
    if until is None:
        if math.isfinite(other):
            until = 0.5 * (e + other)
        else:
            until = e + sign * 1.0
    until = float(until)
    if sign * (until - e) <= 0.0 or not p.interval.a <= min(e, until) or \
            not max(e, until) <= p.interval.b:
        raise ArgumentError("'until' must lie strictly on the interval side "
                            "of endpoint {0}".format(endpoint))

    limit = min(abs(until - e), 1.0)
    delta = _head_window(p, lam, e, sign, limit)

    # Graded grid in the distance variable t = sign * (x - e).
    n = int(grid_n)
    j = np.arange(n + 1, dtype=float)
    t = delta * (j / n) ** 2
    x_nodes = e + sign * t
    V_t = np.empty(n + 1, dtype=complex)
    V_t[1:] = p.eval(x_nodes[1:]) - lam
    V_t[0] = 0.0  # never used: weighted integrands carry a factor t

    # Seed in the t variable: g(t) = f(e + sign t), g'(0) = sign * p1.
    seed = complex(p1) * sign

    # First micro-cell moments: mu1 = int_0^{t1} Vt(y) y dy and
    # mu2 = int_0^{t1} Vt(y) y^2 dy, with h frozen at h(t1) across the cell.
    t1 = t[1]
    breaks_t = [sign * (bk - e) for bk in p.expr.breakpoints()
                if 0.0 < sign * (bk - e) < t1]

    def _vt_arr(ts):
        return p.eval(e + sign * ts) - lam

    mu1 = integrate(lambda ts: _vt_arr(ts) * ts, 0.0, t1, rtol=1e-10,
                    atol=1e-18, points=breaks_t, max_panels=1000)
    mu2 = integrate(lambda ts: _vt_arr(ts) * ts * ts, 0.0, t1, rtol=1e-10,
                    atol=1e-18, points=breaks_t, max_panels=1000)

    h = np.full(n + 1, seed, dtype=complex)
    t_pos = t[1:]
    for iteration in range(max_iter):
        w1 = V_t[1:] * t_pos * h[1:]
        w2 = w1 * t_pos
        C1 = np.empty(n + 1, dtype=complex)
        C2 = np.empty(n + 1, dtype=complex)
        C1[0] = 0.0
        C2[0] = 0.0
        C1[1:] = mu1 * h[1] + _cumulative_simpson(w1, t_pos)
        C2[1:] = mu2 * h[1] + _cumulative_simpson(w2, t_pos)
        h_new = np.empty_like(h)
        h_new[0] = seed
        h_new[1:] = seed + C1[1:] - C2[1:] / t_pos
        change = float(np.max(np.abs(h_new - h)))
        h = h_new
        if change <= tol * (1.0 + float(np.max(np.abs(h)))):
            break
    else:
        raise ConvergenceError("semiregular fixed point did not converge in "
                               "{0} iterations".format(max_iter))

    f_t = t * h
    fp_t = np.empty(n + 1, dtype=complex)
    fp_t[0] = seed
    fp_t[1:] = seed + C1[1:]

    # Back to x: f(x) = g(t(x)), f'(x) = sign * g'(t).
    f_x = f_t
    fp_x = sign * fp_t
    if sign > 0:
        xs = x_nodes
        head_f, head_fp = f_x, fp_x
    else:
        xs = x_nodes[::-1]
        head_f, head_fp = f_x[::-1], fp_x[::-1]
    head_seg = _spline_segment(xs, np.vstack([head_f, head_fp]))

    # Continue outward from the head edge by ordinary integration.
    x_edge = e + sign * delta
    y_edge = (complex(f_x[-1]), complex(fp_x[-1]))
    parts = []
    if sign * (until - x_edge) > 0.0:
        Vs = p.scalar_fn()

        def rhs_fn(x, y):
            return (y[1], (Vs(x) - lam) * y[0])
        part = _segmented_integrate(rhs_fn, x_edge, until, y_edge,
                                    p.expr.breakpoints(), _RTOL, _ATOL,
                                    OVERFLOW_CAP)
        parts.append((part, "b" if sign > 0 else "a"))

    segments = [head_seg]
    mesh = [xs]
    vals = [np.vstack([head_f, head_fp]).T]
    truncated = False
    truncation = None
    for part, side in parts:
        segs, ts, ys, trunc, x_reached, _ = part
        segments.extend(segs)
        for tt, yy in zip(ts, ys):
            order = np.argsort(tt)
            mesh.append(tt[order])
            vals.append(yy[:, order].T)
        if trunc:
            truncated = True
            truncation = {"side": side, "x": x_reached}
    mesh = np.concatenate(mesh)
    vals = np.concatenate(vals, axis=0)
    order = np.argsort(mesh)
    return SolutionTrajectory(p, lam, segments, mesh[order], vals[order],
                              rhs=None, truncated=truncated,
                              truncation=truncation)


# ---------------------------------------------------------------------------
# Windowed Cauchy fixed point at an interior anchor
# ---------------------------------------------------------------------------

def _window_contraction_bound(p, lam, d, w0, w1):
    breaks = p.expr.breakpoints()

    def towards(edge, lo, hi):
        def integrand(x):
            return np.abs((p.eval(x) - lam) * (x - edge))
        return float(abs(integrate(integrand, lo, hi, rtol=1e-8, atol=1e-14,
                                   points=breaks, max_panels=2000)))

    left = towards(w0, w0, d) if d > w0 else 0.0
    right = towards(w1, d, w1) if w1 > d else 0.0
    return max(left, right)


def neumann_solve(p, d, g, window, lam=0.0, p0=0.0, p1=0.0, grid_n=2000,
                  tol=1e-14, max_iter=300):
    """Solve ``-f'' + V f = lam f + g`` on a window around ``d`` by iteration.

    The fixed point is ``f(x) = p0 + p1 (x-d) +
    int_d^x (x-y) ((V(y)-lam) f(y) - g(y)) dy``, iterated from the seed term;
    with the default ``p0 = p1 = 0`` this is the action of the kernel that
    vanishes to second order at ``d``. The window ``(w0, w1)`` must satisfy
    the contraction bound
    ``max(int_{w0}^{d} |(V-lam)(y)(y-w0)| dy, int_d^{w1} |(V-lam)(y)(y-w1)| dy) < 1``.

    Returns a :class:`SolutionTrajectory` with ``rhs=g`` on the window.
    """
    w0, w1 = float(window[0]), float(window[1])
    if not (w0 <= d <= w1 and w0 < w1):
        raise ArgumentError("window must be an ordered pair containing d")
    eps = 1e-12 * (1.0 + abs(p.interval.a) + abs(p.interval.b))
    if w0 < p.interval.a - eps or w1 > p.interval.b + eps:
        raise ArgumentError("window exceeds the potential's interval")
    lam = complex(lam)
    bound = _window_contraction_bound(p, lam, d, w0, w1)
    if bound >= 1.0:
        raise ContractionError(
            "window contraction bound {0:.4g} >= 1; shrink the window"
            .format(bound))

    g_arr = _as_array_fn(g)
    if g_arr is None:
        def g_arr(x):
            return np.zeros(np.shape(x), dtype=complex)
    p0 = complex(p0)
    p1 = complex(p1)

    def _side(sign, edge):
        u_max = abs(edge - d)
        if u_max == 0.0:
            return None
        n = int(grid_n)
        u = np.linspace(0.0, u_max, n + 1)
        x_of_u = d + sign * u
        Vu = p.eval(x_of_u) - lam
        gu = g_arr(x_of_u)
        fu = np.full(n + 1, p0, dtype=complex) + (sign * p1) * u
        seed = fu.copy()
        for _ in range(max_iter):
            q = Vu * fu - gu
            C1 = _cumulative_simpson(q, u)
            C2 = _cumulative_simpson(q * u, u)
            f_new = seed + u * C1 - C2
            change = float(np.max(np.abs(f_new - fu)))
            fu = f_new
            if change <= tol * (1.0 + float(np.max(np.abs(fu)))):
                break
        else:
            raise ConvergenceError("window fixed point did not converge")
        dfu = sign * p1 + C1  # df/du at the final iterate
        return u, x_of_u, fu, dfu

    segments = []
    mesh = []
    vals = []
    for sign, edge in ((-1.0, w0), (1.0, w1)):
        side = _side(sign, edge)
        if side is None:
            continue
        u, x_of_u, fu, dfu = side
        fx = fu
        dfx = sign * dfu  # d/dx = sign * d/du
        if sign > 0:
            xs, rows = x_of_u, np.vstack([fx, dfx])
        else:
            xs, rows = x_of_u[::-1], np.vstack([fx[::-1], dfx[::-1]])
        segments.append(_spline_segment(xs, rows))
        mesh.append(xs)
        vals.append(rows.T)
    mesh = np.concatenate(mesh)
    vals = np.concatenate(vals, axis=0)
    order = np.argsort(mesh)
    return SolutionTrajectory(p, lam, segments, mesh[order], vals[order],
                              rhs=g if g is not None else None)


# ---------------------------------------------------------------------------
# Linear combinations
# ---------------------------------------------------------------------------

class _ComboSegment:
    __slots__ = ("lo", "hi", "_parts")

    def __init__(self, lo, hi, parts):
        self.lo = lo
        self.hi = hi
        self._parts = parts  # list of (coeff, trajectory)

    def eval(self, x):
        total = None
        for c, t in self._parts:
            term = c * t.eval(x)
            total = term if total is None else total + term
        return total


def combine(t1, t2, c1, c2):
    """Pointwise combination ``c1 t1 + c2 t2`` of two homogeneous
    trajectories at the same spectral parameter.

    The result covers the intersection of the two spans.
    """
    if t2 is not None and abs(t1.lam - t2.lam) > 1e-12 * (1.0 + abs(t1.lam)):
        raise ArgumentError("cannot combine trajectories at different lambda")
    if not t1.is_homogeneous() or (t2 is not None and not t2.is_homogeneous()):
        raise ArgumentError("can only combine homogeneous trajectories")
    parts = [(complex(c1), t1)]
    lo, hi = t1.span
    truncated = t1.truncated
    if t2 is not None and c2 != 0:
        parts.append((complex(c2), t2))
        lo = max(lo, t2.span[0])
        hi = min(hi, t2.span[1])
        truncated = truncated or t2.truncated
    if not lo < hi:
        raise ArgumentError("trajectory spans do not overlap")
    seg = _ComboSegment(lo, hi, parts)
    mesh = np.asarray([lo, hi])
    values = np.stack([seg.eval(mesh[0]), seg.eval(mesh[1])])
    out = SolutionTrajectory(t1.potential, t1.lam, [seg], mesh, values,
                             rhs=None, truncated=truncated)
    return out


# ---------------------------------------------------------------------------
# Wronskian algebra
# ---------------------------------------------------------------------------

def wronskian(f, g, x):
    """W(f, g; x) = f(x) g'(x) - f'(x) g(x), vectorized over ``x``."""
    fe = f.eval(x)
    ge = g.eval(x)
    return fe[0] * ge[1] - fe[1] * ge[0]


def lagrange_residual(u, v, x1, x2):
    """Residual of the integrated Lagrange identity on [x1, x2].

    For trajectories u, v solving ``L u = lam_u u + g_u`` etc., the identity
    ``int_{x1}^{x2} ((L u) v - u (L v)) dx = W(u, v; x2) - W(u, v; x1)``
    holds exactly; the returned complex number is (left side) - (right side)
    and measures integration error.
    """
    x1 = float(x1)
    x2 = float(x2)
    gu = _as_array_fn(u.rhs)
    gv = _as_array_fn(v.rhs)

    def integrand(x):
        ue = u.eval(x)
        ve = v.eval(x)
        lu = u.lam * ue[0] + (gu(x) if gu is not None else 0.0)
        lv = v.lam * ve[0] + (gv(x) if gv is not None else 0.0)
        return lu * ve[0] - ue[0] * lv

    pts = u.potential.breakpoints_within(min(x1, x2), max(x1, x2))
    quad = integrate(integrand, x1, x2, rtol=1e-11, atol=1e-14, points=pts)
    return quad - (wronskian(u, v, x2) - wronskian(u, v, x1))


def kodaira_check(f, g, h, k):
    """Cyclic Wronskian identity residual for four states at one point.

    Each argument is a pair ``(value, derivative)``. With
    ``W(p, q) = p0 q1 - p1 q0`` the combination
    ``W(f,g) W(h,k) + W(g,h) W(f,k) + W(h,f) W(g,k)`` vanishes identically;
    the returned value is that combination.
    """
    def w2(pq, rs):
        return pq[0] * rs[1] - pq[1] * rs[0]
    return w2(f, g) * w2(h, k) + w2(g, h) * w2(f, k) + w2(h, f) * w2(g, k)

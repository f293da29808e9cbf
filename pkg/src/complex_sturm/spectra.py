"""Eigenvalues of boundary realizations, resolvents, and a finite-difference
oracle.

A realization is a potential together with separated boundary conditions
(at most one functional per endpoint). Its characteristic function is the
Wronskian ``W(v, u)`` of two shooting solutions — ``u`` satisfying the
condition at ``a``, ``v`` the condition at ``b`` — which is x-independent,
analytic in ``lambda``, and vanishes exactly at the eigenvalues. Three
shooting routes realize a side's condition:

- a vector ``(alpha0, alpha1)`` at a finite endpoint: Cauchy data
  ``(alpha0, alpha1)`` at the endpoint itself;
- a trajectory representative: a basis from the representative's interior
  edge is paired with it through the endpoint-limit Wronskian and the
  null combination of the pairing is taken;
- no condition (a side where not every solution is square-integrable):
  the unique square-integrable direction, found by the tail-deflation
  scan, shot inward from its anchor. The anchor acts as an auto-grown
  cutoff; a deeper rescan bounds the selection error.

Roots are located by the argument principle on rectangles: adaptive edge
sampling until the discrete winding number is phase-alias-free, recursive
subdivision until each cell isolates one root, then Newton polishing with
``dW/dlambda`` from the variational equation. The Newton derivative is
only valid when both sides shoot from lambda-independent data (vector
conditions); otherwise a secant iteration replaces it.

The independent ground truth is a second-order central finite-difference
matrix with one-sided second-order boundary rows, eliminated into a dense
interior matrix; eigenvalues are Richardson-extrapolated across grid
refinements, and numerical-range samples are taken in summation-by-parts
form so that boundary conditions enter exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._util import thread_map
from .boundary import (BoundarySpec, boundary_index, dim_U,
                       wronskian_at_endpoint)
from .exceptions import (ArgumentError, DegenerateBasisError,
                         EigenvalueSearchError, IndeterminateError)
from .greens import build_kernel
from .ivp import combine, solve_ivp, wronskian
from .potential import Potential

__all__ = [
    "Realization",
    "Eigenvalue",
    "characteristic_wronskian",
    "find_eigenvalues",
    "shooting_solutions",
    "resolvent_kernel",
    "FDMatrix",
    "fd_oracle_build",
    "fd_eigenvalues",
    "richardson_eigenvalues",
    "fd_numerical_range",
    "fd_maximal_kernel_dim",
    "one_sided_fd_eigenvalues",
]


# ---------------------------------------------------------------------------
# Realizations and shooting routes
# ---------------------------------------------------------------------------

@dataclass
class Realization:
    """A potential with separated boundary conditions.

    A side may carry no functional only where not every solution is
    square-integrable (boundary index 0); conversely an index-0 side must
    not carry one (the condition would be vacuous there). These pattern
    constraints need an endpoint classification, so they are verified by
    :meth:`check_well_posed` (and by the eigenvalue search) rather than at
    construction time.
    """

    potential: Potential
    spec: BoundarySpec = field(default_factory=BoundarySpec)

    def check_well_posed(self, lam=1j):
        """Verify the condition pattern against the boundary indexes.

        Returns ``{"a": nu_a, "b": nu_b}`` on success; raises
        :class:`~complex_sturm.exceptions.ArgumentError` when an index-0
        side carries a functional or an index-2 side lacks one.
        """
        out = {}
        for side in ("a", "b"):
            nu = boundary_index(self.potential, side, lam=lam)
            fn = self.spec.side(side)
            if nu == 0 and fn is not None:
                raise ArgumentError(
                    "endpoint {0} has boundary index 0; a condition there "
                    "is vacuous and the realization is rejected".format(side))
            if nu == 2 and fn is None:
                raise ArgumentError(
                    "endpoint {0} has boundary index 2; without a condition "
                    "there the eigenvalue problem is ill-posed".format(side))
            out[side] = nu
        return out

    def as_json(self):
        return {"potential": self.potential.as_json(),
                "spec": self.spec.as_json()}


def _decay_data(p, side, lam, shells=18):
    """Anchor point and Cauchy data of the square-integrable direction near
    an endpoint carrying no boundary condition.

    Three sub-routes, keyed on the tail-scan evidence: a cleanly
    square-integrable basis direction is taken as-is; a deflated direction
    uses the fitted coefficient; and when the scan was cancellation- or
    overflow-limited (both directions grow too fast to compare), the
    decaying direction is imposed by its logarithmic derivative
    ``-sqrt(V - lambda)`` at a far cutoff, from which the inward
    integration is self-correcting — the admixture of the growing mode
    shrinks by the accumulated growth factor on the way in.
    """
    dim, ev = dim_U(p, side, lam=lam, shells=shells, return_evidence=True)
    if dim == 2:
        raise ArgumentError(
            "endpoint {0} carries no boundary condition but every solution "
            "is square-integrable there; the eigenvalue problem is "
            "ill-posed without one".format(side))
    if dim == 0:
        raise IndeterminateError(
            "no square-integrable direction near endpoint {0} at this "
            "lambda; the shooting solution is undefined".format(side),
            evidence=ev)
    anchor = ev["shell_edges"][0]
    c1, c2 = ev["class_u1"], ev["class_u2"]
    if c1 == "L2" and c2 != "L2":
        return float(anchor), (1.0 + 0.0j, 0.0j)
    if c2 == "L2" and c1 != "L2":
        return float(anchor), (0.0j, 1.0 + 0.0j)
    if "deflation_coefficient" in ev:
        c = complex(ev["deflation_coefficient"])
        return float(anchor), (-c, 1.0 + 0.0j)
    # Overflow-limited scan: place the cutoff where the accumulated growth
    # passed ~1e40 (enough suppression, far from the overflow cap) and
    # impose the decaying logarithmic derivative there.
    edges = ev["shell_edges"]
    grow = np.cumsum(np.asarray(ev["shells_u1"], dtype=float)
                     + np.asarray(ev["shells_u2"], dtype=float))
    big = np.nonzero(grow >= 1e40)[0]
    cutoff = float(edges[1 + big[0]] if big.size else edges[-1])
    v_cut = complex(p.eval(np.array([cutoff]))[0])
    mu = np.sqrt(complex(v_cut - lam))
    outward = 1.0 if cutoff >= anchor else -1.0
    return cutoff, (1.0 + 0.0j, -outward * mu)


def _route(r, side):
    """Shooting route for one side: ``("vector", e, vec)``, ``("rep", rep)``
    or ``("decay", None, None)``."""
    fn = r.spec.side(side)
    e = r.potential.interval.endpoint(side)
    if fn is None:
        return ("decay", None, None)
    if fn.vector is not None:
        if not math.isfinite(e):
            raise ArgumentError(
                "vector boundary condition at the infinite endpoint "
                "{0}".format(side))
        return ("vector", float(e), fn.vector)
    return ("rep", None, fn.rep)


def _rep_solution(p, lam, rep, side, lo, hi):
    """Solution annihilated by the representative's endpoint pairing.

    A Cauchy basis ``s1, s2`` from the representative's interior edge is
    paired with the representative through the endpoint-limit Wronskian;
    the combination ``w2 s1 - w1 s2`` is then in the functional's kernel
    whatever ``lambda`` is (the pairing is taken as a limit, so this stays
    exact away from the representative's own spectral parameter).
    """
    r_lo, r_hi = rep.span
    x0 = r_hi if side == "a" else r_lo
    lo = min(lo, r_lo, x0)
    hi = max(hi, r_hi, x0)
    s1 = solve_ivp(p, lam, x0, 1.0, 0.0, span=(lo, hi))
    s2 = solve_ivp(p, lam, x0, 0.0, 1.0, span=(lo, hi))
    w1 = wronskian_at_endpoint(rep, s1, side)
    w2 = wronskian_at_endpoint(rep, s2, side)
    scale = max(abs(w1), abs(w2))
    if scale == 0.0:
        raise IndeterminateError(
            "the representative at {0} pairs to zero with a full solution "
            "basis; its functional does not constrain anything at this "
            "lambda".format(side))
    return combine(s1, s2, w2 / scale, -w1 / scale)


def _shooting_plan(r, lam, shells=18):
    """Per-side shooting start at this lambda: ``{side: (kind, x0,
    payload)}`` with payload the Cauchy data (vector/decay) or the
    representative (rep)."""
    plan = {}
    for side in ("a", "b"):
        kind, e, carrier = _route(r, side)
        if kind == "vector":
            plan[side] = (kind, e, carrier)
        elif kind == "rep":
            edge = carrier.span[1] if side == "a" else carrier.span[0]
            plan[side] = (kind, float(edge), carrier)
        else:
            x0, data = _decay_data(r.potential, side, lam, shells=shells)
            plan[side] = (kind, x0, data)
    return plan


def _shoot(r, lam, side, plan, until):
    """Trajectory satisfying the condition at ``side``, covering from its
    shooting start to ``until``."""
    p = r.potential
    kind, x0, payload = plan[side]
    if kind == "rep":
        lo, hi = sorted((x0, until))
        return _rep_solution(p, lam, payload, side, lo, hi)
    lo, hi = sorted((x0, until))
    return solve_ivp(p, lam, x0, payload[0], payload[1], span=(lo, hi))


def _plan_wronskian(r, lam, plan):
    """``W(v, u)`` at the midpoint between the two shooting starts."""
    xa, xb = plan["a"][1], plan["b"][1]
    m = 0.5 * (xa + xb)
    if xa == xb and plan["a"][0] != "rep" and plan["b"][0] != "rep":
        # Both sides start at the same interior point (e.g. tail-selected
        # data on a full-line problem): the Wronskian needs no integration.
        da, db = plan["a"][2], plan["b"][2]
        return complex(db[0] * da[1] - db[1] * da[0]), m
    u = _shoot(r, lam, "a", plan, m)
    v = _shoot(r, lam, "b", plan, m)
    return complex(wronskian(v, u, m)), m


def characteristic_wronskian(r, lam, return_info=False):
    """``W(v, u)`` of the two shooting solutions; zero exactly at
    eigenvalues of the realization.

    With ``return_info`` any decay-selected side is re-derived with a
    deeper tail scan (the auto-grown cutoff roughly sextuples) and the
    resulting Wronskian shift is reported as the truncation/selection
    error estimate.
    """
    lam = complex(lam)
    plan = _shooting_plan(r, lam)
    w, m = _plan_wronskian(r, lam, plan)
    if not return_info:
        return w
    info = {"matching_point": float(m), "w": w, "truncation_error": 0.0}
    if r.spec.at_a is None or r.spec.at_b is None:
        deeper = _shooting_plan(r, lam, shells=24)
        w2, _ = _plan_wronskian(r, lam, deeper)
        info["truncation_error"] = abs(w2 - w)
        info["w_refined"] = w2
    return w, info


# ---------------------------------------------------------------------------
# Newton / secant polishing
# ---------------------------------------------------------------------------

def _cauchy_with_sensitivity(p, lam, x0, data, x1, rtol=1e-11, atol=1e-13):
    """Value/slope at ``x1`` of the solution with Cauchy ``data`` at ``x0``,
    together with their lambda-derivatives from the variational equation
    (same operator, forcing ``-f``, zero initial data)."""
    from scipy.integrate import solve_ivp as _scipy_ivp

    lam = complex(lam)
    scalar_V = p.scalar_fn()

    def rhs(x, y):
        V = scalar_V(x)
        return (y[1], (V - lam) * y[0],
                y[3], (V - lam) * y[2] - y[0])

    y = np.array([data[0], data[1], 0.0, 0.0], dtype=complex)
    lo, hi = sorted((x0, x1))
    inner = sorted(p.breakpoints_within(lo, hi))
    cuts = [x0] + (inner if x1 >= x0 else inner[::-1]) + [x1]
    x = x0
    for nxt in cuts[1:]:
        if nxt == x:
            continue
        sol = _scipy_ivp(rhs, (x, nxt), y, method="DOP853", rtol=rtol,
                         atol=atol)
        if not sol.success:
            raise IndeterminateError("shooting integration failed: "
                                     + sol.message)
        y = sol.y[:, -1]
        x = float(sol.t[-1])
    return y


def _newton_polish(r, lam0, scale, max_iter=40):
    """Polish a root of the characteristic function.

    Newton with the variational-equation derivative when both sides shoot
    from lambda-independent Cauchy data (vector conditions); otherwise a
    secant iteration, which never needs the derivative and so tolerates
    the lambda-dependent decay selection and representative pairing.
    """
    p = r.potential
    route_a = _route(r, "a")
    route_b = _route(r, "b")

    if route_a[0] == "vector" and route_b[0] == "vector":
        xa, da = route_a[1], route_a[2]
        xb, db = route_b[1], route_b[2]
        m = 0.5 * (xa + xb)
        lam = complex(lam0)
        for _ in range(max_iter):
            ya = _cauchy_with_sensitivity(p, lam, xa, da, m)
            yb = _cauchy_with_sensitivity(p, lam, xb, db, m)
            u, du, su, dsu = ya
            v, dv, sv, dsv = yb
            w = v * du - dv * u
            if abs(w) <= 1e-12 * scale:
                return lam, abs(w)
            dw = sv * du + v * dsu - dsv * u - dv * su
            if dw == 0:
                break
            step = w / dw
            lam = lam - step
            if abs(step) <= 1e-13 * (1.0 + abs(lam)):
                break
        w = characteristic_wronskian(r, lam)
        return lam, abs(w)

    lam_a = complex(lam0)
    lam_b = lam_a + 1e-5 * (1.0 + abs(lam_a)) * (1.0 + 0.5j)
    wa = characteristic_wronskian(r, lam_a)
    wb = characteristic_wronskian(r, lam_b)
    for _ in range(max_iter):
        if wb == wa:
            break
        lam_c = lam_b - wb * (lam_b - lam_a) / (wb - wa)
        lam_a, wa = lam_b, wb
        lam_b, wb = lam_c, characteristic_wronskian(r, lam_c)
        if abs(wb) <= 1e-12 * scale or \
                abs(lam_b - lam_a) <= 1e-13 * (1.0 + abs(lam_b)):
            break
    return lam_b, abs(wb)


# ---------------------------------------------------------------------------
# Argument-principle search
# ---------------------------------------------------------------------------

@dataclass
class Eigenvalue:
    """A located root of the characteristic function, with its relative
    residual and winding-number multiplicity."""

    lam: complex
    residual: float
    multiplicity: int = 1

    def as_json(self):
        return {"lambda": [self.lam.real, self.lam.imag],
                "residual": self.residual,
                "multiplicity": self.multiplicity}


class _Budget:
    def __init__(self, max_evals):
        self.max_evals = max_evals
        self.evals = 0

    def spend(self, k=1):
        self.evals += k
        if self.evals > self.max_evals:
            raise EigenvalueSearchError(
                "evaluation budget exhausted after {0} characteristic-"
                "function evaluations".format(self.evals))


class _Contour:
    """Cached characteristic-function sampler for rectangle contours."""

    def __init__(self, r, budget):
        self.r = r
        self.budget = budget
        self.cache = {}

    def batch(self, lams):
        missing = []
        for lam in lams:
            key = (round(lam.real, 14), round(lam.imag, 14))
            if key not in self.cache:
                missing.append((key, lam))
        if missing:
            self.budget.spend(len(missing))
            vals = thread_map(
                lambda kl: characteristic_wronskian(self.r, kl[1]), missing)
            for (key, _), v in zip(missing, vals):
                self.cache[key] = v
        return [self.cache[(round(lam.real, 14), round(lam.imag, 14))]
                for lam in lams]


def _rectangle_path(rect, per_edge):
    """Closed sample path around the rectangle, ``per_edge`` intervals per
    edge (corners shared)."""
    re0, re1, im0, im1 = rect
    t = np.linspace(0.0, 1.0, per_edge, endpoint=False)
    bottom = re0 + t * (re1 - re0) + 1j * im0
    right = re1 + 1j * (im0 + t * (im1 - im0))
    top = re1 - t * (re1 - re0) + 1j * im1
    left = re0 + 1j * (im1 - t * (im1 - im0))
    return np.concatenate([bottom, right, top, left])


def _winding(contour, rect, min_scale, max_per_edge=256):
    """Winding number of the characteristic function around the rectangle.

    Edge sampling doubles until no phase increment exceeds pi/2, which
    rules out phase aliasing for the discrete winding sum. Returns
    ``(winding, contour_min, contour_max)``; ``winding`` is ``None`` when
    a contour value drops below ``min_scale`` or the phases cannot be
    de-aliased at the sampling cap — both mean "a root (nearly) touches
    this contour", and the caller jitters the rectangle.
    """
    per_edge = 8
    amax = 0.0
    while True:
        path = _rectangle_path(rect, per_edge)
        vals = np.asarray(contour.batch(list(path)), dtype=complex)
        amin = float(np.min(np.abs(vals)))
        amax = float(np.max(np.abs(vals)))
        if amin <= min_scale:
            return None, amin, amax
        phases = np.angle(np.roll(vals, -1) / vals)
        aliased = float(np.max(np.abs(phases))) > 0.5 * math.pi
        total = float(np.sum(phases)) / (2.0 * math.pi)
        wind = int(round(total))
        if not aliased and abs(total - wind) <= 0.25:
            return wind, amin, amax
        if per_edge >= max_per_edge:
            return None, amin, amax
        per_edge *= 2


def _split(rect):
    re0, re1, im0, im1 = rect
    # Slightly off-center split so a root sitting exactly on a midline of
    # the original region cannot keep landing on cut boundaries.
    f = 0.5 + 0.0137
    if (re1 - re0) >= (im1 - im0):
        mid = re0 + f * (re1 - re0)
        return (re0, mid, im0, im1), (mid, re1, im0, im1)
    mid = im0 + f * (im1 - im0)
    return (re0, re1, im0, mid), (re0, re1, mid, im1)


def find_eigenvalues(r, region, max_roots=16, max_evals=20000,
                     check=True):
    """All eigenvalues of the realization inside the rectangle ``region =
    (re_lo, re_hi, im_lo, im_hi)``, each with a residual and multiplicity.

    Argument-principle counting over recursively subdivided rectangles
    isolates the roots; Newton (or secant, for sides whose shooting data
    moves with lambda) polishes them. Residuals are measured against the
    largest contour value of the initial rectangle, and every reported
    root satisfies ``|W| < 1e-8 * scale``. ``check`` verifies the
    condition pattern against the boundary indexes first.
    """
    re0, re1, im0, im1 = (float(t) for t in region)
    if not (re1 > re0 and im1 > im0):
        raise ArgumentError("region rectangle is degenerate")
    if check:
        r.check_well_posed()
    budget = _Budget(max_evals)
    contour = _Contour(r, budget)

    _, _, amax = _winding(contour, (re0, re1, im0, im1), min_scale=-1.0)
    scale = max(amax, 1e-300)
    found = []

    def search(rect):
        cur = rect
        wind = None
        for jitter in range(4):
            wind, _, _ = _winding(contour, cur, min_scale=1e-12 * scale)
            if wind is not None:
                break
            # A root (or near-root) sits on the contour: inflate slightly.
            g = 2e-3 * (1 + jitter) * max(cur[1] - cur[0], cur[3] - cur[2])
            cur = (cur[0] - g, cur[1] + g, cur[2] - g, cur[3] + g)
        if wind is None:
            raise EigenvalueSearchError(
                "contour keeps passing within tolerance of a root near "
                "rectangle {0}".format(rect))
        if wind == 0:
            return
        if wind < 0:
            raise EigenvalueSearchError(
                "negative winding number {0} on rectangle {1}: the "
                "characteristic function is not analytic there".format(
                    wind, cur))
        diag = math.hypot(cur[1] - cur[0], cur[3] - cur[2])
        if wind == 1 or diag < 1e-6 * (1.0 + abs(cur[0]) + abs(cur[2])):
            if len(found) >= max_roots:
                raise EigenvalueSearchError(
                    "more than max_roots={0} eigenvalues in the region"
                    .format(max_roots))
            center = complex(0.5 * (cur[0] + cur[1]),
                             0.5 * (cur[2] + cur[3]))
            lam, resid = _newton_polish(r, center, scale)
            if resid > 1e-8 * scale:
                raise EigenvalueSearchError(
                    "root polish stalled at residual {0:.2e} (scale "
                    "{1:.2e}) near {2}".format(resid, scale, lam))
            pad_r = 0.05 * (cur[1] - cur[0])
            pad_i = 0.05 * (cur[3] - cur[2])
            escaped = not (cur[0] - pad_r <= lam.real <= cur[1] + pad_r
                           and cur[2] - pad_i <= lam.imag <= cur[3] + pad_i)
            if escaped and wind == 1:
                # Polish jumped to a root outside this cell; shrink first.
                r1, r2 = _split(cur)
                search(r1)
                search(r2)
                return
            found.append(Eigenvalue(lam=lam, residual=resid / scale,
                                    multiplicity=wind))
            return
        r1, r2 = _split(cur)
        search(r1)
        search(r2)

    search((re0, re1, im0, im1))

    # Jittered cells can overlap; merge duplicates.
    merged = []
    for ev in sorted(found, key=lambda t: (t.lam.real, t.lam.imag)):
        if merged and abs(merged[-1].lam - ev.lam) <= \
                1e-7 * (1.0 + abs(ev.lam)):
            merged[-1] = Eigenvalue(
                lam=merged[-1].lam,
                residual=min(merged[-1].residual, ev.residual),
                multiplicity=max(merged[-1].multiplicity, ev.multiplicity))
        else:
            merged.append(ev)
    return [ev for ev in merged
            if re0 - 1e-9 <= ev.lam.real <= re1 + 1e-9
            and im0 - 1e-9 <= ev.lam.imag <= im1 + 1e-9]


# ---------------------------------------------------------------------------
# Resolvent kernel
# ---------------------------------------------------------------------------

def shooting_solutions(r, lam, window=None):
    """The two endpoint solutions of a realization: ``u`` satisfying the
    condition at ``a``, ``v`` the condition at ``b``, each covering the
    given window (default: the region between the two shooting starts)."""
    lam = complex(lam)
    plan = _shooting_plan(r, lam)
    xa, xb = plan["a"][1], plan["b"][1]
    if window is not None:
        lo, hi = float(window[0]), float(window[1])
    else:
        lo, hi = min(xa, xb), max(xa, xb)
    if not lo < hi:
        raise ArgumentError("degenerate window (pass window= on problems "
                            "whose shooting starts coincide)")
    u = _shoot(r, lam, "a", plan, hi)
    v = _shoot(r, lam, "b", plan, lo)
    return u, v


def resolvent_kernel(r, lam, window=None):
    """Two-sided kernel inverting ``L - lam`` for the realization.

    ``window`` truncates the construction to a subinterval; by default the
    kernel spans the region between the two sides' shooting starts (the
    whole interval when both conditions are vectors at finite endpoints).
    """
    lam = complex(lam)
    u, v = shooting_solutions(r, lam, window=window)
    try:
        return build_kernel("two_sided", u, v)
    except DegenerateBasisError as err:
        raise ArgumentError(
            "lambda = {0} is within tolerance of an eigenvalue; the "
            "resolvent kernel does not exist there ({1})".format(lam, err))


# ---------------------------------------------------------------------------
# Finite-difference oracle
# ---------------------------------------------------------------------------

def _window_of(p, window):
    a, b = p.interval.a, p.interval.b
    if window is not None:
        lo, hi = float(window[0]), float(window[1])
        if not (lo < hi and a <= lo and hi <= b):
            raise ArgumentError("window must be an ordered subinterval")
        return lo, hi
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ArgumentError("truncate the infinite interval with window=")
    return a, b


def _bc_elimination(fn, h, side):
    """Coefficients expressing the boundary node from the two nearest
    interior nodes, for a vector condition discretized with the one-sided
    second-order derivative; an absent functional becomes a Dirichlet
    proxy and is flagged.

    Returns ``(c_near, c_far, kappa, flag)`` with ``f_bnd = c_near f_1 +
    c_far f_2`` (node indexing from the boundary inward) and ``kappa`` the
    Robin coefficient ``alpha1/alpha0`` (``None`` for Dirichlet).
    """
    if fn is None:
        return 0.0j, 0.0j, None, ("no condition at {0}: discrete Dirichlet "
                                  "proxy row".format(side))
    if fn.vector is None:
        raise ArgumentError(
            "the finite-difference oracle needs vector boundary conditions; "
            "a trajectory representative at {0} has no grid row".format(side))
    a0, a1 = complex(fn.vector[0]), complex(fn.vector[1])
    if a0 == 0:
        return 0.0j, 0.0j, None, None
    # alpha0 f'(e) = alpha1 f(e) with f'(e) by the one-sided 3-point
    # stencil (signs mirror between the two endpoints).
    sgn = 1.0 if side == "a" else -1.0
    den = 3.0 * a0 + sgn * 2.0 * h * a1
    if abs(den) <= 1e-12 * (abs(a0) + h * abs(a1)):
        raise ArgumentError(
            "boundary row at {0} is degenerate at this grid size".format(
                side))
    return 4.0 * a0 / den, -a0 / den, a1 / a0, None


@dataclass
class FDMatrix:
    """Dense reduced finite-difference discretization of a realization."""

    n: int
    h: float
    x: np.ndarray
    matrix: np.ndarray
    diag: np.ndarray
    offdiag: complex
    bc_a: tuple
    bc_b: tuple
    kappa_a: object
    kappa_b: object
    window: tuple
    v_nodes: np.ndarray
    flags: list = field(default_factory=list)

    def eigenvalues(self):
        """All eigenvalues of the reduced matrix, sorted by magnitude."""
        ev = scipy.linalg.eigvals(self.matrix)
        return ev[np.argsort(np.abs(ev))]

    def full_vector(self, f_int):
        """Extend interior node values by the eliminated boundary nodes."""
        f_int = np.asarray(f_int, dtype=complex)
        f0 = self.bc_a[0] * f_int[0] + self.bc_a[1] * f_int[1]
        fn = self.bc_b[0] * f_int[-1] + self.bc_b[1] * f_int[-2]
        return np.concatenate([[f0], f_int, [fn]])

    def solve(self, lam, g_int):
        """Interior solution of ``(M - lam) f = g`` (nodewise data)."""
        A = self.matrix - complex(lam) * np.eye(self.n - 1)
        return scipy.linalg.solve(A, np.asarray(g_int, dtype=complex))

    def as_json(self):
        return {"n": self.n, "h": self.h, "window": list(self.window),
                "flags": list(self.flags)}


def fd_oracle_build(r, n, window=None):
    """Second-order central-difference matrix for the realization on an
    ``n``-panel grid, with one-sided second-order boundary rows eliminated
    into the interior block."""
    if n < 8:
        raise ArgumentError("grid size n must be at least 8")
    p = r.potential
    lo, hi = _window_of(p, window)
    h = (hi - lo) / n
    nodes = lo + h * np.arange(n + 1)
    x_int = nodes[1:-1]
    v_int = np.asarray(p.eval(x_int), dtype=complex)
    if not np.all(np.isfinite(v_int)):
        raise ArgumentError("potential is not finite on the grid interior")
    v_nodes = np.empty(n + 1, dtype=complex)
    v_nodes[1:-1] = v_int
    for idx, xx in ((0, nodes[0]), (n, nodes[-1])):
        try:
            val = complex(p.eval(np.array([xx]))[0])
        except Exception:
            val = complex(np.nan)
        v_nodes[idx] = val

    flags = []
    ca1, ca2, kappa_a, fl_a = _bc_elimination(r.spec.at_a, h, "a")
    cb1, cb2, kappa_b, fl_b = _bc_elimination(r.spec.at_b, h, "b")
    for fl in (fl_a, fl_b):
        if fl:
            flags.append(fl)

    m = n - 1
    off = -1.0 / h ** 2
    diag = 2.0 / h ** 2 + v_int
    mat = np.zeros((m, m), dtype=complex)
    idx = np.arange(m)
    mat[idx, idx] = diag
    mat[idx[:-1], idx[:-1] + 1] = off
    mat[idx[1:], idx[1:] - 1] = off
    # Eliminated boundary nodes fold into the first/last interior rows.
    mat[0, 0] += off * ca1
    mat[0, 1] += off * ca2
    mat[m - 1, m - 1] += off * cb1
    mat[m - 1, m - 2] += off * cb2

    return FDMatrix(n=n, h=h, x=x_int, matrix=mat, diag=diag, offdiag=off,
                    bc_a=(ca1, ca2), bc_b=(cb1, cb2),
                    kappa_a=kappa_a, kappa_b=kappa_b,
                    window=(lo, hi), v_nodes=v_nodes, flags=flags)


def fd_eigenvalues(r, n, window=None):
    """Eigenvalues of the finite-difference discretization, sorted by
    magnitude."""
    return fd_oracle_build(r, n, window=window).eigenvalues()


def richardson_eigenvalues(r, count=3, ns=(200, 400, 800), window=None):
    """The ``count`` smallest-magnitude eigenvalues, Richardson-extrapolated
    over the grid refinements ``ns`` (each double the last).

    With the error model ``lam_h = lam + c h^2 + d h^4``, two successive
    4:1 combinations cancel both terms. Returns ``(extrapolated, table)``
    where the table carries the per-grid matches feeding each value.
    """
    if len(ns) != 3 or not (ns[1] == 2 * ns[0] and ns[2] == 2 * ns[1]):
        raise ArgumentError("ns must be three doubling grid sizes")
    sets = thread_map(lambda n: fd_eigenvalues(r, n, window=window), list(ns))
    finest = sets[2][:count]
    rows = []
    out = []
    for lam_f in finest:
        lam_m = sets[1][np.argmin(np.abs(sets[1] - lam_f))]
        lam_c = sets[0][np.argmin(np.abs(sets[0] - lam_f))]
        r1 = (4.0 * lam_m - lam_c) / 3.0
        r2 = (4.0 * lam_f - lam_m) / 3.0
        ext = (16.0 * r2 - r1) / 15.0
        rows.append({"coarse": lam_c, "mid": lam_m, "fine": lam_f,
                     "extrapolated": ext})
        out.append(ext)
    return np.asarray(out), rows


def fd_numerical_range(m, samples=200, seed=0):
    """Rayleigh quotients of the discretization over random complex vectors
    satisfying the boundary rows.

    The quotient is evaluated in summation-by-parts form — gradient sum,
    potential sum, plus the exact Robin boundary terms — so a self-adjoint
    problem gives exactly real samples and dissipative data keeps the
    imaginary part nonpositive up to rounding, independent of the
    nonsymmetry the eliminated rows introduce in the reduced matrix.
    """
    rng = np.random.default_rng(seed)
    h = m.h
    v = np.array(m.v_nodes)
    weights = np.ones(m.n + 1)
    weights[0] = weights[-1] = 0.5
    usable = np.isfinite(v)
    if not np.all(usable):
        weights[~usable] = 0.0
        v = np.where(usable, v, 0.0)
    out = np.empty(samples, dtype=complex)
    for k in range(samples):
        f_int = (rng.standard_normal(m.n - 1)
                 + 1j * rng.standard_normal(m.n - 1))
        f = m.full_vector(f_int)
        grad = np.sum(np.abs(np.diff(f)) ** 2) / h
        pot = np.sum(weights * v * np.abs(f) ** 2) * h
        bnd = 0.0j
        if m.kappa_a is not None:
            bnd += m.kappa_a * abs(f[0]) ** 2
        if m.kappa_b is not None:
            bnd -= m.kappa_b * abs(f[-1]) ** 2
        norm = float(np.sum(weights * np.abs(f) ** 2) * h)
        out[k] = (grad + pot + bnd) / norm
    return out


def fd_maximal_kernel_dim(p, lam, n, window=None, rtol=1e-8):
    """Nullspace dimension of the interior-rows-only discretization of
    ``L - lam`` (no boundary rows): the discrete analogue of the kernel of
    the operator with no conditions at all."""
    lo, hi = _window_of(p, window)
    h = (hi - lo) / n
    nodes = lo + h * np.arange(n + 1)
    v_int = np.asarray(p.eval(nodes[1:-1]), dtype=complex)
    rows = n - 1
    A = np.zeros((rows, n + 1), dtype=complex)
    idx = np.arange(rows)
    A[idx, idx] = -1.0 / h ** 2
    A[idx, idx + 1] = 2.0 / h ** 2 + v_int - complex(lam)
    A[idx, idx + 2] = -1.0 / h ** 2
    s = scipy.linalg.svdvals(A)
    rank = int(np.sum(s > rtol * s[0]))
    return (n + 1) - rank


def one_sided_fd_eigenvalues(p, n, side="a", window=None):
    """Finite generalized eigenvalues of the one-sided discrete pencil: two
    Cauchy rows (value and one-sided derivative both zero) at ``side``,
    interior rows elsewhere, and no condition at the other end.

    The continuous one-sided realization has empty spectrum (its inverse
    is a one-direction integral operator), and the discrete proxy mirrors
    that: the pencil's only finite eigenvalue sits at grid scale
    ``~ -2/h^2``, far outside any fixed test rectangle once the grid
    resolves it.
    """
    lo, hi = _window_of(p, window)
    h = (hi - lo) / n
    nodes = lo + h * np.arange(n + 1)
    v_int = np.asarray(p.eval(nodes[1:-1]), dtype=complex)
    size = n + 1
    A = np.zeros((size, size), dtype=complex)
    B = np.zeros((size, size), dtype=complex)
    if side == "a":
        A[0, 0] = 1.0
        A[1, 0], A[1, 1], A[1, 2] = -3.0, 4.0, -1.0
    elif side == "b":
        A[0, n] = 1.0
        A[1, n], A[1, n - 1], A[1, n - 2] = 3.0, -4.0, 1.0
    else:
        raise ArgumentError("side must be 'a' or 'b'")
    for j in range(1, n):
        row = j + 1
        A[row, j - 1] = -1.0 / h ** 2
        A[row, j] = 2.0 / h ** 2 + v_int[j - 1]
        A[row, j + 1] = -1.0 / h ** 2
        B[row, j] = 1.0
    ev = scipy.linalg.eig(A, B, right=False)
    return ev[np.isfinite(ev)]

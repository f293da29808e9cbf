"""Adaptive panel quadrature for complex-valued, vectorized integrands.

The integrators here take callables ``f(x)`` that accept a 1-d float array
and return a complex array of the same shape. Error control compares a
Gauss-Legendre rule against the doubled rule on each panel and bisects the
worst panels until both a relative and an absolute target are met. Panels
never evaluate at their endpoints, so integrable endpoint singularities
(e.g. ``|x|**-0.5``) are handled by recursion alone.
"""

import heapq

import numpy as np

from .exceptions import QuadratureBudgetError

__all__ = ["integrate", "fixed_panel"]

_NODE_CACHE = {}


def _nodes(order):
    try:
        return _NODE_CACHE[order]
    except KeyError:
        xw = np.polynomial.legendre.leggauss(order)
        _NODE_CACHE[order] = xw
        return xw


def fixed_panel(f, lo, hi, order=30):
    """Single Gauss-Legendre panel of given order on ``[lo, hi]``."""
    x, w = _nodes(order)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    vals = np.asarray(f(mid + half * x))
    return half * np.sum(w * vals)


def _panel_pair(f, lo, hi, order):
    """Return (coarse, fine, error_estimate) on one panel."""
    coarse = fixed_panel(f, lo, hi, order)
    fine = fixed_panel(f, lo, hi, 2 * order)
    return coarse, fine, abs(fine - coarse)


def integrate(f, a, b, rtol=1e-9, atol=1e-13, points=(), max_panels=4000,
              order=15):
    """Integrate ``f`` from ``a`` to ``b`` adaptively.

    Parameters
    ----------
    f : callable
        Vectorized integrand: maps a float array to a (complex) array.
    a, b : float
        Limits; ``a > b`` flips the sign. Must be finite.
    rtol, atol : float
        Stop once the summed panel error estimate is below
        ``rtol * |integral| + atol``.
    points : sequence of float
        Known awkward abscissae (breakpoints, kinks, the diagonal of a
        kernel). Panels are pre-split there.
    max_panels : int
        Budget of panel refinements before raising
        :class:`~complex_sturm.exceptions.QuadratureBudgetError`.
    order : int
        Base Gauss-Legendre order; the doubled rule provides the estimate.

    Returns
    -------
    complex
        The integral estimate.
    """
    a = float(a)
    b = float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integrate() needs finite limits; truncate first")
    if a == b:
        return 0.0 + 0.0j
    sign = 1.0
    if a > b:
        a, b = b, a
        sign = -1.0

    cuts = [a, b]
    for p in points:
        p = float(p)
        if a < p < b:
            cuts.append(p)
    cuts = sorted(set(cuts))

    # Max-heap of panels keyed by error estimate.
    heap = []
    total = 0.0 + 0.0j
    err = 0.0
    count = 0
    serial = 0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        coarse, fine, e = _panel_pair(f, lo, hi, order)
        total += fine
        err += e
        heapq.heappush(heap, (-e, serial, lo, hi, fine))
        serial += 1
        count += 1

    while err > rtol * abs(total) + atol:
        if count >= max_panels:
            raise QuadratureBudgetError(
                "adaptive quadrature exhausted {0} panels "
                "(estimate {1!r}, error {2:.3e})".format(max_panels, total, err),
                partial=sign * total, error_estimate=err)
        neg_e, _, lo, hi, old = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # Panel narrower than float spacing: accept its estimate as is.
            err += neg_e  # remove this panel's error from the pool
            if err < 0.0:
                err = 0.0
            continue
        c1, f1, e1 = _panel_pair(f, lo, mid, order)
        c2, f2, e2 = _panel_pair(f, mid, hi, order)
        total += (f1 + f2) - old
        err += (e1 + e2) + neg_e
        if err < 0.0:
            err = 0.0
        heapq.heappush(heap, (-e1, serial, lo, mid, f1))
        serial += 1
        heapq.heappush(heap, (-e2, serial, mid, hi, f2))
        serial += 1
        count += 2

    return sign * total

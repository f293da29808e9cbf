"""Independent reference computations backing the test suite.

Everything here is written from scratch on top of plain numpy: fixed-step
integrators, composite quadrature, series solutions, closed forms. Agreement
between the package and these routines is a genuine cross-check because no
solver code is shared -- the package uses adaptive Runge-Kutta and adaptive
panel quadrature, while this module uses classical fixed-step schemes with
Richardson extrapolation.
"""

import numpy as np

__all__ = [
    "rk4_final",
    "fd_march_final",
    "fd_march_richardson",
    "simpson",
    "trapezoid_2d",
    "picard_semiregular",
    "bump",
    "poly_potential_text",
    "poly_potential_fn",
    "dirichlet_eigenvalues_free",
    "dirichlet_neumann_eigenvalues_free",
    "free_disk_radius",
]


# ---------------------------------------------------------------------------
# Initial value problems
# ---------------------------------------------------------------------------

def rk4_final(rhs, x0, y0, x1, n=4000):
    """Classical fixed-step RK4 for y' = rhs(x, y); returns y(x1).

    ``y0`` may be complex and of any dimension. ``n`` is the step count.
    """
    x = float(x0)
    h = (float(x1) - float(x0)) / n
    y = np.asarray(y0, dtype=complex)
    for _ in range(n):
        k1 = np.asarray(rhs(x, y))
        k2 = np.asarray(rhs(x + 0.5 * h, y + 0.5 * h * k1))
        k3 = np.asarray(rhs(x + 0.5 * h, y + 0.5 * h * k2))
        k4 = np.asarray(rhs(x + h, y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x += h
    return y


def schrodinger_rhs(V, lam):
    """Right-hand side of -f'' + V f = lam f as a first-order system."""
    def rhs(x, y):
        return np.asarray([y[1], (V(x) - lam) * y[0]], dtype=complex)
    return rhs


def fd_march_final(V, lam, x0, f0, df0, x1, n):
    """Second-order central-difference march; returns f(x1).

    Uses f_{j+1} = 2 f_j - f_{j-1} + h^2 (V - lam) f_j seeded by a Taylor
    step, so the scheme shares nothing with a Runge-Kutta integrator.
    """
    h = (float(x1) - float(x0)) / n
    f_prev = complex(f0)
    v0 = complex(V(float(x0)))
    f_cur = (f_prev + h * complex(df0)
             + 0.5 * h * h * (v0 - lam) * f_prev)
    x = float(x0) + h
    for _ in range(n - 1):
        f_next = 2.0 * f_cur - f_prev + h * h * (complex(V(x)) - lam) * f_cur
        f_prev, f_cur = f_cur, f_next
        x += h
    return f_cur


def fd_march_richardson(V, lam, x0, f0, df0, x1, n=2000):
    """Richardson-extrapolated march value: (4 f_{2n} - f_n) / 3."""
    coarse = fd_march_final(V, lam, x0, f0, df0, x1, n)
    fine = fd_march_final(V, lam, x0, f0, df0, x1, 2 * n)
    return (4.0 * fine - coarse) / 3.0


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def simpson(fn, a, b, n=2000):
    """Composite Simpson rule with n (even) panels; fn is array-aware."""
    if n % 2:
        n += 1
    xs = np.linspace(float(a), float(b), n + 1)
    ys = np.asarray(fn(xs), dtype=complex)
    h = (xs[-1] - xs[0]) / n
    total = ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum()
    return total * h / 3.0


def trapezoid_2d(values, xs, ys):
    """Tensor trapezoid rule for samples values[i, j] = F(xs[i], ys[j])."""
    inner = np.trapezoid(np.asarray(values, dtype=float), ys, axis=1)
    return float(np.trapezoid(inner, xs))


# ---------------------------------------------------------------------------
# Semiregular endpoint series (Volterra / Picard iteration)
# ---------------------------------------------------------------------------

def picard_semiregular(V, lam, e, p1, width, n=4000, iters=80):
    """Series solution of -f'' + V f = lam f with f(e)=0, f'(e)=p1.

    Iterates the Volterra form f(x) = p1 (x-e) + int_e^x (x-y)(V(y)-lam) f(y) dy
    on a uniform grid over [e, e+width] using cumulative trapezoid sums.
    Requires (x-e) V integrable at e (the integrand then has a finite limit).
    Returns (xs, fs) with xs[0] = e excluded from V evaluation.
    """
    xs = np.linspace(float(e), float(e) + float(width), n + 1)
    h = xs[1] - xs[0]
    q = np.empty(n + 1, dtype=complex)
    q[1:] = V(xs[1:]) - lam
    f = p1 * (xs - e)
    for _ in range(iters):
        s = q * f
        # (x-e) V integrable and f(e) = 0 force a finite limit of V f at e;
        # the first cell uses its right-endpoint value (one-sided rule).
        s[0] = s[1]
        c1 = np.concatenate(([0.0], np.cumsum(0.5 * (s[1:] + s[:-1]) * h)))
        ys_s = xs * s
        c2 = np.concatenate(([0.0],
                             np.cumsum(0.5 * (ys_s[1:] + ys_s[:-1]) * h)))
        f_new = p1 * (xs - e) + xs * c1 - c2
        if np.max(np.abs(f_new - f)) < 1e-15 * (1.0 + np.max(np.abs(f_new))):
            f = f_new
            break
        f = f_new
    return xs, f


# ---------------------------------------------------------------------------
# Test data generators
# ---------------------------------------------------------------------------

def bump(center, halfwidth):
    """Smooth bump supported exactly on [center-halfwidth, center+halfwidth].

    Returns (fn, (lo, hi)) with fn array-aware and fn(center) = 1.
    """
    c = float(center)
    w = float(halfwidth)

    def fn(x):
        t = (np.asarray(x, dtype=float) - c) / w
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        ti = t[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
        return out

    return fn, (c - w, c + w)


def _fmt_complex(z):
    z = complex(z)
    if z.imag == 0.0:
        return repr(float(z.real))
    if z.real == 0.0:
        return repr(float(z.imag)) + "i"
    sign = "+" if z.imag >= 0 else "-"
    return "({0} {1} {2}i)".format(repr(float(z.real)), sign,
                                   repr(float(abs(z.imag))))


def poly_potential_text(coeffs):
    """Expression text for sum_k coeffs[k] * x^k in the package grammar."""
    parts = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k == 0:
            parts.append(_fmt_complex(c))
        elif k == 1:
            parts.append("{0} * x".format(_fmt_complex(c)))
        else:
            parts.append("{0} * x^{1}".format(_fmt_complex(c), k))
    return " + ".join(parts) if parts else "0"


def poly_potential_fn(coeffs):
    """Array-aware numpy evaluator matching poly_potential_text exactly."""
    coeffs = [complex(c) for c in coeffs]

    def fn(x):
        xs = np.asarray(x, dtype=float)
        out = np.zeros(xs.shape, dtype=complex)
        for k, c in enumerate(coeffs):
            if c != 0:
                out = out + c * xs ** k
        return out if out.shape else complex(out)

    return fn


# ---------------------------------------------------------------------------
# Closed forms for the free equation (V = 0)
# ---------------------------------------------------------------------------

def dirichlet_eigenvalues_free(count):
    """Eigenvalues of -f'' = lam f, f(0) = f(pi) = 0: n^2, n = 1, 2, ..."""
    return [float(n * n) for n in range(1, count + 1)]


def dirichlet_neumann_eigenvalues_free(count):
    """f(0) = 0, f'(pi) = 0: (n - 1/2)^2, n = 1, 2, ..."""
    return [float((n - 0.5) ** 2) for n in range(1, count + 1)]


def free_disk_radius(d, lam=1j, n=4000):
    """Radius 1/(2 int_0^d |u|^2 Im(lam) dx) with u = cos(sqrt(lam) x).

    Closed-form solution of -u'' = lam u with u(0)=1, u'(0)=0, integrated by
    Simpson quadrature. For V = 0 the disk weight Im(lam - V) is Im(lam).
    """
    mu = np.sqrt(complex(lam))

    def density(x):
        return np.abs(np.cos(mu * np.asarray(x, dtype=float))) ** 2

    norm = simpson(density, 0.0, d, n=n).real * complex(lam).imag
    return 1.0 / (2.0 * norm)

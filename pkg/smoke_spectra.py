import time

import numpy as np

from complex_sturm.boundary import BoundaryFunctional, BoundarySpec
from complex_sturm.potential import parse_potential
from complex_sturm import spectra


def bc(side, a0, a1):
    return BoundaryFunctional.from_vector(side, a0, a1)


def real_dd(expr, interval):
    p = parse_potential(expr, interval)
    return spectra.Realization(p, BoundarySpec(at_a=bc("a", 0.0, 1.0),
                                               at_b=bc("b", 0.0, 1.0)))


t0 = time.time()

# 1. characteristic function, V=0 on ]0,pi[, Dirichlet-Dirichlet
r = real_dd("0.0", (0.0, np.pi))
for lam, expect_zero in ((1.0, True), (4.0, True), (2.5, False)):
    w = spectra.characteristic_wronskian(r, lam)
    print(f"W({lam}) = {w:.3e} zero={abs(w) < 1e-8}")
    assert (abs(w) < 1e-8) == expect_zero

# 2. find_eigenvalues {1,4,9}
roots = spectra.find_eigenvalues(r, (0.5, 10.0, -1.0, 1.0))
vals = sorted(ev.lam.real for ev in roots)
print("DD roots:", [f"{v:.10f}" for v in vals], f"[{time.time()-t0:.1f}s]")
assert len(roots) == 3
assert max(abs(v - e) for v, e in zip(vals, (1.0, 4.0, 9.0))) < 1e-8
assert all(abs(ev.lam.imag) < 1e-8 for ev in roots)
assert all(ev.multiplicity == 1 for ev in roots)

# 3. empty region
empty = spectra.find_eigenvalues(r, (-10.0, -0.5, -1.0, 1.0))
print("negative region roots:", empty)
assert empty == []

# 4. Dirichlet-Neumann: (n - 1/2)^2
rdn = spectra.Realization(
    parse_potential("0.0", (0.0, np.pi)),
    BoundarySpec(at_a=bc("a", 0.0, 1.0), at_b=bc("b", 1.0, 0.0)))
roots = spectra.find_eigenvalues(rdn, (0.1, 7.0, -1.0, 1.0))
vals = sorted(ev.lam.real for ev in roots)
print("DN roots:", [f"{v:.10f}" for v in vals])
assert max(abs(v - e) for v, e in zip(vals, (0.25, 2.25, 6.25))) < 1e-8

t1 = time.time()

# 5. resolvent kernel V=0 ]0,1[, lam=0: G(x,y) = x(1-y) for x<y
r01 = real_dd("0.0", (0.0, 1.0))
ker = spectra.resolvent_kernel(r01, 0.0)
from complex_sturm.greens import kernel_eval, apply_kernel
for x, y in ((0.2, 0.7), (0.5, 0.9), (0.3, 0.4)):
    g = kernel_eval(ker, x, y)
    print(f"G({x},{y}) = {g:.10f} want {x*(1-y):.10f}")
    assert abs(g - x * (1 - y)) < 1e-8
    assert abs(kernel_eval(ker, y, x) - g) < 1e-10  # transpose symmetry
xs = np.linspace(0.05, 0.95, 7)
fx = apply_kernel(ker, lambda t: np.ones_like(t), xs, support=(0.0, 1.0))
want = xs * (1 - xs) / 2.0
print("apply err:", np.max(np.abs(fx - want)))
assert np.max(np.abs(fx - want)) < 1e-8

# 6. FD oracle: V=0 Dirichlet n=100 on ]0,pi[, smallest ev ~ 1 to O(h^2)
m = spectra.fd_oracle_build(real_dd("0.0", (0.0, np.pi)), 100)
ev = m.eigenvalues()
print("FD smallest:", ev[0], "err", abs(ev[0] - 1.0))
assert abs(ev[0] - 1.0) < 5e-4
assert np.max(np.abs(m.matrix - m.matrix.T.conj())) < 1e-12  # Hermitian

# FD resolvent solve vs analytic kernel
mm = spectra.fd_oracle_build(r01, 200)
sol = mm.solve(0.0, np.ones(mm.n - 1))
want = mm.x * (1 - mm.x) / 2.0
print("FD resolvent err:", np.max(np.abs(sol - want)))
assert np.max(np.abs(sol - want)) < 1e-4

t2 = time.time()

# 7. Richardson vs search, V=ix on ]0,1[
rix = real_dd("i*x", (0.0, 1.0))
ext, rows = spectra.richardson_eigenvalues(rix)
print("richardson:", ext)
roots = spectra.find_eigenvalues(rix, (1.0, 110.0, -3.0, 4.0),
                                 max_evals=60000)
by_mag = sorted(roots, key=lambda e: abs(e.lam))[:3]
print("search:", [f"{e.lam:.8f}" for e in by_mag], f"[{time.time()-t2:.1f}s]")
for ev_s in by_mag:
    match = ext[np.argmin(np.abs(ext - ev_s.lam))]
    rel = abs(match - ev_s.lam) / abs(ev_s.lam)
    print(f"  {ev_s.lam:.8f} vs {match:.8f} rel {rel:.2e}")
    assert rel < 1e-4

# 8. numerical range
m = spectra.fd_oracle_build(real_dd("-1.0i", (0.0, 1.0)), 60)
nr = spectra.fd_numerical_range(m, samples=50)
print("V=-i numrange Im spread:", np.max(np.abs(nr.imag + 1.0)))
assert np.max(np.abs(nr.imag + 1.0)) < 1e-10
m = spectra.fd_oracle_build(real_dd("x^2", (0.0, 1.0)), 60)
nr = spectra.fd_numerical_range(m, samples=50)
print("real V numrange max |Im|:", np.max(np.abs(nr.imag)))
assert np.max(np.abs(nr.imag)) < 1e-10
# Robin (Neumann at b) on real V stays real in SBP form
rrob = spectra.Realization(
    parse_potential("x^2", (0.0, 1.0)),
    BoundarySpec(at_a=bc("a", 0.0, 1.0), at_b=bc("b", 1.0, -0.5)))
m = spectra.fd_oracle_build(rrob, 60)
nr = spectra.fd_numerical_range(m, samples=50)
print("Robin real V numrange max |Im|:", np.max(np.abs(nr.imag)))
assert np.max(np.abs(nr.imag)) < 1e-10

# 9. one-sided pencil: no finite eigenvalues in a big rectangle
p01 = parse_potential("x^2 - 1.0i*x", (0.0, 1.0))
print("maximal kernel dim:", spectra.fd_maximal_kernel_dim(p01, 2.0, 120))
assert spectra.fd_maximal_kernel_dim(p01, 2.0, 120) == 2
fin = spectra.one_sided_fd_eigenvalues(p01, 120, side="a")
inside = [z for z in fin
          if -200 <= z.real <= 200 and -200 <= z.imag <= 200]
print("one-sided finite evs:", len(fin), "inside rect:", inside)
assert not inside

t3 = time.time()

# 10. decay route: V = x^2 on ]0,inf[, Dirichlet at 0 -> odd levels 3, 7
rhalf = spectra.Realization(
    parse_potential("x^2", (0.0, float("inf"))),
    BoundarySpec(at_a=bc("a", 0.0, 1.0)))
roots = spectra.find_eigenvalues(rhalf, (2.0, 8.0, -0.5, 0.5),
                                 max_evals=60000)
vals = sorted(ev.lam.real for ev in roots)
print("half-line oscillator roots:", [f"{v:.8f}" for v in vals],
      f"[{time.time()-t3:.1f}s]")
assert len(vals) == 2
assert abs(vals[0] - 3.0) < 1e-6 and abs(vals[1] - 7.0) < 1e-6

w, info = spectra.characteristic_wronskian(rhalf, 3.0, return_info=True)
print("truncation info at lam=3:", {k: v for k, v in info.items()})

print(f"ALL SPECTRA SMOKE PASS  [{time.time()-t0:.1f}s total]")

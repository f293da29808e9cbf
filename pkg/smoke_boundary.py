import time

import numpy as np

from complex_sturm.boundary import classify, dim_U
from complex_sturm.potential import parse_potential
from complex_sturm.weyl import trichotomy

INF = float("inf")

t0 = time.time()
cases = [
    ("0.0", (0.0, 1.0), "a", 1j, 2),
    ("1/x^2", (0.0, 1.0), "a", 1j, 1),
    ("1/x^2", (0.0, 1.0), "a", 0.0, 1),
    ("0.0", (0.0, INF), "b", 1j, 1),
    ("0.0", (0.0, INF), "b", 1.0, 0),
    ("x", (0.0, INF), "b", 1j, 1),
    ("1/x", (0.0, 1.0), "a", 1j, 2),
    ("sin(x)", (0.0, INF), "b", 1j, 1),
    ("-x^4", (0.0, INF), "b", 1.0, 2),
    ("-x^4", (0.0, INF), "b", 2.0 + 1j, 2),
    ("x^2", (0.0, INF), "b", 8.0, 1),
    ("x^2", (0.0, INF), "a", 1j, 2),
    ("-x^6 - 1.5i*x^2", (1.0, INF), "b", 1j, 2),
]
for expr, iv, side, lam, want in cases:
    p = parse_potential(expr, iv)
    t1 = time.time()
    got = dim_U(p, side, lam=lam)
    print(f"dim_U({expr!r:22} {side} lam={lam}) = {got} "
          f"want {want}  [{time.time()-t1:.1f}s]")
    assert got == want

rep = classify(parse_potential("1/x^2", (0.0, 1.0)))
print("classify:", rep.nu_a, rep.nu_b, rep.dim_Ua, rep.dim_Ub)
assert (rep.nu_a, rep.nu_b, rep.dim_Ua, rep.dim_Ub) == (0, 2, 1, 2)

tcases = [
    ("0.0", (0.0, INF), "limit_point"),
    ("0.0", (0.0, 1.0), "limit_circle"),
    ("-x^4", (0.0, INF), "limit_circle"),
    ("x^6 - 1.5i*x^2", (1.0, INF), "limit_point"),
    ("-x^6 - 1.5i*x^2", (1.0, INF), "limit_point"),
    ("-x^4 - 0.5i*x", (0.0, INF), "limit_point"),
]
for expr, iv, want in tcases:
    p = parse_potential(expr, iv)
    t1 = time.time()
    rep = trichotomy(p, 1j)
    print(f"trichotomy({expr!r:22}) = {rep.case:24} "
          f"[{time.time()-t1:.1f}s]")
    assert rep.case.startswith(want), (rep.case, want)

print(f"BOUNDARY/WEYL SMOKE PASS  [{time.time()-t0:.1f}s]")

"""Actual generating-function norms against the recursive majorants.

The bounds grow like C^(r-1) times a combinatorial factor, which is very
pessimistic for a single model; the ratio column shows by how much.
Afterwards a geometric fit of the actual norms gives an estimate of the
radius on which the near-identity transformation is safe to use.
"""
import math

from lyapnorm import Mode, Polynomial, Spectrum, normalize
from lyapnorm.bounds import DeltaSequence, build_ledger, chi_norms, fit_certificate
from lyapnorm.poly import PolydiskGeometry

lam = (1j, 1j * math.sqrt(2))
x1, x2, y1, y2 = (Polynomial.coordinate(2, i) for i in range(4))
H = Polynomial.quadratic(lam) + (x1 + y1) ** 2 * (x2 + y2)
spec = Spectrum(lam, Mode.LYAPUNOV).with_gamma()
geom = PolydiskGeometry((1.0, 1.0))
d = 0.25

nf = normalize(H, spec, order=6)
ledger = build_ledger(nf, H, geom, d)
print(f"E = {ledger.E}, h = {ledger.h}, C = {ledger.C:.2f}")
print(ledger.to_csv())

for order in (6, 12, 24):
    nf = normalize(H, spec, order)
    cert = fit_certificate(chi_norms(nf, geom, d), DeltaSequence(d), build_ledger(nf, H, geom, d))
    print(f"order {order:2d}: beta = {cert.beta:.3f}  rho = {cert.rho:.4f}  (theory beta {cert.beta_th:.3g})")

"""Periodic orbits from the normal form, checked by direct integration.

On x2 = y2 = 0 the normal form gives xi(t) = xi0 exp(a t) with
a = i + Gamma'(xi0 eta0).  Pushing that orbit back through the generating
functions gives a predicted periodic orbit of the original system; we start
RK4 on it and measure how far the trajectory is from closing after one
predicted period.
"""
import math

from lyapnorm import Mode, Polynomial, Spectrum, normalize, orbit_residual
from lyapnorm.orbit import extract_gamma, frequency

lam = (1j, 1j * math.sqrt(2))
x1, x2, y1, y2 = (Polynomial.coordinate(2, i) for i in range(4))
H = Polynomial.quadratic(lam) + (x1 + y1) ** 2 * (x2 + y2)
spec = Spectrum(lam, Mode.LYAPUNOV).with_gamma()

amp = 0.01
print(" k   period          residual     energy drift")
for k in range(1, 7):
    nf = normalize(H, spec, k)
    run = orbit_residual(H, nf, amp, amp, dt=1e-3)
    print(f"{k:2d}  {run.period_estimate:.12f}  {run.residual:.3e}    {run.energy_drift:.1e}")

md = extract_gamma(normalize(H, spec, 6))
for zeta in (0.0, 1e-4, 1e-3, 1e-2):
    print(f"zeta = {zeta:7.0e}: frequency {frequency(md, zeta).imag:.10f}")

"""Normal form of a two-degree-of-freedom cubic model.

The quadratic part is i x1 y1 + i sqrt2 x2 y2, so both modes are elliptic
and the second frequency is incommensurate with the first.  We normalize to
order six and look at what survives in the normal form.
"""
import math

from lyapnorm import Mode, Polynomial, Spectrum, normalize
from lyapnorm.normalform import structure_violations
from lyapnorm.poly import to_text

lam = (1j, 1j * math.sqrt(2))
x1, x2, y1, y2 = (Polynomial.coordinate(2, i) for i in range(4))
H = Polynomial.quadratic(lam) + (x1 + y1) ** 2 * (x2 + y2)

spec = Spectrum(lam, Mode.LYAPUNOV).with_gamma()
print(f"divisor constant gamma = {spec.gamma:.12f}")

nf = normalize(H, spec, order=6)
for r, (z, chi) in enumerate(zip(nf.state.Z, nf.state.chi), start=1):
    print(f"order {r}: {len(chi):3d} generator terms, {len(z):3d} normal-form terms")

# the part living on x2 = y2 = 0 is a function of x1*y1 only
for r, z in enumerate(nf.state.Z, start=1):
    e = z.exps
    on_manifold = z.select((e[:, 1] == 0) & (e[:, 3] == 0))
    if on_manifold:
        print(f"Z_{r} restricted to the manifold: {to_text(on_manifold)}")

print("homological residuals:", ", ".join(f"{v:.1e}" for v in nf.state.homological_residuals()))
print("structure violations:", structure_violations(nf) or "none")

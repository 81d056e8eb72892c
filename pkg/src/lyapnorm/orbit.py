"""Lyapounov orbits from the normal form, and a fixed-step RK4 cross-check.

On the manifold ``x_2 = .. = y_n = 0`` the normal form reduces to
``lambda_1 zeta + Gamma(zeta)`` with ``zeta = x_1 y_1``; Hamilton's equations
``x' = dH/dy``, ``y' = -dH/dx`` give ``x_1(t) = xi e^{a t}``,
``y_1(t) = eta e^{-a t}`` with ``a = lambda_1 + Gamma'(xi eta)``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .normalform import NormalFormResult, compose_coordinates
from .poly import GradedSeries, Polynomial, substitute
from .resonance import Mode


class OrbitError(RuntimeError):
    pass


class DivergenceError(OrbitError):
    pass


class StructureError(OrbitError):
    pass


@dataclass
class ManifoldDynamics:
    gamma_coeffs: dict[int, complex]
    lambda1: complex
    mode: Mode

    def gamma(self, zeta: complex) -> complex:
        return sum(c * zeta ** j for j, c in self.gamma_coeffs.items())


def extract_gamma(nf: NormalFormResult) -> ManifoldDynamics:
    """Collect the ``(x_1 y_1)^j`` coefficients of ``sum Z_m``."""
    if nf.mode is Mode.BIRKHOFF:
        raise StructureError("manifold dynamics needs a Lyapounov-type normal form")
    n = nf.n
    coeffs: dict[int, complex] = {}
    for z in nf.state.Z:
        e = z.exps.astype(np.int64)
        trans = e[:, 1:n].sum(axis=1) + e[:, n + 1:].sum(axis=1)
        sharp = trans == 0
        stray = sharp & (e[:, 0] != e[:, n])
        if stray.any():
            raise StructureError(f"sharp normal-form term that is not a power of x1*y1: {e[stray][0]}")
        for row, c in zip(e[sharp], z.coeffs[sharp]):
            j = int(row[0])
            coeffs[j] = coeffs.get(j, 0j) + complex(c)
    return ManifoldDynamics({j: c for j, c in sorted(coeffs.items()) if c != 0},
                            nf.spectrum.lam[0], nf.mode)


def frequency(md: ManifoldDynamics, zeta: complex) -> complex:
    """``lambda_1 + Gamma'(zeta)``."""
    return md.lambda1 + sum(j * c * zeta ** (j - 1) for j, c in md.gamma_coeffs.items())


@dataclass
class OrbitSample:
    times: np.ndarray
    states: np.ndarray  # (len(times), 2n) complex
    period_estimate: float
    residual: float
    aperiodic: bool = False
    energy: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    @property
    def energy_drift(self) -> float:
        if self.energy is None or self.energy.size == 0:
            return 0.0
        return float(abs(self.energy[-1] - self.energy[0]))

    def to_csv(self) -> str:
        n2 = self.states.shape[1]
        n = n2 // 2
        names = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"{p}_{nm}" for nm in names for p in ("re", "im")] + ["H_re", "H_im"])
        energy = self.energy if self.energy is not None else np.full(len(self.times), np.nan + 0j)
        for t, z, h in zip(self.times, self.states, energy):
            row = [repr(float(t))]
            for v in z:
                row += [repr(float(v.real)), repr(float(v.imag))]
            row += [repr(float(h.real)), repr(float(h.imag))]
            w.writerow(row)
        return buf.getvalue()

    def summary(self) -> dict:
        return {"period": self.period_estimate, "residual": self.residual,
                "energy_drift": self.energy_drift, "aperiodic": self.aperiodic,
                "samples": int(len(self.times)), **self.extra}


def synthesize_orbit(nf: NormalFormResult, md: ManifoldDynamics, xi0: complex, eta0: complex,
                     nsamples: int = 256, coords: list[GradedSeries] | None = None,
                     aperiodic_span: float | None = None) -> OrbitSample:
    """Sample the orbit ``(xi e^{at}, eta e^{-at})`` and push it to the original variables.

    For imaginary ``a`` the samples cover one period ``2 pi / |Im a|``.
    Otherwise the sample is flagged aperiodic and covers ``aperiodic_span``
    (default: ``2 pi / |a|``).
    """
    n = nf.n
    zeta = complex(xi0) * complex(eta0)
    a = frequency(md, zeta)
    aperiodic = abs(a.real) > 1e-12 * abs(a) or a.imag == 0
    if aperiodic:
        T = aperiodic_span if aperiodic_span is not None else 2 * math.pi / abs(a)
    else:
        T = 2 * math.pi / abs(a.imag)
    t = np.linspace(0.0, T, nsamples + 1)
    xi = xi0 * np.exp(a * t)
    eta = eta0 * np.exp(-a * t)
    if coords is None:
        coords = compose_coordinates(nf.state.chi, n, nf.state.trunc_order)
    X = np.zeros((n, t.size), dtype=complex)
    Y = np.zeros((n, t.size), dtype=complex)
    X[0] = xi
    Y[0] = eta
    states = np.empty((t.size, 2 * n), dtype=complex)
    for i, series in enumerate(coords):
        states[:, i] = series.to_polynomial()(X, Y)
    residual = float(np.linalg.norm(states[-1] - states[0]))
    return OrbitSample(t, states, T, residual, aperiodic, extra={"a1": [a.real, a.imag]})


class VectorField:
    """Hamiltonian vector field ``(dH/dy, -dH/dx)`` of a polynomial, evaluated with numpy."""

    def __init__(self, H: Polynomial):
        n = H.n
        self.n = n
        self.H = H
        comps = [H.derivative(n + l) for l in range(n)] + [-H.derivative(l) for l in range(n)]
        rows = {}
        for p in comps:
            for row in p.exps:
                rows.setdefault(tuple(int(v) for v in row), len(rows))
        self.exps = np.array(list(rows), dtype=np.int64).reshape(-1, 2 * n)
        self.matrix = np.zeros((2 * n, len(rows)), dtype=complex)
        for i, p in enumerate(comps):
            for row, c in zip(p.exps, p.coeffs):
                self.matrix[i, rows[tuple(int(v) for v in row)]] = c
        self.maxpow = int(self.exps.max()) if self.exps.size else 0

    def monomials(self, z: np.ndarray) -> np.ndarray:
        if not self.exps.size:
            return np.zeros(0, dtype=complex)
        pw = z[:, None] ** np.arange(self.maxpow + 1)[None, :]
        idx = np.arange(2 * self.n)
        return np.prod(pw[idx[None, :], self.exps], axis=1)

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return self.matrix @ self.monomials(z)

    def energy(self, z: np.ndarray) -> complex:
        n = self.n
        return complex(self.H(z[:n], z[n:]))


def integrate(H, z0, T: float, dt: float, max_steps: int = 10 ** 7, scale: float = 1.0,
              record_every: int = 1) -> OrbitSample:
    """Classical RK4 for ``x' = dH/dy``, ``y' = -dH/dx`` over ``[0, T]``.

    The step is shrunk to ``T / ceil(T / dt)`` so the last step lands on ``T``.
    Aborts with :class:`DivergenceError` once ``|z|`` exceeds ``1e3 * scale``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if isinstance(H, GradedSeries):
        H = H.to_polynomial()
    nsteps = max(1, math.ceil(T / dt - 1e-9))
    if nsteps > max_steps:
        raise ValueError(f"{nsteps} steps exceed the guard of {max_steps}")
    h = T / nsteps
    f = VectorField(H)
    z = np.array(z0, dtype=complex)
    limit = 1e3 * scale
    times = [0.0]
    states = [z.copy()]
    energy = [f.energy(z)]
    for step in range(1, nsteps + 1):
        k1 = f(z)
        k2 = f(z + 0.5 * h * k1)
        k3 = f(z + 0.5 * h * k2)
        k4 = f(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > limit:
            raise DivergenceError(f"trajectory left |z| <= {limit:g} at t={step * h:.6g}")
        if step % record_every == 0 or step == nsteps:
            times.append(step * h)
            states.append(z.copy())
            energy.append(f.energy(z))
    states = np.array(states)
    residual = float(np.linalg.norm(states[-1] - states[0]))
    return OrbitSample(np.array(times), states, T, residual, energy=np.array(energy))


def orbit_residual(H: GradedSeries, nf: NormalFormResult, xi0: complex, eta0: complex,
                   dt: float = 1e-3) -> OrbitSample:
    """Integrate ``H`` from the synthesized initial point over the predicted period."""
    md = extract_gamma(nf)
    synth = synthesize_orbit(nf, md, xi0, eta0, nsamples=8)
    run = integrate(H, synth.states[0], synth.period_estimate, dt)
    run.aperiodic = synth.aperiodic
    dev = float(np.linalg.norm(run.states[-1] - synth.states[-1]))
    run.extra.update(synth.extra, order=nf.order, deviation_from_prediction=dev)
    return run


# -- harmonic-oscillator complexification --------------------------------------------

_S2 = math.sqrt(2.0)


def _oscillator_frequencies(H: Polynomial, tol: float = 1e-12) -> np.ndarray:
    n = H.n
    quad = H.homogeneous_part(2)
    omega = np.zeros(n)
    expected = {}
    for l in range(n):
        q2 = [0] * (2 * n)
        q2[l] = 2
        p2 = [0] * (2 * n)
        p2[n + l] = 2
        cq, cp = quad.coefficient(q2[:n], q2[n:]), quad.coefficient(p2[:n], p2[n:])
        if abs(cq - cp) > tol * max(1.0, abs(cq)) or abs(cq.imag) > tol or cq.real <= 0:
            raise ValueError(f"quadratic part is not a positive oscillator in degree of freedom {l + 1}")
        omega[l] = 2 * cq.real
        expected[tuple(q2)] = cq
        expected[tuple(p2)] = cp
    if (quad - Polynomial(n, expected)).max_abs_coeff() > tol * max(1.0, omega.max()):
        raise ValueError("quadratic part has cross terms")
    return omega


def to_complex_coordinates(H: Polynomial | GradedSeries) -> GradedSeries:
    """Rewrite ``H(q, p)`` in complex coordinates ``x = (q - ip)/sqrt2``, ``y = (p - iq)/sqrt2``.

    The input uses the ``x``/``y`` slots of :class:`Polynomial` for ``q``/``p``.
    ``omega (q^2 + p^2)/2`` becomes ``i omega x y``.
    """
    if isinstance(H, GradedSeries):
        H = H.to_polynomial()
    _oscillator_frequencies(H)
    n = H.n
    x = [Polynomial.coordinate(n, l) for l in range(n)]
    y = [Polynomial.coordinate(n, n + l) for l in range(n)]
    q = [(x[l] + y[l].scale(1j)).scale(1 / _S2) for l in range(n)]
    p = [(x[l].scale(1j) + y[l]).scale(1 / _S2) for l in range(n)]
    return GradedSeries.from_polynomial(substitute(H, q + p))


def to_real_coordinates(H: Polynomial | GradedSeries) -> GradedSeries:
    """Inverse of :func:`to_complex_coordinates`: back to ``(q, p)``."""
    if isinstance(H, GradedSeries):
        H = H.to_polynomial()
    n = H.n
    q = [Polynomial.coordinate(n, l) for l in range(n)]
    p = [Polynomial.coordinate(n, n + l) for l in range(n)]
    x = [(q[l] - p[l].scale(1j)).scale(1 / _S2) for l in range(n)]
    y = [(p[l] - q[l].scale(1j)).scale(1 / _S2) for l in range(n)]
    return GradedSeries.from_polynomial(substitute(H, x + y))


def state_to_complex(q, p) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    return (q - 1j * p) / _S2, (p - 1j * q) / _S2


def state_to_real(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return (x + 1j * y) / _S2, (1j * x + y) / _S2


def manifold_field_violations(nf: NormalFormResult) -> list[str]:
    """Transverse components of the normal-form field that survive on the manifold."""
    n = nf.n
    H = Polynomial.quadratic(nf.spectrum.lam) + nf.state.normal_part()
    bad = []
    for idx in list(range(1, n)) + list(range(n + 1, 2 * n)):
        d = H.derivative(idx)
        e = d.exps.astype(np.int64)
        trans = e[:, 1:n].sum(axis=1) + e[:, n + 1:].sum(axis=1)
        for row in e[trans == 0]:
            bad.append(f"d/dz{idx}: {tuple(row)}")
    return bad

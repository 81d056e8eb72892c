"""Lie-series normalization of a polynomial Hamiltonian.

Grading: the Hamiltonian after ``r`` steps is

    H0 + Z_1 + ... + Z_r + sum_{s > r} H_s,

where ``Z_m`` and ``H_s`` carry literal degree ``m + 2`` and ``s + 2``.  The
code below indexes those pieces by the offset index (``s``) only inside the
recursion and stores everything else by literal degree.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .poly import (GradedSeries, Polynomial, lie_derivative, lie_series_apply,
                   relative_deviation, to_json_obj, from_json_obj)
from .resonance import Mode, ResonanceError, Spectrum, divisors, zpart_mask


class NormalFormError(ValueError):
    pass


def solve_homological(psi: Polynomial, spec: Spectrum) -> tuple[Polynomial, Polynomial]:
    """Split ``psi = L_H0 chi + Z`` with ``Z`` in the normal-form subspace.

    Returns
    -------
    chi, Z : Polynomial
        ``Z`` is the projection of ``psi`` on Z; ``chi`` has coefficient
        ``psi_jk / <j-k, lambda>`` on every other monomial.

    Raises
    ------
    ResonanceError
        A W monomial has vanishing divisor (Melnikov condition violated).
    """
    if psi.n != spec.n:
        raise NormalFormError("dimension mismatch between psi and spectrum")
    if not psi:
        return Polynomial(psi.n), Polynomial(psi.n)
    inside = zpart_mask(psi.exps, spec)
    Z = psi.select(inside)
    w = ~inside
    if not w.any():
        return Polynomial(psi.n), Z
    div = divisors(psi.exps[w], spec)
    if (div == 0).any():
        row = psi.exps[w][np.argmax(div == 0)].astype(np.int64)
        raise ResonanceError(f"zero divisor on W monomial with j-k={tuple(row[:spec.n] - row[spec.n:])}",
                             row[:spec.n] - row[spec.n:])
    chi = Polynomial._raw(psi.n, psi.exps[w], psi.coeffs[w] / div)
    return chi, Z


@dataclass(frozen=True)
class NormalizationState:
    """Snapshot after ``r`` normalization steps.

    ``tail`` holds the not-yet-normalized terms by literal degree; ``rhs[m-1]``
    keeps the right-hand side of the ``m``-th homological equation so that
    residuals can be checked afterwards.
    """

    r: int
    H0: Polynomial
    Z: tuple[Polynomial, ...]
    chi: tuple[Polynomial, ...]
    tail: GradedSeries
    rhs: tuple[Polynomial, ...] = ()

    @property
    def n(self) -> int:
        return self.H0.n

    @property
    def trunc_order(self) -> int:
        return self.tail.trunc_order

    def hamiltonian(self) -> GradedSeries:
        """Full transformed Hamiltonian as one graded series."""
        parts = {2: self.H0}
        for m, z in enumerate(self.Z, start=1):
            if z:
                parts[m + 2] = parts.get(m + 2, Polynomial(self.n)) + z
        series = GradedSeries(self.n, {d: p for d, p in parts.items() if p}, self.trunc_order)
        return series + self.tail

    def normal_part(self) -> Polynomial:
        out = Polynomial(self.n)
        for z in self.Z:
            out = out + z
        return out

    def homological_residuals(self) -> list[float]:
        """``||L_H0 chi_m + Z_m - rhs_m||_1 / ||rhs_m||_1`` for every step."""
        res = []
        for chi, z, psi in zip(self.chi, self.Z, self.rhs):
            r = lie_derivative(self.H0, chi) + z - psi
            scale = float(np.abs(psi.coeffs).sum())
            num = float(np.abs(r.coeffs).sum())
            res.append(num / scale if scale else num)
        return res


def initial_state(H: GradedSeries, spec: Spectrum, trunc_order: int | None = None,
                  tol: float = 1e-12) -> NormalizationState:
    n = spec.n
    if H.n != n:
        raise NormalFormError("Hamiltonian dimension does not match the spectrum")
    for d in (0, 1):
        if H[d]:
            raise NormalFormError(f"Hamiltonian has a degree-{d} part; expansion must be about an equilibrium")
    H0 = Polynomial.quadratic(spec.lam)
    quad = H[2]
    dev = (quad - H0).max_abs_coeff()
    if dev > tol * max(1.0, H0.max_abs_coeff()):
        raise NormalFormError(f"quadratic part is not sum lambda_l x_l y_l (deviation {dev:.3e})")
    trunc = H.trunc_order if trunc_order is None else min(trunc_order, H.trunc_order)
    tail = GradedSeries(n, {d: p for d, p in H.parts.items() if d >= 3}, trunc,
                        truncated=H.truncated)
    return NormalizationState(0, H0, (), (), tail, ())


def normalize_step(state: NormalizationState, spec: Spectrum) -> NormalizationState:
    """One step of the recursion: remove the lowest unnormalized degree.

    With ``chi_r`` solving ``L_H0 chi_r + Z_r = H_r`` the new pieces are, for
    ``t = s r + m``,

    * ``m > 0``: ``L^s Z_m / s! + sum_{p<s} L^p H_{(s-p) r + m} / p!``
    * ``m = 0``: ``L^{s-1}(Z_r/s + (s-1)/s H_r)/(s-1)! + sum_{p<=s-2} L^p H_{(s-p) r} / p!``

    with ``L = L_{chi_r}`` and all indices offset by two from the literal degree.
    """
    r = state.r + 1
    n = state.n
    trunc = state.trunc_order
    smax = trunc - 2
    tail = state.tail
    H = {d - 2: p for d, p in tail.parts.items()}
    psi = H.get(r, Polynomial(n))
    chi, Zr = solve_homological(psi, spec)
    Zs = {m: z for m, z in enumerate(state.Z, start=1)}

    def powers_of(f: Polynomial, idx: int):
        # L^p f for p = 0.. while idx + p r <= smax
        out = [f]
        p = 0
        while out[-1] and idx + (p + 1) * r <= smax:
            p += 1
            out.append(lie_derivative(chi, out[-1]))
        return out

    cache: dict[tuple[str, int], list[Polynomial]] = {}

    def lp(kind: str, idx: int, p: int) -> Polynomial:
        key = (kind, idx)
        if key not in cache:
            src = (H if kind == "H" else Zs).get(idx, Polynomial(n))
            cache[key] = powers_of(src, idx)
        seq = cache[key]
        return seq[p] if p < len(seq) else Polynomial(n)

    new_parts: dict[int, Polynomial] = {}
    truncated = tail.truncated
    for t in range(r + 1, smax + 1):
        s, m = divmod(t, r)
        acc = Polynomial(n)
        if m:
            acc = acc + lp("Z", m, s).scale(1.0 / math.factorial(s))
            for p in range(s):
                acc = acc + lp("H", (s - p) * r + m, p).scale(1.0 / math.factorial(p))
        else:
            mixed = Zr.scale(1.0 / s) + psi.scale((s - 1) / s)
            g = mixed
            for _ in range(s - 1):
                if not g:
                    break
                g = lie_derivative(chi, g)
            acc = acc + g.scale(1.0 / math.factorial(s - 1))
            for p in range(s - 1):
                acc = acc + lp("H", (s - p) * r, p).scale(1.0 / math.factorial(p))
        if acc:
            new_parts[t + 2] = acc
    if chi:
        # L_chi pushes the top degrees past the truncation
        truncated = True
    new_tail = GradedSeries(n, new_parts, trunc, truncated)
    return NormalizationState(r, state.H0, state.Z + (Zr,), state.chi + (chi,), new_tail,
                              state.rhs + (psi,))


@dataclass
class NormalFormResult:
    state: NormalizationState
    spectrum: Spectrum
    order: int
    provenance: dict = field(default_factory=dict)

    @property
    def mode(self) -> Mode:
        return self.spectrum.mode

    @property
    def n(self) -> int:
        return self.spectrum.n

    def to_json_obj(self) -> dict:
        st = self.state
        return {
            "spectrum": self.spectrum.to_json_obj(),
            "order": self.order,
            "trunc_order": st.trunc_order,
            "Z": [to_json_obj(z) for z in st.Z],
            "chi": [to_json_obj(c) for c in st.chi],
            "rhs": [to_json_obj(c) for c in st.rhs],
            "tail": {str(d): to_json_obj(p) for d, p in sorted(st.tail.parts.items())},
            "tail_truncated": st.tail.truncated,
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=1)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "NormalFormResult":
        spec = Spectrum.from_json_obj(obj["spectrum"])
        n = spec.n
        tail = GradedSeries(n, {int(d): from_json_obj(p) for d, p in obj["tail"].items()},
                            int(obj["trunc_order"]), bool(obj.get("tail_truncated", False)))
        Z = tuple(from_json_obj(z) for z in obj["Z"])
        chi = tuple(from_json_obj(c) for c in obj["chi"])
        rhs = tuple(from_json_obj(c) for c in obj.get("rhs", []))
        state = NormalizationState(len(Z), Polynomial.quadratic(spec.lam), Z, chi, tail, rhs)
        return cls(state, spec, int(obj["order"]), dict(obj.get("provenance", {})))


def _hash_series(H: GradedSeries) -> str:
    h = hashlib.sha256()
    for d in H.degrees():
        p = H[d]
        h.update(np.ascontiguousarray(p.exps).tobytes())
        h.update(np.ascontiguousarray(p.coeffs).tobytes())
    return h.hexdigest()


def normalize(H: GradedSeries, spec: Spectrum, order: int, trunc_order: int | None = None,
              prune: float = 0.0) -> NormalFormResult:
    """Bring ``H`` to normal form through offset order ``order``.

    ``trunc_order`` (literal degree) defaults to ``order + 4`` so that the
    first unnormalized pieces of the remainder are retained.  ``prune`` drops
    coefficients below ``prune * max|c|`` in every new piece (0 keeps all).
    """
    if order < 0:
        raise NormalFormError("order must be non-negative")
    if isinstance(H, Polynomial):
        H = GradedSeries.from_polynomial(H)
    if trunc_order is None:
        trunc_order = order + 4
    if spec.mode is not Mode.BIRKHOFF and spec.gamma is None:
        spec = spec.with_gamma()
    state = initial_state(H, spec, trunc_order)
    for _ in range(order):
        state = normalize_step(state, spec)
        if prune > 0:
            state = _pruned(state, prune)
    prov = {"input_sha256": _hash_series(H), "order": order, "trunc_order": state.trunc_order,
            "prune": prune, "mode": spec.mode.value}
    return NormalFormResult(state, spec, order, prov)


def _pruned(state: NormalizationState, eps: float) -> NormalizationState:
    tail = GradedSeries(state.n, {d: p.prune(eps) for d, p in state.tail.parts.items()},
                        state.trunc_order, state.tail.truncated)
    return NormalizationState(state.r, state.H0, state.Z, state.chi, tail, state.rhs)


def oracle_transform(H: GradedSeries, chi: Polynomial, trunc: int | None = None) -> GradedSeries:
    """``exp(L_chi) H`` evaluated directly as a Lie series."""
    return lie_series_apply(chi, H, trunc)


def oracle_normalize(H: GradedSeries, spec: Spectrum, order: int,
                     trunc_order: int | None = None) -> tuple[list[Polynomial], list[Polynomial], GradedSeries]:
    """Reference normalizer: every step transforms the whole series with ``exp(L_chi)``.

    Returns the lists of ``Z_m`` and ``chi_m`` and the final Hamiltonian.
    """
    if trunc_order is None:
        trunc_order = order + 4
    cur = H.with_trunc(trunc_order)
    Zs, chis = [], []
    for r in range(1, order + 1):
        # Z_1..Z_{r-1} sit below degree r + 2, so this is the unnormalized piece
        chi, Z = solve_homological(cur[r + 2], spec)
        Zs.append(Z)
        chis.append(chi)
        cur = oracle_transform(cur, chi, trunc_order)
    return Zs, chis, cur


def compose_coordinates(chis, n: int, trunc: int) -> list[GradedSeries]:
    """Old coordinates as series in the final normalized ones.

    Applies ``exp(L_chi_1)`` first, then ``exp(L_chi_2)``, ... to each
    coordinate function, so that ``H_old(X(z)) = H_new(z)`` through ``trunc``.
    Output order is ``x_1..x_n, y_1..y_n``.
    """
    out = []
    for i in range(2 * n):
        f = GradedSeries(n, {1: Polynomial.coordinate(n, i)}, trunc)
        for chi in chis:
            f = lie_series_apply(chi, f, trunc)
        out.append(f)
    return out


def max_relative_deviation(a: GradedSeries, b: GradedSeries) -> float:
    """Largest coefficient deviation relative to the largest coefficient, degree by degree."""
    worst = 0.0
    for d in set(a.degrees()) | set(b.degrees()):
        worst = max(worst, relative_deviation(a[d], b[d]))
    return worst


def structure_violations(result: NormalFormResult) -> list[str]:
    """Monomials of sum Z_m that break the expected normal-form shape (empty list if none)."""
    spec = result.spectrum
    n = spec.n
    bad = []
    for m, z in enumerate(result.state.Z, start=1):
        e = z.exps.astype(np.int64)
        trans = e[:, 1:n].sum(axis=1) + e[:, n + 1:].sum(axis=1)
        balanced = np.all(e[:, :n] == e[:, n:], axis=1)
        if spec.mode is Mode.LYAPUNOV:
            ok = (balanced & (trans == 0)) | (trans >= 2)
        elif spec.mode is Mode.EXTENDED:
            ok = (balanced & (trans <= 2)) | (trans >= 3)
        else:
            ok = np.abs(divisors(e, spec)) == 0
        for row in e[~ok]:
            bad.append(f"Z_{m}: j={tuple(row[:n])} k={tuple(row[n:])}")
    return bad

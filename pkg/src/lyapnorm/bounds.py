"""Majorant sequences, recursive norm bounds and the convergence certificate.

Conventions: the domain-loss sequence is ``d_r = b / r**2`` with
``b = 6 d / pi**2`` so that ``sum d_r = d``; ``delta_r = d_1 + .. + d_r`` and
``d_0 = 1``.  Indices ``r, s`` are offset orders (literal degree minus two).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .normalform import NormalFormResult
from .poly import (GradedSeries, Polynomial, PolydiskGeometry, lie_derivative, polydisk_norm)
from .resonance import Mode, Spectrum, class_codes

EXACT_T_MAX_S = 16


@dataclass(frozen=True)
class DeltaSequence:
    d: float

    def __post_init__(self):
        if not 0 < self.d < 0.5:
            raise ValueError("d must lie in (0, 1/2)")

    @property
    def b(self) -> float:
        return 6.0 * self.d / math.pi ** 2

    def dr(self, r: int) -> float:
        if r == 0:
            return 1.0
        return self.b / r ** 2

    def delta(self, r: int) -> float:
        if r <= 0:
            return 0.0
        return self.b * float(np.sum(1.0 / np.arange(1, r + 1, dtype=float) ** 2))

    def tail_sum(self, r: int) -> float:
        """``d - delta_r``, via the trigamma function for accuracy at large ``r``."""
        from scipy.special import polygamma
        return self.b * float(polygamma(1, r + 1))


# -- T_{r,s} -------------------------------------------------------------------------


def _multisets(maxval: int, maxcount: int, budget: int, start: int = 2):
    """Multisets of integers in [start, maxval] (nondecreasing) with product <= budget."""
    yield ()
    if maxcount == 0:
        return
    for v in range(start, maxval + 1):
        if v > budget:
            break
        for rest in _multisets(maxval, maxcount - 1, budget // v, v):
            yield (v,) + rest


def admissible(J: Sequence[int], r: int, s: int) -> bool:
    """Membership of the multiset ``J`` in the index family for ``(r, s)``.

    Requires ``1 <= #J <= 2(s-1)``, entries in ``1..r`` and
    ``sum log2 j <= 2(s - 1 - log2 s)``, the latter checked exactly as
    ``prod(j) * s**2 <= 4**(s-1)``.
    """
    if not 1 <= len(J) <= 2 * (s - 1):
        return False
    if any(j < 1 or j > r for j in J):
        return False
    return math.prod(J) * s * s <= 4 ** (s - 1)


def t_exact(r: int, s: int, dseq) -> float:
    """``T_{r,s} = max_J prod_{j in J} 1/d_j`` by exhaustive multiset enumeration."""
    if not 0 <= r < s:
        raise ValueError("need 0 <= r < s")
    if r == 0:
        return 1.0
    if s > EXACT_T_MAX_S:
        raise ValueError(f"exact enumeration guarded to s <= {EXACT_T_MAX_S}")
    dr = dseq.dr if isinstance(dseq, DeltaSequence) else (lambda j: dseq[j])
    K = 2 * (s - 1)
    budget_num = 4 ** (s - 1)
    budget = budget_num // (s * s)
    if budget < 1:
        return -math.inf  # empty family
    inv1 = 1.0 / dr(1)
    best = -math.inf
    for core in _multisets(r, K, budget):
        val = 1.0
        for j in core:
            val /= dr(j)
        free = K - len(core)
        ones = free if inv1 >= 1 else (0 if core else 1)
        if not core and ones == 0:
            continue
        val *= inv1 ** ones
        best = max(best, val)
    return best


def t_bound(s: int, b: float) -> float:
    """Closed bound ``(16/b^2)^(s-1)`` valid for ``d_r = b/r^2``."""
    if s < 1 or b <= 0:
        raise ValueError("need s >= 1 and b > 0")
    return _safe_pow(16.0 / b ** 2, s - 1)


def t_value(r: int, s: int, dseq: DeltaSequence, path: str = "bound") -> tuple[float, str]:
    """``T_{r,s}`` by the requested path; returns the value and the path used."""
    if r == 0:
        return 1.0, "exact"
    if path == "exact" or (path == "auto" and s <= EXACT_T_MAX_S):
        return t_exact(r, s, dseq), "exact"
    return t_bound(s, dseq.b), "bound"


def _safe_pow(x: float, p: int) -> float:
    try:
        return math.pow(x, p)
    except OverflowError:
        return math.inf


# -- mu and Catalan ------------------------------------------------------------------


@lru_cache(maxsize=None)
def mu(r: int, s: int) -> int:
    """``mu_{0,0} = 0``, ``mu_{0,s} = 1``, ``mu_{r,s} = sum_{rp<s} mu_{r-1,r}^p mu_{r-1,s-rp}``."""
    if r < 0 or s < 0:
        raise ValueError("indices must be non-negative")
    if r == 0:
        return 0 if s == 0 else 1
    base = mu(r - 1, r)
    total = 0
    p = 0
    while r * p < s:
        total += base ** p * mu(r - 1, s - r * p)
        p += 1
    return total


@lru_cache(maxsize=None)
def catalan(r: int) -> int:
    """``nu_1 = 1``, ``nu_r = sum_{j=1}^{r-1} nu_j nu_{r-j}``."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return 1
    return sum(catalan(j) * catalan(r - j) for j in range(1, r))


def catalan_closed(r: int) -> int:
    """``2^(r-1) (2r-3)!! / r!`` in exact integer arithmetic."""
    if r < 1:
        raise ValueError("r must be >= 1")
    dfact = math.prod(range(1, 2 * r - 2, 2)) if r >= 2 else 1
    num = 2 ** (r - 1) * dfact
    q, rem = divmod(num, math.factorial(r))
    if rem:
        raise ArithmeticError("closed form is not an integer")
    return q


# -- recursive norm bounds -----------------------------------------------------------


def constant_C(h: float, E: float, gamma: float, Lambda: float) -> float:
    return h + 4.0 * math.e ** 2 * E / (gamma * Lambda ** 2)


def _ds(dseq: DeltaSequence, r: int) -> float:
    return dseq.dr(r)


@dataclass
class BoundInputs:
    E: float
    h: float
    gamma: float
    Lambda: float
    dseq: DeltaSequence
    t_path: str = "bound"

    @property
    def C(self) -> float:
        return constant_C(self.h, self.E, self.gamma, self.Lambda)


def norm_bounds(r: int, inputs: BoundInputs, s: int | None = None) -> dict:
    """Bounds on ``chi_r``, ``Z_r`` (and on ``H^{(r)}_s`` when ``s > r`` is given)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    C = inputs.C
    dseq = inputs.dseq
    T, path = t_value(r - 1, r, dseq, inputs.t_path)
    common = float(mu(r - 1, r)) * T * _safe_pow(C, r - 1) * inputs.E
    out = {
        "bound_chi": common / inputs.gamma,
        "bound_Z": common / dseq.dr(r - 1),
        "bound_Zsharp": common,
        "T": T,
        "T_path": path,
        "mu": mu(r - 1, r),
    }
    if s is not None:
        if s <= r:
            raise ValueError("need s > r")
        Ts, spath = t_value(r, s, dseq, inputs.t_path)
        hs = float(mu(r, s)) * Ts * _safe_pow(C, s - 1) * inputs.E
        out.update(bound_H=hs / dseq.dr(r), bound_Hsharp=hs, T_s=Ts, T_s_path=spath)
    return out


@dataclass
class Majorant:
    E: float
    h: float
    degenerate: bool = False
    norms: dict = field(default_factory=dict)


def majorize_input(H: GradedSeries, geom: PolydiskGeometry) -> Majorant:
    """Smallest ``E``, then smallest ``h``, with ``||H_s||_1 <= h^(s-1) E`` (offset ``s``)."""
    norms = {}
    for d in H.degrees():
        if d >= 3:
            val = polydisk_norm(H[d], geom)
            if val > 0:
                norms[d - 2] = val
    if not norms:
        return Majorant(np.finfo(float).tiny, 0.0, True, norms)
    if 1 in norms:
        E = norms[1]
        h = max([(v / E) ** (1.0 / (s - 1)) for s, v in norms.items() if s > 1], default=0.0)
        return Majorant(E, h, False, norms)
    # no cubic part: anchor E at the lowest present order and keep h >= 1
    s0 = min(norms)
    E = norms[s0]
    h = max([1.0] + [(v / E) ** (1.0 / (s - 1)) for s, v in norms.items() if s > 1])
    return Majorant(E, h, False, norms)


# -- generalized Cauchy estimates ----------------------------------------------------


def _split(f: Polynomial, n: int, mode: Mode):
    codes = class_codes(f.exps, n, mode)
    return f.select(codes == 0), f.select(codes == 1), f.select(codes == 2)


@dataclass
class CauchyReport:
    lhs: dict
    rhs: dict

    @property
    def slack(self) -> dict:
        return {k: self.rhs[k] - self.lhs[k] for k in self.lhs}

    @property
    def ratio(self) -> dict:
        return {k: (self.lhs[k] / self.rhs[k] if self.rhs[k] > 0 else 0.0) for k in self.lhs}

    @property
    def ok(self) -> bool:
        return all(v >= 0 for v in self.slack.values())


def verify_cauchy(chi: Polynomial, f: Polynomial, Z: Polynomial, geom: PolydiskGeometry,
                  delta_prime: float, delta_dblprime: float, delta: float,
                  spec: Spectrum) -> CauchyReport:
    """Evaluate both sides of the four derivative estimates with actual norms.

    ``chi`` must lie in W (it is the homological inverse of ``psi = L_H0 chi``)
    and ``Z`` in the normal-form subspace.  Keys of the report:
    ``generating``, ``lie_generic``, ``natural_projection``, ``normal_form``.
    """
    if not (0 <= max(delta_prime, delta_dblprime) < delta <= 0.5):
        raise ValueError("need 0 <= max(delta', delta'') < delta <= 1/2")
    if spec.gamma is None:
        spec = spec.with_gamma()
    n = spec.n
    mode = spec.mode
    gamma = spec.gamma
    Lam2 = geom.Lambda ** 2
    H0 = Polynomial.quadratic(spec.lam)
    psi = lie_derivative(H0, chi)
    nrm = lambda p, dl: polydisk_norm(p, geom, dl)

    chi_n = nrm(chi, delta_prime)
    psi_n = nrm(psi, delta_prime)
    f_n = nrm(f, delta_dblprime)
    Z_n = nrm(Z, delta_dblprime)
    _, chi_nat, _ = _split(chi, n, mode)
    _, _, f_flat = _split(f, n, mode)
    z_sh, z_nat, _ = _split(Z, n, mode)
    proj = _split(lie_derivative(chi_nat, f_flat), n, mode)[1]

    lhs = {
        "generating": chi_n,
        "lie_generic": nrm(lie_derivative(chi, f), delta),
        "natural_projection": nrm(proj, delta),
        "normal_form": nrm(lie_derivative(chi, z_sh + z_nat), delta),
    }
    rhs = {
        "generating": psi_n / gamma,
        "lie_generic": chi_n * f_n / ((delta - delta_prime) * (delta - delta_dblprime) * Lam2),
        "natural_projection": 4.0 * chi_n * f_n / ((delta - delta_dblprime) * Lam2),
        "normal_form": psi_n * Z_n / ((delta - delta_dblprime) * gamma * Lam2),
    }
    return CauchyReport(lhs, rhs)


def random_homogeneous(rng: np.random.Generator, n: int, degree: int, nterms: int,
                       mask=None) -> Polynomial:
    """Random homogeneous polynomial; ``mask(exps) -> bool array`` filters candidate monomials."""
    from itertools import combinations_with_replacement
    monos = []
    for combo in combinations_with_replacement(range(2 * n), degree):
        row = [0] * (2 * n)
        for i in combo:
            row[i] += 1
        monos.append(row)
    monos = np.array(monos, dtype=np.int64)
    if mask is not None:
        monos = monos[np.asarray(mask(monos), dtype=bool)]
    if not monos.shape[0]:
        return Polynomial(n)
    pick = rng.choice(monos.shape[0], size=min(nterms, monos.shape[0]), replace=False)
    c = rng.normal(size=pick.size) + 1j * rng.normal(size=pick.size)
    return Polynomial.from_arrays(n, monos[pick], c)


def cauchy_trial(rng: np.random.Generator, spec: Spectrum, geom: PolydiskGeometry,
                 delta: float, delta_prime: float = 0.0, delta_dblprime: float = 0.0,
                 degrees=(3, 6), nterms: int = 12) -> CauchyReport:
    """One randomized check: W-valued ``chi``, generic ``f``, normal-form ``Z``."""
    from .resonance import zpart_mask
    from .normalform import solve_homological
    n = spec.n
    lo, hi = degrees
    dchi, df, dz = (int(rng.integers(lo, hi + 1)) for _ in range(3))
    psi = random_homogeneous(rng, n, dchi, nterms, lambda e: ~zpart_mask(e, spec))
    chi, _ = solve_homological(psi, spec)
    f = random_homogeneous(rng, n, df, nterms)
    Z = random_homogeneous(rng, n, dz, nterms, lambda e: zpart_mask(e, spec))
    return verify_cauchy(chi, f, Z, geom, delta_prime, delta_dblprime, delta, spec)


# -- ledger and certificate ----------------------------------------------------------


@dataclass
class LedgerRow:
    r: int
    actual_chi: float
    bound_chi: float
    actual_Z: float
    bound_Z: float
    mu: int
    T: float
    T_path: str

    @property
    def ratio(self) -> float:
        return self.actual_chi / self.bound_chi if self.bound_chi > 0 else math.inf

    @property
    def ratio_Z(self) -> float:
        if self.bound_Z == 0:
            return 0.0 if self.actual_Z == 0 else math.inf
        return self.actual_Z / self.bound_Z

    @property
    def passed(self) -> bool:
        return self.actual_chi <= self.bound_chi and self.actual_Z <= self.bound_Z


@dataclass
class BoundLedger:
    E: float
    h: float
    gamma: float
    Lambda: float
    C: float
    d: float
    rows: list[LedgerRow]
    degenerate: bool = False
    beta: float | None = None
    G: float | None = None
    rho: float | None = None
    beta_th: float | None = None

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "actual_chi", "bound_chi", "ratio", "actual_Z", "bound_Z", "ratio_Z",
                    "mu", "T", "T_path", "pass"])
        for row in self.rows:
            w.writerow([row.r, repr(row.actual_chi), repr(row.bound_chi), repr(row.ratio),
                        repr(row.actual_Z), repr(row.bound_Z), repr(row.ratio_Z),
                        row.mu, repr(row.T), row.T_path, "pass" if row.passed else "fail"])
        return buf.getvalue()


def build_ledger(nf: NormalFormResult, H: GradedSeries, geom: PolydiskGeometry, d: float,
                 t_path: str = "bound") -> BoundLedger:
    """Compare actual ``||chi_r||`` and ``||Z_r||`` on ``(1 - delta_{r-1}) R`` with their bounds."""
    spec = nf.spectrum
    if spec.gamma is None:
        spec = spec.with_gamma()
    if isinstance(H, Polynomial):
        H = GradedSeries.from_polynomial(H)
    dseq = DeltaSequence(d)
    maj = majorize_input(H, geom)
    inputs = BoundInputs(maj.E, maj.h, spec.gamma, geom.Lambda, dseq, t_path)
    rows = []
    for r, (chi, Z) in enumerate(zip(nf.state.chi, nf.state.Z), start=1):
        b = norm_bounds(r, inputs)
        dl = dseq.delta(r - 1)
        rows.append(LedgerRow(r, polydisk_norm(chi, geom, dl), b["bound_chi"],
                              polydisk_norm(Z, geom, dl), b["bound_Z"], b["mu"], b["T"], b["T_path"]))
    return BoundLedger(maj.E, maj.h, spec.gamma, geom.Lambda, inputs.C, d, rows, maj.degenerate)


@dataclass
class Certificate:
    beta: float
    G: float
    rho: float
    beta_th: float
    rho_th: float
    margin: float
    orders: int

    def to_json_obj(self) -> dict:
        return {"beta": self.beta, "G": self.G, "rho": self.rho, "beta_theoretical": self.beta_th,
                "rho_theoretical": self.rho_th, "margin": self.margin, "orders": self.orders,
                "beta_within_theory": bool(self.beta <= self.beta_th)}


def _radius(beta: float, G: float, Lambda: float, margin: float) -> float:
    """Largest ``rho < 1/beta`` with ``sum_r G beta^(r-1) rho^(r+2) = G rho^3/(1 - beta rho) <= margin Lambda``."""
    target = margin * Lambda
    if G <= 0:
        return math.inf if beta <= 0 else 1.0 / beta
    # equivalent monotone cubic G rho^3 + target beta rho - target = 0
    g = lambda rho: G * rho ** 3 + target * beta * rho - target
    hi = (target / G) ** (1.0 / 3.0)
    if beta > 0:
        hi = min(hi, 1.0 / beta)
    if g(hi) <= 0:
        return hi
    return float(brentq(g, 0.0, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps))


def fit_certificate(actual_chi_norms: Sequence[float], dseq: DeltaSequence, ledger: BoundLedger | None = None,
                    margin: float = 0.1, Lambda: float | None = None, C: float | None = None) -> Certificate:
    """Geometric majorant ``||chi_r|| <= beta^(r-1) G`` fitted to actual norms.

    ``G = ||chi_1||`` (first nonzero norm if ``chi_1`` vanishes) and
    ``beta = max_{r>=2} (||chi_r||/G)^(1/(r-1))``.  The theoretical rate is
    ``4 (16/b^2) C``.  ``rho`` solves ``G rho^3 / (1 - beta rho) = margin Lambda``.
    """
    norms = [float(v) for v in actual_chi_norms]
    if len(norms) < 3:
        raise ValueError("need at least three orders")
    if ledger is not None:
        Lambda = ledger.Lambda if Lambda is None else Lambda
        C = ledger.C if C is None else C
    if Lambda is None or C is None:
        raise ValueError("Lambda and C are required (pass a ledger)")
    G = norms[0]
    if G <= 0:
        nz = [v for v in norms if v > 0]
        G = nz[0] if nz else 0.0
    if G > 0:
        beta = max((v / G) ** (1.0 / (r - 1)) for r, v in enumerate(norms, start=1) if r >= 2)
    else:
        beta = 0.0
    beta_th = 4.0 * (16.0 / dseq.b ** 2) * C
    rho = _radius(beta, G, Lambda, margin)
    rho_th = _radius(beta_th, G, Lambda, margin)
    return Certificate(beta, G, rho, beta_th, rho_th, margin, len(norms))


def chi_norms(nf: NormalFormResult, geom: PolydiskGeometry, d: float) -> list[float]:
    """``||chi_r||_{1-d}`` for every computed order."""
    return [polydisk_norm(chi, geom, d) for chi in nf.state.chi]

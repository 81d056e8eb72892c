"""Sparse complex polynomials in canonical variables ``(x_1..x_n, y_1..y_n)``.

A :class:`Polynomial` stores its monomials as an integer exponent array of
shape ``(N, 2n)`` (x-exponents first, then y-exponents) next to a complex
coefficient vector.  Products of monomials are computed on packed integer
keys so that the Poisson bracket of two polynomials is a handful of numpy
outer products followed by a single sort-and-reduce.

The Lie derivative follows the convention ``L_chi f = {f, chi}`` with

    {f, g} = sum_l (df/dx_l dg/dy_l - df/dy_l dg/dx_l),

so that for ``H0 = sum_l lam_l x_l y_l`` one has
``L_H0 x^j y^k = <j - k, lam> x^j y^k``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

MAX_DEGREE = 64
_BASE = MAX_DEGREE + 1
# 2n digits in base 65 fit into a signed 64-bit key for n <= 5
_MAX_PACKED_VARS = 10


class ExponentPair(NamedTuple):
    """Exponents ``(j, k)`` of the monomial ``x^j y^k``."""

    j: tuple[int, ...]
    k: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.j) + sum(self.k)

    @property
    def n(self) -> int:
        return len(self.j)

    def flat(self) -> tuple[int, ...]:
        return tuple(self.j) + tuple(self.k)

    @classmethod
    def from_flat(cls, row: Iterable[int]) -> "ExponentPair":
        row = tuple(int(v) for v in row)
        n = len(row) // 2
        return cls(row[:n], row[n:])


class DimensionError(ValueError):
    """Operands live in phase spaces of different dimension."""


def _weights(nvars: int) -> np.ndarray | None:
    if nvars > _MAX_PACKED_VARS:
        return None
    return _BASE ** np.arange(nvars, dtype=np.int64)


def _decode(keys: np.ndarray, nvars: int) -> np.ndarray:
    out = np.empty((keys.size, nvars), dtype=np.int64)
    rest = keys.copy()
    for i in range(nvars):
        rest, out[:, i] = np.divmod(rest, _BASE)
    return out


def _combine(exps: np.ndarray, coeffs: np.ndarray, nvars: int):
    """Sum coefficients of repeated monomials; sorted output, exact zeros removed."""
    if coeffs.size == 0:
        return np.zeros((0, nvars), dtype=np.uint16), np.zeros(0, dtype=complex)
    w = _weights(nvars)
    if w is not None:
        keys = exps.astype(np.int64) @ w
        uniq, inv = np.unique(keys, return_inverse=True)
        if uniq.size == keys.size:
            # no repeats: a plain permutation keeps signed zeros intact
            summed = np.empty(uniq.size, dtype=complex)
            summed[inv] = coeffs
        else:
            summed = _bincount_complex(inv, coeffs, uniq.size)
        uexps = _decode(uniq, nvars)
    else:
        uexps, inv = np.unique(exps.astype(np.int64), axis=0, return_inverse=True)
        inv = inv.ravel()
        summed = _bincount_complex(inv, coeffs, uexps.shape[0])
    keep = summed != 0
    return uexps[keep].astype(np.uint16), summed[keep]


def _combine_keys(keys: np.ndarray, coeffs: np.ndarray, nvars: int):
    if coeffs.size == 0:
        return np.zeros((0, nvars), dtype=np.uint16), np.zeros(0, dtype=complex)
    uniq, inv = np.unique(keys, return_inverse=True)
    summed = _bincount_complex(inv, coeffs, uniq.size)
    keep = summed != 0
    return _decode(uniq[keep], nvars).astype(np.uint16), summed[keep]


def _bincount_complex(inv: np.ndarray, coeffs: np.ndarray, size: int) -> np.ndarray:
    re_ = np.bincount(inv, weights=coeffs.real, minlength=size)
    im_ = np.bincount(inv, weights=coeffs.imag, minlength=size)
    return re_ + 1j * im_


class Polynomial:
    """Immutable sparse polynomial with complex double coefficients.

    Parameters
    ----------
    n : int
        Number of degrees of freedom; the polynomial lives in ``2n`` variables.
    terms : mapping, optional
        Keys are :class:`ExponentPair`, ``(j, k)`` pairs, or flat tuples of
        length ``2n``; values are coefficients.
    """

    __slots__ = ("n", "exps", "coeffs")

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = int(n)
        if not terms:
            self.exps = np.zeros((0, 2 * self.n), dtype=np.uint16)
            self.coeffs = np.zeros(0, dtype=complex)
            return
        rows, vals = [], []
        for key, c in terms.items():
            rows.append(_flatten_key(key, self.n))
            vals.append(complex(c))
        exps = np.array(rows, dtype=np.int64).reshape(-1, 2 * self.n)
        if (exps < 0).any():
            raise ValueError("negative exponent")
        if exps.sum(axis=1).max() > MAX_DEGREE:
            raise ValueError(f"degree exceeds {MAX_DEGREE}")
        self.exps, self.coeffs = _combine(exps, np.array(vals, dtype=complex), 2 * self.n)

    @classmethod
    def _raw(cls, n: int, exps: np.ndarray, coeffs: np.ndarray) -> "Polynomial":
        # exps/coeffs must already be canonical (sorted, unique, nonzero)
        obj = cls.__new__(cls)
        obj.n = n
        obj.exps = exps
        obj.coeffs = coeffs
        return obj

    @classmethod
    def from_arrays(cls, n: int, exps, coeffs) -> "Polynomial":
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, 2 * n)
        coeffs = np.asarray(coeffs, dtype=complex).ravel()
        if exps.size and exps.sum(axis=1).max() > MAX_DEGREE:
            raise ValueError(f"degree exceeds {MAX_DEGREE}")
        e, c = _combine(exps, coeffs, 2 * n)
        return cls._raw(n, e, c)

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n)

    @classmethod
    def constant(cls, n: int, c: complex) -> "Polynomial":
        return cls(n, {(0,) * (2 * n): c})

    @classmethod
    def coordinate(cls, n: int, index: int) -> "Polynomial":
        """The coordinate function ``x_{index+1}`` (``index < n``) or ``y_{index-n+1}``."""
        row = [0] * (2 * n)
        row[index] = 1
        return cls(n, {tuple(row): 1.0})

    @classmethod
    def quadratic(cls, lam) -> "Polynomial":
        """``H0 = sum_l lam_l x_l y_l``."""
        lam = np.asarray(lam, dtype=complex)
        n = lam.size
        terms = {}
        for l in range(n):
            row = [0] * (2 * n)
            row[l] = row[n + l] = 1
            terms[tuple(row)] = lam[l]
        return cls(n, terms)

    # -- basic queries ---------------------------------------------------------------

    def __len__(self) -> int:
        return self.coeffs.size

    def __bool__(self) -> bool:
        return self.coeffs.size > 0

    @property
    def terms(self) -> dict[ExponentPair, complex]:
        return {ExponentPair.from_flat(row): complex(c) for row, c in zip(self.exps, self.coeffs)}

    def degrees(self) -> np.ndarray:
        return self.exps.astype(np.int64).sum(axis=1)

    @property
    def degree(self) -> int:
        """Maximal total degree; ``-1`` for the zero polynomial."""
        return int(self.degrees().max()) if self else -1

    @property
    def min_degree(self) -> int:
        return int(self.degrees().min()) if self else -1

    def is_homogeneous(self) -> bool:
        return len(set(self.degrees().tolist())) <= 1

    def coefficient(self, j, k) -> complex:
        row = np.array(tuple(j) + tuple(k), dtype=np.uint16)
        hit = np.all(self.exps == row, axis=1)
        return complex(self.coeffs[hit][0]) if hit.any() else 0j

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.n == other.n and self.exps.shape == other.exps.shape
                and np.array_equal(self.exps, other.exps)
                and np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Polynomial(n={self.n}, {to_text(self) or '0'})"

    # -- arithmetic ------------------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.n != other.n:
            raise DimensionError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            if not other:
                return self
            if not self:
                return other
            e, c = _combine(np.vstack([self.exps, other.exps]),
                            np.concatenate([self.coeffs, other.coeffs]), 2 * self.n)
            return Polynomial._raw(self.n, e, c)
        if np.isscalar(other):
            return self + Polynomial.constant(self.n, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.n, self.exps, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, Polynomial):
            return self + (-other)
        if np.isscalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, alpha: complex) -> "Polynomial":
        alpha = complex(alpha)
        if alpha == 0:
            return Polynomial(self.n)
        c = self.coeffs * alpha
        keep = c != 0
        return Polynomial._raw(self.n, self.exps[keep], c[keep])

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return multiply(self, other)
        if np.isscalar(other):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, alpha):
        return self.scale(1.0 / complex(alpha))

    def __pow__(self, p: int) -> "Polynomial":
        result = Polynomial.constant(self.n, 1.0)
        base = self
        while p:
            if p & 1:
                result = result * base
            base = base * base if p > 1 else base
            p >>= 1
        return result

    def __call__(self, x, y):
        """Evaluate at ``(x, y)``; trailing axes broadcast (shape ``(n, ...)``)."""
        return evaluate(self, x, y)

    # -- projections -----------------------------------------------------------------

    def select(self, mask) -> "Polynomial":
        mask = np.asarray(mask, dtype=bool)
        return Polynomial._raw(self.n, self.exps[mask], self.coeffs[mask])

    def homogeneous_part(self, degree: int) -> "Polynomial":
        return self.select(self.degrees() == degree)

    def truncate(self, max_degree: int) -> "Polynomial":
        return self.select(self.degrees() <= max_degree)

    def by_degree(self) -> dict[int, "Polynomial"]:
        degs = self.degrees()
        return {int(d): self.select(degs == d) for d in np.unique(degs)}

    def prune(self, eps: float) -> "Polynomial":
        """Drop terms with ``|c| < eps * max|c|``."""
        if eps <= 0 or not self:
            return self
        a = np.abs(self.coeffs)
        return self.select(a >= eps * a.max())

    def conjugate_coefficients(self) -> "Polynomial":
        return Polynomial._raw(self.n, self.exps, self.coeffs.conj())

    def derivative(self, index: int) -> "Polynomial":
        """Partial derivative w.r.t. variable ``index`` (``x_l`` for ``l < n``)."""
        e = self.exps.astype(np.int64)
        p = e[:, index]
        mask = p > 0
        e = e[mask]
        e[:, index] -= 1
        c = self.coeffs[mask] * p[mask]
        return Polynomial._raw(self.n, *_combine(e, c, 2 * self.n))

    def max_abs_coeff(self) -> float:
        return float(np.abs(self.coeffs).max()) if self else 0.0


def _flatten_key(key, n: int) -> tuple[int, ...]:
    if isinstance(key, ExponentPair) or (len(key) == 2 and not np.isscalar(key[0])):
        j, k = key
        row = tuple(j) + tuple(k)
    else:
        row = tuple(key)
    if len(row) != 2 * n:
        raise DimensionError(f"exponent vector {row} does not match n={n}")
    return row


def multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    if not f or not g:
        return Polynomial(f.n)
    nv = 2 * f.n
    w = _weights(nv)
    c = (f.coeffs[:, None] * g.coeffs[None, :]).ravel()
    if w is not None:
        keys = ((f.exps.astype(np.int64) @ w)[:, None] + (g.exps.astype(np.int64) @ w)[None, :]).ravel()
        return Polynomial._raw(f.n, *_combine_keys(keys, c, nv))
    e = (f.exps.astype(np.int64)[:, None, :] + g.exps.astype(np.int64)[None, :, :]).reshape(-1, nv)
    return Polynomial._raw(f.n, *_combine(e, c, nv))


def poisson_bracket(f: Polynomial, g: Polynomial) -> Polynomial:
    """``{f, g} = sum_l (df/dx_l dg/dy_l - df/dy_l dg/dx_l)``."""
    f._check(g)
    n = f.n
    if not f or not g:
        return Polynomial(n)
    nv = 2 * n
    ef = f.exps.astype(np.int64)
    eg = g.exps.astype(np.int64)
    cc = f.coeffs[:, None] * g.coeffs[None, :]
    w = _weights(nv)
    if w is not None:
        ksum = (ef @ w)[:, None] + (eg @ w)[None, :]
    key_parts, coeff_parts, exp_parts = [], [], []
    for l in range(n):
        weight = ef[:, l][:, None] * eg[:, n + l][None, :] - ef[:, n + l][:, None] * eg[:, l][None, :]
        nz = weight != 0
        if not nz.any():
            continue
        coeff_parts.append(cc[nz] * weight[nz])
        if w is not None:
            key_parts.append(ksum[nz] - (w[l] + w[n + l]))
        else:
            a, b = np.nonzero(nz)
            e = ef[a] + eg[b]
            e[:, l] -= 1
            e[:, n + l] -= 1
            exp_parts.append(e)
    if not coeff_parts:
        return Polynomial(n)
    coeffs = np.concatenate(coeff_parts)
    if w is not None:
        return Polynomial._raw(n, *_combine_keys(np.concatenate(key_parts), coeffs, nv))
    return Polynomial._raw(n, *_combine(np.vstack(exp_parts), coeffs, nv))


def lie_derivative(chi: Polynomial, f: Polynomial) -> Polynomial:
    """``L_chi f = {f, chi}``."""
    return poisson_bracket(f, chi)


def evaluate(f: Polynomial, x, y):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape[0] != f.n or y.shape[0] != f.n:
        raise DimensionError("point dimension mismatch")
    z = np.concatenate([x, y], axis=0)
    if not f:
        return np.zeros(z.shape[1:], dtype=complex) if z.ndim > 1 else 0j
    e = f.exps.astype(np.int64)
    mono = np.ones((e.shape[0],) + z.shape[1:], dtype=complex)
    extra = (1,) * (z.ndim - 1)
    for i in range(2 * f.n):
        col = e[:, i]
        if col.any():
            mono = mono * z[i][None, ...] ** col.reshape((-1,) + extra)
    out = np.tensordot(f.coeffs, mono, axes=(0, 0))
    return complex(out) if np.ndim(out) == 0 else out


def substitute(f: Polynomial, images: list[Polynomial], max_degree: int | None = None) -> Polynomial:
    """Compose ``f`` with the map whose coordinate functions are ``images``.

    ``images`` holds ``2m`` polynomials in a common dimension; ``f`` must have
    ``n = m`` degrees of freedom.  Terms above ``max_degree`` are dropped at
    every multiplication.
    """
    if len(images) != 2 * f.n:
        raise DimensionError("need one image per variable")
    m = images[0].n
    cut = (lambda p: p) if max_degree is None else (lambda p: p.truncate(max_degree))
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i: int, p: int) -> Polynomial:
        if p == 0:
            return Polynomial.constant(m, 1.0)
        if (i, p) not in powers:
            powers[(i, p)] = images[i] if p == 1 else cut(power(i, p - 1) * images[i])
        return powers[(i, p)]

    result = Polynomial(m)
    for row, c in zip(f.exps.astype(np.int64), f.coeffs):
        term = Polynomial.constant(m, c)
        for i, p in enumerate(row):
            if p:
                term = cut(term * power(i, int(p)))
        result = result + term
    return result


# -- polydisk norms ------------------------------------------------------------------


@dataclass(frozen=True)
class PolydiskGeometry:
    """Polydisk ``|x_j|, |y_j| <= R_j``."""

    R: tuple[float, ...]

    def __post_init__(self):
        R = tuple(float(r) for r in np.atleast_1d(self.R))
        if not R or min(R) <= 0:
            raise ValueError("radii must be positive")
        object.__setattr__(self, "R", R)

    @property
    def n(self) -> int:
        return len(self.R)

    @property
    def Lambda(self) -> float:
        return min(self.R)

    @classmethod
    def unit(cls, n: int) -> "PolydiskGeometry":
        return cls((1.0,) * n)


def polydisk_norm(f: Polynomial, geom: PolydiskGeometry, delta: float = 0.0) -> float:
    """Weighted l1 norm ``sum |f_jk| ((1-delta) R)^(j+k)``."""
    if not delta < 1:
        raise ValueError("delta must be < 1")
    if geom.n != f.n:
        raise DimensionError("geometry dimension mismatch")
    if not f:
        return 0.0
    radii = (1.0 - delta) * np.asarray(geom.R * 2)
    weights = np.prod(radii[None, :] ** f.exps.astype(np.int64), axis=1)
    return float(np.sum(np.abs(f.coeffs) * weights))


# -- graded series -------------------------------------------------------------------


class GradedSeries:
    """Polynomial split into homogeneous parts, truncated at ``trunc_order``.

    ``truncated`` records whether any term above the truncation order was
    discarded while building or transforming the series.
    """

    __slots__ = ("n", "parts", "trunc_order", "truncated")

    def __init__(self, n: int, parts: Mapping[int, Polynomial] | None = None,
                 trunc_order: int = MAX_DEGREE, truncated: bool = False):
        self.n = n
        self.trunc_order = int(trunc_order)
        self.truncated = truncated
        self.parts: dict[int, Polynomial] = {}
        for d, p in (parts or {}).items():
            if p.n != n:
                raise DimensionError("part dimension mismatch")
            if not p:
                continue
            if not (p.is_homogeneous() and p.min_degree == d):
                raise ValueError(f"part {d} is not homogeneous of degree {d}")
            if d > self.trunc_order:
                self.truncated = True
                continue
            self.parts[int(d)] = p

    @classmethod
    def from_polynomial(cls, f: Polynomial, trunc_order: int = MAX_DEGREE) -> "GradedSeries":
        return cls(f.n, f.by_degree(), trunc_order)

    def to_polynomial(self) -> Polynomial:
        out = Polynomial(self.n)
        for d in sorted(self.parts):
            out = out + self.parts[d]
        return out

    def __getitem__(self, degree: int) -> Polynomial:
        return self.parts.get(degree, Polynomial(self.n))

    def degrees(self) -> list[int]:
        return sorted(self.parts)

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        if self.n != other.n:
            raise DimensionError("dimension mismatch")
        trunc = min(self.trunc_order, other.trunc_order)
        parts = dict(self.parts)
        for d, p in other.parts.items():
            parts[d] = parts[d] + p if d in parts else p
        return GradedSeries(self.n, {d: p for d, p in parts.items() if p},
                            trunc, self.truncated or other.truncated)

    def scale(self, alpha: complex) -> "GradedSeries":
        return GradedSeries(self.n, {d: p.scale(alpha) for d, p in self.parts.items()},
                            self.trunc_order, self.truncated)

    def with_trunc(self, trunc_order: int) -> "GradedSeries":
        return GradedSeries(self.n, self.parts, min(trunc_order, self.trunc_order), self.truncated)

    def __repr__(self) -> str:
        return f"GradedSeries(n={self.n}, degrees={self.degrees()}, trunc={self.trunc_order})"


def _lie_apply_parts(chi_parts: dict[int, Polynomial], parts: dict[int, Polynomial], trunc: int):
    out: dict[int, Polynomial] = {}
    dropped = False
    for d, p in parts.items():
        for dc, c in chi_parts.items():
            target = d + dc - 2
            if target > trunc:
                dropped = True
                continue
            q = poisson_bracket(p, c)
            if q:
                out[target] = out[target] + q if target in out else q
    return {d: p for d, p in out.items() if p}, dropped


def lie_series_apply(chi: Polynomial, f: GradedSeries, trunc_order: int | None = None) -> GradedSeries:
    """``exp(L_chi) f = sum_s L_chi^s f / s!`` through ``trunc_order``.

    ``chi`` must have minimal degree at least 3 so that each application of
    ``L_chi`` raises the degree and the truncated series is finite.
    """
    if chi.n != f.n:
        raise DimensionError("dimension mismatch")
    trunc = f.trunc_order if trunc_order is None else min(int(trunc_order), f.trunc_order)
    if chi and chi.min_degree < 3:
        raise ValueError("generating function must have degree >= 3")
    base = f.with_trunc(trunc)
    result = dict(base.parts)
    truncated = base.truncated
    if not chi:
        return GradedSeries(f.n, result, trunc, truncated)
    chi_parts = chi.by_degree()
    term = dict(base.parts)
    s = 0
    while term:
        s += 1
        term, dropped = _lie_apply_parts(chi_parts, term, trunc)
        truncated = truncated or dropped
        term = {d: p.scale(1.0 / s) for d, p in term.items()}
        for d, p in term.items():
            result[d] = result[d] + p if d in result else p
    return GradedSeries(f.n, {d: p for d, p in result.items() if p}, trunc, truncated)


# -- text and JSON forms ------------------------------------------------------------

_TERM_RE = re.compile(r"^\(\s*([^,()]+)\s*,\s*([^,()]+)\s*\)((?:\s+[xy]\d+(?:\^\d+)?)*)\s*$")
_FACTOR_RE = re.compile(r"([xy])(\d+)(?:\^(\d+))?")


def _fmt(v: float) -> str:
    return repr(float(v))


def to_text(f: Polynomial) -> str:
    """Literal form ``(re,im) x1^a y2^b + ...``."""
    out = []
    n = f.n
    for row, c in zip(f.exps.astype(int), f.coeffs):
        factors = []
        for i, p in enumerate(row):
            if p:
                name = f"{'x' if i < n else 'y'}{i % n + 1}"
                factors.append(name if p == 1 else f"{name}^{p}")
        out.append(" ".join([f"({_fmt(c.real)},{_fmt(c.imag)})"] + factors))
    return " + ".join(out)


def from_text(text: str, n: int) -> Polynomial:
    text = text.strip()
    if not text or text == "0":
        return Polynomial(n)
    terms: dict[tuple[int, ...], complex] = {}
    for chunk in re.split(r"\s\+\s", text):
        m = _TERM_RE.match(chunk.strip())
        if not m:
            raise ValueError(f"malformed term: {chunk!r}")
        c = complex(float(m.group(1)), float(m.group(2)))
        row = [0] * (2 * n)
        for var, idx, power in _FACTOR_RE.findall(m.group(3)):
            i = int(idx) - 1
            if not 0 <= i < n:
                raise ValueError(f"variable {var}{idx} out of range for n={n}")
            row[i + (n if var == "y" else 0)] += int(power) if power else 1
        key = tuple(row)
        terms[key] = terms.get(key, 0) + c
    return Polynomial(n, terms)


def to_json_obj(f: Polynomial) -> dict:
    n = f.n
    return {
        "n": n,
        "terms": [
            {"j": [int(v) for v in row[:n]], "k": [int(v) for v in row[n:]],
             "c": [float(c.real), float(c.imag)]}
            for row, c in zip(f.exps, f.coeffs)
        ],
    }


def from_json_obj(obj: Mapping) -> Polynomial:
    try:
        n = int(obj["n"])
        terms = {}
        for i, t in enumerate(obj["terms"]):
            j, k, c = t["j"], t["k"], t["c"]
            if len(j) != n or len(k) != n:
                raise ValueError(f"terms[{i}]: exponent length must be {n}")
            if isinstance(c, (list, tuple)):
                if len(c) != 2:
                    raise ValueError(f"terms[{i}].c must be [re, im]")
                val = complex(float(c[0]), float(c[1]))
            else:
                val = complex(float(c))
            key = tuple(int(v) for v in j) + tuple(int(v) for v in k)
            terms[key] = terms[key] + val if key in terms else val
    except KeyError as exc:
        raise ValueError(f"missing field {exc}") from None
    return Polynomial(n, terms)


def to_json(f: Polynomial) -> str:
    return json.dumps(to_json_obj(f), sort_keys=True)


def from_json(text: str) -> Polynomial:
    return from_json_obj(json.loads(text))


def relative_deviation(a: Polynomial, b: Polynomial) -> float:
    """Largest coefficient difference relative to the largest coefficient."""
    diff = (a - b).max_abs_coeff()
    scale = max(a.max_abs_coeff(), b.max_abs_coeff())
    if scale == 0:
        return 0.0
    return diff / scale


def l1_norm(f: Polynomial) -> float:
    return float(np.abs(f.coeffs).sum())


__all__ = [
    "ExponentPair", "Polynomial", "GradedSeries", "PolydiskGeometry", "DimensionError",
    "poisson_bracket", "lie_derivative", "lie_series_apply", "polydisk_norm", "multiply",
    "substitute", "evaluate", "to_text", "from_text", "to_json", "from_json",
    "to_json_obj", "from_json_obj", "relative_deviation", "l1_norm", "MAX_DEGREE",
]

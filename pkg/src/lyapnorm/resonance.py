"""Index classes, the Z/W splitting and the small-divisor constant.

Exponent indices are sorted by how many powers of the transverse variables
``x_2..x_n, y_2..y_n`` a monomial carries (``m = sum_{l>=2} (j_l + k_l)``):

* ``SHARP``   m = 0
* ``NATURAL`` m = 1 (Lyapounov manifold mode) or m in {1, 2} (extended mode)
* ``FLAT``    anything larger

The normal form keeps the kernel part of SHARP (and, in extended mode,
NATURAL) together with every FLAT monomial; the rest is removed by the
generating function.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .poly import ExponentPair


class Mode(str, enum.Enum):
    LYAPUNOV = "thm1"
    EXTENDED = "thm2"
    BIRKHOFF = "birkhoff"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        aliases = {"lyapunov": cls.LYAPUNOV, "lyapunovmanifold": cls.LYAPUNOV,
                   "extended": cls.EXTENDED, "extendedcenter": cls.EXTENDED}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


class DivisorClass(enum.Enum):
    SHARP = "sharp"
    NATURAL = "natural"
    FLAT = "flat"


class SubspaceTag(enum.Enum):
    ZPART = "Z"
    WPART = "W"


class ResonanceError(ValueError):
    """A divisor that must be nonzero vanishes (or is numerically ambiguous)."""

    def __init__(self, message: str, k=None):
        super().__init__(message)
        self.k = None if k is None else tuple(int(v) for v in k)


class EstimateError(RuntimeError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of the quadratic part plus the certified divisor bound."""

    lam: tuple[complex, ...]
    mode: Mode = Mode.LYAPUNOV
    gamma: float | None = None
    gamma_verified_up_to: int = 0
    gamma_empirical: bool = False

    def __post_init__(self):
        lam = tuple(complex(v) for v in np.atleast_1d(self.lam))
        if not lam or lam[0] == 0:
            raise ValueError("lambda_1 must be nonzero")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mode", Mode.parse(self.mode))

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def lam_array(self) -> np.ndarray:
        return np.array(self.lam, dtype=complex)

    def with_gamma(self, verify_up_to: int = 200) -> "Spectrum":
        if self.mode is Mode.BIRKHOFF:
            raise ValueError("no divisor constant in Birkhoff mode")
        g, empirical = _gamma(self, verify_up_to)
        return replace(self, gamma=g, gamma_verified_up_to=verify_up_to, gamma_empirical=empirical)

    def to_json_obj(self) -> dict:
        obj = {"lambda": [[v.real, v.imag] for v in self.lam], "mode": self.mode.value}
        if self.gamma is not None:
            obj.update(gamma=self.gamma, gamma_verified_up_to=self.gamma_verified_up_to,
                       gamma_empirical=self.gamma_empirical)
        return obj

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Spectrum":
        lam = []
        for v in obj["lambda"]:
            lam.append(complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v))
        return cls(tuple(lam), Mode.parse(obj.get("mode", "thm1")), obj.get("gamma"),
                   int(obj.get("gamma_verified_up_to", 0)), bool(obj.get("gamma_empirical", False)))

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Spectrum":
        return cls.from_json_obj(json.loads(text))


def _natural_width(mode: Mode) -> int:
    return 2 if mode is Mode.EXTENDED else 1


def transverse_order(exps: np.ndarray, n: int) -> np.ndarray:
    """``sum_{l>=2} (j_l + k_l)`` for each row of an exponent array."""
    e = np.asarray(exps, dtype=np.int64).reshape(-1, 2 * n)
    return e[:, 1:n].sum(axis=1) + e[:, n + 1:].sum(axis=1)


def classify_index(e: ExponentPair, mode) -> DivisorClass:
    mode = Mode.parse(mode)
    if mode is Mode.BIRKHOFF:
        return DivisorClass.SHARP
    m = sum(a + b for a, b in zip(e.j[1:], e.k[1:]))
    if m == 0:
        return DivisorClass.SHARP
    if m <= _natural_width(mode):
        return DivisorClass.NATURAL
    return DivisorClass.FLAT


def class_codes(exps: np.ndarray, n: int, mode) -> np.ndarray:
    """Vectorized :func:`classify_index`: 0 sharp, 1 natural, 2 flat."""
    mode = Mode.parse(mode)
    m = transverse_order(exps, n)
    if mode is Mode.BIRKHOFF:
        return np.zeros(m.shape, dtype=np.int64)
    return np.where(m == 0, 0, np.where(m <= _natural_width(mode), 1, 2))


def divisor(e: ExponentPair, spec: Spectrum) -> complex:
    if e.n != spec.n:
        raise ValueError("dimension mismatch")
    return complex(np.dot(np.subtract(e.j, e.k), spec.lam_array))


def divisors(exps: np.ndarray, spec: Spectrum) -> np.ndarray:
    e = np.asarray(exps, dtype=np.int64).reshape(-1, 2 * spec.n)
    return (e[:, :spec.n] - e[:, spec.n:]) @ spec.lam_array


def resonance_tolerance(spec: Spectrum, jk_l1: np.ndarray) -> np.ndarray:
    return 1e-10 * float(np.max(np.abs(spec.lam_array))) * np.asarray(jk_l1, dtype=float)


def zpart_mask(exps: np.ndarray, spec: Spectrum) -> np.ndarray:
    """Boolean mask of monomials that belong to the normal-form subspace Z."""
    n = spec.n
    e = np.asarray(exps, dtype=np.int64).reshape(-1, 2 * n)
    balanced = np.all(e[:, :n] == e[:, n:], axis=1)
    mode = spec.mode
    if mode is Mode.BIRKHOFF:
        div = divisors(e, spec)
        l1 = np.abs(e[:, :n] - e[:, n:]).sum(axis=1)
        tol = resonance_tolerance(spec, l1)
        mag = np.abs(div)
        ambiguous = (mag > 0) & (mag < tol)
        if ambiguous.any():
            row = e[np.argmax(ambiguous)]
            raise ResonanceError(
                f"ambiguous resonance: |<j-k,lambda>| = {mag[ambiguous][0]:.3e} below tolerance",
                row[:n] - row[n:])
        return mag == 0
    codes = class_codes(e, n, mode)
    if mode is Mode.LYAPUNOV:
        # sharp and balanced means j_1 = k_1 with nothing transverse
        return ((codes == 0) & balanced) | (codes == 2)
    return ((codes <= 1) & balanced) | (codes == 2)


def subspace_of(e: ExponentPair, spec: Spectrum) -> SubspaceTag:
    inside = zpart_mask(np.array([e.flat()]), spec)[0]
    return SubspaceTag.ZPART if inside else SubspaceTag.WPART


# -- small-divisor constant -----------------------------------------------------------


def _transverse_vectors(n: int, mode: Mode) -> np.ndarray:
    """Transverse parts ``(k_2..k_n)`` of the natural index class."""
    vecs = []
    for nu in range(1, n):
        for sgn in (1, -1):
            v = np.zeros(n, dtype=np.int64)
            v[nu] = sgn
            vecs.append(v)
    if mode is Mode.EXTENDED:
        for nu in range(1, n):
            for sgn in (1, -1):
                v = np.zeros(n, dtype=np.int64)
                v[nu] = 2 * sgn
                vecs.append(v)
            for nu2 in range(nu + 1, n):
                for s1 in (1, -1):
                    for s2 in (1, -1):
                        v = np.zeros(n, dtype=np.int64)
                        v[nu] = s1
                        v[nu2] = s2
                        vecs.append(v)
    return np.array(vecs, dtype=np.int64).reshape(-1, n)


def natural_indices(n: int, mode, max_norm: int) -> np.ndarray:
    """All ``k`` in the natural class with ``|k|_1 <= max_norm``."""
    mode = Mode.parse(mode)
    trans = _transverse_vectors(n, mode)
    if trans.size == 0:
        return np.zeros((0, n), dtype=np.int64)
    rows = []
    for t in trans:
        budget = max_norm - int(np.abs(t).sum())
        if budget < 0:
            continue
        k1 = np.arange(-budget, budget + 1)
        block = np.tile(t, (k1.size, 1))
        block[:, 0] = k1
        rows.append(block)
    return np.vstack(rows) if rows else np.zeros((0, n), dtype=np.int64)


def _theta(lam: np.ndarray, mode: Mode) -> float:
    rest = lam[1:]
    vals = [abs(v) for v in rest]
    if mode is Mode.EXTENDED:
        vals += [abs(2 * v) for v in rest]
        for a in range(rest.size):
            for b in range(a + 1, rest.size):
                vals += [abs(rest[a] + rest[b]), abs(rest[a] - rest[b])]
    return max(vals, default=0.0)


def _gamma(spec: Spectrum, verify_up_to: int) -> tuple[float, bool]:
    lam = spec.lam_array
    mode = spec.mode
    theta = _theta(lam, mode)
    N = max(1, math.ceil(1 + 2 * theta))
    ks = natural_indices(spec.n, mode, N)
    if ks.shape[0]:
        vals = np.abs(ks @ lam)
        if (vals == 0).any():
            bad = ks[np.argmax(vals == 0)]
            raise ResonanceError(f"resonant index k={tuple(int(v) for v in bad)}: <k,lambda> = 0", bad)
        delta = float(vals.min())
    else:
        delta = math.inf
    gamma = min(delta / N, abs(lam[0]) / 2)
    # sharp indices satisfy the bound trivially since gamma <= |lambda_1|/2
    ks = natural_indices(spec.n, mode, verify_up_to)
    if not ks.shape[0]:
        return gamma, False
    vals = np.abs(ks @ lam)
    if (vals == 0).any():
        bad = ks[np.argmax(vals == 0)]
        raise ResonanceError(f"resonant index k={tuple(int(v) for v in bad)}: <k,lambda> = 0", bad)
    ratios = vals / np.abs(ks).sum(axis=1)
    worst = float(ratios.min())
    if worst >= gamma:
        return gamma, False
    return 0.99 * min(worst, abs(lam[0]) / 2), True


def gamma_lower_bound(spec: Spectrum, verify_up_to: int = 200) -> float:
    """Constant ``gamma`` with ``|<k,lambda>| >= |k|_1 gamma`` on sharp and natural indices.

    The constructive choice takes ``N = ceil(1 + 2 theta)`` and
    ``gamma = min(delta / N, |lambda_1| / 2)`` where ``delta`` is the smallest
    natural divisor with ``|k| <= N``.  The result is then checked by brute
    force over every natural ``k`` with ``|k| <= verify_up_to``; if the check
    fails, ``gamma`` is replaced by 99% of the smallest observed ratio and
    :attr:`Spectrum.gamma_empirical` is set by :meth:`Spectrum.with_gamma`.

    Raises
    ------
    ResonanceError
        If some scanned natural divisor vanishes.
    """
    if spec.mode is Mode.BIRKHOFF:
        raise ValueError("no divisor constant in Birkhoff mode")
    return _gamma(spec, verify_up_to)[0]


def check_gamma(spec: Spectrum, gamma: float, up_to: int) -> tuple[bool, float]:
    """Brute-force ``|<k,lambda>| >= |k| gamma`` over sharp and natural ``k``.

    Returns the verdict and the smallest slack ``|<k,lambda>| - |k| gamma``.
    """
    lam = spec.lam_array
    k1 = np.arange(1, up_to + 1)
    sharp_slack = k1 * abs(lam[0]) - k1 * gamma
    worst = float(sharp_slack.min())
    ks = natural_indices(spec.n, spec.mode, up_to)
    if ks.shape[0]:
        slack = np.abs(ks @ lam) - np.abs(ks).sum(axis=1) * gamma
        worst = min(worst, float(slack.min()))
    return worst >= 0, worst

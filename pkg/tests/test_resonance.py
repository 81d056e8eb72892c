import math

import numpy as np
import pytest

from lyapnorm.poly import ExponentPair
from lyapnorm.resonance import (DivisorClass, Mode, ResonanceError, Spectrum, SubspaceTag, check_gamma,
                                classify_index, divisor, gamma_lower_bound, natural_indices,
                                subspace_of, transverse_order, zpart_mask)

SQRT2 = math.sqrt(2)
LAM_M = (1j, 1j * SQRT2)


def ep(j, k):
    return ExponentPair(tuple(j), tuple(k))


def test_mode_parse():
    assert Mode.parse("thm2") is Mode.EXTENDED
    assert Mode.parse(Mode.BIRKHOFF) is Mode.BIRKHOFF
    with pytest.raises(ValueError):
        Mode.parse("nope")


@pytest.mark.parametrize("j,k,mode,expected", [
    ((3, 0), (1, 0), Mode.LYAPUNOV, DivisorClass.SHARP),
    ((1, 1), (0, 0), Mode.LYAPUNOV, DivisorClass.NATURAL),
    ((1, 1), (0, 1), Mode.LYAPUNOV, DivisorClass.FLAT),
    ((1, 1), (0, 1), Mode.EXTENDED, DivisorClass.NATURAL),
    ((1, 2), (0, 1), Mode.EXTENDED, DivisorClass.FLAT),
    ((1, 2), (0, 1), Mode.BIRKHOFF, DivisorClass.SHARP),
])
def test_classify(j, k, mode, expected):
    assert classify_index(ep(j, k), mode) is expected


def test_transverse_order_vectorized():
    exps = np.array([[1, 2, 0, 1], [3, 0, 3, 0]])
    np.testing.assert_array_equal(transverse_order(exps, 2), [3, 0])


def test_divisor_value():
    spec = Spectrum(LAM_M, Mode.LYAPUNOV)
    assert divisor(ep((2, 0), (0, 1)), spec) == pytest.approx(2j - 1j * SQRT2)


def test_subspace_assignment_thm1():
    spec = Spectrum(LAM_M, Mode.LYAPUNOV)
    assert subspace_of(ep((2, 0), (2, 0)), spec) is SubspaceTag.ZPART
    assert subspace_of(ep((2, 0), (1, 0)), spec) is SubspaceTag.WPART
    # natural monomials are never kept in thm1, even when balanced in x1, y1
    assert subspace_of(ep((1, 1), (1, 0)), spec) is SubspaceTag.WPART
    assert subspace_of(ep((0, 2), (0, 0)), spec) is SubspaceTag.ZPART


def test_subspace_assignment_thm2():
    spec = Spectrum((1j, 1j * SQRT2, 1j * math.sqrt(5)), Mode.EXTENDED)
    assert subspace_of(ep((1, 1, 0), (1, 1, 0)), spec) is SubspaceTag.ZPART
    assert subspace_of(ep((1, 1, 0), (1, 0, 1)), spec) is SubspaceTag.WPART
    assert subspace_of(ep((0, 2, 1), (0, 0, 0)), spec) is SubspaceTag.ZPART


def test_birkhoff_exact_resonance_kept():
    spec = Spectrum((1j, 2j), Mode.BIRKHOFF)
    assert subspace_of(ep((2, 0), (0, 1)), spec) is SubspaceTag.ZPART
    assert subspace_of(ep((1, 0), (0, 1)), spec) is SubspaceTag.WPART


def test_birkhoff_near_resonance_rejected():
    spec = Spectrum((1j, 2j * (1 + 1e-14)), Mode.BIRKHOFF)
    with pytest.raises(ResonanceError):
        zpart_mask(np.array([[2, 0, 0, 1]]), spec)


def test_gamma_reference_value():
    # N = ceil(1 + 2 sqrt 2) = 4, smallest natural divisor |sqrt2 - 1|
    g = gamma_lower_bound(Spectrum(LAM_M, Mode.LYAPUNOV))
    assert g == pytest.approx((SQRT2 - 1) / 4, rel=1e-14)
    assert g == pytest.approx(0.10355339059327379, rel=1e-14)


def test_gamma_rejects_resonance():
    with pytest.raises(ResonanceError) as info:
        gamma_lower_bound(Spectrum((1j, 2j), Mode.LYAPUNOV))
    k = tuple(int(v) for v in info.value.k)
    assert abs(k[0] * 1j + k[1] * 2j) == 0


def test_gamma_birkhoff_not_defined():
    with pytest.raises(ValueError):
        gamma_lower_bound(Spectrum(LAM_M, Mode.BIRKHOFF))


def test_natural_indices_thm1_shape():
    ks = natural_indices(2, Mode.LYAPUNOV, 3)
    assert np.all(np.abs(ks[:, 1]) == 1)
    assert np.all(np.abs(ks).sum(axis=1) <= 3)


@pytest.mark.parametrize("lam,mode", [
    (LAM_M, Mode.LYAPUNOV),
    ((1.0, 1j), Mode.LYAPUNOV),
    ((1j, 1j * SQRT2, 1j * math.sqrt(5)), Mode.EXTENDED),
])
def test_gamma_brute_force(lam, mode):
    spec = Spectrum(lam, mode).with_gamma()
    ok, slack = check_gamma(spec, spec.gamma, 200)
    assert ok, slack
    assert spec.gamma > 0


def test_spectrum_json_roundtrip():
    spec = Spectrum(LAM_M, Mode.EXTENDED)
    back = Spectrum.from_json(spec.to_json())
    assert back.lam == spec.lam and back.mode is spec.mode

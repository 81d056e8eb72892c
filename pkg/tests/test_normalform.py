import json
import math
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

from lyapnorm.normalform import (NormalFormError, NormalFormResult, compose_coordinates,
                                 max_relative_deviation, normalize, oracle_normalize,
                                 solve_homological, structure_violations)
from lyapnorm.poly import GradedSeries, Polynomial, from_json_obj, lie_derivative, substitute
from lyapnorm.resonance import Mode, ResonanceError, Spectrum

FIXTURES = Path(__file__).parent / "fixtures"
LAM_M = (1j, 1j * math.sqrt(2))
x1, x2, y1, y2 = (Polynomial.coordinate(2, i) for i in range(4))
H_M = Polynomial.quadratic(LAM_M) + (x1 + y1) ** 2 * (x2 + y2)


@pytest.fixture(scope="module")
def spec_m():
    return Spectrum(LAM_M, Mode.LYAPUNOV).with_gamma()


@pytest.fixture(scope="module")
def nf6(spec_m):
    return normalize(H_M, spec_m, 6)


def test_homological_solution(spec_m):
    psi = 2 * x1 ** 2 * y2 + 3 * x1 ** 2 * y1 ** 2 + x2 ** 2 * y1 ** 2
    chi, Z = solve_homological(psi, spec_m)
    H0 = Polynomial.quadratic(LAM_M)
    assert max_relative_deviation(GradedSeries.from_polynomial(lie_derivative(H0, chi) + Z),
                                  GradedSeries.from_polynomial(psi)) < 1e-15
    assert Z == 3 * x1 ** 2 * y1 ** 2 + x2 ** 2 * y1 ** 2


def test_homological_zero_divisor_in_w():
    spec = Spectrum((1j, 2j), Mode.LYAPUNOV, gamma=0.1)
    with pytest.raises(ResonanceError):
        solve_homological(x1 ** 2 * y2, spec)


def test_residuals_and_structure(nf6):
    assert max(nf6.state.homological_residuals()) <= 1e-12
    assert structure_violations(nf6) == []
    assert len(nf6.state.Z) == 6
    assert not nf6.state.Z[0]


def test_order_two_against_exact_algebra(nf6):
    X1, X2, Y1, Y2 = sp.symbols("x1 x2 y1 y2")
    lam = (sp.I, sp.I * sp.sqrt(2))
    H3 = sp.expand((X1 + Y1) ** 2 * (X2 + Y2))

    def pb(f, g):
        return sp.expand(sum(sp.diff(f, a) * sp.diff(g, b) - sp.diff(f, b) * sp.diff(g, a)
                             for a, b in ((X1, Y1), (X2, Y2))))

    chi1 = 0
    for (a, b, c, d), coef in sp.Poly(H3, X1, X2, Y1, Y2).terms():
        chi1 += coef * X1 ** a * X2 ** b * Y1 ** c * Y2 ** d / ((a - c) * lam[0] + (b - d) * lam[1])
    H4 = sp.Poly(sp.expand(pb(H3, chi1) / 2), X1, X2, Y1, Y2)
    expected = {}
    for (a, b, c, d), coef in H4.terms():
        trans = b + d
        if (trans == 0 and a == c) or trans >= 2:
            expected[(a, b, c, d)] = complex(sp.N(coef, 30))
    Z2 = nf6.state.Z[1]
    got = {tuple(int(v) for v in e.flat()): c for e, c in Z2.terms.items()}
    assert set(got) == {k for k, v in expected.items() if abs(v) > 0}
    for key, val in expected.items():
        assert got[key] == pytest.approx(val, rel=1e-13, abs=1e-13)
    # the sharp coefficient of (x1 y1)^2
    assert got[(2, 0, 2, 0)] == pytest.approx(math.sqrt(2) * 1j, rel=1e-13)


def test_matches_frozen_oracle_fixture(spec_m):
    doc = json.loads((FIXTURES / "model_m_order4.json").read_text())
    nf = normalize(H_M, spec_m, doc["order"], trunc_order=doc["trunc_order"])
    for name, frozen in (("Z", doc["Z"]), ("chi", doc["chi"])):
        for mine, ref in zip(getattr(nf.state, name), frozen):
            ref = from_json_obj(ref)
            scale = max(1.0, ref.max_abs_coeff())
            assert (mine - ref).max_abs_coeff() <= 1e-11 * scale


def test_recursion_matches_direct_lie_series(spec_m):
    nf = normalize(H_M, spec_m, 5, trunc_order=9)
    Zs, chis, final = oracle_normalize(GradedSeries.from_polynomial(H_M), spec_m, 5, 9)
    for a, b in zip(nf.state.Z + nf.state.chi, Zs + chis):
        assert (a - b).max_abs_coeff() <= 1e-11 * max(1.0, b.max_abs_coeff())
    assert max_relative_deviation(nf.state.hamiltonian(), final) <= 1e-11


def test_transformation_conjugates_hamiltonians(spec_m):
    nf = normalize(H_M, spec_m, 4, trunc_order=7)
    coords = [c.to_polynomial() for c in compose_coordinates(nf.state.chi, 2, 7)]
    old_in_new = substitute(H_M, coords, 7)
    new = nf.state.hamiltonian().to_polynomial().truncate(7)
    assert (old_in_new - new).max_abs_coeff() <= 1e-11 * new.max_abs_coeff()


def test_birkhoff_mode_runs():
    spec = Spectrum(LAM_M, Mode.BIRKHOFF)
    nf = normalize(H_M, spec, 4)
    assert structure_violations(nf) == []
    assert max(nf.state.homological_residuals()) <= 1e-12


def test_extended_mode_structure():
    lam = (1j, 1j * math.sqrt(2), 1j * math.sqrt(5))
    c = [Polynomial.coordinate(3, i) for i in range(6)]
    H = Polynomial.quadratic(lam) + (c[0] + c[3]) ** 2 * (c[1] + c[4]) + 0.5 * c[2] * c[5] * (c[0] + c[3])
    nf = normalize(H, Spectrum(lam, Mode.EXTENDED), 4)
    assert structure_violations(nf) == []
    assert max(nf.state.homological_residuals()) <= 1e-12


def test_rejects_bad_inputs(spec_m):
    with pytest.raises(NormalFormError):
        normalize(H_M + x1, spec_m, 2)
    with pytest.raises(NormalFormError):
        normalize(H_M + x1 * x2, spec_m, 2)
    with pytest.raises(NormalFormError):
        normalize(H_M, spec_m, -1)


def test_json_roundtrip(nf6):
    back = NormalFormResult.from_json_obj(json.loads(nf6.to_json()))
    for a, b in zip(back.state.Z, nf6.state.Z):
        assert a == b
    assert back.order == 6
    assert back.to_json() == nf6.to_json()


def test_prune_keeps_residuals_small(spec_m):
    nf = normalize(H_M, spec_m, 5, prune=1e-14)
    assert max(nf.state.homological_residuals()) <= 1e-12


def test_runtime_order_six(spec_m):
    import time
    t0 = time.perf_counter()
    normalize(H_M, spec_m, 6)
    assert time.perf_counter() - t0 < 10.0

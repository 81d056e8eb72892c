import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lyapnorm.poly import (DimensionError, ExponentPair, GradedSeries, Polynomial, PolydiskGeometry,
                           from_json, from_json_obj, from_text, l1_norm, lie_derivative,
                           lie_series_apply, poisson_bracket, polydisk_norm, substitute, to_json,
                           to_text)

N = 2
x1, x2, y1, y2 = (Polynomial.coordinate(N, i) for i in range(4))


@st.composite
def polys(draw, n=N, max_deg=3, max_terms=5):
    nterms = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(nterms):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(2 * n))
        if sum(e) > max_deg:
            continue
        re = draw(st.integers(-5, 5))
        im = draw(st.integers(-5, 5))
        terms[e] = complex(re, im)
    return Polynomial(n, terms)


def close(a, b, tol=1e-9):
    return l1_norm(a - b) <= tol * max(1.0, l1_norm(a), l1_norm(b))


# -- construction and arithmetic -----------------------------------------------------


def test_zero_coefficients_dropped():
    p = Polynomial(N, {(1, 0, 0, 0): 0.0, (0, 1, 0, 0): 2.0})
    assert len(p) == 1
    assert p.coefficient((0, 1), (0, 0)) == 2.0


def test_exponent_pair_roundtrip():
    e = ExponentPair((1, 2), (0, 3))
    assert e.degree == 6
    assert ExponentPair.from_flat(e.flat()) == e


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        x1 + Polynomial.coordinate(3, 0)


def test_product_and_power():
    p = (x1 + y1) ** 2
    assert p.coefficient((1, 0), (1, 0)) == 2
    assert p.coefficient((2, 0), (0, 0)) == 1
    assert (x1 * y2).degree == 2


def test_evaluate_broadcasts():
    p = 3 * x1 * y1 + x2
    X = np.array([[1.0, 2.0], [0.5, 0.0]])
    Y = np.array([[2.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(p(X, Y), [6.5, 6.0])


def test_truncate_and_by_degree():
    p = x1 + x1 * y1 + x1 ** 3
    assert p.truncate(2) == x1 + x1 * y1
    assert sorted(p.by_degree()) == [1, 2, 3]
    assert not p.is_homogeneous()


# -- Poisson bracket -----------------------------------------------------------------


def test_canonical_pair():
    assert poisson_bracket(x1, y1) == Polynomial.constant(N, 1)
    assert poisson_bracket(y1, x1) == Polynomial.constant(N, -1)
    assert not poisson_bracket(x1, y2)


def test_lie_derivative_sign_convention():
    # L_chi f = {f, chi}
    assert lie_derivative(x1 ** 2, y1 ** 2) == -4 * x1 * y1
    assert lie_derivative(1j * x1 * y1, x1) == 1j * x1


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_antisymmetry(f, g):
    assert close(poisson_bracket(f, g), -poisson_bracket(g, f))


@given(polys(max_deg=2, max_terms=3), polys(max_deg=2, max_terms=3), polys(max_deg=2, max_terms=3))
@settings(max_examples=40, deadline=None)
def test_jacobi(f, g, h):
    pb = poisson_bracket
    total = pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))
    assert close(total, Polynomial(N), 1e-12)


@given(polys(), polys(), polys())
@settings(max_examples=40, deadline=None)
def test_leibniz(f, g, h):
    assert close(poisson_bracket(f, g * h), poisson_bracket(f, g) * h + g * poisson_bracket(f, h))


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_quadratic_eigenvalue(e):
    lam = (1j, 1j * math.sqrt(2))
    H0 = Polynomial.quadratic(lam)
    mono = Polynomial(N, {tuple(e): 1.0})
    expected = (e[0] - e[2]) * lam[0] + (e[1] - e[3]) * lam[1]
    got = lie_derivative(H0, mono)
    assert close(got, mono * expected, 1e-14)


# -- Lie series ----------------------------------------------------------------------


def test_lie_series_terminates_exactly():
    # exp(L_{x1^3}) y1 = y1 - 3 x1^2
    out = lie_series_apply(x1 ** 3, GradedSeries.from_polynomial(y1), 10).to_polynomial()
    assert out == y1 - 3 * x1 ** 2


def test_lie_series_is_canonical():
    chi = 0.3 * x1 ** 2 * y2 + 0.1j * y1 ** 3
    X = [lie_series_apply(chi, GradedSeries.from_polynomial(c), 9).to_polynomial() for c in (x1, x2, y1, y2)]
    for i in range(2):
        for j in range(2):
            b = poisson_bracket(X[i], X[2 + j]).truncate(5)
            expect = Polynomial.constant(N, 1.0 if i == j else 0.0)
            assert close(b, expect, 1e-12)


def test_lie_series_rejects_low_degree_generator():
    with pytest.raises(ValueError):
        lie_series_apply(x1 * y1, GradedSeries.from_polynomial(x1), 5)


def test_substitute_identity():
    f = x1 ** 2 * y2 + 2j * y1
    assert substitute(f, [x1, x2, y1, y2]) == f


# -- norms ---------------------------------------------------------------------------


def test_polydisk_norm_values():
    geom = PolydiskGeometry((1.0, 1.0))
    H3 = (x1 + y1) ** 2 * (x2 + y2)
    assert polydisk_norm(H3, geom) == 8.0
    assert polydisk_norm(x1 * y1, PolydiskGeometry((0.5, 2.0))) == 0.25
    assert polydisk_norm(x1 ** 2, geom, 0.5) == 0.25
    with pytest.raises(ValueError):
        polydisk_norm(x1, geom, 1.0)


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_norm_triangle_and_product(f, g):
    geom = PolydiskGeometry((0.7, 1.3))
    nf, ng = polydisk_norm(f, geom), polydisk_norm(g, geom)
    assert polydisk_norm(f + g, geom) <= nf + ng + 1e-9
    assert polydisk_norm(f * g, geom) <= nf * ng * (1 + 1e-12) + 1e-9


@given(polys())
@settings(max_examples=40, deadline=None)
def test_norm_majorizes_sup(f):
    geom = PolydiskGeometry((1.0, 1.0))
    rng = np.random.default_rng(1)
    z = np.exp(2j * math.pi * rng.random((4, 64))) * rng.random((4, 64))
    assert np.max(np.abs(f(z[:2], z[2:]))) <= polydisk_norm(f, geom) + 1e-9


# -- serialization -------------------------------------------------------------------


@given(polys())
@settings(max_examples=40, deadline=None)
def test_json_roundtrip(f):
    assert from_json(to_json(f)) == f


def test_text_roundtrip():
    f = (0.25 - 1j) * x1 ** 2 * y2 + 3 * y1
    assert from_text(to_text(f), N) == f


def test_json_diagnostics():
    with pytest.raises(ValueError, match="missing field"):
        from_json_obj({"n": 2})
    with pytest.raises(ValueError, match=r"terms\[0\]"):
        from_json_obj({"n": 2, "terms": [{"j": [1], "k": [0, 0], "c": [1, 0]}]})
    obj = json.loads(to_json(x1))
    assert obj["n"] == 2


def test_lie_series_truncation_below_input_degree():
    out = lie_series_apply(x1 ** 3, GradedSeries.from_polynomial(y1 ** 3), 2)
    assert not out and out.truncated

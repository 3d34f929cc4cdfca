import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import brentq

from errors import DegenerateLeadingCoefficient, NonSymmetric, NoSignChange
from numerics import (
    Poly, brent_root, char_poly_of_matrix, expm, jacobi_eigh, newton_polish, poly_from_roots,
    poly_mul, poly_roots, poly_sum,
)

MATRIX_DIMENSION = 5


def symmetric(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


@seed(1)
@given(a=arrays(np.float64, (MATRIX_DIMENSION, MATRIX_DIMENSION), elements=st.floats(min_value=-10.0, max_value=10.0)))
def test_jacobi_matches_lapack(a):
    m = symmetric(a)
    res = jacobi_eigh(m)
    scale = max(1.0, np.linalg.norm(m))
    np.testing.assert_allclose(res.eigenvalues, np.linalg.eigh(m)[0], atol=1e-12 * scale)
    np.testing.assert_allclose(res.reconstruct(), m, atol=1e-12 * scale)
    np.testing.assert_allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(MATRIX_DIMENSION), atol=1e-12)
    assert np.all(np.diff(res.eigenvalues) >= 0.0)


def test_jacobi_diagonal_and_zero_matrices():
    res = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_array_equal(res.eigenvalues, [-1.0, 2.0, 3.0])
    np.testing.assert_array_equal(jacobi_eigh(np.zeros((3, 3))).eigenvalues, np.zeros(3))


@pytest.mark.parametrize(
    "m",
    [
        np.array([[1.0, 2.0], [2.1, 1.0]]),
        np.ones((2, 3)),
    ]
)
def test_jacobi_rejects_nonsymmetric(m):
    with pytest.raises(NonSymmetric):
        jacobi_eigh(m)


@seed(2)
@given(
    a=arrays(np.float64, (4, 4), elements=st.floats(min_value=-5.0, max_value=5.0)),
    t=st.sampled_from([0.0, 0.1, 1.0, 3.0]),
)
def test_expm_matches_scipy(a, t):
    ref = scipy.linalg.expm(a * t)
    np.testing.assert_allclose(expm(a, t), ref, rtol=1e-10, atol=1e-10 * max(1.0, np.abs(ref).max()))


def test_expm_of_diagonal():
    np.testing.assert_allclose(expm(np.diag([-2.0, 0.5]), 2.0), np.diag([math.exp(-4.0), math.e]), rtol=1e-14)


@seed(5)
@given(
    a=arrays(np.float64, (4, 4), elements=st.floats(min_value=-2.0, max_value=2.0)),
    s=st.floats(min_value=0.0, max_value=1.5),
    t=st.floats(min_value=0.0, max_value=1.5),
)
def test_expm_semigroup(a, s, t):
    whole = expm(a, s + t)
    np.testing.assert_allclose(expm(a, s) @ expm(a, t), whole, rtol=1e-10,
                               atol=1e-10 * max(1.0, np.abs(whole).max()))


def test_poly_arithmetic():
    p, q = Poly([1.0, 2.0]), Poly([-1.0, 0.0, 3.0])
    np.testing.assert_array_equal(poly_mul(p, q).coeffs, [-1.0, -2.0, 3.0, 6.0])
    np.testing.assert_array_equal((p + q).coeffs, [0.0, 2.0, 3.0])
    np.testing.assert_array_equal((q - p).coeffs, [-2.0, -2.0, 3.0])
    np.testing.assert_array_equal(p.shift(2).coeffs, [0.0, 0.0, 1.0, 2.0])
    np.testing.assert_array_equal(q.deriv().coeffs, [0.0, 6.0])
    assert q(2.0) == 11.0
    assert q.abs_eval(-2.0) == 13.0
    assert Poly([1.0, 0.0, 0.0]).trim().degree == 0


def test_poly_sum_is_compensated():
    big = Poly([1e16, 1.0])
    total = poly_sum([big, Poly([1.0]), Poly([-1e16])])
    np.testing.assert_array_equal(total.coeffs, [1.0, 1.0])


def test_divide_linear():
    p = poly_from_roots([1.0, -2.0, 3.0])
    q, rem = p.divide_linear(3.0)
    np.testing.assert_allclose(q, poly_from_roots([1.0, -2.0]).coeffs)
    assert rem == 0.0


def test_poly_from_roots_matches_numpy():
    roots = [0.0, -1.0, complex(-2.0, 3.0), complex(-2.0, -3.0)]
    expected = np.poly(roots).real[::-1]
    np.testing.assert_allclose(poly_from_roots(roots, leading=2.5).coeffs, 2.5 * expected)


@seed(3)
@settings(max_examples=50)
@given(
    start=st.floats(min_value=0.1, max_value=5.0),
    gaps=arrays(np.float64, (5,), elements=st.floats(min_value=0.5, max_value=8.0)),
)
def test_poly_roots_recovers_real_roots(start, gaps):
    roots = -(start + np.concatenate([[0.0], np.cumsum(gaps)]))
    found = poly_roots(poly_from_roots(roots))
    assert all(z.imag == 0.0 for z in found)
    np.testing.assert_allclose(sorted(z.real for z in found), np.sort(roots), rtol=1e-6)


def test_poly_roots_complex_pair_and_zero():
    p = poly_from_roots([0.0, -4.0, complex(-1.0, 2.0), complex(-1.0, -2.0)])
    found = poly_roots(p)
    assert found[0] == 0j
    upper = [z for z in found if z.imag > 0]
    assert len(upper) == 1
    assert abs(upper[0] - complex(-1.0, 2.0)) < 1e-12
    assert min(abs(z + 4.0) for z in found) < 1e-12
    # sorted by descending real part
    assert [z.real for z in found] == sorted((z.real for z in found), reverse=True)


def test_poly_roots_rejects_zero_leading():
    with pytest.raises(DegenerateLeadingCoefficient):
        poly_roots(Poly([1.0, 2.0, 0.0]))


def test_newton_polish_improves_a_rough_root():
    p = poly_from_roots([-1.0, -3.0])
    z = newton_polish(p, complex(-1.01, 0.0))
    assert abs(z + 1.0) < 1e-6


@pytest.mark.parametrize(
    "f, a, b",
    [
        (math.cos, 0.0, 3.0),
        (lambda x: x ** 3 - 2.0 * x - 5.0, 2.0, 3.0),
        (lambda x: math.exp(x) - 10.0, 0.0, 5.0),
    ]
)
def test_brent_matches_scipy(f, a, b):
    assert brent_root(f, a, b) == pytest.approx(brentq(f, a, b, xtol=1e-15), rel=1e-12)


def test_brent_passes_args_and_needs_sign_change():
    assert brent_root(lambda x, k: x - k, 0.0, 4.0, args=(1.5,)) == pytest.approx(1.5, rel=1e-13)
    with pytest.raises(NoSignChange):
        brent_root(lambda x: x * x + 1.0, -1.0, 1.0)


@pytest.mark.parametrize(
    "f, a, b",
    [
        (lambda x: 1e12 * (x - 1.0 / 3.0), 0.0, 1.0),
        (lambda x: 1.0 / (x - 1.0) + 1.0 / (x - 2.0) + 40.0, 1.0 + 1e-9, 2.0 - 1e-9),
        (lambda x: (x - math.pi) ** 3 * 1e8, 3.0, 4.0),
    ]
)
def test_brent_returns_smallest_residual_double(f, a, b):
    r = brent_root(f, a, b)
    assert a <= r <= b
    assert abs(f(r)) <= abs(f(np.nextafter(r, -np.inf)))
    assert abs(f(r)) <= abs(f(np.nextafter(r, np.inf)))


@seed(4)
@given(a=arrays(np.float64, (4, 4), elements=st.floats(min_value=-3.0, max_value=3.0)))
def test_char_poly_matches_numpy(a):
    expected = np.poly(a)[::-1]
    np.testing.assert_allclose(char_poly_of_matrix(a).coeffs, expected, atol=1e-9 * max(1.0, np.abs(expected).max()))


@pytest.mark.filterwarnings("error")
def test_poly_roots_is_silent_on_balanced_companions():
    roots = poly_roots(Poly([-6.0, 11.0, -6.0, 1.0]))
    np.testing.assert_allclose(sorted(z.real for z in roots), [1.0, 2.0, 3.0], rtol=1e-14)
    assert poly_roots(Poly([0.0, 0.0, 1.0])) == [0j, 0j]


def test_char_poly_of_companion():
    # companion of z^3 - 6z^2 + 11z - 6
    comp = np.array([[0.0, 0.0, 6.0],
                     [1.0, 0.0, -11.0],
                     [0.0, 1.0, 6.0]])
    np.testing.assert_allclose(char_poly_of_matrix(comp).coeffs, [-6.0, 11.0, -6.0, 1.0], atol=1e-12)

import numpy as np
import pytest

from ball_modes import solve_mode
from errors import DegenerateStrengths, NonUniformGrid, OrderingViolation, StepTooLarge
from numerics import Poly, char_poly_of_matrix, newton_polish, poly_roots
from relaxation import compute_spectrum
from spectrum import (
    PronyPair, augmented_matrix, build_prony, char_poly_ell, cluster_eigenvector, cluster_roots, cluster_roots_for,
    conserved_quantity, limit_poly, limit_roots, max_step, modal_simulate, secular,
)

from conftest import burgers

REAL_ROOT_N0 = -5.6072677763015752
EXTRA_ROOT_N0 = complex(-2.1963661118492124, 4.0812336846213979)


@pytest.fixture
def pair_n0(reference_n0):
    return build_prony(reference_n0, compute_spectrum(reference_n0))


@pytest.fixture
def pair_n2(ordered_n2):
    return build_prony(ordered_n2, compute_spectrum(ordered_n2))


@pytest.fixture
def mode1():
    return solve_mode(2.0, 1.0, 1.0, 1)


def modes_of(model, ells):
    e0 = model.maxwell
    return [solve_mode(e0.lam, e0.mu, model.R, ell) for ell in ells]


def test_reference_pair(pair_n0):
    np.testing.assert_allclose(pair_n0.beta, [2.0, 8.0], rtol=1e-15)
    np.testing.assert_allclose(pair_n0.alpha, [8.0 / 3.0, 64.0 / 3.0], rtol=1e-15)
    assert pair_n0.D == 4.0
    assert pair_n0.n == 0
    assert pair_n0.strength_sum() == pytest.approx(pair_n0.D, rel=1e-15)


def test_overlapping_rates_rejected(reference_n1):
    with pytest.raises(OrderingViolation):
        build_prony(reference_n1, compute_spectrum(reference_n1))


def test_merged_rates_rejected():
    m = burgers(3)
    with pytest.raises(DegenerateStrengths):
        build_prony(m, compute_spectrum(m))


def test_ordered_pair_is_consistent(pair_n2):
    assert pair_n2.size == 6
    assert np.all(np.diff(pair_n2.beta) > 0.0)
    assert pair_n2.strength_sum() == pytest.approx(pair_n2.D, rel=1e-12)


def test_limit_polynomial_reference(pair_n0):
    np.testing.assert_allclose(limit_poly(pair_n0).coeffs, [0.0, 16.0, 4.0], atol=1e-13)
    np.testing.assert_allclose(limit_roots(pair_n0), [0.0, -4.0], atol=1e-13)


def test_cluster_polynomial_reference(pair_n0):
    c = 0.25
    # 4z² + 16z + c·z²(z+2)(z+8)
    expected = [0.0, 16.0, 4.0 + 16.0 * c, 10.0 * c, c]
    np.testing.assert_allclose(char_poly_ell(pair_n0, c).coeffs, expected, rtol=1e-15, atol=1e-15)
    with pytest.raises(ValueError):
        char_poly_ell(pair_n0, 0.0)


def test_cluster_roots_reference(pair_n0, mode1):
    cs = cluster_roots(pair_n0, mode1)
    assert cs.ell == 1
    assert cs.real_roots[0] == 0.0
    assert cs.real_roots[1] == pytest.approx(REAL_ROOT_N0, rel=1e-13)
    upper = max(cs.extra_roots, key=lambda z: z.imag)
    assert abs(upper - EXTRA_ROOT_N0) < 1e-12 * abs(EXTRA_ROOT_N0)
    assert abs(cs.extra_roots[0] - cs.extra_roots[1].conjugate()) < 1e-14 * abs(upper)
    assert cs.residual <= 1e-9
    assert len(cs.all_roots) == 4


@pytest.mark.parametrize("ell", [1, 2, 5])
def test_real_roots_interlace_rates(pair_n2, ordered_n2, ell):
    (mode,) = modes_of(ordered_n2, [ell])
    cs = cluster_roots(pair_n2, mode)
    beta = pair_n2.beta
    a = cs.real_roots
    assert a.size == 6 and a[0] == 0.0
    for j in range(1, 6):
        assert -beta[j] < a[j] < -beta[j - 1]
        assert abs(secular(pair_n2, cs.c, a[j])) < 1e-8 * pair_n2.D
    for z in cs.extra_roots:
        if z.imag != 0.0:
            assert -beta[-1] / 2 < z.real < -beta[0] / 2
        else:
            assert -beta[-1] < z.real < 0.0


def test_roots_agree_with_companion(pair_n2, ordered_n2):
    (mode,) = modes_of(ordered_n2, [2])
    cs = cluster_roots(pair_n2, mode)
    reference = poly_roots(cs.poly)
    for z in cs.all_roots:
        assert min(abs(w - z) for w in reference) <= 1e-8 * (1.0 + abs(z))


@pytest.mark.parametrize("ell", [1, 2, 5])
def test_extra_roots_do_not_depend_on_deflation_order(pair_n2, ordered_n2, ell):
    (mode,) = modes_of(ordered_n2, [ell])
    cs = cluster_roots(pair_n2, mode)
    # largest magnitude first this time
    q = Poly(cs.poly.coeffs[1:])
    for a in sorted(cs.real_roots[1:], key=abs, reverse=True):
        q = Poly(q.divide_linear(float(a))[0])
    backward = [newton_polish(cs.poly, complex(z)) for z in np.roots(q.coeffs[::-1])]
    for z in cs.extra_roots:
        assert min(abs(w - z) for w in backward) <= 1e-9 * (1.0 + abs(z))


def test_limit_roots_interlace(pair_n2):
    lim = limit_roots(pair_n2)
    beta = pair_n2.beta
    assert lim[0] == 0.0
    for j in range(1, 6):
        assert -beta[j] < lim[j] < -beta[j - 1]
    reference = poly_roots(limit_poly(pair_n2))
    for a in lim:
        assert min(abs(w - a) for w in reference) <= 1e-8 * (1.0 + abs(a))


def test_small_multiplier_approaches_limit(pair_n2):
    lim = limit_roots(pair_n2)
    far = cluster_roots_for(pair_n2, 1e-6).real_roots
    near = cluster_roots_for(pair_n2, 1e-4).real_roots
    assert np.max(np.abs(far - lim)) < np.max(np.abs(near - lim))


def test_augmented_matrix_spectrum(pair_n0, mode1):
    A = augmented_matrix(pair_n0, mode1).matrix
    assert A.shape == (4, 4)
    P = char_poly_ell(pair_n0, mode1.c)
    chi = char_poly_of_matrix(A)
    np.testing.assert_allclose(mode1.c * chi.coeffs, P.coeffs, atol=1e-12 * P.norm1())
    cs = cluster_roots(pair_n0, mode1)
    eig = np.linalg.eigvals(A)
    for z in cs.all_roots:
        assert np.min(np.abs(eig - z)) < 1e-10 * (1.0 + abs(z))


def test_left_null_vector(pair_n2, ordered_n2):
    (mode,) = modes_of(ordered_n2, [1])
    A = augmented_matrix(pair_n2, mode).matrix
    left = np.concatenate([[0.0, 1.0], -pair_n2.alpha / pair_n2.beta])
    assert np.max(np.abs(left @ A)) < 1e-12 * np.max(np.abs(A))


def test_eigenvectors(pair_n0, mode1):
    A = augmented_matrix(pair_n0, mode1).matrix
    cs = cluster_roots(pair_n0, mode1)
    for z in cs.all_roots:
        v = cluster_eigenvector(pair_n0, mode1, z)
        assert np.linalg.norm(A @ v - z * v) < 1e-10 * np.linalg.norm(A) * np.linalg.norm(v)
        if z.imag == 0.0:
            assert np.isrealobj(v)


def test_modal_trajectory_of_real_eigenvector(pair_n0, mode1):
    z = REAL_ROOT_N0
    v = cluster_eigenvector(pair_n0, mode1, z)
    h = max_step(pair_n0, mode1) / 2.0
    t = np.arange(201) * h
    U = modal_simulate(pair_n0, mode1, v, t)
    np.testing.assert_allclose(U[-1], np.exp(z * t[-1]) * v, rtol=1e-6)
    # the zero root's eigenvector is a steady state
    v0 = cluster_eigenvector(pair_n0, mode1, 0.0)
    np.testing.assert_allclose(modal_simulate(pair_n0, mode1, v0, t)[-1], v0, rtol=1e-12, atol=1e-12)


def test_conserved_quantity_along_trajectory(pair_n2, ordered_n2, rng):
    (mode,) = modes_of(ordered_n2, [2])
    t = np.arange(301) * max_step(pair_n2, mode)
    U = modal_simulate(pair_n2, mode, rng.normal(size=8), t)
    q = conserved_quantity(pair_n2, U)
    assert np.max(np.abs(q - q[0])) < 1e-10 * (1.0 + abs(q[0]))


def test_modal_simulate_rejects_bad_grids(pair_n0, mode1):
    v = np.ones(4)
    with pytest.raises(StepTooLarge):
        modal_simulate(pair_n0, mode1, v, np.array([0.0, 1.0, 2.0]))
    with pytest.raises(NonUniformGrid):
        modal_simulate(pair_n0, mode1, v, np.array([0.0, 0.001, 0.003]))


def test_degenerate_strengths_rejected():
    p = PronyPair.from_arrays([1.0, 2.0], [1e-20, 4.0], 2.0)
    with pytest.raises(DegenerateStrengths):
        cluster_roots_for(p, 0.1)

import numpy as np
import pytest
from hypothesis import given, seed
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tensor_core import (
    IsoTensor4, Part, SymTensor3, apply_iso, check_strong_convexity, project, projector_tensors,
)

components = arrays(np.float64, (6,), elements=st.floats(min_value=-1e3, max_value=1e3))


def test_identity_and_matrix_layout():
    e = SymTensor3(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    expected = np.array([[1.0, 4.0, 5.0],
                         [4.0, 2.0, 6.0],
                         [5.0, 6.0, 3.0]])
    np.testing.assert_array_equal(e.to_matrix(), expected)
    assert SymTensor3.identity().trace() == 3.0
    assert SymTensor3.from_matrix(expected) == e


def test_from_matrix_drops_skew_part():
    m = np.array([[0.0, 1.0, 0.0],
                  [-1.0, 0.0, 0.0],
                  [0.0, 0.0, 0.0]])
    assert SymTensor3.from_matrix(m) == SymTensor3()


@seed(1)
@given(a=components, b=components)
def test_inner_matches_frobenius(a, b):
    ea, eb = SymTensor3.from_components(a), SymTensor3.from_components(b)
    expected = float(np.sum(ea.to_matrix() * eb.to_matrix()))
    assert ea.inner(eb) == pytest.approx(expected, rel=1e-12, abs=1e-9)


@seed(2)
@given(a=components)
def test_projection_splits_tensor(a):
    e = SymTensor3.from_components(a)
    vol, dev = project(e, Part.VOLUMETRIC), project(e, Part.DEVIATORIC)
    np.testing.assert_allclose((vol + dev).components(), a, rtol=1e-12, atol=1e-9)
    assert abs(dev.trace()) <= 1e-12 * (1.0 + np.abs(a).sum())
    assert abs(vol.inner(dev)) <= 1e-9 * (1.0 + e.inner(e))


@seed(3)
@given(a=components, lam=st.floats(min_value=-0.5, max_value=10.0), mu=st.floats(min_value=0.1, max_value=10.0))
def test_apply_iso_matches_full_tensor(a, lam, mu):
    e = SymTensor3.from_components(a)
    im, jm = projector_tensors()
    C = (3.0 * lam + 2.0 * mu) * im + 2.0 * mu * jm
    expected = np.einsum("ijkl,kl->ij", C, e.to_matrix())
    np.testing.assert_allclose(apply_iso(IsoTensor4(lam, mu), e).to_matrix(), expected, rtol=1e-10, atol=1e-8)


def test_projectors_are_complementary_idempotents():
    im, jm = projector_tensors()
    dot = lambda a, b: np.einsum("ijmn,mnkl->ijkl", a, b)
    np.testing.assert_allclose(dot(im, im), im, atol=1e-15)
    np.testing.assert_allclose(dot(jm, jm), jm, atol=1e-15)
    np.testing.assert_allclose(dot(im, jm), np.zeros_like(im), atol=1e-15)


def test_bulk_factor():
    assert IsoTensor4(2.0, 1.0).bulk_factor == 8.0


@pytest.mark.parametrize(
    "lam, mu, ok",
    [
        (2.0, 1.0, True),
        (-0.5, 1.0, True),       # 3λ+2μ = 0.5
        (-1.0, 1.0, False),      # 3λ+2μ < 0
        (2.0, 0.0, False),
    ]
)
def test_strong_convexity(lam, mu, ok):
    assert check_strong_convexity(lam, mu, 1e-12) is ok


def test_strong_convexity_rejects_nonpositive_delta():
    with pytest.raises(ValueError):
        check_strong_convexity(1.0, 1.0, 0.0)

import numpy as np
import pytest

from errors import InvalidModel
from model import (
    EBMModel, Element, Kind, assemble, assemble_unsymmetrized_shear, shear_similarity, validate,
)
from numerics import jacobi_eigh

from conftest import burgers


def two_element(mu0=1.0, mu1=4.0, eta=1.0, lam=1.0):
    return EBMModel(R=1.0, elements=(Element(lam, mu0, eta), Element(lam, mu1, eta)))


def test_b_and_accessors(ordered_n2):
    assert ordered_n2.n == 2
    assert ordered_n2.b == pytest.approx(1.75, rel=1e-15)
    assert ordered_n2.maxwell == Element(4.0, 1.0, 1.0)


def test_shear_matrix_entries():
    L = assemble(two_element(), Kind.SHEAR).matrix
    np.testing.assert_allclose(L, [[-4.0, 4.0], [4.0, -8.0]], rtol=1e-15)


def test_bulk_matrix_replaces_shear_modulus():
    m = two_element(lam=2.0)
    L = assemble(m, Kind.BULK).matrix
    # 3λ+2μ = 8 and 14
    np.testing.assert_allclose(L, [[-16.0, np.sqrt(8.0 * 14.0)], [np.sqrt(8.0 * 14.0), -14.0]], rtol=1e-15)


def test_single_element_matrix(reference_n0):
    assert assemble(reference_n0, Kind.SHEAR).matrix.tolist() == [[-2.0]]
    assert assemble(reference_n0, Kind.BULK).matrix.tolist() == [[-8.0]]


def test_unsymmetrized_example():
    np.testing.assert_allclose(assemble_unsymmetrized_shear(two_element()), [[-4.0, 8.0], [2.0, -8.0]], rtol=1e-15)


def test_similarity_reproduces_symmetric_matrix(ordered_n2):
    D, A = shear_similarity(ordered_n2)
    np.testing.assert_allclose(D @ A @ D, assemble(ordered_n2, Kind.SHEAR).matrix, rtol=1e-14)


@pytest.mark.parametrize("kind", list(Kind))
def test_mode_matrices_symmetric_negative_definite(kind, ordered_n2):
    L = assemble(ordered_n2, kind).matrix
    assert np.array_equal(L, L.T)
    assert np.all(jacobi_eigh(L).eigenvalues < 0.0)


@pytest.mark.parametrize(
    "model, fragment",
    [
        (EBMModel(R=0.0, elements=(Element(2.0, 1.0, 1.0),)), "nonpositive radius"),
        (EBMModel(R=1.0, elements=(Element(2.0, 1.0, 0.0),)), "nonpositive viscosity"),
        (EBMModel(R=1.0, elements=(Element(-1.0, 1.0, 1.0),)), "strong convexity"),
        (EBMModel(R=1.0, elements=(Element(2.0, float("nan"), 1.0),)), "non-finite"),
        (EBMModel(R=1.0, elements=()), "no elements"),
    ]
)
def test_validate_reports_violation(model, fragment):
    violations = validate(model)
    assert any(fragment in v for v in violations)
    with pytest.raises(InvalidModel):
        assemble(model, Kind.SHEAR)


def test_validate_lists_every_violation():
    m = EBMModel(R=1.0, elements=(Element(2.0, 1.0, 1.0), Element(2.0, 1.0, -1.0), Element(-5.0, 1.0, 1.0)))
    violations = validate(m)
    assert len(violations) == 2
    assert violations[0].startswith("element 1")
    assert violations[1].startswith("element 2")


def test_negative_lambda_within_convexity_is_valid():
    assert validate(burgers(1, lam=-0.5)) == []


def test_dict_round_trip(ordered_n2):
    d = ordered_n2.to_dict()
    assert d["n"] == 2
    assert d["elements"][2] == {"lambda": 16.0, "mu": 4.0, "eta": 2.0}
    assert EBMModel.from_dict(d) == ordered_n2


def test_scaled_multiplies_moduli_only(ordered_n2):
    s = ordered_n2.scaled(3.0)
    assert s.elements[1] == Element(48.0, 12.0, 4.0)
    assert s.R == ordered_n2.R

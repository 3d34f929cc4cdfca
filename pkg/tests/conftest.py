import numpy as np
import pytest

from model import EBMModel, Element


def burgers(n: int, lam: float = 2.0, mu: float = 1.0, eta: float = 1.0, R: float = 1.0) -> EBMModel:
    return EBMModel(R=R, elements=tuple(Element(lam, mu, eta) for _ in range(n + 1)))


@pytest.fixture
def reference_n0():
    """Maxwell unit alone: λ=2, μ=1, η=1, R=1."""
    return burgers(0)


@pytest.fixture
def reference_n1():
    """Two identical elements; shear and bulk rates overlap."""
    return burgers(1)


@pytest.fixture
def ordered_n2():
    """Shear rates are the roots of x³ - 9.5x² + 24x - 16 (≈ 1.07, 2.55, 5.88).

    Every element has 3λ+2μ = 7·2μ, so the bulk rates are exactly 7x the shear rates
    and the Prony pair is ordered with a junction gap of about 1.27.
    """
    return EBMModel(R=1.0, elements=(Element(4.0, 1.0, 1.0), Element(16.0, 4.0, 4.0), Element(16.0, 4.0, 2.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)

# EBM material record and the shear / bulk mode matrices

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from errors import InvalidModel
from tensor_core import check_strong_convexity


class Kind(str, Enum):
    SHEAR = "shear"
    BULK = "bulk"


@dataclass(frozen=True)
class Element:
    lam: float
    mu: float
    eta: float

    @property
    def shear_modulus2(self) -> float:
        return 2.0 * self.mu

    @property
    def bulk_modulus3(self) -> float:
        return 3.0 * self.lam + 2.0 * self.mu


@dataclass(frozen=True)
class EBMModel:
    """One Maxwell unit (element 0) in series with n Kelvin-Voigt units, in a ball of radius R."""
    R: float
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def n(self) -> int:
        return len(self.elements) - 1

    @property
    def b(self) -> float:
        return math.fsum(1.0 / e.eta for e in self.elements)

    @property
    def maxwell(self) -> Element:
        return self.elements[0]

    def scaled(self, s: float) -> "EBMModel":
        """All moduli multiplied by s, viscosities unchanged."""
        return replace(self, elements=tuple(Element(e.lam * s, e.mu * s, e.eta) for e in self.elements))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "R": self.R,
            "elements": [{"lambda": e.lam, "mu": e.mu, "eta": e.eta} for e in self.elements],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EBMModel":
        elements = tuple(Element(float(e["lambda"]), float(e["mu"]), float(e["eta"])) for e in d["elements"])
        return cls(R=float(d["R"]), elements=elements)


@dataclass(frozen=True)
class ModeMatrix:
    kind: Kind
    matrix: np.ndarray


def default_delta(m: EBMModel) -> float:
    scale = max((max(abs(e.lam), abs(e.mu)) for e in m.elements), default=0.0)
    return 1e-12 * scale if scale > 0.0 else 1e-300


def validate(m: EBMModel) -> list[str]:
    """Every violated model invariant, as readable messages. Empty list means valid."""
    violations = []
    if not (math.isfinite(m.R) and m.R > 0.0):
        violations.append(f"nonpositive radius R={m.R!r}")
    if not m.elements:
        violations.append("no elements (the Maxwell unit is required)")
        return violations
    delta = default_delta(m)
    for i, e in enumerate(m.elements):
        if not all(math.isfinite(x) for x in (e.lam, e.mu, e.eta)):
            violations.append(f"element {i}: non-finite parameter")
            continue
        if e.eta <= 0.0:
            violations.append(f"element {i}: nonpositive viscosity eta={e.eta!r}")
        if not check_strong_convexity(e.lam, e.mu, delta):
            violations.append(f"element {i}: strong convexity fails (mu={e.mu!r}, 3*lambda+2*mu={e.bulk_modulus3!r})")
    return violations


def _require_valid(m: EBMModel):
    violations = validate(m)
    if violations:
        raise InvalidModel(violations)


def _moduli(m: EBMModel, kind: Kind) -> np.ndarray:
    if Kind(kind) is Kind.SHEAR:
        return np.array([e.shear_modulus2 for e in m.elements])
    return np.array([e.bulk_modulus3 for e in m.elements])


def assemble(m: EBMModel, kind: Kind) -> ModeMatrix:
    """Symmetrized mode matrix of order n+1.

    Shear: diagonal (-2bμ₀, -2μᵢ/ηᵢ) with first row and column √(4μ₀μᵢ)/ηᵢ.
    Bulk: the same with 2μ replaced by 3λ+2μ.
    """
    _require_valid(m)
    kind = Kind(kind)
    g = _moduli(m, kind)
    eta = np.array([e.eta for e in m.elements])
    L = np.zeros((m.n + 1, m.n + 1))
    L[0, 0] = -m.b * g[0]
    for i in range(1, m.n + 1):
        L[i, i] = -g[i] / eta[i]
        L[0, i] = L[i, 0] = math.sqrt(g[0] * g[i]) / eta[i]
    return ModeMatrix(kind=kind, matrix=L)


def shear_similarity(m: EBMModel) -> tuple[np.ndarray, np.ndarray]:
    """(D^μ, A^S) with D^μ = diag(√(2μᵢ)) and D^μ A^S D^μ equal to the symmetrized shear matrix."""
    _require_valid(m)
    eta = np.array([e.eta for e in m.elements])
    A = np.diag(-1.0 / eta)
    A[0, 0] = -m.b
    A[0, 1:] = A[1:, 0] = 1.0 / eta[1:]
    D = np.diag(np.sqrt(_moduli(m, Kind.SHEAR)))
    return D, A


def assemble_unsymmetrized_shear(m: EBMModel) -> np.ndarray:
    """Shear matrix before symmetrization: A^S·(D^μ)², similar to the symmetrized one."""
    D, A = shear_similarity(m)
    return A @ (D @ D)

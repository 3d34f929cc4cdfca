# Symmetric 3x3 tensors and isotropic fourth-order tensors

from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

# index pairs of the six stored components, in storage order
_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class SymTensor3:
    """Symmetric 3x3 tensor stored as its six independent components."""
    e11: float = 0.0
    e22: float = 0.0
    e33: float = 0.0
    e12: float = 0.0
    e13: float = 0.0
    e23: float = 0.0

    @classmethod
    def identity(cls) -> "SymTensor3":
        return cls(1.0, 1.0, 1.0)

    @classmethod
    def diag(cls, a: float, b: float, c: float) -> "SymTensor3":
        return cls(a, b, c)

    @classmethod
    def from_matrix(cls, m) -> "SymTensor3":
        m = np.asarray(m, dtype=float)
        # symmetric part; the skew part carries no strain
        s = 0.5 * (m + m.T)
        return cls(*(float(s[i, j]) for i, j in _PAIRS))

    @classmethod
    def from_components(cls, comps) -> "SymTensor3":
        return cls(*(float(c) for c in comps))

    def components(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)])

    def to_matrix(self) -> np.ndarray:
        m = np.empty((3, 3))
        for (i, j), v in zip(_PAIRS, self.components()):
            m[i, j] = m[j, i] = v
        return m

    def trace(self) -> float:
        return self.e11 + self.e22 + self.e33

    def inner(self, other: "SymTensor3") -> float:
        # A:B, off-diagonal entries counted twice
        a, b = self.components(), other.components()
        return float(a[:3] @ b[:3] + 2.0 * (a[3:] @ b[3:]))

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self)))

    def __add__(self, other: "SymTensor3") -> "SymTensor3":
        return SymTensor3.from_components(self.components() + other.components())

    def __sub__(self, other: "SymTensor3") -> "SymTensor3":
        return SymTensor3.from_components(self.components() - other.components())

    def __mul__(self, s: float) -> "SymTensor3":
        return SymTensor3.from_components(self.components() * float(s))

    __rmul__ = __mul__

    def __neg__(self) -> "SymTensor3":
        return self * -1.0


@dataclass(frozen=True)
class IsoTensor4:
    lam: float
    mu: float

    @property
    def bulk_factor(self) -> float:
        """3λ+2μ, the eigenvalue on the volumetric subspace."""
        return 3.0 * self.lam + 2.0 * self.mu


class Part(str, Enum):
    VOLUMETRIC = "volumetric"
    DEVIATORIC = "deviatoric"


def apply_iso(C: IsoTensor4, e: SymTensor3) -> SymTensor3:
    """λ tr(e) I + 2μ e"""
    return SymTensor3.identity() * (C.lam * e.trace()) + e * (2.0 * C.mu)


def project(e: SymTensor3, part: Part) -> SymTensor3:
    """Volumetric or deviatoric part of e.

    Args:
        e (SymTensor3): tensor to split.
        part (Part): which projector to apply.

    Returns:
        SymTensor3: tr(e)/3 I for the volumetric part, the trace-free remainder otherwise.
    """
    part = Part(part)
    vol = SymTensor3.identity() * (e.trace() / 3.0)
    if part is Part.VOLUMETRIC:
        return vol
    return e - vol


def check_strong_convexity(lam: float, mu: float, delta: float) -> bool:
    if delta <= 0:
        raise ValueError("delta must be positive")
    return mu >= delta and 3.0 * lam + 2.0 * mu >= delta


def projector_tensors() -> tuple[np.ndarray, np.ndarray]:
    """Full 3x3x3x3 arrays of the volumetric (I_m) and deviatoric (J_m) projectors."""
    d = np.eye(3)
    im = np.einsum("ij,kl->ijkl", d, d) / 3.0
    sym = 0.5 * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d))
    return im, sym - im

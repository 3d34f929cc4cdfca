# Cluster eigenvalues of the homogeneous ball: Prony pair, cluster polynomials, roots, augmented system

import logging
import math
from dataclasses import dataclass

import numpy as np

from ball_modes import RadialMode
from errors import (
    BracketFailure, CrossCheckFailure, DegenerateStrengths, NoSignChange, NonUniformGrid,
    OrderingViolation, StepTooLarge,
)
from model import EBMModel
from numerics import (
    Poly, brent_root, eps, newton_polish, poly_from_roots, poly_roots, poly_sum, root_sort_key,
)
from relaxation import RelaxationSpectrum

logger = logging.getLogger(__name__)

CROSS_CHECK_TOL = 1e-8
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class PronyPair:
    beta: np.ndarray    # 2n+2 decay rates, strictly increasing
    alpha: np.ndarray   # 2n+2 strengths
    n: int
    D: float            # λ₀ + 2μ₀

    @classmethod
    def from_arrays(cls, beta, alpha, D: float) -> "PronyPair":
        beta = np.asarray(beta, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        return cls(beta=beta, alpha=alpha, n=beta.size // 2 - 1, D=float(D))

    @property
    def size(self) -> int:
        return self.beta.size

    def strength_sum(self) -> float:
        """Σα/β, equal to D for a consistent pair."""
        return math.fsum(self.alpha / self.beta)


@dataclass(frozen=True)
class ClusterSpectrum:
    ell: int
    c: float
    real_roots: np.ndarray    # a₁ = 0 ≥ a₂ ≥ … ≥ a₂ₙ₊₂
    extra_roots: tuple        # the two remaining roots, complex or real
    poly: Poly
    residual: float = 0.0     # max |P(root)| / Σ|p_k||root|^k

    @property
    def n(self) -> int:
        return self.real_roots.size // 2 - 1

    @property
    def all_roots(self) -> list:
        roots = [complex(a) for a in self.real_roots] + [complex(z) for z in self.extra_roots]
        return sorted(roots, key=root_sort_key)


@dataclass(frozen=True)
class AugmentedMatrix:
    matrix: np.ndarray
    k: float


def build_prony(m: EBMModel, s: RelaxationSpectrum) -> PronyPair:
    """Interleave shear and bulk modes: β = (τ…, κ…), α = ((4/3)μ₀τw…, (λ₀+⅔μ₀)κq…)."""
    n = m.n
    if s.shear_rates.size != n + 1 or s.bulk_rates.size != n + 1:
        raise DegenerateStrengths("coincident relaxation rates leave fewer than n+1 modes per kind")
    if s.shear_rates[-1] >= s.bulk_rates[0]:
        raise OrderingViolation(
            f"largest shear rate {s.shear_rates[-1]!r} is not below smallest bulk rate {s.bulk_rates[0]!r}")
    mu0, lam0 = s.mu0, s.lam0
    beta = np.concatenate([s.shear_rates, s.bulk_rates])
    alpha = np.concatenate([
        4.0 / 3.0 * mu0 * s.shear_rates * s.shear_weights,
        (lam0 + 2.0 / 3.0 * mu0) * s.bulk_rates * s.bulk_weights,
    ])
    return PronyPair(beta=beta, alpha=alpha, n=n, D=lam0 + 2.0 * mu0)


# --- polynomials ---

def _products(p: PronyPair) -> tuple[Poly, Poly]:
    """Π(z+β) and Σαᵢ·Π_{j≠i}(z+βⱼ)."""
    full = poly_from_roots(-p.beta)
    partial = poly_sum(
        poly_from_roots(-np.delete(p.beta, i)) * a for i, a in enumerate(p.alpha)
    )
    return full, partial


def _snap_constant(poly: Poly, label: str) -> Poly:
    c = poly.coeffs.copy()
    if abs(c[0]) > 1e-12 * poly.norm1():
        logger.warning("%s: constant coefficient %.3e is not negligible", label, c[0])
    # P(0) = Πβ·(D - Σα/β) vanishes identically
    c[0] = 0.0
    return Poly(c)


def char_poly_ell(p: PronyPair, c: float) -> Poly:
    """(D + cz²)·Π(z+β) - Σαᵢ·Π_{j≠i}(z+βⱼ), degree 2n+4 with leading coefficient c."""
    if c <= 0.0:
        raise ValueError("multiplier c must be positive")
    full, partial = _products(p)
    poly = poly_sum([full * p.D, full.shift(2) * c, partial * -1.0])
    return _snap_constant(poly, "char_poly_ell")


def limit_poly(p: PronyPair) -> Poly:
    """D·Π(z+β) - Σαᵢ·Π_{j≠i}(z+βⱼ), degree 2n+2."""
    full, partial = _products(p)
    return _snap_constant(poly_sum([full * p.D, partial * -1.0]), "limit_poly")


def secular(p: PronyPair, c: float, z: float) -> float:
    """Σαᵢ/(z+βᵢ) - D - cz²"""
    return math.fsum([*(p.alpha / (z + p.beta)), -p.D, -c * z * z])


# --- roots ---

def _check_pair(p: PronyPair):
    if np.any(np.diff(p.beta) <= 0.0) or np.any(p.beta <= 0.0):
        raise OrderingViolation("decay rates must be positive and strictly increasing")
    if np.any(p.alpha < 1e-12 * p.D * p.beta):
        raise DegenerateStrengths("strengths below 1e-12·D·β collapse the secular brackets")


def _secular_roots(p: PronyPair, c: float) -> np.ndarray:
    """The 2n+1 nonzero roots, one inside each (-βⱼ₊₁, -βⱼ), in descending order."""
    roots = []
    for j in range(p.size - 1):
        lo, hi = -p.beta[j + 1], -p.beta[j]
        shrink = 1e-9 * (hi - lo)
        try:
            a = brent_root(lambda z: secular(p, c, z), lo + shrink, hi - shrink, tol=4.0 * eps)
        except NoSignChange as exc:
            raise BracketFailure(f"no secular root in (-β{j + 2}, -β{j + 1}): {exc.message}") from exc
        roots.append(a)
    return np.array(roots)


def _stable_quadratic(q0: complex, q1: complex, q2: complex) -> tuple:
    disc = q1 * q1 - 4.0 * q2 * q0
    if np.isreal(disc) and disc.real >= 0.0:
        s = math.sqrt(disc.real)
        q = -0.5 * (q1.real + math.copysign(s, q1.real))
        if q == 0.0:
            return 0j, 0j
        return complex(q / q2.real), complex(q0.real / q)
    s = np.sqrt(complex(disc))
    return (-q1 + s) / (2.0 * q2), (-q1 - s) / (2.0 * q2)


def _extra_roots(poly: Poly, real_roots: np.ndarray) -> tuple:
    # deflate by z, then by the real roots from the smallest magnitude up (forward deflation)
    q = Poly(poly.coeffs[1:])
    for a in sorted(real_roots[1:], key=abs):
        coeffs, _ = q.divide_linear(float(a))
        q = Poly(coeffs)
    z1, z2 = _stable_quadratic(complex(q[0]), complex(q[1]), complex(q[2]))
    out = []
    for z in (z1, z2):
        z = complex(newton_polish(poly, complex(z)))
        if abs(z.imag) < 1e-9 * (1.0 + abs(z.real)):
            z = complex(z.real, 0.0)
        out.append(z)
    return tuple(sorted(out, key=root_sort_key))


def cluster_roots_for(p: PronyPair, c: float, ell: int = 0) -> ClusterSpectrum:
    """Cluster spectrum for an explicit multiplier c (bypasses the radial-mode solve)."""
    _check_pair(p)
    poly = char_poly_ell(p, c)
    real = np.concatenate([[0.0], _secular_roots(p, c)])
    extra = _extra_roots(poly, real)

    reference = poly_roots(poly)
    for a in real:
        nearest = min(reference, key=lambda z: abs(z - a))
        if abs(nearest - a) > CROSS_CHECK_TOL * (1.0 + abs(a)):
            raise CrossCheckFailure(f"secular root {a!r} has no polynomial root within tolerance (nearest {nearest!r})")

    residual = 0.0
    for z in [*real, *extra]:
        scale = poly.abs_eval(z)
        if scale > 0.0:
            residual = max(residual, abs(poly(z)) / scale)
    if residual > RESIDUAL_TOL:
        raise CrossCheckFailure(f"root residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    logger.debug("cluster ell=%d c=%.6g residual=%.3e extra=%s", ell, c, residual, extra)
    return ClusterSpectrum(ell=ell, c=c, real_roots=real, extra_roots=extra, poly=poly, residual=residual)


def cluster_roots(p: PronyPair, mode: RadialMode) -> ClusterSpectrum:
    """All 2n+4 roots of P^ℓ: a₁ = 0, the 2n+1 interlaced secular roots, and the two extra roots."""
    return cluster_roots_for(p, mode.c, mode.ell)


def limit_roots(p: PronyPair) -> np.ndarray:
    """Roots of the limit polynomial: 0 and one root in each (-βⱼ₊₁, -βⱼ), descending."""
    _check_pair(p)
    return np.concatenate([[0.0], _secular_roots(p, 0.0)])


# --- augmented system ---

def augmented_matrix(p: PronyPair, mode: RadialMode) -> AugmentedMatrix:
    """Matrix of U' = A U on U = (u, v, w₁..w₂ₙ₊₂):
    u' = v, v' = -D·k·u - Σαw, wⱼ' = -k·u - βⱼwⱼ, with k = k_b = 1/c_ℓ.
    """
    return _augmented(p, 1.0 / mode.c)


def _augmented(p: PronyPair, k: float) -> AugmentedMatrix:
    N = p.size
    A = np.zeros((N + 2, N + 2))
    A[0, 1] = 1.0
    A[1, 0] = -p.D * k
    A[1, 2:] = -p.alpha
    A[2:, 0] = -k
    A[2:, 2:] = np.diag(-p.beta)
    return AugmentedMatrix(matrix=A, k=k)


def cluster_eigenvector(p: PronyPair, mode: RadialMode, z: complex) -> np.ndarray:
    """Right eigenvector of the augmented matrix for root z: u = 1, v = z, wⱼ = -k/(z+βⱼ)."""
    k = 1.0 / mode.c
    z = complex(z)
    if z.imag == 0.0:
        z = z.real
    return np.concatenate([[1.0, z], -k / (z + p.beta)])


def conserved_quantity(p: PronyPair, U: np.ndarray):
    """v - Σ(αⱼ/βⱼ)wⱼ, constant along trajectories of the augmented system."""
    U = np.asarray(U)
    return U[..., 1] - U[..., 2:] @ (p.alpha / p.beta)


def max_step(p: PronyPair, mode: RadialMode) -> float:
    return 0.1 / max(float(p.beta[-1]), math.sqrt(p.D / mode.c))


def modal_simulate(p: PronyPair, mode: RadialMode, U0, t_grid) -> np.ndarray:
    """Classical RK4 integration of U' = A U on a uniform grid; returns one row per grid point."""
    t = np.asarray(t_grid, dtype=float)
    if t.size < 2:
        raise NonUniformGrid("need at least two grid points")
    steps = np.diff(t)
    h = float(steps.mean())
    if h <= 0.0 or np.max(np.abs(steps - h)) > 1e-9 * h:
        raise NonUniformGrid("time grid must be uniform and increasing")
    hmax = max_step(p, mode)
    if h > hmax:
        raise StepTooLarge(f"step {h!r} exceeds {hmax!r}")

    A = augmented_matrix(p, mode).matrix
    U = np.asarray(U0)
    U = U.astype(np.result_type(U.dtype, float))
    out = np.empty((t.size, U.size), dtype=U.dtype)
    out[0] = U
    for i in range(1, t.size):
        k1 = A @ U
        k2 = A @ (U + 0.5 * h * k1)
        k3 = A @ (U + 0.5 * h * k2)
        k4 = A @ (U + h * k3)
        U = U + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = U
    return out

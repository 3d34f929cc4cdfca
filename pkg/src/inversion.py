# Recovery of the Prony pair, moduli and modal weights from two clusters of eigenvalues

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ball_modes import solve_mode
from errors import (
    ComplexBeta, IllConditioned, InconsistentClusters, InputError, NegativeModulus, NoConvergence,
    NonPositiveAlpha, RatioInconsistent,
)
from numerics import Poly, poly_from_roots, poly_roots, poly_sum
from spectrum import ClusterSpectrum, PronyPair, secular
from tensor_core import check_strong_convexity

logger = logging.getLogger(__name__)

LOW_COEFF_TOL = 1e-8
MIN_GAP_RATIO = 1.05
RATIO_TOL = 1e-6
MAX_ITER = 100
DAMPING = 0.5
CONVERGENCE = 1e-12


@dataclass(frozen=True)
class ClusterData:
    """One cluster: the full root list plus either its multiplier c or its mode index ℓ."""
    roots: tuple
    c: Optional[float] = None
    ell: Optional[int] = None

    def __post_init__(self):
        roots = tuple(complex(z) for z in self.roots)
        object.__setattr__(self, "roots", roots)
        if len(roots) < 4 or len(roots) % 2:
            raise InputError(f"a cluster holds 2n+4 roots, got {len(roots)}")
        scale = max(abs(z) for z in roots)
        for z in roots:
            if z.imag != 0.0 and min(abs(w - z.conjugate()) for w in roots) > 1e-8 * (1.0 + abs(z)):
                raise InputError(f"root list is not closed under conjugation at {z!r}")
        zeros = [z for z in roots if abs(z) <= 1e-8 * scale]
        if len(zeros) != 1:
            raise InputError(f"expected exactly one root at 0, found {len(zeros)}")

    @property
    def n(self) -> int:
        return (len(self.roots) - 4) // 2

    @classmethod
    def from_spectrum(cls, cs: ClusterSpectrum, with_c: bool = True) -> "ClusterData":
        return cls(roots=tuple(cs.all_roots), c=cs.c if with_c else None, ell=cs.ell)

    def with_c(self, c: float) -> "ClusterData":
        return ClusterData(roots=self.roots, c=c, ell=self.ell)

    def monic(self) -> Poly:
        """Monic polynomial with these roots, the zero root placed exactly at 0."""
        i0 = min(range(len(self.roots)), key=lambda i: abs(self.roots[i]))
        roots = list(self.roots)
        roots[i0] = 0j
        return poly_from_roots(roots)

    def real_roots(self) -> list[float]:
        return [z.real for z in self.roots if abs(z.imag) < 1e-9 * (1.0 + abs(z.real))]


class PronyRecovery(NamedTuple):
    D: float
    alpha: np.ndarray
    beta: np.ndarray
    low_residual: float        # relative size of the z⁰, z¹ terms of c₁M₁ - c₂M₂
    identity_residual: float   # ‖c₁M₁ - c₂M₂ - (c₁-c₂)z²Q‖ / ‖c₁M₁‖


@dataclass
class InversionResult:
    n: int
    D: float
    alpha: np.ndarray
    beta: np.ndarray
    mu0: float
    lam0: float
    shear_rates: np.ndarray
    shear_weights: np.ndarray
    bulk_rates: np.ndarray
    bulk_weights: np.ndarray
    fit_residual: float = float("nan")
    multipliers: dict = field(default_factory=dict)   # ℓ (or cluster position) -> c
    diagnostics: dict = field(default_factory=dict)

    def prony(self) -> PronyPair:
        return PronyPair(beta=self.beta, alpha=self.alpha, n=self.n, D=self.D)


# --- known multipliers ---

def recover_prony(c1: ClusterData, c2: ClusterData) -> PronyRecovery:
    """(D, α, β) from two clusters with known multipliers.

    c₁M₁ - c₂M₂ = (c₁-c₂)·z²·Π(z+β), so the difference fixes β; the remainder
    c₁M₁ - c₁z²Q is the limit polynomial whose leading coefficient is D and
    whose gap to D·Q interpolates the strengths at z = -βᵢ.
    """
    if c1.c is None or c2.c is None:
        raise InconsistentClusters("both clusters need their multiplier c")
    if c1.n != c2.n:
        raise InconsistentClusters(f"clusters disagree on n ({c1.n} vs {c2.n})")
    if c1.c == c2.c:
        raise InconsistentClusters("multipliers coincide; the clusters carry no independent information")
    n = c1.n
    m1, m2 = c1.monic(), c2.monic()
    diff = poly_sum([m1 * c1.c, m2 * -c2.c])

    low = 0.0
    for k in (0, 1):
        scale = abs(c1.c * m1[k]) + abs(c2.c * m2[k])
        if scale > 0.0:
            low = max(low, abs(diff[k]) / scale)
    if low > LOW_COEFF_TOL:
        raise InconsistentClusters(f"low coefficients of c1*M1 - c2*M2 do not vanish (relative {low:.3e})",
                                   details={"low_residual": low})

    q = Poly(diff.coeffs[2:] / (c1.c - c2.c))
    zq = q.shift(2)
    identity = poly_sum([m1 * c1.c, m2 * -c2.c, zq * -(c1.c - c2.c)])
    identity_residual = identity.norm1() / (m1 * c1.c).norm1()

    qroots = poly_roots(q)
    if any(z.imag != 0.0 for z in qroots):
        raise ComplexBeta(f"decay rates are not real: {qroots!r}")
    beta = np.sort(np.array([-z.real for z in qroots]))
    if np.any(beta <= 0.0) or np.any(np.diff(beta) <= 0.0):
        raise InconsistentClusters(f"decay rates must be positive and distinct: {beta.tolist()!r}")
    ratios = beta[1:] / beta[:-1]
    if np.any(ratios < MIN_GAP_RATIO):
        raise IllConditioned(f"adjacent decay-rate ratio {ratios.min():.4f} below {MIN_GAP_RATIO}")

    pr = Poly(poly_sum([m1 * c1.c, zq * -c1.c]).coeffs[: 2 * n + 3])
    D = float(pr[2 * n + 2])
    a_poly = poly_sum([q * D, pr * -1.0])
    alpha = np.empty_like(beta)
    for i, b in enumerate(beta):
        denom = math.prod(float(bj - b) for j, bj in enumerate(beta) if j != i)
        alpha[i] = a_poly(-b) / denom
    if np.any(alpha <= 0.0):
        raise NonPositiveAlpha(f"recovered strengths are not positive: {alpha.tolist()!r}")
    logger.debug("recover_prony: n=%d D=%.17g low=%.3e identity=%.3e", n, D, low, identity_residual)
    return PronyRecovery(D, alpha, beta, low, identity_residual)


def recover_moduli(D: float, alpha, beta, n: int) -> InversionResult:
    """μ₀, λ₀ and the modal weights; the first n+1 rates are shear, the last n+1 bulk."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    ratio = alpha / beta
    s_shear = math.fsum(ratio[: n + 1])
    s_bulk = math.fsum(ratio[n + 1:])
    mu0 = 0.75 * s_shear
    lam0 = s_bulk - 0.5 * s_shear
    delta = 1e-12 * max(abs(lam0), abs(mu0), 1e-300)
    if not check_strong_convexity(lam0, mu0, delta):
        raise NegativeModulus(f"recovered moduli violate strong convexity: lambda0={lam0!r}, mu0={mu0!r}")
    return InversionResult(
        n=n, D=float(D), alpha=alpha, beta=beta, mu0=mu0, lam0=lam0,
        shear_rates=beta[: n + 1].copy(),
        shear_weights=0.75 / mu0 * ratio[: n + 1],
        bulk_rates=beta[n + 1:].copy(),
        bulk_weights=ratio[n + 1:] / (lam0 + 2.0 / 3.0 * mu0),
        diagnostics={"D_mismatch": abs(lam0 + 2.0 * mu0 - D) / abs(D)},
    )


def fit_residual(result: InversionResult, clusters: list) -> float:
    """max |Σαᵢ/(a+βᵢ) - D - c·a²| / D over every real root of every cluster."""
    if not clusters:
        logger.warning("fit_residual: no clusters given, residual is 0")
        return 0.0
    p = result.prony()
    worst = 0.0
    for k, cl in enumerate(clusters):
        c = cl.c if cl.c is not None else result.multipliers.get(cl.ell, result.multipliers.get(k))
        if c is None:
            raise InconsistentClusters(f"no multiplier known for cluster {k}")
        for a in cl.real_roots():
            worst = max(worst, abs(secular(p, c, a)) / result.D)
    return worst


def invert_known_c(c1: ClusterData, c2: ClusterData) -> InversionResult:
    rec = recover_prony(c1, c2)
    result = recover_moduli(rec.D, rec.alpha, rec.beta, c1.n)
    result.multipliers = {_key(c1, 0): c1.c, _key(c2, 1): c2.c}
    result.fit_residual = fit_residual(result, [c1, c2])
    result.diagnostics.update({
        "mode": "known-c",
        "low_residual": rec.low_residual,
        "identity_residual": rec.identity_residual,
        "min_gap_ratio": float(np.min(rec.beta[1:] / rec.beta[:-1])),
    })
    return result


def _key(cl: ClusterData, pos: int):
    return cl.ell if cl.ell is not None else pos


# --- unknown multipliers ---

def _ratio(m1: Poly, m2: Poly) -> tuple[float, float]:
    # least squares for c₂/c₁ in M₁[k] = ρ·M₂[k], k = 0, 1
    a = np.array([m1[0], m1[1]])
    b = np.array([m2[0], m2[1]])
    rho = float(a @ b / (b @ b))
    return rho, float(np.linalg.norm(a - rho * b) / np.linalg.norm(a))


def self_consistent_invert(roots1, roots2, ell1: int, ell2: int, R: float,
                           initial_c: float = None) -> InversionResult:
    """Inversion when the multipliers are unknown and follow from the recovered moduli.

    The ratio c₂/c₁ comes from the vanishing low coefficients of c₁M₁ - c₂M₂.
    The scale c₁ is the damped fixed point of c₁ -> R²/r_ℓ₁(λ₀, μ₀)², where the
    moduli are recovered with the current c₁.
    """
    if ell1 == ell2:
        raise InconsistentClusters("self-consistent inversion needs two distinct mode indices")
    d1 = roots1 if isinstance(roots1, ClusterData) else ClusterData(roots=tuple(roots1), ell=ell1)
    d2 = roots2 if isinstance(roots2, ClusterData) else ClusterData(roots=tuple(roots2), ell=ell2)
    if d1.n != d2.n:
        raise RatioInconsistent(f"clusters disagree on n ({d1.n} vs {d2.n})")
    m1, m2 = d1.monic(), d2.monic()

    top = 2 * d1.n + 3
    sum1, sum2 = m1[top], m2[top]
    if abs(sum1 - sum2) > RATIO_TOL * max(abs(sum1), abs(sum2)):
        raise RatioInconsistent(f"root sums differ: {sum1!r} vs {sum2!r}")
    rho, rho_residual = _ratio(m1, m2)
    if rho_residual > LOW_COEFF_TOL or not rho > 0.0:
        raise RatioInconsistent(f"no common multiplier ratio (residual {rho_residual:.3e})")

    c1 = initial_c if initial_c is not None else R ** 2 / (ell1 * math.pi) ** 2
    for it in range(1, MAX_ITER + 1):
        result = invert_known_c(d1.with_c(c1), d2.with_c(rho * c1))
        r1 = solve_mode(result.lam0, result.mu0, R, ell1).r
        target = R ** 2 / r1 ** 2
        c_new = c1 + DAMPING * (target - c1)
        step = abs(c_new - c1) / c1
        c1 = c_new
        if step < CONVERGENCE:
            break
    else:
        raise NoConvergence(f"multiplier fixed point did not converge in {MAX_ITER} iterations")
    logger.debug("self_consistent_invert: c1=%.17g after %d iterations", c1, it)

    result = invert_known_c(d1.with_c(c1), d2.with_c(rho * c1))
    r1 = solve_mode(result.lam0, result.mu0, R, ell1).r
    r2 = solve_mode(result.lam0, result.mu0, R, ell2).r
    expected = (r1 / r2) ** 2
    if abs(rho - expected) > RATIO_TOL * expected:
        raise RatioInconsistent(f"multiplier ratio {rho!r} disagrees with the modes' {expected!r}")
    result.multipliers = {ell1: c1, ell2: rho * c1}
    result.diagnostics.update({
        "mode": "self-consistent",
        "iterations": it,
        "ratio": rho,
        "ratio_residual": rho_residual,
        "ratio_mismatch": abs(rho - expected) / expected,
    })
    return result

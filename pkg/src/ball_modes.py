# Radial modes of the traction-free homogeneous ball

import logging
import math
from dataclasses import dataclass

import numpy as np

from errors import BracketFailure, NoSignChange, OutsideDomain
from numerics import brent_root, eps

logger = logging.getLogger(__name__)

BRACKET_SHRINK = 1e-9
SERIES_RADIUS = 1e-3     # fraction of R below which the power series is used
SERIES_TERMS = 12


@dataclass(frozen=True)
class RadialMode:
    ell: int
    r: float
    lam0: float
    mu0: float
    R: float

    @property
    def k_b(self) -> float:
        return self.r ** 2 / self.R ** 2

    @property
    def c(self) -> float:
        """Multiplier c_ℓ = R²/r_ℓ² of the cluster polynomial."""
        return self.R ** 2 / self.r ** 2


def eval_f(lam0: float, mu0: float, eta):
    """((λ₀+2μ₀)η² - 4μ₀)·sin η + 4μ₀η·cos η"""
    eta = np.asarray(eta, dtype=float)
    val = ((lam0 + 2.0 * mu0) * eta ** 2 - 4.0 * mu0) * np.sin(eta) + 4.0 * mu0 * eta * np.cos(eta)
    return float(val) if val.ndim == 0 else val


def solve_mode(lam0: float, mu0: float, R: float, ell: int) -> RadialMode:
    """Root r_ℓ of eval_f inside ((ℓ-½)π, ℓπ).

    Raises:
        BracketFailure: no sign change over the bracket (moduli outside the admissible range).
    """
    if ell < 1:
        raise ValueError(f"mode index must be >= 1, got {ell}")
    a = (ell - 0.5) * math.pi + BRACKET_SHRINK
    b = ell * math.pi - BRACKET_SHRINK
    try:
        r = brent_root(lambda x: eval_f(lam0, mu0, x), a, b, tol=4.0 * eps)
    except NoSignChange as exc:
        raise BracketFailure(f"ell={ell}: {exc.message}") from exc
    logger.debug("solve_mode: ell=%d r=%.17g", ell, r)
    return RadialMode(ell=ell, r=r, lam0=lam0, mu0=mu0, R=R)


def solve_modes(lam0: float, mu0: float, R: float, ells) -> list[RadialMode]:
    return [solve_mode(lam0, mu0, R, ell) for ell in ells]


# --- fields ---

def _J(eta: float) -> float:
    return 1.0 if eta == 0.0 else math.sin(eta) / eta


def _dJ(eta: float) -> float:
    return 0.0 if eta == 0.0 else (eta * math.cos(eta) - math.sin(eta)) / eta ** 2


def _dJ_over_eta_series(eta: float) -> float:
    # Σ_{j≥1} (-1)^j 2j η^(2j-2) / (2j+1)!
    x = eta * eta
    acc = 0.0
    for j in range(SERIES_TERMS, 0, -1):
        acc = acc * x + (-1) ** j * 2 * j / math.factorial(2 * j + 1)
    return acc


def _dJ_over_eta(eta: float, small: bool) -> float:
    if small:
        return _dJ_over_eta_series(eta)
    return (eta * math.cos(eta) - math.sin(eta)) / eta ** 3


def eval_mode_fields(mode: RadialMode, x) -> tuple[np.ndarray, float]:
    """Displacement u and pressure-like field p = J(r_ℓ|x|/R) at a point of the closed ball."""
    x = np.asarray(x, dtype=float)
    rad = float(np.linalg.norm(x))
    if rad > mode.R * (1.0 + 1e-12):
        raise OutsideDomain(f"|x|={rad!r} exceeds R={mode.R!r}")
    eta = mode.r * rad / mode.R
    # the series only converges fast for moderate η
    small = rad < SERIES_RADIUS * mode.R and eta < 1.0
    return -_dJ_over_eta(eta, small) * x, _J(eta)


def eval_boundary_identity(mode: RadialMode, lam0: float = None, mu0: float = None) -> tuple[float, float]:
    """(λ₀+2μ₀)y(R) + 4μ₀k_b⁻¹R⁻¹y'(R) and its natural scale."""
    lam0 = mode.lam0 if lam0 is None else lam0
    mu0 = mode.mu0 if mu0 is None else mu0
    r = mode.r
    val = (lam0 + 2.0 * mu0) * _J(r) + 4.0 * mu0 * _dJ(r) / r
    scale = (lam0 + 2.0 * mu0) * abs(_J(r)) + 4.0 * mu0 * abs(_dJ(r)) / r
    return val, scale


# --- finite-difference verification ---

@dataclass(frozen=True)
class ModeReport:
    ell: int
    h: float
    residual_A: float        # Q_A u + (λ₀+⅔μ₀)k_b u, relative
    residual_B: float        # Q_B u + (4/3)μ₀k_b u, relative
    divergence: float        # ∇·u - p, relative
    helmholtz: float         # Δp + k_b p, relative
    boundary: float          # boundary identity, relative

    @property
    def max_pde(self) -> float:
        return max(self.residual_A, self.residual_B)


def _second_derivatives(fun, x: np.ndarray, h: float) -> np.ndarray:
    """d2[..., j, k] = ∂_j∂_k fun at x by central differences."""
    f0 = np.asarray(fun(x))
    d2 = np.zeros(f0.shape + (3, 3))
    I = np.eye(3) * h
    for j in range(3):
        d2[..., j, j] = (fun(x + I[j]) - 2.0 * f0 + fun(x - I[j])) / h ** 2
        for k in range(j + 1, 3):
            mixed = (fun(x + I[j] + I[k]) - fun(x + I[j] - I[k])
                     - fun(x - I[j] + I[k]) + fun(x - I[j] - I[k])) / (4.0 * h ** 2)
            d2[..., j, k] = d2[..., k, j] = mixed
    return d2


def _first_derivatives(fun, x: np.ndarray, h: float) -> np.ndarray:
    f0 = np.asarray(fun(x))
    d1 = np.zeros(f0.shape + (3,))
    I = np.eye(3) * h
    for j in range(3):
        d1[..., j] = (fun(x + I[j]) - fun(x - I[j])) / (2.0 * h)
    return d1


def sample_points(R: float, h: float, rng, count: int) -> np.ndarray:
    """Random interior points keeping the stencil inside the ball."""
    dirs = rng.normal(size=(count, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    radii = rng.uniform(0.1 * R, 0.9 * R - 2.0 * h, size=count)
    return dirs * radii[:, None]


def verify_mode(mode: RadialMode, lam0: float, mu0: float, h: float, rng=None, samples: int = 8,
                points=None) -> ModeReport:
    """Finite-difference residuals of the simultaneous eigenrelations plus the analytic boundary identity.

    Args:
        mode (RadialMode): mode to check.
        lam0, mu0 (float): moduli entering Q_A and Q_B.
        h (float): grid step, 1e-4 <= h/R <= 1e-1.
        rng: numpy Generator for the sample points (seeded default when None).
        samples (int): number of interior points.
        points: explicit sample points, overrides rng/samples.

    Returns:
        ModeReport: relative residuals, each expected O(h²) except the boundary one.
    """
    if not 1e-4 <= h / mode.R <= 1e-1:
        raise ValueError(f"h/R must lie in [1e-4, 1e-1], got {h / mode.R!r}")
    if points is None:
        rng = np.random.default_rng(0) if rng is None else rng
        points = sample_points(mode.R, h, rng, samples)

    u_fun = lambda y: eval_mode_fields(mode, y)[0]
    p_fun = lambda y: eval_mode_fields(mode, y)[1]
    kb = mode.k_b
    cA = lam0 + 2.0 * mu0 / 3.0

    res_A = res_B = ref_A = ref_B = 0.0
    res_div = res_helm = ref_p = 0.0
    for x in points:
        u, p = eval_mode_fields(mode, x)
        d2u = _second_derivatives(u_fun, x, h)             # [i, j, k] = ∂_j∂_k u_i
        grad_div = np.einsum("iji->j", d2u)                # ∂_j Σ_i ∂_i u_i
        lap_u = np.einsum("ijj->i", d2u)
        qa = cA * grad_div
        qb = mu0 * lap_u + mu0 / 3.0 * grad_div
        res_A += np.sum((qa + cA * kb * u) ** 2)
        res_B += np.sum((qb + 4.0 / 3.0 * mu0 * kb * u) ** 2)
        ref_A += np.sum((cA * kb * u) ** 2)
        ref_B += np.sum((4.0 / 3.0 * mu0 * kb * u) ** 2)

        div_u = np.trace(_first_derivatives(u_fun, x, h))
        lap_p = np.trace(_second_derivatives(p_fun, x, h))
        res_div += (div_u - p) ** 2
        res_helm += (lap_p + kb * p) ** 2
        ref_p += p ** 2

    bval, bscale = eval_boundary_identity(mode, lam0, mu0)
    return ModeReport(
        ell=mode.ell, h=h,
        residual_A=math.sqrt(res_A / ref_A),
        residual_B=math.sqrt(res_B / ref_B),
        divergence=math.sqrt(res_div / ref_p),
        helmholtz=math.sqrt(res_helm / (kb ** 2 * ref_p)),
        boundary=abs(bval) / bscale,
    )

# Prony form of the relaxation kernel and hereditary stress evaluation

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from errors import NegativeTime, NonUniformGrid, NonzeroInitialStrain
from model import EBMModel, Kind, assemble
from numerics import jacobi_eigh
from tensor_core import SymTensor3, Part, project, projector_tensors

logger = logging.getLogger(__name__)

MERGE_RTOL = 1e-10


@dataclass(frozen=True)
class RelaxationSpectrum:
    shear_rates: np.ndarray     # τ, ascending
    shear_weights: np.ndarray   # (v₀ʲ)²
    bulk_rates: np.ndarray      # κ, ascending
    bulk_weights: np.ndarray    # (q₀ʲ)²
    lam0: float
    mu0: float
    b: float

    @property
    def shear_factor(self) -> float:
        return 2.0 * self.mu0

    @property
    def bulk_factor(self) -> float:
        return 3.0 * self.lam0 + 2.0 * self.mu0


class KernelValues(NamedTuple):
    g00: float
    g00_bulk: float
    gV: float
    gS: float


def _merge(rates: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # rates ascending; coincident rates share one entry carrying the summed weight
    out_r, out_w = [rates[0]], [weights[0]]
    for r, w in zip(rates[1:], weights[1:]):
        if abs(r - out_r[-1]) <= MERGE_RTOL * max(abs(r), abs(out_r[-1])):
            total = out_w[-1] + w
            if total > 0.0:
                out_r[-1] = (out_r[-1] * out_w[-1] + r * w) / total
            out_w[-1] = total
            logger.warning("merged coincident decay rate %.17g", r)
        else:
            out_r.append(r)
            out_w.append(w)
    return np.array(out_r), np.array(out_w)


def _modes(m: EBMModel, kind: Kind) -> tuple[np.ndarray, np.ndarray]:
    eig = jacobi_eigh(assemble(m, kind).matrix)
    # eigenvalues ascending, so rates come out descending
    rates = -eig.eigenvalues[::-1]
    weights = eig.eigenvectors[0, ::-1] ** 2
    return _merge(rates, weights)


def compute_spectrum(m: EBMModel) -> RelaxationSpectrum:
    """Decay rates and weights of g₀₀ (shear) and g⁰₀₀ (bulk) from the eigen-decomposition of the mode matrices."""
    tau, w = _modes(m, Kind.SHEAR)
    kappa, q = _modes(m, Kind.BULK)
    e0 = m.maxwell
    return RelaxationSpectrum(
        shear_rates=tau, shear_weights=w,
        bulk_rates=kappa, bulk_weights=q,
        lam0=e0.lam, mu0=e0.mu, b=m.b,
    )


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise NegativeTime(f"time must be nonnegative, got {t!r}")


def _prony(rates, weights, t):
    t = np.asarray(t, dtype=float)
    g = np.tensordot(np.exp(-np.multiply.outer(t, rates)), weights, axes=([-1], [0]))
    return float(g) if g.ndim == 0 else g


def eval_kernel(s: RelaxationSpectrum, t) -> KernelValues:
    """g₀₀, g⁰₀₀ and the split G(t) = g_V·I_m + g_S·J_m at time(s) t ≥ 0."""
    _check_time(t)
    g = _prony(s.shear_rates, s.shear_weights, t)
    g0 = _prony(s.bulk_rates, s.bulk_weights, t)
    return KernelValues(g, g0, s.bulk_factor * g0, s.shear_factor * g)


def eval_kernel_rate(s: RelaxationSpectrum, t) -> tuple:
    """Time derivatives (ġ₀₀, ġ⁰₀₀)."""
    _check_time(t)
    return (_prony(s.shear_rates, -s.shear_rates * s.shear_weights, t),
            _prony(s.bulk_rates, -s.bulk_rates * s.bulk_weights, t))


def relaxation_action(s: RelaxationSpectrum, t: float, e: SymTensor3) -> SymTensor3:
    k = eval_kernel(s, t)
    return project(e, Part.VOLUMETRIC) * float(k.gV) + project(e, Part.DEVIATORIC) * float(k.gS)


def relaxation_tensor(s: RelaxationSpectrum, t: float) -> np.ndarray:
    """Full 3x3x3x3 G(t) rebuilt from the projectors."""
    k = eval_kernel(s, t)
    im, jm = projector_tensors()
    return float(k.gV) * im + float(k.gS) * jm


# --- hereditary integral ---

def _phi(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """φ1 = (1-e^-x)/x and φ2 = (x-1+e^-x)/x², series for small x."""
    x = np.asarray(x, dtype=float)
    phi1 = -np.expm1(-x) / x
    phi2 = np.empty_like(x)
    small = x < 0.1
    big = ~small
    phi2[big] = (x[big] + np.expm1(-x[big])) / x[big] ** 2
    xs = x[small]
    acc = np.zeros_like(xs)
    for k in range(12, -1, -1):
        acc = acc * (-xs) + 1.0 / math.factorial(k + 2)
    phi2[small] = acc
    return phi1, phi2


def _as_components(strains) -> np.ndarray:
    if isinstance(strains, np.ndarray) and strains.ndim == 2 and strains.shape[1] == 6:
        return strains.astype(float)
    return np.array([e.components() for e in strains])


def _vol_dev(comps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vol = np.zeros_like(comps)
    tr3 = comps[:, :3].sum(axis=1) / 3.0
    vol[:, :3] = tr3[:, None]
    return vol, comps - vol


def _check_grid(times: np.ndarray) -> float:
    if times.ndim != 1 or times.size < 2:
        raise NonUniformGrid("need at least two grid points")
    steps = np.diff(times)
    h = float(steps.mean())
    if h <= 0.0 or np.max(np.abs(steps - h)) > 1e-9 * h:
        raise NonUniformGrid("time grid must be uniform and increasing")
    return h


def _memory_displacement(rates, x_parts, h):
    # M_{k+1} = E M_k + e_k·h(φ1-φ2) + e_{k+1}·hφ2, exact for piecewise-linear e
    E = np.exp(-rates * h)
    phi1, phi2 = _phi(rates * h)
    c0, c1 = h * (phi1 - phi2), h * phi2
    out = np.zeros((x_parts.shape[0], rates.size, 6))
    M = np.zeros((rates.size, 6))
    for k in range(x_parts.shape[0] - 1):
        M = E[:, None] * M + c0[:, None] * x_parts[k] + c1[:, None] * x_parts[k + 1]
        out[k + 1] = M
    return out


def _memory_rate(rates, x_parts, h):
    # N_{k+1} = E N_k + ė_k·hφ1, ė piecewise constant
    E = np.exp(-rates * h)
    phi1, _ = _phi(rates * h)
    i0 = h * phi1
    out = np.zeros((x_parts.shape[0], rates.size, 6))
    N = np.zeros((rates.size, 6))
    for k in range(x_parts.shape[0] - 1):
        edot = (x_parts[k + 1] - x_parts[k]) / h
        N = E[:, None] * N + i0[:, None] * edot
        out[k + 1] = N
    return out


def stress_from_strain_history(s: RelaxationSpectrum, times, strains, form: str = "displacement") -> list:
    """Stress samples for a strain history sampled on a uniform grid with zero initial strain.

    Args:
        s (RelaxationSpectrum): kernel of the material.
        times: uniform increasing grid t₀..t_N.
        strains: SymTensor3 samples (or an (N+1, 6) component array), strain(t₀) = 0.
        form (str): "displacement" evaluates C₀e(t) minus the memory of e;
            "rate" convolves G with the strain rate.

    Returns:
        list[SymTensor3]: stress at every grid point.
    """
    times = np.asarray(times, dtype=float)
    h = _check_grid(times)
    comps = _as_components(strains)
    if comps.shape[0] != times.size:
        raise NonUniformGrid("strain samples and grid differ in length")
    scale = float(np.max(np.abs(comps))) if comps.size else 0.0
    if np.max(np.abs(comps[0])) > 1e-12 * scale:
        raise NonzeroInitialStrain("strain at the first grid point must vanish")

    vol, dev = _vol_dev(comps)
    if form == "displacement":
        mk = _memory_displacement(s.bulk_rates, vol, h)
        md = _memory_displacement(s.shear_rates, dev, h)
        sig = (s.bulk_factor * (vol - np.einsum("j,kjc->kc", s.bulk_rates * s.bulk_weights, mk))
               + s.shear_factor * (dev - np.einsum("j,kjc->kc", s.shear_rates * s.shear_weights, md)))
    elif form == "rate":
        nk = _memory_rate(s.bulk_rates, vol, h)
        nd = _memory_rate(s.shear_rates, dev, h)
        sig = (s.bulk_factor * np.einsum("j,kjc->kc", s.bulk_weights, nk)
               + s.shear_factor * np.einsum("j,kjc->kc", s.shear_weights, nd))
    else:
        raise ValueError(f"unknown form {form!r}")
    return [SymTensor3.from_components(row) for row in sig]

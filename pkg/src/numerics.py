# Dense numerical kernels: eigensolver, matrix exponential, polynomials, scalar roots

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import matrix_balance

from errors import NonSymmetric, NoConvergence, DegenerateLeadingCoefficient, NoSignChange

logger = logging.getLogger(__name__)

eps = np.finfo(np.float64).eps

MAX_SWEEPS = 100
REAL_SNAP = 1e-9


# --- symmetric eigensolver ---

@dataclass(frozen=True)
class EighResult:
    eigenvalues: np.ndarray    # ascending
    eigenvectors: np.ndarray   # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return v @ np.diag(self.eigenvalues) @ v.T


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(M) -> EighResult:
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi sweeps.

    Args:
        M: square symmetric matrix (symmetric to 1e-12 relative).

    Returns:
        EighResult: ascending eigenvalues and the matching orthonormal eigenvectors.
    """
    a = np.array(M, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSymmetric(f"expected a square matrix, got shape {a.shape}")
    m = a.shape[0]
    scale = float(np.linalg.norm(a))
    if np.linalg.norm(a - a.T) > 1e-12 * scale:
        raise NonSymmetric("matrix is not symmetric to 1e-12 relative")
    a = 0.5 * (a + a.T)
    v = np.eye(m)

    sweeps = 0
    while _off_norm(a) >= 1e-14 * scale and scale > 0.0:
        if sweeps == MAX_SWEEPS:
            raise NoConvergence(f"jacobi_eigh: no convergence after {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # A <- J^T A J with the (p, q) plane rotation
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq

    logger.debug("jacobi_eigh: order %d converged in %d sweeps", m, sweeps)
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return EighResult(eigenvalues=w[order], eigenvectors=v[:, order])


# --- matrix exponential ---

def expm(M, t: float = 1.0, ntaylor: int = 18) -> np.ndarray:
    """exp(tM) by scaling, a Horner-form truncated Taylor series, and repeated squaring."""
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    a = np.asarray(M, dtype=float) * t
    n = a.shape[0]
    norm = float(np.max(np.sum(np.abs(a), axis=1))) if n else 0.0
    nsquare = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    sm = a / 2.0 ** nsquare

    tc = np.ones(ntaylor + 1)
    for i in range(ntaylor):
        tc[i + 1] = tc[i] / (i + 1)
    em = np.identity(n) * tc[ntaylor]
    for i in range(ntaylor - 1, -1, -1):
        em = sm @ em
        em += np.identity(n) * tc[i]

    for _ in range(nsquare):
        em = em @ em
    return em


# --- polynomials ---

class Poly:
    """Real polynomial, coefficients in ascending degree."""

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if c.size == 0:
            c = np.zeros(1)
        self.coeffs = c

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> float:
        return float(self.coeffs[-1])

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()})"

    def __call__(self, z):
        # Horner
        acc = 0.0 * z
        for a in self.coeffs[::-1]:
            acc = acc * z + a
        return acc

    def abs_eval(self, z) -> float:
        """Σ|p_k||z|^k, the natural scale of |p(z)|."""
        return float(Poly(np.abs(self.coeffs))(abs(z)))

    def norm1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def deriv(self) -> "Poly":
        if self.degree == 0:
            return Poly([0.0])
        return Poly(self.coeffs[1:] * np.arange(1, self.coeffs.size))

    def trim(self) -> "Poly":
        c = self.coeffs
        k = c.size
        while k > 1 and c[k - 1] == 0.0:
            k -= 1
        return Poly(c[:k])

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self), len(other))
        out = np.zeros(n)
        out[:len(self)] += self.coeffs
        out[:len(other)] += other.coeffs
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + other * -1.0

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return poly_mul(self, other)
        return Poly(self.coeffs * float(other))

    __rmul__ = __mul__

    def shift(self, k: int) -> "Poly":
        """Multiply by z**k."""
        return Poly(np.concatenate([np.zeros(k), self.coeffs]))

    def divide_linear(self, r: complex):
        """Synthetic division by (z - r); returns (quotient coefficients, remainder)."""
        c = self.coeffs.astype(complex) if isinstance(r, complex) else self.coeffs
        n = c.size - 1
        q = np.zeros(n, dtype=c.dtype)
        acc = c[-1]
        for k in range(n - 1, -1, -1):
            q[k] = acc
            acc = c[k] + acc * r
        return q, acc


def poly_mul(p: Poly, q: Poly) -> Poly:
    """Product with compensated summation of each output coefficient."""
    a, b = p.coeffs, q.coeffs
    out = np.zeros(a.size + b.size - 1)
    for k in range(out.size):
        lo, hi = max(0, k - b.size + 1), min(k, a.size - 1)
        out[k] = math.fsum(a[i] * b[k - i] for i in range(lo, hi + 1))
    return Poly(out)


def poly_sum(polys) -> Poly:
    """Coefficientwise compensated sum of several polynomials."""
    polys = list(polys)
    n = max(len(p) for p in polys)
    cols = [[p.coeffs[k] for p in polys if k < len(p)] for k in range(n)]
    return Poly([math.fsum(col) for col in cols])


def poly_from_roots(roots, leading: float = 1.0) -> Poly:
    """Polynomial leading·Π(z - r). Complex roots must come in conjugate pairs."""
    c = np.array([1.0 + 0j])
    for r in roots:
        nxt = np.zeros(c.size + 1, dtype=complex)
        nxt[1:] += c
        nxt[:-1] -= r * c
        c = nxt
    return Poly(leading * c.real)


def _snap(z: complex) -> complex:
    if abs(z.imag) < REAL_SNAP * (1.0 + abs(z.real)):
        return complex(z.real, 0.0)
    return z


def _polish(p: Poly, dp: Poly, z: complex, steps: int = 3) -> complex:
    # Newton on the original coefficients, accepting only improving steps
    best, fbest = z, abs(p(z))
    for _ in range(steps):
        d = dp(best)
        if d == 0 or fbest == 0.0:
            break
        cand = best - p(best) / d
        fc = abs(p(cand))
        if not fc < fbest:
            break
        best, fbest = cand, fc
    return best


def newton_polish(p: Poly, z: complex, steps: int = 3) -> complex:
    return _polish(p, p.deriv(), z, steps)


def root_sort_key(z: complex):
    return (-z.real, z.imag)


def poly_roots(p: Poly) -> list:
    """All complex roots of p.

    The companion matrix of the monic polynomial is balanced, its eigenvalues
    are polished by Newton steps on p itself, and roots whose imaginary part is
    below 1e-9·(1+|re|) are reported as real (imaginary part exactly zero).
    Roots are returned sorted by descending real part.
    """
    c = p.coeffs
    if p.degree < 1 or c[-1] == 0.0 or not np.all(np.isfinite(c)):
        raise DegenerateLeadingCoefficient(f"cannot root {p!r}")

    # exact zero roots from vanishing low coefficients
    nz = 0
    while c[nz] == 0.0:
        nz += 1
    roots = [0j] * nz
    rest = c[nz:]
    m = rest.size - 1
    if m >= 1:
        monic = rest / rest[-1]
        comp = np.zeros((m, m))
        comp[1:, :-1] = np.eye(m - 1)
        comp[:, -1] = -monic[:-1]
        with warnings.catch_warnings():
            # matrix_balance warns on companions that need no scaling
            warnings.simplefilter("ignore", RuntimeWarning)
            bal, _ = matrix_balance(comp, permute=False)
        dp = p.deriv()
        for z in np.linalg.eigvals(bal):
            z = _snap(complex(z))
            if z.imag == 0.0:
                z = complex(_polish(p, dp, z.real).real, 0.0)
            else:
                z = _snap(complex(_polish(p, dp, z)))
            roots.append(z)
    return sorted(roots, key=root_sort_key)


# --- scalar roots ---

def brent_root(f: Callable[[float], float], a: float, b: float, tol: float = 1e-13,
               args: tuple = (), maxiter: int = 500) -> float:
    """Zero of f inside [a, b] by Brent's method.

    Args:
        f: continuous scalar function, called as f(x, *args).
        a, b: bracket with f(a)·f(b) < 0.
        tol: relative tolerance on the root.

    Returns:
        float: the root, always inside [a, b]. The converged bracket is bisected
        down to adjacent doubles and the end with the smaller |f| is returned.
    """
    fa = f(a, *args)
    fb = f(b, *args)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if not fa * fb < 0.0:
        raise NoSignChange(f"no sign change on [{a!r}, {b!r}]: f(a)={fa!r}, f(b)={fb!r}")
    t = tol * max(abs(a), abs(b)) * 0.5
    c, fc = a, fa
    e = d = b - a

    for _ in range(maxiter):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb

        tol1 = 2.0 * eps * abs(b) + t
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return _closest_end(f, args, b, fb, c, fc)

        if abs(e) < tol1 or abs(fa) <= abs(fb):
            e = d = m
        else:
            s = fb / fa
            if a == c:
                pp = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                pp = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if pp > 0.0:
                q = -q
            else:
                pp = -pp
            s, e = e, d
            if 2.0 * pp < 3.0 * m * q - abs(tol1 * q) and pp < abs(0.5 * s * q):
                d = pp / q
            else:
                e = d = m

        a, fa = b, fb
        if abs(d) > tol1:
            b += d
        else:
            b += tol1 if m > 0.0 else -tol1
        fb = f(b, *args)
        if (fb > 0.0 and fc > 0.0) or (fb <= 0.0 and fc <= 0.0):
            c, fc = a, fa
            e = d = b - a

    raise NoConvergence(f"brent_root: no convergence in {maxiter} iterations")


def _closest_end(f, args, b, fb, c, fc) -> float:
    # fb and fc have opposite signs unless fb == 0
    if fb == 0.0:
        return b
    for _ in range(64):
        mid = 0.5 * (b + c)
        if mid == b or mid == c:
            break
        fm = f(mid, *args)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fb > 0.0):
            b, fb = mid, fm
        else:
            c, fc = mid, fm
    return b if abs(fb) <= abs(fc) else c


# --- characteristic polynomial ---

def char_poly_of_matrix(M) -> Poly:
    """Monic det(zI - M) by Faddeev-LeVerrier on a power-of-two rescaled copy of M."""
    h = np.asarray(M, dtype=float)
    n = h.shape[0]
    if n > 64:
        raise ValueError("char_poly_of_matrix supports order <= 64")
    amax = float(np.max(np.abs(h))) if n else 0.0
    s = 2.0 ** round(math.log2(amax)) if amax > 0.0 else 1.0
    b = h / s

    # poly[k] is the coefficient of z^(n-k)
    poly = [1.0]
    mk = np.zeros((n, n))
    for k in range(n):
        mk = b @ mk + poly[-1] * np.eye(n)
        poly.append(-float(np.trace(b @ mk)) / (k + 1))

    desc = np.array(poly) * s ** np.arange(n + 1)
    return Poly(desc[::-1])

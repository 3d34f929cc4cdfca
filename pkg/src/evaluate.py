import os
import math
import asyncio
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import matrix_balance

from ball_modes import RadialMode, eval_f, sample_points, solve_mode, verify_mode
from config import DEFAULT_SEED, OUT_DIR
from errors import EBMError, OrderingViolation, UsageError
from inversion import ClusterData, invert_known_c, self_consistent_invert
from model import EBMModel, Element, Kind, assemble, assemble_unsymmetrized_shear
from numerics import Poly, char_poly_of_matrix, expm, jacobi_eigh, poly_from_roots, poly_roots
from relaxation import compute_spectrum, eval_kernel, eval_kernel_rate
from spectrum import (
    augmented_matrix, build_prony, char_poly_ell, cluster_roots, limit_poly, limit_roots, secular,
)

# pinned reference values (λ₀=2, μ₀=1, η=1, R=1)
R1_REFERENCE = 2.7437072699922691
C1_REFERENCE = 0.13283864958088898
N0_REAL_ROOT = -5.6072677763015752
N0_EXTRA_ROOT = complex(-2.1963661118492124, 4.0812336846213979)
N1_G00_AT_1 = 0.13260297879883981
N1_G00_BULK_AT_1 = 0.013014920788763059


@dataclass
class PropertyResult:
    name: str
    cases: int = 0
    worst: float = 0.0            # largest observed error / allowed error
    worst_error: float = 0.0
    worst_tolerance: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def observe(self, err: float, tol: float, label: str):
        ratio = err / tol if math.isfinite(err) else math.inf
        if ratio > self.worst or not math.isfinite(ratio):
            self.worst, self.worst_error, self.worst_tolerance = ratio, err, tol
        if not ratio <= 1.0:
            self.failures.append(f"{label}: {err:.3e} > {tol:.1e}")

    def require(self, ok: bool, label: str):
        if not ok:
            self.failures.append(label)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name:<20} {status}  cases={self.cases:<5} "
                f"worst={self.worst_error:.3e} (tol {self.worst_tolerance:.1e})")


# --- random models ---

def random_model(rng, n_max: int = 5) -> EBMModel:
    """Moduli and viscosities uniform in [0.1, 10], n uniform in 0..n_max."""
    n = int(rng.integers(0, n_max + 1))
    elements = [Element(rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0))
                for _ in range(n + 1)]
    return EBMModel(R=float(rng.uniform(0.5, 2.0)), elements=tuple(elements))


def _gap_ratio(beta: np.ndarray) -> float:
    return float(np.min(beta[1:] / beta[:-1]))


def random_ordered_model(rng, n_max: int = 4, min_gap: float = 1.05, max_spread: float = 1e3,
                         max_tries: int = 1000) -> EBMModel:
    """Model whose shear rates all lie below its bulk rates, adjacent rates at least min_gap apart.

    Kelvin-Voigt rates 2μᵢ/ηᵢ grow geometrically by a factor in [1.6, 2], each
    μ₀/μᵢ is drawn in [0.15, 0.5] and the Maxwell rate 2μ₀/η₀ sits near their
    geometric mean. The shear matrix depends on μ and η only, so its rate spread
    is known before the bulk moduli are chosen: every element gets 3λ+2μ equal
    to 2μ times a factor just above that spread, which lifts the bulk rates
    clear of the shear rates. Candidates are rejected until the junction gap
    holds and β spans at most max_spread.
    """
    for _ in range(max_tries):
        n = int(rng.integers(0, n_max + 1))
        mu0 = rng.uniform(0.5, 2.0)
        rates = rng.uniform(0.5, 2.0) * rng.uniform(1.6, 2.0) ** np.arange(n)
        mu = np.concatenate([[mu0], mu0 / rng.uniform(0.15, 0.5, n)])
        centre = float(np.exp(np.mean(np.log(rates)))) if n else rng.uniform(0.5, 2.0)
        eta0 = 2.0 * mu0 / (centre * rng.uniform(0.5, 2.0))
        eta = np.concatenate([[eta0], 2.0 * mu[1:] / rates])
        shear_only = EBMModel(R=1.0, elements=tuple(Element(m, m, e) for m, e in zip(mu, eta)))
        tau = -jacobi_eigh(assemble(shear_only, Kind.SHEAR).matrix).eigenvalues
        spread = float(tau.max() / tau.min())
        s = spread * rng.uniform(1.25, 1.6) * rng.uniform(1.0, 1.1, n + 1)
        lam = (s - 1.0) * 2.0 * mu / 3.0
        model = EBMModel(R=float(rng.uniform(0.5, 2.0)),
                         elements=tuple(Element(l, m, e) for l, m, e in zip(lam, mu, eta)))
        try:
            pair = build_prony(model, compute_spectrum(model))
        except EBMError:
            continue
        if _gap_ratio(pair.beta) >= min_gap and pair.beta[-1] / pair.beta[0] <= max_spread:
            return model
    raise RuntimeError("random_ordered_model: rejection sampling exhausted")


def reference_model(n: int = 0) -> EBMModel:
    return EBMModel(R=1.0, elements=tuple(Element(2.0, 1.0, 1.0) for _ in range(n + 1)))


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


# --- suites ---

def kernel_oracle(rng, cases: int) -> PropertyResult:
    res = PropertyResult("kernel_oracle", cases)
    for i in range(cases):
        m = random_model(rng)
        s = compute_spectrum(m)
        Ls, Lb = assemble(m, Kind.SHEAR).matrix, assemble(m, Kind.BULK).matrix
        for t in (0.0, 0.1, 1.0, 10.0):
            k = eval_kernel(s, t)
            err = max(abs(k.g00 - expm(Ls, t)[0, 0]), abs(k.g00_bulk - expm(Lb, t)[0, 0]))
            res.observe(err, 1e-10, f"case {i} t={t}")
    return res


def normalization(rng, cases: int) -> PropertyResult:
    res = PropertyResult("normalization", cases)
    grid = np.arange(0.0, 5.0 + 1e-12, 0.1)
    for i in range(cases):
        m = random_model(rng)
        e0 = m.maxwell
        for kind in Kind:
            L = assemble(m, kind).matrix
            res.require(np.array_equal(L, L.T), f"case {i} {kind.value}: not symmetric")
            res.require(bool(np.all(jacobi_eigh(L).eigenvalues < 0.0)), f"case {i} {kind.value}: not negative definite")
        s = compute_spectrum(m)
        res.require(bool(np.all(s.shear_rates > 0.0) and np.all(s.bulk_rates > 0.0)), f"case {i}: nonpositive rate")
        res.observe(abs(s.shear_weights.sum() - 1.0), 1e-12, f"case {i} shear weights")
        res.observe(abs(s.bulk_weights.sum() - 1.0), 1e-12, f"case {i} bulk weights")
        first_shear = 2.0 * m.b * e0.mu
        first_bulk = m.b * (3.0 * e0.lam + 2.0 * e0.mu)
        res.observe(abs(math.fsum(s.shear_rates * s.shear_weights) - first_shear) / s.shear_rates.max(),
                    1e-12, f"case {i} shear first moment")
        res.observe(abs(math.fsum(s.bulk_rates * s.bulk_weights) - first_bulk) / s.bulk_rates.max(),
                    1e-12, f"case {i} bulk first moment")
        dg, _ = eval_kernel_rate(s, 0.0)
        res.observe(abs(dg + first_shear) / s.shear_rates.max(), 1e-12, f"case {i} kernel slope at 0")

        L1, L1s = assemble_unsymmetrized_shear(m), assemble(m, Kind.SHEAR).matrix
        for t in (0.1, 1.0, 5.0):
            ref = expm(L1s, t)[0, 0]
            res.observe(abs(expm(L1, t)[0, 0] - ref), 1e-10 * abs(ref) + 1e-14, f"case {i} similarity t={t}")

        g = eval_kernel(s, grid).g00
        live = g > 1e-200
        d1, d2 = np.diff(g), np.diff(g, 2)
        res.require(bool(np.all(g[live] > 0.0)), f"case {i}: kernel not positive")
        res.require(bool(np.all(d1[live[1:]] < 0.0)), f"case {i}: kernel not decreasing")
        res.require(bool(np.all(d2[live[2:]] > 0.0)), f"case {i}: kernel not convex")
    return res


def boundary_roots(rng, cases: int) -> PropertyResult:
    res = PropertyResult("boundary_roots", cases + 1)
    res.observe(abs(solve_mode(2.0, 1.0, 1.0, 1).r - R1_REFERENCE), 1e-12, "reference r1")
    moduli = [(2.0, 1.0)] + [(rng.uniform(0.1, 10.0), rng.uniform(0.1, 10.0)) for _ in range(cases)]
    for lam, mu in moduli:
        prev = 0.0
        for ell in range(1, 51):
            r = solve_mode(lam, mu, 1.0, ell).r
            res.require((ell - 0.5) * math.pi < r < ell * math.pi, f"({lam:.3g},{mu:.3g}) ell={ell}: outside bracket")
            res.require(r > prev, f"({lam:.3g},{mu:.3g}) ell={ell}: not increasing")
            res.observe(abs(eval_f(lam, mu, r)), 1e-10 * (lam + 2.0 * mu) * r * r, f"({lam:.3g},{mu:.3g}) ell={ell}")
            prev = r
        far = solve_mode(lam, mu, 1.0, 10_000).r
        res.require(abs(far - 10_000 * math.pi) < math.pi / 2, f"({lam:.3g},{mu:.3g}): ell=1e4 root drifts")
    return res


def eigenfunction(rng, cases: int) -> PropertyResult:
    res = PropertyResult("eigenfunction", cases)
    lam, mu = 2.0, 1.0
    for ell in range(1, cases + 1):
        mode = solve_mode(lam, mu, 1.0, ell)
        # same points for both steps, placed for the coarser stencil
        points = sample_points(mode.R, 1e-2, rng, 8)
        coarse = verify_mode(mode, lam, mu, 1e-2, points=points)
        fine = verify_mode(mode, lam, mu, 5e-3, points=points)
        for key in ("residual_A", "residual_B", "divergence", "helmholtz"):
            order = math.log2(getattr(coarse, key) / getattr(fine, key))
            res.require(order >= 1.9, f"ell={ell} {key}: observed order {order:.2f}")
        res.observe(coarse.boundary, 1e-10, f"ell={ell} boundary")
        if ell == 1:
            res.observe(verify_mode(mode, lam, mu, 1e-3).max_pde, 1e-4, "ell=1 h=1e-3 residual")
            off = RadialMode(ell=1, r=mode.r + 0.1, lam0=lam, mu0=mu, R=1.0)
            res.require(verify_mode(off, lam, mu, 1e-2).boundary > 1e-2, "perturbed root passes the boundary check")
    return res


def _ordered_clusters(rng, cases: int, n_max: int, min_gap: float):
    for i in range(cases):
        m = random_ordered_model(rng, n_max, min_gap)
        yield i, m, build_prony(m, compute_spectrum(m))


def interlacing(rng, cases: int) -> PropertyResult:
    res = PropertyResult("interlacing", cases)
    for i, m, pair in _ordered_clusters(rng, cases, 4, 1.05):
        e0 = m.maxwell
        beta = pair.beta
        for ell in (1, 2, 5):
            label = f"case {i} n={m.n} ell={ell}"
            try:
                cs = cluster_roots(pair, solve_mode(e0.lam, e0.mu, m.R, ell))
            except EBMError as e:
                res.require(False, f"{label}: {e.code}: {e.message}")
                continue
            a = cs.real_roots
            res.require(a.size == 2 * m.n + 2 and a[0] == 0.0, f"{label}: wrong real root count")
            for j in range(1, a.size):
                res.require(-beta[j] < a[j] < -beta[j - 1], f"{label}: a[{j}] outside (-beta[{j}], -beta[{j - 1}])")
                res.observe(abs(secular(pair, cs.c, a[j])), 1e-8 * pair.D, f"{label} secular a[{j}]")
            for z in cs.extra_roots:
                if z.imag != 0.0:
                    res.require(-beta[-1] / 2 < z.real < -beta[0] / 2, f"{label}: complex extra root {z!r} out of band")
                else:
                    res.require(-beta[-1] < z.real < 0.0, f"{label}: real extra root {z!r} out of band")
            res.observe(cs.residual, 1e-9, f"{label} residual")
    return res


def _match_roots(found, expected) -> float:
    """Largest distance, relative to 1+|z|, from each expected root to the closest unused found root."""
    pool = list(found)
    worst = 0.0
    for z in expected:
        k = min(range(len(pool)), key=lambda j: abs(pool[j] - z))
        worst = max(worst, abs(pool.pop(k) - z) / (1.0 + abs(z)))
    return worst


def _balanced(A: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return matrix_balance(A, permute=False)[0]


def structural(rng, cases: int) -> PropertyResult:
    res = PropertyResult("structural", cases)
    for i, m, pair in _ordered_clusters(rng, cases, 4, 1.05):
        e0 = m.maxwell
        polys = {}
        for ell in (1, 2, 5):
            label = f"case {i} n={m.n} ell={ell}"
            mode = solve_mode(e0.lam, e0.mu, m.R, ell)
            A = augmented_matrix(pair, mode).matrix
            # balancing is a similarity, det(zI - A) is unchanged
            chi = Poly(char_poly_of_matrix(_balanced(A)).coeffs * mode.c)
            eig = np.array(poly_roots(chi))
            P = char_poly_ell(pair, mode.c)
            polys[ell] = (mode.c, P)
            # c·det(zI - A) against P, coefficient k measured on the scale c·Π(z+|λ|)
            scale = poly_from_roots(-np.abs(eig), leading=mode.c)
            res.observe(abs(chi[0]), 1e-9 * scale[1] * pair.beta[0], f"{label} constant term")
            for k in range(1, len(P)):
                res.observe(abs(chi[k] - P[k]), 1e-9 * scale[k], f"{label} coefficient {k}")
            try:
                cs = cluster_roots(pair, mode)
            except EBMError as e:
                res.require(False, f"{label}: {e.code}: {e.message}")
                continue
            res.observe(_match_roots(eig, cs.all_roots), 1e-8, f"{label} eigenvalues")
            res.require(bool(np.all(eig.real <= 1e-10 * np.abs(eig).max())), f"{label}: eigenvalue with positive real part")
        (c1, p1), (c2, p2) = polys[1], polys[2]
        prod = poly_from_roots(-pair.beta)
        full = prod.shift(2)
        for k in range(len(p1)):
            err = abs((p1[k] - p2[k]) - (c1 - c2) * full[k])
            size = pair.D * abs(prod[k]) if k < len(prod) else 0.0
            size += (c1 + c2) * abs(full[k]) + abs(p1[k]) + abs(p2[k])
            res.observe(err, 1e-12 * size + 1e-300, f"case {i} difference coefficient {k}")
    return res


def reference(rng, cases: int) -> PropertyResult:
    """Pinned values of the n=0 and n=1 reference models (λ=2, μ=1, η=1 in every element, R=1)."""
    res = PropertyResult("reference", 1)
    m0, m1 = reference_model(0), reference_model(1)

    res.observe(abs(eval_f(2.0, 1.0, math.pi / 2) - (math.pi ** 2 - 4.0)), 1e-13, "f(pi/2)")
    res.observe(abs(eval_f(2.0, 1.0, math.pi) + 4.0 * math.pi), 1e-13, "f(pi)")
    mode1 = solve_mode(2.0, 1.0, 1.0, 1)
    res.observe(abs(mode1.r - R1_REFERENCE), 1e-12, "r1")
    res.observe(abs(mode1.c - C1_REFERENCE) / C1_REFERENCE, 1e-12, "c1")

    s0 = compute_spectrum(m0)
    res.observe(abs(eval_kernel(s0, 1.0).g00 - math.exp(-2.0)), 1e-15, "n=0 g00(1)")
    pair = build_prony(m0, s0)
    res.observe(_rel(pair.beta, [2.0, 8.0]), 1e-14, "n=0 beta")
    res.observe(_rel(pair.alpha, [8.0 / 3.0, 64.0 / 3.0]), 1e-14, "n=0 alpha")
    res.observe(abs(pair.D - 4.0), 1e-15, "n=0 D")
    res.observe(np.max(np.abs(limit_poly(pair).coeffs - [0.0, 16.0, 4.0])), 1e-13, "n=0 limit polynomial")
    res.observe(np.max(np.abs(limit_roots(pair) - [0.0, -4.0])), 1e-13, "n=0 limit roots")

    cs = cluster_roots(pair, mode1)
    res.observe(abs(cs.real_roots[1] - N0_REAL_ROOT) / abs(N0_REAL_ROOT), 1e-12, "n=0 ell=1 real root")
    upper = max(cs.extra_roots, key=lambda z: z.imag)
    res.observe(abs(upper - N0_EXTRA_ROOT) / abs(N0_EXTRA_ROOT), 1e-12, "n=0 ell=1 extra root")
    A = augmented_matrix(pair, mode1).matrix
    chi = char_poly_of_matrix(A).coeffs * mode1.c
    P = char_poly_ell(pair, mode1.c)
    res.observe(np.max(np.abs(chi - P.coeffs)) / P.norm1(), 1e-12, "n=0 augmented characteristic polynomial")

    s1 = compute_spectrum(m1)
    tau = np.array([0.76393202250021019, 5.2360679774997898])
    w = np.array([0.27639320225002101, 0.72360679774997894])
    res.observe(_rel(s1.shear_rates, tau), 1e-13, "n=1 shear rates")
    res.observe(_rel(s1.bulk_rates, 4.0 * tau), 1e-13, "n=1 bulk rates")
    res.observe(np.max(np.abs(s1.shear_weights - w)), 1e-13, "n=1 shear weights")
    res.observe(np.max(np.abs(s1.bulk_weights - w)), 1e-13, "n=1 bulk weights")
    k1 = eval_kernel(s1, 1.0)
    res.observe(abs(k1.g00 - N1_G00_AT_1) / N1_G00_AT_1, 1e-13, "n=1 g00(1)")
    res.observe(abs(k1.g00_bulk - N1_G00_BULK_AT_1) / N1_G00_BULK_AT_1, 1e-13, "n=1 bulk g00(1)")
    try:
        build_prony(m1, s1)
        res.require(False, "n=1 reference: overlapping shear and bulk rates were accepted")
    except OrderingViolation:
        pass

    d1 = ClusterData.from_spectrum(cs)
    d2 = ClusterData.from_spectrum(cluster_roots(pair, solve_mode(2.0, 1.0, 1.0, 2)))
    inv = invert_known_c(d1, d2)
    res.observe(max(abs(inv.mu0 - 1.0), abs(inv.lam0 - 2.0) / 2.0), 1e-10, "n=0 inversion moduli")
    return res


def _truth(m: EBMModel):
    s = compute_spectrum(m)
    return build_prony(m, s), s


def _inversion_error(result, pair, s) -> float:
    e0 = s.mu0, s.lam0
    return max(
        abs(result.D - pair.D) / pair.D,
        _rel(result.alpha, pair.alpha),
        _rel(result.beta, pair.beta),
        abs(result.mu0 - e0[0]) / e0[0],
        abs(result.lam0 - e0[1]) / abs(e0[1]),
        _rel(result.shear_weights, s.shear_weights),
        _rel(result.bulk_weights, s.bulk_weights),
    )


def _forward_pair(m: EBMModel, pair, ells=(1, 2)):
    e0 = m.maxwell
    return [ClusterData.from_spectrum(cluster_roots(pair, solve_mode(e0.lam, e0.mu, m.R, ell))) for ell in ells]


def round_trip(rng, cases: int) -> PropertyResult:
    res = PropertyResult("round_trip", cases)
    for i in range(cases):
        m = random_ordered_model(rng, 3, 1.2)
        pair, s = _truth(m)
        label = f"case {i} n={m.n}"
        try:
            d1, d2 = _forward_pair(m, pair)
            known = invert_known_c(d1, d2)
            res.observe(_inversion_error(known, pair, s), 1e-6, f"{label} known-c")
            res.observe(known.fit_residual, 1e-9, f"{label} known-c fit")
            sc = self_consistent_invert(d1.roots, d2.roots, 1, 2, m.R)
            res.observe(_inversion_error(sc, pair, s), 1e-5, f"{label} self-consistent")
            res.observe(sc.fit_residual, 1e-7, f"{label} self-consistent fit")
        except EBMError as e:
            res.require(False, f"{label}: {e.code}: {e.message}")
    return res


def limit_convergence(rng, cases: int) -> PropertyResult:
    res = PropertyResult("limit_convergence", cases)
    for i in range(cases):
        m = random_ordered_model(rng, 3, 1.2)
        pair, _ = _truth(m)
        e0 = m.maxwell
        label = f"case {i} n={m.n}"
        try:
            lim = limit_roots(pair)
            res.observe(_match_roots(poly_roots(limit_poly(pair)), lim), 1e-8, f"{label} limit roots")
            errs, cs_ = [], []
            for ell in (10, 100, 1000):
                cs = cluster_roots(pair, solve_mode(e0.lam, e0.mu, m.R, ell))
                errs.append(float(np.max(np.abs(cs.real_roots - lim))))
                cs_.append(cs.c)
        except EBMError as e:
            res.require(False, f"{label}: {e.code}: {e.message}")
            continue
        res.require(errs[0] > errs[1] > errs[2], f"{label}: distance to the limit roots is not decreasing {errs}")
        # linear in c once c is small
        q_mid, q_far = errs[1] / cs_[1], errs[2] / cs_[2]
        res.require(0.5 <= q_far / q_mid <= 2.0, f"{label}: distance/c ratio {q_far / q_mid:.3g}")
    return res


def scale_equivariance(rng, cases: int) -> PropertyResult:
    """Moduli times s with η fixed: rates and D scale by s, strengths by s², weights stay, inversion commutes."""
    res = PropertyResult("scale_equivariance", cases)
    for i in range(cases):
        m = random_ordered_model(rng, 3, 1.2)
        factor = float(np.exp(rng.uniform(math.log(0.1), math.log(10.0))))
        label = f"case {i} s={factor:.3g}"
        pair, s = _truth(m)
        pair_s, s_s = _truth(m.scaled(factor))
        res.observe(_rel(pair_s.beta, factor * pair.beta), 1e-10, f"{label} beta")
        res.observe(_rel(pair_s.alpha, factor ** 2 * pair.alpha), 1e-10, f"{label} alpha")
        res.observe(abs(pair_s.D - factor * pair.D) / (factor * pair.D), 1e-14, f"{label} D")
        res.observe(_rel(s_s.shear_weights, s.shear_weights), 1e-10, f"{label} shear weights")
        res.observe(_rel(s_s.bulk_weights, s.bulk_weights), 1e-10, f"{label} bulk weights")
        try:
            base = invert_known_c(*_forward_pair(m, pair))
            scaled = invert_known_c(*_forward_pair(m.scaled(factor), pair_s))
        except EBMError as e:
            res.require(False, f"{label}: {e.code}: {e.message}")
            continue
        err = max(
            _rel(scaled.beta, factor * base.beta),
            _rel(scaled.alpha, factor ** 2 * base.alpha),
            abs(scaled.mu0 - factor * base.mu0) / (factor * base.mu0),
            abs(scaled.lam0 - factor * base.lam0) / abs(factor * base.lam0),
            _rel(scaled.shear_weights, base.shear_weights),
            _rel(scaled.bulk_weights, base.bulk_weights),
        )
        res.observe(err, 1e-8, f"{label} inversion")
    return res


# (suite, default case count, honours --cases)
SUITES = {
    "kernel_oracle": (kernel_oracle, 1000, True),
    "normalization": (normalization, 1000, True),
    "boundary_roots": (boundary_roots, 20, True),
    "eigenfunction": (eigenfunction, 10, False),
    "interlacing": (interlacing, 500, True),
    "structural": (structural, 500, True),
    "reference": (reference, 1, False),
    "round_trip": (round_trip, 200, True),
    "limit_convergence": (limit_convergence, 20, True),
    "scale_equivariance": (scale_equivariance, 50, True),
}


async def _inline(fn, *args):
    return fn(*args)


async def run_suites(seed: int = DEFAULT_SEED, cases=None, only=(), run_blocking=None) -> list[PropertyResult]:
    '''Runs the selected suites concurrently; suite k draws from its own stream seeded by (seed, k)'''
    unknown = [name for name in only if name not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    run = run_blocking or _inline
    tasks = []
    for idx, (name, (fn, default, scalable)) in enumerate(SUITES.items()):
        if only and name not in only:
            continue
        rng = np.random.default_rng([seed, idx])
        count = cases if (cases is not None and scalable) else default
        tasks.append(run(fn, rng, count))
    return list(await asyncio.gather(*tasks))


def write_report(results: list, path: str, seed: int):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write("=" * 80 + "\n")
        f.write(f"PROPERTY REPORT (seed {seed})\n")
        f.write("=" * 80 + "\n\n")
        for r in results:
            f.write(r.summary() + "\n")
            for line in r.failures[:20]:
                f.write(f"    {line}\n")
            if len(r.failures) > 20:
                f.write(f"    ... {len(r.failures) - 20} more\n")
        passed = sum(r.passed for r in results)
        f.write(f"\n{passed}/{len(results)} properties passed\n")


def main():
    results = asyncio.run(run_suites())
    path = os.path.join(OUT_DIR, "verify_report.txt")
    write_report(results, path, DEFAULT_SEED)
    for r in results:
        print(r.summary())
    print(f"\nReport written to {path}")


if __name__ == "__main__":
    main()

import asyncio
from types import SimpleNamespace

import numpy as np
import pytest

from errors import UsageError
from evaluate import (
    SUITES, PropertyResult, _inversion_error, random_model, random_ordered_model, run_suites, write_report,
)
from model import validate
from relaxation import compute_spectrum
from spectrum import build_prony


def test_random_model_is_valid(rng):
    for _ in range(20):
        m = random_model(rng)
        assert validate(m) == []
        assert 0 <= m.n <= 5


def test_random_ordered_model_respects_gap(rng):
    for _ in range(10):
        m = random_ordered_model(rng, n_max=3, min_gap=1.2)
        pair = build_prony(m, compute_spectrum(m))
        assert np.min(pair.beta[1:] / pair.beta[:-1]) >= 1.2
        assert 0.5 <= m.R <= 2.0


def test_random_ordered_model_keeps_rates_compact(rng):
    for _ in range(20):
        m = random_ordered_model(rng, n_max=4, min_gap=1.05)
        s = compute_spectrum(m)
        pair = build_prony(m, s)
        assert pair.beta[-1] / pair.beta[0] <= 1e3
        # bulk rates clear the shear rates by the per-element modulus factor
        assert s.bulk_rates.min() >= 1.25 * s.shear_rates.max() * (1.0 - 1e-12)


def test_property_result_tracks_worst():
    res = PropertyResult("demo", cases=2)
    res.observe(1e-12, 1e-10, "a")
    res.observe(5e-11, 1e-10, "b")
    assert res.passed
    assert res.worst_error == 5e-11
    res.observe(2e-10, 1e-10, "c")
    res.require(False, "d")
    assert not res.passed
    assert len(res.failures) == 2
    assert "FAIL" in res.summary()


@pytest.mark.parametrize(
    "name, cases",
    [
        ("kernel_oracle", 20),
        ("normalization", 20),
        ("interlacing", 5),
        ("structural", 5),
        ("round_trip", 5),
        ("limit_convergence", 3),
        ("scale_equivariance", 5),
        ("reference", 1),
    ]
)
def test_suite_passes_on_small_sample(name, cases):
    fn, _, _ = SUITES[name]
    res = fn(np.random.default_rng([7, 1]), cases)
    assert res.passed, res.failures[:5]


def test_eigenfunction_suite_first_modes():
    fn, _, _ = SUITES["eigenfunction"]
    res = fn(np.random.default_rng(3), 3)
    assert res.passed, res.failures


def test_run_suites_is_reproducible():
    first = asyncio.run(run_suites(11, 5, ("kernel_oracle", "round_trip")))
    second = asyncio.run(run_suites(11, 5, ("kernel_oracle", "round_trip")))
    assert [r.name for r in first] == ["kernel_oracle", "round_trip"]
    assert [r.worst_error for r in first] == [r.worst_error for r in second]


def test_run_suites_rejects_unknown_names():
    with pytest.raises(UsageError):
        asyncio.run(run_suites(1, 1, ("nope",)))


def test_report(tmp_path):
    results = [PropertyResult("a", 1), PropertyResult("b", 1)]
    results[1].require(False, "broken")
    path = str(tmp_path / "report.txt")
    write_report(results, path, 5)
    text = open(path).read()
    assert "seed 5" in text
    assert "broken" in text
    assert "1/2 properties passed" in text


def test_inversion_error_weighs_small_weights_relatively(ordered_n2):
    s = compute_spectrum(ordered_n2)
    pair = build_prony(ordered_n2, s)
    exact = SimpleNamespace(D=pair.D, alpha=pair.alpha, beta=pair.beta, mu0=s.mu0, lam0=s.lam0,
                            shear_weights=s.shear_weights.copy(), bulk_weights=s.bulk_weights.copy())
    assert _inversion_error(exact, pair, s) == 0.0
    k = int(np.argmin(s.shear_weights))
    exact.shear_weights[k] *= 1.0 + 1e-4
    assert _inversion_error(exact, pair, s) == pytest.approx(1e-4, rel=1e-6)

import math
from fractions import Fraction

import numpy as np
import pytest

from entropy_lab import analysis
from entropy_lab.analysis import (
    BlockFamily,
    FitError,
    ScanRecord,
    ScanSeries,
    central_charge_fit,
    envelope_exponent,
    error_scan,
    fit_error_law,
    frequency_candidates,
    maximize_geometric_factor,
    nu0,
)
from entropy_lab.asymptotics import geometric_factor
from entropy_lab.blocks import BlockError


def _synthetic(n, p, nu, coef, alpha=2.0):
    n = np.asarray(n, dtype=float)
    err = n**-p * sum(a * np.cos(k * nu * n) for k, a in enumerate(coef))
    return ScanSeries([ScanRecord(int(m), alpha, 0.0, 0.0, float(e), 0.0) for m, e in zip(n, err)])


def test_family_period_and_configuration():
    fam = BlockFamily.symmetric(3, 2, Fraction(1, 2), Fraction(1, 3))
    assert fam.period == 6
    assert (fam.r, fam.s, fam.gamma_x, fam.gamma_p) == (3, 2, Fraction(1, 2), Fraction(1, 3))
    c = fam.configuration(72)
    assert c.sites.size == 36 and c.modes.size == 24
    with pytest.raises(BlockError):
        fam.configuration(70)
    assert nu0(fam) == pytest.approx(math.pi / 18)
    assert nu0(c) == pytest.approx(math.pi / 18)


def test_family_rejects_bad_fractions():
    with pytest.raises(BlockError):
        BlockFamily(((Fraction(1, 2), Fraction(1, 4)),), ((0, Fraction(1, 2)),))
    with pytest.raises(BlockError):
        BlockFamily.symmetric(2, 1, Fraction(1), Fraction(1, 2))


def test_error_scan_ordering_and_threads():
    fam = BlockFamily.symmetric(2, 1, Fraction(1, 2), Fraction(1, 3))
    ns = [48, 24, 72]
    one = error_scan(fam, ns, [2.0, 1.0], threads=1)
    two = error_scan(fam, ns, [2.0, 1.0], threads=2)
    assert [(r.alpha, r.n) for r in one.records] == [(2.0, 24), (2.0, 48), (2.0, 72), (1.0, 24), (1.0, 48), (1.0, 72)]
    assert [r.exact for r in one.records] == [r.exact for r in two.records]
    assert one.alphas() == [2.0, 1.0]
    sub = one.for_alpha(1)
    assert len(sub) == 3
    assert np.allclose(sub.error, sub.exact - np.array([r.prediction for r in sub.records]))
    with pytest.raises(BlockError):
        error_scan(fam, [25], 1)
    with pytest.raises(ValueError):
        error_scan(fam, [24, 24], 1)


def test_default_threads_env(monkeypatch):
    monkeypatch.setenv("ENTROPY_LAB_THREADS", "3")
    assert analysis.default_threads() == 3
    monkeypatch.delenv("ENTROPY_LAB_THREADS")
    assert analysis.default_threads() == 1


def test_envelope_exponent_recovers_power():
    n = np.arange(100, 2000, 7.0)
    assert envelope_exponent(n, 3 * n**-2.0) == pytest.approx(2.0, abs=1e-10)
    assert envelope_exponent(n, n**-1.0 * (1 + 0.5 * np.cos(0.3 * n))) == pytest.approx(1.0, abs=0.1)


def test_frequency_candidates():
    c = frequency_candidates(2, 1, 0.5, 0.5)
    base = 2 * math.pi * 0.25 / 2
    assert c == pytest.approx(sorted([base / 2, base, 2 * base]))


def test_fit_recovers_synthetic_law():
    n = np.arange(200, 1400, 6)
    nu = math.pi / 18
    s = _synthetic(n, 1.0, nu, [0.3, -2.0, 0.4])
    cands = [nu * f for f in (0.5, 2 / 3, 1, 1.5, 2)]
    fit = fit_error_law(s, None, cands, kmax=2)
    assert fit.nu == pytest.approx(nu)
    assert fit.exponent == pytest.approx(1.0, abs=1e-6)
    assert fit.coefficients == pytest.approx([0.3, -2.0, 0.4], abs=1e-6)
    assert np.allclose(fit.model(n), s.error, atol=1e-12)
    assert set(fit.candidates) <= set(cands)


def test_fit_ties_keep_lowest_frequency():
    # with kmax=3 a pure cos(3 nu N) law is fitted exactly by both nu and 3 nu
    n = np.arange(300, 1500, 10)
    nu = math.pi / 200
    s = _synthetic(n, 1.0, 3 * nu, [0.0, 1.0])
    fit = fit_error_law(s, 1.0, [nu, 3 * nu], kmax=3)
    assert fit.nu == pytest.approx(nu)


def test_fit_folds_aliased_candidates():
    n = np.arange(120, 1200, 12)
    nu = 0.2
    s = _synthetic(n, 2.0, nu, [0.0, 1.0])
    alias = nu + 2 * math.pi / 12
    fit = fit_error_law(s, 2.0, [alias, nu], kmax=1)
    assert fit.nu == pytest.approx(nu)
    assert len(fit.candidates) == 1


def test_fit_argument_checks():
    s = _synthetic(np.arange(10, 40, 2), 1.0, 0.1, [1.0])
    with pytest.raises(FitError):
        fit_error_law(s, 1.0, [0.1], kmax=5)
    with pytest.raises(FitError):
        fit_error_law(s, 1.0, None, kmax=1)
    with pytest.raises(FitError):
        fit_error_law(s, 1.0, [2 * math.pi / 2], kmax=1)


def test_central_charge_fit_single_block():
    fam = BlockFamily.symmetric(1, 1, Fraction(1, 2), Fraction(1, 2))
    s = error_scan(fam, [16, 32, 64, 128, 256], 1)
    assert central_charge_fit(s) == pytest.approx(1.0, abs=0.03)
    with pytest.raises(FitError):
        central_charge_fit(error_scan(fam, [16, 18, 20, 22, 24], 1))


@pytest.mark.parametrize("gx", [0.25, 0.5, 0.75])
def test_two_block_maximum_is_symmetric(gx):
    res = maximize_geometric_factor(2, 1, gx, 0.5)
    theta, delta = res.site_lengths[0], res.site_gaps[0]
    assert theta == pytest.approx(math.pi * gx, abs=1e-5)
    assert delta == pytest.approx(math.pi * (1 - gx), abs=1e-5)
    assert res.g_sites == pytest.approx(2 * math.log(math.sin(math.pi * gx) / 2), abs=1e-10)


def test_three_block_maximum_is_seeded_and_reproducible():
    a = maximize_geometric_factor(3, 1, 0.5, 0.5, seed=4)
    b = maximize_geometric_factor(3, 1, 0.5, 0.5, seed=4)
    assert a == b
    assert a.g_sites == pytest.approx(3 * math.log(math.sin(math.pi / 2) / 3), abs=1e-8)


def test_snapped_configuration():
    res = maximize_geometric_factor(2, 2, 0.5, 0.25)
    c = res.to_configuration(64)
    assert (c.r, c.s, c.sites.size, c.modes.size) == (2, 2, 32, 16)
    assert geometric_factor(c) == pytest.approx(res.g, abs=1e-12)


def test_maximize_argument_checks():
    with pytest.raises(ValueError):
        maximize_geometric_factor(2, 1, 1.2, 0.5)
    with pytest.raises(ValueError):
        maximize_geometric_factor(2, 1, 0.5, 0.5, grid_resolution=4)

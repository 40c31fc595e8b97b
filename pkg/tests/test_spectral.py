import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entropy_lab.blocks import Configuration, canonicalize, random_configuration
from entropy_lab.spectral import (
    SpectrumError,
    correlation_matrix,
    dual_correlation_matrix,
    occupation,
    occupation_pairs,
    occupation_spectrum,
)


def _brute(c):
    x = c.sites.sites()
    ks = c.modes.sites()
    d = x[:, None] - x[None, :]
    return np.exp(-2j * np.pi * d[..., None] * ks / c.n).sum(-1) / c.n


def test_small_example_matrix():
    c = Configuration(4, canonicalize([[0, 2]], 4), canonicalize([[0, 2]], 4))
    m = correlation_matrix(c)
    assert np.allclose(np.diag(m), 0.5)
    # the two off-diagonal entries are (1 +- i)/4
    assert sorted([m[0, 1], m[1, 0]], key=lambda z: z.imag) == pytest.approx([(1 - 1j) / 4, (1 + 1j) / 4])
    assert occupation(c) == pytest.approx([0.5 - np.sqrt(2) / 4, 0.5 + np.sqrt(2) / 4])


def test_full_mode_set_gives_projector():
    c = Configuration(8, canonicalize([[1, 4]], 8), canonicalize([[0, 8]], 8))
    assert np.allclose(correlation_matrix(c), np.eye(3))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_matches_direct_sum(n, seed):
    c = random_configuration(np.random.default_rng(seed), n)
    m = correlation_matrix(c)
    assert np.allclose(m, _brute(c), atol=1e-12)
    assert np.allclose(m, m.conj().T)
    assert np.allclose(dual_correlation_matrix(c), correlation_matrix(c.swapped()))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 80), st.integers(0, 2**32 - 1))
def test_nonzero_spectra_of_both_paths_agree(n, seed):
    c = random_configuration(np.random.default_rng(seed), n)
    a = occupation(c, "direct")
    b = occupation(c, "dual")
    assert np.all((a >= 0) & (a <= 1))
    keep = lambda v: np.sort(v[(v > 1e-9) & (v < 1 - 1e-9)])
    assert np.allclose(keep(a), keep(b), atol=1e-9)
    # trace = L M / N on both sides
    assert a.sum() == pytest.approx(c.sites.size * c.modes.size / n)


def test_out_of_range_spectrum_raises():
    with pytest.raises(SpectrumError):
        occupation_spectrum(np.diag([0.2, 1.5]))
    assert occupation_spectrum(np.diag([-1e-12, 1 + 1e-12])).tolist() == [0.0, 1.0]


def test_unknown_path():
    c = Configuration(4, canonicalize([[0, 2]], 4), canonicalize([[0, 1]], 4))
    with pytest.raises(ValueError):
        occupation(c, "sideways")


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 80), st.integers(0, 2**32 - 1), st.sampled_from(["direct", "dual"]))
def test_factored_pairs_match_eigensolver(n, seed, path):
    c = random_configuration(np.random.default_rng(seed), n)
    nu, om = occupation_pairs(c, path)
    assert np.allclose(nu + om, 1.0, atol=1e-14)
    assert np.allclose(nu, occupation(c, path), atol=1e-12)


def test_factored_pairs_resolve_tiny_occupations():
    # two distant small blocks: many occupations far below 1e-16
    n = 400
    c = Configuration(n, canonicalize([[0, 60]], n), canonicalize([[0, 200]], n))
    nu, _ = occupation_pairs(c, "direct")
    nu_dual, _ = occupation_pairs(c, "dual")
    tiny = nu[(nu > 1e-30) & (nu < 1e-14)]
    assert tiny.size > 0
    ref = np.sort(nu_dual[(nu_dual > 1e-30) & (nu_dual < 1e-14)])
    assert np.allclose(np.sort(tiny), ref, rtol=1e-6)

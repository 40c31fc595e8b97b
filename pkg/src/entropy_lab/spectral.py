"""Correlation matrices of the plane-wave state |K> and their spectra."""

import numpy as np

from . import _kernels
from .blocks import BlockSet, Configuration, complement

__all__ = [
    "SpectrumError",
    "correlation_matrix",
    "dual_correlation_matrix",
    "occupation_spectrum",
    "occupation",
    "occupation_pairs",
    "CLAMP_TOL",
]

CLAMP_TOL = 1e-10


class SpectrumError(ArithmeticError):
    """Eigenvalues of a correlation matrix fell outside [0, 1]."""


def _hermitian(m):
    return 0.5 * (m + m.conj().T)


def _restricted_kernel(rows: BlockSet, summed: BlockSet) -> np.ndarray:
    n = rows.n
    starts = [s for s, _ in summed.intervals]
    lengths = [l for _, l in summed.intervals]
    table = _kernels.dirichlet_table(n, starts, lengths)
    return _hermitian(_kernels.gather(table, rows.sites(), n))


def correlation_matrix(c: Configuration) -> np.ndarray:
    """``(C_A)_{jk} = (1/N) sum_{l in K} exp(-2 pi i (x_j - x_k) l / N)``, an L x L matrix.

    The sum over each block of ``K`` is done in closed form, so the build is
    O(L^2 + N * s).
    """
    return _restricted_kernel(c.sites, c.modes)


def dual_correlation_matrix(c: Configuration) -> np.ndarray:
    """M x M matrix over the excited modes; identical to ``correlation_matrix(c.swapped())``."""
    return _restricted_kernel(c.modes, c.sites)


def occupation_spectrum(m: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian correlation matrix, clamped to [0, 1].

    Raises
    ------
    SpectrumError
        If an eigenvalue lies outside ``[-tol, 1 + tol]`` before clamping.
    """
    m = np.asarray(m)
    if m.size == 0:
        return np.zeros(0)
    nu = np.linalg.eigvalsh(m)
    if nu[0] < -tol or nu[-1] > 1 + tol:
        raise SpectrumError(
            f"occupation numbers outside [0, 1]: min={nu[0]:.3e}, max={nu[-1]:.3e}"
        )
    return np.clip(nu, 0.0, 1.0)


def occupation(c: Configuration, path: str = "auto") -> np.ndarray:
    """Spectrum of ``C_A`` (``path="direct"``) or of its dual (``"dual"``).

    ``"auto"`` diagonalizes whichever matrix is smaller.
    """
    if path == "auto":
        path = "direct" if c.sites.size <= c.modes.size else "dual"
    if path == "direct":
        return occupation_spectrum(correlation_matrix(c))
    if path == "dual":
        return occupation_spectrum(dual_correlation_matrix(c))
    raise ValueError(f"unknown path {path!r}; expected 'direct', 'dual' or 'auto'")


def _plane_waves(rows: BlockSet, cols: BlockSet) -> np.ndarray:
    """``V[j, l] = exp(-2 pi i x_j l / N) / sqrt(N)``, so that ``V V^dagger`` is the kernel."""
    n = rows.n
    phase = np.outer(rows.sites(), cols.sites()) % n
    return np.exp(-2j * np.pi * phase / n) / np.sqrt(n)


def _squared_singular_values(rows: BlockSet, cols: BlockSet, dim: int) -> np.ndarray:
    if cols.is_empty:
        return np.zeros(dim)
    sv = np.linalg.svd(_plane_waves(rows, cols), compute_uv=False)
    out = np.zeros(dim)
    out[: len(sv)] = sv**2
    return out


def occupation_pairs(c: Configuration, path: str = "auto", tol: float = CLAMP_TOL):
    """Occupation numbers ``nu`` and ``1 - nu``, each accurate relative to its own size.

    ``C_A = V V^dagger`` with ``V`` the plane waves of the excited modes, and
    ``1 - C_A = W W^dagger`` with ``W`` those of the remaining modes, so
    squared singular values of ``V`` and ``W`` give eigenvalues near 0 and
    near 1 without the ``1e-16`` absolute floor of a direct eigensolve.
    Needed for ``alpha < 1``, where ``nu^alpha`` amplifies that floor.

    Returns
    -------
    nu, one_minus_nu : ndarray
        Paired arrays, ascending in ``nu``; the smaller member of each pair is
        the one computed directly.
    """
    if path == "auto":
        path = "direct" if c.sites.size <= c.modes.size else "dual"
    if path == "direct":
        rows, summed = c.sites, c.modes
    elif path == "dual":
        rows, summed = c.modes, c.sites
    else:
        raise ValueError(f"unknown path {path!r}; expected 'direct', 'dual' or 'auto'")
    dim = rows.size
    if summed.is_full:
        return np.ones(dim), np.zeros(dim)
    if summed.is_empty:
        return np.zeros(dim), np.ones(dim)
    a = np.sort(_squared_singular_values(rows, summed, dim))
    b = np.sort(_squared_singular_values(rows, complement(summed), dim))[::-1]
    if dim and (a[-1] > 1 + tol or b[0] > 1 + tol or np.max(np.abs(a + b - 1.0)) > tol):
        raise SpectrumError(
            f"factored spectra inconsistent: max |nu + (1 - nu) - 1| = {np.max(np.abs(a + b - 1.0)):.3e}"
        )
    low = a <= 0.5
    nu = np.clip(np.where(low, a, 1.0 - b), 0.0, 1.0)
    om = np.clip(np.where(low, 1.0 - a, b), 0.0, 1.0)
    return nu, om

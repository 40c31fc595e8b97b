"""Brute-force Fock-space reference for small chains (n <= 14).

The state |K> is built amplitude by amplitude as a Slater determinant over
occupation bitmasks (bit x set means site x occupied). Reduced density
matrices use the ordering convention "creation operators in ascending site
order"; moving the A operators in front of the B operators gives the sign.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .blocks import BlockSet
from .entropy import check_alpha

__all__ = [
    "MAX_SITES",
    "FockVector",
    "fock_state",
    "fock_state_by_operators",
    "schmidt_values",
    "reduced_density_matrix",
    "rdm_spectrum",
    "renyi_oracle",
]

MAX_SITES = 14
MAX_RDM_SITES = 10


@dataclass(frozen=True)
class FockVector:
    n: int
    amplitudes: np.ndarray  # length 2**n, indexed by occupation bitmask

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _mode_list(n, modes):
    if isinstance(modes, BlockSet):
        if modes.n != n:
            raise ValueError(f"modes live on Z_{modes.n}, expected Z_{n}")
        return modes.sites()
    ks = np.unique(np.asarray(list(modes), dtype=np.int64) % n)
    if len(ks) != len(list(modes)):
        raise ValueError("mode list contains repeated entries")
    return ks


def _check_n(n):
    if not 0 < n <= MAX_SITES:
        raise ValueError(f"oracle supports 1 <= n <= {MAX_SITES}, got {n}")


def fock_state(n: int, modes) -> FockVector:
    """Amplitudes of ``|K>``: ``det[N^(-1/2) exp(2 pi i k_l x_j / N)]`` per bitmask."""
    _check_n(n)
    ks = _mode_list(n, modes)
    masks, amps = _kernels.slater_amplitudes(n, ks)
    vec = np.zeros(1 << n, dtype=np.complex128)
    vec[masks] = amps
    return FockVector(n, vec)


def _create(vec, n, x):
    """Apply ``a_x^dagger`` with the Jordan-Wigner sign of occupied sites below x."""
    out = np.zeros_like(vec)
    for mask in np.flatnonzero(vec):
        if (mask >> x) & 1:
            continue
        below = bin(int(mask) & ((1 << x) - 1)).count("1")
        out[mask | (1 << x)] += (-1) ** below * vec[mask]
    return out


def fock_state_by_operators(n: int, modes) -> FockVector:
    """Same state by applying plane-wave creation operators to the vacuum.

    Slow (pure Python); used to cross-check ``fock_state`` for n <= 8.
    """
    _check_n(n)
    ks = _mode_list(n, modes)
    vec = np.zeros(1 << n, dtype=np.complex128)
    vec[0] = 1.0
    # |K> = a^dag_{k_1} ... a^dag_{k_M} |0>, so the last mode acts first
    for k in ks[::-1]:
        new = np.zeros_like(vec)
        for x in range(n):
            new += np.exp(2j * np.pi * ((k * x) % n) / n) / np.sqrt(n) * _create(vec, n, x)
        vec = new
    return FockVector(n, vec)


def _schmidt_matrix(v: FockVector, sites: BlockSet) -> np.ndarray:
    if sites.n != v.n:
        raise ValueError(f"sites live on Z_{sites.n}, state on Z_{v.n}")
    masks = np.flatnonzero(np.abs(v.amplitudes) > 0).astype(np.int64)
    amps = np.ascontiguousarray(v.amplitudes[masks])
    return _kernels.schmidt_matrix(v.n, masks, amps, sites.mask())


def reduced_density_matrix(v: FockVector, sites: BlockSet) -> np.ndarray:
    """``rho_A = tr_B |K><K|`` as a dense ``2^L x 2^L`` matrix (L <= 10)."""
    if sites.size > MAX_RDM_SITES:
        raise ValueError(
            f"dense rho_A limited to {MAX_RDM_SITES} sites; use schmidt_values for larger A"
        )
    psi = _schmidt_matrix(v, sites)
    rho = psi @ psi.conj().T
    return 0.5 * (rho + rho.conj().T)


def schmidt_values(v: FockVector, sites: BlockSet) -> np.ndarray:
    """Singular values of the A|B coefficient matrix, descending."""
    return np.linalg.svd(_schmidt_matrix(v, sites), compute_uv=False)


def rdm_spectrum(v: FockVector, sites: BlockSet) -> np.ndarray:
    """Eigenvalues of ``rho_A`` (squared Schmidt values), descending.

    Squaring singular values keeps tiny and zero eigenvalues at the 1e-32
    level instead of the 1e-16 level of a direct eigensolve.
    """
    return schmidt_values(v, sites) ** 2


def renyi_oracle(v: FockVector, sites: BlockSet, alpha) -> float:
    alpha = check_alpha(alpha)
    lam = rdm_spectrum(v, sites)
    lam = lam[lam > 0]
    if alpha == 1.0:
        return max(float(-np.sum(lam * np.log(lam))), 0.0)
    return max(float(np.log(np.sum(lam**alpha)) / (1.0 - alpha)), 0.0)

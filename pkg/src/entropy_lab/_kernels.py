"""Inner loops, each in a numba and a pure-numpy flavour.

The numba versions are used when numba imports and ``ENTROPY_LAB_NUMBA``
is not ``"0"``. Both flavours stay importable through ``NUMPY`` and
``NUMBA`` so they can be compared against each other.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

USE_NUMBA = numba is not None and os.environ.get("ENTROPY_LAB_NUMBA", "1") != "0"


# ---------------------------------------------------------------------------
# Dirichlet-kernel table: D[d] = (1/n) sum_{l in K} exp(-2 pi i d l / n)
# ---------------------------------------------------------------------------

def _dirichlet_table_np(n, starts, lengths):
    d = np.arange(n, dtype=np.int64)
    out = np.zeros(n, dtype=np.complex128)
    s_half = np.sin(np.pi * d[1:] / n)
    for p, m in zip(starts, lengths):
        # sum_{l=p}^{p+m-1} e^{-i phi l} = e^{-i phi (2p+m-1)/2} sin(phi m/2)/sin(phi/2)
        # with all phases reduced mod 2n in integers
        num = np.sin(np.pi * ((d[1:] * m) % (2 * n)) / n)
        phase = np.pi * ((d[1:] * (2 * p + m - 1)) % (2 * n)) / n
        out[1:] += np.exp(-1j * phase) * (num / s_half)
        out[0] += m
    return out / n


def _gather_np(table, x, n):
    return table[np.subtract.outer(x, x) % n]


# ---------------------------------------------------------------------------
# Fock-space amplitudes of a plane-wave Slater determinant
# ---------------------------------------------------------------------------

def _popcount_masks_np(nbits, m):
    masks = np.arange(1 << nbits, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(nbits)) & 1
    return masks[bits.sum(axis=1) == m]


def _slater_amplitudes_np(n, modes):
    m = len(modes)
    masks = _popcount_masks_np(n, m)
    if m == 0:
        return masks, np.ones(1, dtype=np.complex128)
    bits = (masks[:, None] >> np.arange(n)) & 1
    # occupied sites in ascending order, one row per mask
    sites = np.nonzero(bits)[1].reshape(len(masks), m)
    phase = (np.asarray(modes)[None, :, None] * sites[:, None, :]) % n
    mats = np.exp(2j * np.pi * phase / n) / np.sqrt(n)
    return masks, np.linalg.det(mats)


def _schmidt_matrix_np(n, masks, amps, in_a):
    """Coefficient matrix psi[a, b] with the fermionic reordering sign."""
    a_sites = np.flatnonzero(in_a)
    b_sites = np.flatnonzero(~in_a)
    bits = (masks[:, None] >> np.arange(n)) & 1
    a_idx = bits[:, a_sites] @ (1 << np.arange(len(a_sites), dtype=np.int64))
    b_idx = bits[:, b_sites] @ (1 << np.arange(len(b_sites), dtype=np.int64))
    # occupied B sites strictly below each site, counted at occupied A sites
    b_bits = bits * (~in_a)[None, :]
    below = np.cumsum(b_bits, axis=1) - b_bits
    swaps = (below * (bits * in_a[None, :])).sum(axis=1)
    sign = 1 - 2 * (swaps & 1)
    psi = np.zeros((1 << len(a_sites), 1 << len(b_sites)), dtype=np.complex128)
    psi[a_idx, b_idx] = sign * amps
    return psi


NUMPY = {
    "dirichlet_table": _dirichlet_table_np,
    "gather": _gather_np,
    "slater_amplitudes": _slater_amplitudes_np,
    "schmidt_matrix": _schmidt_matrix_np,
}

NUMBA = {}

if numba is not None:

    @numba.njit(cache=True)
    def _dirichlet_table_nb(n, starts, lengths):
        out = np.zeros(n, dtype=np.complex128)
        for b in range(starts.shape[0]):
            p = starts[b]
            m = lengths[b]
            out[0] += m
            for d in range(1, n):
                num = np.sin(np.pi * ((d * m) % (2 * n)) / n)
                den = np.sin(np.pi * d / n)
                phase = np.pi * ((d * (2 * p + m - 1)) % (2 * n)) / n
                out[d] += (np.cos(phase) - 1j * np.sin(phase)) * (num / den)
        for d in range(n):
            out[d] /= n
        return out

    @numba.njit(cache=True)
    def _gather_nb(table, x, n):
        dim = x.shape[0]
        out = np.empty((dim, dim), dtype=np.complex128)
        for j in range(dim):
            for k in range(dim):
                out[j, k] = table[(x[j] - x[k]) % n]
        return out

    @numba.njit(cache=True)
    def _slater_amplitudes_nb(n, modes):
        m = modes.shape[0]
        count = 0
        for mask in range(1 << n):
            c = 0
            for i in range(n):
                c += (mask >> i) & 1
            if c == m:
                count += 1
        masks = np.empty(count, dtype=np.int64)
        amps = np.empty(count, dtype=np.complex128)
        mat = np.empty((m, m), dtype=np.complex128)
        norm = 1.0 / np.sqrt(n)
        pos = 0
        for mask in range(1 << n):
            c = 0
            for i in range(n):
                c += (mask >> i) & 1
            if c != m:
                continue
            col = 0
            for x in range(n):
                if (mask >> x) & 1:
                    for row in range(m):
                        ph = 2.0 * np.pi * ((modes[row] * x) % n) / n
                        mat[row, col] = (np.cos(ph) + 1j * np.sin(ph)) * norm
                    col += 1
            masks[pos] = mask
            amps[pos] = np.linalg.det(mat) if m > 0 else 1.0
            pos += 1
        return masks, amps

    @numba.njit(cache=True)
    def _schmidt_matrix_nb(n, masks, amps, in_a):
        la = 0
        for i in range(n):
            if in_a[i]:
                la += 1
        psi = np.zeros((1 << la, 1 << (n - la)), dtype=np.complex128)
        for t in range(masks.shape[0]):
            mask = masks[t]
            a_idx = 0
            b_idx = 0
            ia = 0
            ib = 0
            b_below = 0
            swaps = 0
            for x in range(n):
                occ = (mask >> x) & 1
                if in_a[x]:
                    if occ:
                        a_idx |= 1 << ia
                        swaps += b_below
                    ia += 1
                else:
                    if occ:
                        b_idx |= 1 << ib
                        b_below += 1
                    ib += 1
            sign = -1.0 if swaps & 1 else 1.0
            psi[a_idx, b_idx] = sign * amps[t]
        return psi

    NUMBA = {
        "dirichlet_table": _dirichlet_table_nb,
        "gather": _gather_nb,
        "slater_amplitudes": _slater_amplitudes_nb,
        "schmidt_matrix": _schmidt_matrix_nb,
    }


def _pick(name):
    return (NUMBA if USE_NUMBA else NUMPY)[name]


def dirichlet_table(n, starts, lengths):
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    return _pick("dirichlet_table")(int(n), starts, lengths)


def gather(table, x, n):
    return _pick("gather")(table, np.ascontiguousarray(x, dtype=np.int64), int(n))


def slater_amplitudes(n, modes):
    return _pick("slater_amplitudes")(int(n), np.ascontiguousarray(modes, dtype=np.int64))


def schmidt_matrix(n, masks, amps, in_a):
    return _pick("schmidt_matrix")(int(n), masks, amps, np.ascontiguousarray(in_a, dtype=np.bool_))

"""Exact Rényi entropies, entanglement spectra and information measures."""

import heapq
import itertools
import math

import numpy as np

from .blocks import BlockError, BlockSet, Configuration, union
from .spectral import occupation, occupation_pairs

__all__ = [
    "ZERO_TOL",
    "check_alpha",
    "renyi_from_spectrum",
    "renyi_from_pairs",
    "renyi",
    "entanglement_spectrum",
    "mutual_information_exact",
    "multipartite_information_exact",
]

# occupation numbers this close to 0 or 1 carry no entropy
ZERO_TOL = 1e-12


def check_alpha(alpha) -> float:
    alpha = float(alpha)
    if not alpha > 0 or not math.isfinite(alpha):
        raise ValueError(f"Rényi order must be a positive finite number, got {alpha}")
    return alpha


def _nontrivial(values) -> np.ndarray:
    nu = np.asarray(values, dtype=float)
    return nu[(nu > ZERO_TOL) & (nu < 1.0 - ZERO_TOL)]


def renyi_from_spectrum(values, alpha) -> float:
    """Sum of two-level Rényi entropies over occupation numbers ``values``.

    ``alpha == 1`` is the von Neumann (Shannon) branch, evaluated directly.
    """
    alpha = check_alpha(alpha)
    nu = _nontrivial(values)
    if nu.size == 0:
        return 0.0
    if alpha == 1.0:
        terms = -nu * np.log(nu) - (1.0 - nu) * np.log1p(-nu)
    else:
        terms = np.log(nu**alpha + (1.0 - nu) ** alpha) / (1.0 - alpha)
    return max(float(np.sum(terms)), 0.0)


def renyi_from_pairs(nu, one_minus_nu, alpha) -> float:
    """As :func:`renyi_from_spectrum`, with ``1 - nu`` supplied separately.

    Each term is evaluated from the smaller of ``nu`` and ``1 - nu`` so that
    tiny occupations keep their relative accuracy.
    """
    alpha = check_alpha(alpha)
    nu = np.asarray(nu, dtype=float)
    om = np.asarray(one_minus_nu, dtype=float)
    keep = (nu > ZERO_TOL) & (om > ZERO_TOL)
    p = np.minimum(nu, om)[keep]
    if p.size == 0:
        return 0.0
    log_p = np.log(p)
    log_q = np.log1p(-p)
    if alpha == 1.0:
        terms = -p * log_p - (1.0 - p) * log_q
    else:
        # log(q^a + p^a) = a log q + log1p((p/q)^a)
        terms = (alpha * log_q + np.log1p(np.exp(alpha * (log_p - log_q)))) / (1.0 - alpha)
    return max(float(np.sum(terms)), 0.0)


def renyi(c: Configuration, alpha, path: str = "auto") -> float:
    """Rényi entropy ``S_alpha(A; K)`` of the sites ``A`` in the state ``|K>``.

    For ``alpha < 1`` the occupations come from :func:`occupation_pairs`,
    since ``nu^alpha`` turns the absolute eigensolver error near 0 into an
    error of order ``sqrt(1e-16)`` at ``alpha = 1/2``.
    """
    alpha = check_alpha(alpha)
    if c.trivial:
        return 0.0
    if alpha < 1.0:
        return renyi_from_pairs(*occupation_pairs(c, path), alpha)
    return renyi_from_spectrum(occupation(c, path), alpha)


def entanglement_spectrum(c: Configuration, max_count: int) -> np.ndarray:
    """Largest ``max_count`` eigenvalues of ``rho_A``, descending.

    Products ``prod_l nu_l^e_l (1 - nu_l)^(1 - e_l)`` are enumerated best-first:
    flipping a mode away from its larger factor costs ``log(max/min)``, and the
    cheapest subsets of flips are popped from a heap.
    """
    if max_count < 1:
        raise ValueError("max_count must be at least 1")
    if c.trivial:
        nu = om = np.array([])
    else:
        nu, om = occupation_pairs(c, "auto")
        keep = (nu > ZERO_TOL) & (om > ZERO_TOL)
        nu, om = nu[keep], om[keep]
    hi = np.maximum(nu, om)
    lo = np.minimum(nu, om)
    log_top = float(np.sum(np.log(hi)))
    costs = np.sort(np.log(hi) - np.log(lo))
    out = [log_top]
    heap = [(float(costs[0]), 0)] if costs.size else []
    while heap and len(out) < max_count:
        total, last = heapq.heappop(heap)
        out.append(log_top - total)
        if last + 1 < costs.size:
            nxt = float(costs[last + 1])
            heapq.heappush(heap, (total + nxt, last + 1))
            heapq.heappush(heap, (total - float(costs[last]) + nxt, last + 1))
    return np.exp(np.array(out))


def _check_parts(parts):
    parts = list(parts)
    if not parts:
        raise BlockError("need at least one part")
    try:
        union(*parts)
    except BlockError as exc:
        raise BlockError(f"parts must be pairwise disjoint: {exc}") from None
    return parts


def mutual_information_exact(parts, modes: BlockSet, alpha) -> float:
    """``sum_i S(A_i; K) - S(union A_i; K)``."""
    parts = _check_parts(parts)
    n = modes.n
    singles = sum(renyi(Configuration(n, p, modes), alpha) for p in parts)
    return singles - renyi(Configuration(n, union(*parts), modes), alpha)


def multipartite_information_exact(parts, modes: BlockSet, alpha, max_parts: int = 8) -> float:
    """Inclusion-exclusion sum over all nonempty sub-collections of ``parts``.

    For three parts this is the tripartite information.
    """
    parts = _check_parts(parts)
    r = len(parts)
    if r < 2:
        raise ValueError("multipartite information needs at least two parts")
    if r > max_parts:
        raise ValueError(f"{r} parts need {2**r - 1} entropies; cap is {max_parts} parts")
    n = modes.n
    total = 0.0
    for size in range(1, r + 1):
        sign = 1.0 if size % 2 else -1.0
        for combo in itertools.combinations(range(r), size):
            sub = union(*(parts[i] for i in combo))
            total += sign * renyi(Configuration(n, sub, modes), alpha)
    return total

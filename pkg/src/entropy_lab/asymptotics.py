"""Closed-form large-N predictions for the entropy and information measures.

Functions that take a ``Configuration`` work from integer block endpoints,
so angle differences are exact integer ratios before the single conversion
to radians. Functions that take angle lists work in floating point.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

from scipy import integrate

from .blocks import BlockSet, Configuration, angles, densities
from .entropy import check_alpha, renyi

__all__ = [
    "Regime",
    "Prediction",
    "b_alpha",
    "c_alpha",
    "cross_ratio_product",
    "asymptotic_mutual_information",
    "single_block_asymptotic",
    "multiblock_position_asymptotic",
    "multiblock_momentum_asymptotic",
    "fisher_hartwig_asymptotic",
    "cft_asymptotic",
    "general_asymptotic",
    "compose_conjecture",
    "infinite_chain_asymptotic",
    "asymptotic_multiblock_mutual_information",
    "geometric_factor",
    "log_geometric_term",
    "h_two_block",
    "QuadratureError",
    "predict",
]


class Regime(str, enum.Enum):
    FISHER_HARTWIG = "fisher_hartwig"
    CFT = "cft"
    FINITE_DENSITY_SINGLE = "finite_density_single"
    MULTIBLOCK_POSITION = "multiblock_position"
    MULTIBLOCK_MOMENTUM = "multiblock_momentum"
    GENERAL = "general"
    INFINITE_CHAIN = "infinite_chain"


@dataclass(frozen=True)
class Prediction:
    value: float
    regime: Regime

    def __float__(self):
        return float(self.value)


class QuadratureError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def b_alpha(alpha) -> float:
    """Coefficient of the logarithm, ``(1 + 1/alpha)/6``."""
    alpha = check_alpha(alpha)
    return (1.0 + 1.0 / alpha) / 6.0


_T_SPLIT = 1e-2
_T_MAX = 40.0


def _series_over_t(alpha: float, t0: float) -> float:
    """Integral over [0, t0] of the integrand, from its Taylor series.

    Every coefficient carries a factor (alpha^2 - 1); it is left in so the
    caller divides by (1 - alpha) as for the quadrature part.
    """
    a = alpha
    q = a * a - 1.0
    coeffs = (
        -q / (3 * a),
        q * (137 * a**2 + 7) / (360 * a**3),
        -2 * q / (9 * a),
        q * (1551 * a**4 - 80 * a**2 - 31) / (15120 * a**5),
        -2 * q / (45 * a),
    )
    return sum(ck * t0 ** (k + 1) / (k + 1) for k, ck in enumerate(coeffs))


def _csch(x: float) -> float:
    if x > 20.0:
        # sinh overflows for large x; 2 e^-x / (1 - e^-2x) does not
        e = math.exp(-x)
        return 2.0 * e / (1.0 - e * e)
    return 1.0 / math.sinh(x)


def _integrand(t: float, alpha: float) -> float:
    csch = _csch(t)
    tail = (1.0 - alpha * alpha) / (6.0 * alpha) * math.exp(-2.0 * t)
    return (alpha * csch * csch - csch * _csch(t / alpha) - tail) / t


def _c_numerator(alpha: float, level: int) -> float:
    # level 0 and level 1 use different breakpoints and tolerances so that
    # their agreement is a meaningful refinement check
    if level == 0:
        pts = [_T_SPLIT, 0.5, 2.0, 8.0, _T_MAX]
        eps = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    else:
        pts = [_T_SPLIT, 0.1, 0.3, 1.0, 3.0, 10.0, 20.0, _T_MAX]
        eps = dict(epsabs=1e-14, epsrel=1e-13, limit=500)
    total = _series_over_t(alpha, _T_SPLIT)
    for lo, hi in zip(pts[:-1], pts[1:]):
        # full_output silences roundoff warnings; the error estimate is checked instead
        val, err, *_ = integrate.quad(_integrand, lo, hi, args=(alpha,), full_output=1, **eps)
        if not math.isfinite(val) or err > 1e-9:
            raise QuadratureError(f"quadrature on [{lo}, {hi}] did not converge (err={err:.2e})")
        total += val
    return total


_c_cache: dict[tuple[float, int], float] = {}
_c_lock = threading.Lock()


def c_alpha(alpha, level: int = 0) -> float:
    """Additive constant of the single-interval asymptotics.

    For ``alpha != 1`` the defining integral is split at ``t = 1e-2``: the
    head comes from the integrand's Taylor series, the rest from adaptive
    quadrature up to ``t = 40`` (the tail beyond is below 1e-30).
    ``alpha == 1`` is obtained by Richardson extrapolation of symmetric
    averages at ``1 +- 1e-3`` and ``1 +- 1e-4``.
    """
    alpha = check_alpha(alpha)
    key = (alpha, level)
    cached = _c_cache.get(key)
    if cached is not None:
        return cached
    if abs(alpha - 1.0) < 1e-12:
        value = _c_one(level)
    else:
        value = _c_numerator(alpha, level) / (1.0 - alpha)
    with _c_lock:
        _c_cache[key] = value
    return value


def _c_one(level: int) -> float:
    def sym(eps):
        return 0.5 * (
            _c_numerator(1.0 + eps, level) / -eps + _c_numerator(1.0 - eps, level) / eps
        )

    # sym(eps) = c_1 + A eps^2 + O(eps^4)
    coarse, fine = sym(1e-3), sym(1e-4)
    return (100.0 * fine - coarse) / 99.0


# ---------------------------------------------------------------------------
# cross ratios and information
# ---------------------------------------------------------------------------

def _log_sin_half(x):
    return math.log(math.sin(0.5 * x))


def cross_ratio_product(ang, variant: str = "chord") -> float:
    """Product of pairwise cross ratios of the blocks ``[u_i, v_i)``.

    ``variant="chord"`` uses ``sin(x/2)`` of each difference, ``"linear"``
    the difference itself (infinite chain). A single block gives 1.
    """
    return math.exp(_log_cross_ratio(ang, variant))


def _log_cross_ratio(ang, variant="chord"):
    if variant == "chord":
        g = _log_sin_half
    elif variant == "linear":
        g = math.log
    else:
        raise ValueError(f"unknown variant {variant!r}")
    ang = [(float(u), float(v)) for u, v in ang]
    total = 0.0
    for i in range(len(ang)):
        ui, vi = ang[i]
        for j in range(i + 1, len(ang)):
            uj, vj = ang[j]
            denom = (uj - ui) * (vj - vi)
            if uj - vi <= 0 or denom == 0:
                raise ValueError(f"blocks {i} and {j} touch or overlap: {ang[i]}, {ang[j]}")
            total += g(vj - ui) + g(uj - vi) - g(uj - ui) - g(vj - vi)
    return total


def _log_cross_ratio_int(ends, n):
    """Chord variant from integer endpoints on Z_n."""
    def ls(d):
        return math.log(math.sin(math.pi * d / n))

    total = 0.0
    for i in range(len(ends)):
        ui, vi = ends[i]
        for j in range(i + 1, len(ends)):
            uj, vj = ends[j]
            total += ls(vj - ui) + ls(uj - vi) - ls(uj - ui) - ls(vj - vi)
    return total


def asymptotic_mutual_information(ang, alpha) -> float:
    """``-b_alpha log f`` for the blocks described by ``ang``."""
    return -b_alpha(alpha) * _log_cross_ratio(ang)


def asymptotic_multiblock_mutual_information(ang, s: int, alpha) -> float:
    """Mutual information of the site blocks when ``K`` has ``s`` blocks: ``s * I_alpha``."""
    if s < 1:
        raise ValueError("s must be at least 1")
    return s * asymptotic_mutual_information(ang, alpha)


def log_geometric_term(b: BlockSet) -> float:
    """``sum_i log sin((v_i - u_i)/2) + log f(u, v)`` for one side of a configuration."""
    ends = b.endpoints()
    n = b.n
    return sum(math.log(math.sin(math.pi * (v - u) / n)) for u, v in ends) + _log_cross_ratio_int(
        ends, n
    )


# ---------------------------------------------------------------------------
# entropy formulas
# ---------------------------------------------------------------------------

def _check_density(name, g):
    g = float(g)
    if not 0.0 < g < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {g}")
    return g


def single_block_asymptotic(n, gamma_x, gamma_p, alpha) -> Prediction:
    """One block of sites, one block of modes, both at finite density."""
    gx = _check_density("gamma_x", gamma_x)
    gp = _check_density("gamma_p", gamma_p)
    value = b_alpha(alpha) * math.log(
        2.0 * n / math.pi * math.sin(math.pi * gx) * math.sin(math.pi * gp)
    ) + c_alpha(alpha)
    return Prediction(value, Regime.FINITE_DENSITY_SINGLE)


def multiblock_position_asymptotic(angles_u_v, n, gamma_p, alpha) -> Prediction:
    """``r`` site blocks, a single block of modes of density ``gamma_p``."""
    gp = _check_density("gamma_p", gamma_p)
    b = b_alpha(alpha)
    r = len(angles_u_v)
    value = (
        b * (
            r * math.log(2.0 * n / math.pi * math.sin(math.pi * gp))
            + sum(_log_sin_half(v - u) for u, v in angles_u_v)
        )
        - asymptotic_mutual_information(angles_u_v, alpha)
        + r * c_alpha(alpha)
    )
    return Prediction(value, Regime.MULTIBLOCK_POSITION)


def multiblock_momentum_asymptotic(angles_p_q, n, gamma_x, alpha) -> Prediction:
    """A single block of sites of density ``gamma_x``, ``s`` blocks of modes."""
    pred = multiblock_position_asymptotic(angles_p_q, n, gamma_x, alpha)
    return Prediction(pred.value, Regime.MULTIBLOCK_MOMENTUM)


def fisher_hartwig_asymptotic(length, angles_p_q, alpha) -> Prediction:
    """Infinite chain, one block of ``length`` sites, ``s`` blocks of modes."""
    b = b_alpha(alpha)
    s = len(angles_p_q)
    value = b * (
        s * math.log(length)
        + sum(math.log(2.0 * math.sin(0.5 * (q - p))) for p, q in angles_p_q)
        + _log_cross_ratio(angles_p_q)
    ) + s * c_alpha(alpha)
    return Prediction(value, Regime.FISHER_HARTWIG)


def cft_asymptotic(angles_u_v, n, gamma_p, alpha) -> Prediction:
    """Conformal-field-theory form with linear cross ratios.

    Only meaningful for ``N >> L >> 1`` (small site density); kept for
    comparison scans.
    """
    gp = _check_density("gamma_p", gamma_p)
    b = b_alpha(alpha)
    r = len(angles_u_v)
    value = b * (
        r * math.log(n / math.pi * math.sin(math.pi * gp))
        + sum(math.log(v - u) for u, v in angles_u_v)
        + _log_cross_ratio(angles_u_v, "linear")
    ) + r * c_alpha(alpha)
    return Prediction(value, Regime.CFT)


def _check_nontrivial(c: Configuration):
    if c.trivial:
        raise ValueError("asymptotic formulas need nonempty, non-full sites and modes")


def geometric_factor(c: Configuration) -> float:
    """N- and alpha-independent geometric part ``g`` of the general formula."""
    _check_nontrivial(c)
    return c.s * log_geometric_term(c.sites) + c.r * log_geometric_term(c.modes)


def general_asymptotic(c: Configuration, alpha) -> Prediction:
    """Prediction for ``r`` site blocks and ``s`` mode blocks at finite densities."""
    _check_nontrivial(c)
    b = b_alpha(alpha)
    rs = c.r * c.s
    value = rs * (b * math.log(2.0 * c.n / math.pi) + c_alpha(alpha)) + b * geometric_factor(c)
    return Prediction(value, Regime.GENERAL)


def _blocks_of(b: BlockSet):
    return [BlockSet(b.n, (iv,)) for iv in b.intervals]


def compose_conjecture(c: Configuration, alpha, term_source: str = "exact") -> float:
    """``sum_i S(A_i;K) + sum_j S(A;K_j) - sum_ij S(A_i;K_j)``.

    With ``term_source="asymptotic"`` the terms come from the one-sided
    multi-block formulas and the single-block formula.
    """
    _check_nontrivial(c)
    site_blocks = _blocks_of(c.sites)
    mode_blocks = _blocks_of(c.modes)
    n = c.n
    if term_source == "exact":
        def term(sites, modes):
            return renyi(Configuration(n, sites, modes), alpha)
    elif term_source == "asymptotic":
        def term(sites, modes):
            if sites.block_count == 1 and modes.block_count == 1:
                return single_block_asymptotic(n, sites.size / n, modes.size / n, alpha).value
            if sites.block_count == 1:
                return multiblock_momentum_asymptotic(angles(modes), n, sites.size / n, alpha).value
            return multiblock_position_asymptotic(angles(sites), n, modes.size / n, alpha).value
    else:
        raise ValueError(f"unknown term_source {term_source!r}")

    total = sum(term(a_i, c.modes) for a_i in site_blocks)
    total += sum(term(c.sites, k_j) for k_j in mode_blocks)
    total -= sum(term(a_i, k_j) for a_i in site_blocks for k_j in mode_blocks)
    return total


def infinite_chain_asymptotic(positions, angles_p_q, alpha) -> Prediction:
    """Infinite-chain limit for site blocks ``[U_i, V_i)`` and ``s`` mode blocks."""
    positions = [(int(u), int(v)) for u, v in positions]
    for (u, v), nxt in zip(positions, positions[1:] + [None]):
        if not u < v or (nxt is not None and not v < nxt[0]):
            raise ValueError(f"positions must satisfy U_i < V_i < U_(i+1): {positions}")
    b = b_alpha(alpha)
    r = len(positions)
    s = len(angles_p_q)
    log_len = sum(math.log(v - u) for u, v in positions)
    log_cross = _log_cross_ratio(positions, "linear")
    momentum = b * sum(_log_sin_half(q - p) for p, q in angles_p_q) - asymptotic_mutual_information(
        angles_p_q, alpha
    )
    value = s * b * (log_len + log_cross) + r * momentum + r * s * (
        b * math.log(2.0) + c_alpha(alpha)
    )
    return Prediction(value, Regime.INFINITE_CHAIN)


def h_two_block(theta, delta, gamma_x) -> float:
    """Geometric term of two site blocks of lengths ``theta`` and ``2 pi gamma_x - theta``
    separated by ``delta`` (both as angles)."""
    gx = _check_density("gamma_x", gamma_x)
    tot = 2.0 * math.pi * gx
    if not 0.0 < theta < tot:
        raise ValueError(f"theta must lie in (0, {tot}), got {theta}")
    if not 0.0 < delta < 2.0 * math.pi - tot:
        raise ValueError(f"delta must lie in (0, {2 * math.pi - tot}), got {delta}")
    sg = _log_sin_half
    return (
        sg(theta) + sg(tot - theta) + sg(tot + delta) + sg(delta)
        - sg(theta + delta) - sg(tot - theta + delta)
    )


def predict(c: Configuration, alpha, regime="general") -> Prediction:
    """Evaluate the formula of ``regime`` on a configuration.

    Regimes other than ``general`` require the block counts they are derived
    for (e.g. ``multiblock_position`` needs a single block of modes).
    """
    regime = Regime(regime)
    _check_nontrivial(c)
    n = c.n
    gx, gp = (float(g) for g in densities(c))

    def need(cond, what):
        if not cond:
            raise ValueError(f"regime {regime.value!r} needs {what} (got r={c.r}, s={c.s})")

    if regime is Regime.GENERAL:
        return general_asymptotic(c, alpha)
    if regime is Regime.FINITE_DENSITY_SINGLE:
        need(c.r == 1 and c.s == 1, "r = s = 1")
        return single_block_asymptotic(n, gx, gp, alpha)
    if regime is Regime.MULTIBLOCK_POSITION:
        need(c.s == 1, "s = 1")
        return multiblock_position_asymptotic(angles(c.sites), n, gp, alpha)
    if regime is Regime.MULTIBLOCK_MOMENTUM:
        need(c.r == 1, "r = 1")
        return multiblock_momentum_asymptotic(angles(c.modes), n, gx, alpha)
    if regime is Regime.CFT:
        need(c.s == 1, "s = 1")
        return cft_asymptotic(angles(c.sites), n, gp, alpha)
    if regime is Regime.FISHER_HARTWIG:
        need(c.r == 1, "r = 1")
        return fisher_hartwig_asymptotic(c.sites.size, angles(c.modes), alpha)
    return infinite_chain_asymptotic(c.sites.endpoints(), angles(c.modes), alpha)

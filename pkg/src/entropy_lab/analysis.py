"""N-sweeps of the asymptotic error, error-law fits and configuration maximization."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np
from scipy import optimize

from .asymptotics import b_alpha, general_asymptotic
from .blocks import BlockError, Configuration, canonicalize, densities
from .entropy import renyi_from_pairs, renyi_from_spectrum
from .spectral import occupation, occupation_pairs

__all__ = [
    "BlockFamily",
    "ScanRecord",
    "ScanSeries",
    "ErrorFit",
    "FitError",
    "MaxResult",
    "error_scan",
    "envelope_exponent",
    "frequency_candidates",
    "fit_error_law",
    "nu0",
    "central_charge_fit",
    "maximize_geometric_factor",
    "default_threads",
]


def default_threads() -> int:
    env = os.environ.get("ENTROPY_LAB_THREADS")
    return max(1, int(env)) if env else 1


# ---------------------------------------------------------------------------
# configuration families at fixed densities
# ---------------------------------------------------------------------------

def _fractions(pairs):
    return tuple((Fraction(a), Fraction(b)) for a, b in pairs)


@dataclass(frozen=True)
class BlockFamily:
    """Blocks given as fractions of ``n``: ``[a*n, b*n)`` for each ``(a, b)``."""

    site_fractions: tuple[tuple[Fraction, Fraction], ...]
    mode_fractions: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        object.__setattr__(self, "site_fractions", _fractions(self.site_fractions))
        object.__setattr__(self, "mode_fractions", _fractions(self.mode_fractions))
        for name, pairs in (("sites", self.site_fractions), ("modes", self.mode_fractions)):
            if not pairs:
                raise BlockError(f"family has no {name} blocks")
            for a, b in pairs:
                if not a < b or b - a >= 1:
                    raise BlockError(f"bad {name} block fractions ({a}, {b})")

    @classmethod
    def symmetric(cls, r, s, gamma_x, gamma_p) -> "BlockFamily":
        gx, gp = Fraction(gamma_x), Fraction(gamma_p)
        if r < 1 or s < 1:
            raise BlockError("need r, s >= 1")
        if not (0 < gx < 1 and 0 < gp < 1):
            raise BlockError("densities must lie strictly between 0 and 1")
        sites = [(Fraction(i, r), Fraction(i, r) + gx / r) for i in range(r)]
        modes = [(Fraction(j, s), Fraction(j, s) + gp / s) for j in range(s)]
        return cls(tuple(sites), tuple(modes))

    @property
    def r(self) -> int:
        return len(self.site_fractions)

    @property
    def s(self) -> int:
        return len(self.mode_fractions)

    @property
    def gamma_x(self) -> Fraction:
        return sum((b - a for a, b in self.site_fractions), Fraction(0))

    @property
    def gamma_p(self) -> Fraction:
        return sum((b - a for a, b in self.mode_fractions), Fraction(0))

    @property
    def period(self) -> int:
        """Smallest ``n`` step for which every endpoint is an integer."""
        dens = [f.denominator for pair in self.site_fractions + self.mode_fractions for f in pair]
        return reduce(math.lcm, dens, 1)

    def compatible(self, n: int) -> bool:
        return n % self.period == 0

    def configuration(self, n: int) -> Configuration:
        if not self.compatible(n):
            raise BlockError(f"n={n} is not a multiple of the family period {self.period}")
        sites = [(int(a * n), int(b * n)) for a, b in self.site_fractions]
        modes = [(int(a * n), int(b * n)) for a, b in self.mode_fractions]
        c = Configuration.from_intervals(n, sites, modes)
        if c.r != self.r or c.s != self.s:
            raise BlockError("family blocks touch; they would merge")
        return c


def nu0(c) -> float:
    """Fundamental error frequency ``2 pi gamma_x gamma_p / (r s)``."""
    if isinstance(c, BlockFamily):
        gx, gp = c.gamma_x, c.gamma_p
    else:
        gx, gp = densities(c)
    return 2.0 * math.pi * float(gx) * float(gp) / (c.r * c.s)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanRecord:
    n: int
    alpha: float
    exact: float
    prediction: float
    error: float
    wall_time: float


@dataclass
class ScanSeries:
    records: list[ScanRecord]
    family: BlockFamily | None = None

    def alphas(self) -> list[float]:
        seen = []
        for rec in self.records:
            if rec.alpha not in seen:
                seen.append(rec.alpha)
        return seen

    def for_alpha(self, alpha) -> "ScanSeries":
        alpha = float(alpha)
        return ScanSeries([r for r in self.records if r.alpha == alpha], self.family)

    def _single(self) -> "ScanSeries":
        if len(self.alphas()) != 1:
            raise ValueError(f"expected a single-alpha series, got alphas {self.alphas()}")
        return self

    @property
    def n(self) -> np.ndarray:
        return np.array([r.n for r in self.records], dtype=float)

    @property
    def exact(self) -> np.ndarray:
        return np.array([r.exact for r in self.records])

    @property
    def error(self) -> np.ndarray:
        return np.array([r.error for r in self.records])

    def __len__(self):
        return len(self.records)


def error_scan(family: BlockFamily, n_values: Sequence[int], alpha, threads: int | None = None):
    """Exact entropy vs the general asymptotic formula for each ``n``.

    ``alpha`` may be a single order or a list; occupations are computed once
    per ``n``. Records are ordered by ``alpha`` then ``n``.
    """
    alphas = [float(a) for a in np.atleast_1d(alpha)]
    n_values = sorted(int(n) for n in n_values)
    if len(set(n_values)) != len(n_values):
        raise ValueError("n values must be distinct")
    bad = [n for n in n_values if not family.compatible(n)]
    if bad:
        raise BlockError(f"n values incompatible with family period {family.period}: {bad}")

    def one(n):
        t0 = time.perf_counter()
        c = family.configuration(n)
        # alpha < 1 needs the factored occupations (see entropy.renyi)
        nu = occupation(c, "auto") if max(alphas) >= 1 else None
        pairs = occupation_pairs(c, "auto") if min(alphas) < 1 else None
        exact = [
            renyi_from_pairs(*pairs, a) if a < 1 else renyi_from_spectrum(nu, a) for a in alphas
        ]
        pred = [general_asymptotic(c, a).value for a in alphas]
        return exact, pred, time.perf_counter() - t0

    threads = threads or default_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, n_values))
    else:
        results = [one(n) for n in n_values]

    records = []
    for k, a in enumerate(alphas):
        for n, (exact, pred, secs) in zip(n_values, results):
            records.append(ScanRecord(n, a, exact[k], pred[k], exact[k] - pred[k], secs))
    return ScanSeries(records, family)


# ---------------------------------------------------------------------------
# error-law fits
# ---------------------------------------------------------------------------

class FitError(ValueError):
    pass


@dataclass(frozen=True)
class ErrorFit:
    exponent: float
    nu: float
    coefficients: tuple[float, ...]
    residual_rms: float
    # residual of every candidate frequency tried, keyed by frequency
    candidates: dict = field(default_factory=dict, compare=False, repr=False)

    def model(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        k = np.arange(len(self.coefficients))
        return np.cos(np.outer(n, k) * self.nu) @ np.array(self.coefficients) * n**-self.exponent


def envelope_exponent(n, err) -> float:
    """Decay exponent of ``|err|`` from a log-log fit through its local maxima.

    Falls back to all points when fewer than three local maxima exist
    (monotone data).
    """
    n = np.asarray(n, dtype=float)
    a = np.abs(np.asarray(err, dtype=float))
    if len(n) < 2:
        raise FitError("need at least two points for an envelope")
    idx = [
        i for i in range(len(a))
        if (i == 0 or a[i] >= a[i - 1]) and (i == len(a) - 1 or a[i] >= a[i + 1])
    ]
    if len(idx) < 3:
        idx = list(range(len(a)))
    idx = [i for i in idx if a[i] > 0]
    if len(idx) < 2:
        raise FitError("envelope has fewer than two nonzero points")
    slope = np.polyfit(np.log(n[idx]), np.log(a[idx]), 1)[0]
    return float(-slope)


def frequency_candidates(r, s, gamma_x, gamma_p, max_part=None) -> list[float]:
    """``nu0 * m / k`` for ``1 <= m, k <= max_part`` (default ``r * s``), deduplicated."""
    base = 2.0 * math.pi * float(gamma_x) * float(gamma_p) / (r * s)
    top = max_part or r * s
    fracs = sorted({Fraction(m, k) for m in range(1, top + 1) for k in range(1, top + 1)})
    return [base * float(f) for f in fracs]


def _fold(nu, step):
    """Representative of ``nu`` in ``[0, pi/step]`` under sampling on multiples of ``step``."""
    period = 2.0 * math.pi / step
    x = nu % period
    return min(x, period - x)


def _design(n, nu, kmax):
    return np.cos(np.outer(n, np.arange(kmax + 1)) * nu)


def _weighted_fit(n, err, nu, kmax, p, p_ref):
    x = _design(n, nu, kmax) * n[:, None] ** (p_ref - p)
    y = err * n**p_ref
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ coef
    return coef, float(np.sqrt(np.mean(resid**2)))


def fit_error_law(
    series: ScanSeries,
    exponent_hint: float | None = None,
    nu_candidates: Sequence[float] | None = None,
    kmax: int = 2,
) -> ErrorFit:
    """Fit ``err(N) ~ N^(-p) sum_k a_k cos(k nu N)`` over candidate frequencies.

    For each candidate the coefficients come from linear least squares on
    ``err * N^p``; the candidate with the smallest residual wins. Candidates
    that are indistinguishable on the sampled ``N`` lattice are merged,
    keeping the lowest frequency. Without ``exponent_hint`` the exponent
    starts from :func:`envelope_exponent` and is refined per candidate by
    minimizing the weighted residual.
    """
    series._single()
    if kmax < 0:
        raise FitError("kmax must be nonnegative")
    n = series.n
    err = series.error
    if len(n) < 4 * (kmax + 1):
        raise FitError(f"need at least {4 * (kmax + 1)} records for kmax={kmax}, got {len(n)}")
    if nu_candidates is None:
        fam = series.family
        if fam is None:
            raise FitError("no frequency candidates given and the series has no family")
        nu_candidates = frequency_candidates(fam.r, fam.s, fam.gamma_x, fam.gamma_p)

    step = reduce(math.gcd, (int(v) for v in n))
    folded = {}
    for nu in sorted(float(v) for v in nu_candidates):
        key = round(_fold(nu, step), 12)
        folded.setdefault(key, nu)

    p0 = float(exponent_hint) if exponent_hint is not None else envelope_exponent(n, err)
    best = None
    tried = {}
    for nu in folded.values():
        if np.linalg.matrix_rank(_design(n, nu, kmax)) < kmax + 1:
            continue
        if exponent_hint is None:
            res = optimize.minimize_scalar(
                lambda p: _weighted_fit(n, err, nu, kmax, p, p0)[1],
                bounds=(p0 - 0.5, p0 + 0.5),
                method="bounded",
                options={"xatol": 1e-10},
            )
            p = float(res.x)
        else:
            p = p0
        coef, rms = _weighted_fit(n, err, nu, kmax, p, p)
        # rank on the weighting of the starting exponent, common to all candidates
        score = _weighted_fit(n, err, nu, kmax, p, p0)[1]
        tried[nu] = score
        if best is None or score < best[0] * (1 - 1e-9):
            best = (score, ErrorFit(p, nu, tuple(float(a) for a in coef), rms))
    if best is None:
        raise FitError("every candidate frequency gives a degenerate design matrix")
    fit = best[1]
    return ErrorFit(fit.exponent, fit.nu, fit.coefficients, fit.residual_rms, tried)


def central_charge_fit(series: ScanSeries) -> float:
    """Slope of the exact entropy against ``log N``, in units of ``b_alpha``."""
    series._single()
    n = series.n
    if len(n) < 5:
        raise FitError("need at least 5 records")
    if n.max() / n.min() < 8:
        raise FitError("n must span at least a factor 8")
    slope = np.polyfit(np.log(n), series.exact, 1)[0]
    return float(slope / b_alpha(series.records[0].alpha))


# ---------------------------------------------------------------------------
# maximization of the geometric factor
# ---------------------------------------------------------------------------

def _g_side(lengths, gaps) -> float:
    """Sum of log sin(len/2) plus log cross-ratio product, blocks laid out from 0."""
    lengths = np.asarray(lengths, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    if np.any(lengths <= 0) or np.any(gaps <= 0):
        return -np.inf
    u = np.concatenate(([0.0], np.cumsum(lengths + gaps)[:-1]))
    v = u + lengths
    total = float(np.sum(np.log(np.sin(0.5 * lengths))))
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            total += (
                math.log(math.sin(0.5 * (v[j] - u[i])))
                + math.log(math.sin(0.5 * (u[j] - v[i])))
                - math.log(math.sin(0.5 * (u[j] - u[i])))
                - math.log(math.sin(0.5 * (v[j] - v[i])))
            )
    return total


def _ascend(lengths, gaps, tol=1e-14, max_sweeps=500):
    """Coordinate ascent over mass transfers between neighbouring lengths (or gaps)."""
    x = np.concatenate([lengths, gaps]).astype(float)
    r = len(lengths)
    pairs = [(i, i + 1) for i in range(r - 1)] + [(r + i, r + i + 1) for i in range(r - 1)]

    def value(z):
        return _g_side(z[:r], z[r:])

    current = value(x)
    for _ in range(max_sweeps):
        start = current
        for i, j in pairs:
            a, b = x[i], x[j]

            def neg(t, i=i, j=j, a=a, b=b):
                z = x.copy()
                z[i], z[j] = a + t, b - t
                return -value(z)

            span = a + b
            res = optimize.minimize_scalar(
                neg, bounds=(-a + 1e-12 * span, b - 1e-12 * span), method="bounded",
                options={"xatol": 1e-13},
            )
            if -res.fun > current:
                x[i], x[j] = a + res.x, b - res.x
                current = -res.fun
        if current - start <= tol:
            break
    return x[:r], x[r:], current


def _maximize_side(r, gamma, resolution, rng, restarts):
    total = 2.0 * math.pi * gamma
    rest = 2.0 * math.pi - total
    if r == 1:
        return np.array([total]), np.array([rest]), math.log(math.sin(0.5 * total))
    starts = []
    if r == 2:
        grid_t = (np.arange(resolution) + 0.5) / resolution * total
        grid_d = (np.arange(resolution) + 0.5) / resolution * rest
        best = max(
            ((_g_side([t, total - t], [d, rest - d]), t, d) for t in grid_t for d in grid_d),
            key=lambda item: item[0],
        )
        starts.append((np.array([best[1], total - best[1]]), np.array([best[2], rest - best[2]])))
    else:
        for _ in range(restarts):
            starts.append((rng.dirichlet(np.ones(r)) * total, rng.dirichlet(np.ones(r)) * rest))
    results = [_ascend(l, g) for l, g in starts]
    return max(results, key=lambda item: item[2])


@dataclass(frozen=True)
class MaxResult:
    site_lengths: tuple[float, ...]
    site_gaps: tuple[float, ...]
    mode_lengths: tuple[float, ...]
    mode_gaps: tuple[float, ...]
    g_sites: float
    g_modes: float

    @property
    def g(self) -> float:
        return len(self.mode_lengths) * self.g_sites + len(self.site_lengths) * self.g_modes

    @staticmethod
    def _layout(lengths, gaps):
        out, u = [], 0.0
        for l, d in zip(lengths, gaps):
            out.append((u, u + l))
            u += l + d
        return tuple(out)

    def site_angles(self):
        return self._layout(self.site_lengths, self.site_gaps)

    def mode_angles(self):
        return self._layout(self.mode_lengths, self.mode_gaps)

    def to_configuration(self, n: int, site_offset: int = 0, mode_offset: int = 0) -> Configuration:
        """Snap the optimal angles to integer endpoints on a chain of ``n`` sites."""
        return Configuration(
            n,
            _snap(self.site_lengths, self.site_gaps, n, site_offset),
            _snap(self.mode_lengths, self.mode_gaps, n, mode_offset),
        )


def _apportion(weights, total):
    """Largest-remainder rounding of ``weights`` to positive integers summing to ``total``."""
    w = np.asarray(weights, dtype=float)
    raw = w / w.sum() * total
    out = np.maximum(np.floor(raw).astype(int), 1)
    while out.sum() < total:
        out[np.argmax(raw - out)] += 1
    while out.sum() > total:
        cand = np.where(out > 1, raw - out, np.inf)
        out[np.argmin(cand)] -= 1
    return out


def _snap(lengths, gaps, n, offset):
    ln = int(round(sum(lengths) / (2.0 * math.pi) * n))
    lens = _apportion(lengths, ln)
    gps = _apportion(gaps, n - ln)
    raw, u = [], offset
    for l, d in zip(lens, gps):
        raw.append((u, u + int(l)))
        u += int(l) + int(d)
    return canonicalize(raw, n)


def maximize_geometric_factor(r, s, gamma_x, gamma_p, grid_resolution=32, seed=0, restarts=None):
    """Maximize the geometric factor over block layouts at fixed ``r, s`` and densities.

    The problem separates into positions and momenta. Two blocks get a full
    grid over (first length, first gap) then coordinate ascent; three or more
    blocks use seeded random starts followed by ascent (heuristic only).
    """
    gx, gp = float(gamma_x), float(gamma_p)
    if r < 1 or s < 1:
        raise ValueError("need r, s >= 1")
    if not (0 < gx < 1 and 0 < gp < 1):
        raise ValueError("densities must lie strictly between 0 and 1")
    if grid_resolution < 8:
        raise ValueError("grid_resolution must be at least 8")
    rng = np.random.default_rng(seed)
    restarts = restarts or grid_resolution
    sl, sg, g1 = _maximize_side(r, gx, grid_resolution, rng, restarts)
    ml, mg, g2 = _maximize_side(s, gp, grid_resolution, rng, restarts)
    return MaxResult(tuple(sl), tuple(sg), tuple(ml), tuple(mg), g1, g2)

"""Unions of disjoint intervals on the ring Z_N.

A ``BlockSet`` stores its intervals as ``(start, length)`` pairs sorted by
start. Touching intervals are merged. At most one interval may run past
``n - 1``; it is then stored unwrapped (``start + length > n``) and is always
the last one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BlockSet",
    "Configuration",
    "BlockError",
    "canonicalize",
    "from_sites",
    "complement",
    "union",
    "angles",
    "symmetric_config",
    "densities",
    "random_blockset",
    "random_configuration",
]

AngleList = tuple[tuple[float, float], ...]


class BlockError(ValueError):
    """Invalid block data (overlap, empty interval, bad chain length...)."""


@dataclass(frozen=True)
class BlockSet:
    n: int
    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n <= 0:
            raise BlockError(f"chain length must be positive, got {self.n}")
        canon = _runs(_occupancy(self.intervals, self.n), self.n)
        if canon != tuple(self.intervals):
            raise BlockError(
                f"intervals {self.intervals} are not in canonical form; use canonicalize()"
            )

    @property
    def size(self) -> int:
        return sum(length for _, length in self.intervals)

    @property
    def block_count(self) -> int:
        return len(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_full(self) -> bool:
        return self.size == self.n

    def sites(self) -> np.ndarray:
        """Member indices in ascending order."""
        if not self.intervals:
            return np.zeros(0, dtype=np.int64)
        idx = np.concatenate(
            [np.arange(s, s + l, dtype=np.int64) % self.n for s, l in self.intervals]
        )
        return np.sort(idx)

    def mask(self) -> np.ndarray:
        return _occupancy(self.intervals, self.n)

    def endpoints(self) -> list[tuple[int, int]]:
        """Integer ``(U, V)`` pairs in cyclic order with ``0 <= U_1 < V_1 < ... <= n``.

        A wrapping interval is rotated to the front so that every pairwise
        difference lies in ``(0, n)``.
        """
        iv = list(self.intervals)
        if iv and iv[-1][0] + iv[-1][1] > self.n:
            shift = iv[-1][0]
            iv = [iv[-1]] + iv[:-1]
            return [((s - shift) % self.n, (s - shift) % self.n + l) for s, l in iv]
        return [(s, s + l) for s, l in iv]

    def lengths(self) -> list[int]:
        return [l for _, l in self.intervals]

    def rotated(self, shift: int) -> "BlockSet":
        return canonicalize([(s + shift, s + shift + l) for s, l in self.intervals], self.n)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask()[x % self.n])


@dataclass(frozen=True)
class Configuration:
    """Chain length plus the subsystem sites ``A`` and the excited modes ``K``."""

    n: int
    sites: BlockSet
    modes: BlockSet

    def __post_init__(self):
        if self.sites.n != self.n or self.modes.n != self.n:
            raise BlockError(
                f"block sets live on Z_{self.sites.n} and Z_{self.modes.n}, expected Z_{self.n}"
            )

    @classmethod
    def from_intervals(cls, n, sites, modes) -> "Configuration":
        return cls(n, canonicalize(sites, n), canonicalize(modes, n))

    @property
    def trivial(self) -> bool:
        """True when the entropy vanishes identically (empty or full A or K)."""
        return (
            self.sites.is_empty or self.sites.is_full or self.modes.is_empty or self.modes.is_full
        )

    def swapped(self) -> "Configuration":
        return Configuration(self.n, self.modes, self.sites)

    def with_sites(self, sites: BlockSet) -> "Configuration":
        return Configuration(self.n, sites, self.modes)

    def with_modes(self, modes: BlockSet) -> "Configuration":
        return Configuration(self.n, self.sites, modes)

    @property
    def r(self) -> int:
        return self.sites.block_count

    @property
    def s(self) -> int:
        return self.modes.block_count


def _occupancy(intervals: Iterable[tuple[int, int]], n: int) -> np.ndarray:
    occ = np.zeros(n, dtype=np.int64)
    for start, length in intervals:
        if length <= 0:
            raise BlockError(f"empty interval starting at {start}")
        if length > n:
            raise BlockError(f"interval of length {length} does not fit on Z_{n}")
        idx = np.arange(start, start + length) % n
        occ[idx] += 1
    if occ.max(initial=0) > 1:
        raise BlockError("intervals overlap after reduction mod n")
    return occ.astype(bool)


def _runs(occ: np.ndarray, n: int) -> tuple[tuple[int, int], ...]:
    if occ.all():
        return ((0, n),)
    if not occ.any():
        return ()
    padded = np.concatenate(([False], occ, [False])).astype(np.int8)
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    runs = [(int(a), int(b - a)) for a, b in zip(starts, ends)]
    if occ[0] and occ[-1] and len(runs) > 1:
        head = runs.pop(0)
        last_start, last_len = runs.pop()
        runs.append((last_start, last_len + head[1]))
    return tuple(runs)


def canonicalize(raw_intervals: Iterable[Sequence[int]], n: int) -> BlockSet:
    """Build a canonical ``BlockSet`` from half-open ``[start, end)`` pairs.

    Endpoints are reduced mod ``n``; adjacent intervals are merged.

    >>> canonicalize([[4, 6], [6, 8]], 12).intervals
    ((4, 4),)
    >>> canonicalize([[10, 14]], 12).intervals
    ((10, 4),)
    """
    n = int(n)
    if n <= 0:
        raise BlockError(f"chain length must be positive, got {n}")
    pairs = []
    for item in raw_intervals:
        start, end = int(item[0]), int(item[1])
        if end <= start:
            raise BlockError(f"empty interval [{start}, {end})")
        pairs.append((start % n, end - start))
    return BlockSet(n, _runs(_occupancy(pairs, n), n))


def from_sites(indices: Iterable[int], n: int) -> BlockSet:
    """BlockSet containing exactly the given sites (duplicates are an error)."""
    return canonicalize([(int(i), int(i) + 1) for i in indices], n)


def complement(b: BlockSet) -> BlockSet:
    if b.is_empty or b.is_full:
        raise BlockError("complement needs a set that is neither empty nor full")
    return BlockSet(b.n, _runs(~b.mask(), b.n))


def union(*parts: BlockSet) -> BlockSet:
    """Disjoint union; raises ``BlockError`` when two parts overlap."""
    if not parts:
        raise BlockError("union of nothing")
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise BlockError("parts live on different rings")
    return canonicalize(
        [(s, s + l) for p in parts for s, l in p.intervals], n
    )


def angles(b: BlockSet) -> AngleList:
    """Continuum angles ``(u_i, v_i) = 2*pi*(U_i, V_i)/n``.

    Computed from the integer endpoints at call time. A wrapping block is
    rotated to ``u_1 = 0``.
    """
    return tuple(
        (2.0 * math.pi * u / b.n, 2.0 * math.pi * v / b.n) for u, v in b.endpoints()
    )


def symmetric_config(n: int, r: int, gamma, offset: int = 0) -> BlockSet:
    """``r`` equally spaced blocks of total density ``gamma``.

    >>> symmetric_config(12, 3, Fraction(1, 4)).intervals
    ((0, 1), (4, 1), (8, 1))
    """
    gamma = Fraction(gamma)
    if r < 1:
        raise BlockError(f"need at least one block, got r={r}")
    if not 0 < gamma <= 1:
        raise BlockError(f"density must lie in (0, 1], got {gamma}")
    if n % r:
        raise BlockError(f"n={n} is not divisible by r={r}")
    length = gamma * n / r
    if length.denominator != 1:
        raise BlockError(f"block length gamma*n/r = {length} is not an integer for n={n}")
    period = n // r
    length = int(length)
    if length == period and r > 1:
        return canonicalize([(offset, offset + n)], n)
    return canonicalize(
        [(offset + i * period, offset + i * period + length) for i in range(r)], n
    )


def densities(c: Configuration) -> tuple[Fraction, Fraction]:
    """Filling fractions ``(L/N, M/N)`` as exact rationals."""
    return Fraction(c.sites.size, c.n), Fraction(c.modes.size, c.n)


def random_blockset(rng: np.random.Generator, n: int, size: int | None = None) -> BlockSet:
    """Random nontrivial subset of Z_n.

    Half the draws are arbitrary subsets, half are unions of a few blocks.
    """
    if n < 2:
        raise BlockError("need n >= 2 for a nontrivial subset")
    if size is None:
        size = int(rng.integers(1, n))
    if rng.random() < 0.5:
        return from_sites(rng.choice(n, size=size, replace=False), n)
    nblocks = int(rng.integers(1, min(size, n - size, 4) + 1))
    # split size into nblocks positive lengths and n - size into nblocks positive gaps
    lengths = _composition(rng, size, nblocks)
    gaps = _composition(rng, n - size, nblocks)
    start = int(rng.integers(0, n))
    raw = []
    for length, gap in zip(lengths, gaps):
        raw.append((start, start + length))
        start += length + gap
    return canonicalize(raw, n)


def _composition(rng: np.random.Generator, total: int, parts: int) -> list[int]:
    cuts = np.sort(rng.choice(np.arange(1, total), size=parts - 1, replace=False)) if parts > 1 else []
    edges = [0, *map(int, cuts), total]
    return [b - a for a, b in zip(edges[:-1], edges[1:])]


def random_configuration(rng: np.random.Generator, n: int) -> Configuration:
    return Configuration(n, random_blockset(rng, n), random_blockset(rng, n))

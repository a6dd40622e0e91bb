"""Fixed total-S^z sector bases for chains of spin-1/2 or spin-1 sites.

A configuration is stored as a single integer: site ``j`` owns bit ``j``
(spin-1/2, 1 = up) or base-3 digit ``j`` (spin-1, digits 0, 1, 2 for
m = -1, 0, +1).  Sector states are kept sorted, which is what makes the
split ranking tables below work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

class SectorError(ValueError):
    pass


@dataclass(frozen=True)
class SiteKind:
    local_dim: int

    def __post_init__(self):
        if self.local_dim not in (2, 3):
            raise SectorError(f"local_dim must be 2 or 3, got {self.local_dim}")

    @property
    def two_m(self) -> np.ndarray:
        """Twice the local S^z eigenvalue for each digit."""
        return np.array([-1, 1]) if self.local_dim == 2 else np.array([-2, 0, 2])

    @property
    def spin(self) -> float:
        return (self.local_dim - 1) / 2

    def __repr__(self):
        return "SPIN_HALF" if self.local_dim == 2 else "SPIN_ONE"


SPIN_HALF = SiteKind(2)
SPIN_ONE = SiteKind(3)


def _enumerate(d: int, length: int, n_raise: int) -> np.ndarray:
    """Sorted configurations of ``length`` sites whose digit sum is ``n_raise``.

    Built site by site: appending a new most-significant digit t to every block
    and concatenating blocks in order of t keeps each level sorted.
    """
    level = {0: np.zeros(1, dtype=np.int64)}
    for ell in range(1, length + 1):
        lo = max(0, n_raise - (d - 1) * (length - ell))
        hi = min(n_raise, (d - 1) * ell)
        top = d ** (ell - 1)
        nxt = {}
        for n in range(lo, hi + 1):
            blocks = [level[n - t] + t * top for t in range(d) if n - t in level]
            nxt[n] = np.concatenate(blocks) if blocks else np.empty(0, dtype=np.int64)
        level = nxt
    return level.get(n_raise, np.empty(0, dtype=np.int64))


def sector_dimension(site_kind: SiteKind, length: int, two_sz_total: int) -> int:
    """Combinatorial size of a sector without enumerating it."""
    d = site_kind.local_dim
    n_raise = _digit_sum(site_kind, length, two_sz_total)
    if n_raise is None:
        return 0
    if d == 2:
        return comb(length, n_raise)
    total = 0
    shift = n_raise - length  # (#plus) - (#minus)
    for n_plus in range(length + 1):
        n_minus = n_plus - shift
        if n_minus < 0 or n_plus + n_minus > length:
            continue
        total += comb(length, n_plus) * comb(length - n_plus, n_minus)
    return total


def _digit_sum(site_kind: SiteKind, length: int, two_sz_total: int) -> int | None:
    # spin-1/2: 2S^z = 2n - L;  spin-1: 2S^z = 2(n - L)
    if site_kind.local_dim == 2:
        if (two_sz_total + length) % 2:
            return None
        n = (two_sz_total + length) // 2
        return n if 0 <= n <= length else None
    if two_sz_total % 2:
        return None
    n = two_sz_total // 2 + length
    return n if 0 <= n <= 2 * length else None


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Sorted sector configurations plus split ranking tables.

    The configuration value splits as ``hi * d**split + lo``.  Because states
    are sorted, those sharing ``hi`` are contiguous and ordered by ``lo``, so
    ``index = hi_offset[hi] + lo_rank[lo]``.  Both tables have about
    ``d**(L/2)`` entries and stay cache resident even at L = 24.
    """

    site_kind: SiteKind
    length: int
    two_sz_total: int
    states: np.ndarray = field(repr=False)
    split: int = field(repr=False)
    lo_rank: np.ndarray = field(repr=False)
    hi_offset: np.ndarray = field(repr=False)
    lo_digits: np.ndarray = field(repr=False)
    hi_digits: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.states.size

    def __len__(self):
        return self.states.size

    @property
    def local_dim(self) -> int:
        return self.site_kind.local_dim

    def state_at(self, k: int) -> int:
        return int(self.states[k])

    def digits(self, config: int) -> list[int]:
        d = self.local_dim
        return [int(config // d**j) % d for j in range(self.length)]

    def encode(self, digits) -> int:
        d = self.local_dim
        return int(sum(int(x) * d**j for j, x in enumerate(digits)))

    def lookup(self, configs) -> np.ndarray:
        """Vectorized index lookup; -1 marks configurations outside the sector."""
        configs = np.atleast_1d(np.asarray(configs, dtype=np.int64))
        d = self.local_dim
        lo_size = d**self.split
        ok = (configs >= 0) & (configs < d**self.length)
        c = np.where(ok, configs, 0)
        hi, lo = c // lo_size, c % lo_size
        n_target = _digit_sum(self.site_kind, self.length, self.two_sz_total)
        ok &= self.lo_digits[lo].sum(axis=1) + self.hi_digits[hi].sum(axis=1) == n_target
        return np.where(ok, self.hi_offset[hi].astype(np.int64) + self.lo_rank[lo], -1)

    def kernel_args(self) -> tuple:
        """Positional arguments shared by the numba kernels."""
        d = self.local_dim
        sites = np.arange(self.length)
        half_pow = (d ** np.where(sites < self.split, sites, sites - self.split)).astype(np.int64)
        return (
            self.states, d**self.split, self.split, self.lo_rank, self.hi_offset,
            self.lo_digits, self.hi_digits, d, half_pow,
        )

    def compatible(self, other: "SectorBasis") -> bool:
        return self is other or (
            self.site_kind == other.site_kind
            and self.length == other.length
            and self.two_sz_total == other.two_sz_total
        )


def _all_digits(d: int, n_sites: int) -> np.ndarray:
    vals = np.arange(d**n_sites, dtype=np.int64)
    return np.stack([(vals // d**j) % d for j in range(n_sites)], axis=1).astype(np.int8).reshape(d**n_sites, n_sites)


def build_sector(site_kind: SiteKind, length: int, two_sz_total: int = 0) -> SectorBasis:
    """Enumerate the ``two_sz_total`` sector of ``length`` sites."""
    if not isinstance(site_kind, SiteKind):
        site_kind = SiteKind(int(site_kind))
    if length < 2:
        raise SectorError(f"length must be >= 2, got {length}")
    n_raise = _digit_sum(site_kind, length, two_sz_total)
    if n_raise is None:
        raise SectorError(
            f"2S^z = {two_sz_total} is unreachable for {length} sites of {site_kind!r}"
        )
    d = site_kind.local_dim
    states = _enumerate(d, length, n_raise)
    states.setflags(write=False)

    split = length // 2
    lo_digits = _all_digits(d, split)
    hi_digits = _all_digits(d, length - split)
    lo_sum = lo_digits.sum(axis=1)
    hi_sum = hi_digits.sum(axis=1)
    lo_rank = np.zeros(lo_sum.size, dtype=np.int64)
    lo_count = np.zeros((d - 1) * split + 1, dtype=np.int64)
    for v, s in enumerate(lo_sum):
        lo_rank[v] = lo_count[s]
        lo_count[s] += 1
    need = n_raise - hi_sum
    valid = (need >= 0) & (need < lo_count.size)
    block = np.where(valid, lo_count[np.clip(need, 0, lo_count.size - 1)], 0)
    hi_offset = np.concatenate([[0], np.cumsum(block)[:-1]])
    hi_offset = np.where(valid & (block > 0), hi_offset, -1).astype(np.int64)
    for arr in (lo_rank, hi_offset, lo_digits, hi_digits):
        arr.setflags(write=False)
    return SectorBasis(site_kind, length, two_sz_total, states, split, lo_rank, hi_offset, lo_digits, hi_digits)


def index_of(basis: SectorBasis, config: int) -> int:
    idx = int(basis.lookup(config)[0])
    if idx < 0:
        raise SectorError(f"configuration {config} is not in sector 2S^z={basis.two_sz_total}")
    return idx

"""Two-site operators, bond lists for the three chain models, and H|psi>.

Every Hamiltonian here is a sum of dense two-site terms.  Terms that share a
site pair are merged into one (d^2 x d^2) matrix before application, so the
bilinear-biquadratic bond costs the same as a plain exchange bond.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .basis import SPIN_HALF, SPIN_ONE, SectorBasis, SiteKind


class ModelError(ValueError):
    pass


def spin_matrices(local_dim: int):
    """(Sz, S+, S-) in the digit basis, lowest m first."""
    s = (local_dim - 1) / 2
    m = np.arange(local_dim) - s
    sz = np.diag(m)
    sp = np.zeros((local_dim, local_dim))
    for k in range(local_dim - 1):
        sp[k + 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    return sz, sp, sp.T.copy()


def _exchange(local_dim: int) -> np.ndarray:
    sz, sp, sm = spin_matrices(local_dim)
    return np.kron(sz, sz) + 0.5 * (np.kron(sp, sm) + np.kron(sm, sp))


class OperatorKind(Enum):
    EXCHANGE_HALF = "exchange_half"  # sigma_i . sigma_j
    EXCHANGE_ONE = "exchange_one"  # S_i . S_j
    BIQUAD_ONE = "biquad_one"  # (S_i . S_j)^2

    @property
    def site_kind(self) -> SiteKind:
        return SPIN_HALF if self is OperatorKind.EXCHANGE_HALF else SPIN_ONE

    @property
    def matrix(self) -> np.ndarray:
        return _KIND_MATRICES[self]


_KIND_MATRICES = {
    OperatorKind.EXCHANGE_HALF: 4.0 * _exchange(2),
    OperatorKind.EXCHANGE_ONE: _exchange(3),
}
_KIND_MATRICES[OperatorKind.BIQUAD_ONE] = _KIND_MATRICES[OperatorKind.EXCHANGE_ONE] @ _KIND_MATRICES[OperatorKind.EXCHANGE_ONE]
for _m in _KIND_MATRICES.values():
    _m.setflags(write=False)


def conserves_sz(matrix: np.ndarray, local_dim: int) -> bool:
    two_m = np.arange(local_dim)
    pair_m = (two_m[:, None] + two_m[None, :]).ravel()
    rows, cols = np.nonzero(np.abs(matrix) > 0)
    return bool(np.all(pair_m[rows] == pair_m[cols]))


assert all(conserves_sz(k.matrix, k.site_kind.local_dim) for k in OperatorKind)


@dataclass(frozen=True)
class Bond:
    i: int
    j: int
    coefficient: float
    kind: OperatorKind


@dataclass(frozen=True, eq=False)
class BondList:
    bonds: tuple[Bond, ...]
    site_kind: SiteKind
    length: int
    model: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for b in self.bonds:
            if not (0 <= b.i < self.length and 0 <= b.j < self.length) or b.i == b.j:
                raise ModelError(f"bad site pair ({b.i}, {b.j}) for length {self.length}")
            if b.kind.site_kind != self.site_kind:
                raise ModelError(f"{b.kind} does not act on {self.site_kind!r} sites")

    def __len__(self):
        return len(self.bonds)

    def __iter__(self):
        return iter(self.bonds)

    def coefficients(self, kind: OperatorKind | None = None, pair_span: int | None = None):
        return [
            b.coefficient
            for b in self.bonds
            if (kind is None or b.kind is kind) and (pair_span is None or abs(b.j - b.i) == pair_span)
        ]

    def compiled(self, split: int) -> tuple[np.ndarray, ...]:
        """Kernel tables for a basis whose configurations split at site ``split``.

        Terms on the same site pair are summed first.  Returns
        (site_i, site_j, diag, start, d_lo, d_hi, val) as documented in
        ``_kernels.apply_pairs``.
        """
        cache = self.__dict__.setdefault("_compiled", {})
        if split in cache:
            return cache[split]
        d = self.site_kind.local_dim
        dd = d * d
        mats = self.dense_pair_matrices()
        pairs = list(mats)

        def shift(site, step):
            # digit step at ``site`` as (lo, hi) index shifts
            if site < split:
                return step * d**site, 0
            return 0, step * d ** (site - split)

        diag, start, d_lo, d_hi, val = [], [0], [], [], []
        for i, j in pairs:
            m = mats[(i, j)]
            for a in range(dd):
                diag.append(m[a, a])
                for t in np.nonzero(m[:, a])[0]:
                    if t == a:
                        continue
                    lo_i, hi_i = shift(i, t // d - a // d)
                    lo_j, hi_j = shift(j, t % d - a % d)
                    d_lo.append(lo_i + lo_j)
                    d_hi.append(hi_i + hi_j)
                    val.append(m[t, a])
                start.append(len(val))
        out = (
            np.array([p[0] for p in pairs], dtype=np.int64),
            np.array([p[1] for p in pairs], dtype=np.int64),
            np.array(diag, dtype=np.float64),
            np.array(start, dtype=np.int64),
            np.array(d_lo, dtype=np.int64),
            np.array(d_hi, dtype=np.int64),
            np.array(val, dtype=np.float64),
        )
        cache[split] = out
        return out

    def dense_pair_matrices(self) -> dict[tuple[int, int], np.ndarray]:
        dd = self.site_kind.local_dim ** 2
        acc: dict[tuple[int, int], np.ndarray] = {}
        for b in self.bonds:
            acc.setdefault((b.i, b.j), np.zeros((dd, dd)))
            acc[(b.i, b.j)] += b.coefficient * b.kind.matrix
        return acc


@dataclass(frozen=True, eq=False)
class Wavefunction:
    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (self.basis.dim,):
            raise ModelError(
                f"amplitude vector of shape {self.amplitudes.shape} does not match sector dim {self.basis.dim}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Wavefunction":
        return Wavefunction(self.basis, self.amplitudes / self.norm())


# --- model parameters -------------------------------------------------------


@dataclass(frozen=True)
class DimerFrustrationParams:
    length: int
    delta: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.length < 4 or self.length % 2:
            raise ModelError(f"dimerized chain needs an even length >= 4, got {self.length}")
        if not abs(self.delta) < 1:
            raise ModelError(f"|delta| must be < 1 (degenerate limit), got {self.delta}")


@dataclass(frozen=True)
class BlbqParams:
    length: int
    beta: float

    def __post_init__(self):
        if self.length < 2:
            raise ModelError(f"length must be >= 2, got {self.length}")


@dataclass(frozen=True)
class ProbeParams:
    length: int
    d: int
    jp: float

    def __post_init__(self):
        if self.length < 3:
            raise ModelError(f"periodic chain needs length >= 3, got {self.length}")
        if not 1 <= self.d <= self.length // 2:
            raise ModelError(f"probe offset d must lie in [1, {self.length // 2}], got {self.d}")

    @property
    def sites(self) -> int:
        return self.length + 2

    @property
    def probe_a(self) -> int:
        return self.length

    @property
    def probe_b(self) -> int:
        return self.length + 1


def build_dimer_frustrated(p: DimerFrustrationParams) -> BondList:
    L = p.length
    ex = OperatorKind.EXCHANGE_HALF
    # bond j (1-based) joins sites j-1 and j
    bonds = [Bond(j - 1, j, 1.0 + p.delta * (-1) ** j, ex) for j in range(1, L)]
    if p.alpha != 0:
        bonds += [Bond(j - 1, j + 1, float(p.alpha), ex) for j in range(1, L - 1)]
    return BondList(tuple(bonds), SPIN_HALF, L, "dimer", {"L": L, "delta": p.delta, "alpha": p.alpha})


def build_blbq(p: BlbqParams) -> BondList:
    bonds = []
    for i in range(p.length - 1):
        bonds.append(Bond(i, i + 1, 1.0, OperatorKind.EXCHANGE_ONE))
        bonds.append(Bond(i, i + 1, float(p.beta), OperatorKind.BIQUAD_ONE))
    return BondList(tuple(bonds), SPIN_ONE, p.length, "blbq", {"L": p.length, "beta": p.beta})


def build_probed_heisenberg(p: ProbeParams) -> BondList:
    L = p.length
    ex = OperatorKind.EXCHANGE_HALF
    bonds = [Bond(i, (i + 1) % L, 1.0, ex) for i in range(L)]
    bonds.append(Bond(0, p.probe_a, float(p.jp), ex))
    bonds.append(Bond(p.d, p.probe_b, float(p.jp), ex))
    return BondList(tuple(bonds), SPIN_HALF, p.sites, "probes", {"L": L, "d": p.d, "jp": p.jp})


# --- application --------------------------------------------------------------


def check_compatible(bonds: BondList, basis: SectorBasis):
    if bonds.site_kind != basis.site_kind or bonds.length != basis.length:
        raise ModelError(
            f"bond list ({bonds.site_kind!r}, L={bonds.length}) does not match "
            f"basis ({basis.site_kind!r}, L={basis.length})"
        )


def apply_array(bonds: BondList, basis: SectorBasis, x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    check_compatible(bonds, basis)
    if out is None:
        out = np.empty(basis.dim)
    _kernels.apply_pairs(
        *basis.kernel_args()[:-1], *bonds.compiled(basis.split),
        np.ascontiguousarray(x, dtype=np.float64), out,
    )
    return out


def apply(bonds: BondList, psi: Wavefunction) -> Wavefunction:
    """H|psi> computed term by term on the sector, never forming H."""
    return Wavefunction(psi.basis, apply_array(bonds, psi.basis, psi.amplitudes))


def assemble_csr(bonds: BondList, basis: SectorBasis) -> sp.csr_matrix:
    """The sector Hamiltonian as a CSR matrix, built from the same pair tables as apply()."""
    check_compatible(bonds, basis)
    args = (*basis.kernel_args()[:-1], *bonds.compiled(basis.split))
    counts = np.empty(basis.dim, dtype=np.int64)
    _kernels.csr_row_counts(*args, counts)
    nnz = int(counts.sum())
    itype = np.int32 if nnz < 2**31 and basis.dim < 2**31 else np.int64
    indptr = np.zeros(basis.dim + 1, dtype=itype)
    np.cumsum(counts, out=indptr[1:])
    del counts
    indices = np.empty(nnz, dtype=itype)
    data = np.empty(nnz)
    _kernels.csr_fill(*args, indptr, indices, data)
    return sp.csr_matrix((data, indices, indptr), shape=(basis.dim, basis.dim), copy=False)


def csr_nnz_estimate(bonds: BondList, basis: SectorBasis) -> int:
    """Upper bound on stored entries: one diagonal plus the widest column per pair."""
    _, _, _, start, *_ = bonds.compiled(basis.split)
    widest = np.diff(start).reshape(-1, basis.local_dim**2).max(axis=1).sum()
    return int(basis.dim * (1 + widest))

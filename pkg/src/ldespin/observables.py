"""Diagonal spin correlators and two-site reduced density matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .models import Wavefunction

PSD_CLIP = 1e-10


class ObservableError(ValueError):
    pass


def _check_site(psi: Wavefunction, site: int):
    if not 0 <= site < psi.basis.length:
        raise ObservableError(f"site {site} out of range for length {psi.basis.length}")


def local_values(psi: Wavefunction, op: str) -> np.ndarray:
    """Eigenvalues of a diagonal one-site operator per digit.

    ``"sz"`` is S^z for spin-1 and sigma^z for spin-1/2 (so both give
    integers); ``"sz2"`` is its square.
    """
    d = psi.basis.local_dim
    m = np.array([-1.0, 1.0]) if d == 2 else np.array([-1.0, 0.0, 1.0])
    if op == "sz":
        return m
    if op == "sz2":
        return m**2
    raise ObservableError(f"unknown diagonal operator {op!r}")


def site_digits(psi: Wavefunction, site: int) -> np.ndarray:
    _check_site(psi, site)
    d = psi.basis.local_dim
    return (psi.basis.states // d**site) % d


def diagonal_correlator(psi: Wavefunction, op_a: str, site_a: int, op_b: str, site_b: int) -> float:
    """<op_a(site_a) op_b(site_b)> as an exact weighted sum over the sector."""
    va = local_values(psi, op_a)[site_digits(psi, site_a)]
    vb = local_values(psi, op_b)[site_digits(psi, site_b)]
    w = psi.amplitudes**2
    return float(np.sum(w * va * vb) / np.sum(w))


@dataclass(frozen=True)
class CorrelatorSet:
    site_a: int
    site_b: int
    zz: float  # <sigma^z sigma^z> for spin-1/2, <S^z S^z> for spin-1
    charge: float | None = None  # <(S^z)^2 (S^z)^2>, spin-1 only

    @property
    def quarter_zz(self) -> float:
        """gamma^zz (spin-1/2) or eta^zz (spin-1): zz / 4."""
        return self.zz / 4


def correlators(psi: Wavefunction, site_a: int, site_b: int) -> CorrelatorSet:
    zz = diagonal_correlator(psi, "sz", site_a, "sz", site_b)
    charge = None
    if psi.basis.local_dim == 3:
        charge = diagonal_correlator(psi, "sz2", site_a, "sz2", site_b)
    return CorrelatorSet(site_a, site_b, zz, charge)


@dataclass(frozen=True, eq=False)
class PairDensityMatrix:
    """Two-site reduced state; index (a, b) -> a*d + b with digits lowest m first."""

    local_dim: int
    matrix: np.ndarray

    def __post_init__(self):
        dd = self.local_dim**2
        if self.matrix.shape != (dd, dd):
            raise ObservableError(f"expected {dd}x{dd} matrix, got {self.matrix.shape}")

    def check(self, tol: float = 1e-12, psd_tol: float = PSD_CLIP):
        m = self.matrix
        if abs(np.trace(m) - 1) > tol:
            raise ObservableError(f"trace {np.trace(m)} != 1")
        if np.abs(m - m.T).max() > tol:
            raise ObservableError("density matrix is not symmetric")
        lo = np.linalg.eigvalsh(m).min()
        if lo < -psd_tol:
            raise ObservableError(f"density matrix has eigenvalue {lo:.3e} below -{psd_tol:g}")
        return self

    def repaired(self) -> np.ndarray:
        """PSD repair: eigenvalues in [-PSD_CLIP, 0) are clipped to zero."""
        w, U = np.linalg.eigh(0.5 * (self.matrix + self.matrix.T))
        if w.min() < -PSD_CLIP:
            raise ObservableError(f"density matrix has eigenvalue {w.min():.3e} below -{PSD_CLIP:g}")
        w = np.clip(w, 0.0, None)
        return (U * w) @ U.T

    def expectation(self, op: np.ndarray) -> float:
        return float(np.trace(self.matrix @ op))

    def zz(self) -> float:
        sz = _sz(self.local_dim)
        return self.expectation(np.kron(sz, sz))

    def charge(self) -> float:
        sz2 = _sz(self.local_dim) ** 2
        return self.expectation(np.kron(sz2, sz2))


def _sz(d: int) -> np.ndarray:
    # sigma^z for qubits, S^z for qutrits, matching CorrelatorSet.zz
    return np.diag([-1.0, 1.0]) if d == 2 else np.diag([-1.0, 0.0, 1.0])


def pair_density_matrix(psi: Wavefunction, site_a: int, site_b: int) -> PairDensityMatrix:
    """rho_AB = Tr_rest |psi><psi|, one pass over the sector basis."""
    _check_site(psi, site_a)
    _check_site(psi, site_b)
    if site_a == site_b:
        raise ObservableError("sites must be distinct")
    basis = psi.basis
    d = basis.local_dim
    states, lo_size, split, lo_rank, hi_offset, lo_digits, hi_digits, _, half_pow = basis.kernel_args()
    rho = np.zeros((d * d, d * d))
    x = np.ascontiguousarray(psi.amplitudes, dtype=np.float64)
    _kernels.pair_rdm(states, lo_size, split, lo_rank, hi_offset, lo_digits, hi_digits,
                      d, half_pow, site_a, site_b, x, rho)
    rho /= x @ x
    return PairDensityMatrix(d, 0.5 * (rho + rho.T))

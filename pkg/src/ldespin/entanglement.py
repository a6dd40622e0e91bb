"""Concurrence, partial concurrence, negativity and SU(2) two-qutrit classification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .observables import ObservableError, PairDensityMatrix

ENTANGLED_THRESHOLD = 1e-12
INVALID_WEIGHT = -1e-9

ENTANGLED = "entangled"
SEPARABLE = "separable"
INVALID = "invalid-state"


class EntanglementError(ValueError):
    pass


def _su2_formula(q: float, name: str) -> float:
    # exact rational evaluation keeps the q = -1/12 boundary sharp
    if not -0.25 - 1e-12 <= q <= 0.25 + 1e-12:
        raise EntanglementError(f"{name} = {q} outside the physical range [-1/4, 1/4]")
    g = Fraction(q)
    val = 2 * abs(g) - g - Fraction(1, 4)
    return float(2 * max(Fraction(0), val))


def concurrence_su2(gamma_zz: float) -> float:
    """Two-qubit concurrence of an SU(2)-invariant, unmagnetized pair from gamma^zz = <s^z s^z>/4."""
    return _su2_formula(gamma_zz, "gamma_zz")


def partial_concurrence(eta_zz: float) -> float:
    """Concurrence between constituent spin-1/2s of two spin-1 sites, eta^zz = <S^z S^z>/4."""
    return _su2_formula(eta_zz, "eta_zz")


# real stand-in for sigma_y x sigma_y: (-i sigma_y) x (-i sigma_y) = -(sigma_y x sigma_y);
# the overall sign cancels in rho~ = S rho* S
_SYSY = np.kron(np.array([[0.0, -1.0], [1.0, 0.0]]), np.array([[0.0, -1.0], [1.0, 0.0]]))


def _as_matrix(rho) -> tuple[int, np.ndarray]:
    if isinstance(rho, PairDensityMatrix):
        return rho.local_dim, rho.matrix
    m = np.asarray(rho, dtype=float)
    return int(round(np.sqrt(m.shape[0]))), m


def _repair(m: np.ndarray) -> np.ndarray:
    try:
        return PairDensityMatrix(int(round(np.sqrt(m.shape[0]))), m).repaired()
    except ObservableError as exc:
        raise EntanglementError(str(exc)) from None


def concurrence_wootters(rho) -> float:
    """Wootters concurrence of a real two-qubit density matrix.

    Uses the Hermitian form sqrt(rho) rho~ sqrt(rho), whose eigenvalues are the
    squares of the lambdas.
    """
    d, m = _as_matrix(rho)
    if d != 2:
        raise EntanglementError("Wootters concurrence needs a two-qubit state")
    m = _repair(m)
    w, U = np.linalg.eigh(m)
    root = (U * np.sqrt(np.clip(w, 0, None))) @ U.T
    tilde = _SYSY @ m @ _SYSY
    herm = root @ tilde @ root
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(0.5 * (herm + herm.T)), 0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def partial_transpose(m: np.ndarray, d: int) -> np.ndarray:
    """Transpose on the first factor: rho[(a,b),(a',b')] -> rho[(a',b),(a,b')]."""
    return m.reshape(d, d, d, d).transpose(2, 1, 0, 3).reshape(d * d, d * d)


def negativity(rho) -> float:
    """||rho^{T_A}||_1 - 1; zero or negative for PPT states."""
    d, m = _as_matrix(rho)
    m = _repair(m)
    pt = partial_transpose(m, d)
    return float(np.abs(np.linalg.eigvalsh(0.5 * (pt + pt.T))).sum() - 1.0)


# --- SU(2)-invariant qutrit pairs ------------------------------------------------


@lru_cache(maxsize=1)
def qutrit_projectors() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Total-spin projectors P_0, P_1, P_2 on two spin-1 sites.

    Built from the spectral decomposition of S_A.S_B, whose eigenvalue on
    total spin J is J(J+1)/2 - 2, i.e. -2, -1, +1.
    """
    from .models import OperatorKind

    x = OperatorKind.EXCHANGE_ONE.matrix
    c = {0: -2.0, 1: -1.0, 2: 1.0}
    eye = np.eye(9)
    out = []
    for J in (0, 1, 2):
        p = eye.copy()
        for K in (0, 1, 2):
            if K != J:
                p = p @ (x - c[K] * eye) / (c[J] - c[K])
        out.append(p)
    return tuple(out)


@lru_cache(maxsize=1)
def sector_coefficients() -> np.ndarray:
    """Rows (1, t^zz_J, t^ch_J) with t_J = Tr[P_J O]/(2J+1); columns J = 0, 1, 2."""
    sz = np.diag([-1.0, 0.0, 1.0])
    zz = np.kron(sz, sz)
    ch = np.kron(sz @ sz, sz @ sz)
    projs = qutrit_projectors()
    A = np.array(
        [
            [1.0, 1.0, 1.0],
            [np.trace(P @ zz) / (2 * J + 1) for J, P in enumerate(projs)],
            [np.trace(P @ ch) / (2 * J + 1) for J, P in enumerate(projs)],
        ]
    )
    # maximally mixed state: weights (2J+1)/9 must give charge 4/9
    mixed = np.array([1, 3, 5]) / 9
    assert abs(A[2] @ mixed - 4 / 9) < 1e-12
    return A


@dataclass(frozen=True)
class Su2QutritState:
    p0: float
    p1: float
    p2: float
    valid: bool = True

    @property
    def weights(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2])

    def density_matrix(self) -> np.ndarray:
        return sum(p * P / (2 * J + 1) for J, (p, P) in enumerate(zip(self.weights, qutrit_projectors())))


def su2_reconstruct(zz: float, charge: float) -> Su2QutritState:
    """Weights of the J = 0, 1, 2 sectors from <S^z S^z> and <(S^z)^2 (S^z)^2>."""
    p = np.linalg.solve(sector_coefficients(), np.array([1.0, zz, charge]))
    if np.any(p < INVALID_WEIGHT):
        return Su2QutritState(*p, valid=False)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    return Su2QutritState(*p)


@dataclass(frozen=True)
class EntanglementReport:
    quarter_zz: float  # gamma^zz (qubits) or eta^zz (qutrits)
    charge: float | None
    concurrence: float | None
    partial_concurrence: float | None
    negativity: float
    negativity_raw: float
    verdict: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def classify_su2_pair(zz: float, charge: float) -> EntanglementReport:
    """Entangled/separable verdict for the SU(2)-invariant two-qutrit state with these correlators.

    For such states positive negativity is necessary and sufficient for
    entanglement, so the verdict is exact up to ENTANGLED_THRESHOLD.
    """
    state = su2_reconstruct(zz, charge)
    eta = zz / 4
    try:
        pc = partial_concurrence(eta)
    except EntanglementError:
        pc = None
    if not state.valid:
        return EntanglementReport(eta, charge, None, pc, float("nan"), float("nan"), INVALID)
    raw = negativity(state.density_matrix())
    verdict = ENTANGLED if raw > ENTANGLED_THRESHOLD else SEPARABLE
    return EntanglementReport(eta, charge, None, pc, max(0.0, raw), raw, verdict)


def qubit_report(rho: PairDensityMatrix) -> EntanglementReport:
    """Concurrence (both routes agree on SU(2) states) and negativity of a qubit pair."""
    zz = rho.zz()
    raw = negativity(rho)
    return EntanglementReport(zz / 4, None, concurrence_wootters(rho), None, max(0.0, raw), raw,
                              ENTANGLED if raw > ENTANGLED_THRESHOLD else SEPARABLE)


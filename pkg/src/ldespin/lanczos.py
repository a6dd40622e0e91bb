"""Thick-restart Lanczos with locking, plus total-spin resolution.

A single Krylov sequence only sees one direction of each degenerate
eigenspace, so eigenpairs are found one at a time: each converged vector is
locked and the next search starts from a fresh random vector orthogonal to
the locked set.  Afterwards the found vectors are rotated so that each one is
an eigenvector of S_tot^2 (SU(2)-invariant models only).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .basis import SectorBasis, build_sector
from .models import BondList, Wavefunction, apply_array, assemble_csr, check_compatible, csr_nnz_estimate

log = logging.getLogger(__name__)

MAX_ITER = 1000
DEGENERACY_RTOL = 1e-9
KRYLOV_MEMORY = 1_200 * 2**20  # bytes for the Krylov basis
OPERATOR_MEMORY = 1_500 * 2**20  # bytes an assembled sparse H may occupy


class ConvergenceError(RuntimeError):
    def __init__(self, msg, residuals):
        super().__init__(msg)
        self.residuals = residuals


@dataclass
class GroundMultiplet:
    eigenvalues: np.ndarray
    eigenvectors: list[Wavefunction]
    degeneracy: int
    s_tot_squared: np.ndarray
    residuals: np.ndarray
    seed: int
    matvecs: int = 0
    ritz_history: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def s_tot(self) -> np.ndarray:
        """Total spin S recovered from S(S+1), rounded to half-integers."""
        s = 0.5 * (np.sqrt(1.0 + 4.0 * np.maximum(self.s_tot_squared, 0.0)) - 1.0)
        return np.round(2 * s) / 2

    @property
    def multiplet_size(self) -> int:
        """Full SU(2) multiplet count of the ground level: sum of 2S+1."""
        return int(sum(2 * s + 1 for s in self.s_tot[: self.degeneracy]))

    def singlet(self) -> tuple[float, Wavefunction]:
        """Lowest returned state with S_tot = 0."""
        for e, v, s in zip(self.eigenvalues, self.eigenvectors, self.s_tot):
            if s == 0:
                return float(e), v
        raise LookupError("no singlet among the returned eigenpairs")


def _orthogonalize(w, V, locked):
    # two passes of classical Gram-Schmidt
    h = V @ w
    w -= h @ V
    h2 = V @ w
    w -= h2 @ V
    for q in locked:
        w -= (q @ w) * q
        w -= (q @ w) * q
    return h + h2


def _krylov_size(n: int, budget: int = KRYLOV_MEMORY) -> int:
    fit = max(8, budget // (8 * n) - 1)
    return int(min(n, 40, fit))


def _lowest_in_complement(matvec, n, locked, rng, tol, max_iter, m, history):
    """Lowest eigenpair of H restricted to the orthogonal complement of ``locked``."""
    free = n - len(locked)
    m = min(m, free)
    keep = max(1, min(m // 2, 12))
    V = np.empty((m + 1, n))
    T = np.zeros((m + 1, m + 1))

    v = rng.standard_normal(n)
    for q in locked:
        v -= (q @ v) * q
    V[0] = v / np.linalg.norm(v)
    start = 0
    matvecs = 0
    prev = np.inf
    resid = np.inf
    theta0 = np.nan
    while True:
        size = m
        beta = 0.0
        for j in range(start, m):
            w = matvec(V[j])
            matvecs += 1
            h = _orthogonalize(w, V[: j + 1], locked)
            T[: j + 1, j] = h
            T[j, : j + 1] = h
            beta = np.linalg.norm(w)
            history.append(np.linalg.eigvalsh(T[: j + 1, : j + 1])[0])
            if beta <= 1e-12 * max(1.0, abs(h[j])):
                size = j + 1  # invariant subspace: Ritz pairs are exact
                beta = 0.0
                break
            V[j + 1] = w / beta
            T[j + 1, j] = T[j, j + 1] = beta
        theta, S = np.linalg.eigh(T[:size, :size])
        theta0 = theta[0]
        resid = abs(beta * S[size - 1, 0])
        scale = max(1.0, abs(theta0))
        settled = abs(theta0 - prev) < 1e-13 * scale or beta == 0.0
        if resid < tol * scale and settled:
            x = S[:, 0] @ V[:size]
            return theta0, x / np.linalg.norm(x), matvecs
        if matvecs >= max_iter:
            raise ConvergenceError(
                f"Lanczos did not converge in {matvecs} matvecs (residual {resid:.3e})", [resid]
            )
        prev = theta0
        p = min(keep, size - 1)
        if beta == 0.0 or p < 1:
            # exhausted Krylov space without convergence: restart from Ritz vector
            x = S[:, 0] @ V[:size]
            V[0] = x / np.linalg.norm(x)
            T[:] = 0.0
            start = 0
            continue
        V[:p] = S[:, :p].T @ V[:size]
        V[p] = V[size]
        T[:] = 0.0
        T[np.arange(p), np.arange(p)] = theta[:p]
        T[:p, p] = T[p, :p] = beta * S[size - 1, :p]
        start = p


def raising_image(psi: Wavefunction) -> Wavefunction | None:
    """S^+_total |psi>, or None when psi is already in the top sector."""
    basis = psi.basis
    try:
        up = build_sector(basis.site_kind, basis.length, basis.two_sz_total + 2)
    except ValueError:
        return None
    d = basis.local_dim
    s = (d - 1) / 2
    m = np.arange(d) - s
    amp = np.sqrt(s * (s + 1) - m * (m + 1))
    states, lo_size, split, _, _, lo_digits, hi_digits, _, half_pow = basis.kernel_args()
    out = np.zeros(up.dim)
    _kernels.apply_raising(
        states, lo_size, split, lo_digits, hi_digits, d, half_pow, basis.length, amp,
        np.ascontiguousarray(psi.amplitudes, dtype=np.float64), up.lo_rank, up.hi_offset, out,
    )
    return Wavefunction(up, out)


def s_tot_squared_matrix(vectors: list[Wavefunction]) -> np.ndarray:
    """<v_a| S_tot^2 |v_b> via S^2 = S^- S^+ + S^z (S^z + 1), physical spin units."""
    sz = vectors[0].basis.two_sz_total / 2
    ups = [raising_image(v) for v in vectors]
    k = len(vectors)
    gram = np.zeros((k, k))
    if ups[0] is not None:
        U = np.array([u.amplitudes for u in ups])
        gram = U @ U.T
    overlap = np.array([[a.amplitudes @ b.amplitudes for b in vectors] for a in vectors])
    return gram + sz * (sz + 1) * overlap


def s_tot_squared_expectation(psi: Wavefunction) -> float:
    return float(s_tot_squared_matrix([psi])[0, 0] / psi.norm() ** 2)


def _resolve_spin(X: np.ndarray, HX: np.ndarray, basis: SectorBasis):
    """Rotate span(X) so that every vector has sharp S_tot^2, then sharp H."""
    vecs = [Wavefunction(basis, x) for x in X]
    s2 = s_tot_squared_matrix(vecs)
    s2 = 0.5 * (s2 + s2.T)
    s_vals, R = np.linalg.eigh(s2)
    # labels S(S+1) are well separated (gap >= 0.75); group by rounding 4*S(S+1)
    labels = np.round(4 * s_vals)
    X = R.T @ X
    HX = R.T @ HX
    out_x, out_hx = [], []
    for lab in np.unique(labels):
        idx = np.nonzero(labels == lab)[0]
        hsub = X[idx] @ HX[idx].T
        _, W = np.linalg.eigh(0.5 * (hsub + hsub.T))
        out_x.append(W.T @ X[idx])
        out_hx.append(W.T @ HX[idx])
    return np.vstack(out_x), np.vstack(out_hx)


def lowest_eigenpairs(
    bonds: BondList,
    basis: SectorBasis,
    k: int = 1,
    seed: int = 0,
    tol: float = 1e-8,
    max_iter: int = MAX_ITER,
    krylov_dim: int | None = None,
    resolve_spin: bool = True,
    operator: str = "auto",
) -> GroundMultiplet:
    """The ``k`` lowest eigenpairs of ``bonds`` in ``basis``.

    ``max_iter`` caps the matvecs spent on each eigenpair.  With
    ``resolve_spin`` the returned vectors are eigenvectors of S_tot^2 as well,
    which is what makes singlet selection inside a degenerate level well
    defined.  ``operator`` picks how H is applied: "csr" assembles it once,
    "matrix-free" recomputes every term on each product, "auto" assembles
    when the estimate fits in OPERATOR_MEMORY.
    """
    check_compatible(bonds, basis)
    n = basis.dim
    if k < 1 or k > n:
        raise ValueError(f"k = {k} must lie in [1, {n}]")
    m = krylov_dim or _krylov_size(n)
    rng = np.random.default_rng(seed)
    if operator == "auto":
        operator = "csr" if 12 * csr_nnz_estimate(bonds, basis) <= OPERATOR_MEMORY else "matrix-free"
    if operator == "csr":
        H = assemble_csr(bonds, basis)
        matvec = H.dot
    elif operator == "matrix-free":
        def matvec(x):
            return apply_array(bonds, basis, x)
    else:
        raise ValueError(f"unknown operator mode {operator!r}")

    locked: list[np.ndarray] = []
    history: list[float] = []
    total = 0
    for _ in range(k):
        _, x, used = _lowest_in_complement(matvec, n, locked, rng, tol, max_iter, m, history)
        total += used
        locked.append(x)
    X = np.array(locked)
    HX = np.array([matvec(x) for x in X])
    if resolve_spin:
        X, HX = _resolve_spin(X, HX, basis)
    energies = np.einsum("ij,ij->i", X, HX)
    order = np.argsort(energies, kind="stable")
    X, HX, energies = X[order], HX[order], energies[order]
    residuals = np.linalg.norm(HX - energies[:, None] * X, axis=1)
    bound = 1e-8 * np.maximum(1.0, np.abs(energies))
    if np.any(residuals > np.maximum(bound, tol * np.maximum(1.0, np.abs(energies)))):
        raise ConvergenceError(f"residuals {residuals} exceed tolerance after spin resolution", residuals)
    vectors = [Wavefunction(basis, x) for x in X]
    s2 = np.diag(s_tot_squared_matrix(vectors)).copy()
    e0 = energies[0]
    degeneracy = int(np.sum(np.abs(energies - e0) <= DEGENERACY_RTOL * max(1.0, abs(e0))))
    log.debug("lanczos: E=%s matvecs=%d", energies, total)
    return GroundMultiplet(energies, vectors, degeneracy, s2, residuals, seed, total, history)


def multiplet_across_sectors(bonds: BondList, site_kind, sectors=(0, 2, -2), k: int = 2, seed: int = 0,
                             rtol: float = DEGENERACY_RTOL) -> tuple[float, list[tuple[int, float]]]:
    """Count ground-level states over several S^z sectors.

    Returns the global ground energy and the (2S^z, E) pairs within ``rtol``
    of it, so a singlet plus a triplet shows up as four entries.
    """
    levels = []
    for two_sz in sectors:
        basis = build_sector(site_kind, bonds.length, two_sz)
        res = lowest_eigenpairs(bonds, basis, k=min(k, basis.dim), seed=seed, resolve_spin=False)
        levels += [(two_sz, float(e)) for e in res.eigenvalues]
    e0 = min(e for _, e in levels)
    tol = rtol * max(1.0, abs(e0))
    return e0, [(s, e) for s, e in levels if e - e0 <= tol]

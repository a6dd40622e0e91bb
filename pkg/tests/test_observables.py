import numpy as np
import pytest

import dense_oracle as dense
from ldespin.basis import SPIN_HALF, SPIN_ONE, build_sector
from ldespin.lanczos import lowest_eigenpairs
from ldespin.models import (
    BlbqParams,
    DimerFrustrationParams,
    Wavefunction,
    build_blbq,
    build_dimer_frustrated,
)
from ldespin.observables import (
    ObservableError,
    PairDensityMatrix,
    correlators,
    diagonal_correlator,
    pair_density_matrix,
)


def singlet():
    return Wavefunction(build_sector(SPIN_HALF, 2, 0), np.array([1.0, -1.0]) / np.sqrt(2))


@pytest.fixture(scope="module")
def aklt8():
    res = lowest_eigenpairs(build_blbq(BlbqParams(8, 1 / 3)), build_sector(SPIN_ONE, 8, 0), k=2)
    return res.singlet()[1]


def test_singlet_zz():
    assert diagonal_correlator(singlet(), "sz", 0, "sz", 1) == pytest.approx(-1)


def test_singlet_rdm_is_projector():
    rho = pair_density_matrix(singlet(), 0, 1).check()
    v = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(rho.matrix, np.outer(v, v), atol=1e-14)


def test_fully_polarized_state():
    basis = build_sector(SPIN_HALF, 5, 5)
    psi = Wavefunction(basis, np.ones(1))
    assert diagonal_correlator(psi, "sz", 1, "sz", 4) == 1.0


def test_aklt_end_correlators(aklt8):
    formula = -4 / 9 * (1 + 6 / 3**8)
    c = correlators(aklt8, 0, 7)
    assert c.zz == pytest.approx(formula, abs=2e-3)
    rho = pair_density_matrix(aklt8, 0, 7).check()
    assert np.diag(rho.matrix) @ np.kron([1, 0, 1], [1, 0, 1]) == pytest.approx(-formula, abs=2e-3)
    assert rho.charge() == pytest.approx(c.charge, abs=1e-12)


def test_rdm_matches_partial_trace_oracle():
    L = 4
    res = lowest_eigenpairs(build_dimer_frustrated(DimerFrustrationParams(L, 0.0)), build_sector(SPIN_HALF, L, 0))
    _, full = dense.sector_ground(dense.dimer_hamiltonian(L, 0.0, 0.0), L, 2)
    ref = dense.pair_rdm(full, L, 2, 0, 3)
    rho = pair_density_matrix(res.eigenvectors[0], 0, 3).check()
    assert np.allclose(rho.matrix, ref, atol=1e-10)


@pytest.mark.parametrize("a,b", [(0, 7), (2, 5), (6, 1)])
def test_rdm_zz_consistent_with_diagonal_correlator(aklt8, a, b):
    rho = pair_density_matrix(aklt8, a, b)
    assert rho.zz() == pytest.approx(diagonal_correlator(aklt8, "sz", a, "sz", b), abs=1e-12)


def test_su2_invariance_of_singlet_rdm():
    L = 10
    res = lowest_eigenpairs(build_dimer_frustrated(DimerFrustrationParams(L, 0.3, 0.2)), build_sector(SPIN_HALF, L, 0))
    rho = pair_density_matrix(res.eigenvectors[0], 0, L - 1)
    sx = np.array([[0, 1], [1, 0]])
    sz = np.diag([-1, 1])
    assert rho.expectation(np.kron(sx, sx)) == pytest.approx(rho.zz(), abs=1e-10)
    assert rho.expectation(np.kron(sz, np.eye(2))) == pytest.approx(0, abs=1e-12)


def test_site_errors():
    with pytest.raises(ObservableError):
        diagonal_correlator(singlet(), "sz", 0, "sz", 2)
    with pytest.raises(ObservableError):
        pair_density_matrix(singlet(), 1, 1)
    with pytest.raises(ObservableError):
        diagonal_correlator(singlet(), "sx", 0, "sz", 1)


def test_psd_repair_bounds():
    m = np.diag([0.5, 0.5 + 5e-11, -5e-11, 0.0])
    assert np.all(np.linalg.eigvalsh(PairDensityMatrix(2, m).repaired()) >= 0)
    with pytest.raises(ObservableError):
        PairDensityMatrix(2, np.diag([0.6, 0.5, -0.1, 0.0])).repaired()

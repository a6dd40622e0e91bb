"""Exact diagonalization of spin chains and the end-to-end entanglement they carry."""

from .basis import SPIN_HALF, SPIN_ONE, SectorBasis, SectorError, build_sector, index_of, sector_dimension
from .entanglement import (
    EntanglementReport,
    classify_su2_pair,
    concurrence_su2,
    concurrence_wootters,
    negativity,
    partial_concurrence,
    su2_reconstruct,
)
from .lanczos import ConvergenceError, GroundMultiplet, lowest_eigenpairs, multiplet_across_sectors
from .models import (
    BlbqParams,
    BondList,
    DimerFrustrationParams,
    ProbeParams,
    Wavefunction,
    apply,
    build_blbq,
    build_dimer_frustrated,
    build_probed_heisenberg,
)
from .observables import PairDensityMatrix, correlators, pair_density_matrix
from .scans import RunConfig, find_threshold, fit_exponential, scan_dimer, scan_probes, scan_spin1

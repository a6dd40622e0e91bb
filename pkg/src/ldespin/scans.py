"""Parameter sweeps, threshold bisection and finite-size fits for the three models."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from itertools import product

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .basis import SPIN_HALF, SPIN_ONE, build_sector
from .entanglement import (
    classify_su2_pair,
    concurrence_su2,
    concurrence_wootters,
    negativity,
    partial_concurrence,
)
from .lanczos import lowest_eigenpairs
from .models import (
    BlbqParams,
    DimerFrustrationParams,
    ProbeParams,
    build_blbq,
    build_dimer_frustrated,
    build_probed_heisenberg,
)
from .observables import correlators, pair_density_matrix

log = logging.getLogger(__name__)

NONZERO = 1e-8  # "nonzero concurrence" predicate

DIMER_COLUMNS = ("L", "delta", "alpha", "E0", "degeneracy", "gamma_zz", "C_AB", "error")
SPIN1_COLUMNS = ("L", "beta", "E0", "S_tot", "zz", "charge", "PC", "N_rdm", "N_su2", "verdict", "error")
PROBE_COLUMNS = ("L", "d", "J_p", "E0", "S_tot", "degeneracy", "gamma_zz", "C_AB", "triplet_ground", "error")
THRESHOLD_COLUMNS = ("alpha", "L", "delta_T", "bracket_width", "found")
FIT_COLUMNS = ("E_inf", "b", "xi_fit", "rms_residual", "alternating", "n_points")
AKLT_COLUMNS = ("L", "zz_ed", "charge_ed", "zz_formula", "charge_formula", "abs_diff", "band", "PC", "N")
CLASSIFY_COLUMNS = ("zz", "charge", "eta_zz", "PC", "N", "verdict")

# desk-scale caps on chain length (probe model counts chain sites only)
LENGTH_CAPS = {"dimer": 24, "spin1": 16, "probes": 16}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model: str = "dimer"
    lengths: list[int] = field(default_factory=lambda: [12])
    deltas: list[float] = field(default_factory=lambda: [0.5])
    alphas: list[float] = field(default_factory=lambda: [0.0])
    betas: list[float] = field(default_factory=lambda: [0.0])
    jps: list[float] = field(default_factory=lambda: [1.0])
    ds: list[int] = field(default_factory=lambda: [1])
    seed: int = 0
    k: int = 2
    tol: float = 1e-3  # threshold bracket width
    output: str | None = None
    format: str = "csv"
    workers: int = 1
    high_memory: bool = False

    def __post_init__(self):
        if self.model not in LENGTH_CAPS:
            raise ConfigError(f"unknown model {self.model!r}")
        grids = {"dimer": ("lengths", "deltas", "alphas"), "spin1": ("lengths", "betas"),
                 "probes": ("lengths", "ds", "jps")}[self.model]
        for g in grids:
            if not getattr(self, g):
                raise ConfigError(f"grid {g!r} is empty")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        cap = LENGTH_CAPS[self.model]
        too_big = [L for L in self.lengths if L > cap]
        if too_big and not self.high_memory:
            raise ConfigError(f"lengths {too_big} exceed the desk-scale cap {cap}; pass high_memory to override")

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


# --- single points -------------------------------------------------------------


def dimer_point(L: int, delta: float, alpha: float, seed: int = 0, k: int = 2) -> dict:
    row = {"L": L, "delta": delta, "alpha": alpha}
    try:
        bonds = build_dimer_frustrated(DimerFrustrationParams(L, delta, alpha))
        res = lowest_eigenpairs(bonds, build_sector(SPIN_HALF, L, 0), k=k, seed=seed)
        e0, psi = res.singlet()
        gamma = correlators(psi, 0, L - 1).quarter_zz
        row.update(E0=e0, degeneracy=res.multiplet_size, gamma_zz=gamma, C_AB=concurrence_su2(gamma))
    except (ArithmeticError, ValueError, RuntimeError, LookupError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def spin1_point(L: int, beta: float, seed: int = 0, k: int = 2) -> dict:
    row = {"L": L, "beta": beta}
    try:
        bonds = build_blbq(BlbqParams(L, beta))
        res = lowest_eigenpairs(bonds, build_sector(SPIN_ONE, L, 0), k=k, seed=seed)
        e0, psi = res.singlet()
        corr = correlators(psi, 0, L - 1)
        rho = pair_density_matrix(psi, 0, L - 1)
        report = classify_su2_pair(corr.zz, corr.charge)
        row.update(
            E0=e0, S_tot=0.0, zz=corr.zz, charge=corr.charge, PC=partial_concurrence(corr.quarter_zz),
            N_rdm=max(0.0, negativity(rho)), N_su2=report.negativity, verdict=report.verdict,
        )
    except (ArithmeticError, ValueError, RuntimeError, LookupError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def probe_point(L: int, d: int, jp: float, seed: int = 0, k: int = 2) -> dict:
    row = {"L": L, "d": d, "J_p": jp}
    try:
        p = ProbeParams(L, d, jp)
        bonds = build_probed_heisenberg(p)
        res = lowest_eigenpairs(bonds, build_sector(SPIN_HALF, p.sites, 0), k=k, seed=seed)
        psi = res.eigenvectors[0]
        s_tot = float(res.s_tot[0])
        gamma = correlators(psi, p.probe_a, p.probe_b).quarter_zz
        rho = pair_density_matrix(psi, p.probe_a, p.probe_b)
        row.update(
            E0=float(res.eigenvalues[0]), S_tot=s_tot, degeneracy=res.multiplet_size, gamma_zz=gamma,
            C_AB=concurrence_wootters(rho), triplet_ground=bool(s_tot == 1.0),
        )
    except (ArithmeticError, ValueError, RuntimeError, LookupError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _fill(rows: list[dict], columns) -> list[dict]:
    return [{c: r.get(c) for c in columns} for r in rows]


def _run(fn, jobs, workers: int) -> list[dict]:
    # rows come back in grid order regardless of completion order
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*jobs)))


def scan_dimer(config: RunConfig) -> list[dict]:
    jobs = [(L, dl, al, config.seed, config.k) for L, dl, al in product(config.lengths, config.deltas, config.alphas)]
    return _fill(_run(dimer_point, jobs, config.workers), DIMER_COLUMNS)


def scan_spin1(config: RunConfig) -> list[dict]:
    jobs = [(L, b, config.seed, config.k) for L, b in product(config.lengths, config.betas)]
    return _fill(_run(spin1_point, jobs, config.workers), SPIN1_COLUMNS)


def scan_probes(config: RunConfig) -> list[dict]:
    jobs = [(L, d, jp, config.seed, config.k) for L, d, jp in product(config.lengths, config.ds, config.jps)]
    return _fill(_run(probe_point, jobs, config.workers), PROBE_COLUMNS)


# --- threshold -------------------------------------------------------------------


@dataclass
class ThresholdResult:
    alpha: float
    L: int
    delta_t: float | None
    bracket_width: float | None
    found: bool = True
    brackets: list[tuple[float, float]] = field(default_factory=list, repr=False)

    def row(self) -> dict:
        return {"alpha": self.alpha, "L": self.L, "delta_T": self.delta_t,
                "bracket_width": self.bracket_width, "found": self.found}


def end_concurrence(L: int, delta: float, alpha: float, seed: int = 0) -> float:
    row = dimer_point(L, delta, alpha, seed)
    if row.get("error"):
        raise RuntimeError(row["error"])
    return row["C_AB"]


def find_threshold(alpha: float, L: int, tol: float = 1e-3, seed: int = 0,
                   lo: float = 0.0, hi: float = 0.99) -> ThresholdResult:
    """Smallest delta in (lo, hi) with nonzero end-to-end concurrence, by bisection.

    Keeps C(lo) == 0 and C(hi) > 0 at every step; the returned delta_t is the
    bracket midpoint and bracket_width its half-width.
    """
    if tol < 1e-4:
        raise ConfigError(f"tol must be >= 1e-4, got {tol}")
    if end_concurrence(L, hi, alpha, seed) <= NONZERO:
        return ThresholdResult(alpha, L, None, None, found=False)
    if end_concurrence(L, lo, alpha, seed) > NONZERO:
        return ThresholdResult(alpha, L, lo, 0.0, brackets=[(lo, lo)])
    brackets = [(lo, hi)]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if end_concurrence(L, mid, alpha, seed) > NONZERO:
            hi = mid
        else:
            lo = mid
        brackets.append((lo, hi))
    return ThresholdResult(alpha, L, 0.5 * (lo + hi), 0.5 * (hi - lo), brackets=brackets)


# --- finite-size extrapolation ----------------------------------------------------


@dataclass
class ExtrapolationFit:
    e_inf: float
    b: float
    xi_fit: float
    rms_residual: float
    alternating: bool = False
    n_points: int = 0

    def predict(self, L):
        L = np.asarray(L, dtype=float)
        sign = (-1.0) ** L if self.alternating else 1.0
        if math.isinf(self.xi_fit):
            return self.e_inf + 0.0 * L
        return self.e_inf + self.b * sign * np.exp(-L / self.xi_fit)

    def row(self) -> dict:
        return {"E_inf": self.e_inf, "b": self.b, "xi_fit": self.xi_fit,
                "rms_residual": self.rms_residual, "alternating": self.alternating, "n_points": self.n_points}


def fit_exponential(points, alternating: bool = False, xi_range=(0.1, 50.0)) -> ExtrapolationFit:
    """Fit value(L) = E_inf + b [(-1)^L] exp(-L/xi).

    Linear least squares gives (E_inf, b) for each xi; xi itself comes from a
    log-spaced scan over ``xi_range`` refined by bounded Brent search, and a
    final nonlinear least-squares step polishes all three together.
    """
    pts = sorted((int(L), float(v)) for L, v in points)
    Ls = np.array([p[0] for p in pts], dtype=float)
    vals = np.array([p[1] for p in pts])
    if len(set(Ls)) != len(Ls) or len(Ls) < 4:
        raise ValueError("need at least 4 points with distinct L")
    if np.ptp(vals) == 0:
        return ExtrapolationFit(float(vals[0]), 0.0, math.inf, 0.0, alternating, len(Ls))
    sign = (-1.0) ** Ls if alternating else np.ones_like(Ls)
    # shift L so exp() stays O(1) over the data
    L0 = Ls.min()

    def solve(log_xi):
        A = np.column_stack([np.ones_like(Ls), sign * np.exp(-(Ls - L0) / np.exp(log_xi))])
        coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
        r = A @ coef - vals
        return coef, float(r @ r)

    grid = np.linspace(np.log(xi_range[0]), np.log(xi_range[1]), 400)
    sse = np.array([solve(g)[1] for g in grid])
    i = int(np.argmin(sse))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best = minimize_scalar(lambda g: solve(g)[1], bounds=(a, b), method="bounded",
                           options={"xatol": 1e-14, "maxiter": 500})
    log_xi = best.x if best.fun <= sse[i] else grid[i]
    coef, s = solve(log_xi)

    # Gauss-Newton polish of all three parameters; converges quadratically on clean data
    def resid(q):
        return q[0] + q[1] * sign * np.exp(-(Ls - L0) / np.exp(q[2])) - vals

    lo_b, hi_b = np.log(xi_range[0]), np.log(xi_range[1])
    q0 = np.array([coef[0], coef[1], np.clip(log_xi, lo_b, hi_b)])
    pol = least_squares(resid, q0, bounds=([-np.inf, -np.inf, lo_b], [np.inf, np.inf, hi_b]),
                        method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=200)
    if pol.success and float(pol.fun @ pol.fun) <= s:
        coef, log_xi, s = pol.x[:2], pol.x[2], float(pol.fun @ pol.fun)
    xi = float(np.exp(log_xi))
    return ExtrapolationFit(float(coef[0]), float(coef[1] * np.exp(L0 / xi)), xi,
                            float(np.sqrt(s / len(Ls))), alternating, len(Ls))


# --- AKLT comparison --------------------------------------------------------------


def aklt_check(lengths, seed: int = 0) -> list[dict]:
    from .aklt import aklt_end_correlator, residual_band

    rows = []
    for L in lengths:
        pt = spin1_point(L, 1.0 / 3.0, seed)
        zf, cf = aklt_end_correlator(L)
        rows.append({
            "L": L, "zz_ed": pt.get("zz"), "charge_ed": pt.get("charge"), "zz_formula": zf,
            "charge_formula": cf, "abs_diff": abs(pt["zz"] - zf) if pt.get("zz") is not None else None,
            "band": residual_band(L), "PC": pt.get("PC"), "N": pt.get("N_rdm"),
        })
    return rows


def classify_rows(pairs) -> list[dict]:
    rows = []
    for zz, charge in pairs:
        rep = classify_su2_pair(float(zz), float(charge))
        rows.append({"zz": float(zz), "charge": float(charge), "eta_zz": rep.quarter_zz,
                     "PC": rep.partial_concurrence, "N": rep.negativity, "verdict": rep.verdict})
    return rows


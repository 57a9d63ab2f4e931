"""
Module: core.survival_dynamics
Gamow modes of the D = 1 model, their overlaps with the initial bound state
and the resonant-mode survival amplitude

    A(t) = sum_n C~_n C_n exp(-i E_n t),

checked against a Crank-Nicolson propagation of the same initial state.
"""

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, sparse
from scipy.sparse.linalg import splu

from config import MAX_WORKERS, QUAD_TOL, SHOW_PROGRESS
from logger import logger
from core.errors import AccuracyError, ConfigError, QuadratureError, TruncationError
from core.field_model import ModelConfig, g0_1d, g0_energy_derivative
from core.pole_finder import PoleSet, Resonance
from utils.progressbar import ProgressTracker

OVERLAP_LOG_BOUND = -math.log(1e-12)
MAX_WINDOW = 1e5
TRUNCATION_WARN = 1e-4
ACCURACY_TOL = 1e-4

MODE_SERIES = "mode_series"
PROPAGATOR = "propagator"


@dataclass(frozen=True)
class GamowMode:
    resonance: Resonance
    energy: complex
    norm_factor: complex
    c_n: complex
    c_tilde_n: complex
    quad_error: float
    window: float

    @property
    def weight(self) -> complex:
        return self.c_tilde_n * self.c_n


@dataclass(frozen=True)
class SurvivalRecord:
    times: np.ndarray
    amplitude: np.ndarray
    source: str
    truncation: Dict[str, object] = field(default_factory=dict)
    nonescape: Optional[np.ndarray] = None
    truncation_warning: bool = False

    @property
    def probability(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2


def _require_1d(cfg: ModelConfig) -> None:
    if cfg.dimension != 1:
        raise ConfigError("survival dynamics are implemented for D = 1")


def bound_state_wavefunction(x, lam: float):
    """psi_B(x) = (lam/2)^(1/2) exp(-lam |x| / 2)."""
    return math.sqrt(lam / 2.0) * np.exp(-0.5 * lam * np.abs(x))


# ---------------------------------------------------------------------------
# Gamow modes
# ---------------------------------------------------------------------------

def _normalization(res: Resonance, cfg: ModelConfig) -> complex:
    """[-dG0/dE(E_n; 0, 0)]^(-1/2) on the branch with Re phi_n(0) > 0."""
    F = cfg.field_strength
    energy = res.energy(F)
    factor = 1.0 / cmath.sqrt(-g0_energy_derivative(energy, F))
    if (g0_1d(energy, 0.0, 0.0, F) * factor).real < 0:
        factor = -factor
    return factor


def gamow_function(res: Resonance, cfg: ModelConfig, x, norm_factor: Optional[complex] = None):
    """
    phi_n(x) = G0(E_n; x, 0) [-dG0/dE(E_n; 0, 0)]^(-1/2).

    Args:
        res (Resonance): Pole.
        cfg (ModelConfig): D = 1 model with F > 0.
        x: Position(s).
        norm_factor (complex, optional): Precomputed normalization; the
            Re phi_n(0) > 0 branch is used when omitted.

    Returns:
        complex or np.ndarray
    """
    _require_1d(cfg)
    if norm_factor is None:
        norm_factor = _normalization(res, cfg)
    return g0_1d(res.energy(cfg.field_strength), x, 0.0, cfg.field_strength) * norm_factor


def gamow_growth_rate(res: Resonance, cfg: ModelConfig) -> float:
    """Coefficient of sqrt(x) in log |phi_n(x)|^2 as x -> +inf, F^(-1/2) Gamma_n."""
    return res.width_gamma / math.sqrt(cfg.field_strength)


def overlap_window(res: Resonance, cfg: ModelConfig) -> float:
    """
    Half-width X with exp(-lam X / 2 + c sqrt(X)) <= 1e-12, c the growth of |phi_n|.

    Raises:
        TruncationError: X above 1e5.
    """
    lam = cfg.lam
    c = 0.5 * gamow_growth_rate(res, cfg)
    s = (c + math.sqrt(c * c + 2.0 * lam * OVERLAP_LOG_BOUND)) / lam
    window = s * s
    if window > MAX_WINDOW:
        raise TruncationError(f"overlap window {window:.3g} for pole {res.index} exceeds {MAX_WINDOW:g}")
    return window


def overlap_coefficients(res: Resonance, cfg: ModelConfig,
                         norm_factor: Optional[complex] = None) -> Tuple[complex, complex, float, float]:
    """
    C_n = int psi_B(x) phi_n(x) dx and C~_n = int psi_B*(x) phi_n(x) dx.

    psi_B is real, so both integrals are one quadrature.

    Returns:
        Tuple[complex, complex, float, float]: (c_n, c_tilde_n, quad_error, window).
    """
    _require_1d(cfg)
    if norm_factor is None:
        norm_factor = _normalization(res, cfg)
    lam = cfg.lam
    F = cfg.field_strength
    energy = res.energy(F)
    window = overlap_window(res, cfg)

    def integrand(x: float) -> np.ndarray:
        value = bound_state_wavefunction(x, lam) * g0_1d(energy, x, 0.0, F) * norm_factor
        return np.array([value.real, value.imag])

    total = np.zeros(2)
    error = 0.0
    # the kink of psi_B and G0 at the origin splits the range
    for lo, hi in ((-window, 0.0), (0.0, window)):
        value, err = integrate.quad_vec(integrand, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=2000)
        if not np.all(np.isfinite(value)):
            raise QuadratureError(f"overlap integral for pole {res.index} is not finite")
        total += value
        error += float(err)

    c_n = complex(total[0], total[1])
    return c_n, c_n, error, window


def build_mode(res: Resonance, cfg: ModelConfig) -> GamowMode:
    norm_factor = _normalization(res, cfg)
    c_n, c_tilde_n, quad_error, window = overlap_coefficients(res, cfg, norm_factor)
    return GamowMode(
        resonance=res,
        energy=res.energy(cfg.field_strength),
        norm_factor=norm_factor,
        c_n=c_n,
        c_tilde_n=c_tilde_n,
        quad_error=quad_error,
        window=window,
    )


def build_modes(cfg: ModelConfig, poles: PoleSet, max_workers: int = MAX_WORKERS) -> List[GamowMode]:
    """Gamow modes for every pole of the set, in index order."""
    _require_1d(cfg)
    with ProgressTracker(len(poles), "Modes", SHOW_PROGRESS, unit="mode") as tracker:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            def run(res: Resonance) -> GamowMode:
                try:
                    return build_mode(res, cfg)
                finally:
                    tracker.advance()

            modes = list(executor.map(run, poles.resonances))
    return sorted(modes, key=lambda m: m.resonance.index)


# ---------------------------------------------------------------------------
# mode series
# ---------------------------------------------------------------------------

def _check_times(times: Sequence[float]) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ConfigError("times must be a non-empty 1-d sequence")
    if np.any(t < 0):
        raise ConfigError("survival amplitudes are defined for t >= 0 only")
    if np.any(np.diff(t) <= 0):
        raise ConfigError("times must be strictly increasing")
    return t


def series_amplitude(modes: Sequence[GamowMode], times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    weights = np.array([m.weight for m in modes], dtype=complex)
    energies = np.array([m.energy for m in modes], dtype=complex)
    return np.exp(-1j * np.outer(t, energies)) @ weights


def survival_series(cfg: ModelConfig, poles: PoleSet, times: Sequence[float],
                    modes: Optional[Sequence[GamowMode]] = None) -> SurvivalRecord:
    """
    Partial sum of the resonant-mode expansion over the poles of `poles`.

    The record is flagged when a mode at either end of the index range still
    contributes more than 1e-4 to |A| at the first time.
    """
    _require_1d(cfg)
    t = _check_times(times)
    if modes is None:
        modes = build_modes(cfg, poles)
    amplitude = series_amplitude(modes, t)

    n_lo, n_hi = min(m.resonance.index for m in modes), max(m.resonance.index for m in modes)
    edge = [m for m in modes if m.resonance.index in (n_lo, n_hi) and m.resonance.index != 0]
    tail = max((abs(m.weight * cmath.exp(-1j * m.energy * t[0])) for m in edge), default=0.0)
    warn = tail > TRUNCATION_WARN
    if warn:
        logger.warning(f"truncation suspect: edge mode contributes {tail:.2e} to |A| at t={t[0]}")

    return SurvivalRecord(
        times=t,
        amplitude=amplitude,
        source=MODE_SERIES,
        truncation={"modes": len(modes), "index_range": (n_lo, n_hi), "edge_contribution": tail},
        truncation_warning=warn,
    )


# ---------------------------------------------------------------------------
# Crank-Nicolson oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleGrid:
    x: np.ndarray
    mass: np.ndarray
    origin: int
    absorber: np.ndarray

    @property
    def size(self) -> int:
        return self.x.size


def _stretched_side(h0: float, uniform: float, length: float, h_limit) -> np.ndarray:
    """Node positions 0 < x_1 < ... <= length: uniform up to `uniform`, then growing by 2% a step."""
    nodes = []
    x, h = 0.0, h0
    while x < length:
        if x >= uniform:
            h = min(h * 1.02, h_limit(x))
        x += h
        nodes.append(x)
    return np.array(nodes)


def oracle_grid(cfg: ModelConfig, refine: int = 1) -> OracleGrid:
    """
    Nonuniform grid on [-L-, L+] with spacing h0 = 0.01/lam near the well.

    L+ reaches 30/sqrt(F) past the classical exit point -E_B/F; the outer
    20% of each side carries a quartic absorbing potential.
    """
    lam = cfg.lam
    F = cfg.field_strength
    e_b = -lam * lam / 4.0
    h0 = 0.01 / lam / refine
    uniform = 12.0 / lam

    if F > 0:
        x_turn = -e_b / F
        right = max(x_turn + 30.0 / math.sqrt(F), 1.25 * uniform)
        left = 1.25 * 20.0 / lam
    else:
        right = left = 40.0 / lam

    def h_limit(x: float) -> float:
        kinetic = max(0.0, e_b + F * abs(x)) + 0.25 * lam * lam
        return max(h0, 0.1 / math.sqrt(kinetic) / refine)

    plus = _stretched_side(h0, uniform, right, h_limit)
    minus = _stretched_side(h0, uniform, left, h_limit)
    x = np.concatenate([-minus[::-1], [0.0], plus])
    h = np.diff(x)
    mass = np.empty_like(x)
    mass[1:-1] = 0.5 * (h[:-1] + h[1:])
    mass[0], mass[-1] = 0.5 * h[0], 0.5 * h[-1]

    x_lo, x_hi = x[0], x[-1]
    strength = max(10.0, 2.0 * (abs(e_b) + F * x_hi))
    absorber = np.zeros_like(x)
    for start, end, mask in ((0.8 * x_hi, x_hi, x > 0.8 * x_hi), (0.8 * x_lo, x_lo, x < 0.8 * x_lo)):
        absorber[mask] = strength * ((x[mask] - start) / (end - start)) ** 4
    return OracleGrid(x=x, mass=mass, origin=minus.size, absorber=absorber)


def _hamiltonian(cfg: ModelConfig, grid: OracleGrid, shift: float) -> sparse.csc_matrix:
    """Finite-volume H - shift*M; the well enters as -lam at the origin node."""
    h = np.diff(grid.x)
    inv = 1.0 / h
    diag = np.zeros(grid.size)
    diag[:-1] += inv
    diag[1:] += inv
    diag[grid.origin] -= cfg.lam
    potential = -cfg.field_strength * grid.x - 1j * grid.absorber - shift
    diag = diag + grid.mass * potential
    return sparse.diags([-inv, diag, -inv], [-1, 0, 1], format="csc", dtype=complex)


def _propagate(cfg: ModelConfig, grid: OracleGrid, times: np.ndarray, dt: float,
               radius: float) -> Tuple[np.ndarray, np.ndarray]:
    lam = cfg.lam
    e_b = -lam * lam / 4.0
    H = _hamiltonian(cfg, grid, e_b)
    M = sparse.diags(grid.mass, format="csc", dtype=complex)

    psi_b = bound_state_wavefunction(grid.x, lam).astype(complex)
    psi_b /= math.sqrt(np.sum(grid.mass * np.abs(psi_b) ** 2))
    weighted_b = grid.mass * psi_b
    inside = (np.abs(grid.x) < radius) * grid.mass

    psi = psi_b.copy()
    factorizations = {}
    amplitude = np.empty(times.size, dtype=complex)
    nonescape = np.empty(times.size)
    t_now = 0.0
    for k, t_target in enumerate(times):
        span = t_target - t_now
        steps = int(math.ceil(span / dt - 1e-9)) if span > 0 else 0
        if steps:
            step = span / steps
            key = round(step, 15)
            if key not in factorizations:
                factorizations[key] = (splu((M + 0.5j * step * H).tocsc()), (M - 0.5j * step * H).tocsr())
            lu, rhs = factorizations[key]
            for _ in range(steps):
                psi = lu.solve(rhs @ psi)
        t_now = t_target
        # H was shifted by E_B; restore the bound-state phase
        amplitude[k] = np.dot(weighted_b.conj(), psi) * cmath.exp(-1j * e_b * t_target)
        nonescape[k] = float(np.sum(inside * np.abs(psi) ** 2))
    return amplitude, nonescape


def nonescape_probability(cfg: ModelConfig, times: Sequence[float], radius: Optional[float] = None) -> np.ndarray:
    """P(t) = int_{|x| < radius} |psi(x, t)|^2 dx from the propagator; radius defaults to 20/lam."""
    return propagate_oracle(cfg, times, radius=radius).nonescape


def propagate_oracle(cfg: ModelConfig, times: Sequence[float], dt: Optional[float] = None,
                     radius: Optional[float] = None, max_halvings: int = 2,
                     refine: int = 1) -> SurvivalRecord:
    """
    Survival amplitude by direct Crank-Nicolson evolution of psi_B.

    Every run is repeated with half the time step; the step is halved again
    (up to `max_halvings` times) while |A| moves by more than 1e-4.

    Args:
        cfg (ModelConfig): D = 1 model, F >= 0.
        times: Increasing nonnegative times.
        dt (float, optional): Initial time step, default 0.05 / max(1, |E_B|).
        radius (float, optional): Nonescape region half-width, default 20/lam.
        refine (int): Grid refinement factor passed to oracle_grid.

    Raises:
        AccuracyError: Step halving still disagrees after `max_halvings`.
    """
    _require_1d(cfg)
    t = _check_times(times)
    lam = cfg.lam
    e_b = -lam * lam / 4.0
    if radius is None:
        radius = 20.0 / lam
    if dt is None:
        dt = 0.05 / max(1.0, abs(e_b))

    grid = oracle_grid(cfg, refine)
    logger.info(f"Propagating on {grid.size} nodes, x in [{grid.x[0]:.2f}, {grid.x[-1]:.2f}], dt={dt:.3g}")

    amplitude, nonescape = _propagate(cfg, grid, t, dt, radius)
    for _ in range(max_halvings + 1):
        finer, finer_nonescape = _propagate(cfg, grid, t, dt / 2.0, radius)
        change = float(np.max(np.abs(np.abs(finer) - np.abs(amplitude))))
        logger.debug(f"dt={dt:.3g}: step halving changes |A| by {change:.2e}")
        dt /= 2.0
        amplitude, nonescape = finer, finer_nonescape
        if change <= ACCURACY_TOL:
            break
    else:
        raise AccuracyError(f"step halving still changes |A| by {change:.2e} at dt={dt:.3g}")

    return SurvivalRecord(
        times=t,
        amplitude=amplitude,
        source=PROPAGATOR,
        truncation={"nodes": grid.size, "x_min": float(grid.x[0]), "x_max": float(grid.x[-1]),
                    "h0": float(np.min(np.diff(grid.x))), "dt": dt, "refine": refine},
        nonescape=nonescape,
    )


def stationary_amplitude(cfg: ModelConfig, times: Sequence[float]) -> SurvivalRecord:
    """Zero-field reference: psi_B is an eigenstate, A(t) = exp(-i E_B t)."""
    _require_1d(cfg)
    if cfg.field_strength != 0:
        raise ConfigError("the stationary amplitude applies to F = 0 only")
    t = _check_times(times)
    e_b = cfg.energy_b
    return SurvivalRecord(
        times=t,
        amplitude=np.exp(-1j * e_b * t),
        source=MODE_SERIES,
        truncation={"modes": 1, "index_range": (0, 0), "edge_contribution": 0.0},
    )

"""
Module: core.pole_finder
Locates and labels the resonance poles eps_n, the zeros of g_denominator in
the lower half of the complex eps-plane.

Labels: n = 0 is the pole continuously connected to eps_B as F -> 0; n >= 1
run along the near-real branch by increasing real part; n <= -1 run along the
arg(eps) ~ -2 pi/3 branch by increasing modulus.
"""

import cmath
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import MAX_WORKERS, NEWTON_MAX_ITER, NEWTON_TOL, SHOW_PROGRESS
from logger import logger
from core.airy_kernel import airy_eval, airy_zero
from core.errors import (
    ConfigError,
    ConvergenceError,
    MissedPoleError,
    NoBoundStateError,
    NumericalError,
    ResonanceLabError,
)
from core.field_model import (
    ModelConfig,
    TWO_PI,
    g_denominator,
    g_denominator_derivative,
    g_real_split,
)
from utils.progressbar import ProgressTracker

DEDUP_TOL = 1e-6
ESCAPE_RADIUS = 2.0
MAX_STEP = 0.5
UPPER_HALF_TOL = 1e-12
NEAR_REAL_RATIO = 1e-6
HOMOTOPY_STEPS = 5
HOMOTOPY_LOG_STEP = 0.1
D2_IM_LIMIT = 2.0
WEAK_SEED_MIN = 2.0
TRACK_START = -2.5

ROTATION = cmath.exp(-2j * math.pi / 3)
TUNNEL_FORMULAS = ("tunnel-1d", "tunnel-2d", "tunnel-3d")
FORMULAS = TUNNEL_FORMULAS + ("weak-field", "strong-positive", "strong-negative", "large-n-3d", "large-n-3d-negative")

Rectangle = Tuple[float, float, float, float]


@dataclass(frozen=True)
class Resonance:
    index: int
    eps: complex
    width_gamma: float
    gamma_dimless: float
    residual: float
    seed_source: str
    scale: float = 1.0
    iterations: int = 0

    @classmethod
    def build(cls, index: int, eps: complex, F: float, residual: float, seed_source: str,
              scale: float = 1.0, iterations: int = 0) -> "Resonance":
        gamma = -2.0 * eps.imag
        return cls(
            index=index,
            eps=eps,
            width_gamma=gamma * F ** (2.0 / 3.0),
            gamma_dimless=gamma,
            residual=residual,
            seed_source=seed_source,
            scale=scale,
            iterations=iterations,
        )

    def energy(self, F: float) -> complex:
        return self.eps * F ** (2.0 / 3.0)

    def relabel(self, index: int) -> "Resonance":
        return replace(self, index=index)


@dataclass(frozen=True)
class PoleSet:
    cfg: ModelConfig
    resonances: Tuple[Resonance, ...]
    index_range: Tuple[int, int]
    contour_count: Optional[int] = None

    def __iter__(self) -> Iterator[Resonance]:
        return iter(self.resonances)

    def __len__(self) -> int:
        return len(self.resonances)

    def by_index(self, n: int) -> Resonance:
        for res in self.resonances:
            if res.index == n:
                return res
        raise KeyError(n)

    @property
    def eps_values(self) -> np.ndarray:
        return np.array([r.eps for r in self.resonances], dtype=complex)


# ---------------------------------------------------------------------------
# asymptotic formulas
# ---------------------------------------------------------------------------

def _tunnel_factor(eps_b: float) -> float:
    return math.exp(-(4.0 / 3.0) * (-eps_b) ** 1.5)


def _s_n(n: int) -> float:
    return (1.5 * n * math.pi) ** (2.0 / 3.0)


def _weak_field_coefficients(n: int, eps_b: float) -> Tuple[complex, float, float, float]:
    """Coefficients (a, b, c) of the Taylor-truncated 1D resonance equation around -a_n, and a_n."""
    a_n = airy_zero(n)
    vals = airy_eval(a_n)
    aip, bi = vals.aip.real, vals.bi.real
    ci_prime = vals.bip + 1j * vals.aip
    a = aip * ci_prime
    b = -aip * bi
    c = -1.0 / (TWO_PI * math.sqrt(-eps_b))
    return complex(a), b, c, a_n


def weak_field_ratio(n: int, eps_b: float) -> float:
    """|a c / b^2|; the expanded series needs this well below one."""
    a, b, c, _ = _weak_field_coefficients(n, eps_b)
    return abs(a * c) / (b * b)


def weak_field_quadratic(n: int, eps_b: float) -> complex:
    """
    -a_n + x_+ with x_+ the small root of a x^2 + b x + c = 0.

    Written as -2c / (b + sqrt(b^2 - 4ac)) so the root stays accurate when
    c is tiny.
    """
    if eps_b >= 0:
        raise ConfigError("eps_b must be negative")
    a, b, c, a_n = _weak_field_coefficients(n, eps_b)
    disc = cmath.sqrt(b * b - 4.0 * a * c)
    return -a_n + (-2.0 * c) / (b + disc)


def asymptotic_pole(formula: str, n: Optional[int] = None, eps_b: Optional[float] = None) -> complex:
    """
    Closed-form asymptotic estimate of a pole.

    Args:
        formula (str): One of tunnel-1d, tunnel-2d, tunnel-3d (n = 0 in
            D = 1, 2, 3), weak-field (D = 1, n >= 1), strong-positive /
            strong-negative (D = 1, large n) and large-n-3d /
            large-n-3d-negative (D = 3, large n).
        n (int, optional): Index magnitude for the n >= 1 formulas.
        eps_b (float, optional): Dimensionless bound-state energy.

    Returns:
        complex: The formula value.

    Raises:
        ConfigError: Unknown formula, missing parameter, or weak-field outside
            |a_n| < |eps_b|.
    """
    if formula not in FORMULAS:
        raise ConfigError(f"unknown asymptotic formula {formula!r}, expected one of {FORMULAS}")
    needs_eps_b = formula not in ("large-n-3d", "large-n-3d-negative")
    if needs_eps_b and (eps_b is None or eps_b >= 0):
        raise ConfigError(f"{formula} needs a negative eps_b")
    if formula not in TUNNEL_FORMULAS and (n is None or n < 1):
        raise ConfigError(f"{formula} needs a positive index n")

    if formula == "tunnel-1d":
        return eps_b * (1.0 + 1j * _tunnel_factor(eps_b))
    if formula == "tunnel-3d":
        return eps_b * (1.0 + 0.25j * (-eps_b) ** -1.5 * _tunnel_factor(eps_b))
    if formula == "tunnel-2d":
        return eps_b * (1.0 + 1j * math.sqrt(math.pi / 8.0) * (-eps_b) ** -0.75 * _tunnel_factor(eps_b))

    if formula == "weak-field":
        if abs(airy_zero(n)) >= abs(eps_b):
            raise ConfigError(f"weak-field requires |a_{n}| < |eps_B|, got a_n={airy_zero(n):.4f}, eps_B={eps_b}")
        a, b, c, a_n = _weak_field_coefficients(n, eps_b)
        return -a_n - c / b - a * c * c / b ** 3

    s = _s_n(n)
    if formula == "strong-positive":
        return complex(s, -0.25 * s ** -0.5 * math.log(abs(s / eps_b)))
    if formula == "strong-negative":
        return ROTATION * complex(s, 0.25 * s ** -0.5 * math.log(abs(s / eps_b)))
    positive = complex(s, -0.5 * s ** -0.5 * math.log(4.0 * s ** 1.5))
    if formula == "large-n-3d":
        return positive
    return ROTATION * positive.conjugate()


# ---------------------------------------------------------------------------
# seeds
# ---------------------------------------------------------------------------

def _eps_b_or_none(cfg: ModelConfig) -> Optional[float]:
    try:
        return cfg.eps_b
    except NoBoundStateError:
        return None


def _safe_abs_g(eps: complex, cfg: ModelConfig) -> float:
    try:
        return abs(g_denominator(eps, cfg))
    except ResonanceLabError:
        return math.inf


def _index_zero_seed(cfg: ModelConfig, eps_b: Optional[float]) -> Tuple[complex, str]:
    if eps_b is None:
        return complex(-1.0, -1.0), "heuristic"
    if -eps_b >= WEAK_SEED_MIN:
        formula = {1: "tunnel-1d", 2: "tunnel-2d", 3: "tunnel-3d"}[cfg.dimension]
        return asymptotic_pole(formula, eps_b=eps_b), formula
    # lower half-plane twin of eps_B (1 - 0.1i)
    return eps_b * (1.0 + 0.1j), "heuristic"


def _candidates(cfg: ModelConfig, n: int, eps_b: Optional[float]) -> List[Tuple[complex, str]]:
    if n == 0:
        return [_index_zero_seed(cfg, eps_b)]

    m = abs(n)
    a_m = airy_zero(m)
    log_eps_b = eps_b if eps_b is not None else -1.0
    out: List[Tuple[complex, str]] = []

    if n > 0:
        if cfg.dimension == 1 and eps_b is not None and abs(a_m) < abs(eps_b):
            out.append((weak_field_quadratic(m, eps_b), "weak-field"))
        out.append((complex(-a_m, -0.2), "airy-zero"))
        if cfg.dimension == 3:
            out.append((asymptotic_pole("large-n-3d", m), "large-n-3d"))
        else:
            out.append((asymptotic_pole("strong-positive", m, log_eps_b), "strong-positive"))
    else:
        out.append((-a_m * ROTATION, "airy-zero"))
        if cfg.dimension == 3:
            out.append((asymptotic_pole("large-n-3d-negative", m), "large-n-3d"))
        else:
            out.append((asymptotic_pole("strong-negative", m, log_eps_b), "strong-negative"))
    return out


def _best_seed(cfg: ModelConfig, n: int, eps_b: Optional[float]) -> Tuple[complex, str]:
    candidates = _candidates(cfg, n, eps_b)
    if len(candidates) == 1:
        return candidates[0]
    return min(candidates, key=lambda cand: _safe_abs_g(cand[0], cfg))


def seed_poles(cfg: ModelConfig, n_min: int, n_max: int) -> List[Tuple[int, complex, str]]:
    """
    Initial guesses for poles n_min..n_max.

    Between the weak-field (near -a_n) and strong-field (large-n) regimes
    the candidate with the smaller |g| wins.

    Returns:
        List[Tuple[int, complex, str]]: (index, seed, formula tag) by index.
    """
    if not n_min <= 0 <= n_max:
        raise ConfigError(f"index range must contain 0, got [{n_min}, {n_max}]")
    eps_b = _eps_b_or_none(cfg)
    seeds = []
    for n in range(n_min, n_max + 1):
        seed, source = _best_seed(cfg, n, eps_b)
        seeds.append((n, seed, source))
    return seeds


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def _derivative(eps: complex, cfg: ModelConfig) -> complex:
    dg = g_denominator_derivative(eps, cfg)
    if dg is not None:
        return dg
    h = 1e-6 * max(1.0, abs(eps))
    return (g_denominator(eps + h, cfg) - g_denominator(eps - h, cfg)) / (2.0 * h)


def _real_derivative(x: float, cfg: ModelConfig) -> float:
    dg = g_denominator_derivative(complex(x, 0.0), cfg)
    if dg is not None:
        return dg.real
    h = 1e-6 * max(1.0, abs(x))
    return (g_real_split(x + h, cfg)[0] - g_real_split(x - h, cfg)[0]) / (2.0 * h)


def _polish_near_real(eps: complex, cfg: ModelConfig, tol: float) -> complex:
    """Real Newton on Re g, then Im eps = -Im g / (d Re g / dx)."""
    x = eps.real
    for _ in range(NEWTON_MAX_ITER):
        u, _ = g_real_split(x, cfg)
        step = u / _real_derivative(x, cfg)
        x -= step
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    _, v = g_real_split(x, cfg)
    return complex(x, -v / _real_derivative(x, cfg))


def _local_scale(eps: complex, cfg: ModelConfig, g_value: complex, dg: complex) -> float:
    eps_b = _eps_b_or_none(cfg)
    constant = 0.0
    if eps_b is not None:
        constant = 1.0 / (TWO_PI * math.sqrt(-eps_b)) if cfg.dimension == 1 else math.sqrt(-eps_b) / math.pi
    return max(constant, abs(dg) * max(1.0, abs(eps)), abs(g_value), 1e-300)


def refine_pole(seed: complex, cfg: ModelConfig, index: Optional[int] = None,
                seed_source: str = "seed", tol: float = NEWTON_TOL) -> Resonance:
    """
    Newton iteration on g_denominator starting at `seed`.

    Steps are capped at 0.5 in modulus. Near-real roots, where Im g is below
    the resolution of the complex evaluation, are finished on the real axis.

    Args:
        seed (complex): Starting eps.
        cfg (ModelConfig): Model.
        index (int, optional): Label carried into errors and the result.
        seed_source (str): Tag recorded on the result.
        tol (float): Relative step tolerance.

    Returns:
        Resonance

    Raises:
        ConvergenceError: no-convergence, escaped-basin or upper-half-plane.
    """
    seed = complex(seed)
    eps = seed
    iterations = 0
    for iterations in range(1, NEWTON_MAX_ITER + 1):
        g_value = g_denominator(eps, cfg)
        step = g_value / _derivative(eps, cfg)
        if abs(step) > MAX_STEP:
            step *= MAX_STEP / abs(step)
        eps -= step
        if abs(eps - seed) > ESCAPE_RADIUS:
            raise ConvergenceError(
                f"pole {index}: iterate {eps:.6g} left the basin around seed {seed:.6g}",
                reason="escaped-basin", index=index)
        if abs(step) <= tol * max(1.0, abs(eps)):
            break
    else:
        raise ConvergenceError(
            f"pole {index}: no convergence after {NEWTON_MAX_ITER} iterations from {seed:.6g}",
            reason="no-convergence", index=index)

    if abs(eps.imag) < NEAR_REAL_RATIO * max(1.0, abs(eps)):
        eps = _polish_near_real(eps, cfg, tol)

    if eps.imag > UPPER_HALF_TOL:
        raise ConvergenceError(
            f"pole {index}: converged to {eps:.6g} in the upper half-plane",
            reason="upper-half-plane", index=index)

    g_value = g_denominator(eps, cfg)
    dg = _derivative(eps, cfg)
    residual = abs(g_value)
    logger.debug(f"pole {index}: eps={eps:.12g} residual={residual:.3e} after {iterations} steps ({seed_source})")
    return Resonance.build(index if index is not None else 0, eps, cfg.field_strength, residual,
                           seed_source, _local_scale(eps, cfg, g_value, dg), iterations)


def _config_at(cfg: ModelConfig, eps_b: float) -> ModelConfig:
    return ModelConfig.from_eps_b(cfg.dimension, cfg.field_strength, eps_b)


def track_pole(cfg: ModelConfig, index: int, start_eps_b: float, start_eps: complex,
               steps: int = HOMOTOPY_STEPS, tol: float = NEWTON_TOL) -> Resonance:
    """
    Follow a pole from (start_eps_b, start_eps) to cfg's eps_B by homotopy.

    Intermediate eps_B values are log-spaced; at least `steps` of them, more
    when the path is long.
    """
    target = cfg.eps_b
    span = abs(math.log(target / start_eps_b))
    count = max(steps, int(math.ceil(span / HOMOTOPY_LOG_STEP)))
    eps = complex(start_eps)
    for k in range(1, count + 1):
        eps_b = start_eps_b * (target / start_eps_b) ** (k / count)
        step_cfg = cfg if k == count else _config_at(cfg, eps_b)
        eps = refine_pole(eps, step_cfg, index=index, seed_source="continuation", tol=tol).eps
    return refine_pole(eps, cfg, index=index, seed_source="continuation", tol=tol)


def _continuation(cfg: ModelConfig, index: int, tol: float) -> Resonance:
    eps_b = cfg.eps_b
    starts = [eps_b * 2.0, eps_b * 0.5, eps_b * 4.0, eps_b * 0.25]
    if index > 0:
        starts.append(-max(10.0, 4.0 * abs(airy_zero(index))))
    if index == 0:
        starts.insert(0, min(TRACK_START, eps_b))
    last_error: Optional[Exception] = None
    for start in starts:
        start_cfg = _config_at(cfg, start)
        seed, _ = _best_seed(start_cfg, index, start)
        try:
            start_res = refine_pole(seed, start_cfg, index=index, tol=tol)
            return track_pole(cfg, index, start, start_res.eps, tol=tol)
        except (ConvergenceError, NumericalError) as e:
            last_error = e
            continue
    raise ConvergenceError(f"pole {index}: continuation failed ({last_error})",
                           reason=getattr(last_error, "reason", "no-convergence"), index=index)


def solve_index(cfg: ModelConfig, index: int, tol: float = NEWTON_TOL) -> Resonance:
    """Refine pole `index`, falling back to continuation in eps_B when the direct seed fails."""
    eps_b = _eps_b_or_none(cfg)
    if index == 0 and eps_b is not None and -eps_b < WEAK_SEED_MIN:
        start_cfg = _config_at(cfg, TRACK_START)
        seed, _ = _index_zero_seed(start_cfg, TRACK_START)
        start = refine_pole(seed, start_cfg, index=0, tol=tol)
        return track_pole(cfg, 0, TRACK_START, start.eps, tol=tol)

    seed, source = _best_seed(cfg, index, eps_b)
    try:
        return refine_pole(seed, cfg, index=index, seed_source=source, tol=tol)
    except ConvergenceError as e:
        if eps_b is None:
            raise
        logger.warning(f"pole {index}: {e.reason} from {source} seed, trying continuation")
        return _continuation(cfg, index, tol)


# ---------------------------------------------------------------------------
# argument principle
# ---------------------------------------------------------------------------

def _rectangle_boundary(rect: Rectangle, per_side: int) -> np.ndarray:
    re_lo, re_hi, im_lo, im_hi = rect
    t = np.linspace(0.0, 1.0, per_side, endpoint=False)
    bottom = re_lo + (re_hi - re_lo) * t + 1j * im_lo
    right = re_hi + 1j * (im_lo + (im_hi - im_lo) * t)
    top = re_hi - (re_hi - re_lo) * t + 1j * im_hi
    left = re_lo + 1j * (im_hi - (im_hi - im_lo) * t)
    return np.concatenate([bottom, right, top, left])


def argument_principle_count(func: Callable[[complex], complex], rect: Rectangle,
                             min_points: int = 64, max_points: int = 256) -> int:
    """
    Number of zeros of an analytic `func` inside an axis-aligned rectangle.

    Samples the boundary counterclockwise and sums phase increments, doubling
    the points per side until two successive counts agree with every
    increment below pi/2.

    Args:
        func: Analytic function of one complex variable.
        rect: (re_lo, re_hi, im_lo, im_hi).

    Raises:
        NumericalError: A zero on the contour or a winding that never resolves.
    """
    re_lo, re_hi, im_lo, im_hi = rect
    if not (re_lo < re_hi and im_lo < im_hi):
        raise ConfigError(f"degenerate rectangle {rect}")

    previous = None
    per_side = min_points
    while True:
        points = _rectangle_boundary(rect, per_side)
        values = np.array([func(z) for z in points], dtype=complex)
        if not np.all(np.isfinite(values)) or np.any(values == 0):
            raise NumericalError(f"function vanishes or is not finite on contour {rect}")
        ratios = np.roll(values, -1) / values
        increments = np.angle(ratios)
        winding = int(round(increments.sum() / TWO_PI))
        resolved = bool(np.max(np.abs(increments)) < math.pi / 2)
        logger.debug(f"contour {rect}: {per_side} points/side, winding {winding}, resolved={resolved}")

        if resolved and previous == winding:
            return winding
        if per_side >= max_points:
            if resolved:
                return winding
            raise NumericalError(f"winding number on {rect} not resolved with {per_side} points per side")
        previous = winding if resolved else None
        per_side *= 2


def _bounding_rectangle(found: Sequence[complex], outside: Sequence[complex]) -> Rectangle:
    re = [z.real for z in found]
    im = [z.imag for z in found]
    box = [min(re), max(re), min(im), max(im)]
    margin = 0.25
    for z in outside:
        dx = max(box[0] - z.real, z.real - box[1], 0.0)
        dy = max(box[2] - z.imag, z.imag - box[3], 0.0)
        gap = max(dx, dy)
        if gap > 0:
            margin = min(margin, 0.5 * gap)
    margin = max(margin, 1e-3)
    return box[0] - margin, box[1] + margin, box[2] - margin, max(box[3] + margin, margin)


def _inside(z: complex, rect: Rectangle) -> bool:
    return rect[0] < z.real < rect[1] and rect[2] < z.imag < rect[3]


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _relabel(results: Dict[int, Resonance]) -> Dict[int, Resonance]:
    positive = sorted((r for n, r in results.items() if n > 0), key=lambda r: r.eps.real)
    negative = sorted((r for n, r in results.items() if n < 0), key=lambda r: abs(r.eps))
    out = {0: results[0]} if 0 in results else {}
    for i, res in enumerate(positive, start=1):
        if res.index != i:
            logger.debug(f"relabel pole {res.index} -> {i}")
        out[i] = res.relabel(i)
    for i, res in enumerate(negative, start=1):
        if res.index != -i:
            logger.debug(f"relabel pole {res.index} -> {-i}")
        out[-i] = res.relabel(-i)
    return out


def _find_duplicate(results: Dict[int, Resonance]) -> Optional[Tuple[int, int]]:
    items = sorted(results.items())
    for i, (n1, r1) in enumerate(items):
        for n2, r2 in items[i + 1:]:
            if abs(r1.eps - r2.eps) <= DEDUP_TOL * max(1.0, abs(r1.eps)):
                return n1, n2
    return None


def enumerate_poles(cfg: ModelConfig, n_min: int, n_max: int, tol: float = NEWTON_TOL,
                    check_contour: bool = True, max_workers: int = MAX_WORKERS) -> PoleSet:
    """
    Refine every pole n_min..n_max in parallel and assemble a PoleSet.

    Duplicates are re-solved by continuation; a persisting duplicate is an
    error. With `check_contour`, the argument principle on a rectangle
    around the found poles (and just short of the neighbours outside the
    range) must count exactly the poles known to lie inside.

    Raises:
        ConfigError: Bad index range, or D = 2 poles deeper than |Im eps| = 2.
        ConvergenceError: A pole could not be refined (index attached).
        MissedPoleError: The contour encloses more zeros than were found.
    """
    seeds = seed_poles(cfg, n_min, n_max)
    if cfg.dimension == 2:
        deep = [n for n, seed, _ in seeds if abs(seed.imag) > D2_IM_LIMIT]
        if deep:
            raise ConfigError(f"D = 2 poles {deep} lie beyond |Im eps| = {D2_IM_LIMIT}")

    logger.info(f"Refining {len(seeds)} poles for D={cfg.dimension}, F={cfg.field_strength}")
    results: Dict[int, Resonance] = {}
    with ProgressTracker(len(seeds), "Poles", SHOW_PROGRESS) as tracker:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = {executor.submit(solve_index, cfg, n, tol): n for n, _, _ in seeds}
            for future in as_completed(futures):
                n = futures[future]
                try:
                    results[n] = future.result()
                except ConvergenceError as e:
                    e.index = n
                    logger.error(f"Pole {n} failed: {e}")
                    raise
                finally:
                    tracker.advance()

    results = _relabel(results)
    duplicate = _find_duplicate(results)
    retried = set()
    while duplicate is not None:
        n = max(duplicate, key=abs)
        if n in retried:
            raise ConvergenceError(f"poles {duplicate} converge to the same point",
                                   reason="duplicate", index=n)
        retried.add(n)
        logger.warning(f"poles {duplicate} coincide, re-solving {n} by continuation")
        results[n] = _continuation(cfg, n, tol)
        results = _relabel(results)
        duplicate = _find_duplicate(results)

    resonances = tuple(results[n] for n in sorted(results))
    count = None
    if check_contour:
        count = _verify_contour(cfg, resonances, n_min, n_max, tol)
    logger.info(f"Found {len(resonances)} poles in [{n_min}, {n_max}]")
    return PoleSet(cfg=cfg, resonances=resonances, index_range=(n_min, n_max), contour_count=count)


def _neighbours(cfg: ModelConfig, n_min: int, n_max: int, tol: float) -> List[complex]:
    indices = {n_max + 1, n_min - 1}
    if n_min == 0:
        indices.add(-1)
    out = []
    for n in sorted(indices):
        if cfg.dimension == 2 and n < 0:
            continue
        try:
            out.append(solve_index(cfg, n, tol).eps)
        except ResonanceLabError:
            out.append(_best_seed(cfg, n, _eps_b_or_none(cfg))[0])
    return out


def _verify_contour(cfg: ModelConfig, resonances: Sequence[Resonance], n_min: int, n_max: int,
                    tol: float) -> int:
    found = [r.eps for r in resonances]
    neighbours = _neighbours(cfg, n_min, n_max, tol)
    rect = _bounding_rectangle(found, [z for z in neighbours if not _inside(z, _bounding_rectangle(found, []))])
    if cfg.dimension == 2:
        rect = (rect[0], rect[1], max(rect[2], -D2_IM_LIMIT), rect[3])
    expected = sum(_inside(z, rect) for z in found) + sum(_inside(z, rect) for z in neighbours)
    count = argument_principle_count(lambda z: g_denominator(z, cfg), rect)
    if count > expected:
        raise MissedPoleError(f"contour {rect} encloses {count} zeros but only {expected} poles are known")
    if count < expected:
        logger.warning(f"contour {rect} encloses {count} zeros, fewer than the {expected} poles found")
    return count


def crossover_eps_b(dim: int = 1, lo: float = -2.0, hi: float = -0.5, field_strength: float = 1.0,
                    xtol: float = 1e-4) -> float:
    """
    eps_B at which the widths of poles 0 and 1 coincide, by bisection.

    Raises:
        NumericalError: gamma_0 - gamma_1 does not change sign on [lo, hi].
    """
    def gap(eps_b: float) -> float:
        cfg = ModelConfig.from_eps_b(dim, field_strength, eps_b)
        return solve_index(cfg, 0).gamma_dimless - solve_index(cfg, 1).gamma_dimless

    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo * g_hi > 0:
        raise NumericalError(f"gamma_0 - gamma_1 keeps its sign on [{lo}, {hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_mid * g_lo <= 0:
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
    return 0.5 * (lo + hi)

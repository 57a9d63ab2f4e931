"""
Module: core.field_model
Point-like attractive well in a uniform field: free and full retarded Green's
functions, the resonance denominators g_D (D = 1, 2, 3), renormalization,
bound states and the running-coupling flow.

Atomic units with hbar = 2m = 1. Root finding works on the dimensionless
energy eps = E * F^(-2/3); raw complex arguments to g_denominator are read as
eps, raw complex arguments to the Green's functions as physical E.
"""

import cmath
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

import numpy as np
from scipy import integrate

from config import POLE_TOL, QUAD_TOL
from logger import logger
from core.airy_kernel import ai_ci_product, airy_products, real_airy_split
from core.errors import (
    ConfigError,
    LandauPoleError,
    NoBoundStateError,
    PoleProximityError,
    QuadratureError,
)

FOUR_PI = 4.0 * math.pi
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ComplexEnergy:
    """A complex energy tagged with its scaling: physical E or eps = E F^(-2/3)."""

    value: complex
    scaled: bool = True

    def eps(self, F: float) -> complex:
        return complex(self.value) if self.scaled else complex(self.value) * F ** (-2.0 / 3.0)

    def physical(self, F: float) -> complex:
        return complex(self.value) * F ** (2.0 / 3.0) if self.scaled else complex(self.value)


EnergyLike = Union[complex, float, ComplexEnergy]


@dataclass(frozen=True)
class ModelConfig:
    """
    Model parameters.

    Exactly one binding description is given: `coupling` (lambda, D = 1),
    `bound_energy` (E_B < 0, any D) or the pair (`lambda_r`, `mu`) for D = 2, 3.
    A zero field is accepted as the reference for the time-domain propagator;
    every resonance computation requires F > 0.
    """

    dimension: int
    field_strength: float
    coupling: Optional[float] = None
    bound_energy: Optional[float] = None
    lambda_r: Optional[float] = None
    mu: Optional[float] = None

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ConfigError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        if not math.isfinite(self.field_strength) or self.field_strength < 0:
            raise ConfigError(f"field strength must be a nonnegative real, got {self.field_strength}")

        given = [
            self.coupling is not None,
            self.bound_energy is not None,
            self.lambda_r is not None or self.mu is not None,
        ]
        if sum(given) != 1:
            raise ConfigError("exactly one of coupling, bound_energy or (lambda_r, mu) is required")

        if self.coupling is not None:
            if self.dimension != 1:
                raise ConfigError("a bare coupling lambda is only meaningful for D = 1")
            if self.coupling <= 0:
                raise ConfigError(f"coupling must be positive, got {self.coupling}")
        if self.bound_energy is not None and self.bound_energy >= 0:
            raise ConfigError(f"bound energy must be negative, got {self.bound_energy}")
        if given[2]:
            if self.dimension == 1:
                raise ConfigError("running coupling (lambda_r, mu) applies to D = 2, 3 only")
            if self.lambda_r is None or self.mu is None:
                raise ConfigError("lambda_r and mu must be given together")
            if self.mu <= 0:
                raise ConfigError(f"mu must be positive, got {self.mu}")
            if self.lambda_r == 0:
                raise ConfigError("lambda_r must be nonzero")

    @classmethod
    def from_coupling(cls, field_strength: float, coupling: float) -> "ModelConfig":
        return cls(dimension=1, field_strength=field_strength, coupling=coupling)

    @classmethod
    def from_bound_energy(cls, dimension: int, field_strength: float, bound_energy: float) -> "ModelConfig":
        return cls(dimension=dimension, field_strength=field_strength, bound_energy=bound_energy)

    @classmethod
    def from_eps_b(cls, dimension: int, field_strength: float, eps_b: float) -> "ModelConfig":
        return cls.from_bound_energy(dimension, field_strength, eps_b * field_strength ** (2.0 / 3.0))

    @classmethod
    def from_running(cls, dimension: int, field_strength: float, lambda_r: float, mu: float) -> "ModelConfig":
        return cls(dimension=dimension, field_strength=field_strength, lambda_r=lambda_r, mu=mu)

    @property
    def binding_kind(self) -> str:
        if self.coupling is not None:
            return "coupling"
        if self.bound_energy is not None:
            return "bound_energy"
        return "running"

    @property
    def energy_b(self) -> float:
        return bound_state_energy(self)

    @property
    def eps_b(self) -> float:
        return self.energy_b * self.field_scale ** -1

    @property
    def field_scale(self) -> float:
        """F^(2/3): converts eps to physical energy."""
        if self.field_strength <= 0:
            raise ConfigError("dimensionless energies need a positive field strength")
        return self.field_strength ** (2.0 / 3.0)

    @property
    def lam(self) -> float:
        """D = 1 coupling lambda = 2 (-E_B)^(1/2)."""
        if self.dimension != 1:
            raise ConfigError("lambda is defined for D = 1 only")
        if self.coupling is not None:
            return self.coupling
        return 2.0 * math.sqrt(-self.bound_energy)

    def with_field(self, field_strength: float) -> "ModelConfig":
        return replace(self, field_strength=field_strength)


@dataclass(frozen=True)
class ScaledCoordinate:
    rho: complex
    rho_prime: complex
    rho_minus: complex
    rho_plus: complex

    @classmethod
    def from_points(cls, E: complex, x: float, xp: float, F: float) -> "ScaledCoordinate":
        """rho := F^(1/3)(x + E/F); rho - rho' is real, so rho_- sits at min(x, x')."""
        f13 = F ** (1.0 / 3.0)
        rho = f13 * (x + E / F)
        rho_prime = f13 * (xp + E / F)
        if x <= xp:
            return cls(rho, rho_prime, rho, rho_prime)
        return cls(rho, rho_prime, rho_prime, rho)


@dataclass(frozen=True)
class RunningCoupling:
    lambda_r: float
    mu: float
    dimension: int

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ConfigError("running couplings exist for D = 2, 3 only")
        if self.mu <= 0:
            raise ConfigError(f"mu must be positive, got {self.mu}")

    def to_config(self, field_strength: float) -> ModelConfig:
        return ModelConfig.from_running(self.dimension, field_strength, self.lambda_r, self.mu)

    def bound_state_energy(self) -> float:
        return bound_state_energy(self.to_config(0.0))


def _as_eps(energy: EnergyLike, F: float) -> complex:
    if isinstance(energy, ComplexEnergy):
        return energy.eps(F)
    return complex(energy)


def _as_physical(energy: EnergyLike, F: float) -> complex:
    if isinstance(energy, ComplexEnergy):
        return energy.physical(F)
    return complex(energy)


def _require_field(F: float) -> None:
    if F <= 0:
        raise ConfigError("the free Stark Green's function needs F > 0")


def c_d(dimension: int) -> float:
    """C_D = 2^(2-D) pi^((3-D)/2) / Gamma((D-1)/2)."""
    if dimension not in (2, 3):
        raise ConfigError("C_D is defined for D = 2, 3")
    return 2.0 ** (2 - dimension) * math.pi ** ((3 - dimension) / 2.0) / math.gamma((dimension - 1) / 2.0)


def g0_1d(E: EnergyLike, x, xp, F: float):
    """
    Free retarded Green's function in D = 1,
    G0(E; x, x') = -pi F^(-1/3) Ai(-rho_-) Ci+(-rho_+).

    Args:
        E: Physical energy (or ComplexEnergy).
        x: Position(s), scalar or array.
        xp: Source position(s).
        F (float): Field strength > 0.

    Returns:
        complex or np.ndarray
    """
    _require_field(F)
    energy = _as_physical(E, F)
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    f13 = F ** (1.0 / 3.0)
    shift = energy / F
    rho_minus = f13 * (np.minimum(x, xp) + shift)
    rho_plus = f13 * (np.maximum(x, xp) + shift)
    value = -math.pi / f13 * ai_ci_product(-rho_minus, -rho_plus)
    return complex(value) if np.ndim(value) == 0 else value


def g0_energy_derivative(E: EnergyLike, F: float) -> complex:
    """dG0(E; 0, 0)/dE = pi F^(-1) P'(-eps) with P = Ai Ci+."""
    _require_field(F)
    eps = _as_physical(E, F) * F ** (-2.0 / 3.0)
    _, dp, _ = airy_products(-eps)
    return complex(math.pi / F * dp)


def g0_asymptotic_1d(E: complex, x: float, xp: float) -> complex:
    """
    Large-|E| form of G0 valid for -pi < arg E < -2 pi/3,
    -(1/2)(-E)^(-1/2) exp(-(-E)^(1/2)|x - x'|).
    """
    s = cmath.sqrt(-complex(E))
    return -cmath.exp(-s * abs(x - xp)) / (2.0 * s)


def krein_full_green(E: EnergyLike, x: float, xp: float, cfg: ModelConfig) -> complex:
    """
    Full Green's function of the D = 1 model through Krein's formula.

    Raises:
        ConfigError: For D != 1.
        PoleProximityError: When g(lambda, E) vanishes to working precision.
    """
    if cfg.dimension != 1:
        raise ConfigError("Krein's formula is implemented for D = 1")
    F = cfg.field_strength
    g00 = g0_1d(E, 0.0, 0.0, F)
    g = 1.0 / cfg.lam + g00
    if abs(g) < POLE_TOL * abs(g00):
        raise PoleProximityError(f"E={_as_physical(E, F)!r} is at a resonance (|g|={abs(g):.3e})")
    return g0_1d(E, x, xp, F) - g0_1d(E, x, 0.0, F) * g0_1d(E, 0.0, xp, F) / g


def krein_remainder(E: EnergyLike, x: float, xp: float, F: float) -> complex:
    """R(E; x, x') = G0(0,0) G0(x,x') - G0(x,0) G0(0,x'); zero when x, x' straddle the origin."""
    return g0_1d(E, 0.0, 0.0, F) * g0_1d(E, x, xp, F) - g0_1d(E, x, 0.0, F) * g0_1d(E, 0.0, xp, F)


def bound_state_energy(cfg: ModelConfig) -> float:
    """
    Zero-field bound state energy.

    Raises:
        NoBoundStateError: D = 3 with lambda_R <= 4 pi / mu.
    """
    if cfg.bound_energy is not None:
        return float(cfg.bound_energy)
    if cfg.dimension == 1:
        return -cfg.coupling ** 2 / 4.0

    lam, mu = cfg.lambda_r, cfg.mu
    if cfg.dimension == 3:
        if lam <= FOUR_PI / mu:
            raise NoBoundStateError(f"no bound state for lambda_R={lam} <= 4 pi/mu={FOUR_PI / mu}")
        return -(mu - FOUR_PI / lam) ** 2
    return -mu ** 2 * math.exp(-FOUR_PI / lam)


def flow_coupling(rc: RunningCoupling, mu_new: float) -> RunningCoupling:
    """
    Transport lambda_R from rc.mu to mu_new keeping E_B fixed.

    Raises:
        LandauPoleError: If the flow denominator is not positive.
    """
    if mu_new <= 0:
        raise ConfigError(f"mu must be positive, got {mu_new}")
    if rc.dimension == 3:
        denominator = 1.0 + (mu_new - rc.mu) * rc.lambda_r / FOUR_PI
    else:
        denominator = 1.0 + rc.lambda_r / TWO_PI * math.log(mu_new / rc.mu)
    if denominator <= 0:
        raise LandauPoleError(
            f"coupling lambda_R={rc.lambda_r} at mu={rc.mu} has no continuation to mu={mu_new}"
        )
    return RunningCoupling(lambda_r=rc.lambda_r / denominator, mu=mu_new, dimension=rc.dimension)


def i2_saddle(E: float, F: float) -> float:
    """Saddle-point value of I_2(E) for E < 0."""
    return math.sqrt(math.pi * F / 8.0) * (-E) ** -0.75 * math.exp(-4.0 / 3.0 * (-E) ** 1.5 / F)


def i2_quadrature(E: float, F: float) -> float:
    """I_2(E) = int_0^inf dk (k^2 - E)^(-1/2) exp[-(4/3) F^(-1) (k^2 - E)^(3/2)], E < 0."""
    base = (-E) ** 1.5

    def integrand(k: float) -> float:
        q = k * k - E
        return math.exp(-4.0 / 3.0 * (q ** 1.5 - base) / F) / math.sqrt(q)

    value, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=200)
    return value * math.exp(-4.0 / 3.0 * base / F)


def _tail_binomial(a: complex, kappa_max: float, terms: int = 10) -> complex:
    """int_K^inf (k^2 + a)^(-7/2) dk by the binomial series in a/K^2."""
    total, coeff = 0j, 1.0
    for j in range(terms):
        total += coeff * a ** j * kappa_max ** (-6 - 2 * j) / (6 + 2 * j)
        coeff *= (-3.5 - j) / (j + 1)
    return total


def _subtraction_tail(eps: complex, mu_scaled: float, kappa_max: float, dimension: int) -> complex:
    a = -eps
    root_q = cmath.sqrt(kappa_max ** 2 + a)
    root_mu = math.sqrt(kappa_max ** 2 + mu_scaled ** 2)
    if dimension == 3:
        return (root_mu - root_q) / TWO_PI + (kappa_max ** 2 + a) ** -2.5 / (64.0 * math.pi)
    leading = -cmath.log((kappa_max + root_q) / (kappa_max + root_mu)) / TWO_PI
    return leading + 5.0 / (64.0 * math.pi) * _tail_binomial(a, kappa_max)


def default_kappa_max(eps: complex) -> float:
    return max(10.0, 5.0 * (1.0 + math.sqrt(abs(eps))))


def subtracted_integral(
    eps: complex,
    mu_scaled: float,
    dimension: int,
    kappa_max: Optional[float] = None,
    tol: float = QUAD_TOL,
) -> complex:
    """
    J_D(eps) = int_0^inf [Ai Ci+(k^2 - eps) - 1/(2 pi sqrt(k^2 + mu^2))] k^(D-2) dk
    in scaled momentum k -> k F^(-1/3).

    Gauss-Kronrod on [0, kappa_max] plus the analytic tail of the subtracted
    large-q expansion Ai Ci+(q) ~ q^(-1/2)(1 + 5/(32 q^3)) / 2 pi.

    Raises:
        QuadratureError: When the adaptive scheme misses the tolerance.
    """
    eps = complex(eps)
    if kappa_max is None:
        kappa_max = default_kappa_max(eps)
    power = dimension - 2

    def integrand(kappa: float) -> np.ndarray:
        q = kappa * kappa - eps
        value = (ai_ci_product(q, q) - 1.0 / (TWO_PI * math.sqrt(kappa * kappa + mu_scaled ** 2))) * kappa ** power
        value = complex(value)
        return np.array([value.real, value.imag])

    turning = math.sqrt(eps.real) if eps.real > 0 else None
    points = [turning] if turning is not None and turning < kappa_max else None
    result, err, info = integrate.quad_vec(
        integrand, 0.0, kappa_max, epsabs=tol, epsrel=tol, points=points, limit=2000, full_output=True
    )
    if not info.success and err > 10.0 * tol:
        raise QuadratureError(
            f"D={dimension} subtracted integral at eps={eps!r} did not converge (err={err:.2e})"
        )
    logger.debug(f"J_{dimension}({eps:.6g}) evaluated with {info.intervals.shape[0]} intervals, err={err:.2e}")
    return complex(result[0], result[1]) + _subtraction_tail(eps, mu_scaled, kappa_max, dimension)


def _ai_squared_integral(x: float, dimension: int) -> float:
    """int_0^inf Ai(k^2 - x)^2 k^(D-2) dk, evaluated with the decay factored out."""
    _, _, _, _, s0 = real_airy_split(-x)
    power = dimension - 2

    def integrand(kappa: float) -> float:
        eai, _, _, _, s = real_airy_split(kappa * kappa - x)
        return eai * eai * math.exp(-2.0 * (s - s0)) * kappa ** power

    upper = default_kappa_max(x)
    value, _ = integrate.quad(integrand, 0.0, upper, epsabs=0.0, epsrel=1e-10, limit=400)
    return value * math.exp(-2.0 * s0)


def g_denominator(energy: EnergyLike, cfg: ModelConfig, kappa_max: Optional[float] = None) -> complex:
    """
    Dimension-dispatched resonance denominator whose zeros are the poles.

    D = 1: Ai(-eps) Ci+(-eps) - (1/2 pi)(-eps_B)^(-1/2).
    D = 3: closed form; dimensionless when E_B is given, physical (1/lambda_R
           - mu/4 pi - F^(1/3)/4 [...]) when (lambda_R, mu) is given.
    D = 2: regularized quadrature; with E_B given, mu is eliminated.

    Args:
        energy: eps (raw complex) or ComplexEnergy.
        cfg (ModelConfig): Model.
        kappa_max (float, optional): D = 2 quadrature split point.

    Returns:
        complex
    """
    F = cfg.field_strength
    _require_field(F)
    eps = _as_eps(energy, F)

    if cfg.dimension == 1:
        p, _, _ = airy_products(-eps)
        return complex(p) - 1.0 / (TWO_PI * math.sqrt(-cfg.eps_b))

    if cfg.dimension == 3:
        p, _, q = airy_products(-eps)
        bracket = complex(eps * p + q)
        if cfg.binding_kind == "running":
            return 1.0 / cfg.lambda_r - cfg.mu / FOUR_PI - F ** (1.0 / 3.0) / 4.0 * bracket
        return math.sqrt(-cfg.eps_b) / math.pi + bracket

    if cfg.binding_kind == "running":
        mu_scaled = cfg.mu * F ** (-1.0 / 3.0)
        return 1.0 / cfg.lambda_r - c_d(2) * subtracted_integral(eps, mu_scaled, 2, kappa_max)
    return -math.log(-cfg.eps_b) / FOUR_PI - c_d(2) * subtracted_integral(eps, 1.0, 2, kappa_max)


def g_denominator_derivative(energy: EnergyLike, cfg: ModelConfig) -> Optional[complex]:
    """d g / d eps in closed form for D = 1, 3; None for D = 2."""
    F = cfg.field_strength
    eps = _as_eps(energy, F)
    if cfg.dimension == 1:
        _, dp, _ = airy_products(-eps)
        return complex(-dp)
    if cfg.dimension == 3:
        p, _, _ = airy_products(-eps)
        if cfg.binding_kind == "running":
            return complex(-F ** (1.0 / 3.0) / 4.0 * p)
        return complex(p)
    return None


def g3_quadrature(energy: EnergyLike, cfg: ModelConfig, kappa_max: Optional[float] = None) -> complex:
    """D = 3 denominator from the regularized integral instead of its closed form."""
    if cfg.dimension != 3:
        raise ConfigError("g3_quadrature needs a D = 3 model")
    F = cfg.field_strength
    eps = _as_eps(energy, F)
    if cfg.binding_kind == "running":
        mu_scaled = cfg.mu * F ** (-1.0 / 3.0)
        return 1.0 / cfg.lambda_r - c_d(3) * F ** (1.0 / 3.0) * subtracted_integral(eps, mu_scaled, 3, kappa_max)
    # dimensionless normalization of the closed form: multiply by -4 F^(-1/3)
    j3 = subtracted_integral(eps, 1.0, 3, kappa_max)
    return math.sqrt(-cfg.eps_b) / math.pi - 1.0 / math.pi + 4.0 * c_d(3) * j3


def g_real_split(x: float, cfg: ModelConfig) -> Tuple[float, float]:
    """
    Real and imaginary parts of g_denominator at real eps = x, computed so the
    imaginary part keeps full relative accuracy even when it is exponentially
    small (weak-field bound-state pole).
    """
    F = cfg.field_strength
    eai, eaip, ebi, ebip, s = real_airy_split(-x)
    ai_bi, aip_bip = eai * ebi, eaip * ebip
    decay = math.exp(-2.0 * s)
    ai_sq, aip_sq = eai * eai * decay, eaip * eaip * decay

    if cfg.dimension == 1:
        return ai_bi - 1.0 / (TWO_PI * math.sqrt(-cfg.eps_b)), ai_sq

    if cfg.dimension == 3:
        re_bracket = x * ai_bi + aip_bip
        im_bracket = x * ai_sq + aip_sq
        if cfg.binding_kind == "running":
            f13 = F ** (1.0 / 3.0)
            return 1.0 / cfg.lambda_r - cfg.mu / FOUR_PI - f13 / 4.0 * re_bracket, -f13 / 4.0 * im_bracket
        return math.sqrt(-cfg.eps_b) / math.pi + re_bracket, im_bracket

    re_part = g_denominator(complex(x, 0.0), cfg).real
    return re_part, -c_d(2) * _ai_squared_integral(x, 2)


def g3_weak_field(E: complex, cfg: ModelConfig) -> complex:
    """F -> 0 limit of the D = 3 denominator: 1/lambda_R - mu/4 pi + (-E)^(1/2)/4 pi."""
    if cfg.dimension != 3:
        raise ConfigError("g3_weak_field needs a D = 3 model")
    root = cmath.sqrt(-complex(E))
    if cfg.binding_kind == "running":
        return 1.0 / cfg.lambda_r - cfg.mu / FOUR_PI + root / FOUR_PI
    return (root - math.sqrt(-cfg.energy_b)) / FOUR_PI


def g2_weak_field(E: complex, cfg: ModelConfig) -> complex:
    """Weak-field D = 2 denominator (1/4 pi)[ln(E/E_B) - i I_2(E)] for E near the negative axis."""
    if cfg.dimension != 2:
        raise ConfigError("g2_weak_field needs a D = 2 model")
    E = complex(E)
    return (cmath.log(E / cfg.energy_b) - 1j * i2_quadrature(E.real, cfg.field_strength)) / FOUR_PI

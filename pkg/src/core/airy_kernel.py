"""
Module: core.airy_kernel
Complex Airy functions Ai, Bi, their derivatives, the outgoing combination
Ci+ = Bi + i*Ai and the real zeros of Ai.

Values come from the AMOS routines behind scipy.special.airy / airye. The
exponentially scaled routine backs the log-modulus variants used where single
factors overflow but their products do not.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy import special

from core.errors import AiryOverflowError

EPS = float(np.finfo(float).eps)
OVERFLOW_EXPONENT = 700.0

AI0 = 0.3550280538878172     # 3^(-2/3) / Gamma(2/3)
AIP0 = -0.2588194037928068   # -3^(-1/3) / Gamma(1/3)
BI0 = 0.6149266274460007     # 3^(-1/6) / Gamma(2/3)
BIP0 = 0.4482883573538264    # 3^(1/6) / Gamma(1/3)

OMEGA = cmath.exp(2j * math.pi / 3)
CI_PREFACTOR = 2.0 * cmath.exp(1j * math.pi / 6)


@dataclass(frozen=True)
class AiryValues:
    z: complex
    ai: complex
    aip: complex
    bi: complex
    bip: complex
    est_error: float

    @property
    def wronskian(self) -> complex:
        return self.ai * self.bip - self.aip * self.bi


@dataclass(frozen=True)
class AiryZero:
    n: int
    a_n: float


def zeta(z: complex) -> complex:
    """(2/3) z^(3/2) on the principal branch."""
    return (2.0 / 3.0) * complex(z) ** 1.5


def _check_exponent(z: complex) -> None:
    if abs(zeta(z).real) > OVERFLOW_EXPONENT:
        raise AiryOverflowError(f"Airy exponent exceeds float range at z={z!r}")


def airy_eval(z: complex) -> AiryValues:
    """
    Evaluate Ai, Ai', Bi, Bi' at a complex point.

    Args:
        z (complex): Argument.

    Returns:
        AiryValues: The four values and an absolute error estimate.

    Raises:
        AiryOverflowError: When |Re(2/3 z^(3/2))| exceeds ~700.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"Airy argument must be finite, got {z!r}")
    _check_exponent(z)

    ai, aip, bi, bip = (complex(v) for v in special.airy(z))
    if z.imag == 0.0:
        ai, aip, bi, bip = (complex(v.real, 0.0) for v in (ai, aip, bi, bip))

    # AMOS loses roughly |zeta| ulps in the exponential and phase factors
    dominant = max(abs(ai), abs(aip), abs(bi), abs(bip), 1.0)
    est_error = 10.0 * EPS * dominant * max(1.0, abs(zeta(z)))
    return AiryValues(z=z, ai=ai, aip=aip, bi=bi, bip=bip, est_error=est_error)


def ci_plus(z: complex) -> Tuple[complex, complex]:
    """
    Ci+(z) = Bi(z) + i Ai(z) and its derivative.

    Off the sector |arg z| < pi/3 both Bi and i*Ai grow while their sum may
    decay, so the value is taken from Ci+(z) = 2 e^{i pi/6} Ai(z e^{2 i pi/3}).
    """
    z = complex(z)
    if z == 0 or abs(cmath.phase(z)) < math.pi / 3:
        vals = airy_eval(z)
        return vals.bi + 1j * vals.ai, vals.bip + 1j * vals.aip

    w = z * OMEGA
    _check_exponent(w)
    ai, aip, _, _ = special.airy(w)
    return CI_PREFACTOR * complex(ai), CI_PREFACTOR * OMEGA * complex(aip)


def _log_scaled_ai(w: complex) -> Tuple[complex, complex]:
    eai, eaip, _, _ = special.airye(w)
    z3 = zeta(w)
    with np.errstate(divide="ignore"):
        return complex(np.log(complex(eai))) - z3, complex(np.log(complex(eaip))) - z3


def log_ai(z: complex) -> Tuple[complex, complex]:
    """
    Complex logarithms of Ai(z) and Ai'(z).

    Real part is log-modulus, imaginary part the phase (mod 2 pi). A zero
    value yields -inf real part.
    """
    return _log_scaled_ai(complex(z))


def log_ci_plus(z: complex) -> Tuple[complex, complex]:
    """Complex logarithms of Ci+(z) and Ci+'(z)."""
    w = complex(z) * OMEGA
    la, lap = _log_scaled_ai(w)
    log_pref = cmath.log(CI_PREFACTOR)
    return la + log_pref, lap + log_pref + cmath.log(OMEGA)


def _zeta_array(z: np.ndarray) -> np.ndarray:
    return (2.0 / 3.0) * z ** 1.5


def ai_ci_product(a, c, da: bool = False, dc: bool = False) -> np.ndarray:
    """
    Ai^(da)(a) * Ci+^(dc)(c), elementwise.

    Both factors are taken from exponentially scaled Ai values (Ci+ through
    the rotation identity) and recombined with a single exponent, so the
    product stays finite whenever it is representable.

    Args:
        a: Argument(s) of the Ai factor.
        c: Argument(s) of the Ci+ factor.
        da (bool): Use Ai' instead of Ai.
        dc (bool): Use Ci+' instead of Ci+.

    Returns:
        np.ndarray: Complex products (0-d for scalar input).

    Raises:
        AiryOverflowError: When the product itself overflows.
    """
    a = np.asarray(a, dtype=complex)
    w = np.asarray(c, dtype=complex) * OMEGA
    eai, eaip, _, _ = special.airye(a)
    fai, faip, _, _ = special.airye(w)
    left = eaip if da else eai
    right = OMEGA * faip if dc else fai
    exponent = -_zeta_array(a) - _zeta_array(w)
    if np.any(exponent.real > OVERFLOW_EXPONENT):
        raise AiryOverflowError("Airy product exceeds float range")
    return CI_PREFACTOR * left * right * np.exp(exponent)


def airy_products(z) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    P(z) = Ai(z) Ci+(z), its derivative P'(z) and Q(z) = Ai'(z) Ci+'(z).

    Note Q'(z) = z P'(z), which the resonance denominators rely on.
    """
    z = np.asarray(z, dtype=complex)
    w = z * OMEGA
    eai, eaip, _, _ = special.airye(z)
    fai, faip, _, _ = special.airye(w)
    exponent = -_zeta_array(z) - _zeta_array(w)
    if np.any(exponent.real > OVERFLOW_EXPONENT):
        raise AiryOverflowError("Airy product exceeds float range")
    scale = CI_PREFACTOR * np.exp(exponent)
    p = scale * eai * fai
    dp = scale * (eaip * fai + OMEGA * eai * faip)
    q = scale * OMEGA * eaip * faip
    return p, dp, q


def real_airy_split(x: float) -> Tuple[float, float, float, float, float]:
    """
    Scaled real values (Ai, Ai', Bi, Bi') at real x together with their scale.

    For x > 0 returns Ai*e^{s}, Ai'*e^{s}, Bi*e^{-s}, Bi'*e^{-s} and s =
    2/3 x^{3/2}; for x <= 0 the plain values and s = 0. Used where the
    imaginary part Ai^2 of Ai*Ci+ is far below the resolution of Ai*Bi.
    """
    x = float(x)
    if x > 0.0:
        eai, eaip, ebi, ebip = special.airye(x)
        return float(eai), float(eaip), float(ebi), float(ebip), (2.0 / 3.0) * x ** 1.5
    ai, aip, bi, bip = special.airy(x)
    return float(ai), float(aip), float(bi), float(bip), 0.0


def airy_maclaurin(z: complex, terms: int = 120) -> Tuple[complex, complex, complex, complex]:
    """
    Power-series evaluation of (Ai, Ai', Bi, Bi'), accurate for |z| <~ 6.

    Kept as an independent check on the AMOS path.
    """
    z = complex(z)
    z3 = z ** 3
    f, g = 1.0 + 0j, z
    fp, gp = 0j, 1.0 + 0j
    tf, tg = 1.0 + 0j, z
    for k in range(1, terms):
        tf = tf * z3 / ((3 * k - 1) * (3 * k))
        tg = tg * z3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        fp += tf * (3 * k) / z if z != 0 else 0
        gp += tg * (3 * k + 1) / z if z != 0 else 0
        if abs(tf) + abs(tg) < 1e-18 * (abs(f) + abs(g)):
            break
    c1, c2 = AI0, -AIP0
    ai = c1 * f - c2 * g
    aip = c1 * fp - c2 * gp
    sq3 = math.sqrt(3.0)
    bi = sq3 * (c1 * f + c2 * g)
    bip = sq3 * (c1 * fp + c2 * gp)
    return ai, aip, bi, bip


def ci_plus_oscillatory(rho: complex) -> complex:
    """Leading large-rho form of Ci+(-rho) for |arg rho| < 2 pi/3."""
    rho = complex(rho)
    phase = (2.0 / 3.0) * rho ** 1.5 + math.pi / 4
    return rho ** -0.25 * cmath.exp(1j * phase) / math.sqrt(math.pi)


def ai_oscillatory(rho: complex) -> complex:
    """Leading large-rho form of Ai(-rho) for |arg rho| < 2 pi/3."""
    rho = complex(rho)
    phase = (2.0 / 3.0) * rho ** 1.5 + math.pi / 4
    return rho ** -0.25 * cmath.sin(phase) / math.sqrt(math.pi)


def _zero_seed(n: int) -> float:
    t = 3.0 * math.pi * (4 * n - 1) / 8.0
    return -t ** (2.0 / 3.0) * (1.0 + 5.0 / 48.0 * t ** -2 - 5.0 / 36.0 * t ** -4)


@lru_cache(maxsize=None)
def _zero(n: int) -> float:
    x = _zero_seed(n)
    for _ in range(50):
        ai, aip, _, _ = special.airy(x)
        step = ai / aip
        x -= step
        if abs(step) <= 4 * EPS * abs(x):
            break
    return float(x)


def airy_zeros(count: int) -> List[AiryZero]:
    """
    First `count` zeros of Ai, ordered by increasing modulus.

    Args:
        count (int): Number of zeros, >= 1.

    Returns:
        List[AiryZero]: Newton-polished zeros.
    """
    if count < 1:
        raise ValueError("count must be a positive integer")
    return [AiryZero(n=n, a_n=_zero(n)) for n in range(1, count + 1)]


def airy_zero(n: int) -> float:
    if n < 1:
        raise ValueError("zero index must be positive")
    return _zero(n)

"""Normal-incidence transfer-matrix model of Bragg mirrors and the
Fabry-Perot cavity they form around a length of waveguide."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateCavity, NoResonanceFound


@dataclass(frozen=True)
class LayerStack:
    n0: float
    layers: tuple[tuple[float, float], ...] = field(default_factory=tuple)  # (index, thickness m)
    ns: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple((float(n), float(d)) for n, d in self.layers))
        if self.n0 < 1 or self.ns < 1:
            raise ValueError("ambient and exit indices must be >= 1")
        for n, d in self.layers:
            if n < 1:
                raise ValueError(f"layer index {n} < 1")
            if not d > 0:
                raise ValueError(f"layer thickness {d} must be positive")

    def reversed(self) -> "LayerStack":
        return LayerStack(self.ns, tuple(reversed(self.layers)), self.n0)


def quarter_wave_stack(
    n_high: float, n_low: float, periods: int, wavelength: float, n0: float = 1.0, ns: float = 1.0
) -> LayerStack:
    """(HL)^N with quarter-wave layers at ``wavelength``."""
    if periods < 0:
        raise ValueError("periods must be >= 0")
    pair = ((n_high, wavelength / (4 * n_high)), (n_low, wavelength / (4 * n_low)))
    return LayerStack(n0, pair * periods, ns)


def quarter_wave_reflectance(n_high: float, n_low: float, periods: int, n0: float = 1.0, ns: float = 1.0) -> float:
    """Closed-form peak reflectance of (HL)^N between n0 and ns."""
    a = n0 * n_low ** (2 * periods)
    b = ns * n_high ** (2 * periods)
    return ((a - b) / (a + b)) ** 2


def _characteristic(stack: LayerStack, wavelength: float) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for n, d in stack.layers:
        delta = 2 * math.pi * n * d / wavelength
        c, s = math.cos(delta), math.sin(delta)
        m = m @ np.array([[c, 1j * s / n], [1j * n * s, c]])
    return m


def stack_reflectivity(stack: LayerStack, wavelength: float) -> tuple[float, float]:
    """Power reflectance and transmittance (R, T)."""
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    b, c = _characteristic(stack, wavelength) @ np.array([1.0, stack.ns])
    denom = stack.n0 * b + c
    r = (stack.n0 * b - c) / denom
    t = 4 * stack.n0 * stack.ns / abs(denom) ** 2
    return float(abs(r) ** 2), float(t)


def reflectivity_spectrum(stack: LayerStack, wavelengths: Sequence[float]) -> np.ndarray:
    """Rows of (lambda, R, T)."""
    return np.array([(lam, *stack_reflectivity(stack, lam)) for lam in wavelengths])


@dataclass(frozen=True)
class FabryPerot:
    r1: float
    r2: float
    length: float
    n_eff: float = 1.0

    def __post_init__(self):
        for r in (self.r1, self.r2):
            if not 0 <= r <= 1:
                raise ValueError("reflectivities must lie in [0, 1]")
        if not self.length > 0:
            raise ValueError("cavity length must be positive")
        if self.n_eff < 1:
            raise ValueError("effective index must be >= 1")

    def order(self, wavelength: float) -> float:
        return 2 * self.n_eff * self.length / wavelength


def finesse(r1: float, r2: float) -> float:
    if r1 >= 1 or r2 >= 1:
        raise DegenerateCavity("a mirror with R >= 1 gives an undamped cavity")
    rr = r1 * r2
    return math.pi * rr**0.25 / (1 - math.sqrt(rr))


def fp_quality(fp: FabryPerot, wavelength: float) -> tuple[float, float]:
    """(finesse, Q) with Q = q F and q = 2 n_eff l / lambda."""
    f = finesse(fp.r1, fp.r2)
    return f, fp.order(wavelength) * f


Reflectivity = Union[None, Callable[[float], Union[float, tuple[float, float]]]]


def airy_transmission(fp: FabryPerot, wavelength: float, reflectivity: Reflectivity = None) -> float:
    if reflectivity is None:
        r1, r2 = fp.r1, fp.r2
    else:
        val = reflectivity(wavelength)
        r1, r2 = (val, val) if np.isscalar(val) else val
    rr = math.sqrt(r1 * r2)
    phi = 2 * math.pi * fp.n_eff * fp.length / wavelength
    return (1 - r1) * (1 - r2) / ((1 - rr) ** 2 + 4 * rr * math.sin(phi) ** 2)


def airy_q_oracle(
    fp: FabryPerot,
    wavelength: float,
    reflectivity: Reflectivity = None,
    band: Optional[tuple[float, float]] = None,
    samples: int = 4001,
) -> float:
    """Q = lambda_res / FWHM from a scan of the Airy transmission.

    ``reflectivity`` maps wavelength to R (both mirrors) or (R1, R2); when
    omitted the constant ``fp.r1``, ``fp.r2`` are used. The default band spans
    one free spectral range centred on ``wavelength``.
    """
    opl = fp.n_eff * fp.length
    if band is None:
        q = fp.order(wavelength)
        lo = 2 * opl / (q + 0.5)
        hi = 2 * opl / max(q - 0.5, 0.25)
    else:
        lo, hi = band
    if not 0 < lo < hi:
        raise ValueError("invalid scan band")

    def t(lam):
        return airy_transmission(fp, lam, reflectivity)

    # a resonance has phi = m pi; scan near each one in the band
    m_lo, m_hi = math.ceil(2 * opl / hi), math.floor(2 * opl / lo)
    grid = np.linspace(lo, hi, samples)
    tg = np.array([t(x) for x in grid])
    if m_hi < m_lo or np.ptp(tg) <= 1e-12 * max(tg.max(), 1e-300):
        raise NoResonanceFound(f"no transmission resonance in [{lo:.6e}, {hi:.6e}] m")
    lam_guess = min((2 * opl / m for m in range(m_lo, m_hi + 1)), key=lambda x: abs(x - wavelength))
    m = round(2 * opl / lam_guess)
    fsr_lo, fsr_hi = 2 * opl / (m + 0.5), 2 * opl / (m - 0.5) if m > 1 else hi
    res = minimize_scalar(lambda x: -t(x), bracket=None, bounds=(max(lo, fsr_lo), min(hi, fsr_hi)),
                          method="bounded", options={"xatol": lam_guess * 1e-14})
    lam_res = lam_guess if t(lam_guess) >= -res.fun else float(res.x)
    t_max = t(lam_res)
    half = t_max / 2

    def crossing(a, b):
        if (t(a) - half) * (t(b) - half) > 0:
            raise NoResonanceFound("half-maximum not reached within the scan band")
        return brentq(lambda x: t(x) - half, a, b, xtol=lam_res * 1e-15, rtol=1e-15)

    left = crossing(max(lo, fsr_lo), lam_res)
    right = crossing(lam_res, min(hi, fsr_hi))
    return lam_res / (right - left)

"""Analytic symmetric-slab waveguide, used to check the 2-D solver.

For a core of index ``n_core`` and thickness ``d`` in a cladding ``n_clad``,
guided mode ``m`` satisfies::

    kappa d / 2 = m pi / 2 + atan(r gamma / kappa)

with ``kappa = k0 sqrt(n_core^2 - n^2)``, ``gamma = k0 sqrt(n^2 - n_clad^2)``
and ``r = 1`` (TE) or ``(n_core / n_clad)^2`` (TM).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from scipy.optimize import bisect

from .errors import ModeCutoff

Polarization = Literal["TE", "TM"]


@dataclass(frozen=True)
class SlabSpec:
    n_core: float
    n_clad: float
    thickness: float
    wavelength: float
    polarization: Polarization = "TE"

    def __post_init__(self):
        if self.n_clad < 1.0 or self.n_core < self.n_clad:
            raise ValueError("need n_core >= n_clad >= 1")
        if not (self.thickness > 0 and self.wavelength > 0):
            raise ValueError("thickness and wavelength must be positive")
        if self.polarization not in ("TE", "TM"):
            raise ValueError(f"unknown polarization {self.polarization!r}")

    @property
    def k0(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def v_number(self) -> float:
        return self.k0 * self.thickness * math.sqrt(self.n_core**2 - self.n_clad**2)


def dispersion_residual(spec: SlabSpec, n_eff: float, mode_index: int) -> float:
    """Left minus right side of the dispersion relation, in radians."""
    k0 = spec.k0
    kappa = k0 * math.sqrt(max(spec.n_core**2 - n_eff**2, 0.0))
    gamma = k0 * math.sqrt(max(n_eff**2 - spec.n_clad**2, 0.0))
    ratio = 1.0 if spec.polarization == "TE" else (spec.n_core / spec.n_clad) ** 2
    return kappa * spec.thickness / 2 - math.atan2(ratio * gamma, kappa) - mode_index * math.pi / 2


def slab_mode_count(spec: SlabSpec) -> int:
    if spec.n_core <= spec.n_clad:
        return 0
    return int(math.floor(spec.v_number / math.pi)) + 1


def slab_neff(spec: SlabSpec, mode_index: int = 0) -> float:
    """Effective index of guided mode ``mode_index`` by bisection.

    Raises ModeCutoff when the mode is not guided.
    """
    if mode_index < 0:
        raise ValueError("mode_index must be >= 0")
    if mode_index >= slab_mode_count(spec):
        raise ModeCutoff(
            f"{spec.polarization}{mode_index} is cut off (V = {spec.v_number if spec.n_core > spec.n_clad else 0:.4f})"
        )
    lo, hi = spec.n_clad, spec.n_core
    f_lo = dispersion_residual(spec, lo, mode_index)
    if f_lo <= 0:
        # exactly at cutoff
        raise ModeCutoff(f"{spec.polarization}{mode_index} sits at cutoff")
    return bisect(
        lambda n: dispersion_residual(spec, n, mode_index),
        lo,
        hi,
        xtol=1e-13,
        rtol=1e-15,
        maxiter=200,
    )

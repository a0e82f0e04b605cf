"""Cavity-QED figures of merit for a slot-waveguide cavity.

The cavity is a length ``l`` of waveguide whose field is the solved
cross-section times ``sin(2 pi z / lambda)``; with the default ``l = lambda/2``
the longitudinal integral contributes ``lambda / 4`` and ``r0`` sits at the
antinode. The dipole is taken parallel to ``Ex``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .constants import C0, EPS0, HBAR, N_DIAMOND
from .emitters import Emitter
from .errors import LeakyMode, ZeroField
from .geometry import SlotWaveguideSpec, locate_r0
from .modesolver import Mode, normalize_power

DEFAULT_POWER = 1e-15  # W
LEAK_THRESHOLD = 1e-3


def angular_frequency(wavelength: float) -> float:
    return 2 * math.pi * C0 / wavelength


@dataclass(frozen=True, eq=False)
class CavityAssembly:
    mode: Mode
    cavity_length: Optional[float] = None
    quality_factor: Optional[float] = None

    def __post_init__(self):
        if self.cavity_length is None:
            object.__setattr__(self, "cavity_length", self.mode.wavelength / 2)
        if not self.cavity_length > 0:
            raise ValueError("cavity length must be positive")
        if self.quality_factor is not None and not self.quality_factor > 0:
            raise ValueError("quality factor must be positive")

    @property
    def kappa(self) -> Optional[float]:
        if self.quality_factor is None:
            return None
        return cavity_decay(angular_frequency(self.mode.wavelength), self.quality_factor)


class EnergyDensity(NamedTuple):
    xi: np.ndarray
    rho: tuple[float, float]
    peak: float  # max of n^2 |E|^2 in the mode's own units


def energy_density(mode: Mode) -> EnergyDensity:
    """xi(r) = n^2|E|^2 / max(n^2|E|^2) on the cell grid, and its peak point."""
    w = mode.energy_density()
    peak = float(w.max())
    if not peak > 0:
        raise ZeroField("mode has no electric field")
    i, j = np.unravel_index(np.argmax(w), w.shape)
    rho = (float(mode.mesh.xc[i]), float(mode.mesh.yc[j]))
    return EnergyDensity(w / peak, rho, peak)


def longitudinal_factor(wavelength: float, cavity_length: float) -> float:
    """Integral of sin^2(2 pi z / lambda) over [0, l]."""
    k = 2 * math.pi / wavelength
    return cavity_length / 2 - math.sin(2 * k * cavity_length) / (4 * k)


def effective_area(mode: Mode) -> float:
    """Cross-section integral of n^2|E|^2 divided by its maximum (m^2)."""
    ed = energy_density(mode)
    return float(np.sum(ed.xi * mode.mesh.cell_areas))


def mode_volume(
    mode: Mode,
    wavelength: Optional[float] = None,
    cavity_length: Optional[float] = None,
    leak_threshold: float = LEAK_THRESHOLD,
) -> float:
    """V = int n^2|E|^2 d^3r / max(n^2|E|^2), in m^3.

    Raises LeakyMode when more than ``leak_threshold`` of the energy lies in
    the band next to the domain walls.
    """
    lam = mode.wavelength if wavelength is None else wavelength
    length = lam / 2 if cavity_length is None else cavity_length
    leak = mode.boundary_energy_fraction()
    if leak > leak_threshold:
        raise LeakyMode(f"{leak:.2e} of the mode energy sits at the domain walls")
    return longitudinal_factor(lam, length) * effective_area(mode)


def normalized_volume(volume: float, wavelength: float, n_ref: float = N_DIAMOND) -> float:
    """Volume in units of (lambda / n_ref)^3."""
    return volume / (wavelength / n_ref) ** 3


def per_photon_amplitude(wavelength: float, xi: float, n: float, volume: float) -> float:
    """|E(r)| = sqrt(hbar omega xi / (2 eps0 n^2 V)) for one photon, in V/m."""
    omega = angular_frequency(wavelength)
    return math.sqrt(HBAR * omega * xi / (2 * EPS0 * n**2 * volume))


class PerPhotonField(NamedTuple):
    magnitude: float
    x: float
    xi: float
    n: float
    volume: float


def per_photon_field(
    mode: Mode,
    wavelength: Optional[float] = None,
    at: tuple[float, float] = (0.0, 0.0),
    volume: Optional[float] = None,
) -> PerPhotonField:
    """Single-photon field amplitude and its x component at ``at``."""
    lam = mode.wavelength if wavelength is None else wavelength
    if volume is None:
        volume = mode_volume(mode, lam)
    e = mode.e_vector_at(*at)  # raises PointOutsideDomain
    e_abs = float(np.linalg.norm(e))
    n = mode.eps_map.index_at(*at)
    peak = energy_density(mode).peak
    xi = n**2 * e_abs**2 / peak
    magnitude = per_photon_amplitude(lam, xi, n, volume)
    x = magnitude * abs(e[0]) / e_abs if e_abs > 0 else 0.0
    return PerPhotonField(magnitude, float(x), float(xi), n, volume)


def per_photon_mode(mode: Mode, wavelength: Optional[float] = None) -> Mode:
    """Mode rescaled so its fields are those of a single photon."""
    lam = mode.wavelength if wavelength is None else wavelength
    volume = mode_volume(mode, lam)
    peak = energy_density(mode).peak
    scale = math.sqrt(HBAR * angular_frequency(lam) / (2 * EPS0 * volume * peak))
    return mode.scaled(scale, normalization="per_photon")


def dipole_moment(emitter: Emitter, channel: str = "zpl") -> float:
    """|mu| = sqrt(3 pi hbar eps0 c^3 gamma / (n omega^3)) in C m.

    ``channel="total"`` uses gamma = 1/tau, ``"zpl"`` uses branching/tau.
    ``n`` is the emitter's host index: a dipole embedded in a medium decays
    ``n`` times faster than in vacuum, so a measured lifetime implies a
    smaller moment. ``n = 1`` gives the vacuum relation.
    """
    if channel == "total":
        gamma = emitter.total_rate
    elif channel == "zpl":
        gamma = emitter.zpl_rate
    else:
        raise ValueError(f"unknown channel {channel!r}")
    omega = emitter.omega
    return math.sqrt(3 * math.pi * HBAR * EPS0 * C0**3 * gamma / (emitter.host_index * omega**3))


def rabi_frequency(mu: float, field: float) -> float:
    """g = mu E / hbar in rad/s, dipole aligned with the field."""
    return mu * field / HBAR


def cavity_decay(omega: float, quality_factor: float) -> float:
    if not quality_factor > 0:
        raise ValueError("quality factor must be positive")
    return omega / (2 * quality_factor)


def cooperativity(g: float, gamma: float, kappa: float) -> float:
    if not (gamma > 0 and kappa > 0):
        raise ValueError("decay rates must be positive")
    return g**2 / (gamma * kappa)


def purcell_factor(wavelength: float, n_ref: float, quality_factor: float, volume: float) -> float:
    if not volume > 0:
        raise ValueError("volume must be positive")
    return 3 * (wavelength / n_ref) ** 3 * quality_factor / (4 * math.pi**2 * volume)


def quantum_efficiency(g: float, kappa: float, gamma: float) -> float:
    """[g^2 / (g^2 + kappa Gamma)] [kappa / (kappa + Gamma)]."""
    if min(g, kappa, gamma) < 0:
        raise ValueError("rates must be non-negative")
    if g == 0:
        return 0.0
    if kappa + gamma == 0:
        raise ValueError("kappa and Gamma cannot both vanish")
    return g**2 / (g**2 + kappa * gamma) * kappa / (kappa + gamma)


@dataclass(frozen=True)
class QedReport:
    n_eff: float
    V: float
    V_normalized: float
    xi_r0: float
    E_photon_r0: float  # x component of the per-photon field, V/m
    E_photon_abs_r0: float
    g_r0: float
    mu_zpl: float
    gamma_total: float
    power: float
    Ex_r0_at_power: float  # |Ex(r0)| with the mode carrying `power` watts
    rho: tuple[float, float]
    r0: tuple[float, float]
    Q: Optional[float] = None
    kappa: Optional[float] = None
    C: Optional[float] = None
    purcell: Optional[float] = None
    efficiency: Optional[float] = None
    strong_coupling: Optional[bool] = None

    def to_dict(self) -> dict:
        """Plain dict; Q-dependent entries are dropped when Q is absent."""
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}


def build_report(
    mode: Mode,
    spec: SlotWaveguideSpec,
    emitter: Emitter,
    quality_factor: Optional[float] = None,
    cavity_length: Optional[float] = None,
    power: float = DEFAULT_POWER,
) -> QedReport:
    lam = spec.wavelength
    r0 = locate_r0(spec)
    volume = mode_volume(mode, lam, cavity_length)
    field = per_photon_field(mode, lam, r0, volume)
    mu = dipole_moment(emitter, "zpl")
    g = rabi_frequency(mu, field.x)
    gamma = emitter.total_rate
    ex_p = abs(normalize_power(mode, power).field_at(*r0, "Ex"))
    extra = {}
    if quality_factor is not None:
        kappa = cavity_decay(angular_frequency(lam), quality_factor)
        extra = dict(
            Q=float(quality_factor),
            kappa=kappa,
            C=cooperativity(g, gamma, kappa),
            purcell=purcell_factor(lam, N_DIAMOND, quality_factor, volume),
            efficiency=quantum_efficiency(g, kappa, gamma),
            strong_coupling=bool(kappa < 2 * g),
        )
    return QedReport(
        n_eff=mode.n_eff,
        V=volume,
        V_normalized=normalized_volume(volume, lam),
        xi_r0=field.xi,
        E_photon_r0=field.x,
        E_photon_abs_r0=field.magnitude,
        g_r0=g,
        mu_zpl=mu,
        gamma_total=gamma,
        power=power,
        Ex_r0_at_power=ex_p,
        rho=energy_density(mode).rho,
        r0=r0,
        **extra,
    )

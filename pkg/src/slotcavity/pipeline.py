"""Geometry -> mesh -> fundamental mode, the path shared by the CLI and sweeps."""

from __future__ import annotations

from typing import Mapping, Optional

from .errors import NoGuidedMode
from .geometry import PermittivityMap, SlotWaveguideSpec, build_mesh, rasterize
from .modesolver import Mode, SolveSettings, count_guided, fundamental_quasi_te, solve_modes


def permittivity(spec: SlotWaveguideSpec, mesh_options: Optional[Mapping] = None) -> PermittivityMap:
    return rasterize(spec, build_mesh(spec, **dict(mesh_options or {})))


def fundamental_mode(
    spec: SlotWaveguideSpec,
    mesh_options: Optional[Mapping] = None,
    settings: Optional[SolveSettings] = None,
    full_domain: bool = False,
) -> Mode:
    """Fundamental quasi-TE mode.

    By default only the Ex-even half of the problem is solved, which is
    where the fundamental quasi-TE mode of a mirror-symmetric guide lives.
    """
    eps_map = permittivity(spec, mesh_options)
    if full_domain:
        settings = settings or SolveSettings(n_modes_requested=4)
        return fundamental_quasi_te(solve_modes(eps_map, spec.wavelength, settings))
    settings = settings or SolveSettings(n_modes_requested=1)
    return fundamental_quasi_te(solve_modes(eps_map, spec.wavelength, settings, symmetry="even"))


def quasi_te_count(
    spec: SlotWaveguideSpec,
    mesh_options: Optional[Mapping] = None,
    n_even: int = 2,
    n_odd: int = 3,
) -> int:
    """Number of guided Ex-dominant modes over both mirror parities."""
    eps_map = permittivity(spec, mesh_options)
    total = 0
    for sym, k in (("even", n_even), ("odd", n_odd)):
        try:
            modes = solve_modes(eps_map, spec.wavelength, SolveSettings(n_modes_requested=k), symmetry=sym)
        except NoGuidedMode:
            continue
        total += count_guided(modes, eps_map.n_clad, family="quasi_te")
    return total

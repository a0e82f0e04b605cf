"""Slot-waveguide cavity modes and cavity-QED figures of merit."""

__version__ = "0.1.0"

from .dbr import FabryPerot, LayerStack, airy_q_oracle, fp_quality, stack_reflectivity
from .emitters import Emitter, get_emitter, load_catalog
from . import errors
from .geometry import (
    AIR,
    DIAMOND,
    GAP,
    MATERIALS,
    SILICA,
    Material,
    MeshSpec,
    PermittivityMap,
    SlotWaveguideSpec,
    build_mesh,
    locate_r0,
    rasterize,
)
from .modesolver import Mode, SolveSettings, count_guided, fundamental_quasi_te, normalize_power, solve_modes
from .pipeline import fundamental_mode, quasi_te_count
from .qed import (
    QedReport,
    build_report,
    cavity_decay,
    cooperativity,
    dipole_moment,
    energy_density,
    mode_volume,
    per_photon_amplitude,
    per_photon_field,
    purcell_factor,
    quantum_efficiency,
    rabi_frequency,
)
from .slab import SlabSpec, slab_mode_count, slab_neff
from .sweep import SweepResult, SweepSpec, robustness_check, sweep_rod, sweep_slot

__all__ = [
    "errors",
    "AIR",
    "DIAMOND",
    "Emitter",
    "FabryPerot",
    "GAP",
    "LayerStack",
    "MATERIALS",
    "Material",
    "MeshSpec",
    "Mode",
    "PermittivityMap",
    "QedReport",
    "SILICA",
    "SlabSpec",
    "SlotWaveguideSpec",
    "SolveSettings",
    "SweepResult",
    "SweepSpec",
    "airy_q_oracle",
    "build_mesh",
    "build_report",
    "cavity_decay",
    "cooperativity",
    "count_guided",
    "dipole_moment",
    "energy_density",
    "fp_quality",
    "fundamental_mode",
    "fundamental_quasi_te",
    "get_emitter",
    "load_catalog",
    "locate_r0",
    "mode_volume",
    "normalize_power",
    "per_photon_amplitude",
    "per_photon_field",
    "purcell_factor",
    "quantum_efficiency",
    "quasi_te_count",
    "rabi_frequency",
    "rasterize",
    "robustness_check",
    "slab_mode_count",
    "slab_neff",
    "solve_modes",
    "stack_reflectivity",
    "sweep_rod",
    "sweep_slot",
]

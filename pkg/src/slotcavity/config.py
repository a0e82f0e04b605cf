"""TOML run configuration.

Every length key carries its unit in the name (``_nm``); unknown sections
or keys are rejected so a typo never silently falls back to a default.

Example::

    [geometry]
    rod_material = "diamond"
    slot_material = "air"
    slot_width_nm = 20
    rod_width_nm = 140
    rod_height_nm = 110
    wavelength_nm = 637

    [emitter]
    name = "NV"

    [report]
    q_values = [1e3, 1e4]
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from .emitters import Emitter, get_emitter, load_catalog
from .errors import ConfigError
from .geometry import MATERIALS, Material, SlotWaveguideSpec
from .modesolver import SolveSettings

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

NM = 1e-9

_SCHEMA: dict[str, dict[str, tuple]] = {
    # key: (accepted types, required)
    "geometry": {
        "rod_material": ((str,), True),
        "slot_material": ((str,), True),
        "slot_width_nm": ((int, float), True),
        "rod_width_nm": ((int, float), True),
        "rod_height_nm": ((int, float), True),
        "wavelength_nm": ((int, float), False),
        "bridge_height_nm": ((int, float), False),
        "bridge_material": ((str,), False),
        "center_nm": ((list,), False),
    },
    "materials": {},  # free-form: name -> {index, window_nm}
    "mesh": {
        "domain_width_nm": ((int, float), False),
        "domain_height_nm": ((int, float), False),
        "coarse_nm": ((int, float), False),
        "rod_cell_nm": ((int, float), False),
        "slot_cell_nm": ((int, float), False),
        "slot_margin_nm": ((int, float), False),
        "growth": ((int, float), False),
    },
    "solver": {
        "n_modes": ((int,), False),
        "full_domain": ((bool,), False),
        "tolerance": ((int, float), False),
        "max_iterations": ((int,), False),
        "seed": ((int,), False),
    },
    "emitter": {
        "name": ((str,), False),
        "catalog": ((str,), False),
        "lifetime_ns": ((int, float), False),
        "branching_ratio": ((int, float), False),
    },
    "report": {
        "q_values": ((list,), False),
        "power_w": ((int, float), False),
        "cavity_length_nm": ((int, float), False),
    },
    "sweep": {
        "kind": ((str,), False),
        "rod_width_nm": ((list, dict), False),
        "rod_height_nm": ((list, dict), False),
        "slot_width_nm": ((list, dict), False),
        "objective": ((str,), False),
        "single_mode": ((bool,), False),
        "refine": ((bool,), False),
        "robustness_fraction": ((int, float), False),
        "label": ((str,), False),
    },
    "dbr": {
        "n0": ((int, float), False),
        "ns": ((int, float), False),
        "n_high": ((int, float), False),
        "n_low": ((int, float), False),
        "periods": ((int,), False),
        "design_wavelength_nm": ((int, float), False),
        "layers": ((list,), False),
        "scan_nm": ((dict,), False),
        "cavity_length_nm": ((int, float), False),
        "n_eff": ((int, float), False),
    },
    "output": {
        "dir": ((str,), False),
        "formats": ((list,), False),
    },
}

_MESH_KEYS = {
    "coarse_nm": "coarse",
    "rod_cell_nm": "rod_cell",
    "slot_cell_nm": "slot_cell",
    "slot_margin_nm": "slot_margin",
}


@dataclass
class RunConfig:
    raw: dict
    path: Optional[Path] = None
    geometry: Optional[SlotWaveguideSpec] = None
    mesh_options: dict = field(default_factory=dict)
    solver: SolveSettings = field(default_factory=SolveSettings)
    full_domain: bool = False
    emitter_name: str = "NV"
    emitter_overrides: dict = field(default_factory=dict)
    catalog_path: Optional[Path] = None
    q_values: list = field(default_factory=list)
    power: float = 1e-15
    cavity_length: Optional[float] = None
    out_dir: Optional[Path] = None
    formats: tuple = ("csv", "json")

    def section(self, name: str) -> dict:
        return dict(self.raw.get(name, {}))

    def require_geometry(self) -> SlotWaveguideSpec:
        if self.geometry is None:
            raise ConfigError("config has no [geometry] section")
        return self.geometry

    def emitter(self) -> Emitter:
        """Selected emitter with any per-run overrides applied."""
        catalog = load_catalog(self.catalog_path)
        em = get_emitter(self.emitter_name, catalog)
        lt = self.emitter_overrides.get("lifetime_ns")
        br = self.emitter_overrides.get("branching_ratio")
        try:
            return em.with_parameters(None if lt is None else lt * NM, br)
        except ValueError as exc:
            raise ConfigError(f"[emitter]: {exc}") from exc


def _check_section(name: str, table: Any):
    if name not in _SCHEMA:
        raise ConfigError(f"unknown section [{name}]")
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] must be a table")
    if name == "materials":
        return
    schema = _SCHEMA[name]
    for key, value in table.items():
        if key not in schema:
            raise ConfigError(f"[{name}] unknown key {key!r}")
        types, _ = schema[key]
        if isinstance(value, bool) and bool not in types:
            raise ConfigError(f"[{name}] {key} has the wrong type")
        if not isinstance(value, types):
            raise ConfigError(f"[{name}] {key} must be {' or '.join(t.__name__ for t in types)}")
    for key, (_, required) in schema.items():
        if required and key not in table:
            raise ConfigError(f"[{name}] missing required key {key!r}")


def _materials(raw: Mapping) -> dict[str, Material]:
    mats = dict(MATERIALS)
    for name, table in raw.get("materials", {}).items():
        if not isinstance(table, dict) or set(table) - {"index", "window_nm"} or "index" not in table:
            raise ConfigError(f"[materials.{name}] needs 'index' and optionally 'window_nm'")
        window = table.get("window_nm")
        try:
            mats[name.lower()] = Material(
                name,
                float(table["index"]),
                None if window is None else (window[0] * NM, window[1] * NM),
            )
        except (ValueError, TypeError, IndexError) as exc:
            raise ConfigError(f"[materials.{name}]: {exc}") from exc
    return mats


def _material(mats: Mapping[str, Material], name: str) -> Material:
    try:
        return mats[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown material {name!r}; known: {sorted(mats)}") from None


def grid_values(spec: Union[list, dict], key: str) -> tuple[float, ...]:
    """A list of nm values or a {start, stop, step} table, returned in metres."""
    if isinstance(spec, dict):
        if set(spec) != {"start", "stop", "step"}:
            raise ConfigError(f"{key} range needs exactly start, stop, step")
        start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
        if not step > 0 or stop < start:
            raise ConfigError(f"{key} range is empty or has a non-positive step")
        n = int(round((stop - start) / step))
        return tuple((start + i * step) * NM for i in range(n + 1))
    try:
        return tuple(float(v) * NM for v in spec)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a list of numbers") from None


def parse_config(raw: Mapping, path: Optional[Path] = None) -> RunConfig:
    raw = dict(raw)
    for name, table in raw.items():
        _check_section(name, table)
    cfg = RunConfig(raw=raw, path=path)
    mats = _materials(raw)

    g = raw.get("geometry")
    if g is not None:
        try:
            kwargs = dict(
                slot_width=g["slot_width_nm"] * NM,
                rod_width=g["rod_width_nm"] * NM,
                rod_height=g["rod_height_nm"] * NM,
                rod_material=_material(mats, g["rod_material"]),
                slot_material=_material(mats, g["slot_material"]),
                wavelength=g.get("wavelength_nm", 637.0) * NM,
            )
            if "bridge_height_nm" in g:
                kwargs["bridge_height"] = g["bridge_height_nm"] * NM
            if "bridge_material" in g:
                kwargs["bridge_material"] = _material(mats, g["bridge_material"])
            if "center_nm" in g:
                cx, cy = g["center_nm"]
                kwargs["center"] = (cx * NM, cy * NM)
            cfg.geometry = SlotWaveguideSpec(**kwargs)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[geometry]: {exc}") from exc

    m = raw.get("mesh", {})
    opts = {}
    if "domain_width_nm" in m or "domain_height_nm" in m:
        opts["domain"] = (m.get("domain_width_nm", 2360.0) * NM, m.get("domain_height_nm", 2000.0) * NM)
    for key, arg in _MESH_KEYS.items():
        if key in m:
            opts[arg] = m[key] * NM
    if "growth" in m:
        opts["growth"] = float(m["growth"])
    for k, v in opts.items():
        vals = v if isinstance(v, tuple) else (v,)
        if any(not x > 0 for x in vals) or (k == "growth" and v < 1):
            raise ConfigError(f"[mesh] {k} out of range")
    cfg.mesh_options = opts

    s = raw.get("solver", {})
    try:
        cfg.solver = SolveSettings(
            n_modes_requested=s.get("n_modes", 4),
            convergence_tol=s.get("tolerance", 1e-10),
            max_iterations=s.get("max_iterations", 5000),
            seed=s.get("seed", 0),
        )
    except ValueError as exc:
        raise ConfigError(f"[solver]: {exc}") from exc
    cfg.full_domain = s.get("full_domain", False)

    e = raw.get("emitter", {})
    cfg.emitter_name = e.get("name", "NV")
    cfg.emitter_overrides = {k: e[k] for k in ("lifetime_ns", "branching_ratio") if k in e}
    if "catalog" in e:
        p = Path(e["catalog"])
        cfg.catalog_path = p if p.is_absolute() or path is None else path.parent / p

    r = raw.get("report", {})
    qs = r.get("q_values", [])
    if not all(isinstance(q, (int, float)) and not isinstance(q, bool) and q > 0 for q in qs):
        raise ConfigError("[report] q_values must be positive numbers")
    cfg.q_values = [float(q) for q in qs]
    cfg.power = float(r.get("power_w", 1e-15))
    if not cfg.power > 0:
        raise ConfigError("[report] power_w must be positive")
    if "cavity_length_nm" in r:
        if not r["cavity_length_nm"] > 0:
            raise ConfigError("[report] cavity_length_nm must be positive")
        cfg.cavity_length = r["cavity_length_nm"] * NM

    o = raw.get("output", {})
    if "dir" in o:
        cfg.out_dir = Path(o["dir"])
    if "formats" in o:
        bad = set(o["formats"]) - {"csv", "json"}
        if bad:
            raise ConfigError(f"[output] unknown formats {sorted(bad)}")
        cfg.formats = tuple(o["formats"])
    return cfg


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(raw, path)

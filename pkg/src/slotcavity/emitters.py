"""Optical emitters and the built-in colour-centre catalogue.

Catalogue files are TOML tables keyed by emitter name::

    [NV]
    wavelength_nm = 637.0
    lifetime_ns = 11.6
    branching_ratio = 0.03
    host_index = 2.4

``host_index`` is the refractive index of the medium hosting the emitter
(default 1); the dipole moment inferred from a measured lifetime scales as
``1/sqrt(host_index)``. ``lifetime_ns`` and ``branching_ratio`` may be omitted; any rate that needs
them then raises ParameterRequired instead of guessing.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Union

from .constants import C0
from .errors import ConfigError, ParameterRequired, UnknownEmitter

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_KEYS = {"wavelength_nm", "lifetime_ns", "branching_ratio", "host_index"}


@dataclass(frozen=True)
class Emitter:
    name: str
    transition_wavelength: float  # m
    excited_lifetime: Optional[float] = None  # s
    branching_ratio: Optional[float] = None
    host_index: float = 1.0

    def __post_init__(self):
        if not self.transition_wavelength > 0:
            raise ValueError("transition wavelength must be positive")
        if self.excited_lifetime is not None and not self.excited_lifetime > 0:
            raise ValueError("lifetime must be positive")
        if self.branching_ratio is not None and not 0 < self.branching_ratio <= 1:
            raise ValueError("branching ratio must lie in (0, 1]")
        if not self.host_index >= 1:
            raise ValueError("host index must be >= 1")

    @property
    def omega(self) -> float:
        return 2 * math.pi * C0 / self.transition_wavelength

    @property
    def lifetime(self) -> float:
        if self.excited_lifetime is None:
            raise ParameterRequired(f"{self.name}: excited-state lifetime is not set")
        return self.excited_lifetime

    @property
    def branching(self) -> float:
        if self.branching_ratio is None:
            raise ParameterRequired(f"{self.name}: branching ratio is not set")
        return self.branching_ratio

    @property
    def total_rate(self) -> float:
        """Gamma = 1/tau (1/s)."""
        return 1.0 / self.lifetime

    @property
    def zpl_rate(self) -> float:
        """gamma = eta/tau (1/s)."""
        return self.branching / self.lifetime

    def require_parameters(self) -> None:
        """Raise ParameterRequired unless lifetime and branching ratio are set."""
        self.lifetime, self.branching

    @property
    def is_complete(self) -> bool:
        return self.excited_lifetime is not None and self.branching_ratio is not None

    def with_parameters(self, lifetime: Optional[float] = None, branching_ratio: Optional[float] = None) -> "Emitter":
        return Emitter(
            self.name,
            self.transition_wavelength,
            self.excited_lifetime if lifetime is None else lifetime,
            self.branching_ratio if branching_ratio is None else branching_ratio,
            self.host_index,
        )


def emitter_from_table(name: str, table: Mapping) -> Emitter:
    unknown = set(table) - _KEYS
    if unknown:
        raise ConfigError(f"emitter {name!r}: unknown keys {sorted(unknown)}")
    if "wavelength_nm" not in table:
        raise ConfigError(f"emitter {name!r}: wavelength_nm is required")
    try:
        lt = table.get("lifetime_ns")
        return Emitter(
            name,
            float(table["wavelength_nm"]) * 1e-9,
            None if lt is None else float(lt) * 1e-9,
            None if table.get("branching_ratio") is None else float(table["branching_ratio"]),
            float(table.get("host_index", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"emitter {name!r}: {exc}") from exc


EmitterCatalog = dict  # name -> Emitter


def _parse(tables: Mapping) -> dict[str, Emitter]:
    out = {}
    for name, table in tables.items():
        if not isinstance(table, Mapping):
            raise ConfigError(f"emitter {name!r} must be a table")
        out[name] = emitter_from_table(name, table)
    return out


def builtin_catalog() -> dict[str, Emitter]:
    text = resources.files("slotcavity").joinpath("data/emitters.toml").read_text()
    return _parse(tomllib.loads(text))


def load_catalog(
    path: Union[str, Path, None] = None,
    overrides: Optional[Mapping] = None,
) -> dict[str, Emitter]:
    """Built-in catalogue, updated by entries from ``path`` and ``overrides``.

    Later sources replace whole entries of the same name.
    """
    cat = builtin_catalog()
    if path is not None:
        try:
            with open(path, "rb") as fh:
                cat.update(_parse(tomllib.load(fh)))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if overrides:
        cat.update(_parse(overrides))
    return cat


def get_emitter(name: str, catalog: Optional[Mapping[str, Emitter]] = None) -> Emitter:
    cat = builtin_catalog() if catalog is None else catalog
    if name in cat:
        return cat[name]
    folded = {k.lower(): v for k, v in cat.items()}
    try:
        return folded[name.lower()]
    except KeyError:
        raise UnknownEmitter(f"no emitter named {name!r}; known: {sorted(cat)}") from None

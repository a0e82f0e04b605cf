"""Grid search over rod and slot dimensions.

Every cell is an independent solve of the fundamental quasi-TE mode
followed by a QED report. Cells can run on a worker pool, and each finished
cell is appended to a JSON-lines journal so an interrupted sweep resumes
where it stopped. Results are always aggregated in key order, so the
worker count and completion order never change the output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .emitters import Emitter, get_emitter
from .errors import AllCellsFailed, ConfigError, SlotCavityError
from .geometry import SlotWaveguideSpec
from .pipeline import fundamental_mode, quasi_te_count
from .qed import build_report

log = logging.getLogger(__name__)

OBJECTIVES = {
    "Ex_at_r0": "Ex_r0_at_power",
    "per_photon_Ex": "E_photon_r0",
    "rabi": "g_r0",
}

NM = 1e-9
Key = tuple[float, float, float]  # (w_S, w_R, h) in nm


def _nm(x: float) -> float:
    return round(x / NM, 6)


def _increasing(name: str, values: Sequence[float]) -> tuple[float, ...]:
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError(f"{name} must not be empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly increasing")
    return values


def nm_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive grid in metres from bounds given in nm."""
    n = int(round((stop - start) / step))
    return tuple((start + i * step) * NM for i in range(n + 1))


@dataclass(frozen=True)
class SweepSpec:
    base: SlotWaveguideSpec
    rod_widths: tuple[float, ...]
    rod_heights: tuple[float, ...]
    slot_widths: tuple[float, ...] = ()
    objective: str = "Ex_at_r0"
    power: float = 1e-15
    single_mode_constraint: bool = False
    refine: bool = False
    emitter: Optional[Emitter] = None
    mesh_options: Mapping = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rod_widths", _increasing("rod_widths", self.rod_widths))
        object.__setattr__(self, "rod_heights", _increasing("rod_heights", self.rod_heights))
        slots = self.slot_widths or (self.base.slot_width,)
        object.__setattr__(self, "slot_widths", _increasing("slot_widths", slots))
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {sorted(OBJECTIVES)}")
        if not self.power > 0:
            raise ValueError("power must be positive")
        if self.emitter is None:
            object.__setattr__(self, "emitter", get_emitter("NV"))
        object.__setattr__(self, "mesh_options", dict(self.mesh_options))

    def keys(self) -> list[Key]:
        return [
            (_nm(s), _nm(w), _nm(h))
            for s in self.slot_widths
            for w in self.rod_widths
            for h in self.rod_heights
        ]

    def design(self, key: Key) -> SlotWaveguideSpec:
        s, w, h = key
        return self.base.replace(slot_width=s * NM, rod_width=w * NM, rod_height=h * NM)

    def fingerprint(self) -> str:
        """Hash of everything that affects a cell's numbers."""
        b = self.base
        payload = {
            "rod": [b.rod_material.name, b.rod_material.refractive_index],
            "slot": [b.slot_material.name, b.slot_material.refractive_index],
            "bridge": None if b.bridge_height is None else [b.bridge_height, b.bridge_material.refractive_index],
            "wavelength": b.wavelength,
            "center": list(b.center),
            "power": self.power,
            "emitter": asdict(self.emitter),
            "mesh": {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(self.mesh_options.items())},
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class CellResult:
    key: Key
    ok: bool
    error: Optional[str] = None
    report: Optional[dict] = None
    mode_count: Optional[int] = None

    def value(self, objective: str) -> Optional[float]:
        if not self.ok:
            return None
        return self.report[OBJECTIVES[objective]]

    def to_json(self) -> dict:
        return {"key": list(self.key), "ok": self.ok, "error": self.error, "report": self.report, "mode_count": self.mode_count}

    @classmethod
    def from_json(cls, d: Mapping) -> "CellResult":
        return cls(tuple(d["key"]), d["ok"], d.get("error"), d.get("report"), d.get("mode_count"))


def evaluate_cell(spec: SweepSpec, key: Key) -> CellResult:
    """Solve one grid cell; solver failures become an error marker."""
    design = spec.design(key)
    try:
        mode = fundamental_mode(design, spec.mesh_options)
        report = build_report(mode, design, spec.emitter, power=spec.power)
    except (SlotCavityError, ValueError) as exc:
        return CellResult(key, False, f"{type(exc).__name__}: {exc}")
    return CellResult(key, True, report=report.to_dict())


def count_cell(spec: SweepSpec, key: Key) -> int:
    return quasi_te_count(spec.design(key), spec.mesh_options)


class Journal:
    """Append-only JSON-lines record of finished cells."""

    def __init__(self, path: Union[str, Path], fingerprint: str):
        self.path = Path(path)
        self.fingerprint = fingerprint

    def load(self) -> tuple[dict[Key, CellResult], dict[Key, int]]:
        cells: dict[Key, CellResult] = {}
        counts: dict[Key, int] = {}
        if not self.path.exists():
            return cells, counts
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    # a torn final line from an interrupted write
                    log.warning("journal %s: skipping unreadable line %d", self.path, lineno)
                    continue
                if rec.get("kind") == "header":
                    if rec["fingerprint"] != self.fingerprint:
                        raise ConfigError(f"journal {self.path} belongs to a different sweep")
                elif rec.get("kind") == "cell":
                    c = CellResult.from_json(rec)
                    cells[c.key] = c
                elif rec.get("kind") == "count":
                    counts[tuple(rec["key"])] = rec["mode_count"]
        return cells, counts

    def start(self, resume: bool):
        if not resume or not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w") as fh:
                fh.write(json.dumps({"kind": "header", "fingerprint": self.fingerprint}) + "\n")

    def append(self, rec: dict):
        with open(self.path, "a") as fh:
            fh.write(json.dumps(rec) + "\n")
            fh.flush()


@dataclass
class SweepResult:
    spec: SweepSpec
    cells: dict[Key, CellResult]
    mode_counts: dict[Key, int]
    argmax: Optional[Key]
    unconstrained_argmax: Optional[Key] = None

    def value(self, key: Key) -> Optional[float]:
        return self.cells[key].value(self.spec.objective)

    def grid(self, slot_width_nm: Optional[float] = None) -> np.ndarray:
        """Objective over (w_R, h) at one slot width; NaN marks failed cells."""
        s = _nm(self.spec.slot_widths[0]) if slot_width_nm is None else slot_width_nm
        ws = sorted({k[1] for k in self.cells if k[0] == s})
        hs = sorted({k[2] for k in self.cells if k[0] == s})
        out = np.full((len(ws), len(hs)), np.nan)
        for i, w in enumerate(ws):
            for j, h in enumerate(hs):
                c = self.cells.get((s, w, h))
                if c is not None and c.ok:
                    out[i, j] = c.value(self.spec.objective)
        return out

    def successful(self) -> list[Key]:
        return sorted(k for k, c in self.cells.items() if c.ok)

    def rows(self) -> list[dict]:
        out = []
        for key in sorted(self.cells):
            c = self.cells[key]
            r = c.report or {}
            out.append(
                {
                    "design": self.spec.label,
                    "w_S_nm": key[0],
                    "w_R_nm": key[1],
                    "h_nm": key[2],
                    "n_eff": r.get("n_eff"),
                    "mode_count": self.mode_counts.get(key),
                    "Ex_r0_V_per_m": r.get("Ex_r0_at_power"),
                    "V_norm": r.get("V_normalized"),
                    "E_photon_x_V_per_m": r.get("E_photon_r0"),
                    "g_rad_per_s": r.get("g_r0"),
                    "error": c.error,
                }
            )
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["design"], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else (repr(v) if isinstance(v, float) else v)) for k, v in row.items()})
        return buf.getvalue()

    def summary(self, robustness_fraction: float = 0.5) -> dict:
        out = {
            "design": self.spec.label,
            "objective": self.spec.objective,
            "single_mode_constraint": self.spec.single_mode_constraint,
            "cells": len(self.cells),
            "failed": sum(1 for c in self.cells.values() if not c.ok),
            "argmax": None if self.argmax is None else list(self.argmax),
        }
        if self.spec.single_mode_constraint and self.unconstrained_argmax is not None:
            out["unconstrained_argmax"] = list(self.unconstrained_argmax)
            out["unconstrained_max_value"] = self.value(self.unconstrained_argmax)
        if self.argmax is not None:
            out["max_value"] = self.value(self.argmax)
            region = robustness_check(self, robustness_fraction, slot_width_nm=self.argmax[0])
            out["robustness"] = {"fraction": robustness_fraction, "cells": [list(k) for k in region]}
        return out


def _area(key: Key) -> float:
    return key[1] * key[2]


def _ranking(cells: Mapping[Key, CellResult], objective: str) -> list[Key]:
    """Successful keys, best first; equal values go to the smaller rod area."""
    good = [k for k, c in cells.items() if c.ok]
    return sorted(good, key=lambda k: (-cells[k].value(objective), _area(k), k))


def _executor(workers: int, threads: bool) -> Optional[Executor]:
    if workers <= 1:
        return None
    return ThreadPoolExecutor(workers) if threads else ProcessPoolExecutor(workers)


def _run(fn, spec: SweepSpec, keys: Sequence[Key], pool: Optional[Executor]):
    if pool is None:
        for k in keys:
            yield k, fn(spec, k)
        return
    futures = {k: pool.submit(fn, spec, k) for k in keys}
    for k in keys:
        yield k, futures[k].result()


def default_workers() -> int:
    env = os.environ.get("SLOTCAVITY_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"SLOTCAVITY_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("SLOTCAVITY_THREADS must be >= 1")
        return n
    return 1


def _refined_keys(spec: SweepSpec, best: Key) -> list[Key]:
    s, w, h = best
    dw = _step(spec.rod_widths)
    dh = _step(spec.rod_heights)
    keys = []
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            ww, hh = round(w + i * dw / 2, 6), round(h + j * dh / 2, 6)
            if ww > 0 and hh > 0:
                keys.append((s, ww, hh))
    return keys


def _step(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return _nm(min(b - a for a, b in zip(values, values[1:])))


def sweep_rod(
    spec: SweepSpec,
    workers: Optional[int] = None,
    threads: bool = False,
    journal: Union[str, Path, None] = None,
    resume: bool = False,
) -> SweepResult:
    """Exhaustive (w_S, w_R, h) grid search for the best objective.

    With ``refine`` set, a second pass at half the grid step is run around
    the first-pass winner. With ``single_mode_constraint`` set, the argmax
    is the best cell that guides exactly one quasi-TE mode; mode counts are
    evaluated from the best cell downwards until the first single-moded one
    is found, so cells below it carry no count.

    Raises AllCellsFailed when no cell yields a guided quasi-TE mode.
    """
    workers = default_workers() if workers is None else workers
    jr = Journal(journal, spec.fingerprint()) if journal is not None else None
    cells: dict[Key, CellResult] = {}
    counts: dict[Key, int] = {}
    if jr is not None:
        if resume:
            cells, counts = jr.load()
        jr.start(resume)

    pool = _executor(workers, threads)
    try:

        def solve(keys):
            todo = [k for k in keys if k not in cells]
            for k, c in _run(evaluate_cell, spec, todo, pool):
                cells[k] = c
                if jr is not None:
                    jr.append({"kind": "cell", **c.to_json()})
                log.info("cell %s %s", k, "ok" if c.ok else c.error)

        grid = spec.keys()
        solve(grid)
        if spec.refine:
            ranked = _ranking(cells, spec.objective)
            if ranked:
                solve(_refined_keys(spec, ranked[0]))

        argmax = None
        ranked = _ranking(cells, spec.objective)
        for key in ranked:
            if not spec.single_mode_constraint:
                argmax = key
                break
            if key not in counts:
                counts[key] = count_cell(spec, key)
                if jr is not None:
                    jr.append({"kind": "count", "key": list(key), "mode_count": counts[key]})
            if counts[key] == 1:
                argmax = key
                break
    finally:
        if pool is not None:
            pool.shutdown()

    if argmax is None and not any(c.ok for c in cells.values()):
        raise AllCellsFailed(f"none of {len(cells)} cells produced a guided quasi-TE mode")
    if argmax is None:
        raise AllCellsFailed("no solved cell is single-moded")
    ordered = {k: cells[k] for k in sorted(cells)}
    return SweepResult(spec, ordered, {k: counts[k] for k in sorted(counts)}, argmax, ranked[0])


def sweep_slot(
    designs: Iterable[SlotWaveguideSpec],
    slot_widths: Sequence[float],
    labels: Optional[Sequence[str]] = None,
    emitter: Optional[Emitter] = None,
    power: float = 1e-15,
    mesh_options: Optional[Mapping] = None,
    workers: Optional[int] = None,
    threads: bool = False,
) -> list[SweepResult]:
    """For each design (rods fixed), evaluate every slot width.

    Failed cells are kept with their error marker; argmax is left unset
    when every cell of a design fails.
    """
    workers = default_workers() if workers is None else workers
    designs = list(designs)
    labels = list(labels) if labels is not None else [f"design{i}" for i in range(len(designs))]
    out = []
    pool = _executor(workers, threads)
    try:
        for design, label in zip(designs, labels):
            spec = SweepSpec(
                design,
                (design.rod_width,),
                (design.rod_height,),
                tuple(slot_widths),
                power=power,
                emitter=emitter,
                mesh_options=mesh_options or {},
                label=label,
            )
            cells = dict(_run(evaluate_cell, spec, spec.keys(), pool))
            ranked = _ranking(cells, spec.objective)
            best = ranked[0] if ranked else None
            out.append(SweepResult(spec, {k: cells[k] for k in sorted(cells)}, {}, best, best))
    finally:
        if pool is not None:
            pool.shutdown()
    return out


def robustness_check(result: SweepResult, fraction: float, slot_width_nm: Optional[float] = None) -> list[Key]:
    """Cells 4-connected to the argmax whose objective is >= fraction * max.

    ``fraction = 0`` returns every solved cell at that slot width, even ones
    not connected to the argmax.
    """
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1]")
    if result.argmax is None:
        return []
    s = result.argmax[0] if slot_width_nm is None else slot_width_nm
    good = {k: result.value(k) for k in result.successful() if k[0] == s}
    if fraction == 0:
        return sorted(good)
    vmax = result.value(result.argmax)
    threshold = fraction * vmax
    ws = sorted({k[1] for k in good})
    hs = sorted({k[2] for k in good})
    wi = {w: i for i, w in enumerate(ws)}
    hi = {h: i for i, h in enumerate(hs)}
    start = result.argmax if result.argmax[0] == s else max(good, key=good.get)
    seen = {start}
    stack = [start]
    while stack:
        _, w, h = stack.pop()
        i, j = wi[w], hi[h]
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii, jj = i + di, j + dj
            if 0 <= ii < len(ws) and 0 <= jj < len(hs):
                nb = (s, ws[ii], hs[jj])
                if nb in good and nb not in seen and good[nb] >= threshold:
                    seen.add(nb)
                    stack.append(nb)
    return sorted(seen)


"""Writers for field maps, mode bundles and spectra."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Union

import numpy as np

from .geometry import MeshSpec, PermittivityMap
from .modesolver import Mode

COMPONENTS = ("Ex", "Ey", "Ez", "Hx", "Hy", "Hz")
FIELD_COLUMNS = ["x", "y"] + [f"{p}_{c}" for c in COMPONENTS for p in ("re", "im")]


def _fmt(v: float) -> str:
    return format(float(v), ".10e")


def field_csv(mode: Mode) -> str:
    """One row per cell centre: x, y (m) then Re/Im of every component (SI)."""
    f = mode.cell_fields()
    mesh = mode.mesh
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELD_COLUMNS)
    for i, x in enumerate(mesh.xc):
        for j, y in enumerate(mesh.yc):
            row = [_fmt(x), _fmt(y)]
            for c in COMPONENTS:
                z = f[c][i, j]
                row += [_fmt(z.real), _fmt(z.imag)]
            w.writerow(row)
    return buf.getvalue()


def mode_summary(mode: Mode) -> dict[str, Any]:
    return {
        "n_eff": mode.n_eff,
        "wavelength_m": mode.wavelength,
        "normalization": mode.normalization,
        "power_w": mode.power,
        "te_fraction": mode.te_fraction(),
        "guided": mode.guided,
        "residual": mode.residual,
        "mesh_cells": [mode.mesh.nx, mode.mesh.ny],
    }


def save_bundle(mode: Mode, path: Union[str, Path]) -> Path:
    """Self-describing .npz with mesh, permittivity, Yee-grid fields and metadata."""
    path = Path(path)
    m = mode.eps_map
    meta = json.dumps(mode_summary(mode), sort_keys=True)
    with open(path, "wb") as fh:
        np.savez_compressed(
            fh,
            x_lines=m.mesh.x_lines,
            y_lines=m.mesh.y_lines,
            eps=m.eps,
            eps_xx=m.eps_xx,
            eps_yy=m.eps_yy,
            meta=np.array(meta),
            **{c: np.asarray(getattr(mode, c)) for c in COMPONENTS},
        )
    return path


def load_bundle(path: Union[str, Path]) -> Mode:
    with np.load(path) as d:
        meta = json.loads(str(d["meta"]))
        eps_map = PermittivityMap(MeshSpec(d["x_lines"], d["y_lines"]), d["eps"], d["eps_xx"], d["eps_yy"])
        fields = {c: d[c] for c in COMPONENTS}
    return Mode(
        meta["n_eff"],
        meta["wavelength_m"],
        eps_map,
        normalization=meta["normalization"],
        power=meta["power_w"],
        residual=meta["residual"],
        guided=meta["guided"],
        **fields,
    )


def spectrum_csv(rows: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["wavelength_m", "R", "T"])
    for lam, r, t in rows:
        w.writerow([_fmt(lam), repr(float(r)), repr(float(t))])
    return buf.getvalue()


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"

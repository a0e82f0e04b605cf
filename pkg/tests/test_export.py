import json

import numpy as np
import pytest

from slotcavity.export import FIELD_COLUMNS, dump_json, field_csv, load_bundle, mode_summary, save_bundle, spectrum_csv
from slotcavity.modesolver import normalize_power


def test_field_csv_shape(dia_air_mode):
    text = field_csv(dia_air_mode)
    lines = text.splitlines()
    assert lines[0].split(",") == FIELD_COLUMNS
    assert len(lines) - 1 == dia_air_mode.mesh.nx * dia_air_mode.mesh.ny
    assert all(len(l.split(",")) == len(FIELD_COLUMNS) for l in lines[1:50])


def test_bundle_round_trip(tmp_path, dia_air_mode):
    mode = normalize_power(dia_air_mode, 1e-15)
    path = save_bundle(mode, tmp_path / "m.npz")
    back = load_bundle(path)
    assert back.n_eff == mode.n_eff and back.power == mode.power
    for c in ("Ex", "Ey", "Ez", "Hx", "Hy", "Hz"):
        np.testing.assert_array_equal(getattr(back, c), getattr(mode, c))
    np.testing.assert_array_equal(back.eps_map.eps, mode.eps_map.eps)
    assert back.flux() == pytest.approx(mode.flux(), rel=1e-12)
    assert mode_summary(back) == mode_summary(mode)


def test_spectrum_and_json():
    rows = np.array([[600e-9, 0.25, 0.75], [610e-9, 0.5, 0.5]])
    lines = spectrum_csv(rows).splitlines()
    assert lines[0] == "wavelength_m,R,T" and lines[1].endswith("0.25,0.75")
    assert json.loads(dump_json({"b": 1, "a": [1.5]})) == {"a": [1.5], "b": 1}
    assert dump_json({"b": 1, "a": 2}).index('"a"') < dump_json({"b": 1, "a": 2}).index('"b"')

import json
import math

import numpy as np
import pytest

import slotcavity.sweep as sw
from slotcavity.errors import AllCellsFailed, ConfigError
from slotcavity.sweep import CellResult, SweepSpec, nm_range, robustness_check, sweep_rod, sweep_slot

from conftest import NM, slot_spec

FAST_MESH = {"coarse": 20 * NM, "rod_cell": 10 * NM, "domain": (1.6e-6, 1.4e-6)}


def synthetic(peak=(140.0, 110.0), width=40.0, fail=()):
    """Gaussian objective over (w_R, h) standing in for the solver."""

    def evaluate(spec, key):
        if key in fail:
            return CellResult(key, False, "NotConverged: synthetic")
        _, w, h = key
        v = 10 * math.exp(-((w - peak[0]) ** 2 + (h - peak[1]) ** 2) / (2 * width**2))
        rep = {"Ex_r0_at_power": v, "E_photon_r0": 1e5 * v, "g_r0": 1e9 * v, "n_eff": 1.3, "V_normalized": 0.1}
        return CellResult(key, True, report=rep)

    return evaluate


def spec(ws=(100, 170), hs=(70, 140), **kw):
    return SweepSpec(slot_spec(), nm_range(*ws, 10), nm_range(*hs, 10), label="test", **kw)


def test_argmax_on_grid(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic())
    r = sweep_rod(spec(), workers=1)
    assert r.argmax == (20.0, 140.0, 110.0)
    v = r.value(r.argmax)
    assert all(c.value("Ex_at_r0") <= v for c in r.cells.values())
    assert r.grid().shape == (8, 8)


def test_one_cell_grid(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic())
    r = sweep_rod(spec((120, 120), (90, 90)), workers=1)
    assert r.argmax == (20.0, 120.0, 90.0)


def test_tie_break_smallest_area(monkeypatch):
    def flat(spec_, key):
        return CellResult(key, True, report={"Ex_r0_at_power": 1.0})

    monkeypatch.setattr(sw, "evaluate_cell", flat)
    r = sweep_rod(spec((100, 130), (70, 100)), workers=1)
    assert r.argmax == (20.0, 100.0, 70.0)


def test_failed_cells_are_marked(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic(fail={(20.0, 140.0, 110.0)}))
    r = sweep_rod(spec(), workers=1)
    assert r.argmax != (20.0, 140.0, 110.0)
    bad = r.cells[(20.0, 140.0, 110.0)]
    assert not bad.ok and "NotConverged" in bad.error
    assert np.isnan(r.grid()[4, 4])
    row = [x for x in r.rows() if (x["w_R_nm"], x["h_nm"]) == (140.0, 110.0)][0]
    assert row["error"] and row["Ex_r0_V_per_m"] is None


def test_all_cells_failed(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", lambda s, k: CellResult(k, False, "NoGuidedMode: x"))
    with pytest.raises(AllCellsFailed):
        sweep_rod(spec((100, 110), (70, 80)), workers=1)


def test_single_mode_constraint(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic(peak=(110, 80)))
    counted = []

    def count(spec_, key):
        counted.append(key)
        return 2 if key[2] >= 80 else 1

    monkeypatch.setattr(sw, "count_cell", count)
    r = sweep_rod(spec((80, 140), (50, 110), single_mode_constraint=True), workers=1)
    assert r.argmax == (20.0, 110.0, 70.0)
    assert r.unconstrained_argmax == (20.0, 110.0, 80.0)
    assert r.summary()["unconstrained_argmax"] == [20.0, 110.0, 80.0]
    assert r.mode_counts[(20.0, 110.0, 80.0)] == 2
    assert r.mode_counts[(20.0, 110.0, 70.0)] == 1
    # counting stops at the first single-moded cell
    assert counted[-1] == (20.0, 110.0, 70.0)


def test_refinement_pass(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic(peak=(136, 106)))
    r = sweep_rod(spec(refine=True), workers=1)
    assert r.argmax == (20.0, 135.0, 105.0)
    assert (20.0, 145.0, 115.0) in r.cells


def test_objectives(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic())
    for obj in ("per_photon_Ex", "rabi"):
        assert sweep_rod(spec(objective=obj), workers=1).argmax == (20.0, 140.0, 110.0)


def test_resume_gives_identical_result(monkeypatch, tmp_path):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic())
    j = tmp_path / "journal.jsonl"
    full = sweep_rod(spec(), workers=1, journal=j)
    lines = j.read_text().splitlines()
    # simulate a crash after ten cells, mid-write of the eleventh
    j.write_text("\n".join(lines[:11]) + "\n" + lines[11][:20])
    calls = []
    inner = synthetic()

    def counting(s, k):
        calls.append(k)
        return inner(s, k)

    monkeypatch.setattr(sw, "evaluate_cell", counting)
    resumed = sweep_rod(spec(), workers=1, journal=j, resume=True)
    assert len(calls) == len(full.cells) - 10
    assert resumed.to_csv() == full.to_csv()
    assert resumed.summary() == full.summary()


def test_resume_rejects_foreign_journal(monkeypatch, tmp_path):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic())
    j = tmp_path / "journal.jsonl"
    sweep_rod(spec(), workers=1, journal=j)
    other = SweepSpec(slot_spec(), nm_range(100, 110, 10), nm_range(70, 80, 10), power=2e-15)
    with pytest.raises(ConfigError):
        sweep_rod(other, workers=1, journal=j, resume=True)


def test_threads_do_not_change_results(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic())
    a = sweep_rod(spec(), workers=1)
    b = sweep_rod(spec(), workers=3, threads=True)
    assert a.to_csv() == b.to_csv()


def test_real_solver_pool_determinism(tmp_path):
    s = SweepSpec(slot_spec(), (130 * NM, 140 * NM), (110 * NM,), mesh_options=FAST_MESH)
    a = sweep_rod(s, workers=1)
    b = sweep_rod(s, workers=2)
    assert a.to_csv() == b.to_csv()
    assert a.argmax == (20.0, 140.0, 110.0)


def test_robustness_region(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic(fail={(20.0, 100.0, 70.0)}))
    r = sweep_rod(spec(), workers=1)
    assert robustness_check(r, 1.0) == [r.argmax]
    everything = robustness_check(r, 0.0)
    assert len(everything) == 63
    half = robustness_check(r, 0.5)
    assert r.argmax in half
    vmax = r.value(r.argmax)
    assert all(r.value(k) >= 0.5 * vmax for k in half)
    ws = {k[1] for k in half}
    hs = {k[2] for k in half}
    assert min(ws) <= 120 and max(ws) >= 160 and min(hs) <= 90 and max(hs) >= 130
    with pytest.raises(ValueError):
        robustness_check(r, 1.5)


def test_robustness_region_is_connected(monkeypatch):
    # two separated bumps: only the one holding the argmax is returned
    def two_bumps(spec_, key):
        _, w, h = key
        v = 10.0 if (w, h) == (100.0, 70.0) else (9.0 if (w, h) == (170.0, 140.0) else 1.0)
        return CellResult(key, True, report={"Ex_r0_at_power": v})

    monkeypatch.setattr(sw, "evaluate_cell", two_bumps)
    r = sweep_rod(spec(), workers=1)
    assert robustness_check(r, 0.5) == [(20.0, 100.0, 70.0)]


def test_summary_and_csv(monkeypatch):
    monkeypatch.setattr(sw, "evaluate_cell", synthetic())
    r = sweep_rod(spec((130, 150), (100, 120)), workers=1)
    s = r.summary()
    json.dumps(s)
    assert s["argmax"] == [20.0, 140.0, 110.0]
    header = r.to_csv().splitlines()[0].split(",")
    assert header[:4] == ["design", "w_S_nm", "w_R_nm", "h_nm"]
    assert {"n_eff", "mode_count", "Ex_r0_V_per_m", "V_norm", "E_photon_x_V_per_m", "g_rad_per_s"} <= set(header)
    assert len(r.to_csv().splitlines()) == 10


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(slot_spec(), (), (100 * NM,))
    with pytest.raises(ValueError):
        SweepSpec(slot_spec(), (120 * NM, 110 * NM), (100 * NM,))
    with pytest.raises(ValueError):
        SweepSpec(slot_spec(), (120 * NM,), (100 * NM,), objective="volume")
    s = SweepSpec(slot_spec(), (120 * NM,), (100 * NM,))
    assert s.slot_widths == (20 * NM,) and s.emitter.name == "NV"


def test_worker_env(monkeypatch):
    monkeypatch.setenv("SLOTCAVITY_THREADS", "3")
    assert sw.default_workers() == 3
    monkeypatch.setenv("SLOTCAVITY_THREADS", "many")
    with pytest.raises(ConfigError):
        sw.default_workers()
    monkeypatch.delenv("SLOTCAVITY_THREADS")
    assert sw.default_workers() == 1


def test_sweep_slot_real_solver():
    res = sweep_slot([slot_spec()], (15 * NM, 25 * NM), ["dia-air"], mesh_options=FAST_MESH, workers=1)
    (r,) = res
    v15 = r.value((15.0, 140.0, 110.0))
    v25 = r.value((25.0, 140.0, 110.0))
    assert v15 > v25
    assert r.cells[(15.0, 140.0, 110.0)].report["V_normalized"] < r.cells[(25.0, 140.0, 110.0)].report["V_normalized"]

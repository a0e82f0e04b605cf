import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slotcavity.errors import GeometryTooLarge, InvalidBridge, InvalidGeometry, InvalidMesh
from slotcavity.geometry import (
    AIR,
    DIAMOND,
    GAP,
    SILICA,
    Box,
    Material,
    MeshSpec,
    PermittivityMap,
    build_mesh,
    locate_r0,
    rasterize,
    rasterize_boxes,
)

from conftest import NM, slot_spec


def test_material_validation():
    with pytest.raises(InvalidGeometry):
        Material("bad", 0.9)
    with pytest.raises(InvalidGeometry):
        Material("bad", 1.5, (800e-9, 500e-9))
    assert GAP.transparent_at(637e-9)
    assert not GAP.transparent_at(500e-9)
    assert DIAMOND.transparent_at(200e-9)


def test_spec_rejects_bad_dimensions():
    with pytest.raises(InvalidGeometry):
        slot_spec(w_s=0)
    with pytest.raises(InvalidGeometry):
        slot_spec(h=-10)
    with pytest.raises(InvalidBridge):
        slot_spec(bridge=0)
    with pytest.raises(InvalidBridge):
        slot_spec(h=110, bridge=120)
    with pytest.raises(InvalidGeometry):
        slot_spec(rod=SILICA, slot=DIAMOND)


def test_spec_properties():
    s = slot_spec(bridge=20)
    assert s.cladding_material is AIR
    assert s.has_bridge
    assert s.total_width == pytest.approx(300 * NM)
    assert s.index_contrast == pytest.approx((2.4 - 1.0) / 2.4)
    assert slot_spec(rod=GAP).index_contrast == pytest.approx(0.70, abs=0.01)
    assert len(s.boxes()) == 3 and len(slot_spec().boxes()) == 2


def test_r0_is_slot_centre():
    assert locate_r0(slot_spec()) == (0.0, 0.0)


def test_default_mesh_is_mirror_symmetric_and_conforming():
    spec = slot_spec(bridge=20)
    mesh = build_mesh(spec)
    assert np.allclose(mesh.x_lines, -mesh.x_lines[::-1], atol=1e-18)
    assert mesh.domain_width == pytest.approx(2.36e-6)
    assert mesh.domain_height == pytest.approx(2.0e-6)
    for v in (0, 10 * NM, -10 * NM, 150 * NM, -150 * NM):
        assert np.min(np.abs(mesh.x_lines - v)) < 1e-15
    for v in (55 * NM, -55 * NM, 10 * NM, -10 * NM):
        assert np.min(np.abs(mesh.y_lines - v)) < 1e-15
    # every cell homogeneous, so no averaging is needed
    m = rasterize(spec, mesh)
    assert set(np.unique(m.eps)) <= {1.0, 2.4**2}
    assert np.array_equal(m.eps, m.eps_xx)


def test_mesh_cell_sizes():
    mesh = build_mesh(slot_spec(w_s=20))
    in_slot = (mesh.xc > -10 * NM) & (mesh.xc < 10 * NM)
    assert np.all(mesh.dx[in_slot] <= 2.5 * NM + 1e-15)
    assert np.all(mesh.dx <= 10 * NM + 1e-15)
    assert np.all(mesh.dy <= 10 * NM + 1e-15)
    in_rod = (mesh.xc > 10 * NM) & (mesh.xc < 150 * NM)
    assert np.all(mesh.dx[in_rod] <= 5 * NM + 1e-15)
    # narrow slot still gets four cells
    small = build_mesh(slot_spec(w_s=5))
    assert np.count_nonzero(np.abs(small.xc) < 2.5 * NM) == 4


def test_geometry_too_large():
    with pytest.raises(GeometryTooLarge):
        build_mesh(slot_spec(w_r=1200))
    mesh = build_mesh(slot_spec())
    with pytest.raises(GeometryTooLarge):
        rasterize(slot_spec(w_r=1170), mesh)


def test_underresolved_slot_rejected():
    spec = slot_spec(w_s=20)
    mesh = build_mesh(spec, slot_cell=10 * NM, rod_cell=10 * NM)
    with pytest.raises(InvalidMesh):
        rasterize(spec, mesh)


def test_meshspec_validation():
    with pytest.raises(InvalidMesh):
        MeshSpec(np.array([0.0, 1.0]), np.array([0.0, 1.0, 2.0]))
    with pytest.raises(InvalidMesh):
        MeshSpec(np.array([0.0, 2.0, 1.0]), np.array([0.0, 1.0, 2.0]))
    with pytest.raises(InvalidMesh):
        PermittivityMap(MeshSpec(np.arange(4.0), np.arange(4.0)), np.ones((2, 2)))


def test_refined_mesh_halves_cells():
    mesh = MeshSpec(np.array([0.0, 1.0, 3.0]), np.array([0.0, 2.0, 3.0]))
    r = mesh.refined(2)
    assert np.allclose(r.x_lines, [0, 0.5, 1, 2, 3])
    assert r.cell_areas.sum() == pytest.approx(mesh.cell_areas.sum())


def test_cut_cell_averaging_vertical_interface():
    mesh = MeshSpec(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 2.0]))
    m = rasterize_boxes(mesh, 1.0, [Box(-1.0, 0.25, -1.0, 3.0, 4.0)])
    # first column: quarter at 4, three quarters at 1
    assert m.eps[0, 0] == pytest.approx(0.25 * 4 + 0.75 * 1)
    assert m.eps_xx[0, 0] == pytest.approx(1 / (0.25 / 4 + 0.75 / 1))
    assert m.eps_yy[0, 0] == pytest.approx(m.eps[0, 0])
    assert m.eps[1, 0] == 1.0


@settings(max_examples=40, deadline=None)
@given(
    x0=st.floats(-0.9, 0.9),
    w=st.floats(0.05, 1.5),
    y0=st.floats(-0.9, 0.9),
    hgt=st.floats(0.05, 1.5),
    eps=st.floats(1.0, 12.0),
)
def test_averaging_bounds_and_volume(x0, w, y0, hgt, eps):
    mesh = MeshSpec(np.linspace(-1, 2, 7), np.linspace(-1, 2, 7))
    box = Box(x0, x0 + w, y0, y0 + hgt, eps)
    m = rasterize_boxes(mesh, 1.0, [box])
    # total "dielectric content" is conserved by the volume average
    ov_x = np.clip(np.minimum(mesh.x_lines[1:], box.x1) - np.maximum(mesh.x_lines[:-1], box.x0), 0, None)
    ov_y = np.clip(np.minimum(mesh.y_lines[1:], box.y1) - np.maximum(mesh.y_lines[:-1], box.y0), 0, None)
    expected = mesh.cell_areas.sum() + (eps - 1.0) * np.outer(ov_x, ov_y).sum()
    assert np.sum(m.eps * mesh.cell_areas) == pytest.approx(expected, rel=1e-9)
    # harmonic-type averages never exceed the arithmetic one
    assert np.all(m.eps_xx <= m.eps + 1e-9) and np.all(m.eps_yy <= m.eps + 1e-9)
    assert np.all(m.eps_xx >= 1.0 - 1e-12) and np.all(m.eps <= eps + 1e-9)


def test_index_at_and_cladding():
    spec = slot_spec(slot=SILICA)
    m = rasterize(spec, build_mesh(spec))
    assert m.n_clad == pytest.approx(1.45)
    assert m.n_max == pytest.approx(2.4)
    assert m.index_at(80 * NM, 0.0) == pytest.approx(2.4)
    assert m.index_at(0.0, 0.0) == pytest.approx(1.45)

import numpy as np
import pytest

from slotcavity.geometry import AIR, DIAMOND, Box, MeshSpec, SlotWaveguideSpec, graded_lines, rasterize_boxes
from slotcavity.modesolver import SolveSettings, solve_modes
from slotcavity.pipeline import fundamental_mode, permittivity

NM = 1e-9
LAMBDA = 637 * NM

# filled by test_acceptance, printed after the run whatever the capture mode
ACCEPTANCE_LINES: dict[int, list[str]] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            for line in ACCEPTANCE_LINES[n]:
                terminalreporter.write_line(line)


def slot_spec(w_s=20, w_r=140, h=110, rod=DIAMOND, slot=AIR, bridge=None):
    return SlotWaveguideSpec(
        w_s * NM, w_r * NM, h * NM, rod, slot, LAMBDA, bridge_height=None if bridge is None else bridge * NM
    )


def slab_map(thickness=110 * NM, n_core=2.4, cell=5 * NM, coarse=10 * NM, vertical=False, refine=1):
    """Slab of ``thickness`` filling the domain along its length.

    Horizontal slabs (normal y) use a narrow uniform x mesh; the TE slab mode
    is then an exact mode of the PEC box.
    """
    half = graded_lines(0.0, 1e-6, [thickness / 2], [(0.0, thickness / 2, cell)], coarse, 1.2)
    across = np.concatenate([-half[::-1], half[1:]])
    along = np.linspace(-40 * NM, 40 * NM, 5)
    if vertical:
        mesh = MeshSpec(across, along)
        box = Box(-thickness / 2, thickness / 2, -1.0, 1.0, n_core**2)
    else:
        mesh = MeshSpec(along, across)
        box = Box(-1.0, 1.0, -thickness / 2, thickness / 2, n_core**2)
    if refine > 1:
        mesh = mesh.refined(refine)
    return rasterize_boxes(mesh, 1.0, [box])


@pytest.fixture(scope="session")
def dia_air_spec():
    return slot_spec()


@pytest.fixture(scope="session")
def dia_air_mode(dia_air_spec):
    """Fundamental quasi-TE mode from the Ex-even half-domain solve."""
    return fundamental_mode(dia_air_spec)


@pytest.fixture(scope="session")
def dia_air_full_modes(dia_air_spec):
    """Full-domain solve, no symmetry assumed."""
    eps_map = permittivity(dia_air_spec)
    return solve_modes(eps_map, LAMBDA, SolveSettings(n_modes_requested=3))

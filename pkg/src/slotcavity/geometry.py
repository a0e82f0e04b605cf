"""Slot-waveguide cross-sections and their rasterization onto a tensor mesh.

Coordinates: x runs across the slot, y is vertical and z is the propagation
direction. The origin sits at the slot centre unless ``center`` is given.
All lengths are in metres.

Cells cut by a material boundary receive a diagonal permittivity tensor:
along each axis the sub-cell segments are combined harmonically (the field
component normal to the boundary sees layers in series), and the result is
averaged arithmetically across the perpendicular axis. For a cell cut only
by a vertical line this gives ``eps_xx`` = harmonic mean and ``eps_yy`` =
``eps_zz`` = arithmetic mean. :func:`build_mesh` places lines on every
boundary, so with default meshes every cell is homogeneous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .constants import N_AIR, N_DIAMOND, N_GAP, N_SILICA
from .errors import GeometryTooLarge, InvalidBridge, InvalidGeometry, InvalidMesh

__all__ = [
    "Material",
    "AIR",
    "DIAMOND",
    "GAP",
    "SILICA",
    "MATERIALS",
    "SlotWaveguideSpec",
    "MeshSpec",
    "PermittivityMap",
    "Box",
    "build_mesh",
    "graded_lines",
    "rasterize",
    "rasterize_boxes",
    "locate_r0",
]


@dataclass(frozen=True)
class Material:
    name: str
    refractive_index: float
    transparency_window: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if not self.refractive_index >= 1.0:
            raise InvalidGeometry(
                f"material {self.name!r}: refractive index must be >= 1, got {self.refractive_index}"
            )
        if self.transparency_window is not None:
            lo, hi = self.transparency_window
            if not 0 < lo < hi:
                raise InvalidGeometry(
                    f"material {self.name!r}: transparency window must satisfy 0 < min < max"
                )

    @property
    def eps(self) -> float:
        return self.refractive_index**2

    def transparent_at(self, wavelength: float) -> bool:
        if self.transparency_window is None:
            return True
        lo, hi = self.transparency_window
        return lo <= wavelength <= hi


AIR = Material("air", N_AIR)
DIAMOND = Material("diamond", N_DIAMOND)
GAP = Material("GaP", N_GAP, (554e-9, 828e-9))
SILICA = Material("silica", N_SILICA)

MATERIALS: dict[str, Material] = {m.name.lower(): m for m in (AIR, DIAMOND, GAP, SILICA)}


@dataclass(frozen=True)
class SlotWaveguideSpec:
    """Two identical rods of width ``rod_width`` and height ``rod_height``
    separated by a slot of width ``slot_width``.

    The optional bridge is a ``slot_width`` x ``bridge_height`` block of
    ``bridge_material`` filling the slot, centred vertically. The cladding
    is always the slot material.
    """

    slot_width: float
    rod_width: float
    rod_height: float
    rod_material: Material
    slot_material: Material
    wavelength: float
    bridge_height: Optional[float] = None
    bridge_material: Material = DIAMOND
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name in ("slot_width", "rod_width", "rod_height", "wavelength"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidGeometry(f"{name} must be positive, got {value}")
        if self.bridge_height is not None:
            if not self.bridge_height > 0:
                raise InvalidBridge(f"bridge height must be positive, got {self.bridge_height}")
            if self.bridge_height > self.rod_height:
                raise InvalidBridge(
                    f"bridge height {self.bridge_height} exceeds rod height {self.rod_height}"
                )
        if self.rod_material.refractive_index < self.slot_material.refractive_index:
            raise InvalidGeometry("rod index must not be below the slot index")
        # frozen: normalise center to a float tuple
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def cladding_material(self) -> Material:
        return self.slot_material

    @property
    def has_bridge(self) -> bool:
        return self.bridge_height is not None

    @property
    def index_contrast(self) -> float:
        n_r = self.rod_material.refractive_index
        return (n_r - self.slot_material.refractive_index) / n_r

    @property
    def total_width(self) -> float:
        return self.slot_width + 2 * self.rod_width

    def boxes(self) -> list["Box"]:
        """Rod and bridge rectangles in painting order."""
        cx, cy = self.center
        half_s = self.slot_width / 2
        half_h = self.rod_height / 2
        eps_r = self.rod_material.eps
        out = [
            Box(cx - half_s - self.rod_width, cx - half_s, cy - half_h, cy + half_h, eps_r),
            Box(cx + half_s, cx + half_s + self.rod_width, cy - half_h, cy + half_h, eps_r),
        ]
        if self.bridge_height is not None:
            half_b = self.bridge_height / 2
            out.append(Box(cx - half_s, cx + half_s, cy - half_b, cy + half_b, self.bridge_material.eps))
        return out

    def replace(self, **changes) -> "SlotWaveguideSpec":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class Box:
    x0: float
    x1: float
    y0: float
    y1: float
    eps: float

    def contains(self, x, y):
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)


@dataclass(frozen=True, eq=False)
class MeshSpec:
    """Tensor-product mesh given by its x and y line coordinates."""

    x_lines: np.ndarray
    y_lines: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_lines, dtype=float)
        y = np.asarray(self.y_lines, dtype=float)
        for name, arr in (("x_lines", x), ("y_lines", y)):
            if arr.ndim != 1 or arr.size < 3:
                raise InvalidMesh(f"{name} needs at least 3 lines")
            if np.any(np.diff(arr) <= 0):
                raise InvalidMesh(f"{name} must be strictly increasing")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x_lines", x)
        object.__setattr__(self, "y_lines", y)

    @property
    def nx(self) -> int:
        return self.x_lines.size - 1

    @property
    def ny(self) -> int:
        return self.y_lines.size - 1

    @property
    def dx(self) -> np.ndarray:
        return np.diff(self.x_lines)

    @property
    def dy(self) -> np.ndarray:
        return np.diff(self.y_lines)

    @property
    def xc(self) -> np.ndarray:
        return 0.5 * (self.x_lines[1:] + self.x_lines[:-1])

    @property
    def yc(self) -> np.ndarray:
        return 0.5 * (self.y_lines[1:] + self.y_lines[:-1])

    @property
    def domain_width(self) -> float:
        return float(self.x_lines[-1] - self.x_lines[0])

    @property
    def domain_height(self) -> float:
        return float(self.y_lines[-1] - self.y_lines[0])

    @property
    def cell_areas(self) -> np.ndarray:
        return np.outer(self.dx, self.dy)

    def contains(self, x: float, y: float) -> bool:
        return bool(
            self.x_lines[0] <= x <= self.x_lines[-1] and self.y_lines[0] <= y <= self.y_lines[-1]
        )

    def refined(self, factor: int = 2) -> "MeshSpec":
        """Split every cell into ``factor`` x ``factor`` sub-cells."""

        def split(lines):
            t = np.linspace(0.0, 1.0, factor + 1)[:-1]
            inner = (lines[:-1, None] + np.diff(lines)[:, None] * t[None, :]).ravel()
            return np.append(inner, lines[-1])

        return MeshSpec(split(self.x_lines), split(self.y_lines))


@dataclass(frozen=True, eq=False)
class PermittivityMap:
    """Relative permittivity per mesh cell.

    ``eps`` is the volume average (used for ``eps_zz``); ``eps_xx`` and
    ``eps_yy`` carry the anisotropic interface averages.
    """

    mesh: MeshSpec
    eps: np.ndarray
    eps_xx: np.ndarray = field(default=None)
    eps_yy: np.ndarray = field(default=None)

    def __post_init__(self):
        shape = (self.mesh.nx, self.mesh.ny)
        eps = np.asarray(self.eps, dtype=float)
        if eps.shape != shape:
            raise InvalidMesh(f"eps has shape {eps.shape}, mesh has {shape} cells")
        exx = eps if self.eps_xx is None else np.asarray(self.eps_xx, dtype=float)
        eyy = eps if self.eps_yy is None else np.asarray(self.eps_yy, dtype=float)
        for arr in (eps, exx, eyy):
            arr.setflags(write=False)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "eps_xx", exx)
        object.__setattr__(self, "eps_yy", eyy)

    @property
    def n_max(self) -> float:
        return float(np.sqrt(self.eps.max()))

    @property
    def n_clad(self) -> float:
        """Index of the outermost ring of cells (the cladding)."""
        edge = np.concatenate([self.eps[0], self.eps[-1], self.eps[:, 0], self.eps[:, -1]])
        return float(np.sqrt(edge.min()))

    def index_at(self, x: float, y: float) -> float:
        i = int(np.clip(np.searchsorted(self.mesh.x_lines, x) - 1, 0, self.mesh.nx - 1))
        j = int(np.clip(np.searchsorted(self.mesh.y_lines, y) - 1, 0, self.mesh.ny - 1))
        return float(np.sqrt(self.eps[i, j]))


def graded_lines(
    lo: float,
    hi: float,
    breakpoints: Sequence[float],
    zones: Sequence[tuple[float, float, float]],
    coarse: float,
    growth: float = 1.2,
    samples: int = 4001,
) -> np.ndarray:
    """Mesh lines on ``[lo, hi]`` that hit every breakpoint.

    ``zones`` holds ``(start, stop, size)`` intervals requesting a maximum
    cell size; outside a zone the admissible size grows geometrically with
    ratio ``growth`` up to ``coarse``.
    """
    pts = sorted({float(lo), float(hi), *(float(b) for b in breakpoints if lo < b < hi)})

    def size(x):
        s = np.full_like(x, coarse)
        for a, b, h in zones:
            dist = np.maximum(0.0, np.maximum(a - x, x - b))
            s = np.minimum(s, h + (growth - 1.0) * dist)
        return s

    lines = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        x = np.linspace(a, b, samples)
        dens = 1.0 / size(x)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(x))])
        n = max(1, int(np.ceil(cum[-1] - 1e-9)))
        targets = np.linspace(0.0, cum[-1], n + 1)[1:-1]
        lines.extend(np.interp(targets, cum, x))
        lines.append(b)
    return np.asarray(lines)


def build_mesh(
    spec: SlotWaveguideSpec,
    domain: tuple[float, float] = (2.36e-6, 2.0e-6),
    coarse: float = 10e-9,
    rod_cell: float = 5e-9,
    slot_cell: Optional[float] = None,
    slot_margin: float = 40e-9,
    growth: float = 1.2,
) -> MeshSpec:
    """Default nonuniform mesh for a slot waveguide.

    Cells are at most ``coarse`` in the cladding, ``rod_cell`` inside the
    rods, and ``min(w_S / 4, 2.5 nm)`` inside the slot and within
    ``slot_margin`` of it. Lines fall on every material boundary and on the
    slot centre.
    """
    width, height = domain
    if spec.total_width >= width or spec.rod_height >= height:
        raise GeometryTooLarge(
            f"structure {spec.total_width:.3e} x {spec.rod_height:.3e} m does not fit "
            f"in domain {width:.3e} x {height:.3e} m"
        )
    if slot_cell is None:
        slot_cell = min(spec.slot_width / 4, 2.5e-9)
    cx, cy = spec.center
    half_s, half_h = spec.slot_width / 2, spec.rod_height / 2
    xb = [cx, cx - half_s, cx + half_s, cx - half_s - spec.rod_width, cx + half_s + spec.rod_width]
    yb = [cy, cy - half_h, cy + half_h]
    if spec.bridge_height is not None:
        yb += [cy - spec.bridge_height / 2, cy + spec.bridge_height / 2]
    x_zones = [
        (xb[3], xb[4], rod_cell),
        (cx - half_s - slot_margin, cx + half_s + slot_margin, slot_cell),
    ]
    y_zones = [
        (cy - half_h, cy + half_h, rod_cell),
        (cy - half_h - slot_margin, cy + half_h + slot_margin, slot_cell),
    ]
    x = _mirrored(graded_lines(cx, cx + width / 2, xb, x_zones, coarse, growth), cx)
    y = _mirrored(graded_lines(cy, cy + height / 2, yb, y_zones, coarse, growth), cy)
    return MeshSpec(x, y)


def _mirrored(half: np.ndarray, centre: float) -> np.ndarray:
    """Reflect lines on ``[centre, ...]`` to an exactly symmetric set."""
    offsets = half - centre
    return np.concatenate([centre - offsets[:0:-1], centre + offsets])


def _overlap(lines: np.ndarray, a: float, b: float) -> np.ndarray:
    """Fraction of each cell covered by the interval ``[a, b]``."""
    lo = np.maximum(lines[:-1], a)
    hi = np.minimum(lines[1:], b)
    return np.clip(hi - lo, 0.0, None) / np.diff(lines)


def rasterize_boxes(mesh: MeshSpec, background: float, boxes: Sequence[Box]) -> PermittivityMap:
    """Paint axis-aligned boxes (later boxes win) over a uniform background."""
    xl, yl = mesh.x_lines, mesh.y_lines
    xc, yc = np.meshgrid(mesh.xc, mesh.yc, indexing="ij")
    eps = np.full((mesh.nx, mesh.ny), float(background))
    cut = np.zeros_like(eps, dtype=bool)
    for box in boxes:
        eps[box.contains(xc, yc)] = box.eps
        fx = _overlap(xl, box.x0, box.x1)
        fy = _overlap(yl, box.y0, box.y1)
        part_x = (fx > 1e-12) & (fx < 1 - 1e-12)
        part_y = (fy > 1e-12) & (fy < 1 - 1e-12)
        cut |= (part_x[:, None] & (fy > 1e-12)[None, :]) | (part_y[None, :] & (fx > 1e-12)[:, None])

    eps_xx = eps.copy()
    eps_yy = eps.copy()
    eps_zz = eps.copy()
    for i, j in zip(*np.nonzero(cut)):
        x0, x1, y0, y1 = xl[i], xl[i + 1], yl[j], yl[j + 1]
        sx = sorted({x0, x1, *(v for b in boxes for v in (b.x0, b.x1) if x0 < v < x1)})
        sy = sorted({y0, y1, *(v for b in boxes for v in (b.y0, b.y1) if y0 < v < y1)})
        wx = np.diff(sx) / (x1 - x0)
        wy = np.diff(sy) / (y1 - y0)
        mx = 0.5 * (np.array(sx[1:]) + np.array(sx[:-1]))
        my = 0.5 * (np.array(sy[1:]) + np.array(sy[:-1]))
        gx, gy = np.meshgrid(mx, my, indexing="ij")
        sub = np.full(gx.shape, float(background))
        for box in boxes:
            sub[box.contains(gx, gy)] = box.eps
        eps_xx[i, j] = np.sum(wy / np.sum(wx[:, None] / sub, axis=0))
        eps_yy[i, j] = np.sum(wx / np.sum(wy[None, :] / sub, axis=1))
        eps_zz[i, j] = np.sum(wx[:, None] * wy[None, :] * sub)
    return PermittivityMap(mesh, eps_zz, eps_xx, eps_yy)


def rasterize(spec: SlotWaveguideSpec, mesh: MeshSpec) -> PermittivityMap:
    """Relative permittivity of ``spec`` on ``mesh``.

    Raises
    ------
    GeometryTooLarge
        If the rods do not fit strictly inside the mesh domain.
    InvalidMesh
        If fewer than four cells span the slot.
    """
    boxes = spec.boxes()
    x0, x1 = mesh.x_lines[0], mesh.x_lines[-1]
    y0, y1 = mesh.y_lines[0], mesh.y_lines[-1]
    for b in boxes:
        if b.x0 <= x0 or b.x1 >= x1 or b.y0 <= y0 or b.y1 >= y1:
            raise GeometryTooLarge("rods exceed the simulation domain")
    cx = spec.center[0]
    in_slot = _overlap(mesh.x_lines, cx - spec.slot_width / 2, cx + spec.slot_width / 2)
    if in_slot.sum() < 4 - 1e-9 or np.count_nonzero(in_slot > 0.5) < 4:
        raise InvalidMesh(
            f"slot of width {spec.slot_width:.3e} m is spanned by fewer than 4 mesh cells"
        )
    return rasterize_boxes(mesh, spec.slot_material.eps, boxes)


def locate_r0(spec: SlotWaveguideSpec) -> tuple[float, float]:
    """Dipole location: the slot centre, which is also the bridge centre."""
    return spec.center

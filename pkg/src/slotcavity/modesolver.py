"""Full-vector finite-difference eigenmode solver on a staggered (Yee) grid.

Fields carry the dependence ``exp(i(beta z - omega t))``. The unknowns are
the transverse electric components, placed as

* ``Ex`` at ``(xc_i, y_j)``  -- cell centre in x, mesh line in y
* ``Ey`` at ``(x_i, yc_j)``
* ``Ez`` at ``(x_i, y_j)``   -- mesh nodes
* ``Hx`` with ``Ey``, ``Hy`` with ``Ex``, ``Hz`` at cell centres.

Eliminating ``Ez`` through ``div(eps E) = 0`` and ``H`` through the curl
equations gives, in units scaled by ``k0``::

    n_eff**2 * Et = eps_t Et + curl_t^T curl_t Et + grad eps_zz^-1 div(eps_t Et)

The domain is closed by perfect electric conductor walls, so tangential
``E`` vanishes on the boundary. The eigenproblem is solved by ARPACK in
shift-invert mode around ``n_max**2``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigs

from .constants import Z0
from .errors import NoGuidedMode, NoQuasiTeMode, NotConverged, PointOutsideDomain, ZeroField
from .geometry import MeshSpec, PermittivityMap

log = logging.getLogger(__name__)

__all__ = [
    "SolveSettings",
    "Mode",
    "solve_modes",
    "fundamental_quasi_te",
    "normalize_power",
    "count_guided",
    "build_operator",
]


@dataclass(frozen=True)
class SolveSettings:
    n_modes_requested: int = 4
    eigen_shift: Optional[float] = None  # n_eff**2 target; defaults to n_max**2
    convergence_tol: float = 1e-10
    max_iterations: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.n_modes_requested < 1:
            raise ValueError("n_modes_requested must be >= 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


def _n2c(d: np.ndarray, open_left: bool = False) -> sp.csr_matrix:
    """Forward difference from unknown nodes to cells.

    Boundary nodes are zero except node 0 when ``open_left`` (magnetic wall).
    """
    n = d.size
    inv = 1.0 / d
    first = 0 if open_left else 1
    cols_all = np.arange(first, n)  # node indices carried as unknowns
    col_of = {node: k for k, node in enumerate(cols_all)}
    rows, cols, vals = [], [], []
    for i in range(n):
        for node, sign in ((i + 1, 1.0), (i, -1.0)):
            if node in col_of:
                rows.append(i)
                cols.append(col_of[node])
                vals.append(sign * inv[i])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, cols_all.size))


def _c2n(d: np.ndarray, open_left: bool = False) -> sp.csr_matrix:
    """Backward difference from cells to unknown nodes.

    With ``open_left`` the ghost cell left of node 0 holds the negated
    value of cell 0 (quantities odd under the mirror).
    """
    n = d.size
    inv = 1.0 / (0.5 * (d[1:] + d[:-1]))
    rows = np.concatenate([np.arange(n - 1), np.arange(n - 1)])
    cols = np.concatenate([np.arange(1, n), np.arange(n - 1)])
    vals = np.concatenate([inv, -inv])
    inner = sp.csr_matrix((vals, (rows, cols)), shape=(n - 1, n))
    if not open_left:
        return inner
    edge = sp.csr_matrix(([2.0 / d[0]], ([0], [0])), shape=(1, n))
    return sp.vstack([edge, inner]).tocsr()


def _dual(d: np.ndarray) -> np.ndarray:
    """Control-volume widths around each node, half cells at the ends."""
    out = np.zeros(d.size + 1)
    out[:-1] += 0.5 * d
    out[1:] += 0.5 * d
    return out


@dataclass(frozen=True)
class _Staggered:
    """Permittivity and difference operators sampled on the Yee grid."""

    dx: np.ndarray
    dy: np.ndarray
    eps_ex: np.ndarray  # (nx, ny + 1)
    eps_ey: np.ndarray  # (nx + 1, ny)
    eps_ez: np.ndarray  # (nx + 1, ny + 1)
    open_left: bool
    dx_n2c: sp.csr_matrix
    dx_c2n: sp.csr_matrix
    dy_n2c: sp.csr_matrix
    dy_c2n: sp.csr_matrix

    @property
    def nx(self) -> int:
        return self.dx.size

    @property
    def ny(self) -> int:
        return self.dy.size

    @property
    def x_nodes(self) -> slice:
        """Node columns that carry unknowns."""
        return slice(0 if self.open_left else 1, -1)


def _staggered(eps_map: PermittivityMap, k0: float, open_left: bool = False) -> _Staggered:
    mesh = eps_map.mesh
    dx = mesh.dx * k0
    dy = mesh.dy * k0
    exx, eyy, ezz = eps_map.eps_xx, eps_map.eps_yy, eps_map.eps
    wy = _dual(dy)
    wx = _dual(dx)
    # tangential components see an arithmetic average of the two neighbours
    eps_ex = np.zeros((dx.size, dy.size + 1))
    eps_ex[:, :-1] += exx * dy / 2
    eps_ex[:, 1:] += exx * dy / 2
    eps_ex /= wy
    eps_ey = np.zeros((dx.size + 1, dy.size))
    eps_ey[:-1] += eyy * dx[:, None] / 2
    eps_ey[1:] += eyy * dx[:, None] / 2
    eps_ey /= wx[:, None]
    area = np.outer(dx, dy) / 4
    eps_ez = np.zeros((dx.size + 1, dy.size + 1))
    for sx in (slice(None, -1), slice(1, None)):
        for sy in (slice(None, -1), slice(1, None)):
            eps_ez[sx, sy] += ezz * area
    eps_ez /= np.outer(wx, wy)
    return _Staggered(
        dx, dy, eps_ex, eps_ey, eps_ez, open_left,
        _n2c(dx, open_left), _c2n(dx, open_left), _n2c(dy), _c2n(dy),
    )


def _operators(st: _Staggered):
    ny = st.ny
    ix = sp.identity(st.nx, format="csr")
    iy = sp.identity(ny, format="csr")
    ixn = sp.identity(st.dx_n2c.shape[1], format="csr")
    iyi = sp.identity(ny - 1, format="csr")
    # curl_z: (Ex, Ey unknowns) -> cells
    curl_ex = -sp.kron(ix, st.dy_n2c)
    curl_ey = sp.kron(st.dx_n2c, iy)
    # divergence: -> unknown nodes
    div_ex = sp.kron(st.dx_c2n, iyi)
    div_ey = sp.kron(ixn, st.dy_c2n)
    # gradient: unknown nodes -> (Ex, Ey)
    grad_ex = sp.kron(st.dx_n2c, iyi)
    grad_ey = sp.kron(ixn, st.dy_n2c)
    # curl transpose: cells -> (Ex, Ey)
    rot_ex = -sp.kron(ix, st.dy_c2n)
    rot_ey = sp.kron(st.dx_c2n, iy)
    return curl_ex, curl_ey, div_ex, div_ey, grad_ex, grad_ey, rot_ex, rot_ey


def build_operator(eps_map: PermittivityMap, wavelength: float, open_left: bool = False) -> sp.csc_matrix:
    """Sparse matrix whose eigenvalues are ``n_eff**2``.

    The unknown vector stacks interior ``Ex`` (shape ``(nx, ny-1)``) and
    the unknown ``Ey`` nodes (shape ``(nx-1, ny)``, or ``(nx, ny)`` with a
    magnetic left wall), both raveled in C order.
    """
    k0 = 2 * np.pi / wavelength
    return _assemble(_staggered(eps_map, k0, open_left))


def _assemble(st: _Staggered) -> sp.csc_matrix:
    curl_ex, curl_ey, div_ex, div_ey, grad_ex, grad_ey, rot_ex, rot_ey = _operators(st)
    e_ex = st.eps_ex[:, 1:-1].ravel()
    e_ey = st.eps_ey[st.x_nodes, :].ravel()
    inv_ez = sp.diags(1.0 / st.eps_ez[st.x_nodes, 1:-1].ravel())
    eps_t = sp.diags(np.concatenate([e_ex, e_ey]))
    curl = sp.hstack([curl_ex, curl_ey])
    rot = sp.vstack([rot_ex, rot_ey])
    div = sp.hstack([div_ex @ sp.diags(e_ex), div_ey @ sp.diags(e_ey)])
    grad = sp.vstack([grad_ex, grad_ey])
    return (eps_t + rot @ curl + grad @ inv_ez @ div).tocsc()


@dataclass(frozen=True, eq=False)
class Mode:
    """A guided (or candidate) eigenmode with fields on the Yee grid.

    Field arrays include the PEC boundary samples and have shapes
    ``Ex, Hy: (nx, ny+1)``, ``Ey, Hx: (nx+1, ny)``, ``Ez: (nx+1, ny+1)``,
    ``Hz: (nx, ny)``. E is in V/m and H in A/m once normalized.
    """

    n_eff: float
    wavelength: float
    eps_map: PermittivityMap
    Ex: np.ndarray
    Ey: np.ndarray
    Ez: np.ndarray
    Hx: np.ndarray
    Hy: np.ndarray
    Hz: np.ndarray
    normalization: str = "raw"
    power: Optional[float] = None
    residual: float = 0.0
    guided: bool = True

    def __post_init__(self):
        for name in ("Ex", "Ey", "Ez", "Hx", "Hy", "Hz"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def mesh(self) -> MeshSpec:
        return self.eps_map.mesh

    @property
    def k0(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def beta(self) -> float:
        return self.n_eff * self.k0

    def scaled(self, factor: complex, normalization: Optional[str] = None, power=None) -> "Mode":
        return replace(
            self,
            Ex=self.Ex * factor,
            Ey=self.Ey * factor,
            Ez=self.Ez * factor,
            Hx=self.Hx * factor,
            Hy=self.Hy * factor,
            Hz=self.Hz * factor,
            normalization=normalization or self.normalization,
            power=power,
        )

    # --- derived quantities -------------------------------------------------

    def flux(self) -> float:
        """Time-averaged axial Poynting flux 1/2 Re int (E x H*) . z dA, in W."""
        mesh = self.mesh
        a_ex = np.outer(mesh.dx, _dual(mesh.dy))
        a_ey = np.outer(_dual(mesh.dx), mesh.dy)
        sx = np.sum(np.real(self.Ex * np.conj(self.Hy)) * a_ex)
        sy = np.sum(np.real(self.Ey * np.conj(self.Hx)) * a_ey)
        return float(0.5 * (sx - sy))

    def cell_fields(self) -> dict[str, np.ndarray]:
        """All six components interpolated to cell centres, shape ``(nx, ny)``."""
        return {
            "Ex": 0.5 * (self.Ex[:, :-1] + self.Ex[:, 1:]),
            "Ey": 0.5 * (self.Ey[:-1, :] + self.Ey[1:, :]),
            "Ez": 0.25 * (self.Ez[:-1, :-1] + self.Ez[1:, :-1] + self.Ez[:-1, 1:] + self.Ez[1:, 1:]),
            "Hx": 0.5 * (self.Hx[:-1, :] + self.Hx[1:, :]),
            "Hy": 0.5 * (self.Hy[:, :-1] + self.Hy[:, 1:]),
            "Hz": np.asarray(self.Hz),
        }

    def energy_density(self) -> np.ndarray:
        """n(r)^2 |E(r)|^2 per cell (unnormalized)."""
        f = self.cell_fields()
        m = self.eps_map
        return (
            m.eps_xx * np.abs(f["Ex"]) ** 2
            + m.eps_yy * np.abs(f["Ey"]) ** 2
            + m.eps * np.abs(f["Ez"]) ** 2
        )

    def te_fraction(self) -> float:
        """Share of transverse electric energy carried by ``Ex``."""
        mesh = self.mesh
        wx = float(np.sum(np.abs(self.Ex) ** 2 * np.outer(mesh.dx, _dual(mesh.dy))))
        wy = float(np.sum(np.abs(self.Ey) ** 2 * np.outer(_dual(mesh.dx), mesh.dy)))
        total = wx + wy
        return wx / total if total > 0 else 0.0

    @property
    def is_quasi_te(self) -> bool:
        return self.te_fraction() > 0.5

    def boundary_energy_fraction(self, band: float = 0.1) -> float:
        """Fraction of the energy in cells within ``band`` (relative to the
        domain size) of the walls."""
        mesh = self.mesh
        w = self.energy_density() * mesh.cell_areas
        total = w.sum()
        if total <= 0:
            return 0.0
        xl, yl = mesh.x_lines, mesh.y_lines
        bx = band * mesh.domain_width
        by = band * mesh.domain_height
        inner_x = (mesh.xc > xl[0] + bx) & (mesh.xc < xl[-1] - bx)
        inner_y = (mesh.yc > yl[0] + by) & (mesh.yc < yl[-1] - by)
        inner = w[np.ix_(inner_x, inner_y)].sum()
        return float((total - inner) / total)

    def mirror_residual(self) -> float:
        """Energy share of the minority parity under x -> -x mirroring.

        Requires a mesh that is itself symmetric about its centre.
        """
        f = self.cell_fields()
        m = self.eps_map
        parts = []
        for sign in (1.0, -1.0):
            # a polar vector flips its x component under the mirror
            ex = 0.5 * (f["Ex"] - sign * f["Ex"][::-1])
            ey = 0.5 * (f["Ey"] + sign * f["Ey"][::-1])
            ez = 0.5 * (f["Ez"] + sign * f["Ez"][::-1])
            w = m.eps_xx * np.abs(ex) ** 2 + m.eps_yy * np.abs(ey) ** 2 + m.eps * np.abs(ez) ** 2
            parts.append(float(np.sum(w * self.mesh.cell_areas)))
        total = sum(parts)
        return min(parts) / total if total > 0 else 0.0

    def field_at(self, x: float, y: float, component: str = "Ex") -> complex:
        """Bilinear interpolation of a cell-centred component at ``(x, y)``."""
        mesh = self.mesh
        if not mesh.contains(x, y):
            raise PointOutsideDomain(f"point ({x}, {y}) lies outside the mesh")
        data = self.cell_fields()[component]
        return complex(_bilinear(mesh.xc, mesh.yc, data, x, y))

    def e_vector_at(self, x: float, y: float) -> np.ndarray:
        return np.array([self.field_at(x, y, c) for c in ("Ex", "Ey", "Ez")])


def _bilinear(xc: np.ndarray, yc: np.ndarray, data: np.ndarray, x: float, y: float):
    i = int(np.clip(np.searchsorted(xc, x) - 1, 0, xc.size - 2))
    j = int(np.clip(np.searchsorted(yc, y) - 1, 0, yc.size - 2))
    tx = np.clip((x - xc[i]) / (xc[i + 1] - xc[i]), 0.0, 1.0)
    ty = np.clip((y - yc[j]) / (yc[j + 1] - yc[j]), 0.0, 1.0)
    return (
        data[i, j] * (1 - tx) * (1 - ty)
        + data[i + 1, j] * tx * (1 - ty)
        + data[i, j + 1] * (1 - tx) * ty
        + data[i + 1, j + 1] * tx * ty
    )


def _reconstruct(st: _Staggered, vec: np.ndarray, n_eff: float):
    nx, ny = st.nx, st.ny
    n_ex = nx * (ny - 1)
    curl_ex, curl_ey, div_ex, div_ey, grad_ex, grad_ey, _, _ = _operators(st)
    ex_i, ey_i = vec[:n_ex], vec[n_ex:]
    nodes = st.x_nodes
    e_ex = st.eps_ex[:, 1:-1].ravel()
    e_ey = st.eps_ey[nodes, :].ravel()
    d = div_ex @ (e_ex * ex_i) + div_ey @ (e_ey * ey_i)
    ez_i = 1j * d / (n_eff * st.eps_ez[nodes, 1:-1].ravel())
    # H' = Z0 H from the curl of E, lengths scaled by k0
    hx_i = -1j * (grad_ey @ ez_i) - n_eff * ey_i
    hy_i = n_eff * ex_i + 1j * (grad_ex @ ez_i)
    hz = -1j * (curl_ex @ ex_i + curl_ey @ ey_i)

    nxn = st.dx_n2c.shape[1]
    Ex = np.zeros((nx, ny + 1), complex)
    Ex[:, 1:-1] = ex_i.reshape(nx, ny - 1)
    Ey = np.zeros((nx + 1, ny), complex)
    Ey[nodes, :] = ey_i.reshape(nxn, ny)
    Ez = np.zeros((nx + 1, ny + 1), complex)
    Ez[nodes, 1:-1] = ez_i.reshape(nxn, ny - 1)
    Hx = np.zeros((nx + 1, ny), complex)
    Hx[nodes, :] = hx_i.reshape(nxn, ny) / Z0
    Hy = np.zeros((nx, ny + 1), complex)
    Hy[:, 1:-1] = hy_i.reshape(nx, ny - 1) / Z0
    Hz = hz.reshape(nx, ny) / Z0
    return Ex, Ey, Ez, Hx, Hy, Hz


def _unfold(fields, even_ex: bool):
    """Mirror half-domain fields (left wall at the symmetry plane) onto the
    full domain. Cell-located arrays are stacked, node-located arrays share
    the plane column."""
    s = 1.0 if even_ex else -1.0
    Ex, Ey, Ez, Hx, Hy, Hz = fields

    def cells(a, sign):
        return np.concatenate([sign * a[::-1], a], axis=0)

    def nodes(a, sign):
        return np.concatenate([sign * a[:0:-1], a], axis=0)

    # E is polar, H axial: Ex and Hy/Hz flip parity relative to Ey, Ez, Hx
    return (
        cells(Ex, s),
        nodes(Ey, -s),
        nodes(Ez, -s),
        nodes(Hx, -s),
        cells(Hy, s),
        cells(Hz, s),
    )


Symmetry = Optional[str]  # None, "even" (Ex even in x) or "odd"


def _half_map(eps_map: PermittivityMap) -> PermittivityMap:
    mesh = eps_map.mesh
    x = mesh.x_lines
    centre = 0.5 * (x[0] + x[-1])
    i0 = int(np.argmin(np.abs(x - centre)))
    scale = max(abs(x[0]), abs(x[-1]), mesh.domain_width)
    if 2 * i0 != mesh.nx or not np.allclose(x[i0] - x[:i0][::-1], x[i0 + 1 :] - x[i0], atol=1e-9 * scale):
        raise ValueError("symmetric solve needs a mesh mirror-symmetric about its centre line")
    for arr in (eps_map.eps, eps_map.eps_xx, eps_map.eps_yy):
        if not np.allclose(arr[:i0][::-1], arr[i0:]):
            raise ValueError("symmetric solve needs a permittivity map mirror-symmetric in x")
    half = MeshSpec(x[i0:], mesh.y_lines)
    return PermittivityMap(half, eps_map.eps[i0:], eps_map.eps_xx[i0:], eps_map.eps_yy[i0:])


def solve_modes(
    eps_map: PermittivityMap,
    wavelength: float,
    settings: SolveSettings = SolveSettings(),
    symmetry: Symmetry = None,
) -> list[Mode]:
    """Eigenmodes with the largest effective indices, sorted descending.

    ``symmetry`` restricts the search to one mirror parity of a map that is
    symmetric about its vertical centre line: ``"even"`` keeps modes with
    ``Ex`` even in x (the quasi-TE family, electric wall on the plane),
    ``"odd"`` the complementary family (magnetic wall). Only half the
    domain is solved; returned modes live on the full mesh.

    Every returned mode has ``guided`` set when ``n_eff > n_clad``.

    Raises
    ------
    NoGuidedMode
        If no eigenvalue exceeds ``n_clad**2``.
    NotConverged
        If ARPACK exhausts ``max_iterations``.
    """
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    if symmetry not in (None, "even", "odd"):
        raise ValueError(f"unknown symmetry {symmetry!r}")
    n_clad = eps_map.n_clad
    if eps_map.n_max <= n_clad + 1e-12:
        raise NoGuidedMode("uniform index map supports no guided mode")
    k0 = 2 * np.pi / wavelength
    work_map = eps_map if symmetry is None else _half_map(eps_map)
    st = _staggered(work_map, k0, open_left=symmetry == "odd")
    A = _assemble(st)
    n_unknowns = A.shape[0]
    k = min(settings.n_modes_requested, n_unknowns - 2)
    sigma = settings.eigen_shift if settings.eigen_shift is not None else eps_map.n_max**2
    v0 = np.random.default_rng(settings.seed).standard_normal(n_unknowns)
    try:
        vals, vecs = eigs(
            A,
            k=k,
            sigma=sigma,
            which="LM",
            v0=v0,
            # ARPACK's tolerance applies to the shift-inverted operator; a
            # tighter one keeps the residual of A itself below convergence_tol
            tol=settings.convergence_tol * 1e-4,
            maxiter=settings.max_iterations,
        )
    except ArpackNoConvergence as exc:
        raise NotConverged(f"ARPACK did not converge in {settings.max_iterations} iterations") from exc

    vals = np.real(vals)
    vecs = np.real(vecs)
    modes = []
    for lam, vec in zip(vals, vecs.T):
        if lam <= 0:
            continue
        resid = float(np.linalg.norm(A @ vec - lam * vec) / np.linalg.norm(vec))
        n_eff = float(np.sqrt(lam))
        fields = _reconstruct(st, vec, n_eff)
        if symmetry is not None:
            fields = _unfold(fields, even_ex=symmetry == "even")
        # deterministic sign and scale: largest |E_t| sample is +1 V/m
        peak = np.concatenate([fields[0].ravel(), fields[1].ravel()])
        ref = peak[np.argmax(np.abs(peak))]
        fields = [f / ref for f in fields]
        modes.append(Mode(n_eff, wavelength, eps_map, *fields, residual=resid, guided=n_eff > n_clad))
    modes = _ordered(modes, settings.convergence_tol)
    if not any(m.guided for m in modes):
        raise NoGuidedMode(
            f"no eigenvalue above the cladding index {n_clad:.4f} "
            f"(largest n_eff {max((m.n_eff for m in modes), default=float('nan')):.4f})"
        )
    log.debug("solved %d modes, n_eff=%s", len(modes), [round(m.n_eff, 6) for m in modes])
    return modes


def _ex_energy(mode: Mode) -> float:
    mesh = mode.mesh
    return float(np.sum(np.abs(mode.Ex) ** 2 * np.outer(mesh.dx, _dual(mesh.dy))))


def _ordered(modes: Sequence[Mode], tol: float) -> list[Mode]:
    # n_eff within tol counts as a tie, broken by descending Ex energy
    out = sorted(modes, key=lambda m: -m.n_eff)
    for i in range(1, len(out)):
        j = i
        while j > 0 and abs(out[j].n_eff - out[j - 1].n_eff) <= tol * out[j].n_eff:
            if _ex_energy(out[j]) > _ex_energy(out[j - 1]):
                out[j], out[j - 1] = out[j - 1], out[j]
                j -= 1
            else:
                break
    return out


def fundamental_quasi_te(modes: Iterable[Mode]) -> Mode:
    """Highest-index guided mode whose transverse E energy is mostly ``Ex``."""
    modes = list(modes)
    if not modes:
        raise ValueError("mode list is empty")
    candidates = [m for m in modes if m.guided and m.is_quasi_te]
    if not candidates:
        raise NoQuasiTeMode("no guided mode is Ex-dominant")
    return max(candidates, key=lambda m: (m.n_eff, _ex_energy(m)))


def normalize_power(mode: Mode, power: float) -> Mode:
    """Rescale so the axial Poynting flux equals ``power`` watts."""
    if not power > 0:
        raise ValueError("power must be positive")
    flux = mode.flux()
    if not flux > 0:
        raise ZeroField("mode carries no forward power")
    return mode.scaled(np.sqrt(power / flux), normalization="power", power=power)


def count_guided(modes: Iterable[Mode], n_clad: float, family: str = "all") -> int:
    """Number of modes above the cladding index.

    ``family="quasi_te"`` counts only Ex-dominant modes; this is the count
    that decides whether a design is single-moded, since the fundamental
    quasi-TM mode of a symmetric slot guide has no cutoff.
    """
    if family not in ("all", "quasi_te"):
        raise ValueError(f"unknown family {family!r}")
    return sum(
        1 for m in modes if m.n_eff > n_clad and (family == "all" or m.is_quasi_te)
    )

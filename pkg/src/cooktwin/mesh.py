"""Structured orthogonal quarter-symmetry grid with boundary inflation.

The physical cuboid is cut along its two vertical symmetry planes; the
grid covers one quarter: x in [0, L/2], y in [0, W/2], z in [0, H].
Patch names:

    bottom      z = 0 plane (contact side)
    surface     z = H plane plus the two outer side walls (exposed to air)
    symmetry_x  x = 0 plane (zero flux)
    symmetry_y  y = 0 plane (zero flux)

Inflation layers (geometric growth from the first-layer height up to the
interior spacing) are placed against bottom/surface patch faces only;
symmetry planes get uniform spacing.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import MeshError

# patch -> list of (axis, side) box faces; side 0 = low end, 1 = high end
PATCH_FACES = {
    "bottom": ((2, 0),),
    "surface": ((0, 1), (1, 1), (2, 1)),
    "symmetry_x": ((0, 0),),
    "symmetry_y": ((1, 0),),
}


@dataclass(frozen=True)
class MeshSpec:
    """Grid recipe for the quarter cuboid.

    cuboid_dims are the FULL cuboid dimensions (L, W, H) in metres; the
    built grid spans (L/2, W/2, H).
    """

    cuboid_dims: tuple[float, float, float] = (0.070, 0.040, 0.030)
    spacing: float = 5.0e-4             # interior cell size h
    inflation_layers: int = 10
    first_layer_height: float = 1.0e-4

    def __post_init__(self):
        if any(d <= 0.0 for d in self.cuboid_dims):
            raise MeshError("cuboid dimensions must be positive")
        if self.spacing <= 0.0:
            raise MeshError("interior spacing must be positive")
        if self.inflation_layers < 0:
            raise MeshError("inflation layer count must be >= 0")
        if self.inflation_layers > 0 and not (
                0.0 < self.first_layer_height <= self.spacing):
            raise MeshError("first layer height must lie in (0, spacing]")
        stack = _inflation_widths(self).sum()
        if stack >= min(self.quarter_dims) / 2.0:
            raise MeshError(
                f"inflation stack ({stack:.3e} m) exceeds half the smallest "
                "domain extent; reduce layers or grow the domain")

    @property
    def quarter_dims(self):
        L, W, H = self.cuboid_dims
        return (L / 2.0, W / 2.0, H)

    def refined(self, spacing):
        """Same domain and inflation recipe at a different interior spacing."""
        return MeshSpec(self.cuboid_dims, spacing, self.inflation_layers,
                        min(self.first_layer_height, spacing))


def _inflation_widths(spec):
    """Layer thicknesses growing geometrically from h1 toward h."""
    n = spec.inflation_layers
    if n == 0:
        return np.zeros(0)
    h1 = spec.first_layer_height
    if n == 1:
        return np.array([h1])
    growth = (spec.spacing / h1) ** (1.0 / (n - 1))
    return h1 * growth ** np.arange(n)


def _axis_faces(extent, spec, inflate_low, inflate_high):
    widths_low = _inflation_widths(spec) if inflate_low else np.zeros(0)
    widths_high = _inflation_widths(spec)[::-1] if inflate_high else np.zeros(0)
    core = extent - widths_low.sum() - widths_high.sum()
    if core <= 0.0:
        raise MeshError("inflation stacks exceed the domain extent")
    n_core = max(1, round(core / spec.spacing))
    widths = np.concatenate([widths_low,
                             np.full(n_core, core / n_core),
                             widths_high])
    faces = np.concatenate([[0.0], np.cumsum(widths)])
    faces[-1] = extent  # kill cumulative-sum roundoff on the far face
    return faces


@dataclass(frozen=True)
class StructuredMesh:
    """Axis-aligned cell-centred grid. Immutable once built."""

    spec: MeshSpec
    faces: tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def shape(self):
        return tuple(len(f) - 1 for f in self.faces)

    @property
    def n_cells(self):
        nx, ny, nz = self.shape
        return nx * ny * nz

    @property
    def centers(self):
        return tuple(0.5 * (f[1:] + f[:-1]) for f in self.faces)

    @property
    def widths(self):
        return tuple(np.diff(f) for f in self.faces)

    @property
    def extents(self):
        return tuple(f[-1] for f in self.faces)

    def cell_volumes(self):
        dx, dy, dz = self.widths
        return dx[:, None, None] * dy[None, :, None] * dz[None, None, :]

    def total_volume(self):
        return float(np.prod([f[-1] for f in self.faces]))

    def contains(self, position):
        return all(0.0 <= p <= e for p, e in zip(position, self.extents))


def build_quarter_cuboid(spec: MeshSpec) -> StructuredMesh:
    """Build the quarter grid; inflation against bottom/surface faces."""
    ex, ey, ez = spec.quarter_dims
    fx = _axis_faces(ex, spec, inflate_low=False, inflate_high=True)
    fy = _axis_faces(ey, spec, inflate_low=False, inflate_high=True)
    fz = _axis_faces(ez, spec, inflate_low=True, inflate_high=True)
    return StructuredMesh(spec, (fx, fy, fz))


def probe_value(mesh: StructuredMesh, field: np.ndarray, position) -> float:
    """Trilinear sample of a cell-centred field at a point.

    Exact for fields affine in the coordinates. Between a boundary face
    and the first cell centre the interpolation clamps to the boundary
    cell value (no extrapolation).
    """
    if field.shape != mesh.shape:
        raise MeshError(f"field shape {field.shape} != mesh shape {mesh.shape}")
    if not mesh.contains(position):
        raise MeshError(f"probe position {tuple(position)} outside the domain")
    idx, weights = [], []
    for p, centers in zip(position, mesh.centers):
        i = int(np.searchsorted(centers, p)) - 1
        if i < 0:
            i, w = 0, 0.0
        elif i >= len(centers) - 1:
            i, w = len(centers) - 2, 1.0
        else:
            w = (p - centers[i]) / (centers[i + 1] - centers[i])
        if len(centers) == 1:
            i, w = 0, 0.0
        idx.append(i)
        weights.append(w)
    value = 0.0
    for cx in (0, 1):
        for cy in (0, 1):
            for cz in (0, 1):
                wx = weights[0] if cx else 1.0 - weights[0]
                wy = weights[1] if cy else 1.0 - weights[1]
                wz = weights[2] if cz else 1.0 - weights[2]
                ix = min(idx[0] + cx, mesh.shape[0] - 1)
                iy = min(idx[1] + cy, mesh.shape[1] - 1)
                iz = min(idx[2] + cz, mesh.shape[2] - 1)
                value += wx * wy * wz * field[ix, iy, iz]
    return float(value)


@dataclass(frozen=True)
class ProbeSet:
    """Named measurement positions inside the quarter domain."""

    positions: dict = field(default_factory=dict)

    def validate(self, mesh: StructuredMesh):
        for name, pos in self.positions.items():
            if not mesh.contains(pos):
                raise MeshError(f"probe {name!r} at {tuple(pos)} outside domain")

    def sample(self, mesh, field):
        return {name: probe_value(mesh, field, pos)
                for name, pos in self.positions.items()}


def default_probes(spec: MeshSpec, probe_height: float = 0.015) -> ProbeSet:
    """Standard probe layout.

    core     centre of the full cuboid (on both symmetry planes)
    surface  1 mm below the top face, above the core
    probe_c  mid-length on the long symmetry plane, probe_height above bottom
    probe_d  on the cuboid axis, probe_height above bottom
    """
    ex, _, ez = spec.quarter_dims
    h = min(probe_height, ez)
    return ProbeSet({
        "core": (0.0, 0.0, ez / 2.0),
        "surface": (0.0, 0.0, max(ez - 1.0e-3, 0.0)),
        "probe_c": (ex / 2.0, 0.0, h),
        "probe_d": (0.0, 0.0, h),
    })

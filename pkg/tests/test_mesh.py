import numpy as np
import pytest

from cooktwin.errors import MeshError
from cooktwin.mesh import (MeshSpec, build_quarter_cuboid, default_probes,
                           probe_value)


def test_uniform_quarter_counts():
    spec = MeshSpec(cuboid_dims=(0.070, 0.040, 0.030), spacing=5e-4,
                    inflation_layers=0)
    mesh = build_quarter_cuboid(spec)
    assert mesh.shape == (70, 40, 60)


def test_volume_partition_is_quarter_of_cuboid():
    for n in (0, 10):
        spec = MeshSpec(inflation_layers=n)
        mesh = build_quarter_cuboid(spec)
        total = float(np.sum(mesh.cell_volumes()))
        expected = 0.070 * 0.040 * 0.030 / 4.0
        assert abs(total - expected) / expected < 1e-12


def test_first_layer_height_honoured():
    spec = MeshSpec(spacing=5e-4, inflation_layers=10, first_layer_height=1e-4)
    mesh = build_quarter_cuboid(spec)
    dz = mesh.widths[2]
    assert dz[0] == pytest.approx(1e-4, rel=1e-12)      # bottom patch
    assert dz[-1] == pytest.approx(1e-4, rel=1e-9)      # top surface patch
    dx = mesh.widths[0]
    assert dx[-1] == pytest.approx(1e-4, rel=1e-9)      # outer side wall
    # symmetry side stays uniform
    assert dx[0] == pytest.approx(spec.spacing, rel=0.02)
    # geometric growth toward the interior spacing
    assert np.all(np.diff(dz[:10]) > 0.0)


def test_refinement_consistency():
    coarse = build_quarter_cuboid(MeshSpec(spacing=2e-3, inflation_layers=0))
    fine = build_quarter_cuboid(MeshSpec(spacing=1e-3, inflation_layers=0))
    for nc, nf in zip(coarse.shape, fine.shape):
        assert abs(nf - 2 * nc) <= 1
    assert abs(fine.n_cells - 8 * coarse.n_cells) <= fine.n_cells * 0.2


def test_positive_volumes_and_orthogonality():
    mesh = build_quarter_cuboid(MeshSpec(spacing=1.5e-3, inflation_layers=4,
                                         first_layer_height=4e-4))
    assert np.all(mesh.cell_volumes() > 0.0)
    for w in mesh.widths:
        assert np.all(w > 0.0)


def test_rejects_overgrown_inflation():
    with pytest.raises(MeshError):
        MeshSpec(cuboid_dims=(0.02, 0.012, 0.012), spacing=2e-3,
                 inflation_layers=8, first_layer_height=1e-3)


def test_spec_validation():
    with pytest.raises(MeshError):
        MeshSpec(cuboid_dims=(0.0, 0.04, 0.03))
    with pytest.raises(MeshError):
        MeshSpec(spacing=-1e-3)
    with pytest.raises(MeshError):
        MeshSpec(inflation_layers=-1)
    with pytest.raises(MeshError):
        MeshSpec(first_layer_height=2e-3, spacing=1e-3, inflation_layers=3)


@pytest.fixture
def small_mesh():
    return build_quarter_cuboid(
        MeshSpec(cuboid_dims=(0.02, 0.016, 0.012), spacing=1.2e-3,
                 inflation_layers=2, first_layer_height=6e-4))


def test_probe_uniform_field(small_mesh):
    field = np.full(small_mesh.shape, 7.25)
    for pos in [(0.0, 0.0, 0.006), (0.01, 0.008, 0.012), (0.002, 0.0, 0.0)]:
        assert probe_value(small_mesh, field, pos) == pytest.approx(7.25)


def test_probe_reproduces_cell_center_coordinate(small_mesh):
    xc = small_mesh.centers[0]
    field = np.broadcast_to(xc[:, None, None], small_mesh.shape).copy()
    pos = (xc[3], small_mesh.centers[1][2], small_mesh.centers[2][1])
    assert probe_value(small_mesh, field, pos) == pytest.approx(xc[3], rel=1e-12)


def test_probe_affine_reproduction(small_mesh):
    xc, yc, zc = small_mesh.centers
    field = (2.0 * xc[:, None, None] + 3.0 * yc[None, :, None]
             + 1.0 * zc[None, None, :]) + np.zeros(small_mesh.shape)
    # interior point well inside the cell-centre hull
    pos = (0.009, 0.0071, 0.0052)
    expected = 2.0 * pos[0] + 3.0 * pos[1] + 1.0 * pos[2]
    assert probe_value(small_mesh, field, pos) == pytest.approx(expected,
                                                                abs=1e-12)


def test_probe_outside_domain_rejected(small_mesh):
    field = np.zeros(small_mesh.shape)
    with pytest.raises(MeshError):
        probe_value(small_mesh, field, (0.05, 0.0, 0.0))
    with pytest.raises(MeshError):
        probe_value(small_mesh, field, (0.0, -1e-4, 0.0))


def test_default_probes_inside_box():
    spec = MeshSpec()
    mesh = build_quarter_cuboid(spec)
    probes = default_probes(spec)
    probes.validate(mesh)
    assert probes.positions["core"] == (0.0, 0.0, 0.015)
    assert probes.positions["surface"][2] == pytest.approx(0.029)
    assert probes.positions["probe_c"][2] == pytest.approx(0.015)

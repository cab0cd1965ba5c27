import numpy as np
import pytest

from morphchain.materials import (
    DensityField,
    MaterialPair,
    Mesh,
    _bilinear,
    density_to_mesh,
    export_stl,
    extract_interface,
    extrude_to_mesh,
    interpolate_property,
    parse_stl,
)


def test_interpolation_endpoints_exact():
    for p in (1.0, 2.0, 3.0):
        pair = MaterialPair(psi1=7.5, psi2=-2.25, penalization_p=p)
        assert interpolate_property(pair, 0.0) == 7.5
        assert interpolate_property(pair, 1.0) == -2.25


def test_interpolation_midpoint_with_penalization():
    pair = MaterialPair(psi1=2.0, psi2=10.0, penalization_p=3.0)
    assert abs(interpolate_property(pair, 0.5) - (2.0 + 0.125 * 8.0)) < 1e-15


def test_interpolation_monotone_for_increasing_properties():
    pair = MaterialPair(psi1=1.0, psi2=5.0, penalization_p=3.0)
    rho = np.linspace(0, 1, 101)
    vals = interpolate_property(pair, rho)
    assert np.all(np.diff(vals) >= 0)


def test_interpolation_rejects_out_of_range():
    pair = MaterialPair(psi1=0.0, psi2=1.0)
    with pytest.raises(ValueError):
        interpolate_property(pair, 1.0001)
    with pytest.raises(ValueError):
        MaterialPair(psi1=0.0, psi2=1.0, penalization_p=0.5)


def test_constant_field_has_no_contour():
    field = DensityField(rho=np.full((4, 4), 0.3))
    assert extract_interface(field) == []


def test_half_split_contour_is_vertical_midline():
    rho = np.zeros((4, 4))
    rho[:, 2:] = 1.0
    contours = extract_interface(DensityField(rho=rho))
    assert len(contours) == 1
    c = contours[0]
    np.testing.assert_allclose(c[:, 0], 1.5)
    assert set(map(tuple, c)) == {(1.5, 0.0), (1.5, 1.0), (1.5, 2.0), (1.5, 3.0)}


def test_single_high_node_yields_one_closed_loop():
    rho = np.zeros((5, 5))
    rho[2, 2] = 1.0
    contours = extract_interface(DensityField(rho=rho))
    assert len(contours) == 1
    c = contours[0]
    assert np.array_equal(c[0], c[-1])  # closed
    # diamond through the four edge midpoints around the node
    assert set(map(tuple, c)) == {(1.5, 2.0), (2.0, 1.5), (2.5, 2.0), (2.0, 2.5)}


def test_contour_points_sit_on_the_level_set():
    rng = np.random.default_rng(3)
    field = DensityField(rho=rng.random((8, 9)))
    for c in extract_interface(field, level=0.5):
        for x, y in c:
            assert abs(_bilinear(field.rho, x, y) - 0.5) < 1e-9


def test_contour_orientation_keeps_high_side_left():
    rng = np.random.default_rng(4)
    field = DensityField(rho=rng.random((6, 6)))
    for c in extract_interface(field, level=0.5):
        for a, b in zip(c[:-1], c[1:]):
            mid = (a + b) / 2.0
            d = b - a
            n = np.array([-d[1], d[0]])
            n = n / np.linalg.norm(n) * 1e-5
            lo = np.clip(mid - n, 0, 5)
            hi = np.clip(mid + n, 0, 5)
            assert _bilinear(field.rho, *hi) >= _bilinear(field.rho, *lo)


def test_all_sixteen_cell_cases():
    # brute enumeration of corner patterns on a single cell: segment counts
    # and on-level endpoints for every case
    for case in range(16):
        corners = [(case >> k) & 1 for k in range(4)]  # (0,0),(1,0),(1,1),(0,1)
        rho = np.array(
            [[corners[0], corners[1]], [corners[3], corners[2]]], dtype=float
        )
        field = DensityField(rho=rho)
        contours = extract_interface(field, level=0.5)
        n_segments = sum(len(c) - 1 for c in contours)
        inside = sum(corners)
        if inside in (0, 4):
            assert n_segments == 0
        elif case in (5, 10):  # saddles: center average 0.5 >= level
            assert n_segments == 2
        else:
            assert n_segments == 1
        for c in contours:
            for x, y in c:
                assert abs(_bilinear(rho, x, y) - 0.5) < 1e-12


def test_saddle_disambiguation_by_center_average():
    # high corners on one diagonal; center mean 0.4 < 0.5: two islands
    rho = np.array([[0.8, 0.0], [0.0, 0.8]])
    contours = extract_interface(DensityField(rho=rho))
    assert len(contours) == 2
    # raising the corners makes the center connect into a single band
    rho2 = np.array([[1.0, 0.2], [0.2, 1.0]])
    contours2 = extract_interface(DensityField(rho=rho2))
    assert len(contours2) == 2  # still two polylines, but crossing sides swap
    all_pts = {tuple(p) for c in contours2 for p in c}
    assert all_pts != {tuple(p) for c in contours for p in c}


def test_full_rectangle_extrudes_to_a_box():
    mesh = extrude_to_mesh([], (0.0, 0.0, 3.0, 3.0), depth=2.0)
    assert len(mesh.faces) == 12
    assert mesh.is_watertight()
    np.testing.assert_allclose(mesh.signed_volume(), 18.0, rtol=1e-12)


def test_half_split_mesh_volume():
    rho = np.zeros((4, 4))
    rho[:, 2:] = 1.0
    field = DensityField(rho=rho)
    mesh = density_to_mesh(field, depth=2.0)
    area = 3.0 * 3.0
    np.testing.assert_allclose(mesh.signed_volume(), 0.5 * area * 2.0, rtol=1e-9)
    assert mesh.is_watertight()


def test_island_and_complement_volumes():
    rho = np.zeros((5, 5))
    rho[2, 2] = 1.0
    field = DensityField(rho=rho)
    m2 = density_to_mesh(field, depth=1.0, phase=2)
    m1 = density_to_mesh(field, depth=1.0, phase=1)
    np.testing.assert_allclose(m2.signed_volume(), 0.5, rtol=1e-9)
    np.testing.assert_allclose(m1.signed_volume(), 16.0 - 0.5, rtol=1e-9)
    assert m2.is_watertight() and m1.is_watertight()


def test_euler_characteristic_of_closed_components():
    def euler(mesh):
        v = len(mesh.vertices)
        e = len({tuple(sorted(p)) for f in mesh.faces
                 for p in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))})
        return v - e + len(mesh.faces)

    box = extrude_to_mesh([], (0, 0, 2, 2), depth=1.0)
    assert euler(box) == 2
    rho = np.zeros((4, 4))
    rho[:, 2:] = 1.0
    half = density_to_mesh(DensityField(rho=rho), depth=2.0)
    assert euler(half) == 2


def test_cell_size_scales_geometry():
    rho = np.zeros((4, 4))
    rho[:, 2:] = 1.0
    field = DensityField(rho=rho, cell_size=2.5)
    c = extract_interface(field)[0]
    np.testing.assert_allclose(c[:, 0], 1.5 * 2.5)
    mesh = density_to_mesh(field, depth=1.0)
    np.testing.assert_allclose(mesh.signed_volume(), 0.5 * 7.5 * 7.5, rtol=1e-9)


def test_self_intersecting_contour_rejected():
    bowtie = np.array([[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0]])
    with pytest.raises(ValueError):
        extrude_to_mesh([bowtie], (0, 0, 2, 2), depth=1.0)
    outside = np.array([[0.0, 0.0], [5.0, 5.0]])
    with pytest.raises(ValueError):
        extrude_to_mesh([outside], (0, 0, 2, 2), depth=1.0)


def test_random_fields_partition_the_volume():
    # the two phases tile the bounding box: volumes sum to the full slab
    # and both meshes are watertight
    rng = np.random.default_rng(123)
    for _ in range(10):
        ny, nx = rng.integers(3, 8, size=2)
        field = DensityField(rho=rng.random((ny, nx)), cell_size=1.0)
        total = (nx - 1) * (ny - 1) * 1.5
        m1 = density_to_mesh(field, depth=1.5, phase=1)
        m2 = density_to_mesh(field, depth=1.5, phase=2)
        assert m1.is_watertight() and m2.is_watertight()
        np.testing.assert_allclose(
            m1.signed_volume() + m2.signed_volume(), total, rtol=1e-9
        )


def test_stl_box_is_684_bytes_and_round_trips():
    mesh = extrude_to_mesh([], (0, 0, 3, 3), depth=2.0)
    data = export_stl(mesh)
    assert len(data) == 80 + 4 + 12 * 50 == 684
    tris = parse_stl(data)
    np.testing.assert_array_equal(
        tris, mesh.vertices[mesh.faces].astype(np.float32)
    )


def test_stl_volume_matches_analytic_for_axis_aligned_region():
    # small integer-valued coordinates survive the float32 STL round trip
    # exactly, so the signed-tetrahedra volume of the exported bytes is exact
    rho = np.zeros((4, 4))
    rho[:, 2:] = 1.0
    mesh = density_to_mesh(DensityField(rho=rho), depth=2.0)
    tris = parse_stl(export_stl(mesh)).astype(np.float64)
    vol = np.sum(np.linalg.det(tris)) / 6.0
    np.testing.assert_allclose(vol, 0.5 * 9.0 * 2.0, rtol=1e-9)


def test_stl_empty_mesh():
    empty = Mesh(vertices=np.zeros((0, 3)), faces=np.zeros((0, 3), int))
    data = export_stl(empty)
    assert len(data) == 84
    assert parse_stl(data).shape == (0, 3, 3)


def test_stl_rejects_non_finite():
    mesh = Mesh(vertices=[[0, 0, 0], [1, 0, 0], [0, np.nan, 0]], faces=[[0, 1, 2]])
    with pytest.raises(ValueError):
        export_stl(mesh)


def test_stl_parse_rejects_truncation():
    mesh = extrude_to_mesh([], (0, 0, 1, 1), depth=1.0)
    data = export_stl(mesh)
    with pytest.raises(ValueError):
        parse_stl(data[:-10])


def test_density_field_validation():
    with pytest.raises(ValueError):
        DensityField(rho=np.array([[0.5, 1.5], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        DensityField(rho=np.zeros((1, 5)))
    with pytest.raises(ValueError):
        DensityField(rho=np.zeros((3, 3)), cell_size=0.0)


def test_density_csv_round_trip(tmp_path):
    rho = np.round(np.random.default_rng(1).random((3, 4)), 6)
    path = tmp_path / "field.csv"
    np.savetxt(path, rho, delimiter=",", fmt="%.6f")
    with open(path) as f:
        field = DensityField.from_csv(f, cell_size=0.5)
    assert field.nx == 4 and field.ny == 3
    np.testing.assert_allclose(field.rho, rho)

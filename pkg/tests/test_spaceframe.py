import numpy as np
import pytest

from morphchain.spaceframe import FrameProperties, assemble_frame, solve_sag

# force unit conversion used by the module: N per g*mm/s^2
MICRO = 1e-6

PROPS = FrameProperties(
    youngs_modulus=10.0,  # MPa, rubbery polymer scale
    shear_modulus=3.6,
    density=1.15e-3,  # g/mm^3
)


def straight_nodes(n_segments: int, length: float = 130.0) -> np.ndarray:
    x = np.linspace(0.0, length, n_segments + 1)
    return np.stack([x, np.zeros_like(x), np.zeros_like(x)], axis=1)


def test_axial_stiffness_entry():
    nodes = np.array([[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]])
    K, _ = assemble_frame(nodes, PROPS)
    ea_over_l = PROPS.youngs_modulus * PROPS.area / 10.0
    np.testing.assert_allclose(K[0, 0], ea_over_l)
    np.testing.assert_allclose(K[0, 6], -ea_over_l)


def test_assembled_matrix_is_symmetric():
    rng = np.random.default_rng(42)
    nodes = np.cumsum(rng.uniform(-1, 1, size=(12, 3)) + [10, 0, 0], axis=0)
    nodes = np.vstack([[0.0, 0.0, 0.0], nodes])
    K, _ = assemble_frame(nodes, PROPS)
    assert np.max(np.abs(K - K.T)) < 1e-9 * np.max(np.abs(K))


def test_zero_density_means_zero_load():
    props = FrameProperties(youngs_modulus=10.0, shear_modulus=3.6, density=0.0)
    _, f = assemble_frame(straight_nodes(5), props)
    np.testing.assert_array_equal(f, 0.0)


def test_coincident_nodes_rejected():
    nodes = np.array([[0.0, 0.0, 0.0], [10.0, 0.0, 0.0], [10.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        assemble_frame(nodes, PROPS)


def test_zero_gravity_displacement_is_exactly_zero():
    props = FrameProperties(
        youngs_modulus=10.0, shear_modulus=3.6, density=1.15e-3,
        gravity=(0.0, 0.0, 0.0),
    )
    sol = solve_sag(straight_nodes(13), props)
    np.testing.assert_array_equal(sol.dof_vector, 0.0)
    np.testing.assert_array_equal(sol.displaced_nodes, straight_nodes(13))


def test_tip_point_load_matches_cantilever_theory():
    # Hermite beam elements reproduce end-loaded cantilevers exactly
    props = FrameProperties(
        youngs_modulus=10.0, shear_modulus=3.6, density=0.0,
        gravity=(0.0, 0.0, 0.0),
    )
    n, L = 13, 130.0
    nodes = straight_nodes(n, L)
    P = 1e-3  # N, downward at the tip
    loads = np.zeros((n + 1, 6))
    loads[-1, 2] = -P
    sol = solve_sag(nodes, props, extra_node_loads=loads)
    expected = -P * L**3 / (3.0 * props.youngs_modulus * props.I_y)
    np.testing.assert_allclose(sol.dof_vector[-1, 2], expected, rtol=1e-6)


def _self_weight_tip_deflection(n_segments: int) -> tuple[float, float]:
    L = 130.0
    sol = solve_sag(straight_nodes(n_segments, L), PROPS)
    q = PROPS.density * PROPS.area * 9810.0 * MICRO  # N/mm
    analytic = -q * L**4 / (8.0 * PROPS.youngs_modulus * PROPS.I_y)
    return float(sol.dof_vector[-1, 2]), analytic


def test_self_weight_matches_distributed_load_theory_within_2pct():
    tip, analytic = _self_weight_tip_deflection(13)
    assert abs(tip - analytic) / abs(analytic) < 0.02


def test_self_weight_error_shrinks_monotonically_under_refinement():
    errs = []
    for n in (13, 26, 52):
        tip, analytic = _self_weight_tip_deflection(n)
        errs.append(abs(tip - analytic) / abs(analytic))
    assert errs[0] > errs[1] > errs[2]


def test_linearity_in_modulus():
    sol1 = solve_sag(straight_nodes(8), PROPS)
    stiff = FrameProperties(
        youngs_modulus=2 * PROPS.youngs_modulus,
        shear_modulus=2 * PROPS.shear_modulus,
        density=PROPS.density,
    )
    sol2 = solve_sag(straight_nodes(8), stiff)
    np.testing.assert_allclose(sol2.dof_vector, sol1.dof_vector / 2.0, rtol=1e-12)


def test_reduced_system_positive_definite_on_knot_geometry():
    from morphchain.kinematics import ActivationProfile, Sequence, forward_kinematics, reflect_about_root

    seq = Sequence.from_letters("dbbbbbbbbbbbdf")
    half, _ = forward_kinematics(seq, ActivationProfile(), 1.0)
    full = reflect_about_root(half)
    K, _ = assemble_frame(full, PROPS)
    reduced = K[6:, 6:]
    # cholesky succeeds only for SPD matrices
    np.linalg.cholesky(reduced)
    sol = solve_sag(full, PROPS)
    # root stays clamped
    np.testing.assert_array_equal(sol.dof_vector[0], 0.0)


def test_root_clamp_is_first_node():
    sol = solve_sag(straight_nodes(5), PROPS)
    np.testing.assert_array_equal(sol.dof_vector[0], 0.0)
    assert np.any(sol.dof_vector[1:] != 0.0)


def test_properties_validation():
    with pytest.raises(ValueError):
        FrameProperties(youngs_modulus=0.0, shear_modulus=1.0, density=0.0)
    with pytest.raises(ValueError):
        FrameProperties(youngs_modulus=1.0, shear_modulus=1.0, density=-1.0)

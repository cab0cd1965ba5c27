import numpy as np
import pytest

from morphchain.target import (
    AnchorSet,
    IdealCurve,
    arc_length,
    arc_matched_midpoint_node,
    ideal_anchors,
    ideal_derivative,
    ideal_point,
    ideal_tangent,
    sample_curve,
)

CURVE = IdealCurve()


def _mp_point(t):
    """Independent high-precision evaluation of the curve."""
    import mpmath as mp

    mp.mp.dps = 40
    a, b = mp.mpf("11.47"), mp.mpf("4.13")
    t = mp.mpf(t)
    return np.array(
        [
            float(a * (mp.sin(t) + 2 * mp.sin(2 * t))),
            float(a * (mp.cos(t) - 2 * mp.cos(2 * t))),
            float(b * (-mp.sin(3 * t))),
        ]
    )


def test_point_at_zero():
    np.testing.assert_allclose(ideal_point(CURVE, 0.0), [0.0, -11.47, 0.0], atol=1e-15)


def test_point_at_range_end_frozen_oracle():
    # 50-digit evaluation of the curve at t = 3*pi/4
    np.testing.assert_allclose(
        ideal_point(CURVE, CURVE.t_max),
        [-14.829485219790300, -8.110514780209700, -2.920351006300441],
        rtol=1e-14,
    )


def test_agreement_with_high_precision_oracle():
    rng = np.random.default_rng(17)
    for t in rng.uniform(CURVE.t_min, CURVE.t_max, size=100):
        p = ideal_point(CURVE, t)
        q = _mp_point(t)
        np.testing.assert_allclose(p, q, rtol=1e-12, atol=1e-12)


def test_antisymmetry():
    rng = np.random.default_rng(4)
    for t in rng.uniform(0, CURVE.t_max, size=100):
        p, m = ideal_point(CURVE, t), ideal_point(CURVE, -t)
        assert abs(p[0] + m[0]) < 1e-12 * max(1, abs(p[0]))
        assert abs(p[1] - m[1]) < 1e-12 * max(1, abs(p[1]))
        assert abs(p[2] + m[2]) < 1e-12 * max(1, abs(p[2]))


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        ideal_point(CURVE, CURVE.t_max + 0.1)
    with pytest.raises(ValueError):
        ideal_point(CURVE, CURVE.t_min - 0.1)


def test_tangent_at_zero():
    phi, theta = ideal_tangent(CURVE, 0.0)
    d = ideal_derivative(CURVE, 0.0)
    np.testing.assert_allclose(d, [5 * 11.47, 0.0, -3 * 4.13], atol=1e-12)
    assert phi == 0.0
    assert 0 <= theta <= np.pi


def test_zero_direction_rejected():
    from morphchain.target import direction_angles

    with pytest.raises(ValueError):
        direction_angles(np.zeros(3))


def test_tangent_angles_in_spherical_range():
    rng = np.random.default_rng(9)
    for t in rng.uniform(CURVE.t_min, CURVE.t_max, size=100):
        phi, theta = ideal_tangent(CURVE, t)
        assert -np.pi < phi <= np.pi
        assert 0.0 <= theta <= np.pi


def test_tangent_matches_finite_differences():
    h = 1e-6
    rng = np.random.default_rng(13)
    for t in rng.uniform(CURVE.t_min + 1e-3, CURVE.t_max - 1e-3, size=20):
        d = ideal_derivative(CURVE, t)
        fd = (ideal_point(CURVE, t + h) - ideal_point(CURVE, t - h)) / (2 * h)
        np.testing.assert_allclose(
            d / np.linalg.norm(d), fd / np.linalg.norm(fd), rtol=0, atol=1e-6
        )


def test_finite_difference_error_shrinks_quadratically():
    t = 0.9
    d = ideal_derivative(CURVE, t)
    errs = []
    for h in (1e-3, 1e-4, 1e-5):
        fd = (ideal_point(CURVE, t + h) - ideal_point(CURVE, t - h)) / (2 * h)
        errs.append(np.linalg.norm(fd - d))
    assert errs[0] / errs[1] > 50  # ~100x per decade for central differences
    assert errs[1] / errs[2] > 50


def test_anchor_midpoint_parameter():
    a = ideal_anchors(CURVE, 12)
    t_mid = CURVE.t_max / 7.0
    assert abs(t_mid - 0.33659921288462070) < 1e-15
    np.testing.assert_allclose(a.midpoint, ideal_point(CURVE, t_mid), atol=1e-15)
    np.testing.assert_allclose(a.tip, ideal_point(CURVE, CURVE.t_max), atol=1e-15)
    # frozen high-precision values
    np.testing.assert_allclose(
        a.midpoint, [18.091156895265114, -7.108872409179628, -3.496970942812814],
        rtol=1e-14,
    )
    np.testing.assert_allclose(a.tip_phi, -1.7199025068223736, rtol=1e-14)
    np.testing.assert_allclose(a.tip_theta, 1.7299095472457268, rtol=1e-14)


def test_anchor_minimal_case_and_rejections():
    a = ideal_anchors(CURVE, 2)
    np.testing.assert_allclose(a.midpoint, ideal_point(CURVE, CURVE.t_max / 2.0))
    with pytest.raises(ValueError):
        ideal_anchors(CURVE, 13)  # odd
    with pytest.raises(ValueError):
        ideal_anchors(CURVE, 0)


def test_anchorset_validation():
    with pytest.raises(ValueError):
        AnchorSet(midpoint=np.zeros(3), tip=np.zeros(3), tip_phi=0.0, tip_theta=4.0)


def test_sample_curve_endpoints():
    t, pts = sample_curve(CURVE, 2)
    assert t[0] == CURVE.t_min and t[-1] == CURVE.t_max
    assert pts.shape == (2, 3)
    with pytest.raises(ValueError):
        sample_curve(CURVE, 1)


def test_arc_length_sanity():
    # half-knot arc computed independently with dense trapezoid integration
    ts = np.linspace(0.0, CURVE.t_max, 20001)
    speeds = np.linalg.norm(ideal_derivative(CURVE, ts), axis=1)
    ref = np.trapezoid(speeds, ts)
    assert abs(arc_length(CURVE, 0.0, CURVE.t_max) - ref) < 1e-6 * ref


def test_arc_matched_midpoint_node_stable_around_two():
    for n in range(10, 17):
        assert arc_matched_midpoint_node(CURVE, n) == 2


def test_curve_validation():
    with pytest.raises(ValueError):
        IdealCurve(coeff_xy=-1.0)
    with pytest.raises(ValueError):
        IdealCurve(t_min=2.0, t_max=1.0)

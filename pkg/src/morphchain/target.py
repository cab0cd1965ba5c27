"""Parametric target curve for the self-tying knot and its anchor points.

The target path is a trefoil-style space curve

    x = a (sin t + 2 sin 2t)
    y = a (cos t - 2 cos 2t)
    z = b (-sin 3t)

over a symmetric parameter interval. The positive-t branch is the
half-knot; the curve is its own image under (x, y, z) -> (-x, y, -z) with
t -> -t, which is what justifies designing only one half of the mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


@dataclass(frozen=True)
class IdealCurve:
    coeff_xy: float = 11.47
    coeff_z: float = 4.13
    t_min: float = -3.0 * np.pi / 4.0
    t_max: float = 3.0 * np.pi / 4.0

    def __post_init__(self):
        if not (self.coeff_xy > 0 and self.coeff_z > 0):
            raise ValueError("curve coefficients must be positive")
        if not self.t_min < self.t_max:
            raise ValueError("t_min must be below t_max")


@dataclass(frozen=True)
class AnchorSet:
    """Ideal-curve comparison points: half-knot midpoint and tip, plus the
    tip tangent direction in spherical angles (rad)."""

    midpoint: np.ndarray
    tip: np.ndarray
    tip_phi: float
    tip_theta: float

    def __post_init__(self):
        if not 0.0 <= self.tip_theta <= np.pi:
            raise ValueError("tip_theta must lie in [0, pi]")
        if not -np.pi < self.tip_phi <= np.pi:
            raise ValueError("tip_phi must lie in (-pi, pi]")


def ideal_point(curve: IdealCurve, t) -> np.ndarray:
    """Evaluate the curve at parameter t (scalar or array)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < curve.t_min) or np.any(t > curve.t_max):
        raise ValueError(f"t outside [{curve.t_min}, {curve.t_max}]")
    x = curve.coeff_xy * (np.sin(t) + 2.0 * np.sin(2.0 * t))
    y = curve.coeff_xy * (np.cos(t) - 2.0 * np.cos(2.0 * t))
    z = curve.coeff_z * (-np.sin(3.0 * t))
    return np.stack([x, y, z], axis=-1)


def ideal_derivative(curve: IdealCurve, t) -> np.ndarray:
    """Analytic d/dt of the curve (not normalized)."""
    t = np.asarray(t, dtype=float)
    dx = curve.coeff_xy * (np.cos(t) + 4.0 * np.cos(2.0 * t))
    dy = curve.coeff_xy * (-np.sin(t) + 4.0 * np.sin(2.0 * t))
    dz = -3.0 * curve.coeff_z * np.cos(3.0 * t)
    return np.stack([dx, dy, dz], axis=-1)


def direction_angles(d: np.ndarray) -> tuple[float, float]:
    """Spherical angles of a direction vector.

    phi is the azimuth in the xy-plane (atan2 convention, in (-pi, pi]),
    theta the polar angle from +z (in [0, pi]).
    """
    d = np.asarray(d, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise ValueError("zero direction vector has no spherical angles")
    phi = float(np.arctan2(d[1], d[0]))
    theta = float(np.arccos(np.clip(d[2] / norm, -1.0, 1.0)))
    return phi, theta


def ideal_tangent(curve: IdealCurve, t: float) -> tuple[float, float]:
    """Tangent direction of the curve at t, as spherical angles (rad)."""
    d = ideal_derivative(curve, np.asarray(t, dtype=float))
    return direction_angles(d)


def ideal_anchors(curve: IdealCurve, n_active_elements: int) -> AnchorSet:
    """Anchor set for a half-knot built from n active (non-neutral) elements.

    The tip anchor sits at the end of the parameter range; the midpoint
    anchor at t_max / (n/2 + 1), generalizing the reference 12-active-element
    chain whose midpoint was taken at t_max / 7.
    """
    if n_active_elements < 2 or n_active_elements % 2 != 0:
        raise ValueError("n_active_elements must be even and >= 2")
    t_mid = curve.t_max / (n_active_elements / 2.0 + 1.0)
    phi, theta = ideal_tangent(curve, curve.t_max)
    return AnchorSet(
        midpoint=ideal_point(curve, t_mid),
        tip=ideal_point(curve, curve.t_max),
        tip_phi=phi,
        tip_theta=theta,
    )


def sample_curve(curve: IdealCurve, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Evenly sample the curve; returns (t values, points)."""
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    t = np.linspace(curve.t_min, curve.t_max, n_samples)
    return t, ideal_point(curve, t)


def arc_length(curve: IdealCurve, t0: float, t1: float) -> float:
    """Arc length of the curve between two parameter values."""
    speed = lambda t: float(np.linalg.norm(ideal_derivative(curve, t)))
    value, _ = quad(speed, t0, t1, limit=200)
    return value


def arc_matched_midpoint_node(curve: IdealCurve, n_elements: int) -> int:
    """Chain node index whose fractional position matches the midpoint anchor.

    The midpoint anchor sits at a small parameter value near the root; the
    chain node compared against it is chosen at the same fraction of total
    arc length, so the two anchors describe the same material point of the
    mechanism.
    """
    n_active = n_elements if n_elements % 2 == 0 else n_elements - 1
    if n_active < 2:
        raise ValueError("need at least 2 active elements")
    t_mid = curve.t_max / (n_active / 2.0 + 1.0)
    frac = arc_length(curve, 0.0, t_mid) / arc_length(curve, 0.0, curve.t_max)
    return max(1, round(frac * n_elements))

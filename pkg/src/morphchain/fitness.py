"""Two-term objective scoring a trial chain against the ideal anchors.

The position term compares tip and (weighted) midpoint coordinates; the
orientation term compares tip tangent directions in spherical angles. Both
are combined linearly, with the orientation weight doing the unit scaling
between mm and rad.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import Pose, Trajectory
from .target import AnchorSet, direction_angles


@dataclass(frozen=True)
class FitnessWeights:
    c0: float = 1.0
    c1: float = 5.0
    w_m: float = 5.0

    def __post_init__(self):
        if self.c0 < 0 or self.c1 < 0 or self.w_m < 0:
            raise ValueError("fitness weights must be nonnegative")


@dataclass(frozen=True)
class TrialAnchors:
    midpoint: np.ndarray
    tip: np.ndarray
    tip_phi: float
    tip_theta: float


def default_midpoint_node(n_elements: int) -> int:
    """Node index treated as the chain midpoint: ceil((N+1)/2)."""
    return int(np.ceil((n_elements + 1) / 2.0))


def trial_anchors(traj: Trajectory, pose: Pose, midpoint_node: int) -> TrialAnchors:
    """Extract midpoint/tip anchors from an evaluated half-chain.

    The tip direction is the final element's local x-axis, i.e. the first
    column of the accumulated rotation.
    """
    if len(traj.nodes) == 0:
        raise ValueError("empty trajectory")
    if not 0 <= midpoint_node < len(traj.nodes):
        raise ValueError(f"midpoint_node {midpoint_node} out of range")
    phi, theta = direction_angles(pose.R[:, 0])
    return TrialAnchors(
        midpoint=traj.nodes[midpoint_node],
        tip=traj.nodes[-1],
        tip_phi=phi,
        tip_theta=theta,
    )


def wrap_angle(a: float) -> float:
    """Wrap an angle difference into (-pi, pi]."""
    return float(-((-a + np.pi) % (2.0 * np.pi) - np.pi))


def position_error(trial: TrialAnchors, ideal: AnchorSet, w: FitnessWeights) -> float:
    """sqrt(|tip - tip0|^2 + w_m |mid - mid0|^2), in mm."""
    t1 = float(np.sum((np.asarray(ideal.tip) - np.asarray(trial.tip)) ** 2))
    t2 = w.w_m * float(
        np.sum((np.asarray(ideal.midpoint) - np.asarray(trial.midpoint)) ** 2)
    )
    return float(np.sqrt(t1 + t2))


def orientation_error(trial: TrialAnchors, ideal: AnchorSet) -> float:
    """Root-sum-square of tip angle differences, with the azimuth difference
    wrapped into (-pi, pi] to avoid the 2*pi seam."""
    dphi = wrap_angle(ideal.tip_phi - trial.tip_phi)
    dtheta = ideal.tip_theta - trial.tip_theta
    return float(np.sqrt(dphi**2 + dtheta**2))


def objective(p_error: float, q_error: float, w: FitnessWeights) -> float:
    """Combined score y = c0 * P + c1 * Q (lower is better)."""
    if p_error < 0 or q_error < 0:
        raise ValueError("error terms must be nonnegative")
    return w.c0 * p_error + w.c1 * q_error

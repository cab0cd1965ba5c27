"""Linear-elastic gravity sag of an activated chain, as a 3D space frame.

Each chain segment becomes a two-node beam element with 6 DOF per node
(three translations, three rotations): axial stretch, torsion, and
Euler-Bernoulli bending in two planes. Self-weight is lumped half-and-half
onto the element end nodes, the root node is fully clamped, and the linear
system is solved for small displacements.

Units: lengths mm, moduli MPa (N/mm^2), density g/mm^3, gravity mm/s^2.
Forces are held in newtons (1 N = 1e6 g*mm/s^2), so displacements come out
in mm and rotations in rad.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .kinematics import Trajectory

# newtons per (g/mm^3 * mm^2 * mm * mm/s^2)
_N_PER_G_MM_S2 = 1e-6


@dataclass(frozen=True)
class FrameProperties:
    """Section and material constants of the printed chain.

    Defaults describe the 2 mm x 2 mm printed cross-section; the moduli and
    density have no physically meaningful default and must be supplied.
    """

    youngs_modulus: float  # MPa
    shear_modulus: float  # MPa
    density: float  # g/mm^3
    area: float = 4.0  # mm^2
    I_y: float = 4.0 / 3.0  # mm^4
    I_z: float = 4.0 / 3.0  # mm^4
    J: float = 2.25  # mm^4, torsion constant of the square section
    gravity: tuple[float, float, float] = (0.0, 0.0, -9810.0)  # mm/s^2

    def __post_init__(self):
        for name in ("youngs_modulus", "shear_modulus", "area", "I_y", "I_z", "J"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.density < 0:
            raise ValueError("density must be nonnegative")
        object.__setattr__(self, "gravity", tuple(float(g) for g in self.gravity))


@dataclass(frozen=True)
class SagSolution:
    displaced_nodes: np.ndarray  # (n_nodes, 3) mm
    dof_vector: np.ndarray  # (n_nodes, 6): translations mm, rotations rad


def _local_stiffness(props: FrameProperties, L: float) -> np.ndarray:
    """Standard 12x12 space-frame stiffness in element-local axes."""
    E, G = props.youngs_modulus, props.shear_modulus
    A, Iy, Iz, J = props.area, props.I_y, props.I_z, props.J
    k = np.zeros((12, 12))
    ax = E * A / L
    to = G * J / L
    k[0, 0] = k[6, 6] = ax
    k[0, 6] = k[6, 0] = -ax
    k[3, 3] = k[9, 9] = to
    k[3, 9] = k[9, 3] = -to
    # bending about local z: translations y, rotations z
    a, b, c, d = (
        12 * E * Iz / L**3,
        6 * E * Iz / L**2,
        4 * E * Iz / L,
        2 * E * Iz / L,
    )
    for (i, j), v in {
        (1, 1): a, (1, 5): b, (1, 7): -a, (1, 11): b,
        (5, 5): c, (5, 7): -b, (5, 11): d,
        (7, 7): a, (7, 11): -b,
        (11, 11): c,
    }.items():
        k[i, j] = k[j, i] = v
    # bending about local y: translations z, rotations y (coupling signs flip)
    a, b, c, d = (
        12 * E * Iy / L**3,
        6 * E * Iy / L**2,
        4 * E * Iy / L,
        2 * E * Iy / L,
    )
    for (i, j), v in {
        (2, 2): a, (2, 4): -b, (2, 8): -a, (2, 10): -b,
        (4, 4): c, (4, 8): b, (4, 10): d,
        (8, 8): a, (8, 10): b,
        (10, 10): c,
    }.items():
        k[i, j] = k[j, i] = v
    return k


def _element_triad(direction: np.ndarray) -> np.ndarray:
    """Local axes (rows x, y, z) for an element along ``direction``.

    Local y comes from the global axis least aligned with the element
    (preferring z, then y on ties), projected perpendicular to local x.
    """
    x = direction / np.linalg.norm(direction)
    ref = None
    best = np.inf
    for axis in (np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]),
                 np.array([1.0, 0.0, 0.0])):
        align = abs(float(np.dot(axis, x)))
        if align < best - 1e-15:
            best = align
            ref = axis
    y = ref - np.dot(ref, x) * x
    y /= np.linalg.norm(y)
    z = np.cross(x, y)
    return np.stack([x, y, z])


def assemble_frame(
    nodes: Trajectory | np.ndarray, props: FrameProperties
) -> tuple[np.ndarray, np.ndarray]:
    """Global stiffness matrix (6M x 6M) and self-weight load vector (6M).

    One beam element per consecutive node pair. Zero-length elements are
    rejected. Self-weight of each element contributes rho*A*L*g/2 to the
    translational DOFs of both end nodes.
    """
    pts = nodes.nodes if isinstance(nodes, Trajectory) else np.asarray(nodes, float)
    m = len(pts)
    if m < 2:
        raise ValueError("need at least two nodes")
    ndof = 6 * m
    K = np.zeros((ndof, ndof))
    f = np.zeros(ndof)
    gvec = np.asarray(props.gravity)
    for e in range(m - 1):
        d = pts[e + 1] - pts[e]
        L = float(np.linalg.norm(d))
        if L < 1e-12:
            raise ValueError(f"coincident consecutive nodes at index {e}")
        lam = _element_triad(d)
        T = scipy.linalg.block_diag(lam, lam, lam, lam)
        ke = T.T @ _local_stiffness(props, L) @ T
        idx = np.r_[6 * e : 6 * e + 6, 6 * (e + 1) : 6 * (e + 1) + 6]
        K[np.ix_(idx, idx)] += ke
        w = props.density * props.area * L * gvec * _N_PER_G_MM_S2 / 2.0
        f[6 * e : 6 * e + 3] += w
        f[6 * (e + 1) : 6 * (e + 1) + 3] += w
    return K, f


def solve_sag(
    nodes: Trajectory | np.ndarray,
    props: FrameProperties,
    extra_node_loads: np.ndarray | None = None,
) -> SagSolution:
    """Clamp the root node and solve K u = f for the sagged geometry.

    ``extra_node_loads`` is an optional (n_nodes, 6) array of additional
    nodal loads (N and N*mm) added to the self-weight vector.
    """
    pts = nodes.nodes if isinstance(nodes, Trajectory) else np.asarray(nodes, float)
    K, f = assemble_frame(pts, props)
    if extra_node_loads is not None:
        extra = np.asarray(extra_node_loads, float)
        if extra.shape != (len(pts), 6):
            raise ValueError("extra_node_loads must have shape (n_nodes, 6)")
        f = f + extra.ravel()
    free = np.arange(6, len(f))
    try:
        cho = scipy.linalg.cho_factor(K[np.ix_(free, free)])
    except np.linalg.LinAlgError as e:
        raise ValueError(f"reduced stiffness matrix is not positive definite: {e}")
    u = np.zeros(len(f))
    u[free] = scipy.linalg.cho_solve(cho, f[free])
    dof = u.reshape(-1, 6)
    return SagSolution(displaced_nodes=pts + dof[:, :3], dof_vector=dof)

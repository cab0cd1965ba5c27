"""Rigid-segment kinematics of bend/twist/neutral actuator chains.

A chain is an ordered sequence of unit actuator elements. Each element,
once activated, contributes a fixed local rotation (about one axis) and a
fixed local end-to-end offset. Chaining those local transforms gives the
activated shape of the whole mechanism.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, asdict

import numpy as np


class ElementKind(enum.IntEnum):
    """The seven actuator options: one neutral, four bends, two twists."""

    NEUTRAL = 0
    BEND_POS_Z = 1
    BEND_NEG_Z = 2
    BEND_POS_Y = 3
    BEND_NEG_Y = 4
    TWIST_POS_X = 5
    TWIST_NEG_X = 6


# Single-letter codes used in sequence JSON files.
LETTER_OF_KIND = {
    ElementKind.NEUTRAL: "a",
    ElementKind.BEND_POS_Z: "b",
    ElementKind.BEND_NEG_Z: "c",
    ElementKind.BEND_POS_Y: "d",
    ElementKind.BEND_NEG_Y: "e",
    ElementKind.TWIST_POS_X: "f",
    ElementKind.TWIST_NEG_X: "g",
}
KIND_OF_LETTER = {v: k for k, v in LETTER_OF_KIND.items()}

BEND_KINDS = (
    ElementKind.BEND_POS_Z,
    ElementKind.BEND_NEG_Z,
    ElementKind.BEND_POS_Y,
    ElementKind.BEND_NEG_Y,
)
TWIST_KINDS = (ElementKind.TWIST_POS_X, ElementKind.TWIST_NEG_X)


@dataclass(frozen=True)
class ActivationProfile:
    """Calibrated per-element activation response.

    Angles are in degrees, lengths in mm. Offsets are dimensionless
    fractions of the element length.
    """

    element_length_L: float = 10.0
    bend_angle: float = 25.0
    twist_angle: float = 4.0
    bend_offset_axial: float = 0.98
    bend_offset_lateral: float = 0.22

    def __post_init__(self):
        if not self.element_length_L > 0:
            raise ValueError("element_length_L must be positive")
        if not (np.isfinite(self.bend_angle) and np.isfinite(self.twist_angle)):
            raise ValueError("activation angles must be finite")
        if not 0 < self.bend_offset_axial <= 1:
            raise ValueError("bend_offset_axial must lie in (0, 1]")
        if not 0 <= self.bend_offset_lateral < 1:
            raise ValueError("bend_offset_lateral must lie in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ActivationProfile":
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"unknown profile keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Pose:
    """Orientation (3x3 rotation matrix) and position (mm) of a chain tip."""

    R: np.ndarray
    X: np.ndarray


@dataclass(frozen=True)
class Sequence:
    """An ordered chain of actuator elements."""

    elements: tuple[ElementKind, ...]

    def __post_init__(self):
        if len(self.elements) < 1:
            raise ValueError("sequence must contain at least one element")
        object.__setattr__(
            self, "elements", tuple(ElementKind(e) for e in self.elements)
        )

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def letters(self) -> str:
        return "".join(LETTER_OF_KIND[e] for e in self.elements)

    @classmethod
    def from_letters(cls, letters: str) -> "Sequence":
        try:
            return cls(tuple(KIND_OF_LETTER[c] for c in letters))
        except KeyError as e:
            raise ValueError(f"unknown element letter code: {e.args[0]!r}") from None


@dataclass(frozen=True)
class Trajectory:
    """Node positions (mm) of a chain evaluated at one activation fraction."""

    nodes: np.ndarray  # (n_nodes, 3)
    fraction: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3 or nodes.shape[0] < 1:
            raise ValueError("nodes must be an (n, 3) array with n >= 1")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")
        object.__setattr__(self, "nodes", nodes)

    @property
    def tip(self) -> np.ndarray:
        return self.nodes[-1]


def rot_x(alpha: float) -> np.ndarray:
    """Rotation matrix about the x-axis (angle in rad)."""
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(beta: float) -> np.ndarray:
    """Rotation matrix about the y-axis (angle in rad)."""
    c, s = np.cos(beta), np.sin(beta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(gamma: float) -> np.ndarray:
    """Rotation matrix about the z-axis (angle in rad)."""
    c, s = np.cos(gamma), np.sin(gamma)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _element_angles(
    kind: ElementKind, fraction: float, profile: ActivationProfile
) -> tuple[float, float, float]:
    """Local rotation angles (alpha, beta, gamma) in rad; at most one nonzero."""
    bend = np.deg2rad(profile.bend_angle) * fraction
    twist = np.deg2rad(profile.twist_angle) * fraction
    table = {
        ElementKind.NEUTRAL: (0.0, 0.0, 0.0),
        ElementKind.BEND_POS_Z: (0.0, 0.0, bend),
        ElementKind.BEND_NEG_Z: (0.0, 0.0, -bend),
        ElementKind.BEND_POS_Y: (0.0, bend, 0.0),
        ElementKind.BEND_NEG_Y: (0.0, -bend, 0.0),
        ElementKind.TWIST_POS_X: (twist, 0.0, 0.0),
        ElementKind.TWIST_NEG_X: (-twist, 0.0, 0.0),
    }
    return table[ElementKind(kind)]


def element_rotation(
    kind: ElementKind, fraction: float, profile: ActivationProfile
) -> np.ndarray:
    """Local rotation contributed by one element at a given activation fraction.

    The total element rotation is rot_x(alpha) @ rot_y(beta) @ rot_z(gamma).
    Each element kind activates a single axis, so the factor order is
    immaterial here (the other two factors are the identity).
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    alpha, beta, gamma = _element_angles(kind, fraction, profile)
    return rot_x(alpha) @ rot_y(beta) @ rot_z(gamma)


def element_offsets(
    kind: ElementKind, fraction: float, profile: ActivationProfile
) -> np.ndarray:
    """Local end-to-end offset vector (mm) of one element.

    Fully activated bends shorten axially to ``axial*L`` and displace
    laterally by ``lateral*L`` toward the bend direction; twists and the
    neutral element keep the straight offset (L, 0, 0). Partial activation
    interpolates each component linearly between the straight and the fully
    activated offset.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    L = profile.element_length_L
    ax = profile.bend_offset_axial * L
    lat = profile.bend_offset_lateral * L
    full = {
        ElementKind.NEUTRAL: (L, 0.0, 0.0),
        ElementKind.BEND_POS_Z: (ax, lat, 0.0),
        ElementKind.BEND_NEG_Z: (ax, -lat, 0.0),
        ElementKind.BEND_POS_Y: (ax, 0.0, -lat),
        ElementKind.BEND_NEG_Y: (ax, 0.0, lat),
        ElementKind.TWIST_POS_X: (L, 0.0, 0.0),
        ElementKind.TWIST_NEG_X: (L, 0.0, 0.0),
    }[ElementKind(kind)]
    straight = np.array([L, 0.0, 0.0])
    return (1.0 - fraction) * straight + fraction * np.asarray(full)


def kind_rotation_table(fraction: float, profile: ActivationProfile) -> np.ndarray:
    """(7, 3, 3) stack of element rotations indexed by ElementKind value."""
    return np.stack(
        [element_rotation(k, fraction, profile) for k in ElementKind]
    )


def kind_offset_table(fraction: float, profile: ActivationProfile) -> np.ndarray:
    """(7, 3) stack of element offsets indexed by ElementKind value."""
    return np.stack([element_offsets(k, fraction, profile) for k in ElementKind])


def forward_kinematics(
    seq: Sequence, profile: ActivationProfile, fraction: float = 1.0
) -> tuple[Trajectory, Pose]:
    """Propagate the chain element by element from the root at the origin.

    Starting from the identity orientation, each element advances the tip
    by the accumulated rotation applied to its local offset, then composes
    its local rotation into the running total:

        dX = R @ delta;  R <- R @ R_e;  X <- X + dX

    Returns the node path (one node per element boundary, root first) and
    the final tip pose.
    """
    genes = np.array([int(e) for e in seq.elements])
    nodes, R = forward_kinematics_batch(genes[None, :], profile, fraction)
    traj = Trajectory(nodes=nodes[0], fraction=fraction)
    return traj, Pose(R=R[0], X=nodes[0, -1].copy())


def forward_kinematics_batch(
    genes: np.ndarray, profile: ActivationProfile, fraction: float
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized chain propagation for a whole population of sequences.

    Args:
        genes: (P, N) integer array of ElementKind values.
        profile: shared activation profile.
        fraction: activation fraction in [0, 1].

    Returns:
        nodes: (P, N+1, 3) node positions, nodes[:, 0] at the origin.
        R: (P, 3, 3) accumulated tip rotations.
    """
    nodes, R = forward_kinematics_multi(genes, profile, np.array([fraction]))
    return nodes[0], R[0]


def forward_kinematics_multi(
    genes: np.ndarray, profile: ActivationProfile, fractions: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Chain propagation for a population at several activation fractions.

    Returns nodes (F, P, N+1, 3) and tip rotations (F, P, 3, 3), where F is
    the number of fractions. One pass over the elements serves the whole
    activation sweep.
    """
    genes = np.asarray(genes)
    fractions = np.asarray(fractions, dtype=float)
    P, N = genes.shape
    F = len(fractions)
    Rt = np.stack([kind_rotation_table(f, profile) for f in fractions])  # (F,7,3,3)
    Dt = np.stack([kind_offset_table(f, profile) for f in fractions])  # (F,7,3)
    R = np.broadcast_to(np.eye(3), (F, P, 3, 3)).copy()
    nodes = np.zeros((F, P, N + 1, 3))
    X = np.zeros((F, P, 3))
    for i in range(N):
        k = genes[:, i]
        X = X + (R @ Dt[:, k][:, :, :, None])[..., 0]
        R = R @ Rt[:, k]
        nodes[:, :, i + 1] = X
    return nodes, R


# Mirror map used to complete a half-chain into the full mechanism: a 180
# degree rotation about the y-axis, so the reflected half is a proper rigid
# motion (chirality preserved).
MIRROR = np.array([-1.0, 1.0, -1.0])


def reflect_about_root(half: Trajectory) -> Trajectory:
    """Build the full 2N+1 node path from a half-chain rooted at the origin.

    The mirrored nodes (in tip-to-root order) are prepended to the half
    path, sharing the root node.
    """
    if not np.allclose(half.nodes[0], 0.0, atol=1e-12):
        raise ValueError("half trajectory must be rooted at the origin")
    mirrored = half.nodes[:0:-1] * MIRROR
    return Trajectory(
        nodes=np.concatenate([mirrored, half.nodes], axis=0),
        fraction=half.fraction,
    )


def reflect_nodes_batch(nodes: np.ndarray) -> np.ndarray:
    """(P, N+1, 3) half paths -> (P, 2N+1, 3) full reflected paths."""
    return np.concatenate([nodes[:, :0:-1] * MIRROR, nodes], axis=1)


def is_rotation(R: np.ndarray, tol: float = 1e-9) -> bool:
    """Check orthonormality and unit determinant within tol."""
    R = np.asarray(R)
    return (
        np.max(np.abs(R.T @ R - np.eye(3))) < tol
        and abs(np.linalg.det(R) - 1.0) < tol
    )


# ---------------------------------------------------------------------------
# Serialization: sequence JSON and trajectory CSV
# ---------------------------------------------------------------------------

def sequence_to_json(seq: Sequence, profile: ActivationProfile) -> str:
    doc = {"elements": list(seq.letters), "profile": profile.to_dict()}
    return json.dumps(doc, indent=2) + "\n"


def sequence_from_json(text: str) -> tuple[Sequence, ActivationProfile]:
    """Parse a sequence document; a missing profile falls back to defaults."""
    doc = json.loads(text)
    if not isinstance(doc, dict) or "elements" not in doc:
        raise ValueError("sequence JSON must be an object with an 'elements' list")
    unknown = set(doc) - {"elements", "profile"}
    if unknown:
        raise ValueError(f"unknown sequence keys: {sorted(unknown)}")
    seq = Sequence.from_letters("".join(doc["elements"]))
    profile = ActivationProfile.from_dict(doc.get("profile", {}))
    return seq, profile


def format_sig(x: float, digits: int = 9) -> str:
    """Fixed significant-digit formatting used by all CSV/JSON emitters."""
    if x == 0.0:
        x = 0.0  # never print negative zero
    return f"{x:.{digits}g}"


def write_trajectory_csv(fileobj, trajectories) -> None:
    """Write frames as CSV rows: increment_index, node_index, x, y, z.

    ``trajectories`` is an iterable of Trajectory objects, one per
    activation increment, written in order.
    """
    fileobj.write("increment_index,node_index,x,y,z\n")
    for inc, traj in enumerate(trajectories):
        for j, p in enumerate(traj.nodes):
            coords = ",".join(format_sig(v) for v in p)
            fileobj.write(f"{inc},{j},{coords}\n")


def read_trajectory_csv(fileobj) -> list[Trajectory]:
    """Inverse of write_trajectory_csv; fractions are not recoverable and
    are reported as 1.0."""
    header = fileobj.readline().strip()
    if header != "increment_index,node_index,x,y,z":
        raise ValueError(f"unexpected trajectory CSV header: {header!r}")
    frames: dict[int, list] = {}
    for lineno, line in enumerate(fileobj, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ValueError(f"line {lineno}: expected 5 columns, got {len(parts)}")
        inc, node = int(parts[0]), int(parts[1])
        frames.setdefault(inc, []).append((node, [float(v) for v in parts[2:]]))
    out = []
    for inc in sorted(frames):
        rows = sorted(frames[inc])
        out.append(Trajectory(nodes=np.array([p for _, p in rows]), fraction=1.0))
    return out

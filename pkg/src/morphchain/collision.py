"""Self-collision sweep over the activation motion, and knot completeness.

Collision is checked on node positions of the full reflected path: the
motion is decomposed into activation increments and every admissible node
pair is tested against a distance threshold. Completeness asks whether
each tip of the finished mechanism threads through the loop formed by the
opposing half.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .kinematics import (
    MIRROR,
    ActivationProfile,
    Sequence,
    Trajectory,
    forward_kinematics,
    forward_kinematics_multi,
    reflect_about_root,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CollisionConfig:
    n_increments: int = 25
    threshold: float = 2.0  # mm; printed element cross-section width
    neighbor_exclusion: int = 1

    def __post_init__(self):
        if self.n_increments < 2:
            raise ValueError("n_increments must be >= 2")
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        if self.neighbor_exclusion < 1:
            raise ValueError("neighbor_exclusion must be >= 1")


@dataclass(frozen=True)
class CollisionReport:
    collided: bool
    first_increment: int | None
    node_pair: tuple[int, int] | None
    min_distance: float

    def __post_init__(self):
        if self.collided != (self.node_pair is not None):
            raise ValueError("node_pair must be present exactly when collided")

    def to_dict(self) -> dict:
        return {
            "collided": self.collided,
            "first_increment": self.first_increment,
            "node_pair": list(self.node_pair) if self.node_pair else None,
            "min_distance": self.min_distance,
        }


def _admissible_pairs(n_nodes: int, neighbor_exclusion: int):
    """Index pairs (i, j) with j - i > neighbor_exclusion, in lexicographic
    order so ties resolve deterministically."""
    return np.triu_indices(n_nodes, k=neighbor_exclusion + 1)


def sweep_collision_check(
    seq: Sequence, profile: ActivationProfile, cfg: CollisionConfig
) -> CollisionReport:
    """Check the reflected full path for node-pair contact during activation.

    Activation fractions k/n for k = 1..n are evaluated in order; the first
    admissible pair whose distance falls below the threshold is reported
    (lowest increment first, then lowest pair). If nothing collides, the
    minimum distance seen over the whole sweep is reported.
    """
    n = cfg.n_increments
    min_dist = np.inf
    for k in range(1, n + 1):
        half, _ = forward_kinematics(seq, profile, fraction=k / n)
        full = reflect_about_root(half)
        iu, ju = _admissible_pairs(len(full.nodes), cfg.neighbor_exclusion)
        d = np.linalg.norm(full.nodes[iu] - full.nodes[ju], axis=1)
        hit = d < cfg.threshold
        if hit.any():
            first = int(np.argmax(hit))
            return CollisionReport(
                collided=True,
                first_increment=k,
                node_pair=(int(iu[first]), int(ju[first])),
                min_distance=float(d[first]),
            )
        min_dist = min(min_dist, float(d.min()))
    return CollisionReport(
        collided=False, first_increment=None, node_pair=None, min_distance=min_dist
    )


def sweep_collides_batch(
    genes: np.ndarray, profile: ActivationProfile, cfg: CollisionConfig
) -> np.ndarray:
    """Vectorized collided-or-not flags for a population of sequences."""
    P, N = genes.shape
    iu, ju = _admissible_pairs(2 * N + 1, cfg.neighbor_exclusion)
    fractions = np.arange(1, cfg.n_increments + 1) / cfg.n_increments
    nodes, _ = forward_kinematics_multi(genes, profile, fractions)  # (F,P,N+1,3)
    mirrored = nodes[:, :, :0:-1] * MIRROR
    full = np.concatenate([mirrored, nodes], axis=2)  # (F,P,2N+1,3)
    # |a-b|^2 = |a|^2 + |b|^2 - 2 a.b via one batched matmul
    sq = np.sum(full**2, axis=-1)
    gram = full @ np.swapaxes(full, -1, -2)
    d2 = sq[:, :, iu] + sq[:, :, ju] - 2.0 * gram[:, :, iu, ju]
    return (d2 < cfg.threshold**2).any(axis=(0, 2))


def _segment_hits_fan(p0: np.ndarray, p1: np.ndarray, tri: np.ndarray) -> bool:
    """Moller-Trumbore segment vs triangle stack (T, 3, 3)."""
    d = p1 - p0
    e1 = tri[:, 1] - tri[:, 0]
    e2 = tri[:, 2] - tri[:, 0]
    h = np.cross(d, e2)
    a = np.einsum("ti,ti->t", e1, h)
    ok = np.abs(a) > 1e-12
    f = np.where(ok, 1.0, 0.0) / np.where(ok, a, 1.0)
    s = p0 - tri[:, 0]
    u = f * np.einsum("ti,ti->t", s, h)
    q = np.cross(s, e1)
    v = f * np.einsum("i,ti->t", d, q)
    t = f * np.einsum("ti,ti->t", e2, q)
    hit = ok & (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t >= 0.0) & (t <= 1.0)
    return bool(hit.any())


def _loop_fan(loop_nodes: np.ndarray) -> np.ndarray | None:
    """Triangle fan over the closed loop (root..tip..root) from its centroid.

    Returns None when the fan is degenerate (collinear loop, no area).
    """
    centroid = loop_nodes.mean(axis=0)
    closed = np.concatenate([loop_nodes, loop_nodes[:1]], axis=0)
    tri = np.stack(
        [np.broadcast_to(centroid, (len(closed) - 1, 3)), closed[:-1], closed[1:]],
        axis=1,
    )
    areas = np.linalg.norm(
        np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1
    )
    if float(areas.max()) < 1e-9:
        return None
    return tri


def completeness_check(full: Trajectory) -> bool:
    """True when both tips of the full path pierce the opposing half's loop.

    Each half of the path (root at the center node) is closed root-to-tip
    into a loop and fanned from its centroid; the opposing tip counts as
    penetrating when either of its final two segments intersects that fan.
    """
    nodes = full.nodes
    m = len(nodes)
    if m < 7:
        raise ValueError("full path needs at least 7 nodes")
    if m % 2 != 1:
        raise ValueError("full path must have an odd node count (2N+1)")
    root = (m - 1) // 2
    half_a = nodes[root::-1]  # root -> mirrored-side tip
    half_b = nodes[root:]  # root -> tip
    for this, opposing in ((half_a, half_b), (half_b, half_a)):
        fan = _loop_fan(opposing)
        if fan is None:
            log.info("completeness check: degenerate opposing loop (zero area)")
            return False
        pierced = _segment_hits_fan(this[-2], this[-1], fan) or _segment_hits_fan(
            this[-3], this[-2], fan
        )
        if not pierced:
            return False
    return True


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product over the last axis without np.cross overhead."""
    return np.stack(
        [
            a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ],
        axis=-1,
    )


def _segments_hit_fans(p0, p1, tri) -> np.ndarray:
    """Batched Moller-Trumbore: segments (P, S, 3) against fans (P, T, 3, 3);
    returns (P,) any-hit flags."""
    d = p1 - p0
    e1 = tri[:, :, 1] - tri[:, :, 0]
    e2 = tri[:, :, 2] - tri[:, :, 0]
    h = _cross(d[:, :, None, :], e2[:, None, :, :])  # (P,S,T,3)
    a = np.sum(e1[:, None] * h, axis=-1)
    ok = np.abs(a) > 1e-12
    f = np.where(ok, 1.0, 0.0) / np.where(ok, a, 1.0)
    s = p0[:, :, None, :] - tri[:, None, :, 0]
    u = f * np.sum(s * h, axis=-1)
    q = _cross(s, e1[:, None])
    v = f * np.sum(d[:, :, None] * q, axis=-1)
    t = f * np.sum(e2[:, None] * q, axis=-1)
    hit = ok & (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t >= 0.0) & (t <= 1.0)
    return hit.any(axis=(1, 2))


def completeness_batch(full_nodes: np.ndarray) -> np.ndarray:
    """completeness_check over a (P, 2N+1, 3) stack of full paths."""
    full_nodes = np.asarray(full_nodes, dtype=float)
    P, m, _ = full_nodes.shape
    if m < 7 or m % 2 != 1:
        raise ValueError("full paths must have an odd node count >= 7")
    root = (m - 1) // 2
    half_a = full_nodes[:, root::-1]
    half_b = full_nodes[:, root:]
    complete = np.ones(P, dtype=bool)
    for this, opposing in ((half_a, half_b), (half_b, half_a)):
        centroid = opposing.mean(axis=1)
        loop = np.concatenate([opposing, opposing[:, :1]], axis=1)
        n_tri = loop.shape[1] - 1
        tri = np.stack(
            [
                np.broadcast_to(centroid[:, None], (P, n_tri, 3)),
                loop[:, :-1],
                loop[:, 1:],
            ],
            axis=2,
        )
        areas = np.linalg.norm(
            _cross(tri[:, :, 1] - tri[:, :, 0], tri[:, :, 2] - tri[:, :, 0]), axis=-1
        )
        degenerate = areas.max(axis=1) < 1e-9
        p0 = np.stack([this[:, -2], this[:, -3]], axis=1)
        p1 = np.stack([this[:, -1], this[:, -2]], axis=1)
        complete &= _segments_hit_fans(p0, p1, tri) & ~degenerate
    return complete

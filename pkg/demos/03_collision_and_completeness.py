"""Collision sweep and the knot completeness test on hand-built chains.

Run:  python demos/03_collision_and_completeness.py
"""

from morphchain import (
    ActivationProfile,
    CollisionConfig,
    Sequence,
    completeness_check,
    forward_kinematics,
    reflect_about_root,
    sweep_collision_check,
)

profile = ActivationProfile()
cfg = CollisionConfig()
print(f"sweep: {cfg.n_increments} increments, contact below {cfg.threshold} mm\n")

cases = {
    "straight 13-chain": "a" * 13,
    "gentle arc": "bbbabb",
    "375-degree curl": "b" * 15,
    "synthesized knot": "dbbbbbbbbbbbdf",
}
for name, letters in cases.items():
    seq = Sequence.from_letters(letters)
    report = sweep_collision_check(seq, profile, cfg)
    if report.collided:
        print(f"{name:20s} COLLIDES at increment {report.first_increment} "
              f"(nodes {report.node_pair}, {report.min_distance:.3f} mm)")
    else:
        print(f"{name:20s} clear, closest approach {report.min_distance:.2f} mm")

print()
for name, letters in cases.items():
    seq = Sequence.from_letters(letters)
    half, _ = forward_kinematics(seq, profile, 1.0)
    full = reflect_about_root(half)
    tied = completeness_check(full)
    print(f"{name:20s} forms a complete knot: {tied}")

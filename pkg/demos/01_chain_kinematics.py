"""Walk through the actuator chain model: elements, activation, reflection.

Run:  python demos/01_chain_kinematics.py
"""

import numpy as np

from morphchain import (
    ActivationProfile,
    Sequence,
    forward_kinematics,
    reflect_about_root,
)

profile = ActivationProfile()
print("Calibrated activation profile:")
print(f"  element length     {profile.element_length_L} mm")
print(f"  bend per element   {profile.bend_angle} deg")
print(f"  twist per element  {profile.twist_angle} deg")
print(f"  bend offsets       ({profile.bend_offset_axial}L, {profile.bend_offset_lateral}L)")
print()

# The seven element options, letter-coded a-g. A chain is just a string.
for letters in ("aaa", "bbb", "ddd", "fff"):
    seq = Sequence.from_letters(letters)
    traj, pose = forward_kinematics(seq, profile, fraction=1.0)
    print(f"chain '{letters}': tip at {np.round(traj.tip, 3)} mm")
print()

# Partial activation sweeps the shape from straight to fully deployed.
seq = Sequence.from_letters("bfbfb")
print(f"activation sweep of '{seq.letters}':")
for f in (0.0, 0.25, 0.5, 0.75, 1.0):
    traj, _ = forward_kinematics(seq, profile, fraction=f)
    print(f"  fraction {f:4.2f} -> tip {np.round(traj.tip, 3)}")
print()

# Only the half-knot is designed; the mechanism is its reflection through
# the root (a 180 degree turn about the y-axis).
half, _ = forward_kinematics(seq, profile, 1.0)
full = reflect_about_root(half)
print(f"half chain has {len(half.nodes)} nodes; reflected mechanism has "
      f"{len(full.nodes)} (tips at {np.round(full.nodes[0], 2)} and "
      f"{np.round(full.nodes[-1], 2)})")

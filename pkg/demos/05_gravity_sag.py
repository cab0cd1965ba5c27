"""Gravity sag of the activated knot as a linear space-frame model.

Submerged in the heating bath the mechanism is nearly neutrally buoyant
(treated as gravity off); in air the rubbery chain sags visibly.

Run:  python demos/05_gravity_sag.py          (prints a summary)
      python demos/05_gravity_sag.py --plot   (also writes gravity_sag.png)
"""

import sys

import numpy as np

from morphchain import (
    ActivationProfile,
    FrameProperties,
    Sequence,
    forward_kinematics,
    solve_sag,
)

# 2 x 2 mm printed section; representative rubbery-phase modulus
props = FrameProperties(
    youngs_modulus=10.0,   # MPa
    shear_modulus=3.6,     # MPa
    density=1.15e-3,       # g/mm^3
    gravity=(0.0, 0.0, -9810.0),
)

# one space-frame element per kinematic element of the half-knot, clamped
# at the mounting root (node 0); the other half mirrors it
seq = Sequence.from_letters("dbbbbbbbbbbbdf")
half, _ = forward_kinematics(seq, ActivationProfile(), 1.0)

in_air = solve_sag(half.nodes, props)
sag = in_air.displaced_nodes - half.nodes
drop = np.linalg.norm(sag, axis=1)

print(f"half-knot of {len(seq)} elements ({len(half.nodes)} frame nodes)")
print(f"modulus {props.youngs_modulus} MPa, density {props.density} g/mm^3")
print(f"largest nodal displacement: {drop.max():.2f} mm at node {int(drop.argmax())}")
print(f"free-tip displacement: {np.round(sag[-1], 2)} mm")

import dataclasses

submerged = dataclasses.replace(props, gravity=(0.0, 0.0, 0.0))
sol0 = solve_sag(half.nodes, submerged)
print(f"with buoyancy cancelling gravity, max displacement: "
      f"{np.abs(sol0.dof_vector).max():.1e}")

if "--plot" in sys.argv:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(projection="3d")
    p, q = half.nodes, in_air.displaced_nodes
    ax.plot(p[:, 0], p[:, 1], p[:, 2], "g.-", label="as activated")
    ax.plot(q[:, 0], q[:, 1], q[:, 2], "r.-", label="sagged under gravity")
    ax.legend()
    fig.savefig("gravity_sag.png", dpi=130)
    print("\nwrote gravity_sag.png")

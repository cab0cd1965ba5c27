"""Sample the ideal knot curve, its anchors, and its tangent frame.

Run:  python demos/02_target_curve.py          (prints a summary)
      python demos/02_target_curve.py --plot   (also writes target_curve.png)
"""

import sys

import numpy as np

from morphchain import (
    IdealCurve,
    arc_matched_midpoint_node,
    ideal_anchors,
    ideal_point,
    ideal_tangent,
    sample_curve,
)
from morphchain.target import arc_length

curve = IdealCurve()
t, pts = sample_curve(curve, 401)

print(f"parameter range [{curve.t_min:.4f}, {curve.t_max:.4f}]")
print(f"root (t=0):      {ideal_point(curve, 0.0)}")
print(f"tip  (t=max):    {np.round(ideal_point(curve, curve.t_max), 3)}")
print(f"bounding box:    {np.round(pts.min(axis=0), 1)} .. {np.round(pts.max(axis=0), 1)} mm")
print(f"half-knot arc:   {arc_length(curve, 0.0, curve.t_max):.2f} mm")
print()

anchors = ideal_anchors(curve, 12)
phi, theta = ideal_tangent(curve, curve.t_max)
print("anchors for a 12-active-element half-knot:")
print(f"  midpoint  {np.round(anchors.midpoint, 3)}  (t = t_max/7)")
print(f"  tip       {np.round(anchors.tip, 3)}")
print(f"  tip tangent: phi = {phi:.4f} rad, theta = {theta:.4f} rad")
print()

# The midpoint anchor sits early along the arc, so the matching chain node
# is chosen by arc fraction rather than by chain middle.
for n in (11, 13, 16):
    print(f"  arc-matched midpoint node, {n}-element chain: "
          f"{arc_matched_midpoint_node(curve, n)}")

if "--plot" in sys.argv:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], lw=2)
    ax.scatter(*anchors.midpoint, color="tab:orange", label="midpoint anchor")
    ax.scatter(*anchors.tip, color="tab:red", label="tip anchor")
    ax.scatter(*ideal_point(curve, 0.0), color="k", label="root")
    ax.legend()
    ax.set_title("ideal self-tying knot path")
    fig.savefig("target_curve.png", dpi=130)
    print("\nwrote target_curve.png")

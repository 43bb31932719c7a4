# One follower, two pinned leaders, and a gain knob.  Below the threshold
# K_* = b^2 / (2 c^2) the follower potential grows extra equilibria on and
# off the symmetry axis; above it the desired point is the only one left.
# This script prints the closed-form case table at a few gains and then
# sweeps the gain to draw the bifurcation diagram of on-axis equilibria.

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import triform as tf

B, C = 6.0, 1.0
print(f"b = {B}, c = {C}:  K_* = {tf.k_star(B, C)},  K_0 = {tf.k_zero(B, C):.6f}")
print()

for gain in (20.0, 4.0, 1.0):
    rep = tf.case_table(tf.CanonicalTriangleParams(a=0.0, b=B, c=C, gain=gain))
    print(f"K = {gain:g}: globally convergent = {rep.globally_convergent}, "
          f"almost globally = {rep.almost_globally_convergent}")
    for r in rep.equilibria:
        print("   ", r)
    print()

# sweep the gain: y-coordinates of the on-axis equilibria, colored by class
gains = np.linspace(0.25, 22.0, 600)
curves = {tf.STABLE: [], tf.UNSTABLE: [], tf.SADDLE: [], tf.DEGENERATE: []}
for gain in gains:
    recs = tf.enumerate_isosceles(tf.CanonicalTriangleParams(a=0.0, b=B, c=C, gain=gain))
    for r in recs:
        if r.position[0] == 0.0:
            curves[r.classification].append((gain, r.position[1]))

fig, ax = plt.subplots(figsize=(7, 5))
styles = {
    tf.STABLE: dict(color="tab:green", s=4, label="stable"),
    tf.UNSTABLE: dict(color="tab:red", s=4, label="unstable"),
    tf.SADDLE: dict(color="tab:orange", s=4, label="saddle"),
    tf.DEGENERATE: dict(color="black", s=16, label="degenerate"),
}
for cls, pts in curves.items():
    if pts:
        arr = np.array(pts)
        ax.scatter(arr[:, 0], arr[:, 1], **styles[cls])
ax.axvline(tf.k_star(B, C), color="gray", ls="--", lw=1)
ax.text(tf.k_star(B, C) + 0.2, -7.5, "K_*", color="gray")
ax.set_xlabel("area gain K")
ax.set_ylabel("on-axis equilibrium y")
ax.set_title(f"on-axis equilibria vs gain (b={B:g}, c={C:g})")
ax.legend(loc="center right")

os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
out = os.path.join(os.path.dirname(__file__), "out", "follower_equilibria.png")
fig.savefig(out, dpi=150, bbox_inches="tight")
print("wrote", out)

# Starting a follower on the symmetry axis below the leaders is the bad
# case: for gains under the threshold the axis is invariant and the flow
# slides straight into a wrong-shape equilibrium instead of the target.
# Raising the gain removes that trap.  Both runs are drawn over the level
# sets of their own potential.

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import triform as tf

START = [0.0, -1.0]
fig, axes = plt.subplots(1, 2, figsize=(11, 5), sharey=True)

for ax, gain in zip(axes, (4.0, 20.0)):
    params = tf.CanonicalTriangleParams(a=0.0, b=6.0, c=1.0, gain=gain)
    traj = tf.integrate_follower(params, START)
    end = traj.final_state[0]
    print(f"K = {gain:g}: {traj.terminal_reason} at t = {traj.times[-1]:g}, "
          f"final = [{end[0]:.6g}, {end[1]:.6g}]")

    # potential level sets on a window around the leaders
    xs = np.linspace(-8.0, 8.0, 160)
    ys = np.linspace(-8.0, 8.0, 160)
    xx, yy = np.meshgrid(xs, ys)
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    vv = tf.canonical_potential(params, pts).reshape(xx.shape)
    ax.contour(xx, yy, np.log10(vv + 1.0), levels=24, cmap="Greys", linewidths=0.6)

    path = traj.states[:, 0, :]
    ax.plot(path[:, 0], path[:, 1], color="tab:blue", lw=2)
    ax.plot(*START, "o", color="tab:blue")
    ax.plot(*end, "s", color="tab:red" if end[1] < 0 else "tab:green", ms=8)
    for rec in tf.enumerate_isosceles(params):
        marker = "*" if rec.classification == tf.STABLE else "x"
        ax.plot(*rec.position, marker, color="black", ms=9, mew=1.5)
        ax.annotate(rec.label, rec.position, textcoords="offset points",
                    xytext=(6, 4), fontsize=8)
    ax.plot([-1, 1], [0, 0], "k^", ms=10)  # the pinned leaders
    ax.set_title(f"K = {gain:g}")
    ax.set_xlabel("x")
    ax.set_aspect("equal")

axes[0].set_ylabel("y")
os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
out = os.path.join(os.path.dirname(__file__), "out", "saddle_capture.png")
fig.savefig(out, dpi=150, bbox_inches="tight")
print("wrote", out)

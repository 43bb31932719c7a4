# Where does every start end up?  A basin map integrates a whole grid of
# follower starts and labels each node by the equilibrium it reached.
# Above the gain threshold the map is a single color; below it the stable
# wrong-shape equilibrium claims the lower half plane.

import os
import time

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import triform as tf

WINDOW = (-10.0, 10.0, -10.0, 10.0)
RES = 41

fig, axes = plt.subplots(1, 2, figsize=(11, 5), sharey=True)
for ax, gain in zip(axes, (20.0, 1.0)):
    params = tf.CanonicalTriangleParams(a=0.0, b=6.0, c=1.0, gain=gain)
    records = tf.enumerate_isosceles(params)
    t0 = time.perf_counter()
    basin = tf.basin_sample(params, WINDOW, RES, None, records)
    dt = time.perf_counter() - t0
    print(f"K = {gain:g}: {RES}x{RES} nodes in {dt:.2f}s ->", basin.counts())

    # labels index into the record list; -1 means no equilibrium was reached
    img = ax.pcolormesh(basin.xs, basin.ys, basin.labels,
                        cmap="tab10", vmin=-1.5, vmax=8.5)
    for rec, name in zip(basin.equilibria, basin.label_names):
        mark = "*" if rec.classification == tf.STABLE else "x"
        ax.plot(*rec.position, mark, color="white", ms=11, mew=2)
        ax.plot(*rec.position, mark, color="black", ms=9, mew=1)
        ax.annotate(name, rec.position, textcoords="offset points",
                    xytext=(7, 5), fontsize=9, color="black")
    ax.plot([-1, 1], [0, 0], "k^", ms=9)
    ax.set_title(f"K = {gain:g}")
    ax.set_xlabel("start x")
    ax.set_aspect("equal")

axes[0].set_ylabel("start y")
os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
out = os.path.join(os.path.dirname(__file__), "out", "high_gain_basin.png")
fig.savefig(out, dpi=150, bbox_inches="tight")
print("wrote", out)

# the same sampler also writes a plain-text map for offline inspection
params = tf.CanonicalTriangleParams(a=0.0, b=6.0, c=1.0, gain=1.0)
basin = tf.basin_sample(params, WINDOW, 11, None, tf.enumerate_isosceles(params))
txt = os.path.join(os.path.dirname(__file__), "out", "basin_k1.txt")
tf.write_basin(basin, txt)
print("wrote", txt)

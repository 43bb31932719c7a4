# Signed area is the quantity that separates a formation from its mirror
# image: every distance survives a reflection, the area's sign does not.
# This walk-through computes a few areas by hand, then shows the formation
# validator catching a flipped agent that a pure distance check would miss.

import numpy as np

import triform as tf

# counterclockwise triangle: positive area
p1, p2, p3 = [-3.0, 0.0], [3.0, 0.0], [0.0, 3.0]
print("area(p1, p2, p3)        =", tf.signed_area(p1, p2, p3))
# swapping two vertices reverses orientation
print("area(p2, p1, p3)        =", tf.signed_area(p2, p1, p3))
# the magnitude agrees with Heron's formula on the side lengths
sides = (
    np.linalg.norm(np.subtract(p2, p1)),
    np.linalg.norm(np.subtract(p3, p2)),
    np.linalg.norm(np.subtract(p1, p3)),
)
print("heron on the same sides =", tf.heron_area(*sides))
print()

# The bundled 8-agent formation: a triangulated graph where each clique
# carries a desired signed area next to its desired distances.
sc = tf.bundled_scenario()
spec = sc.spec
print(f"bundled spec: {spec.agent_count} agents, {len(spec.edges)} edges,",
      f"{len(spec.cliques)} cliques")
print("validator says:", tf.validate_spec(spec))
print()

# A state can satisfy every distance and still be the wrong shape.  Take
# the desired placement and reflect agent 5 across the line through its
# two neighbors (agents 1 and 4): both legs keep their length exactly.
desired = np.array([
    [0.0, 3.0], [0.0, -3.0], [-3.0, 0.0], [3.0, 0.0],
    [3.0, 3.0], [3.0, -3.0], [-3.0, -3.0], [-3.0, 3.0],
])
flipped = desired.copy()
flipped[4] = [0.0, 0.0]  # mirror image of (3, 3) across the 1-4 diagonal

for name, state in (("desired", desired), ("flipped", flipped)):
    check = tf.target_membership(state, spec, 1e-6)
    d15 = np.linalg.norm(state[4] - state[0])
    d45 = np.linalg.norm(state[4] - state[3])
    print(f"{name}: |p5-p1| = {d15:.12g}, |p5-p4| = {d45:.12g},",
          f"in target = {check.in_target}, worst residual = {check.max_residual:.3g}")

# The flipped state passes both leg distances to machine precision; only
# the clique's signed-area residual (-9 = flipped orientation) exposes it.
bad = tf.target_membership(flipped, spec, 1e-6)
worst_clique = max(bad.clique_residuals.items(), key=lambda kv: abs(kv[1]))
print("largest clique residual:", worst_clique)

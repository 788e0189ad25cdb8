# The square lattice G_L and its dual.
#
# Vertices are numbered row-major, edges horizontals-then-verticals.
# The dual has one vertex per inner face plus one for the outer face, and
# exactly one dual edge crossing every primal edge.

import numpy as np

from exact_ising import build_dual, build_square_lattice, connected_components, dual_rc_state

L = 3
G = build_square_lattice(L)
D, dual_map = build_dual(L)

print(f"G_{L}: {G.vertex_count} vertices, {G.edge_count} edges")
print("degrees:\n", G.degree().reshape(L, L))
print("missing Z^2 neighbours (phantoms under a +/- boundary):\n",
      G.boundary_deficiency.reshape(L, L))

# The dual is G_{L-1} plus the outer-face vertex; corner faces touch the
# outside twice, so they carry two parallel edges to it.
print(f"\ndual: {D.vertex_count} vertices (outer face = {D.aux_vertex}), {D.edge_count} edges")
for e, (a, b) in enumerate(G.edges.tolist()):
    d = dual_map.primal_to_dual[e]
    print(f"  primal edge {e:2d} {G.coords(a)}-{G.coords(b)}  crossed by dual edge {d:2d} "
          f"{tuple(D.edges[d].tolist())}")

# A bond configuration and its dual: e* is open exactly when e is closed.
omega = np.zeros(G.edge_count, dtype=bool)
omega[[0, 3, 6, 7, 9]] = True
omega_star = dual_rc_state(omega, dual_map)
print("\nomega  :", omega.astype(int), "clusters:", connected_components(G, omega).component_count)
print("omega* :", omega_star.astype(int), "clusters:", connected_components(D, omega_star).component_count)
# Euler: faces of (V, omega) = |omega| - N + C(omega) + 1 = C(omega*)
print("Euler check:", omega.sum() - G.vertex_count + connected_components(G, omega).component_count + 1)

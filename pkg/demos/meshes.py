# Boundary meshes of U_3 and the Meissner bodies.
#
# Each vertex is the boundary point with a given outer normal; triangles are
# coloured by the case region of their normal.  U_3 shows four spherical
# caps (case I) and two cut surfaces along each of the six edges (case IIb).

import sys

from constwidth import bodies, mesh
from constwidth.volume import volume_u3

exact = volume_u3().volume
for k in range(3, 8):
    m = mesh.generate_mesh(bodies.u3(), k)
    v = mesh.mesh_volume(m)
    print(f"subdivisions {k}: {len(m.triangles):7d} triangles, volume {v:.6f}, rel. error {v / exact - 1:+.1e}")

m = mesh.generate_mesh(bodies.u3(), 6)
print("patches per region:", mesh.label_census(m))

# %% write the mesh; open it in any viewer that understands OBJ materials
out = sys.argv[1] if len(sys.argv) > 1 else "u3.obj"
mesh.export_mesh(m, "obj", out)
print("wrote", out)

# Property checks: constant width, symmetry, convexity and curvature.
#
# A body of constant width 2 has h(x) + h(-x) = 2 in every direction.  A
# local volume minimizer among such bodies has smallest principal curvature
# 1/2 on its smooth pieces, and U_3 and both Meissner bodies pass that test.

from constwidth import bodies, verify
from constwidth.bodies import BodyKind, BodySpec

for body in (BodySpec(BodyKind.M, 6), BodySpec(BodyKind.U, 4), bodies.u3(), bodies.meissner_b()):
    r = verify.check_constant_width(body, 10**5, seed=0)
    print(f"{r.name:32s} max |h(x) + h(-x) - 2| = {r.max_violation:.1e}")

# %% U_3 is invariant under all 24 permutations of the tetrahedron vertices
r = verify.check_symmetry(bodies.u3(), 10**4)
print(f"{r.name:32s} {r.details['group_size']} maps, max change {r.max_violation:.1e}")

# %% the two Meissner bodies are not mirror images of each other
swap = verify.check_meissner_swap(10**4)
local = verify.check_meissner_local_identity(10**4)
print(f"odd permutation A -> B: best residual {swap.max_violation:.3f} (fails)")
print(f"local identity on the cap around an edge: {local.max_violation:.1e}")

# %% curvature on the smooth pieces
for body, region in ((bodies.u3(), "I"), (bodies.u3(), "IIb"), (bodies.meissner_a(), "rounded")):
    r = verify.check_curvature(body, region, 500)
    print(f"{r.name:32s} mean kappa_min {r.details['mean_kappa_min']:.6f}")

# %% a broken support function is caught
bad = verify.corrupted_u3()
print("corrupted body passes width?", verify.check_constant_width(bad, 1000).passed)
print("corrupted body passes convexity?", verify.check_convexity(bad, 1000).passed)

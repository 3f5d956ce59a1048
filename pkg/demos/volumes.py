# Volumes of U_3, the Meissner bodies and their Minkowski average.
#
# All three have constant width 2, so each volume is 4 pi / 3 minus an
# integral of the support function over the sphere.  We evaluate that
# integral through the dedicated chart integrals and, independently,
# through a generic evaluator that only sees h.

import math

from constwidth import bodies, volume

ball = 4 * math.pi / 3

# %% U_3 by the case decomposition and by the one-dimensional formula
cases = volume.volume_u3("cases")
theorem = volume.volume_u3("theorem")
print(f"Vol(U_3)          = {cases.volume:.15f}")
print(f"ratio to ball     = {cases.ratio_to_ball:.17f}")
print(f"1-D formula       = {theorem.ratio_to_ball:.17f}")

# %% the pieces: I1 has a closed form, I2 a one-dimensional rewrite
print(f"I1 closed / quad  = {volume.I1_closed():.15f} / {volume.I1_quad().value:.15f}")
print(f"I2 direct / rearr = {volume.I2_quad().value:.15f} / {volume.I2_rearranged():.15f}")

# %% Meissner bodies and the average of the two
meissner = volume.volume_meissner_closed()
average = volume.volume_meissner_average()
print(f"Meissner ratio    = {meissner.ratio_to_ball:.10f}")
print(f"average ratio     = {average.ratio_to_ball:.12f}")
print(f"U_3 exceeds Meissner by     {100 * (cases.volume / meissner.volume - 1):.4f} %")
print(f"average exceeds Meissner by {100 * (average.volume / meissner.volume - 1):.4f} %")

# %% generic evaluator with finite-difference gradients, as a cross-check
generic = volume.ag_volume_generic(bodies.support_u3_ab)
print(f"generic U_3 ratio = {generic.ratio_to_ball:.10f} ({generic.evaluations} evaluations)")
print(f"unit ball         = {volume.ag_volume_generic(lambda t: 1.0 + 0 * t[..., 0]).volume / ball:.1f}")

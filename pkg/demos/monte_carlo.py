# Monte Carlo volumes of M_n and U_n.
#
# Points are drawn in the ball of radius sqrt 2, which contains every body
# here.  Results depend on the seed only, not on the number of threads.

import os

from constwidth import montecarlo
from constwidth.volume import volume_u3

workers = os.cpu_count()

# %% U_3 by sampling, against the quadrature value
est = montecarlo.estimate_volume_U(3, 200_000, seed=0, workers=workers)
print(f"Vol_MC(U_3) = {est.volume:.4f} +- {est.std_error:.4f}   quadrature {volume_u3().volume:.5f}")

# %% M_4 sits above U_3: every fibre over U_3 has length at most 2
m4 = montecarlo.estimate_volume_M(4, 10**6, seed=0, workers=workers)
print(f"Vol_MC(M_4) = {m4.volume:.4f} +- {m4.std_error:.4f}")

# %% n-th root of Vol(M_n) / Vol(B^n); reported with 3-sigma bounds, no trend asserted
print(" n   ratio_root   3-sigma interval")
for row in montecarlo.ratio_trend(2, 10, 10**6, seed=0, workers=workers):
    print(f"{row['n']:2d}   {row['ratio_root']:.5f}      [{row['ratio_root_lo']:.5f}, {row['ratio_root_hi']:.5f}]")

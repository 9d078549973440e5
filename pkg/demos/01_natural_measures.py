"""Self-similar systems and their natural measures.

Builds the four bundled systems, evaluates ball and slab masses with
certified intervals, and checks the sampler against the interval oracle.
"""

import numpy as np

from fracapprox.geometry import Ball, Hyperplane, Slab
from fracapprox.ifs import (
    bundled_system,
    measure_of_ball,
    measure_of_slab_in_ball,
    sample_measure,
)

for name in ("cantor", "gasket", "dust", "koch"):
    sys_ = bundled_system(name)
    print(f"{name:>7}: d={sys_.dim}  k={sys_.k}  delta={sys_.delta:.6f}  "
          f"moran residual={sys_.moran_residual():.2e}")

cantor = bundled_system("cantor")

# the left third of the unit interval carries exactly half the mass
iv = measure_of_ball(cantor, Ball([1 / 6], 1 / 6), 1e-6)
print(f"\nmu([0,1/3]) in [{iv.lo:.9f}, {iv.hi:.9f}]  (width {iv.width:.1e})")

# the middle-third gap carries none
gap = Slab(Hyperplane([1.0], 0.5), 1 / 18)
iv_gap = measure_of_slab_in_ball(cantor, Ball([0.5], 1.0), gap, 1e-6)
print(f"mu(gap slab [4/9,5/9]) in [{iv_gap.lo:.1e}, {iv_gap.hi:.1e}]")

# Monte Carlo agrees with the interval oracle
pts = sample_measure(cantor, 100_000, seed=1)[:, 0]
print(f"\nsampler: mean={pts.mean():.4f} (symmetry gives 1/2)")
for radius in (0.1, 0.25):
    center = 1 / 3
    emp = float((np.abs(pts - center) <= radius).mean())
    oracle = measure_of_ball(cantor, Ball([center], radius), 1e-5)
    print(f"  mu(B(1/3, {radius})) empirical={emp:.4f}  "
          f"oracle=[{oracle.lo:.4f}, {oracle.hi:.4f}]")

# rotations are handled the same way
koch = bundled_system("koch")
iv_k = measure_of_ball(koch, Ball([0.5, 0.1], 0.2), 1e-4)
print(f"\nkoch ball mass in [{iv_k.lo:.5f}, {iv_k.hi:.5f}] "
      f"(depth {iv_k.depth})")

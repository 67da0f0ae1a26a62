# Population dynamics for the p -> c limit, against its closed-form moments.
import numpy as np

from erratic.harness import wasserstein1
from erratic.limit_laws import contraction_constant, mean_var_Xc, sample_Xc_pool
from erratic.noisy_sort import sample_X_np

rng = np.random.default_rng(3)
for c in (0.0, 0.25, 0.5, 0.75, 1.0):
    pool = sample_Xc_pool(c, 50_000, 40, rng)
    m, v = mean_var_Xc(c)
    print(f"c={c}: pool mean {pool.samples.mean():.5f} (exact {m:.5f})  var {pool.samples.var():.6f} (exact {v:.6f})"
          f"  contraction {contraction_constant(c):.3f}")

c = 0.25
pool = sample_Xc_pool(c, 50_000, 60, rng)
x = sample_X_np(3000, c, rng, 2000)
print("d1 between 2000 sorts at n=3000 and the pool:", round(wasserstein1(x, pool.draw(2000, rng)), 4))

ref = sample_Xc_pool(0.0, 50_000, 60, rng).samples
for m in (2, 4, 8, 16):
    d = wasserstein1(sample_Xc_pool(0.0, 50_000, m, rng).samples, ref)
    print(f"generation {m:2d}: d1 to generation 60 = {d:.5f}, (2/3)^m = {(2 / 3) ** m:.5f}")

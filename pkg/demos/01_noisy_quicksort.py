# One erratic Quicksort run, then the inversion count across error rates.
import numpy as np

from erratic.inversions import toll_mean_formula
from erratic.noisy_sort import ErrorModel, first_step_toll, noisy_quicksort, sample_X_np

rng = np.random.default_rng(7)
perm = rng.permutation(20) + 1
trace = noisy_quicksort(perm, ErrorModel(0.1, rng))
print("input :", perm)
print("output:", trace.output)
print("inversions per recursion depth:", trace.per_step_inversions, "total", trace.inversions)
print("first pivot", trace.first_step.pivot_rank, "lands at", trace.first_step.z)

n = 2000
for p in (0.25, 0.5, 0.75):
    x = sample_X_np(n, p, rng, 300)
    print(f"p={p}: I/(n^2 p) mean {x.mean():.4f}  sd {x.std():.4f}")

s_ell, s_r, toll = first_step_toll(200, 0.05, rng, 20000)
print("first-step toll: sample mean", toll.mean(), " formula", toll_mean_formula(200, 0.05))

# The n p -> lam regime: exact moment polynomials next to the tree-and-marks sampler.
import numpy as np

from erratic.limit_laws import sample_X_lambda, sample_X_lambda_one_step
from erratic.moments import X_lambda_moments, X_lambda_variance_poly, mergesort_series
from erratic.noisy_sort import sample_X_np, sample_mergesort_X

M = X_lambda_moments(4)
for n, poly in enumerate(M):
    print(f"lam^{n} E[X^{n}] =", poly)
print("lam^2 Var X =", X_lambda_variance_poly())

rng = np.random.default_rng(5)
lam = 2.0
x = sample_X_lambda(lam, 25, rng, 50_000)
for n in (1, 2, 3):
    print(f"E[X^{n}] at lam=2: sampled {np.mean(x**n):.4f}, exact {float(M[n](2)) / 2**n:.4f}")

comp = sample_X_lambda_one_step(lam, 25, rng, 50_000)
print("one-step composite quantiles:", np.round(np.quantile(comp, [0.1, 0.5, 0.9]), 3))
print("direct draws quantiles:      ", np.round(np.quantile(x, [0.1, 0.5, 0.9]), 3))

sim = sample_X_np(5000, lam / 5000, rng, 2000)
print(f"quicksort at n=5000: mean {sim.mean():.4f}, var {sim.var():.4f} (limit {1 / 12 + 1 / 6:.4f})")
ms = sample_mergesort_X(4096, lam / 4096, rng, 2000)
print(f"merge sort at n=4096: mean {ms.mean():.4f}, half of it {ms.mean() / 2:.4f}; series constant {mergesort_series():.6f}")

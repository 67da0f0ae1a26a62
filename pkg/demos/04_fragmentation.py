# The uniform splitting tree: widths, the martingale, the maximal width and the FIND area.
import numpy as np

from erratic.fragmentation import build_tree, level_statistics, sample_X_hat, x_hat_of_tree
from erratic.limit_laws import solve_rho

rng = np.random.default_rng(11)
tree = build_tree(4, rng)
for k, level in enumerate(tree.levels):
    print(k, np.round(level, 3))

stats = level_statistics(10, rng, 20_000)
rho = solve_rho()
print(" k   mean w^2    3^-k     F_k,2   E[M_k]  rho^k")
for k in range(11):
    print(f"{k:2d}  {stats['mean_sq_width'][:, k].mean():.3e}  {3.0**-k:.3e}  {stats['F'][2.0][:, k].mean():.4f}"
          f"  {stats['max_width'][:, k].mean():.4f}  {rho**k:.4f}")

print("half area of one depth-4 tree:", round(x_hat_of_tree(tree), 4))
x = sample_X_hat(25, rng, 20_000)
print(f"X-hat: mean {x.mean():.4f} (limit 1), variance {x.var():.4f} (limit {1 / 12:.4f})")

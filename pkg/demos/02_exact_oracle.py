# Exact expectations by enumeration, held against simulation.
from fractions import Fraction

import numpy as np

from erratic.inversions import exact_expected_inversions, exact_expected_toll, toll_mean_formula
from erratic.noisy_sort import quicksort_inversions

rng = np.random.default_rng(0)
for n in range(2, 6):
    for p in (Fraction(1, 4), Fraction(1, 2)):
        exact = exact_expected_inversions(n, p)
        sim = quicksort_inversions(n, float(p), rng, 200_000)
        print(f"n={n} p={p}: exact {exact} = {float(exact):.4f}, simulated {sim.mean():.4f}")

print()
for n in (3, 4, 5):
    p = Fraction(1, 3)
    print(f"toll n={n}: enumeration {exact_expected_toll(n, p)}, closed form {toll_mean_formula(n, p)}")

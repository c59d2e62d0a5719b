"""Cross-validate the signature machinery on a quantity with two routes.

The average of |theta . a| over uniform random signs theta is computable
by direct enumeration. It is also the optimum of a linear program over
realizable two-signal signatures constrained to fire each signal with
probability 1/2: the optimal scheme announces the sign of theta . a.
Agreement between the two routes exercises the realizable-signature
polytope end to end, which is exactly why the LP route exists here.
"""

import numpy as np

from persuasion import khintchine_constant, khintchine_lp_witness, solve_khintchine_lp

print(f"{'vector':<28} {'enumerated':>12} {'signature LP':>13}")
for a in ([1.0], [1.0, 1.0], [3.0, 1.0, 1.0]):
    print(f"{str(a):<28} {khintchine_constant(a):>12.8f} "
          f"{solve_khintchine_lp(a):>13.8f}")

rng = np.random.default_rng(17)
worst = 0.0
for _ in range(12):
    a = rng.uniform(-2.0, 2.0, int(rng.integers(1, 8)))
    worst = max(worst, abs(solve_khintchine_lp(a) - khintchine_constant(a)))
print(f"\nmax |LP - enumeration| over 12 random vectors: {worst:.2e}")

a = np.array([0.8, -1.3, 0.4])
value, sig, phi = khintchine_lp_witness(a)
print(f"\nwitness for a = {a.tolist()}: value {value:.8f}")
print(f"signal probabilities: {np.round(sig.plus.sum(axis=1) + 0.0, 9)} (each 1/2)")
print("per-state scheme rows follow the sign of theta . a:")
from persuasion.khintchine import sign_dot_products

dots = sign_dot_products(a)
agree = np.all((phi[:, 0] > 0.5) == (dots > 0))
print(f"  first-signal mass aligns with positive dot products: {agree}")

"""Equal-angle planar sets against random directions.

Prints the empirical mean squared error of both schemes next to their exact
expectations.  The equal-angle error falls like 1/n^4, the random one like 1/n.
"""

import numpy as np

from optproj import approximator, objective, optimizer

print(f"{'n':>5} {'ratio':>10} {'C_n':>10} {'opt mse':>10} {'exact':>10} {'mc mse':>10} {'exact':>10}")
for n in (2, 4, 8, 16, 32, 64, 128, 256):
    ds = optimizer.exact_directions_2d(n)
    rep = objective.report(ds)
    opt = approximator.mse_experiment("optimal-2d", 2, n, test_vectors=20_000).mse
    mc = approximator.mse_experiment("monte-carlo", 2, n, test_vectors=1000, trials=50).mse
    print(f"{n:5d} {rep.ratio:10.6f} {rep.c_n:10.6f} {opt:10.3e} "
          f"{approximator.mse_optimal_2d(n):10.3e} {mc:10.3e} {approximator.mse_monte_carlo_2d(n):10.3e}")

# n^4 times the exact error approaches 7 pi^4 / 3840
for n in (16, 64, 256):
    print(n, n ** 4 * approximator.mse_optimal_2d(n), 7 * np.pi ** 4 / 3840)

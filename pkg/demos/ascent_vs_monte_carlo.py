"""Coordinate ascent in higher dimensions, compared with random directions."""

import time

from optproj import approximator, objective, optimizer

cfg = optimizer.OptimizerConfig(restarts=8, seed=0)
print(f"{'p':>3} {'n':>3} {'ratio':>8} {'wce':>8} {'ascent mse':>11} {'mc mse':>9} {'secs':>5}")
for p, n in [(3, 4), (3, 8), (4, 8), (5, 8), (7, 8), (4, 10)]:
    t0 = time.perf_counter()
    ds, trace = optimizer.coordinate_ascent(p, n, cfg)
    secs = time.perf_counter() - t0
    rep = objective.report(ds)
    ours = approximator.mse_experiment("ascent", p, n, directions=ds).mse
    print(f"{p:3d} {n:3d} {rep.ratio:8.4f} {rep.worst_case_error:8.4f} {ours:11.3e} "
          f"{approximator.mse_monte_carlo(p, n):9.3e} {secs:5.1f}")

# With n = p the optimum is an orthonormal basis.  Its scale minimizes the
# worst case, not the mean, so from p = 9 on random directions win on average.
for p in range(6, 12):
    print(p, f"{approximator.mse_orthonormal(p):.4f}", f"{approximator.mse_monte_carlo(p, p):.4f}")

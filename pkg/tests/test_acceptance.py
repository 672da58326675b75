"""Acceptance criteria 1-9.

Each ``criterion_k`` returns ``(ok, detail)``; the pytest wrappers print one
PASS/FAIL line per criterion and fail on FAIL.  Running this file directly
prints the same lines without pytest.
"""

import math
import statistics
import sys
import time

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from optproj import approximator, energy, objective, optimizer
from optproj.approximator import mse_experiment
from optproj.objective import DirectionSet

from conftest import random_unit, rotation
from oracles import grid_extrema

RESULTS = {}


def _line(k, ok, detail):
    return f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}"


def record(k, ok, detail):
    RESULTS[k] = (ok, detail)
    print(_line(k, ok, detail))
    assert ok, detail


# -- 1 -----------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    worst_r = worst_c = 0.0
    for n in range(2, 17):
        rep = objective.report(optimizer.exact_directions_2d(n))
        worst_r = max(worst_r, abs(rep.ratio - optimizer.closed_form_ratio_2d(n)))
        worst_c = max(worst_c, abs(rep.c_n - 2 * math.tan(math.pi / (4 * n))))
    dt = time.perf_counter() - t0
    ok = worst_r <= 1e-9 and worst_c <= 1e-9 and dt < 1.0
    return ok, f"max ratio gap {worst_r:.1e}, max C_n gap {worst_c:.1e}, {dt:.2f} s"


# -- 2 -----------------------------------------------------------------------

def criterion_2():
    rng = np.random.default_rng(2)
    basis_gap = rot_gap = 0.0
    for p in range(2, 11):
        target = math.sqrt(p) / p
        basis_gap = max(basis_gap, abs(objective.report(optimizer.exact_directions_np(p)).ratio - target))
        for _ in range(20):
            q = rotation(rng, p)
            rot_gap = max(rot_gap, abs(objective.report(q).ratio - target))
    ok = basis_gap <= 1e-12 and rot_gap <= 1e-9
    return ok, f"basis gap {basis_gap:.1e}, rotated gap {rot_gap:.1e}"


# -- 3 and 4 -----------------------------------------------------------------

def criterion_3():
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in (64, 256):
        mse = mse_experiment("optimal-2d", 2, n, test_vectors=10_000, seed=3).mse
        q = mse / (math.pi ** 2 / (8 * n * n))
        ok &= 0.75 <= q <= 1.25
        parts.append(f"n={n} mse/target={q:.2e}")
    dt = time.perf_counter() - t0
    ok &= dt < 30
    return ok, ", ".join(parts) + f", {dt:.1f} s"


def criterion_4():
    t0 = time.perf_counter()
    parts, ok = [], True
    for n in (64, 256):
        mse = mse_experiment("monte-carlo", 2, n, test_vectors=1000, trials=50, seed=4).mse
        q = mse / ((math.pi ** 2 - 8) / (8 * n))
        ok &= 0.75 <= q <= 1.25
        parts.append(f"n={n} mse/target={q:.3f}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    return ok, ", ".join(parts) + f", {dt:.1f} s"


# -- 5 -----------------------------------------------------------------------

def dominance_configs():
    out = [("optimal-2d", 2, n) for n in (8, 32, 128)]
    out += [("orthonormal", p, p) for p in range(8, 12)]
    out += [("ascent", p, n) for n in range(8, 12) for p in range(3, n)]
    return out


def criterion_5():
    losses = []
    for scheme, p, n in dominance_configs():
        ours = mse_experiment(scheme, p, n, test_vectors=10_000, seed=5).mse
        mc = mse_experiment("monte-carlo", p, n, test_vectors=1000, trials=50, seed=5).mse
        if not ours < mc:
            losses.append(f"{scheme} p={p} n={n} ({ours:.4f} vs MC {mc:.4f})")
    total = len(dominance_configs())
    detail = f"{total - len(losses)}/{total} configurations beat Monte Carlo"
    if losses:
        detail += "; losses: " + "; ".join(losses)
    return not losses, detail


# -- 6 -----------------------------------------------------------------------

def _blocked_abs_sum(x, y, block=1000):
    return math.fsum(np.abs(x[i:i + block, None] - y[None, :]).sum()
                     for i in range(0, x.size, block))


def criterion_6():
    rng = np.random.default_rng(6)
    ext_gap = 0.0
    for k in range(50):
        p = 2 if k < 25 else 3
        n = int(rng.integers(p, 7))
        u = random_unit(rng, n, p)
        rep = objective.report(u)
        gmin, gmax = grid_extrema(u)
        ext_gap = max(ext_gap, abs(rep.v_min_value - gmin), abs(rep.v_max_value - gmax))
    sum_gap = 0.0
    sizes = np.unique(np.geomspace(1, 10_000, 100).astype(int))
    sizes = np.concatenate([sizes, np.full(100 - sizes.size, 10_000)])
    for k, m in enumerate(sizes):
        if k % 3 == 0:
            x = rng.integers(-5, 5, m).astype(float)  # heavy ties
        else:
            x = rng.standard_normal(m) * 10.0 ** rng.uniform(-3, 3)
        y = rng.standard_normal(max(1, m // 2)) + 0.5
        for fast, slow in ((energy.pairwise_abs_sum_within(x), _blocked_abs_sum(x, x)),
                           (energy.pairwise_abs_sum_cross(x, y), _blocked_abs_sum(x, y))):
            if slow:
                sum_gap = max(sum_gap, abs(fast - slow) / abs(slow))
            else:
                sum_gap = max(sum_gap, abs(fast))
    ok = ext_gap <= 1e-4 and sum_gap <= 1e-10
    return ok, f"extreme gap {ext_gap:.1e} over 50 sets, pairwise-sum rel gap {sum_gap:.1e} over 100 inputs"


# -- 7 -----------------------------------------------------------------------

def generated_sets():
    sets = [optimizer.exact_directions_2d(n) for n in range(2, 17)]
    sets += [optimizer.exact_directions_np(p) for p in range(2, 11)]
    sets += [approximator.mc_directions(p, n, seed=7) for p, n in ((2, 8), (3, 8), (5, 9))]
    cfg = optimizer.OptimizerConfig(restarts=2)
    sets += [optimizer.coordinate_ascent(p, n, cfg)[0] for p, n in ((3, 5), (4, 6))]
    return sets


def envelope(ds):
    """Worst-case error of ``ds`` at its own scale and the two certificate vectors."""
    rep = objective.report(ds)
    s = ds.scale
    bound = max(abs(s * rep.v_min_value - 1), abs(s * rep.v_max_value - 1))
    v_hi = rep.sign_pattern.as_array() @ ds.directions
    return bound, rep, [rep.certificate.v_min, v_hi / np.linalg.norm(v_hi)]


def criterion_7():
    rng = np.random.default_rng(7)
    excess, attain = -math.inf, 0.0
    sets = generated_sets()
    for ds in sets:
        bound, rep, certs = envelope(ds)
        if math.isclose(ds.scale, rep.c_n, rel_tol=1e-12):
            assert abs(bound - rep.worst_case_error) < 1e-12
        v = random_unit(rng, 10_000, ds.p)
        err = np.abs(approximator.approx_norm(ds, v) - 1)
        excess = max(excess, float(err.max() - bound))
        cert_err = max(abs(approximator.approx_norm(ds, c) - 1) for c in certs)
        attain = max(attain, abs(cert_err - bound))
    ok = excess <= 1e-10 and attain <= 1e-6
    return ok, (f"{len(sets)} sets, max excess over envelope {excess:.1e}, "
                f"certificate gap {attain:.1e}")


# -- 8 -----------------------------------------------------------------------

def _distance_terms(X, Y):
    n1, n2 = len(X), len(Y)
    return (2 * cdist(X, Y).sum() / (n1 * n2) + cdist(X, X).sum() / n1 ** 2
            + cdist(Y, Y).sum() / n2 ** 2)


def criterion_8():
    parts, ok = [], True
    monotone = True
    for n in (3, 5, 7):
        _, tr = optimizer.coordinate_ascent(2, n, optimizer.OptimizerConfig(restarts=8))
        monotone &= all(np.all(np.diff(r) >= 0) for r in tr.restart_ratios)
        gap = optimizer.closed_form_ratio_2d(n) - tr.ratios[-1]
        ok &= gap <= 1e-3
        parts.append(f"n={n} gap {gap:.1e}")
    cfg = optimizer.OptimizerConfig(restarts=2)
    pool = {1: [DirectionSet(np.eye(1), 1.0)], 2: [optimizer.exact_directions_2d(k) for k in (2, 5, 8)]}
    for p in (3, 4, 5):
        ds, tr = optimizer.coordinate_ascent(p, p + 2, cfg)
        monotone &= all(np.all(np.diff(r) >= 0) for r in tr.restart_ratios)
        pool[p] = [ds, optimizer.exact_directions_np(p)]
    rng = np.random.default_rng(8)
    excess = -math.inf
    for k in range(100):
        p = int(rng.integers(1, 6))
        ds = pool[p][k % len(pool[p])]
        n1, n2 = (int(a) for a in rng.integers(2, 101, 2))
        X = rng.standard_normal((n1, p)) * rng.uniform(0.2, 3)
        Y = rng.standard_normal((n2, p)) * rng.uniform(0.2, 3) + rng.uniform(-1, 1, p)
        wce = objective.report(ds).worst_case_error if p > 1 else 0.0
        diff = abs(energy.energy_statistic_projected(X, Y, ds).value
                   - energy.energy_statistic_exact(X, Y).value)
        excess = max(excess, diff - (wce * _distance_terms(X, Y) + 1e-10))
    ok &= monotone and excess <= 0
    parts.append(f"traces monotone: {monotone}")
    parts.append(f"energy bound slack {-excess:.1e} on 100 datasets")
    return ok, ", ".join(parts)


# -- 9 -----------------------------------------------------------------------

def _median_time(fn, reps=5):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def criterion_9():
    rng = np.random.default_rng(9)
    line = DirectionSet(np.eye(1), 1.0)

    def projected(m):
        x, y = rng.standard_normal(m // 2), rng.standard_normal(m - m // 2) + 0.1
        return lambda: energy.energy_statistic_projected(x, y, line)

    t1 = _median_time(projected(100_000))
    t2 = _median_time(projected(200_000))
    X, Y = rng.standard_normal((10_000, 3)), rng.standard_normal((10_000, 3)) + 0.1
    ds = approximator.mc_directions(3, 8, seed=9)
    t_exact = _median_time(lambda: energy.energy_statistic_exact(X, Y), reps=1)
    t_proj = _median_time(lambda: energy.energy_statistic_projected(X, Y, ds))
    ok = t2 / t1 < 2.5 and t_exact >= 10 * t_proj
    return ok, (f"doubling m costs x{t2 / t1:.2f}, exact/projected at m=2e4 is "
                f"x{t_exact / t_proj:.0f}")


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 10)}


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    ok, detail = CRITERIA[k]()
    record(k, ok, detail)


if __name__ == "__main__":
    failed = 0
    for k, fn in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(_line(k, ok, detail), flush=True)
    sys.exit(1 if failed else 0)

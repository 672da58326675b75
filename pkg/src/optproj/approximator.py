"""Norm estimates from 1-D projections and their mean squared error.

A direction set estimates ``||x||`` by ``scale * sum_i |u_i . x|``.  The
Monte Carlo baseline draws the directions uniformly on the sphere and uses
``scale = C'_p / n`` with ``C'_p = sqrt(pi) Gamma((p+1)/2) / Gamma(p/2)``,
which makes the estimate unbiased.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry, optimizer
from .errors import DimensionMismatch, InvalidShape
from .objective import DirectionSet

SCHEMES = ("optimal-2d", "orthonormal", "ascent", "monte-carlo")


@dataclass(frozen=True)
class MSEReport:
    scheme: str
    p: int
    n: int
    trials: int
    test_vectors: int
    mse: float
    seed: int

    def as_row(self):
        return asdict(self)


def approx_norm(ds, x):
    """``ds.scale * sum_i |u_i . x|``; rows of a 2-D ``x`` are estimated separately."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != ds.p:
        raise DimensionMismatch(f"vector has dimension {x.shape[-1]}, directions have {ds.p}")
    proj = np.abs(x @ ds.directions.T)
    if x.ndim == 1:
        return float(ds.scale * proj.sum())
    return ds.scale * proj.sum(axis=-1)


def mc_constant(p):
    """``sqrt(pi) Gamma((p+1)/2) / Gamma(p/2)`` by the half-integer recursion.

    ``C'_1 = 1``, ``C'_2 = pi / 2`` and ``C'_{p+2} = C'_p (p + 1) / p``.
    """
    if p < 1:
        raise InvalidShape("p must be at least 1")
    c = 1.0 if p % 2 else math.pi / 2
    for q in range(2 - p % 2, p, 2):
        c *= (q + 1) / q
    return c


# Taylor coefficients of 3/2 + t^2 + t^4/2 - (3t + t^3) / (2x), t = tan x, in powers
# x^4, x^6, ...; the constant and x^2 terms cancel exactly
_MSE_2D_SERIES = (7 / 15, 188 / 315, 502 / 945, 8848 / 22275, 324419 / 1216215,
                  35397196 / 212837625, 21746206 / 221524875,
                  103105745312 / 1856156927625, 658181431274 / 21655164155625,
                  22795829385688 / 1408823108067375)


def mse_optimal_2d(n):
    """Exact mean squared error of the equal-angle planar set over uniform unit ``v``.

    ``2 t^2 c^2 + (4n / pi) t^2 c + 2 t^2 - (8n / pi) t + 1`` with
    ``t = tan(pi / 4n)`` and ``c = cot(pi / 2n)``.  The leading terms cancel;
    the expansion starts at ``7 pi^4 / (3840 n^4)``.  For ``n >= 8`` the sum
    is taken from its power series in ``x = pi / 4n`` to avoid the cancellation.
    """
    if n < 2:
        raise InvalidShape("n must be at least 2")
    x = math.pi / (4 * n)
    if n >= 8:
        x2 = x * x
        acc = 0.0
        for a in reversed(_MSE_2D_SERIES):
            acc = acc * x2 + a
        return acc * x2 * x2
    t = math.tan(x)
    return 1.5 + t * t + t ** 4 / 2 - (3 * t + t ** 3) / (2 * x)


def mse_monte_carlo_2d(n):
    """Expected squared error of ``n`` random planar directions: ``(pi^2 - 8) / (8n)``."""
    return (math.pi ** 2 - 8) / (8 * n)


def mse_monte_carlo(p, n):
    """Expected squared error of the Monte Carlo estimate: ``(C'_p^2 / p - 1) / n``.

    The estimate is unbiased and ``E (u . v)^2 = 1 / p`` for uniform ``u``,
    so only the variance of ``n`` independent terms remains.
    """
    if p < 1 or n < 1:
        raise InvalidShape("p and n must be at least 1")
    return (mc_constant(p) ** 2 / p - 1.0) / n


def mse_orthonormal(p):
    """Expected squared error of the scaled standard basis over uniform unit ``v``.

    With ``s = 2 / (1 + sqrt(p))``, ``E sum |v_i| = p / C'_p`` and
    ``E (sum |v_i|)^2 = 1 + 2 (p - 1) / pi``.
    """
    if p < 1:
        raise InvalidShape("p must be at least 1")
    s = 2.0 / (1.0 + math.sqrt(p))
    return s * s * (1.0 + 2.0 * (p - 1) / math.pi) - 2.0 * s * p / mc_constant(p) + 1.0


def _rng(seed, *keys):
    return np.random.default_rng(np.random.SeedSequence([seed, *keys]))


def mc_directions(p, n, seed):
    """``n`` i.i.d. uniform directions on S^{p-1} scaled by ``C'_p / n``."""
    if p < 1 or n < 1:
        raise InvalidShape("p and n must be at least 1")
    u = geometry.uniform_sphere(_rng(seed, 0), n, p)
    return DirectionSet(u, mc_constant(p) / n, "monte-carlo")


def scheme_directions(scheme, p, n, seed=0, config=None):
    """Build the direction set a scheme uses for shape ``(p, n)``."""
    if scheme == "optimal-2d":
        if p != 2:
            raise InvalidShape("optimal-2d needs p = 2")
        return optimizer.exact_directions_2d(n)
    if scheme == "orthonormal":
        if n != p:
            raise InvalidShape("orthonormal needs n = p")
        return optimizer.exact_directions_np(p)
    if scheme == "ascent":
        cfg = config or optimizer.OptimizerConfig(seed=seed)
        return optimizer.coordinate_ascent(p, n, cfg)[0]
    if scheme == "monte-carlo":
        return mc_directions(p, n, seed)
    raise InvalidShape(f"unknown scheme {scheme!r}")


def mse_experiment(scheme, p, n, test_vectors=10_000, trials=1, seed=0, config=None,
                   directions=None):
    """Mean squared error of the norm estimate over uniform unit test vectors.

    Deterministic schemes use one trial.  For ``monte-carlo`` every trial
    redraws both the directions and the test vectors from the stream
    ``(seed, trial)``, so the average covers the randomness of both.
    ``directions`` short-circuits construction of a deterministic scheme's set.
    """
    if scheme not in SCHEMES:
        raise InvalidShape(f"unknown scheme {scheme!r}")
    if test_vectors < 1 or trials < 1:
        raise ValueError("test_vectors and trials must be positive")
    if scheme != "monte-carlo":
        trials = 1
        ds = directions or scheme_directions(scheme, p, n, seed, config)
        if (ds.p, ds.n) != (p, n):
            raise InvalidShape("directions do not match (p, n)")
    total = 0.0
    for t in range(trials):
        rng = _rng(seed, 1, t)
        if scheme == "monte-carlo":
            ds = DirectionSet(geometry.uniform_sphere(rng, n, p), mc_constant(p) / n, "monte-carlo")
        v = geometry.uniform_sphere(rng, test_vectors, p)
        err = approx_norm(ds, v) - 1.0
        total += float(np.mean(err * err))
    return MSEReport(scheme, p, n, trials, test_vectors, total / trials, seed)

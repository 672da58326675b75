"""Extremes of ``f(v) = sum_i |u_i . v|`` over the unit sphere.

The maximum is the largest norm of a signed sum ``sum_i s_i u_i`` over sign
patterns ``s``; the minimum is attained at a unit vector orthogonal to
``p - 1`` linearly independent directions.  Both are found by exact
enumeration.  From the two extremes follow the optimal scale
``2 / (V_min + V_max)`` and the worst-case relative error of the scaled
approximation ``||v|| ~ scale * f(v)``.
"""

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import geometry
from .errors import (DimensionMismatch, DimensionTooSmall, TooManyDirections,
                     TooManySubsets)

KINDS = ("optimal-2d", "orthonormal", "ascent", "monte-carlo", "custom")

SIGN_CAP = 24
SUBSET_CAP = 200_000
ORTHO_TOL = 1e-10
UNIT_TOL = 1e-12
TIE_TOL = 1e-12

_LOW_BITS = 14
_BLOCK_ROWS = 1 << 20


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """``n`` unit directions in R^p with the scale used for norm estimates.

    Parameters
    ----------
    directions : array_like, shape (n, p)
        One unit vector per row.
    scale : float
        Multiplier applied to ``sum_i |u_i . x|``.
    kind : str
        Provenance tag, one of ``KINDS``.
    """

    directions: np.ndarray
    scale: float
    kind: str = "custom"
    unit_tol: float = field(default=UNIT_TOL, repr=False)

    def __post_init__(self):
        u = np.array(self.directions, dtype=float, copy=True)
        if u.ndim == 1:
            u = u[:, None]
        if u.ndim != 2 or u.shape[0] < 1 or u.shape[1] < 1:
            raise ValueError(f"directions must be an (n, p) array, got {u.shape}")
        if not np.all(np.isfinite(u)):
            raise ValueError("directions must be finite")
        err = np.max(np.abs(np.linalg.norm(u, axis=1) - 1.0))
        if err > self.unit_tol:
            raise ValueError(f"directions are not unit vectors (max norm error {err:.3g})")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        u.setflags(write=False)
        object.__setattr__(self, "directions", u)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def n(self):
        return self.directions.shape[0]

    @property
    def p(self):
        return self.directions.shape[1]

    def with_scale(self, scale, kind=None):
        return DirectionSet(self.directions, scale, kind or self.kind)


@dataclass(frozen=True)
class SignPattern:
    signs: tuple

    def __post_init__(self):
        if not self.signs or self.signs[0] != 1:
            raise ValueError("canonical sign patterns start with +1")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")

    def as_array(self):
        return np.array(self.signs, dtype=float)


@dataclass(frozen=True, eq=False)
class MinimizerCertificate:
    """A minimizer of ``f`` with the indices of the directions orthogonal to it.

    ``omega`` holds 0-based direction indices.
    """

    v_min: np.ndarray
    omega: tuple
    value: float


@dataclass(frozen=True, eq=False)
class ObjectiveReport:
    v_min_value: float
    v_max_value: float
    ratio: float
    c_n: float
    worst_case_error: float
    sign_pattern: SignPattern
    certificate: MinimizerCertificate

    def to_dict(self):
        return {
            "v_min": self.v_min_value,
            "v_max": self.v_max_value,
            "ratio": self.ratio,
            "c_n": self.c_n,
            "worst_case_error": self.worst_case_error,
            "omega": list(self.certificate.omega),
            "v_min_vector": self.certificate.v_min.tolist(),
            "sign_pattern": list(self.sign_pattern.signs),
        }


def _directions(ds):
    if isinstance(ds, DirectionSet):
        return ds.directions
    return geometry.as_matrix(ds)


def evaluate_f(ds, v):
    """``sum_i |u_i . v|`` for a direction set (or a bare ``(n, p)`` array)."""
    u = _directions(ds)
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != u.shape[1]:
        raise DimensionMismatch(f"vector has dimension {v.shape[-1]}, directions have {u.shape[1]}")
    return np.abs(v @ u.T).sum(axis=-1) if v.ndim > 1 else float(np.abs(u @ v).sum())


# -- maximum -----------------------------------------------------------------

@lru_cache(maxsize=None)
def _sign_table(bits):
    """Row ``k`` holds the signs encoded by integer ``k``; a set bit means -1."""
    k = np.arange(1 << bits)[:, None]
    return 1.0 - 2.0 * ((k >> np.arange(bits)) & 1)


def _pattern_signs(index, m):
    return [1] + [(-1 if (index >> b) & 1 else 1) for b in range(m)]


def _vmax_enumerate(u):
    n = u.shape[0]
    m = n - 1
    if m == 0:
        return float(np.linalg.norm(u[0])), [1]
    low_bits = min(m, _LOW_BITS)
    high_bits = m - low_bits
    low = u[0] + _sign_table(low_bits) @ u[1:1 + low_bits]
    high = _sign_table(high_bits) @ u[1 + low_bits:] if high_bits else np.zeros((1, u.shape[1]))
    chunk = max(1, _BLOCK_ROWS // low.shape[0])
    best, best_idx = -1.0, 0
    for h0 in range(0, high.shape[0], chunk):
        tot = low[None, :, :] + high[h0:h0 + chunk, None, :]
        sq = np.einsum("hlp,hlp->hl", tot, tot)
        k = int(np.argmax(sq))
        if sq.flat[k] > best:
            best = float(sq.flat[k])
            hi, lo = divmod(k, low.shape[0])
            best_idx = ((h0 + hi) << low_bits) | lo
    return math.sqrt(best), _pattern_signs(best_idx, m)


def _vmax_sweep_2d(u):
    # Only sign patterns realized by arcs of the line arrangement can be maximal;
    # walking the circle flips one sign per crossed breakpoint.
    phi = np.arctan2(u[:, 1], u[:, 0])
    beta = np.mod(phi + np.pi / 2, np.pi)
    order = np.argsort(beta, kind="stable")
    bs = beta[order]
    t0 = 0.5 * (bs[-1] + bs[0] + np.pi) - np.pi
    s0 = np.where(np.cos(t0 - phi) >= 0, 1.0, -1.0)
    start = s0 @ u
    steps = -2.0 * s0[order, None] * u[order]
    sums = np.vstack([start, start + np.cumsum(steps, axis=0)])
    norms = np.linalg.norm(sums, axis=1)
    k = int(np.argmax(norms))
    s = s0.copy()
    s[order[:k]] *= -1
    if s[0] < 0:
        s = -s
    return float(norms[k]), [int(x) for x in s]


def v_max(ds, cap=SIGN_CAP):
    """Maximum of ``f`` on the unit sphere and a sign pattern attaining it.

    All ``2**(n-1)`` patterns with ``s_1 = +1`` are enumerated.  For ``p = 2``
    and ``n`` above ``cap`` an exact arc sweep over the circle is used instead.

    Returns
    -------
    value : float
    pattern : SignPattern
    """
    u = _directions(ds)
    n, p = u.shape
    if n > cap:
        if p != 2:
            raise TooManyDirections(f"n = {n} exceeds the sign enumeration cap {cap}")
        value, signs = _vmax_sweep_2d(u)
    else:
        value, signs = _vmax_enumerate(u)
    return value, SignPattern(tuple(int(s) for s in signs))


# -- minimum -----------------------------------------------------------------

@lru_cache(maxsize=32)
def _combinations(n, k):
    if k == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(n), k)),
                       dtype=np.intp).reshape(-1, k)


def _repair_subset(u, subset, tol):
    # grow a rank-deficient (p-1)-subset with unused directions in ascending order
    chosen = list(subset)
    p = u.shape[1]
    for j in range(u.shape[0]):
        if geometry.rank_of(u[chosen], tol) >= p - 1:
            break
        if j not in chosen:
            chosen.append(j)
    if geometry.rank_of(u[chosen], tol) != p - 1:
        return None
    return geometry.orthogonal_complement_direction(u[chosen], tol)


def _vmin_search(u, cap, tol=geometry.RANK_TOL):
    """Return ``(value, v)`` of the best candidate complement direction."""
    n, p = u.shape
    if p == 1:
        v = np.ones(1)
        return float(np.abs(u[:, 0]).sum()), v
    if n < p - 1:
        raise DimensionTooSmall(f"need n >= p - 1, got n = {n}, p = {p}")
    if geometry.rank_of(u, tol) < p:
        _, _, vh = np.linalg.svd(u, full_matrices=True)
        v = geometry.canonical_sign(vh[-1])
        return float(np.abs(u @ v).sum()), v
    count = math.comb(n, p - 1)
    if count > cap:
        raise TooManySubsets(f"C({n}, {p - 1}) = {count} exceeds the subset cap {cap}")
    combos = _combinations(n, p - 1)
    chunk = max(1, min(20_000, 4_000_000 // n))
    best_val, best_sub, best_v = math.inf, None, None
    for c0 in range(0, combos.shape[0], chunk):
        idx = combos[c0:c0 + chunk]
        w, bad = _complements(u[idx], tol)
        for b in np.flatnonzero(bad):
            repaired = _repair_subset(u, idx[b], tol)
            w[b] = np.nan if repaired is None else repaired
        vals = np.abs(w @ u.T).sum(axis=1)
        vals[np.isnan(vals)] = np.inf
        # near-ties go to the earliest subset in lexicographic order
        lo = vals.min()
        if not np.isfinite(lo):
            continue
        k = int(np.flatnonzero(vals <= lo + TIE_TOL * max(1.0, lo))[0])
        if best_v is None or vals[k] < best_val - TIE_TOL * max(1.0, best_val):
            best_val, best_sub, best_v = float(vals[k]), idx[k], w[k]
    if best_v is None:
        raise DimensionTooSmall("no (p-1)-subset reaches rank p - 1")
    # the batched QR screen is re-derived by SVD for the winner
    sub = u[best_sub]
    if geometry.rank_of(sub, tol) == p - 1:
        best_v = geometry.orthogonal_complement_direction(sub, tol)
    v = geometry.canonical_sign(best_v)
    return float(np.abs(u @ v).sum()), v


_QR_SCREEN = 1e-6


def _complements(sub, tol):
    """Unit normals of a batch of ``(p-1) x p`` row stacks.

    Returns the normals and a mask of stacks whose rank is not ``p - 1``.
    """
    q, r = np.linalg.qr(np.swapaxes(sub, 1, 2), mode="complete")
    w = q[:, :, -1].copy()
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    shaky = np.flatnonzero(diag.min(axis=1) < _QR_SCREEN)
    bad = np.zeros(sub.shape[0], dtype=bool)
    if shaky.size:
        _, s, vh = np.linalg.svd(sub[shaky], full_matrices=True)
        w[shaky] = vh[:, -1, :]
        bad[shaky] = ~(s[:, -1] > tol * s[:, 0])
    return w, bad


def v_min(ds, cap=SUBSET_CAP):
    """Minimum of ``f`` over the unit sphere, with its orthogonality certificate.

    Every ``(p-1)``-subset of directions is tried; the unit normal of its span
    is a candidate minimizer.  Subsets of lower rank are grown with unused
    directions (lowest index first).  If the directions do not span R^p the
    minimum is 0 and any null-space direction is returned.
    """
    u = _directions(ds)
    _, v = _vmin_search(u, cap)
    v = v / np.linalg.norm(v)
    dots = np.abs(u @ v)
    omega = tuple(int(i) for i in np.flatnonzero(dots <= ORTHO_TOL))
    return MinimizerCertificate(v_min=v, omega=omega, value=float(dots.sum()))


def ratio_values(u, sign_cap=SIGN_CAP, subset_cap=SUBSET_CAP):
    """``(V_min, V_max)`` of a bare direction array, no certificate objects."""
    u = geometry.as_matrix(u)
    vmin, _ = _vmin_search(u, subset_cap)
    if u.shape[0] > sign_cap and u.shape[1] == 2:
        vmax, _ = _vmax_sweep_2d(u)
    elif u.shape[0] > sign_cap:
        raise TooManyDirections(f"n = {u.shape[0]} exceeds the sign enumeration cap {sign_cap}")
    else:
        vmax, _ = _vmax_enumerate(u)
    return vmin, vmax


def optimal_scale(vmin, vmax):
    return 2.0 / (vmin + vmax)


def worst_case_error(vmin, vmax):
    return (vmax - vmin) / (vmax + vmin)


def report(ds, sign_cap=SIGN_CAP, subset_cap=SUBSET_CAP):
    """Collect V_min, V_max, their ratio, the optimal scale and the worst-case error."""
    vmax, pattern = v_max(ds, sign_cap)
    cert = v_min(ds, subset_cap)
    vmin = cert.value
    return ObjectiveReport(
        v_min_value=vmin,
        v_max_value=vmax,
        ratio=vmin / vmax,
        c_n=optimal_scale(vmin, vmax),
        worst_case_error=worst_case_error(vmin, vmax),
        sign_pattern=pattern,
        certificate=cert,
    )


def with_optimal_scale(directions, kind="custom"):
    """Wrap ``directions`` in a DirectionSet scaled by ``2 / (V_min + V_max)``."""
    u = geometry.normalize_rows(geometry.as_matrix(directions))
    vmin, vmax = ratio_values(u)
    return DirectionSet(u, optimal_scale(vmin, vmax), kind)

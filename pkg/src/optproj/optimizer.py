"""Direction sets that maximize ``V_min / V_max``.

Closed forms exist for the plane (equally spaced angles on a half circle)
and for ``n = p`` (an orthonormal basis).  Everything else goes through a
coordinate ascent: one direction at a time is moved to the point of a
cone around the current minimizer that is farthest from the rest of the
signed sum.  The cone angle is picked from the stationary points of the
one-dimensional surrogate plus a zoomed line search, all scored by the
exact ratio.

The exact ratio is a max-min and stalls at corners where several extremes
tie.  Each start is therefore first annealed on a log-sum-exp smoothing of
both extremes, which moves through those corners, and then climbed exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import geometry, objective
from .errors import DegenerateB, InvalidShape
from .objective import DirectionSet

# smallest ratio gain that counts as an improvement; absorbs round-off ties
IMPROVE_EPS = 1e-13
_END_EPS = 1e-9


@dataclass(frozen=True)
class OptimizerConfig:
    delta: float = 1e-6
    max_outer_iters: int = 500
    restarts: int = 8
    seed: int = 0
    theta_grid: int = 2048
    bisection_tol: float = 1e-12
    denom_guard: float = 1e-9
    line_search: int = 64
    anneal: tuple = (0.1, 0.01, 0.001)
    anneal_sweeps: int = 100

    def __post_init__(self):
        for name in ("delta", "max_outer_iters", "restarts", "theta_grid",
                     "bisection_tol", "denom_guard"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.line_search < 0 or self.anneal_sweeps < 0:
            raise ValueError("line_search and anneal_sweeps must be non-negative")
        if any(not t > 0 for t in self.anneal):
            raise ValueError("anneal temperatures must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class OptimizerTrace:
    """Accepted ratios of the winning restart, one entry per outer iteration.

    ``ratios[0]`` is the starting ratio; ``chosen_index[k]`` is the direction
    moved to reach ``ratios[k + 1]``.
    """

    ratios: list = field(default_factory=list)
    chosen_index: list = field(default_factory=list)
    restarts_best: int = 0
    restart_ratios: list = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class RootProblem:
    """Fixed data of a single-direction update.

    ``a_const`` collects the contributions of the other non-orthogonal
    directions to ``V_min``; ``b_vec`` is the signed sum of the other
    directions; ``v_ref`` is the current minimizer.
    """

    a_const: float
    b_vec: np.ndarray
    v_ref: np.ndarray
    b_norm: float = field(init=False)
    sin_alpha: float = field(init=False)
    cos_alpha: float = field(init=False)
    alpha: float = field(init=False)

    def __post_init__(self):
        b = geometry.as_vector(self.b_vec)
        v = geometry.as_vector(self.v_ref)
        if b.shape != v.shape:
            raise ValueError("b_vec and v_ref must have the same dimension")
        if self.a_const < 0:
            raise ValueError("a_const must be non-negative")
        bb = float(b @ b)
        if bb <= 0.0:
            raise ValueError("b_vec must be nonzero")
        vb = float(v @ b)
        b_norm = math.sqrt(bb)
        perp = math.sqrt(max(bb - vb * vb, 0.0))
        object.__setattr__(self, "b_vec", b)
        object.__setattr__(self, "v_ref", v)
        object.__setattr__(self, "b_norm", b_norm)
        object.__setattr__(self, "sin_alpha", vb / b_norm)
        object.__setattr__(self, "cos_alpha", perp / b_norm)
        object.__setattr__(self, "alpha", math.atan2(vb, perp))


# -- closed forms ------------------------------------------------------------

def exact_directions_2d(n):
    """Optimal planar set: angles ``(i - 1) * pi / n`` for ``i = 1..n``."""
    if n < 1:
        raise InvalidShape("n must be at least 1")
    theta = np.arange(n) * np.pi / n
    u = np.column_stack([np.cos(theta), np.sin(theta)])
    return objective.with_optimal_scale(u, kind="optimal-2d")


def exact_directions_np(p):
    """Standard basis of R^p, the optimal set when ``n = p``."""
    if p < 1:
        raise InvalidShape("p must be at least 1")
    return DirectionSet(np.eye(p), 2.0 / (1.0 + math.sqrt(p)), "orthonormal")


def closed_form_ratio_2d(n):
    """``V_min / V_max`` of the equal-angle planar set with ``n >= 2`` directions."""
    if n < 2:
        raise InvalidShape("closed form needs n >= 2")
    a, odd = divmod(n, 2)
    r = np.arange(1, a + 1)
    if not odd:
        num = 2.0 * np.sin(np.arange(1, a) * np.pi / (2 * a)).sum() + 1.0
        den = 2.0 * np.sin((2 * r - 1) * np.pi / (4 * a)).sum()
    else:
        num = 2.0 * np.sin(r * np.pi / (2 * a + 1)).sum()
        den = 2.0 * np.sin((2 * r - 1) * np.pi / (2 * (2 * a + 1))).sum() + 1.0
    return float(num / den)


def closed_form_cn_2d(n):
    if n < 1:
        raise InvalidShape("n must be at least 1")
    return 2.0 * math.tan(math.pi / (4 * n))


# -- single-direction update -------------------------------------------------

def g_theta(theta, rp):
    """Numerator of the derivative of the surrogate ratio in the cone angle.

    Accepts scalars or arrays of ``theta`` in ``[0, pi)``; the two branches
    split at ``pi / 2`` where ``|cos(theta)|`` has its kink.
    """
    theta = np.asarray(theta, dtype=float)
    bn, bb, a = rp.b_norm, rp.b_norm ** 2, rp.a_const
    st = np.sin(theta)
    s_at = np.sin(rp.alpha - theta)
    c_at = np.cos(rp.alpha - theta)
    low = bn * (rp.cos_alpha + a * c_at - st * s_at) - (1.0 + bb) * st
    high = bn * (-rp.cos_alpha + a * c_at + st * s_at) + (1.0 + bb) * st
    out = np.where(theta < np.pi / 2, low, high)
    return float(out) if out.ndim == 0 else out


def _bisect(rp, lo, hi, tol):
    g_lo = g_theta(lo, rp)
    while np.any(hi - lo > tol):
        mid = 0.5 * (lo + hi)
        g_mid = g_theta(mid, rp)
        left = np.sign(g_mid) == np.sign(g_lo)
        lo = np.where(left, mid, lo)
        g_lo = np.where(left, g_mid, g_lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def find_candidate_thetas(rp, cfg=None):
    """Zeros of ``g`` on ``[0, pi)`` plus the points ``0``, ``pi / 2`` and ``pi - eps``.

    Zeros are bracketed on an equispaced grid and refined by bisection.
    Zeros are only stationary points, so callers must rank the candidates
    by the objective itself.
    """
    cfg = cfg or OptimizerConfig()
    grid = np.linspace(0.0, np.pi, cfg.theta_grid, endpoint=False)
    g = g_theta(grid, rp)
    on_grid = grid[g == 0.0]
    # brackets that straddle the branch switch are not zeros of either branch
    same_branch = (grid[:-1] < np.pi / 2) == (grid[1:] < np.pi / 2)
    brk = np.flatnonzero((np.sign(g[:-1]) * np.sign(g[1:]) < 0) & same_branch)
    roots = _bisect(rp, grid[brk], grid[brk + 1], cfg.bisection_tol) if brk.size else np.empty(0)
    last = grid[-1]
    if g[-1] * g_theta(np.pi - _END_EPS, rp) < 0:
        roots = np.append(roots, _bisect(rp, np.array([last]), np.array([np.pi - _END_EPS]),
                                         cfg.bisection_tol))
    cand = np.sort(np.concatenate([roots, on_grid, [0.0, np.pi / 2, np.pi - _END_EPS]]))
    keep = np.concatenate([[True], np.diff(cand) > 1e-10])
    return [float(t) for t in cand[keep]]


def lemma4_point(v, b, theta, guard=1e-9):
    """Unit ``x`` at angle ``theta`` from ``v`` that minimizes ``||x + b||``.

    Raises
    ------
    DegenerateB
        If ``b`` is numerically parallel to ``v``; then every point of the
        cone is equally good.
    """
    v = geometry.as_vector(v)
    b = geometry.as_vector(b)
    vb = float(v @ b)
    d2 = float(b @ b) - vb * vb
    if d2 <= guard * guard:
        raise DegenerateB("b is parallel to v")
    x = v * math.cos(theta) + (abs(math.sin(theta)) / math.sqrt(d2)) * (vb * v - b)
    return x / np.linalg.norm(x)


def _cone_axis(v, b, guard):
    """Unit tangent ``t`` at ``v`` such that the cone points are ``v cos + t sin``."""
    vb = float(v @ b)
    d2 = float(b @ b) - vb * vb
    if d2 <= guard * guard:
        return geometry.tangent_direction(v)
    t = (vb * v - b) / math.sqrt(d2)
    return t / np.linalg.norm(t)


def _cone_points(v, t, thetas):
    thetas = np.asarray(thetas, dtype=float)
    x = np.cos(thetas)[:, None] * v + np.abs(np.sin(thetas))[:, None] * t
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _cone_point(v, b, theta, guard):
    return _cone_points(v, _cone_axis(v, b, guard), [theta])[0]


# -- coordinate ascent -------------------------------------------------------

def _ratio(u):
    vmin, vmax = objective.ratio_values(u)
    return vmin / vmax


class _Fallback(Exception):
    pass


class CoordinateRatio:
    """Exact ``V_min / V_max`` of ``u`` with row ``j`` replaced, batched over replacements.

    Everything that does not involve row ``j`` is precomputed once:

    * ``V_max^2 = max_k ||R_k||^2 + 1 + 2 |R_k . x|`` over the signed sums
      ``R_k`` of the other rows;
    * normals of ``(p-1)``-subsets of the other rows are fixed, so their
      ``f`` values only gain the term ``|w . x|``;
    * a subset that contains the new row is ``x`` plus a ``(p-2)``-subset
      ``S``; its normal is ``x`` projected on the plane orthogonal to ``S``
      and turned by 90 degrees inside that plane.

    Replacements that make some subset rank deficient are evaluated from
    scratch.
    """

    _K_CHUNK = 1 << 15

    def __init__(self, u, j, tol=geometry.RANK_TOL):
        u = np.asarray(u, dtype=float)
        n, p = u.shape
        self.u, self.j, self.tol = u, j, tol
        others = np.delete(u, j, axis=0)
        self.others = others
        self.exact = False
        try:
            self._prepare(others, n, p)
        except _Fallback:
            self.exact = True

    def _prepare(self, others, n, p):
        if geometry.rank_of(others, self.tol) < p:
            raise _Fallback
        m = n - 1
        if m == 1:
            r = others.copy()
        else:
            r = others[0] + objective._sign_table(m - 1) @ others[1:]
        self.r = r
        self.r2 = np.einsum("kp,kp->k", r, r) + 1.0
        idx1 = objective._combinations(m, p - 1)
        w1, bad = objective._complements(others[idx1], self.tol)
        if bad.any():
            raise _Fallback
        self.w1 = w1
        self.base1 = np.abs(w1 @ others.T).sum(axis=1)
        if p == 2:
            q = np.broadcast_to(np.eye(2), (1, 2, 2))
        else:
            idx2 = objective._combinations(m, p - 2)
            qf, rf = np.linalg.qr(np.swapaxes(others[idx2], 1, 2), mode="complete")
            diag = np.abs(np.diagonal(rf, axis1=1, axis2=2))
            if np.any(diag.min(axis=1) < 1e-6):
                raise _Fallback
            q = qf[:, :, -2:]
        self.q = q
        # others expressed in each plane, pre-rotated so a dot with c gives u_o . w
        pq = np.einsum("cpk,op->cok", q, others)
        self.pj = np.stack([pq[..., 1], -pq[..., 0]], axis=-1)

    def vmax(self, x):
        best = np.full(x.shape[0], -np.inf)
        for k0 in range(0, self.r.shape[0], self._K_CHUNK):
            rk = self.r[k0:k0 + self._K_CHUNK]
            val = self.r2[k0:k0 + self._K_CHUNK, None] + 2.0 * np.abs(rk @ x.T)
            best = np.maximum(best, val.max(axis=0))
        return np.sqrt(best)

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.exact:
            return np.array([self._full(xi) for xi in x])
        vmin1 = (self.base1[:, None] + np.abs(self.w1 @ x.T)).min(axis=0)
        c = np.einsum("cpk,tp->ctk", self.q, x)
        cn = np.linalg.norm(c, axis=-1)
        shaky = np.any(cn < 1e-6, axis=0)
        cn = np.where(cn < 1e-6, 1.0, cn)
        vals2 = np.abs(np.einsum("cok,ctk->cto", self.pj, c)).sum(axis=-1) / cn
        vmin = np.minimum(vmin1, vals2.min(axis=0))
        out = vmin / self.vmax(x)
        for t in np.flatnonzero(shaky):
            out[t] = self._full(x[t])
        return out

    def _full(self, xi):
        trial = self.u.copy()
        trial[self.j] = xi
        return _ratio(trial)


class SmoothedRatio(CoordinateRatio):
    """``CoordinateRatio`` with the extremes replaced by log-sum-exp envelopes.

    ``V_min`` becomes ``-tau log sum exp(-f_c / tau)`` over the candidate
    minimizers ``c`` and ``V_max`` becomes ``tau log sum exp(||R_k|| / tau)``.
    Ties between extremes no longer create corners, so single-direction
    moves keep making progress where the exact ratio stalls.
    """

    def __init__(self, u, j, tau, tol=geometry.RANK_TOL):
        super().__init__(u, j, tol)
        self.tau = tau

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.exact:
            return np.array([self._full(xi) for xi in x])
        v1 = self.base1[:, None] + np.abs(self.w1 @ x.T)
        c = np.einsum("cpk,tp->ctk", self.q, x)
        cn = np.maximum(np.linalg.norm(c, axis=-1), 1e-6)
        v2 = np.abs(np.einsum("cok,ctk->cto", self.pj, c)).sum(axis=-1) / cn
        soft_min = -self.tau * logsumexp(-np.vstack([v1, v2]) / self.tau, axis=0)
        soft_max = np.full(x.shape[0], -np.inf)
        for k0 in range(0, self.r.shape[0], self._K_CHUNK):
            rk = self.r[k0:k0 + self._K_CHUNK]
            norms = np.sqrt(self.r2[k0:k0 + self._K_CHUNK, None] + 2.0 * np.abs(rk @ x.T))
            soft_max = np.logaddexp(soft_max, logsumexp(norms / self.tau, axis=0))
        return soft_min / (self.tau * soft_max)


def _scores(evaluator, v, t, b, thetas, guard):
    xs = _cone_points(v, t, thetas)
    ok = np.linalg.norm(xs + b, axis=1) >= guard
    scores = np.full(len(xs), -np.inf)
    if ok.any():
        scores[ok] = evaluator(xs[ok])
    return scores, xs


def ascent_step(u, cfg=None, rep=None):
    """Best single-direction move from ``u``.

    For every direction outside the minimizer's orthogonal set, the
    candidate cone angles are the zeros of ``g`` and the boundary angles,
    plus ``cfg.line_search`` equispaced angles whose best one is refined by
    repeated local zooming.  Every candidate is scored by the exact ratio
    of the updated set.

    Returns ``(ratio, j, new_direction)``; ``j`` is ``None`` when no
    candidate survives.  Ties keep the smallest ``j`` then smallest angle.
    """
    cfg = cfg or OptimizerConfig()
    u = np.array(u, dtype=float)
    rep = rep or objective.report(u)
    signs = rep.sign_pattern.as_array()
    v = rep.certificate.v_min
    omega = set(rep.certificate.omega)
    proj = np.abs(u @ v)
    free = np.array([i not in omega for i in range(u.shape[0])])
    signed_total = signs @ u
    best = (-math.inf, None, None)
    for j in np.flatnonzero(free):
        j = int(j)
        b = signs[j] * (signed_total - signs[j] * u[j])
        a = float(proj[free].sum() - proj[j])
        if np.linalg.norm(b) <= cfg.denom_guard:
            thetas = [0.0]
        else:
            thetas = find_candidate_thetas(RootProblem(a, b, v), cfg)
        if cfg.line_search:
            grid = np.linspace(0.0, np.pi, cfg.line_search, endpoint=False)
            thetas = np.union1d(thetas, grid)
        thetas = np.asarray(thetas, dtype=float)
        t = _cone_axis(v, b, cfg.denom_guard)
        evaluator = CoordinateRatio(u, j)
        scores, xs = _scores(evaluator, v, t, b, thetas, cfg.denom_guard)
        k = int(np.argmax(scores))
        if not np.isfinite(scores[k]):
            continue
        r, x = float(scores[k]), xs[k]
        if cfg.line_search:
            r, x = _zoom(evaluator, v, t, b, thetas[k], r, x, cfg)
        if r > best[0]:
            best = (r, j, x)
    return best


_ZOOM_POINTS = 17
_ZOOM_ROUNDS = 7


def _zoom(evaluator, v, t, b, theta0, r0, x0, cfg):
    """Refine a grid maximum by re-gridding ever smaller brackets around it.

    The ratio is only piecewise smooth in the angle, so a bracket search
    that never assumes unimodality is used instead of a derivative method.
    """
    h = np.pi / cfg.line_search
    for _ in range(_ZOOM_ROUNDS):
        grid = np.clip(theta0 + np.linspace(-h, h, _ZOOM_POINTS), 0.0, np.pi - _END_EPS)
        scores, xs = _scores(evaluator, v, t, b, grid, cfg.denom_guard)
        k = int(np.argmax(scores))
        if scores[k] > r0:
            r0, x0, theta0 = float(scores[k]), xs[k], float(grid[k])
        h *= 2.0 / (_ZOOM_POINTS - 1)
    return r0, x0


def _initial_directions(p, n, rng, restart):
    if restart == 0:
        base = np.eye(p)[np.arange(n) % p]
        u = base + 0.05 * rng.standard_normal((n, p))
        return geometry.normalize_rows(u)
    return geometry.uniform_sphere(rng, n, p)


def anneal(u, cfg=None):
    """Warm start: Gauss-Seidel sweeps on the smoothed ratio at falling temperatures.

    Each temperature is a fraction of the current ``V_max``.  Every direction
    in turn moves along its cone around ``v_min`` to the best smoothed score; a sweep
    that gains less than ``1e-10`` ends the temperature.
    """
    cfg = cfg or OptimizerConfig()
    u = np.array(u, dtype=float)
    thetas = np.linspace(0.0, np.pi, max(cfg.line_search, 8), endpoint=False)
    zoom_cfg = cfg if cfg.line_search else OptimizerConfig(line_search=len(thetas))
    for frac in cfg.anneal:
        for _ in range(cfg.anneal_sweeps):
            rep = objective.report(u)
            tau = frac * rep.v_max_value
            v = rep.certificate.v_min
            signs = rep.sign_pattern.as_array()
            gain = 0.0
            for j in range(u.shape[0]):
                b = signs[j] * (signs @ u - signs[j] * u[j])
                t = _cone_axis(v, b, cfg.denom_guard)
                evaluator = SmoothedRatio(u, j, tau)
                current = float(evaluator(u[j])[0])
                scores, xs = _scores(evaluator, v, t, b, thetas, cfg.denom_guard)
                k = int(np.argmax(scores))
                r, x = _zoom(evaluator, v, t, b, thetas[k], float(scores[k]), xs[k], zoom_cfg)
                if r > current:
                    gain += r - current
                    u = u.copy()
                    u[j] = x
            if gain < 1e-10:
                break
    return u


def _climb(u, cfg):
    rep = objective.report(u)
    ratios, chosen = [rep.ratio], []
    for _ in range(cfg.max_outer_iters):
        r, j, x = ascent_step(u, cfg, rep)
        if j is None or r <= ratios[-1] + IMPROVE_EPS:
            break
        u = u.copy()
        rep_u_j = u[j].copy()
        u[j] = x
        new_rep = objective.report(u)
        if new_rep.ratio <= ratios[-1]:
            u[j] = rep_u_j
            break
        rep = new_rep
        gain = rep.ratio - ratios[-1]
        ratios.append(rep.ratio)
        chosen.append(j)
        if gain < cfg.delta:
            break
    return u, rep, ratios, chosen


def coordinate_ascent(p, n, cfg=None, initial=None):
    """Multi-start coordinate ascent on ``V_min / V_max``.

    Restart 0 starts from ``initial`` if given, else from a perturbed cycle of
    the standard basis; later restarts start from uniform random directions.
    Each restart draws from its own stream of ``np.random.SeedSequence([seed, r])``.
    Unless ``cfg.anneal`` is empty, every start is first annealed on the
    smoothed ratio; the trace records the exact climb that follows.

    Returns
    -------
    DirectionSet
        Best set over all restarts, scaled by its optimal constant.
    OptimizerTrace
    """
    cfg = cfg or OptimizerConfig()
    if p < 2 or n < p:
        raise InvalidShape(f"coordinate ascent needs n >= p >= 2, got p = {p}, n = {n}")
    trace = OptimizerTrace()
    best = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, r]))
        if r == 0 and initial is not None:
            u0 = geometry.normalize_rows(geometry.as_matrix(initial))
            if u0.shape != (n, p):
                raise InvalidShape(f"initial directions must have shape {(n, p)}")
        else:
            u0 = _initial_directions(p, n, rng, r)
        if cfg.anneal:
            u0 = anneal(u0, cfg)
        u, rep, ratios, chosen = _climb(u0, cfg)
        trace.restart_ratios.append(ratios)
        if best is None or rep.ratio > best[1].ratio:
            best = (u, rep, r, ratios, chosen)
    u, rep, r, ratios, chosen = best
    trace.ratios, trace.chosen_index, trace.restarts_best = ratios, chosen, r
    return DirectionSet(u, rep.c_n, "ascent"), trace

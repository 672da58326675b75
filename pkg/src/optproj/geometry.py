"""Dense vector helpers on the unit sphere.

Everything here works on plain ``numpy`` arrays; a "vector" is a 1-D float
array of length ``p`` and a list of vectors is anything ``np.asarray`` can
stack into an ``(k, p)`` array.
"""

import numpy as np

from .errors import EmptyInput, RankDeficient, ZeroVector

RANK_TOL = 1e-10
ZERO_NORM = 1e-300
SIGN_TOL = 1e-10


def as_vector(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


def as_matrix(vectors):
    a = np.asarray(vectors, dtype=float)
    if a.size == 0:
        raise EmptyInput("empty list of vectors")
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ValueError(f"expected a list of vectors, got shape {a.shape}")
    return a


def normalize(x):
    """Return ``x / ||x||``.

    Raises
    ------
    ZeroVector
        If the Euclidean norm of ``x`` is at most 1e-300.
    """
    x = as_vector(x)
    nrm = np.linalg.norm(x)
    if nrm <= ZERO_NORM:
        raise ZeroVector("cannot normalize a zero vector")
    return x / nrm


def normalize_rows(a):
    a = np.asarray(a, dtype=float)
    nrm = np.linalg.norm(a, axis=-1, keepdims=True)
    if np.any(nrm <= ZERO_NORM):
        raise ZeroVector("cannot normalize a zero row")
    return a / nrm


def rank_of(vectors, tol=RANK_TOL):
    """Numerical rank of a stack of vectors.

    Singular values at or below ``tol`` times the largest one count as zero.
    """
    a = as_matrix(vectors)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def canonical_sign(w, tol=SIGN_TOL):
    """Flip ``w`` so that its first entry larger than ``tol`` in magnitude is positive."""
    w = np.asarray(w, dtype=float)
    idx = np.flatnonzero(np.abs(w) > tol)
    if idx.size and w[idx[0]] < 0:
        return -w
    return w


def orthogonal_complement_direction(vectors, tol=RANK_TOL):
    """Unit normal of the hyperplane spanned by ``vectors``.

    The stacked vectors must have rank ``p - 1``. The sign is fixed so the
    first clearly nonzero coordinate is positive.
    """
    a = as_matrix(vectors)
    p = a.shape[1]
    r = rank_of(a, tol) if p > 1 else 0
    if r != p - 1:
        raise RankDeficient(f"rank {r} != p - 1 = {p - 1}")
    if p == 1:
        return np.ones(1)
    _, _, vh = np.linalg.svd(a, full_matrices=True)
    return canonical_sign(vh[-1] / np.linalg.norm(vh[-1]))


def angle_between(x, y):
    c = float(np.dot(as_vector(x), as_vector(y)))
    return float(np.arccos(min(1.0, max(-1.0, c))))


def tangent_direction(v, tol=1e-8):
    """Deterministic unit vector orthogonal to unit ``v``.

    Gram-Schmidt of the first standard basis vector not parallel to ``v``.
    """
    v = as_vector(v)
    for k in range(v.size):
        e = np.zeros(v.size)
        e[k] = 1.0
        t = e - v[k] * v
        nrm = np.linalg.norm(t)
        if nrm > tol:
            return t / nrm
    raise RankDeficient("no tangent direction exists in dimension 1")


def uniform_sphere(rng, size, p):
    """``size`` i.i.d. uniform points on S^{p-1} (normalized Gaussians)."""
    g = rng.standard_normal((size, p))
    nrm = np.linalg.norm(g, axis=1, keepdims=True)
    # a Gaussian row of exact zeros has probability zero but would divide by 0
    while np.any(nrm == 0.0):
        bad = (nrm == 0.0).ravel()
        g[bad] = rng.standard_normal((int(bad.sum()), p))
        nrm = np.linalg.norm(g, axis=1, keepdims=True)
    return g / nrm

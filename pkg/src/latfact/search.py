"""Batched sign-pattern and projected-ascent searches on norm spheres.

The nonconvex suprema in this package all have the same shape: signs only
matter through the operator image, while the lattice side depends on
absolute values, so the search enumerates sign patterns (2^(n-1) for small
n) and ascends over nonnegative magnitudes on a unit sphere.  Batches put
restarts in rows so the whole search is a handful of dense numpy ops.
"""

from __future__ import annotations

import itertools

import numpy as np

__all__ = ["sign_patterns", "projected_ascent", "sphere_starts"]


def sign_patterns(n: int, cap: int = 12, limit: int | None = None,
                  seed=0) -> np.ndarray:
    """All +-1 patterns with first coordinate +1 (signs modulo global flip).

    Enumerated in full for ``n <= cap``; beyond that a seeded sample of
    ``limit`` (default 256) distinct patterns is returned.
    """
    if n <= cap:
        tails = itertools.product((1.0, -1.0), repeat=n - 1)
        return np.array([(1.0, *tail) for tail in tails])
    rng = np.random.default_rng([59, *np.atleast_1d(seed).astype(int).tolist()])
    limit = limit or 256
    patterns = {tuple([1.0] + list(row)) for row in
                np.where(rng.random(size=(4 * limit, n - 1)) < 0.5, 1.0, -1.0)}
    return np.array(sorted(patterns))[:limit]


def sphere_starts(n: int, restarts: int, seed) -> np.ndarray:
    """Canonical nonnegative starts (uniform, indicators) plus seeded noise.

    Always includes the uniform vector and every indicator; random rows top
    the list up to ``restarts`` when that is larger.
    """
    rng = np.random.default_rng([61, *np.atleast_1d(seed).astype(int).tolist()])
    rows = [np.ones(n)]
    rows.extend(np.eye(n))
    while len(rows) < restarts:
        rows.append(np.abs(rng.normal(size=n)))
    return np.vstack(rows)


def projected_ascent(value_rows, grad_rows, normalize_rows, A0: np.ndarray, *,
                     iters: int = 40, nonneg: bool = True,
                     radial_rows=None, n_etas: int = 18
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise gradient ascent with a geometric line search on the sphere.

    Each iteration evaluates every row at a ladder of step sizes along its
    (optionally tangentially projected) gradient and keeps the best
    improvement, so progress per iteration is scale-free and rows cannot
    crawl.  Monotone per row, hence a certified lower bound per start;
    deterministic.  ``radial_rows``, when given, returns the row-wise
    gradient of the normalization, which is projected out of the ascent
    direction.
    """
    A = normalize_rows(np.maximum(A0, 0.0) if nonneg else A0)
    R, n = A.shape
    val = value_rows(A)
    etas = np.geomspace(1e-10, 1.0, n_etas)
    stall = np.zeros(R, dtype=int)
    for _ in range(iters):
        G = grad_rows(A)
        if radial_rows is not None:
            U = radial_rows(A)
            un2 = np.sum(U * U, axis=1)
            un2[un2 == 0.0] = 1.0
            G = G - (np.sum(G * U, axis=1) / un2)[:, None] * U
        gn = np.linalg.norm(G, axis=1)
        gn[gn == 0.0] = 1.0
        G = G / gn[:, None]
        cand = A[:, None, :] + etas[None, :, None] * G[:, None, :]
        cand = cand.reshape(R * n_etas, n)
        if nonneg:
            cand = np.maximum(cand, 0.0)
        cand = normalize_rows(cand)
        cval = value_rows(cand).reshape(R, n_etas)
        pick = np.argmax(cval, axis=1)
        cbest = cval[np.arange(R), pick]
        better = cbest > val + 1e-15
        rows = np.where(better)[0]
        if rows.size:
            chosen = cand.reshape(R, n_etas, n)[rows, pick[rows]]
            A[rows] = chosen
            val[rows] = cbest[rows]
        stall[better] = 0
        stall[~better] += 1
        if np.all(stall >= 3):
            break
    return A, val

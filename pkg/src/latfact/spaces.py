"""Finite atomic measure spaces and the lattice norms built on them.

A measurable function on an ``n``-atom space is a length-``n`` vector, so
norms, Köthe duals and dual-ball geometry all reduce to dense vector
arithmetic.  Weighted Lebesgue norms are evaluated in closed form; other
lattice norms fall back to seeded projected-ascent searches whose results
are certified lower bounds with a documented ~1e-9 slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimates import ConstantEstimate, family_search, ratio_objective

__all__ = [
    "DUAL_CERT_SLACK",
    "DimensionMismatchError",
    "NotPConvexError",
    "MeasureSpace",
    "LatticeNorm",
    "WeightedLebesgue",
    "ExponentTriple",
    "DualVector",
    "norm",
    "pth_power_norm",
    "pth_power_space",
    "kothe_dual_norm",
    "dual_norm_of_pth_power",
    "extreme_dual_vectors",
    "sample_positive_dual_ball",
    "p_convexity_estimate",
]

# slack allowed when certifying membership in a dual unit ball
DUAL_CERT_SLACK = 1e-9

# largest atom count for which 0/1 indicator patterns are enumerated in full
_INDICATOR_CAP = 12


class DimensionMismatchError(ValueError):
    """Vector length differs from the atom count of the measure space."""


class NotPConvexError(ValueError):
    """Requested construction needs p-convexity with constant one."""


def as_vector(f, n: int) -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise DimensionMismatchError(
            f"expected a vector of length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


def power_mean(values, exponent: float, weights: np.ndarray) -> float:
    """(sum |v|^e w)^(1/e), computed stably for large exponents."""
    v = np.abs(np.asarray(values, dtype=float))
    m = float(v.max(initial=0.0))
    if m == 0.0:
        return 0.0
    return m * float(np.dot((v / m) ** exponent, weights)) ** (1.0 / exponent)


def power_mean_rows(V, exponent: float, weights: np.ndarray) -> np.ndarray:
    """Row-wise version of :func:`power_mean`."""
    V = np.abs(np.atleast_2d(np.asarray(V, dtype=float)))
    m = V.max(axis=1)
    out = np.zeros(V.shape[0])
    nz = m > 0
    if np.any(nz):
        scaled = V[nz] / m[nz, None]
        out[nz] = m[nz] * (scaled ** exponent @ weights) ** (1.0 / exponent)
    return out


@dataclass(frozen=True, eq=False)
class MeasureSpace:
    """Finite atomic measure: ``n`` atoms with strictly positive weights."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ValueError("atom weights must be strictly positive and finite")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    def integrate(self, f) -> float:
        return float(np.dot(as_vector(f, self.n), self.weights))

    def __eq__(self, other) -> bool:
        return isinstance(other, MeasureSpace) and np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:
        return hash(self.weights.tobytes())


class LatticeNorm:
    """Base class for lattice norms over a fixed :class:`MeasureSpace`.

    Subclasses implement ``norm``; the functional must be absolutely
    homogeneous, subadditive, and monotone under pointwise domination of
    absolute values.  The test-suite checks those axioms on seeded samples
    for every shipped variant.
    """

    space: MeasureSpace

    @property
    def n(self) -> int:
        return self.space.n

    def norm(self, f) -> float:
        raise NotImplementedError

    def norm_rows(self, F) -> np.ndarray:
        F = np.atleast_2d(np.asarray(F, dtype=float))
        return np.array([self.norm(row) for row in F])

    def norm_grad(self, f) -> np.ndarray:
        # numeric fallback; closed forms in subclasses
        f = np.asarray(f, dtype=float)
        h = 1e-7 * max(1.0, float(np.abs(f).max(initial=0.0)))
        grad = np.zeros_like(f)
        for i in range(f.size):
            fp = f.copy(); fp[i] += h
            fm = f.copy(); fm[i] -= h
            grad[i] = (self.norm(fp) - self.norm(fm)) / (2 * h)
        return grad

    def norm_grad_rows(self, F) -> np.ndarray:
        F = np.atleast_2d(np.asarray(F, dtype=float))
        return np.vstack([self.norm_grad(row) for row in F])

    def is_p_convex_one(self, p: float) -> bool:
        # the triangle inequality is exactly 1-convexity
        return p <= 1.0 + 1e-12

    def unit_rows(self, F) -> np.ndarray:
        """Scale each row to the unit sphere; zero rows are left at zero."""
        F = np.atleast_2d(np.asarray(F, dtype=float))
        norms = self.norm_rows(F)
        out = F.copy()
        nz = norms > 0
        out[nz] = out[nz] / norms[nz, None]
        return out


@dataclass(frozen=True, eq=False)
class WeightedLebesgue(LatticeNorm):
    """``(sum |f|^s dmu)^(1/s)`` with exponent ``s`` in [1, inf)."""

    space: MeasureSpace
    s: float

    def __post_init__(self):
        s = float(self.s)
        if not (1.0 <= s < math.inf):
            raise ValueError(f"weighted Lebesgue exponent must be in [1, inf), got {s}")
        object.__setattr__(self, "s", s)

    def norm(self, f) -> float:
        f = as_vector(f, self.n)
        return power_mean(f, self.s, self.space.weights)

    def norm_rows(self, F) -> np.ndarray:
        return power_mean_rows(F, self.s, self.space.weights)

    def norm_grad(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        nrm = self.norm(f)
        if nrm == 0.0:
            return np.zeros_like(f)
        scaled = np.abs(f) / nrm
        return np.sign(f) * scaled ** (self.s - 1.0) * self.space.weights

    def norm_grad_rows(self, F) -> np.ndarray:
        F = np.atleast_2d(np.asarray(F, dtype=float))
        norms = self.norm_rows(F)
        norms = np.where(norms == 0.0, 1.0, norms)
        scaled = np.abs(F) / norms[:, None]
        return np.sign(F) * scaled ** (self.s - 1.0) * self.space.weights

    def is_p_convex_one(self, p: float) -> bool:
        return self.s >= p - 1e-12

    def conjugate_exponent(self) -> float:
        return math.inf if self.s == 1.0 else self.s / (self.s - 1.0)

    def __eq__(self, other) -> bool:
        return (isinstance(other, WeightedLebesgue)
                and self.space == other.space and self.s == other.s)

    def __hash__(self) -> int:
        return hash((self.space, self.s))


@dataclass(frozen=True)
class ExponentTriple:
    """Exponents ``1 <= p <= q < inf`` with ``1/r = 1/p - 1/q``.

    ``r`` is ``math.inf`` exactly when ``p == q``; downstream code branches
    on :attr:`is_extreme` instead of handling the singularity numerically.
    """

    p: float
    q: float
    r: float = field(init=False)

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (1.0 <= p <= q < math.inf):
            raise ValueError(f"need 1 <= p <= q < inf, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        r = math.inf if p == q else 1.0 / (1.0 / p - 1.0 / q)
        object.__setattr__(self, "r", r)

    @property
    def is_extreme(self) -> bool:
        return math.isinf(self.r)

    @property
    def t(self) -> float:
        """The inner exponent q/p (conjugate to r/p)."""
        return self.q / self.p


@dataclass(frozen=True, eq=False)
class DualVector:
    """A nonnegative vector together with its certified dual-ball norm."""

    h: np.ndarray
    certified_norm: float

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.ndim != 1:
            raise ValueError("dual vector must be one-dimensional")
        if not np.all(np.isfinite(h)) or np.any(h < 0.0):
            raise ValueError("dual vector must be nonnegative and finite")
        h.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "certified_norm", float(self.certified_norm))

    @property
    def in_unit_ball(self) -> bool:
        return self.certified_norm <= 1.0 + DUAL_CERT_SLACK

    def __eq__(self, other) -> bool:
        return (isinstance(other, DualVector)
                and np.array_equal(self.h, other.h)
                and self.certified_norm == other.certified_norm)

    def __hash__(self) -> int:
        return hash((self.h.tobytes(), self.certified_norm))


def norm(X: LatticeNorm, f) -> float:
    """Evaluate ``‖f‖_X``; zero exactly when ``f`` vanishes (saturated norms)."""
    return X.norm(f)


def pth_power_space(X: LatticeNorm, p: float) -> LatticeNorm:
    """The lattice norm ``f -> ‖|f|^{1/p}‖_X^p`` as a first-class space.

    Closed form for the weighted Lebesgue family (exponent drops to
    ``s/p``); other variants have no registered closed form.
    """
    if not X.is_p_convex_one(p):
        raise NotPConvexError(
            f"space is not p-convex with constant one for p={p}")
    if isinstance(X, WeightedLebesgue):
        return WeightedLebesgue(X.space, X.s / p)
    raise TypeError(
        "no closed p-th power for this norm family; use pth_power_norm")


def pth_power_norm(X: LatticeNorm, p: float, f) -> float:
    """``‖|f|^{1/p}‖_X^p``, a norm whenever X is p-convex with constant one."""
    if not X.is_p_convex_one(p):
        raise NotPConvexError(
            f"space is not p-convex with constant one for p={p}")
    f = as_vector(f, X.n)
    if isinstance(X, WeightedLebesgue):
        return power_mean(f, X.s / p, X.space.weights)
    return X.norm(np.abs(f) ** (1.0 / p)) ** p


def _linear_sup_over_ball(norm_fn, n: int, g: np.ndarray, *, restarts: int = 8,
                          iters: int = 200, seed=0,
                          weights: np.ndarray | None = None) -> float:
    """sup of ``g . f`` over ``{f >= 0 : norm_fn(f) <= 1}``.

    Candidates: every indicator (corner attainment, exact for sup-norm
    duals), the power profiles ``g^c`` (which contain the exact conjugate
    attainment for every Lebesgue exponent), and seeded random directions;
    the best few are polished by projected ascent.  Linear objective over a
    convex ball, so every evaluation is a certified lower bound; tight to
    about 1e-9 on the norms exercised here.
    """
    g = np.asarray(g, dtype=float)
    if not np.any(g > 0):
        return 0.0

    def normalize(f: np.ndarray) -> np.ndarray:
        nrm = norm_fn(f)
        if nrm == 0.0:
            f = np.ones_like(f)
            nrm = norm_fn(f)
        return f / nrm

    rng = np.random.default_rng([17, *np.atleast_1d(seed).astype(int).tolist()])
    starts = [np.ones(n)]
    starts.extend(np.eye(n))
    bases = [g / g.max()]
    if weights is not None:
        density = g / weights
        if np.any(density > 0):
            bases.append(density / density.max())
    for base in bases:
        for c in np.geomspace(0.1, 12.0, 24):
            starts.append(base ** c)
    for _ in range(restarts):
        starts.append(np.abs(rng.normal(size=n)))

    scored = []
    for f0 in starts:
        f = normalize(np.maximum(f0, 0.0))
        scored.append((float(np.dot(g, f)), f))
    scored.sort(key=lambda pair: -pair[0])
    best = scored[0][0]

    def sphere_grad(f: np.ndarray) -> np.ndarray:
        h = 1e-7 * max(1.0, float(np.abs(f).max()))
        grad = np.zeros_like(f)
        for i in range(f.size):
            fp = f.copy(); fp[i] += h
            fm = f.copy(); fm[i] = max(fm[i] - h, 0.0)
            grad[i] = (norm_fn(fp) - norm_fn(fm)) / (fp[i] - fm[i])
        return grad

    # line search along the component of g tangent to the unit sphere;
    # the radial part only rescales, so removing it keeps steps effective
    etas = np.geomspace(1e-12, 1.0, 40)
    for val, f in scored[:4]:
        stall = 0
        for _ in range(iters):
            u = sphere_grad(f)
            un = float(np.linalg.norm(u))
            d = g - (float(np.dot(g, u)) / un ** 2) * u if un > 0 else g
            dn = float(np.linalg.norm(d))
            if dn == 0.0:
                break
            d = d / dn
            cands = np.maximum(f[None, :] + etas[:, None] * d[None, :], 0.0)
            cands = np.array([normalize(c) for c in cands])
            cvals = cands @ g
            top = int(np.argmax(cvals))
            if cvals[top] > val + 1e-16:
                f, val = cands[top], float(cvals[top])
                stall = 0
            else:
                stall += 1
                if stall >= 5:
                    break
        best = max(best, val)
    return best


def kothe_dual_norm(X: LatticeNorm, h, method: str = "auto", seed=0) -> float:
    """Köthe-dual norm ``sup {∫|h f| dμ : ‖f‖_X <= 1}``.

    Weighted Lebesgue spaces use the conjugate-exponent closed form (the
    sup norm when ``s = 1``).  Other variants run a projected-ascent sup
    over the positive unit sphere; the value is a lower bound, tight to
    about 1e-9 here and validated against the closed form at 1e-7.
    """
    h = as_vector(h, X.n)
    closed = isinstance(X, WeightedLebesgue) and method in ("auto", "closed")
    if method == "closed" and not isinstance(X, WeightedLebesgue):
        raise ValueError("closed-form dual norm only for WeightedLebesgue")
    if closed:
        if X.s == 1.0:
            return float(np.abs(h).max(initial=0.0))
        return power_mean(h, X.conjugate_exponent(), X.space.weights)
    return _linear_sup_over_ball(X.norm, X.n, np.abs(h) * X.space.weights,
                                 seed=seed, weights=X.space.weights)


def dual_norm_of_pth_power(X: LatticeNorm, p: float, h) -> float:
    """Norm of ``h`` in the Köthe dual of the p-th power of X."""
    if isinstance(X, WeightedLebesgue):
        return kothe_dual_norm(pth_power_space(X, p), h)
    if not X.is_p_convex_one(p):
        raise NotPConvexError(
            f"space is not p-convex with constant one for p={p}")
    h = as_vector(h, X.n)
    return _linear_sup_over_ball(lambda f: pth_power_norm(X, p, f), X.n,
                                 np.abs(h) * X.space.weights,
                                 weights=X.space.weights)


def _certify(X: LatticeNorm, p: float, h: np.ndarray) -> DualVector:
    h = np.maximum(np.asarray(h, dtype=float), 0.0)
    cert = dual_norm_of_pth_power(X, p, h)
    if cert > 1.0 + DUAL_CERT_SLACK:
        h = h / cert
        cert = dual_norm_of_pth_power(X, p, h)
    return DualVector(h=h, certified_norm=cert)


def _dual_is_sup_ball(X: LatticeNorm, p: float) -> bool:
    """True when the positive dual ball of X_p is the cube [0,1]^n."""
    return isinstance(X, WeightedLebesgue) and abs(X.s / p - 1.0) <= 1e-9


def extreme_dual_vectors(X: LatticeNorm, p: float) -> list[DualVector]:
    """Canonical extreme candidates of the positive dual ball of X_p.

    When the dual ball is the cube ``[0,1]^n`` (s = p for the weighted
    Lebesgue family) these are exactly its extreme points, every 0/1
    indicator pattern, enumerated in full for ``n <= 12``.  For curved dual
    balls the canonical candidates are the indicator directions scaled onto
    the unit sphere (plus the origin); they seed searches but do not
    exhaust the extreme set.
    """
    n = X.n
    masks: list[np.ndarray]
    if n <= _INDICATOR_CAP:
        order = sorted(range(1, 2 ** n),
                       key=lambda msk: (-bin(msk).count("1"), msk))
        masks = []
        for msk in order:
            v = np.array([(msk >> i) & 1 for i in range(n)], dtype=float)
            masks.append(v)
    else:
        masks = [np.ones(n)]
        for i in range(n):
            v = np.zeros(n)
            v[i] = 1.0
            masks.append(v)
    out = []
    if _dual_is_sup_ball(X, p):
        for v in masks:
            out.append(DualVector(h=v, certified_norm=float(v.max(initial=0.0))))
        out.append(DualVector(h=np.zeros(n), certified_norm=0.0))
    else:
        for v in masks:
            nrm = dual_norm_of_pth_power(X, p, v)
            out.append(DualVector(h=v / nrm, certified_norm=1.0)
                       if nrm > 0 else DualVector(h=v, certified_norm=0.0))
        out.append(DualVector(h=np.zeros(n), certified_norm=0.0))
    return out


def sample_positive_dual_ball(X: LatticeNorm, p: float, strategy: str = "mixed",
                              count: int = 64, seed=0) -> list[DualVector]:
    """Sample ``count`` certified members of the positive dual ball of X_p.

    Strategies: ``extreme`` lists the canonical extreme candidates (all 0/1
    indicator patterns when the dual ball is a cube and ``n <= 12``),
    ``random`` draws seeded directions scaled onto the dual sphere, and
    ``mixed`` lists the extremes first and fills up with random points.
    Deterministic given the seed; ``count`` caps the returned list.
    """
    if not X.is_p_convex_one(p):
        raise NotPConvexError(
            f"space is not p-convex with constant one for p={p}")
    if strategy not in ("extreme", "random", "mixed"):
        raise ValueError(f"unsupported dual-ball sampling strategy: {strategy!r}")
    count = int(count)
    if count <= 0:
        return []
    out: list[DualVector] = []
    if strategy in ("extreme", "mixed"):
        out.extend(extreme_dual_vectors(X, p))
    if strategy in ("random", "mixed") and len(out) < count:
        rng = np.random.default_rng([29, *np.atleast_1d(seed).astype(int).tolist()])
        while len(out) < count:
            direction = np.abs(rng.normal(size=X.n))
            if not np.any(direction > 0):
                continue
            nrm = dual_norm_of_pth_power(X, p, direction)
            if nrm == 0.0:
                continue
            out.append(_certify(X, p, direction / nrm))
    return out[:count]


def p_convexity_estimate(X: LatticeNorm, p: float, budget: int = 32,
                         seed=0) -> ConstantEstimate:
    """Lower bound on the p-convexity constant of X, with witness family.

    Searches finite families for the largest value of
    ``‖(Σ|f_i|^p)^{1/p}‖_X / (Σ‖f_i‖_X^p)^{1/p}``; monotone nondecreasing
    in ``budget`` and deterministic given ``seed``.
    """
    p = float(p)

    def num(F: np.ndarray) -> float:
        agg = (np.abs(F) ** p).sum(axis=0) ** (1.0 / p)
        return X.norm(agg)

    def den(F: np.ndarray) -> float:
        return float(np.sum(X.norm_rows(F) ** p) ** (1.0 / p))

    value, witness, used = family_search(
        ratio_objective(num, den), X.n, m_max=6, budget=budget, seed=seed)
    return ConstantEstimate(kind="M^p", value=value, witness=witness,
                            budget_used=used)

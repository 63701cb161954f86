#!/usr/bin/env python3
"""Tour of the basic objects: finite measure spaces, weighted Lebesgue
norms, p-th powers, Köthe duals, and the positive dual ball.

Run:  python3 demos/01_spaces_and_duals.py
"""

import numpy as np

from latfact import (MeasureSpace, WeightedLebesgue, kothe_dual_norm,
                     p_convexity_estimate, pth_power_norm, pth_power_space,
                     sample_positive_dual_ball)

# ---------------------------------------------------------------------------
# a measure space is just a vector of strictly positive atom weights,
# and a function on it is a plain vector of atom values
# ---------------------------------------------------------------------------
mu = MeasureSpace(weights=np.array([1.0, 1.0]))
X = WeightedLebesgue(space=mu, s=2.0)

print("norm of (3, 4) in the 2-norm over two unit atoms:", X.norm([3.0, 4.0]))
print("a weighted 1-norm:", WeightedLebesgue(
    space=MeasureSpace(weights=np.array([2.0, 1.0])), s=1.0).norm([1.0, 1.0]))

# ---------------------------------------------------------------------------
# the p-th power functional ||f|^{1/p}|_X^p drops the exponent: for the
# s-norm it is exactly the (s/p)-norm, and it stays a norm whenever the
# space is p-convex with constant one (s >= p)
# ---------------------------------------------------------------------------
print("\np-th power of the 2-norm at p=2 applied to (1, 3):",
      pth_power_norm(X, 2.0, [1.0, 3.0]))
print("the same value via the halved-exponent space:",
      pth_power_space(X, 2.0).norm([1.0, 3.0]))

# ---------------------------------------------------------------------------
# Köthe duals: closed conjugate-exponent forms for the Lebesgue family;
# the numeric route exists for anything else and agrees to ~1e-7
# ---------------------------------------------------------------------------
h = np.array([3.0, 4.0])
print("\ndual norm of (3, 4) against the 2-norm   closed:",
      kothe_dual_norm(X, h, method="closed"),
      "  numeric:", round(kothe_dual_norm(X, h, method="numeric"), 10))

# ---------------------------------------------------------------------------
# the positive dual unit ball of the p-th power space is where mixture
# weights live; when s = p it is the cube [0,1]^n with indicator extreme
# points, otherwise a curved body sampled on its sphere
# ---------------------------------------------------------------------------
X1 = WeightedLebesgue(space=mu, s=1.0)
ball = sample_positive_dual_ball(X1, p=1.0, strategy="extreme", count=8)
print("\nextreme candidates of the dual cube (s = p = 1):")
for d in ball:
    print("   ", d.h, " certified norm", d.certified_norm)

# ---------------------------------------------------------------------------
# p-convexity constants via witness families: the 1-norm is 2-convex with
# constant sqrt(2) on two atoms, attained by disjointly supported pairs
# ---------------------------------------------------------------------------
est = p_convexity_estimate(X1, p=2.0, budget=24, seed=1)
print("\n2-convexity lower bound for the 1-norm:", round(est.value, 9),
      " (sqrt(2) =", round(np.sqrt(2.0), 9), ")")
print("witness family:")
for f in est.witness:
    print("   ", np.round(f, 6))

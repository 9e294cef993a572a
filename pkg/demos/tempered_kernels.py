#!/usr/bin/env python3
"""Walk through the tempered log/exp kernels and the measures built on them.

Run: python demos/tempered_kernels.py
"""

import numpy as np

from ttlr import exp_t, log_t, tsallis_divergence, tsallis_entropy

np.set_printoptions(precision=6, suppress=True)

# log_t flattens (t > 1) or steepens (t < 1) the ordinary logarithm.
# At t = 1 it is np.log bit for bit.
xs = np.array([0.05, 0.25, 1.0, 4.0, 20.0])
print("x        ", xs)
for t in (0.5, 1.0, 1.5):
    print(f"log_{t}(x)", log_t(xs, t))

# exp_t inverts log_t on its range. For t < 1 it clamps to exactly 0.0
# below -1/(1-t); for t > 1 it blows up at the pole 1/(t-1).
print()
print("exp_0.5(-2.0) =", exp_t(-2.0, 0.5), " (boundary: clamps at -2)")
print("exp_0.5(-2.1) =", exp_t(-2.1, 0.5), " (exact zero past the boundary)")
print("exp_1.5(1.99) =", exp_t(1.99, 1.5), " (pole at 2)")
print("exp_1.5(2.00) =", exp_t(2.0, 1.5))

# round trip away from the clamp
a = np.linspace(-1.5, 3.0, 7)
print()
print("exp_t(log_t(exp(a))) - exp(a) =", exp_t(log_t(np.exp(a), 0.7), 0.7) - np.exp(a))

# entropy of a biased coin as t moves: heavier deformation rewards
# uniformity more (t < 1) or less (t > 1) than Shannon
print()
print("p = [0.9, 0.1]")
for t in (0.5, 1.0, 1.5):
    coin = tsallis_entropy(np.array([0.9, 0.1]), t)
    fair = tsallis_entropy(np.array([0.5, 0.5]), t)
    print(f"  t={t}: H_t(coin) = {coin:.6f},  H_t(fair) = {fair:.6f}")

# the divergence is asymmetric and, for t >= 1, infinite when q drops
# support that p still uses
p = np.array([0.7, 0.3])
q = np.array([0.3, 0.7])
print()
print("D_1(p||q) =", tsallis_divergence(p, q, 1.0))
print("D_1(q||p) =", tsallis_divergence(q, p, 1.0))
print("D_1.5([1,0] || [0.5,0.5]) =", tsallis_divergence([1.0, 0.0], [0.5, 0.5], 1.5))
print("D_1.5([0.5,0.5] || [1,0]) =", tsallis_divergence([0.5, 0.5], [1.0, 0.0], 1.5))

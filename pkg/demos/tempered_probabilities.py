#!/usr/bin/env python3
"""Tempered probability assignments versus softmax on the same activations.

The normalizer G is found by safeguarded Newton; this script prints the
solver's residuals, then contrasts tail behavior across t2.

Run: python demos/tempered_probabilities.py
"""

import numpy as np
from scipy.special import softmax

from ttlr import escort, log_partition, tempered_probs

np.set_printoptions(precision=8, suppress=True)

a = np.array([3.0, 1.0, -1.0, -6.0])
print("activations:", a)
print()

for t2 in (0.5, 1.0, 1.5, 1.9):
    res = log_partition(a, t2)
    p = tempered_probs(a, t2)
    print(f"t2={t2}: G={res.G:.8f}  residual={res.residual:.2e}  iters={res.iterations}")
    print("   p =", p)
print()
print("softmax  =", softmax(a))

# t2 < 1 assigns exactly zero mass to badly losing classes; t2 > 1 keeps
# polynomially heavy tails that softmax crushes exponentially
wide = np.array([0.0, -30.0])
print()
print("activations:", wide)
print("t2=0.5:", tempered_probs(wide, 0.5), " (hard zero)")
print("t2=1.5:", tempered_probs(wide, 1.5))
print("t2=1.0:", tempered_probs(wide, 1.0))

# the escort distribution reweights by the t-th power; it is what the
# gradient of the log-partition actually sees
p = np.array([0.8, 0.15, 0.05])
print()
print("p            =", p)
print("escort t=0.5 =", escort(p, 0.5), " (flattened)")
print("escort t=1.5 =", escort(p, 1.5), " (sharpened)")

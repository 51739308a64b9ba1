"""
Zeros of random SU(2) polynomials
=================================

Draw Gaussian sections of O(N) over CP^1, find their zeros and watch the
normalized zero measure approach the uniform measure on the sphere.
"""

import numpy as np

from equizero import EnsembleSpec, expected_pairing, roots_cp1, sample_gaussian, sphere_coords

rng = np.random.default_rng(1)

# one section of degree 40 and its zeros on the unit sphere
s = sample_gaussian(1, 40, rng)
zs = roots_cp1(s)
X = np.array([sphere_coords(p) for p in zs.points])
print("zeros found:", sum(zs.multiplicities))
print("mean position on the sphere:", X.mean(axis=0).round(3))

# Monte Carlo mean of (1/N) sum u(root) for a few degrees
for N in (5, 20, 80):
    rep = expected_pairing(EnsembleSpec(psi="u**2 - 1/3", N=(N,), trials=2000, seed=7))
    print(N, rep.get("mean", N), "z =", round(rep.summary[f"z_score_N{N}"], 2))

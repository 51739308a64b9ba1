"""
Haar orbits and Toeplitz matrices
=================================

The diagonal of U* T U for Haar U fluctuates around the mean eigenvalue with
an exactly computable variance; for Toeplitz matrices that variance tends to
the variance of psi on the sphere.
"""

import numpy as np

from equizero import orbit_closed_form, parse_test_function, szego_trace, toeplitz_build
from equizero.toeplitz import y_statistic_batch

psi = parse_test_function("u")
for N in (8, 16, 32, 64):
    T = toeplitz_build(psi, N)
    lam = T.spectrum().eigenvalues
    print(f"N={N:3d}  Tr T^2/d = {szego_trace(T, 2):.4f}  E Y = {orbit_closed_form(lam):.4f}")

T = toeplitz_build(psi, 32)
y = y_statistic_batch(T, 5000, np.random.default_rng(3))
print("Monte Carlo E Y at N=32:", y.mean().round(4), "+-", (y.std() / np.sqrt(len(y))).round(4))

"""
Bergman densities for a perturbed metric
========================================

With h = h_FS exp(-rho) the zeros no longer follow the round measure but the
curvature form.  The Bergman density over N tends to 1 and the Kodaira
pullback approaches the curvature.
"""

import numpy as np

from equizero import MetricModel, bergman_basis, bergman_density, kodaira_pullback_density, sample_fs_points

metric = MetricModel.perturbed("0.3*u")
P = sample_fs_points(1, 200, np.random.default_rng(0))
kappa = metric.volume_density(P)

for N in (8, 16, 32):
    b = bergman_basis(metric, N)
    tian = np.abs(bergman_density(b, P) / N - 1).max()
    kod = np.abs(kodaira_pullback_density(b, N, P) - kappa).max()
    print(f"N={N:3d}  sup|B/N - 1| = {tian:.4f}   sup|omega_N - kappa| = {kod:.4f}")

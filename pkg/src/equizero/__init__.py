"""Zeros of random holomorphic sections on projective space.

Random sections of O(N) over CP^m (Gaussian, spherical, or columns of a
Haar-random orthonormal basis), their zero sets, and the statistics that
show those zeros equidistributing toward the curvature form as N grows.
"""

__version__ = "0.1.0"

from .estimate import PairingEstimate
from .haar import complex_normal, haar_unitary
from .metric import MetricModel, curvature_density
from .projective import (
    ChartPoint,
    ProjectivePoint,
    QuadratureRule,
    chordal_distance,
    cp1_quadrature,
    cp2_quadrature,
    fs_volume_density,
    normalize_point,
    sample_fs_points,
    sample_fs_uniform,
    sphere_coords,
)
from .sections import (
    OrthonormalBasisSample,
    Section,
    basis_values,
    column_masses,
    dim_h0,
    eval_norm,
    mass_integral,
    monomial_norm_sq,
    multi_indices,
    sample_gaussian,
    sample_haar_onb,
    sample_sphere,
    section_norms,
    sum_squares,
)
from .testfunctions import MomentPolynomial, SpherePolynomial, parse_test_function
from .zeros import (
    AberthConvergenceError,
    ZeroSet,
    common_zeros_cp2,
    pair_pl,
    pair_roots,
    pair_roots_batch,
    root_points_batch,
    roots_cp1,
)
from .bergman import BergmanBasis, bergman_basis, bergman_density, gram_matrix, kodaira_pullback_density
from .toeplitz import (
    SpectrumSummary,
    ToeplitzMatrix,
    gn_spread,
    orbit_closed_form,
    orbit_functional,
    sphere_moment4,
    szego_trace,
    toeplitz_build,
    y_statistic,
)
from .experiments import (
    EnsembleSpec,
    ExperimentReport,
    density_one_extract,
    ep_cesaro,
    expected_pairing,
    onb_zero_average,
    sequence_convergence,
    variance_sweep,
)

"""Numerical Teichmüller theory of the torus.

The modules, from the bottom up:

- ``teich``: moduli, foliations, slopes, extremal length, distance, rays.
- ``mapping``: SL2(Z) mapping classes, their actions, word balls and
  subgroup classification at bounded depth.
- ``tracks``: train tracks, exact weight spaces and the Thurston form.
- ``measures``: Thurston measure of cones and the extremal-length Poisson kernel.
- ``harmonic``: Poisson integrals of boundary functions and their checks.
- ``dynamics``: orbit, limit-set and horospherical tests for subgroups.
- ``cli``: the ``torusteich`` command.
"""

from ._kernels import BACKEND
from .dynamics import (
    HoroReport,
    OrbitPoint,
    PoincareTable,
    WanderReport,
    big_from_small,
    ext_ratio,
    is_big_horospherical,
    is_conical,
    is_small_horospherical,
    limit_set_approx,
    orbit_points,
    poincare_sum,
    replay_conical,
    replay_horospherical,
    wandering_overlap,
)
from .errors import BudgetExceeded
from .harmonic import (
    BoundaryFunction,
    Estimate,
    HarmonicField,
    cr_integral,
    cr_residual,
    dbar_fd,
    fourier_coefficients,
    laplacian_residual,
    named_function,
    negative_fourier_residual,
    poisson_field,
    poisson_integral,
    radial_limit,
    seidel_function,
)
from .mapping import (
    S,
    T,
    Ball,
    FiniteOrder,
    MappingClass,
    MCPReport,
    PseudoAnosov,
    Reducible,
    SubgroupSpec,
    act_on_boundary,
    act_on_foliation,
    act_on_modulus,
    act_on_slope,
    classify,
    enumerate_ball,
    fixed_points,
    is_sufficiently_large,
    mcp_classify,
    word_ball,
)
from .measures import (
    ArcSet,
    MeasureReport,
    cone_area,
    cone_area_montecarlo,
    equivariance_residual,
    harmonic_measure,
    image_arcset,
    kernel_mass,
    measure_identity_residual,
    poisson_kernel,
    radon_nikodym_residual,
    thurston_prob,
)
from .teich import (
    Foliation,
    Slope,
    boundary_point,
    canonicalize_foliation,
    ext_gradient,
    extremal_length,
    foliation_from_boundary,
    geodesic_ray,
    hm_differential,
    intersection_curves,
    intersection_foliations,
    pairing,
    slope_to_foliation,
    teich_distance,
)
from .tracks import (
    Switch,
    TrackError,
    TrackParseError,
    TrainTrack,
    WeightVector,
    chart_constant,
    form_matrix,
    is_recurrent,
    parse_track,
    format_track,
    switch_matrix,
    thurston_form,
    torus_chart,
    torus_chart_inverse,
    volume_density,
    weight_space_basis,
)
from .verdict import Verdict

__version__ = "0.1.0"

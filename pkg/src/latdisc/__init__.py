"""latdisc: spectral tests, isotropic-discrepancy witnesses, parallel-body
volumes, and distance norms for integration lattices in the unit cube."""

__version__ = "0.1.0"

from .convex import (
    AxisBox,
    Ball,
    ConvexBody,
    HPolytope,
    OffsetSpec,
    VolumeEstimate,
    VPolytope,
    binom_kappa_sum,
    boundary_neighborhood_volume,
    cube_intrinsic_volume,
    cube_quermassintegral,
    dist_to_body,
    dist_to_complement,
    inradius,
    kappa,
    offset_volume,
    parallel_volume_derivative_check,
    remark_lower,
    remark_upper,
    steiner_volume,
    unit_cube,
)
from .discrepancy import (
    DiscrepancyWitness,
    Thm1Report,
    count_points,
    halfspace_cube_volume,
    isotropic_lower_bound,
    slab_witness,
    verify_thm1,
)
from .distance import (
    CoveringRadius,
    DistanceNormConfig,
    DistanceNormReport,
    Prop1Report,
    ProxySpec,
    covering_radius,
    dist_to_pointset,
    distance_norm,
    distance_norms,
    error_proxy,
    nn_baseline_error,
    proxy_spec,
    slab_union_volume,
    verify_prop1,
)
from .harness import (
    BoundCheckReport,
    Budgets,
    Campaign,
    CampaignResult,
    CorpusSpec,
    builtin_corpus,
    run_campaign,
)
from .lattice import (
    DualBasis,
    IntegrationLattice,
    LatticePointSet,
    dual_basis,
    enumerate_points,
    fibonacci_lattice,
    korobov_lattice,
    parse_lattice_text,
    rank1_lattice,
    validate,
)
from .reduction import (
    ReducedBasis,
    SpectralReport,
    cell_diameter,
    hyperplane_family,
    lll_reduce,
    shortest_vector,
    spectral_test,
)

__all__ = [
    "AxisBox",
    "Ball",
    "BoundCheckReport",
    "Budgets",
    "Campaign",
    "CampaignResult",
    "ConvexBody",
    "CorpusSpec",
    "CoveringRadius",
    "DiscrepancyWitness",
    "DistanceNormConfig",
    "DistanceNormReport",
    "DualBasis",
    "HPolytope",
    "IntegrationLattice",
    "LatticePointSet",
    "OffsetSpec",
    "Prop1Report",
    "ProxySpec",
    "ReducedBasis",
    "SpectralReport",
    "Thm1Report",
    "VPolytope",
    "VolumeEstimate",
    "binom_kappa_sum",
    "boundary_neighborhood_volume",
    "builtin_corpus",
    "cell_diameter",
    "count_points",
    "covering_radius",
    "cube_intrinsic_volume",
    "cube_quermassintegral",
    "dist_to_body",
    "dist_to_complement",
    "dist_to_pointset",
    "distance_norm",
    "distance_norms",
    "dual_basis",
    "enumerate_points",
    "error_proxy",
    "fibonacci_lattice",
    "halfspace_cube_volume",
    "hyperplane_family",
    "inradius",
    "isotropic_lower_bound",
    "kappa",
    "korobov_lattice",
    "lll_reduce",
    "nn_baseline_error",
    "offset_volume",
    "parallel_volume_derivative_check",
    "parse_lattice_text",
    "proxy_spec",
    "rank1_lattice",
    "remark_lower",
    "remark_upper",
    "run_campaign",
    "shortest_vector",
    "slab_union_volume",
    "slab_witness",
    "spectral_test",
    "steiner_volume",
    "unit_cube",
    "validate",
    "verify_prop1",
    "verify_thm1",
]

"""iterlab: density evolution, iteration lower bounds and finite-length
decoding experiments for LDPC / IRA / ARA ensembles on the binary erasure
channel."""

from .degree import (
    ARA_SYSTEMATIC,
    IRA_NONSYSTEMATIC,
    IRA_SYSTEMATIC,
    LDPC,
    Channel,
    Degree1Warning,
    EdgeDist,
    EnsembleSpec,
    NodeDist,
    avg_degree,
    build_right_regular,
    capacity_gap,
    design_rate,
    dist_from_text,
    dist_to_text,
    edge_to_node,
    eval_edge,
    eval_node,
    fraction_degree2,
    graphical_complexity,
    mix_degree2,
    node_to_edge,
    right_regular_design_p,
    right_regular_series,
    right_regular_truncation_for_mass,
)
from .de import (
    ARAState,
    ConditionCurves,
    DEConfig,
    DETrajectory,
    StabilityResult,
    TiltedEnsemble,
    ara_bit_erasure,
    ara_de_run,
    ara_de_step,
    ara_stability_margin_tilted,
    condition_curves,
    converges_by_curves,
    de_run,
    ensemble_map,
    inverse_monotone,
    ira_bit_erasure,
    ira_de_run,
    ira_de_step,
    ldpc_bit_erasure,
    ldpc_de_run,
    ldpc_de_step,
    map_below_identity,
    stability_check,
    threshold_search,
    tilt_L,
    tilt_R,
    tilt_lambda,
    tilt_rho,
    tilted_recursion_run,
    trajectory_to_csv,
    turbo_de_run,
    turbo_step_functions,
)
from .bounds import (
    BoundInput,
    BoundResult,
    TriangleDecomposition,
    adaptive_simpson,
    area_ara,
    area_ara_quadrature,
    area_ldpc,
    area_ldpc_quadrature,
    ara_bound,
    bound_for,
    inv_L_lower_bound,
    ira_bound,
    ldpc_bound,
    pb_floor,
    record_to_csv,
    record_to_json,
    scaling_ensemble,
    scaling_experiment,
    tilted_integrals,
    triangle_decompose,
    turbo_bound_alias,
    verify_bound,
)
from .sim import (
    ConcentrationReport,
    SimConfig,
    SimResult,
    TannerGraph,
    bec_transmit,
    concentration_report,
    flooding_decode,
    graph_from_text,
    graph_to_text,
    sample_ara_graph,
    sample_ldpc_graph,
    simresult_to_csv,
    simulate,
)

__version__ = "0.1.0"

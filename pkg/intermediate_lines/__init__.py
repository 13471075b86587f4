"""
Intermediate Lines - 平面曲线中间线包络的计算与奇点分类

For a pair of points p1, p2 on a curve and alpha in (0, 1), the intermediate
line passes through (1 - alpha) p1 + alpha p2 and the intersection of the two
tangent lines. Its envelope over all pairs splits into the AEIL (transversal
tangents), the IPTL (parallel tangents) and the CTL (coincident points).

Example usage:
    from intermediate_lines import bean, build_envelope, numeric_cusp_scan

    curve = bean()
    for branch in build_envelope(curve, 0.6):
        print(branch.tag.value, len(branch), numeric_cusp_scan(branch))
"""

__version__ = "0.1.0"

# Errors
from .errors import EILError, InputError, NumericalError, InvariantViolation, DenominatorDegenerate

# Core data models
from .models import (
    AffineFrame,
    AlphaParam,
    ConormalCovector,
    ConormalDecomp,
    CurveJet,
    CuspMarker,
    EnvelopeBranch,
    EnvelopePoint,
    LineEq,
    MongeJetPair,
    PairBranch,
    SingularityClass,
    SingularityVerdict,
    Tag,
    TransitionEvent,
)

# Configuration management
from .config import ConfigManager, ConfigError, RunConfig, CurveSpec

# Curves
from .curves import (
    AffineMap,
    ParamCurve,
    PolyGraph,
    SampledCurve,
    TransformedCurve,
    bean,
    builtin_curve,
    circle,
    curve_from_spec,
    curve_scale,
    ellipse,
    eval_jet,
    monge_arc,
    parabola_arc,
    poly_graph,
    sample,
    transform,
)

# Affine invariants
from .affine import (
    InflectionError,
    ParallelTangentsError,
    affine_evolute_point,
    affine_frame,
    conormal,
    conormal_decomp,
    conormal_derivative,
    invariant_table,
)

# Pair locus
from .pair_locus import (
    DegenerateResidual,
    NoBranchFound,
    RefinementFailed,
    follow_branch,
    pairing_residual,
    pairing_residual_affine,
    parallel_pairs,
    parallel_residual,
    solve_partner,
    trace_locus,
)

# Envelope
from .envelope import (
    EnvelopeOptions,
    aess_point,
    affine_evolute,
    build_envelope,
    ctl,
    discriminant_check,
    envelope_point_affine_form,
    envelope_point_closed_form,
    hausdorff,
    intermediate_line,
    iptl_point,
    limit_slope,
    oracle_envelope,
    parallel_crossings,
)

# Singularities
from .singularities import (
    InsufficientPrecision,
    InsufficientResolution,
    MongeInvariantError,
    PreconditionViolated,
    a2_jets,
    alpha_sweep,
    classify_nonparallel,
    classify_parallel,
    classify_parallel_inflection,
    cusp_inventory,
    disjointness_report,
    family_type,
    numeric_cusp_scan,
    realize_iptl,
    versality_check,
)

# Gap tracker
from .event_tracker import GapEvent, GapStats, GapTracker, get_gap_tracker

__all__ = [
    "__version__",
    # Errors
    "EILError",
    "InputError",
    "NumericalError",
    "InvariantViolation",
    "DenominatorDegenerate",
    # Data models
    "AffineFrame",
    "AlphaParam",
    "ConormalCovector",
    "ConormalDecomp",
    "CurveJet",
    "CuspMarker",
    "EnvelopeBranch",
    "EnvelopePoint",
    "LineEq",
    "MongeJetPair",
    "PairBranch",
    "SingularityClass",
    "SingularityVerdict",
    "Tag",
    "TransitionEvent",
    # Configuration
    "ConfigManager",
    "ConfigError",
    "RunConfig",
    "CurveSpec",
    # Curves
    "AffineMap",
    "ParamCurve",
    "PolyGraph",
    "SampledCurve",
    "TransformedCurve",
    "bean",
    "builtin_curve",
    "circle",
    "curve_from_spec",
    "curve_scale",
    "ellipse",
    "eval_jet",
    "monge_arc",
    "parabola_arc",
    "poly_graph",
    "sample",
    "transform",
    # Affine invariants
    "InflectionError",
    "ParallelTangentsError",
    "affine_evolute_point",
    "affine_frame",
    "conormal",
    "conormal_decomp",
    "conormal_derivative",
    "invariant_table",
    # Pair locus
    "DegenerateResidual",
    "NoBranchFound",
    "RefinementFailed",
    "follow_branch",
    "pairing_residual",
    "pairing_residual_affine",
    "parallel_pairs",
    "parallel_residual",
    "solve_partner",
    "trace_locus",
    # Envelope
    "EnvelopeOptions",
    "aess_point",
    "affine_evolute",
    "build_envelope",
    "ctl",
    "discriminant_check",
    "envelope_point_affine_form",
    "envelope_point_closed_form",
    "hausdorff",
    "intermediate_line",
    "iptl_point",
    "limit_slope",
    "oracle_envelope",
    "parallel_crossings",
    # Singularities
    "InsufficientPrecision",
    "InsufficientResolution",
    "MongeInvariantError",
    "PreconditionViolated",
    "a2_jets",
    "alpha_sweep",
    "classify_nonparallel",
    "classify_parallel",
    "classify_parallel_inflection",
    "cusp_inventory",
    "disjointness_report",
    "family_type",
    "numeric_cusp_scan",
    "realize_iptl",
    "versality_check",
    # Gap tracker
    "GapEvent",
    "GapStats",
    "GapTracker",
    "get_gap_tracker",
]

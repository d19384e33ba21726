"""wellspectra: a numerical laboratory for eigenvalue counting on potential
wells — weighted Dirichlet pencils on sublevel regions, absorption-to-
reflection boundary operators, and closed-form Weyl-type bounds, all on a
uniform finite-difference lattice."""

from .errors import (
    ConfigError,
    DetachedComponent,
    DimensionTooLow,
    EmptySublevel,
    EnumerationCap,
    FactorizationBreakdown,
    MissingConstant,
    MissingVectors,
    OnEigenvalue,
    ResolventViolation,
    SingularDirichletBlock,
    SizeCap,
    SubcriticalExponent,
    UnknownFamily,
    WellSpectraError,
)
from .model import (
    AssembledPencil,
    BoundReport,
    GridSpec,
    Inertia,
    PotentialField,
    SpectralSummary,
    SublevelDecomposition,
    build_potential,
    dumps,
    loads,
)
from .assemble import assemble_pencil, classify_nodes
from .eigcount import (
    count_below,
    heat_trace,
    inertia,
    pencil_eigs,
    two_infinity_norm,
)
from .a2r import (
    BoundaryMeasures,
    a2r_spectrum_and_count,
    a_lambda_norm,
    boundary_measures,
    estimate_poisson_constant,
    harmonic_extension,
    poisson_matrix,
    radon_nikodym_report,
    schur_form,
    splitting_counts,
    verify_isomorphism,
)
from .bounds import (
    BoundConstants,
    a2r_count_bound,
    a2r_trace_bound,
    boundary_bound_constants,
    classical_constant,
    dirichlet_count_bound,
    estimate_b,
    lieb_bound,
    polya_weyl_report,
    sobolev_constant,
    trace_sobolev_constants,
    ultracontractivity_and_trace_bounds,
    weighted_sobolev,
)
from .schrodinger import assemble_schrodinger, box_exact_count, reduction_check
from .scenario import CSV_COLUMNS, load_config, run_scenario

__version__ = "0.1.0"

__all__ = [
    "AssembledPencil",
    "BoundConstants",
    "BoundReport",
    "BoundaryMeasures",
    "ConfigError",
    "CSV_COLUMNS",
    "DetachedComponent",
    "DimensionTooLow",
    "EmptySublevel",
    "EnumerationCap",
    "FactorizationBreakdown",
    "GridSpec",
    "Inertia",
    "MissingConstant",
    "MissingVectors",
    "OnEigenvalue",
    "PotentialField",
    "ResolventViolation",
    "SingularDirichletBlock",
    "SizeCap",
    "SpectralSummary",
    "SublevelDecomposition",
    "SubcriticalExponent",
    "UnknownFamily",
    "WellSpectraError",
    "a2r_count_bound",
    "a2r_spectrum_and_count",
    "a2r_trace_bound",
    "a_lambda_norm",
    "assemble_pencil",
    "assemble_schrodinger",
    "boundary_bound_constants",
    "boundary_measures",
    "box_exact_count",
    "build_potential",
    "classical_constant",
    "classify_nodes",
    "count_below",
    "dirichlet_count_bound",
    "dumps",
    "estimate_b",
    "estimate_poisson_constant",
    "harmonic_extension",
    "heat_trace",
    "inertia",
    "lieb_bound",
    "load_config",
    "loads",
    "pencil_eigs",
    "poisson_matrix",
    "polya_weyl_report",
    "radon_nikodym_report",
    "reduction_check",
    "run_scenario",
    "schur_form",
    "sobolev_constant",
    "splitting_counts",
    "trace_sobolev_constants",
    "two_infinity_norm",
    "ultracontractivity_and_trace_bounds",
    "verify_isomorphism",
    "weighted_sobolev",
]

"""Area-type invariants of planar point configurations.

The area type of an ordered tuple of k+1 plane points is the vector of
pairwise signed parallelogram areas.  Outside the degenerate class where
the first two points are collinear with the origin, two tuples share an
area type exactly when a unique determinant-1 linear map carries one onto
the other, which identifies area types with points of a (2k-1)-flat.
This package implements that identification, its quantitative stability,
fractal test-set generators, exact and float counting of distinct area
types, and desk-scale scaling-law experiments, plus a CLI front end.
"""

from .canonical import (
    CanonicalForm,
    StabilityReport,
    canonical_distance,
    canonical_form,
    matching_transform,
    same_area_type,
    stability_check,
)
from .core import (
    AreaType,
    Configuration,
    Point2,
    UnimodularMap,
    apply_map,
    area_type,
    degeneracy,
    pair_labels,
    sample_unimodular,
    wedge,
)
from .counting import (
    CountReport,
    FitResult,
    NormalizedKey,
    count_area_types_exact_upper,
    count_area_types_float,
    scaling_fit,
    t_normalize,
)
from .errors import (
    AreaTypeError,
    BudgetExceeded,
    DegenerateExcess,
    DegenerateInput,
    InsufficientData,
    InsufficientSpread,
    PreconditionViolated,
    ScaleOutOfRange,
)
from .generators import (
    GridMeasure,
    LatticeSpec,
    SymbolicPoint,
    angle_partition,
    annulus_cloud,
    cantor_measure_grid,
    grid_box_dimension,
    lattice_points,
    load_grid_measure,
    neighborhood_sample,
    polar_image,
    save_grid_measure,
    segment_cloud,
)
from .scaling_lab import (
    FlatHistogram,
    LpNormTable,
    LpPiece,
    box_count,
    lp_norms,
    lp_piece,
    measure_estimate,
    nu_density,
    nu_l2,
)

__version__ = "0.1.0"

__all__ = [
    "AreaType",
    "AreaTypeError",
    "BudgetExceeded",
    "CanonicalForm",
    "Configuration",
    "CountReport",
    "DegenerateExcess",
    "DegenerateInput",
    "FitResult",
    "FlatHistogram",
    "GridMeasure",
    "InsufficientData",
    "InsufficientSpread",
    "LatticeSpec",
    "LpNormTable",
    "LpPiece",
    "NormalizedKey",
    "Point2",
    "PreconditionViolated",
    "ScaleOutOfRange",
    "StabilityReport",
    "SymbolicPoint",
    "UnimodularMap",
    "angle_partition",
    "annulus_cloud",
    "apply_map",
    "area_type",
    "box_count",
    "canonical_distance",
    "canonical_form",
    "cantor_measure_grid",
    "count_area_types_exact_upper",
    "count_area_types_float",
    "degeneracy",
    "grid_box_dimension",
    "lattice_points",
    "load_grid_measure",
    "lp_norms",
    "lp_piece",
    "matching_transform",
    "measure_estimate",
    "neighborhood_sample",
    "nu_density",
    "nu_l2",
    "pair_labels",
    "polar_image",
    "same_area_type",
    "sample_unimodular",
    "save_grid_measure",
    "scaling_fit",
    "segment_cloud",
    "stability_check",
    "t_normalize",
    "wedge",
]

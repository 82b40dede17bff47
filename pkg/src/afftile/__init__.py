"""Exact connectedness analysis for planar integral self-affine attractors.

An expanding 2x2 integer matrix T and a finite set D of integer digit
vectors determine a unique compact attractor built from the contractions
x -> T^-1 (x + d). This package decides whether that attractor is
connected, computes its lattice neighbor sets three independent ways,
renders approximations, and produces rigorous disconnectedness
certificates. All decisions use exact integer and rational arithmetic.
"""

from .connectivity import (
    Analysis,
    ChainGraph,
    DimensionTest,
    Verdict,
    chain_graph,
    chain_verdict,
    collinear_connected,
    collinear_cover,
    convex_hull_interval,
    count_rows,
    decide_connected,
    dimension_test,
    onedim_tile_connected,
    singular_value_dimension,
)
from .errors import NotExpandingError, PreconditionError, SizeGuardError
from .lattice import (
    CharData,
    DigitSet,
    IntMatrix2,
    attractor_radius,
    char_data,
    collinear_direction,
    eigenvalue_along,
    is_eigen_collinear,
    is_expanding,
    is_reducible,
    rect_grid,
    square_reduce,
    triangular_form,
)
from .neighbors import (
    NeighborOutcome,
    brute_force_neighbors,
    closed_form_neighbors,
    is_neighbor,
    neighbor_lower_bound,
)
from .render import (
    AttractorApprox,
    CellCover,
    approximate,
    cell_cover,
    cell_cover_certificate,
    export_pgm,
    export_svg,
    rasterize,
)

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "AttractorApprox",
    "CellCover",
    "ChainGraph",
    "CharData",
    "DigitSet",
    "DimensionTest",
    "IntMatrix2",
    "NeighborOutcome",
    "NotExpandingError",
    "PreconditionError",
    "SizeGuardError",
    "Verdict",
    "approximate",
    "attractor_radius",
    "brute_force_neighbors",
    "cell_cover",
    "cell_cover_certificate",
    "chain_graph",
    "chain_verdict",
    "char_data",
    "closed_form_neighbors",
    "collinear_connected",
    "collinear_cover",
    "collinear_direction",
    "convex_hull_interval",
    "count_rows",
    "decide_connected",
    "dimension_test",
    "eigenvalue_along",
    "export_pgm",
    "export_svg",
    "is_eigen_collinear",
    "is_expanding",
    "is_neighbor",
    "is_reducible",
    "neighbor_lower_bound",
    "onedim_tile_connected",
    "rasterize",
    "rect_grid",
    "singular_value_dimension",
    "square_reduce",
    "triangular_form",
]

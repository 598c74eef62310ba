"""Exact geometric bistellar flips between triangulations of constant-curvature spaces."""

from .complex import (ComplexError, GeometricComplex, ManifoldComplex, SimplicialComplex, ValidationReport,
                      VertexPool, complexes_equal, fingerprint, join, link, star, validate_geometric)
from .moves import (FlipSequence, Move, MoveError, SequenceError, apply_sequence, bistellar_move,
                    derived_subdivision, interpolating_subdivision, invert_sequence, stellar_subdivide,
                    stellar_weld)
from .regularity import RegularityCertificate, find_heights, is_regular, regularize
from .sweep import Cobordism, cone, connect_star_convex, sweep_flips, upper_boundary, vertical_derivative
from .charts import (PolytopalComplex, common_refinement, develop_star, gnomonic_project, klein_geodesic_check,
                     simplex_intersection, triangulate_polytopal)
from .pipeline import ConnectResult, HypothesisError, connect_geometric

__version__ = "0.1.0"

__all__ = [
    "ComplexError", "GeometricComplex", "ManifoldComplex", "SimplicialComplex", "ValidationReport", "VertexPool",
    "complexes_equal", "fingerprint", "join", "link", "star", "validate_geometric",
    "FlipSequence", "Move", "MoveError", "SequenceError", "apply_sequence", "bistellar_move", "derived_subdivision",
    "interpolating_subdivision", "invert_sequence", "stellar_subdivide", "stellar_weld",
    "RegularityCertificate", "find_heights", "is_regular", "regularize",
    "Cobordism", "cone", "connect_star_convex", "sweep_flips", "upper_boundary", "vertical_derivative",
    "PolytopalComplex", "common_refinement", "develop_star", "gnomonic_project", "klein_geodesic_check",
    "simplex_intersection", "triangulate_polytopal",
    "ConnectResult", "HypothesisError", "connect_geometric",
]

"""Cubical cochains, geometric cochains and the logistic flow on cubulated manifolds."""
from .cube import FacePartition, VertexSet, enumerate_faces, face_decomposition, shuffle_sign
from .complex import CubicalComplex, TorusGrid, build_torus_grid, single_cube, torus_grid
from .cochains import IntChain, IntCochain, boundary, coboundary, cup, serre_diagonal
from .snf import cohomology, smith_normal_form
from .flow import FlowedCochain, flow_cochain, flow_inverse, flow_point
from .geometric import (GeoCochain, GeometryError, GraphPiece, TransversalityError,
                        boundary_geo, chain_map_check, intersect_cochain)
from .products import (ComparisonReport, NonConvergence, ProductConfig, fiber_product_points,
                       main_theorem_check, product_cochain, reciprocal_unit_test, threshold_sweep)

__all__ = [
    "FacePartition", "VertexSet", "enumerate_faces", "face_decomposition", "shuffle_sign",
    "CubicalComplex", "TorusGrid", "build_torus_grid", "single_cube", "torus_grid",
    "IntChain", "IntCochain", "boundary", "coboundary", "cup", "serre_diagonal",
    "cohomology", "smith_normal_form",
    "FlowedCochain", "flow_cochain", "flow_inverse", "flow_point",
    "GeoCochain", "GeometryError", "GraphPiece", "TransversalityError",
    "boundary_geo", "chain_map_check", "intersect_cochain",
    "ComparisonReport", "NonConvergence", "ProductConfig", "fiber_product_points",
    "main_theorem_check", "product_cochain", "reciprocal_unit_test", "threshold_sweep",
]

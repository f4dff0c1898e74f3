"""Projection onto generalized Minkowski constraint sets.

A model is described as the sum of two components, each constrained to an
intersection of elementary sets (optionally behind linear transforms), with
further constraints on the sum itself. This package computes Euclidean
projections onto such sets with a relaxed ADMM splitting, and builds on the
projector to solve constrained inverse problems: a spectral projected
gradient loop for expensive nonlinear misfits, and a data-fit-constrained
projection formulation for cheap linear forward operators.
"""

from .admm import ADMMOptions, SolveReport, admm_project, conjugate_gradient
from .datafit import DataFitConstraint, project_with_datafit, with_datafit
from .grid import (ModelGrid, ModelVector, StackedVector, dematricize_2d,
                   devectorize, join, matricize_2d, split, vectorize)
from .operators import (BlockRow, BlockSystem, NotPositiveDefiniteError,
                        Transform, assemble_block_system, build_derivative,
                        build_gradient, compressed_diagonal_view,
                        first_difference, identity_operator, matvec, rmatvec)
from .sets import (ElementarySet, box, cardinality, feasibility_distance,
                   fixed, l1_ball, l2_annulus, l2_ball, orthonormal_basis,
                   pointwise_datafit, project_box, project_cardinality,
                   project_fixed, project_l1_ball, project_l2_annulus,
                   project_l2_ball, project_monotone_derivative,
                   project_pointwise_datafit, project_rank,
                   project_subspace, rank_limit, subspace)
from .spec import (MinkowskiSpec, SetDescriptor, SpecValidationError,
                   is_member, sample_element, validate)
from .spg import SPGOptions, gradient_check, spg_minimize
from .video import AnomalyBudgets, frame_partition, video_decompose

__version__ = "0.1.0"

__all__ = [
    "ADMMOptions", "AnomalyBudgets", "BlockRow", "BlockSystem",
    "DataFitConstraint", "ElementarySet", "MinkowskiSpec", "ModelGrid",
    "ModelVector", "NotPositiveDefiniteError", "SPGOptions", "SetDescriptor",
    "SolveReport", "SpecValidationError", "StackedVector", "Transform",
    "admm_project", "assemble_block_system", "box", "build_derivative",
    "build_gradient", "cardinality", "compressed_diagonal_view",
    "conjugate_gradient", "dematricize_2d", "devectorize",
    "feasibility_distance", "first_difference", "fixed", "frame_partition",
    "gradient_check", "identity_operator", "is_member", "join", "l1_ball",
    "l2_annulus", "l2_ball", "matricize_2d", "matvec", "orthonormal_basis",
    "pointwise_datafit", "project_box", "project_cardinality",
    "project_fixed", "project_l1_ball", "project_l2_annulus",
    "project_l2_ball", "project_monotone_derivative",
    "project_pointwise_datafit", "project_rank", "project_subspace",
    "project_with_datafit", "rank_limit", "rmatvec", "sample_element",
    "split", "spg_minimize", "subspace", "validate", "vectorize",
    "video_decompose", "with_datafit",
]

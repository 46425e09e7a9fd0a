"""Degree-by-degree geometry of homogeneous submodules of the Drury-Arveson space."""

__version__ = "0.1.0"

from .angles import (
    AngleReport,
    StableDivReport,
    borwein_product,
    bgm_formula,
    friedrichs_pair,
    gap_cosine,
    graded_cosine,
    minimal_division,
    min_gap,
    pairwise_reduction_check,
    rayleigh_cosine,
    stable_division,
)
from .essnorm import (
    DecompCertificate,
    EssNormReport,
    certify_decomposition,
    classify_piece,
    commutator_blocks,
    decay_fit,
    essnorm_report,
    restricted_tuple_selfcommutators,
    schatten_partial,
)
from .groebner import MonomialOrder, buchberger, is_groebner_basis
from .perp import (
    BracketFn,
    PerpCertificate,
    arbitrate_guo_wang,
    certify_perpendicular,
    commutator_formula_check,
    derivative_orthogonality,
    frame_operators_commute,
    gradient_orthogonality,
    guo_wang_apply,
    pair_commutes,
    projections_commute,
    verify_guo_wang,
)
from .poly import (
    HomogPoly,
    MultiIndex,
    PolySyntaxError,
    VectorPoly,
    da_inner,
    da_norm,
    format_poly,
    gram_schmidt_da,
    multiply_adjoint,
    parse_poly,
    partial,
)
from .slices import (
    GradedSubmodule,
    SubspaceSlice,
    complement,
    degree_slice,
    join,
    meet,
    multiplication_block,
    projection,
    shift_block,
    tensor,
)
from .specfile import ModuleSpecFile, SpecError, format_spec, parse_spec

"""Slice functions on the boundary of the quaternionic unit ball."""

from .boundary import (
    BoundaryGrid,
    ess_sup_estimate,
    evaluate_on_grid,
    make_grid,
    modulophi_residual,
    representation,
    slice_inner,
    unimodularity_residual,
    write_trace_csv,
    zero_set_fraction,
)
from .errors import (
    AmbientMismatch,
    DegenerateUnits,
    DoublyInvariant,
    FactorizationResidual,
    NotInvertible,
    PointTooCloseToBoundary,
    SliceLabError,
    SupportOverflow,
    Unclassifiable,
    ZeroFunction,
    ZeroValue,
)
from .idempotents import (
    IdempotentSpec,
    SphereBehavior,
    build_idempotent,
    check_pair_structure,
    classify_sphere,
    verify_idempotent,
)
from .operators import (
    QuaternionMatrix,
    adjoint,
    isometry_residual,
    multiplier_matrix,
    operator_norm_estimate,
    projection_residual,
)
from .quaternions import (
    EPS0,
    Quaternion,
    UnitImaginary,
    dot_cross_decompose,
    exp_unit,
    inverse,
    mul,
    slice_decompose,
)
from .series import (
    SliceLaurentSeries,
    conjugate,
    evaluate,
    l2_inner,
    star,
    star_inverse,
    symmetrize,
    t_map,
    tilde,
)
from .subspaces import (
    SubspaceBasis,
    blaschke_factor,
    blaschke_product,
    cyclicity_residual,
    doubly_invariant_projector,
    inner_outer_factorize,
    krylov_span,
    orthonormalize,
    project,
    wandering_vector,
)

__version__ = "0.1.0"

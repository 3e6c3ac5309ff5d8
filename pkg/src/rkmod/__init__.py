"""Operator-valued reproducing kernels and Hilbert modules over block matrix algebras.

The package realizes, with exact dense linear algebra at finite scale:

- block matrix algebras with order structure (``algebra``),
- positive definite algebra-valued kernels and their constructors
  (``kernels``): feature assembly, tensor products, conjugation, deflation,
- the finite-span module of a kernel (``modules``): inner products,
  evaluation, projections, minimal-norm interpolation, tensor embedding and
  a faithful trace realization,
- adjointable operators, multipliers and Berezin transforms (``operators``),
- frames, sharp bounds and reconstruction identities (``frames``),
- contraction-scaled companions of feature functions (``contraction``),
- a JSON instance format and batch CLI (``io``, ``cli``).
"""

from .algebra import (
    AlgebraElement,
    block_psd,
    invert,
    is_central,
    is_positive,
    modulus,
    operator_norm,
    tensor,
)
from .contraction import (
    PsiContractionInstance,
    construct_phi,
    contraction_check,
    intertwining_check,
    modulus_bound_check,
)
from .errors import (
    InstanceError,
    NoExtensionError,
    NotAFrameError,
    NotAMultiplierError,
    NotCentralError,
    NotInRangeError,
    NotInvertibleError,
    RkmodError,
    SignatureMismatchError,
    SpaceMismatchError,
)
from .frames import (
    Frame,
    FrameBounds,
    canonical_tight,
    frame_bounds,
    frame_operator,
    is_parseval,
    papadakis_identity_check,
)
from .kernels import (
    FeatureFamily,
    Kernel,
    KernelReport,
    PointSet,
    kernel_conjugate,
    kernel_deflate,
    kernel_from_features,
    kernel_tensor,
    validate_kernel,
)
from .modules import (
    HilbertRealization,
    InterpolationResult,
    MembershipResult,
    ModuleSpace,
    ModuleVector,
    evaluate,
    exterior_norm,
    hilbert_realization,
    inner_product,
    is_set_of_uniqueness,
    membership,
    minimal_norm_interpolant,
    projection,
    tensor_embed,
    vector_norm,
)
from .operators import (
    AdjointableOp,
    MultiplierSymbol,
    RecoveredSymbol,
    adjoint,
    apply,
    berezin,
    multiplication_operator,
    multiplier_adjoint_check,
    op_distance,
    recover_symbol,
)

__version__ = "0.1.0"

__all__ = [
    "AdjointableOp",
    "AlgebraElement",
    "FeatureFamily",
    "Frame",
    "FrameBounds",
    "HilbertRealization",
    "InstanceError",
    "InterpolationResult",
    "Kernel",
    "KernelReport",
    "MembershipResult",
    "ModuleSpace",
    "ModuleVector",
    "MultiplierSymbol",
    "NoExtensionError",
    "NotAFrameError",
    "NotAMultiplierError",
    "NotCentralError",
    "NotInRangeError",
    "NotInvertibleError",
    "PointSet",
    "PsiContractionInstance",
    "RecoveredSymbol",
    "RkmodError",
    "SignatureMismatchError",
    "SpaceMismatchError",
    "adjoint",
    "apply",
    "berezin",
    "block_psd",
    "canonical_tight",
    "construct_phi",
    "contraction_check",
    "evaluate",
    "exterior_norm",
    "frame_bounds",
    "frame_operator",
    "hilbert_realization",
    "inner_product",
    "intertwining_check",
    "invert",
    "is_central",
    "is_parseval",
    "is_positive",
    "is_set_of_uniqueness",
    "kernel_conjugate",
    "kernel_deflate",
    "kernel_from_features",
    "kernel_tensor",
    "membership",
    "minimal_norm_interpolant",
    "modulus",
    "modulus_bound_check",
    "multiplication_operator",
    "multiplier_adjoint_check",
    "op_distance",
    "operator_norm",
    "papadakis_identity_check",
    "projection",
    "recover_symbol",
    "tensor",
    "tensor_embed",
    "validate_kernel",
    "vector_norm",
]

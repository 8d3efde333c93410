"""Exact symbolic workbench for the 16 quantum deformations of the centrally
extended two-dimensional Galilei group and their dual quantum Lie algebras."""

from .cases import (
    CaseDef,
    build_presentation,
    builtin,
    classical_limit,
    default_instantiation,
    parse_case,
    render_case,
    sample_instantiations,
)
from .duality import (
    DualityEngine,
    build_pairing_matrix,
    derive_dual_structure,
    dual_star,
    reconstruct,
    verify_dual_structure,
)
from .hopf import (
    HopfPresentation,
    MorphismSpec,
    antipode_inverse,
    apply_morphism,
    run_hopf_suite,
)
from .ncpoly import (
    Alphabet,
    NcPoly,
    RewriteSystem,
    TensorPoly,
    check_overlaps,
    commutator,
    divide_by_parameter,
    multiply,
    normal_order,
    series_apply,
    tensor_multiply,
)
from .scalars import (
    GaussRat,
    MRat,
    MultivariateContext,
    QuadExt,
    Rat,
    ScaledContext,
    TPoly,
    scale_instantiate,
    sqrt_scalar,
)

__version__ = "0.1.0"

"""Exact and floating-point linear algebra for the standard 3-form on R^7.

The package computes with the cross-product 3-form: the metric and
orientation it induces, irreducible decompositions of 2- and 3-forms, the
one-parameter family of 3-forms sharing its metric, parameter recovery and
derivatives of that family, the stabilizer algebra and its normalizer, and
three flat product models with their parameter lattices.
"""
from .bryant import (
    Recovery,
    TwistParams,
    TwistTangent,
    derivative_margin,
    derivative_matrix,
    derivative_rank,
    recover,
    sample_params,
    tangent_basis,
    twist,
    twist_decomposed,
    twist_derivative,
)
from .context import EXACT, FLOAT, Context
from .errors import (
    BracketClosureError,
    ConstraintError,
    DecompositionError,
    DegreeError,
    ExactModeError,
    FrameError,
    G2KitError,
    HolonomyError,
    MetricError,
    MetricMismatchError,
    ModelError,
    NotG2FormError,
    ParseError,
    RecoveryError,
    SubspaceViolationError,
    TangencyError,
)
from .exterior import (
    DIM,
    EUCLIDEAN,
    NEGATIVE,
    POSITIVE,
    KForm,
    Metric,
    Orientation,
    basis_vector,
    flat,
    form_inner,
    hodge_star,
    interior,
    pullback,
    sharp,
    volume_form,
    wedge,
)
from .g2core import (
    Decomposition2,
    Decomposition3,
    G2Structure,
    SymTensor,
    decompose2,
    decompose3,
    infinitesimal_action,
    is_g2_form,
    metric_from_phi,
    odot,
    odot_endo,
    odot_inverse,
    odot_local,
    phi0,
    standard_structure,
    symmetric_basis,
    triple_star_sign,
)
from .liegroup import (
    HolonomySpec,
    SubalgebraBasis,
    act_on_form,
    bracket,
    coset_tangent_dim,
    g2_algebra_basis,
    is_g2,
    is_so7,
    lie_normalizer,
    matrix_exp,
    nf_member,
    so7_basis,
)
from .models import (
    FlatModel,
    GammaPoint,
    covering_sheet_count,
    flat_model,
    gamma_membership,
    gamma_sample,
    holonomy_sample,
    model_phi,
    model_structure,
    translation_action,
    translation_orbit,
)
from .selftest import CheckResult, run_selftest

__version__ = "0.1.0"

__all__ = [
    "BracketClosureError",
    "CheckResult",
    "ConstraintError",
    "Context",
    "DecompositionError",
    "Decomposition2",
    "Decomposition3",
    "DegreeError",
    "DIM",
    "EUCLIDEAN",
    "EXACT",
    "ExactModeError",
    "FLOAT",
    "FlatModel",
    "FrameError",
    "G2KitError",
    "G2Structure",
    "GammaPoint",
    "HolonomyError",
    "HolonomySpec",
    "KForm",
    "Metric",
    "MetricError",
    "MetricMismatchError",
    "ModelError",
    "NEGATIVE",
    "NotG2FormError",
    "Orientation",
    "ParseError",
    "POSITIVE",
    "Recovery",
    "RecoveryError",
    "SubalgebraBasis",
    "SubspaceViolationError",
    "SymTensor",
    "TangencyError",
    "TwistParams",
    "TwistTangent",
    "act_on_form",
    "basis_vector",
    "bracket",
    "coset_tangent_dim",
    "covering_sheet_count",
    "decompose2",
    "decompose3",
    "derivative_margin",
    "derivative_matrix",
    "derivative_rank",
    "flat",
    "flat_model",
    "form_inner",
    "g2_algebra_basis",
    "gamma_membership",
    "gamma_sample",
    "hodge_star",
    "holonomy_sample",
    "infinitesimal_action",
    "interior",
    "is_g2",
    "is_g2_form",
    "is_so7",
    "lie_normalizer",
    "matrix_exp",
    "metric_from_phi",
    "model_phi",
    "model_structure",
    "nf_member",
    "odot",
    "odot_endo",
    "odot_inverse",
    "odot_local",
    "phi0",
    "pullback",
    "recover",
    "run_selftest",
    "sample_params",
    "sharp",
    "so7_basis",
    "standard_structure",
    "symmetric_basis",
    "tangent_basis",
    "translation_action",
    "translation_orbit",
    "triple_star_sign",
    "twist",
    "twist_decomposed",
    "twist_derivative",
    "volume_form",
    "wedge",
]

"""Modular theory, KMS norms and Hoelder-type inequalities for finite-dimensional Gibbs states."""

from .errors import *  # noqa: F401,F403
from .holder import (
    InsertionTuple,
    SplitSpec,
    araki_bound_check,
    exponent_rule,
    finite_trace_holder_check,
    holder_check,
    multi_correlation,
)
from .nclp import (
    NormEstimate,
    OptConfig,
    am_norm,
    chain_identity_check,
    cone_vector,
    kms_norm,
    kms_norm_analytic,
    lemma41_check,
    lemma42_check,
    lp_holder_contraction_check,
    phi_from_cone_vector,
)
from .records import VerificationRecord
from .spectral import (
    SpectralDecomposition,
    eig_hermitian,
    fractional_power,
    norms_and_trace,
    polar_parts,
    psd_check,
    support_projection,
)
from .standard_form import (
    GibbsEnsemble,
    StateFunctional,
    cone_membership,
    embed,
    formal_adjoint_check,
    heisenberg,
    kms_boundary_check,
    kms_function,
    make_gibbs,
    modular_conjugation_apply,
    modular_power_apply,
    relative_modular_power_apply,
    tomita_check,
)

__version__ = "0.1.0"

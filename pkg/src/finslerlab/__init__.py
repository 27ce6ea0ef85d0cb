"""Numerical toolkit for metrics of the form F = alpha * phi(b^2, beta/alpha).

Geodesic (spray) coefficients, curvature tensors, classification residuals,
solution-family constructors, and regularity checks, all backed by exact
truncated-Taylor (jet) differentiation.
"""

from .backend import get_backend, set_backend
from .berwald import (
    BerwaldTensor,
    FJets,
    IsotropicFit,
    berwald_closed_form,
    berwald_oracle,
    f_jets_closed,
    isotropic_fit,
    isotropic_pattern,
)
from .beta import (
    BetaInvariants,
    Christoffel,
    ConformalFit,
    beta_invariants,
    christoffel,
    conformal_check,
    conformal_fit_at,
    covariant_derivative_beta,
    riemannian_spray,
)
from .classify import (
    ClassificationParams,
    OdeSolution,
    PDEResiduals,
    RecoveredParams,
    classification_from_profile,
    derivation_identity_residuals,
    ds3_exactness_check,
    family_berwald,
    family_kropina,
    family_quadratures,
    family_randers,
    family_riemannian,
    lemma41_residuals,
    make_theorem_phi,
    one_order_residual,
    pde_residuals,
    quadratic_spray_check,
    recover_params,
    residual_grid,
    residual_value,
)
from .errors import (
    DomainError,
    FinslerError,
    InstanceFormatError,
    NonConformalError,
    QuadratureError,
    RegularityError,
    SingularMetricError,
)
from .geometry import (
    MetricField,
    MetricInstance,
    OneFormField,
    PhiFunction,
    PhiJet,
    check_domain,
    compute_b2,
    compute_s,
    eval_F,
    fundamental_tensor,
    instance_doc,
    load_instance,
    make_alpha,
    make_beta,
    make_phi,
    navigation_randers,
    phi_jet,
    phi_partials,
    squared_norm_series,
)
from .instances import (
    CONFORMAL_CLOSED,
    REGISTERED,
    SPRAY_SUITE,
    registered_instance,
    theorem_family_instance,
)
from .quadrature import Antiderivative, integrate
from .regularity import RegularityReport, Violation, check_regularity
from .sampling import sample_direction, sample_pairs, sample_points
from .scalarfuncs import ScalarFunc, scalar_func
from .spray import (
    EHScalars,
    SprayResult,
    SprayScalars,
    eh_scalars,
    spray_conformal,
    spray_definitional,
    spray_general,
    spray_scalars,
)

__version__ = "0.1.0"

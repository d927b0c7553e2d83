"""Euler characteristics of Selmer groups over division-field towers of
cyclotomic base fields: exact local reduction data, cyclotomic splitting,
torsion brackets, and the chi / rho / tau invariants, with a CLI front end.
"""

from .curves import (
    CurvePoint,
    TorsionEstimate,
    WeierstrassModel,
    count_points,
    division_polynomial,
    extension_count,
    invariants,
    point_order,
    rational_p_torsion_order,
    torsion_bound_over_F,
)
from .cyclotomic import CyclotomicSplitting, field_degree, splitting
from .euler import (
    AbelianVarietyInput,
    EulerCharReport,
    ExternalArithmetic,
    ReductionFact,
    analyze,
    check_hypotheses,
    chi_euler,
    compute_M,
    corank_report,
    gamma_kernel_exponent,
    ramified_places,
    rho_p,
    tau_p,
)
from .finite_fields import FqElement, FqField, fq_create, fq_is_square
from .local_fields import (
    LocalElement,
    LocalField,
    PrecisionError,
    local_val_residue,
    make_local_field,
)
from .polynomials import Polynomial, rational_roots
from .tate import (
    KodairaType,
    LocalReductionData,
    base_change_rules,
    base_change_unramified,
    classify_split,
    euler_factor_at_one,
    local_field_for,
    pot_supersingular,
    tate_algorithm,
)
from .valuations import PLUS_INFINITY, Valuation, vp

__version__ = "0.1.0"

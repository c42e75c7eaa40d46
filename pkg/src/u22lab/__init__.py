"""Desk-scale numerical laboratory for the triangular subgroup of U(2,2).

Group factorizations, almost-invariant measures on the triangular chart,
the nonunitary action on functions over it, its special cocycle, and the
extension of both to the whole group, with a verification battery behind
the ``u22lab`` command-line tool.
"""

from .matrices import (
    HermitianSignature,
    SIGNATURES,
    NotPositiveDefinite,
    WrongOrbit,
    cholesky_lower,
    signed_triangular_factor,
    matrix_exp,
)
from .groups import (
    TriangularS,
    SkewHermitian2,
    PElement,
    QElement,
    KElement,
    U22Element,
    is_in_u22,
    embed_n,
    embed_s,
    embed_p,
    p_to_q,
    q_to_p,
    q_multiply,
    structured_p_factor,
    iwasawa_decompose,
    sigma_hat,
)
from .orbits import OrbitLabel, pairing, character_multiplier, classify_orbit, orbit_coordinates
from .points import SPoints, reference_points
from .measures import (
    MeasureSpec,
    IntegralEstimate,
    DivergenceVerdict,
    lebesgue_measure,
    haar_measure,
    nu_measure,
    truncated_nu,
    norm_s,
    modulus_pi,
    rn_derivative_right,
    polar_decompose_s,
    integrate_mc,
    divergence_probe,
    PolarShellSampler,
)
from .representation import (
    GroupFunction,
    CocycleVector,
    vacuum,
    apply_T,
    coboundary,
    l2_norm,
    inner_product,
    gram_matrix,
    specialness_report,
)
from .extension import act_k, act_sigma_on_basis, extend_cocycle, apply_extended, ExtendedOperator
from .rank1 import AffElement, LineFunction, apply_U, almost_invariant_check
from .claims import SuiteConfig, ClaimRecord, run_claims

__version__ = "0.1.0"

"""Minimum entropy coupling toolkit.

Greedy approximate solvers for the minimum entropy coupling problem,
local-optimality certificates for their outputs, additive approximation
bound reports, an exact vertex-enumeration oracle for small two-marginal
instances, and an entropic causal direction test built on the solvers.
"""

from .bounds import (
    BoundReport,
    bound_report,
    outer_product_coupling,
    outer_product_entropy_identity,
    special_family,
)
from .causality import (
    DirectionReport,
    JointObservation,
    conditionals_from_joint,
    exogenous_entropy_estimate,
    infer_direction,
)
from .certify import (
    EPS_CERT,
    Certificate,
    CertificateSystem,
    CertificationError,
    build_system,
    certify_local_optimum,
    check_last_one_property,
)
from .core import (
    EPS_MARG,
    EPS_SUM,
    EPS_ZERO,
    DimensionError,
    DomainError,
    Marginal,
    ResidualVector,
    SparseCoupling,
    extended_entropy,
    marginalize,
    sort_decreasing,
    total_variation_sorted,
)
from .greedy import (
    GreedyStep,
    GreedyTrace,
    greedy_coupling,
    greedy_coupling_two_phase,
)
from .oracle import (
    DEFAULT_N_CAP,
    SizeCapError,
    VertexSet,
    entropy_lower_bound,
    enumerate_vertices,
    exact_min_entropy_2var,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "Certificate",
    "CertificateSystem",
    "CertificationError",
    "DEFAULT_N_CAP",
    "DimensionError",
    "DirectionReport",
    "DomainError",
    "EPS_CERT",
    "EPS_MARG",
    "EPS_SUM",
    "EPS_ZERO",
    "GreedyStep",
    "GreedyTrace",
    "JointObservation",
    "Marginal",
    "ResidualVector",
    "SizeCapError",
    "SparseCoupling",
    "VertexSet",
    "bound_report",
    "build_system",
    "certify_local_optimum",
    "check_last_one_property",
    "conditionals_from_joint",
    "entropy_lower_bound",
    "enumerate_vertices",
    "exact_min_entropy_2var",
    "exogenous_entropy_estimate",
    "extended_entropy",
    "greedy_coupling",
    "greedy_coupling_two_phase",
    "infer_direction",
    "marginalize",
    "outer_product_coupling",
    "outer_product_entropy_identity",
    "sort_decreasing",
    "special_family",
    "total_variation_sorted",
]

"""Certify contractive conditions and study Picard iteration on metric spaces."""

from .conditions import (
    BanachContraction,
    BoydWong,
    Certificate,
    Contractive,
    DisplacementGuarded,
    EtaNonstrict,
    EtaStrict,
    Exhaustive,
    GlobalPsiHalf,
    HalfNonstrict,
    Sampled,
    SuzukiHalfStrict,
    SuzukiTheta,
    TestFunction,
    certify,
    implication_expected,
    minimal_lipschitz,
    theta,
)
from .errors import BoundaryError, DegenerateInputError, DomainError, FixlabError, ParameterError, TestFunctionError
from .metric import (
    AxiomReport,
    FiniteMetricSpace,
    LazyLineSpace,
    LineSpace,
    SelfMap,
    apply,
    distance,
    load_space_json,
    verify_metric_axioms,
)
from .orbit import (
    DiagnosticThresholds,
    OrbitTrace,
    capital_delta,
    cauchy_estimate,
    extract_psi,
    fixed_point_of,
    iterate,
    sequential_diagnostic,
)
from .scalar import EXACT, Epsilon, Exact

__version__ = "0.1.0"

__all__ = [
    "apply",
    "AxiomReport",
    "BanachContraction",
    "BoundaryError",
    "BoydWong",
    "capital_delta",
    "cauchy_estimate",
    "Certificate",
    "certify",
    "Contractive",
    "DegenerateInputError",
    "DiagnosticThresholds",
    "DisplacementGuarded",
    "distance",
    "DomainError",
    "Epsilon",
    "EtaNonstrict",
    "EtaStrict",
    "EXACT",
    "Exact",
    "Exhaustive",
    "extract_psi",
    "FiniteMetricSpace",
    "fixed_point_of",
    "FixlabError",
    "GlobalPsiHalf",
    "HalfNonstrict",
    "implication_expected",
    "iterate",
    "LazyLineSpace",
    "LineSpace",
    "load_space_json",
    "minimal_lipschitz",
    "OrbitTrace",
    "ParameterError",
    "Sampled",
    "SelfMap",
    "sequential_diagnostic",
    "SuzukiHalfStrict",
    "SuzukiTheta",
    "TestFunction",
    "TestFunctionError",
    "theta",
    "verify_metric_axioms",
]

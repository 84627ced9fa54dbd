"""Basic cohomology and transverse operator calculus for Riemannian foliations on torus models."""

from .assembly import AssembledOperator, TruncationError, assemble, export_operator, laplacian, read_operator
from .cohomology import (
    CapabilityError,
    CohomologyReport,
    InconsistencyError,
    NonConvergenceError,
    alvarez_class_trivial,
    automorphic_test,
    betti_table,
    ddc_solve,
    eta_class_trivial,
    harmonic_space,
    hodge_diamond_report,
)
from .config import DEFAULTS, Thresholds
from .exterior import BasicForm, CoframeWord, contract, hodge_star, interior, wedge, word
from .fourier import FourierScalar
from .harness import RandomFormSpec, random_form, run_identities
from .lefschetz import lefschetz_rank, primitive_decompose, sl2_check
from .models import BUILTIN_MODELS, FoliationModel, ModelError, build_model, deform_leafwise, resolve_model
from .operators import OperatorKind, apply

__all__ = [
    "AssembledOperator",
    "BUILTIN_MODELS",
    "BasicForm",
    "CapabilityError",
    "CoframeWord",
    "CohomologyReport",
    "DEFAULTS",
    "FoliationModel",
    "FourierScalar",
    "InconsistencyError",
    "ModelError",
    "NonConvergenceError",
    "OperatorKind",
    "RandomFormSpec",
    "Thresholds",
    "TruncationError",
    "alvarez_class_trivial",
    "apply",
    "assemble",
    "automorphic_test",
    "betti_table",
    "build_model",
    "contract",
    "ddc_solve",
    "deform_leafwise",
    "eta_class_trivial",
    "export_operator",
    "harmonic_space",
    "hodge_diamond_report",
    "hodge_star",
    "interior",
    "laplacian",
    "lefschetz_rank",
    "primitive_decompose",
    "random_form",
    "read_operator",
    "resolve_model",
    "run_identities",
    "sl2_check",
    "wedge",
    "word",
]

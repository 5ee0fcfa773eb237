"""Models package."""
from .operators import (
    HermitianOperator,
    DensityMatrix,
    TracelessHermitian,
    OperatorSpanBasis,
)
from .povm import Povm, OutcomeDistribution, Atom, CanonicalForm
from .relations import LinearRelation, StochasticMap, ConstructedPair
from .schemas import (
    PovmSchema,
    StateSchema,
    Violation,
    ValidationReport,
    LogBase,
    EntropyConfig,
    decode_matrix,
    encode_matrix,
    parse_scalar,
)
from .verdicts import (
    VerdictStatus,
    OrderRelation,
    CertificateKind,
    PROJECTIVE_SHORTCUT,
    SearchBudget,
    BudgetUsage,
    Certificate,
    Witness,
    OrderVerdict,
    LinearRelationSummary,
    DirectionClassification,
    PairClassification,
    SeparationParameters,
)
from .fixtures import (
    LogTerm,
    ClosedForm,
    ExpectedValue,
    ExpectedRelation,
    ExampleFixture,
    ReproductionCheck,
    ReproductionReport,
)
from .requests import (
    EntropyRequest,
    RelativeEntropyRequest,
    EntropyValue,
    PairRequest,
    ClassifyRequest,
    EquivalenceResponse,
    EpsMixRequest,
    NLambdaRequest,
    ConstructResponse,
)

__all__ = [
    "HermitianOperator",
    "DensityMatrix",
    "TracelessHermitian",
    "OperatorSpanBasis",
    "Povm",
    "OutcomeDistribution",
    "Atom",
    "CanonicalForm",
    "LinearRelation",
    "StochasticMap",
    "ConstructedPair",
    "PovmSchema",
    "StateSchema",
    "Violation",
    "ValidationReport",
    "LogBase",
    "EntropyConfig",
    "decode_matrix",
    "encode_matrix",
    "parse_scalar",
    "VerdictStatus",
    "OrderRelation",
    "CertificateKind",
    "PROJECTIVE_SHORTCUT",
    "SearchBudget",
    "BudgetUsage",
    "Certificate",
    "Witness",
    "OrderVerdict",
    "LinearRelationSummary",
    "DirectionClassification",
    "PairClassification",
    "SeparationParameters",
    "LogTerm",
    "ClosedForm",
    "ExpectedValue",
    "ExpectedRelation",
    "ExampleFixture",
    "ReproductionCheck",
    "ReproductionReport",
    "EntropyRequest",
    "RelativeEntropyRequest",
    "EntropyValue",
    "PairRequest",
    "ClassifyRequest",
    "EquivalenceResponse",
    "EpsMixRequest",
    "NLambdaRequest",
    "ConstructResponse",
]

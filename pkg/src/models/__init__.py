from src.models.distribution import (
    FactorialMomentSequence,
    HankelPair,
    MomentSequence,
    NormPolicy,
    PhotonDistribution,
    XnSequence,
    make_distribution,
)
from src.models.errors import (
    DegenerateCat,
    DivergentTail,
    InputFormatError,
    NegativeProbability,
    NonclassicalityError,
    NormalizationViolation,
    QuadratureNotConverged,
    WindowTooShort,
)
from src.models.report import CheckCoverage, CheckName, Verdict, Witness, WitnessReport
from src.models.specs import FIG1_MIXTURE, CatStateSpec, CoherentMixtureSpec, PhotonAddedSpec

__all__ = [
    "PhotonDistribution",
    "NormPolicy",
    "make_distribution",
    "MomentSequence",
    "FactorialMomentSequence",
    "XnSequence",
    "HankelPair",
    "Verdict",
    "CheckName",
    "Witness",
    "CheckCoverage",
    "WitnessReport",
    "CoherentMixtureSpec",
    "CatStateSpec",
    "PhotonAddedSpec",
    "FIG1_MIXTURE",
    "NonclassicalityError",
    "NegativeProbability",
    "NormalizationViolation",
    "WindowTooShort",
    "DivergentTail",
    "DegenerateCat",
    "QuadratureNotConverged",
    "InputFormatError",
]

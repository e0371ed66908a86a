"""Spectral classification of absolutely norm attaining positive operators.

Positive diagonal operators (and weighted shifts through their moduli) are
modeled by exact finitely-described sequences.  The package decides
whether such an operator attains its norm on every nonzero closed
subspace, builds the constructive ``alpha*I + K+ + F`` split or an
explicit refutation subspace, certifies composite ``alpha*I + K + F``
operators by positivity, and cross-checks everything in floating point on
finite sections.
"""

from .classify import (
    ANVerdict,
    Certificate,
    CompositeOperator,
    CoordinateWitness,
    Decomposition,
    InfinitelyManyBelowAlpha,
    IsAN,
    MixedPairsWitness,
    MultipleEssentialPoints,
    NotAN,
    Witness,
    an_certificate,
    build_witness,
    classify_an,
    decompose,
)
from .errors import (
    InvalidSpec,
    NoConvergence,
    NotApplicable,
    NotPositive,
    NotPositiveSemidefinite,
    PredictionMismatch,
    RankDeficient,
)
from .rationals import Rational, format_rational, parse_rational
from .seqmodel import (
    Approach,
    BelowAlphaResult,
    FiniteBelow,
    InfiniteBelow,
    SequenceSpec,
    Strand,
)
from .shiftapp import (
    FiniteSpectrumBranch,
    InfiniteSpectrumBranch,
    ShiftConditionReport,
    WeightedShift,
    classify_shift,
)
from .specfile import parse_spec, parse_spec_data

__version__ = "0.1.0"

__all__ = [
    "ANVerdict",
    "Approach",
    "BelowAlphaResult",
    "Certificate",
    "CompositeOperator",
    "CoordinateWitness",
    "Decomposition",
    "FiniteBelow",
    "FiniteSpectrumBranch",
    "InfiniteBelow",
    "InfinitelyManyBelowAlpha",
    "InfiniteSpectrumBranch",
    "InvalidSpec",
    "IsAN",
    "MixedPairsWitness",
    "MultipleEssentialPoints",
    "NoConvergence",
    "NotAN",
    "NotApplicable",
    "NotPositive",
    "NotPositiveSemidefinite",
    "PredictionMismatch",
    "RankDeficient",
    "Rational",
    "SequenceSpec",
    "ShiftConditionReport",
    "Strand",
    "WeightedShift",
    "Witness",
    "an_certificate",
    "build_witness",
    "classify_an",
    "classify_shift",
    "decompose",
    "format_rational",
    "parse_rational",
    "parse_spec",
    "parse_spec_data",
]

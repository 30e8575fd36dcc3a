"""Finite-scale category theory: presheaves over finite bases, lifting
problems, small-object factorizations and orthogonal reflections, each
result paired with a certificate that can be re-checked exhaustively."""

from ._kernels import BACKEND
from .errors import (BadStage, CategoryError, ConfigError, DeskcatError, FunctorError, IdentityLawViolation,
                     MissingComposite, NonAssociative, OracleInconsistent, PresheafError, SearchExceeded,
                     UniquenessFailure, WindowTooSmall)
from .fincat import (FinCategory, Functor, NatTransformation, ProceduralCategory, comma_category, materialize,
                     opposite, ordinals, validate_category)
from .presheaf import (FormalColimitPresheaf, PresheafMap, TabularPresheaf, canonical_functor_E, evaluate_formal,
                       tabulate, yoneda)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BadStage", "CategoryError", "ConfigError", "DeskcatError", "FunctorError", "IdentityLawViolation",
    "MissingComposite", "NonAssociative", "OracleInconsistent", "PresheafError", "SearchExceeded",
    "UniquenessFailure", "WindowTooSmall", "FinCategory", "Functor", "NatTransformation", "ProceduralCategory",
    "comma_category", "materialize", "opposite", "ordinals", "validate_category", "FormalColimitPresheaf",
    "PresheafMap", "TabularPresheaf", "canonical_functor_E", "evaluate_formal", "tabulate", "yoneda",
]

from .bispan import (
    Bispan,
    bispan_isomorphism,
    compose_bispans,
    evaluate_morphism,
    from_n,
    from_r,
    from_t,
    identity_bispan,
    is_isomorphic,
)
from .exponential import ExpDTuple, ExponentialDiagram, exponential_diagram
from .laws import LAWS, LawReport, law_sides, verify_law
from .pullback import Pullback, PullbackElement, additive_pullback, mult_pullback

__all__ = [
    "Bispan", "bispan_isomorphism", "compose_bispans", "evaluate_morphism", "from_n", "from_r",
    "from_t", "identity_bispan", "is_isomorphic", "ExpDTuple", "ExponentialDiagram",
    "exponential_diagram", "LAWS", "LawReport", "law_sides", "verify_law", "Pullback",
    "PullbackElement", "additive_pullback", "mult_pullback",
]

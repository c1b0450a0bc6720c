"""Witt vectors over truncation posets.

Posets, their R/T/N maps, the ghost map, the three induced operations
(pull, transfer, norm) via universal polynomials, and the span/bispan
calculus that composes them.
"""

from .errors import (
    DoesNotExist,
    JoinsRequired,
    LemmaViolation,
    NotInImage,
    NotNMap,
    NotTMap,
    ParseError,
    WittkitError,
)
from .maps import PosetMap, compose, decompose, fold, identity, inclusion, make_map, minimal_fiber, mult, mult_map
from .poset import (
    TruncationPoset,
    coproduct,
    divisor_poset,
    from_set,
    gcd_poset,
    has_joins,
    validate,
    word_poset,
)
from .rings import ZZ, Integers, Modular, Poly, PolyRing, RingElement, RingHandle
from .witt import (
    GhostVector,
    UniversalFormula,
    WittVector,
    add,
    change_ring,
    classical,
    dwork_check,
    frobenius,
    ghost,
    ghost_norm,
    ghost_pull,
    ghost_transfer,
    ghost_vector,
    mul,
    norm,
    norm_n,
    pull,
    restrict,
    transfer,
    unghost,
    universal,
    universal_vector,
    verschiebung,
    witt_vector,
    zero_vector,
)
from .category import (
    Bispan,
    ExponentialDiagram,
    additive_pullback,
    compose_bispans,
    evaluate_morphism,
    exponential_diagram,
    mult_pullback,
    verify_law,
)

__version__ = "0.1.0"

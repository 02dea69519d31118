"""Symbolic dynamics: symbol matrices, entropy, sequences and itineraries."""
from .matrices import (
    Edge,
    PerronResult,
    SymbolMatrix,
    conjugacy_labels,
    count_admissible_words,
    edge_subshift,
    is_irreducible,
    perron_eigenvalue,
)
from .sequences import (
    Distance,
    ItineraryResult,
    SymbolSequence,
    itinerary,
    lyndon_words,
    shift_distance,
)

__all__ = [
    "Distance",
    "Edge",
    "ItineraryResult",
    "PerronResult",
    "SymbolMatrix",
    "SymbolSequence",
    "conjugacy_labels",
    "count_admissible_words",
    "edge_subshift",
    "is_irreducible",
    "itinerary",
    "lyndon_words",
    "perron_eigenvalue",
    "shift_distance",
]

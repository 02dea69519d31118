"""
Symbol sequences, the sequence-space metric, primitive cyclic words and
itinerary coding of orbits.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DomainError, SymbolicDynamicsError

logger = logging.getLogger(__name__)

ITINERARY_BAND = 1e-9


@dataclass(frozen=True)
class SymbolSequence:
    """A finite word over ``{0, ..., m-1}``; ``periodic`` means it repeats forever."""

    symbols: Tuple[int, ...]
    m: int = 2
    periodic: bool = False

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        if not symbols:
            raise SymbolicDynamicsError("symbol sequences are non-empty")
        if self.m < 1 or any(s < 0 or s >= self.m for s in symbols):
            raise SymbolicDynamicsError(f"symbols must lie in 0..{self.m - 1}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def parse(cls, word: str, m: Optional[int] = None, periodic: bool = False) -> "SymbolSequence":
        try:
            symbols = tuple(int(ch) for ch in word.strip())
        except ValueError as exc:
            raise SymbolicDynamicsError(f"invalid symbol word {word!r}") from exc
        if not symbols:
            raise SymbolicDynamicsError("empty symbol word")
        return cls(symbols, m if m is not None else max(2, max(symbols) + 1), periodic)

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return "".join(str(s) for s in self.symbols)

    def symbol(self, i: int) -> int:
        if self.periodic:
            return self.symbols[i % len(self.symbols)]
        if i >= len(self.symbols):
            raise IndexError(i)
        return self.symbols[i]

    def shifted(self, k: int = 1) -> "SymbolSequence":
        """The shift map applied *k* times."""
        if self.periodic:
            k %= len(self.symbols)
            return SymbolSequence(self.symbols[k:] + self.symbols[:k], self.m, True)
        if k >= len(self.symbols):
            raise SymbolicDynamicsError("shift exhausts a finite word")
        return SymbolSequence(self.symbols[k:], self.m, False)

    def prefix(self, n: int) -> Tuple[int, ...]:
        return tuple(self.symbol(i) for i in range(n))


@dataclass(frozen=True)
class Distance:
    value: float
    tail_bound: float
    horizon: int


def shift_distance(first: SymbolSequence, second: SymbolSequence, m: Optional[int] = None,
                   horizon: int = 64, discrete: bool = False) -> Distance:
    """Truncated sequence-space distance with a bound on the neglected tail.

    The default weights ``|s'_i - s''_i| / m^(i+1)``; ``discrete=True`` uses
    the 0/1 discrepancy instead.
    """
    m = m or max(first.m, second.m)
    if first.m != second.m or first.m != m:
        raise SymbolicDynamicsError("sequences over different alphabets")
    if horizon < 1:
        raise SymbolicDynamicsError("horizon must be at least 1")
    limit = horizon
    if not (first.periodic and second.periodic):
        limit = min(horizon, len(first) if not first.periodic else horizon,
                    len(second) if not second.periodic else horizon)
    total = 0.0
    for i in range(limit):
        diff = abs(first.symbol(i) - second.symbol(i))
        if discrete:
            diff = 1 if diff else 0
        total += diff / float(m) ** (i + 1)
    largest = 1 if discrete else m - 1
    # Sum over i >= limit of largest / m^(i+1).
    tail = largest / (float(m) ** limit * (m - 1)) if m > 1 else 0.0
    return Distance(total, tail, limit)


def lyndon_words(m: int, max_length: int) -> Iterator[Tuple[int, ...]]:
    """Primitive necklace representatives of length 1..max_length (Duval's algorithm)."""
    if m < 1 or max_length < 1:
        return
    word = [-1]
    while word:
        word[-1] += 1
        yield tuple(word)
        length = len(word)
        while len(word) < max_length:
            word.append(word[len(word) - length])
        while word and word[-1] == m - 1:
            word.pop()


@dataclass(frozen=True)
class ItineraryResult:
    """Finite itinerary; ``failure_index`` is set when coding stopped early."""

    symbols: Tuple[int, ...]
    failure_index: Optional[int] = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.failure_index is None

    def __str__(self) -> str:
        word = "".join(str(s) for s in self.symbols)
        return word if self.ok else f"{word}!{self.failure_index}:{self.reason}"

    def to_sequence(self, m: int) -> SymbolSequence:
        return SymbolSequence(self.symbols, m)


def itinerary(mapping, regions: Sequence, z0: Union[Sequence[float], np.ndarray], n: int,
              band: float = ITINERARY_BAND) -> ItineraryResult:
    """Code the first *n* iterates of *z0* by the regions they visit.

    Stops at index ``j`` when the ``j``-th iterate lies in no region or within
    *band* of two regions; a domain error while computing iterate ``j + 1``
    stops at ``j + 1``.
    """
    state = np.asarray(z0, dtype=float).reshape(1, 2)
    symbols: List[int] = []
    for i in range(n):
        if not np.isfinite(state).all():
            return ItineraryResult(tuple(symbols), i, "domain")
        inside = [r.label for r in regions if r.contains(state)[0]]
        near = [r.label for r in regions if r.near(state, band)[0]]
        if not inside:
            return ItineraryResult(tuple(symbols), i, "outside")
        if len(set(near)) > 1:
            return ItineraryResult(tuple(symbols), i, "ambiguous")
        symbols.append(inside[0])
        if i + 1 < n:
            try:
                state = np.asarray(mapping.evaluate(state), dtype=float)
            except DomainError:
                return ItineraryResult(tuple(symbols), i + 1, "domain")
    return ItineraryResult(tuple(symbols))

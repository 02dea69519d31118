"""
Transition and adjacency matrices: Perron eigenvalue, irreducibility, edge
subshifts and admissible word counts.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from ..errors import MatrixParseError, SymbolicDynamicsError

logger = logging.getLogger(__name__)

MatrixKind = Literal["transition", "adjacency"]


@dataclass(frozen=True, eq=False)
class SymbolMatrix:
    """Square nonnegative integer matrix with symbol labels."""

    entries: np.ndarray
    kind: MatrixKind = "transition"
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        arr = np.asarray(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise SymbolicDynamicsError(f"symbol matrix must be square and non-empty, got {arr.shape}")
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise SymbolicDynamicsError("symbol matrix entries must be integers")
        arr = arr.astype(np.int64)
        if (arr < 0).any():
            raise SymbolicDynamicsError("symbol matrix entries must be nonnegative")
        if self.kind not in ("transition", "adjacency"):
            raise SymbolicDynamicsError(f"unknown matrix kind {self.kind!r}")
        if self.kind == "transition" and (arr > 1).any():
            raise SymbolicDynamicsError("transition matrices are 0/1")
        labels = self.labels
        if labels is None:
            labels = tuple(str(i) for i in range(arr.shape[0]))
        elif len(labels) != arr.shape[0]:
            raise SymbolicDynamicsError("one label per symbol required")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "labels", tuple(labels))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def full(cls, m: int) -> "SymbolMatrix":
        return cls(np.ones((m, m), dtype=np.int64))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolMatrix):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.kind, self.entries.tobytes()))

    def is_permutation(self) -> bool:
        e = self.entries
        return bool(((e == 0) | (e == 1)).all() and (e.sum(axis=0) == 1).all() and (e.sum(axis=1) == 1).all())

    def to_text(self) -> str:
        return "\n".join(" ".join(str(int(v)) for v in row) for row in self.entries) + "\n"

    @classmethod
    def from_text(cls, text: str, kind: MatrixKind = "transition") -> "SymbolMatrix":
        rows: List[List[int]] = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                rows.append([int(tok) for tok in line.split()])
            except ValueError as exc:
                raise MatrixParseError(f"line {lineno}: non-integer entry") from exc
        if not rows:
            raise MatrixParseError("empty matrix")
        if any(len(row) != len(rows) for row in rows):
            raise MatrixParseError(f"matrix is not square ({len(rows)} rows)")
        try:
            return cls(np.array(rows, dtype=np.int64), kind=kind)
        except SymbolicDynamicsError as exc:
            raise MatrixParseError(str(exc)) from exc

    @classmethod
    def read(cls, path: Union[str, Path], kind: MatrixKind = "transition") -> "SymbolMatrix":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise MatrixParseError(f"cannot read {path}: {exc}") from exc
        return cls.from_text(text, kind)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.to_text(), encoding="utf-8")
        return path


@dataclass(frozen=True)
class PerronResult:
    eigenvalue: float
    entropy: float
    method: str
    iterations: int = 0

    def to_dict(self) -> dict:
        return {"eigenvalue": self.eigenvalue, "entropy": self.entropy,
                "method": self.method, "iterations": self.iterations}


def perron_eigenvalue(matrix: SymbolMatrix, tol: float = 1e-14,
                      max_iterations: int = 1_000_000, eps: float = 1e-12) -> PerronResult:
    """Largest-modulus eigenvalue of a nonnegative matrix and its logarithm.

    Power iteration from the all-ones vector; when the Rayleigh quotient does
    not settle, falls back to the spectrum of ``M + eps*I``.
    """
    m = matrix.entries.astype(float)
    if not m.any():
        raise SymbolicDynamicsError("Perron eigenvalue of the zero matrix")
    if matrix.is_permutation():
        return PerronResult(1.0, 0.0, "permutation")

    # Periodic (imprimitive) matrices make plain iteration oscillate; M + I
    # has Perron eigenvalue lambda + 1 and no other eigenvalue of that modulus.
    plain_budget = min(max_iterations, 10_000)
    used = 0
    for shift, budget, method in ((0.0, plain_budget, "power"),
                                  (1.0, max_iterations - plain_budget, "shifted-power")):
        lam, steps = _power_iteration(m + shift * np.eye(matrix.n), tol, budget)
        used += steps
        if lam is not None:
            lam -= shift
            logger.debug("%s iteration converged after %d steps", method, steps)
            if lam <= 0:
                break
            return PerronResult(lam, math.log(lam), method, used)
    iteration = used

    values = np.linalg.eigvals(m + eps * np.eye(matrix.n))
    lam = float(np.max(np.abs(values))) - eps
    logger.warning("power iteration did not converge; using shifted eigenvalues (lambda=%.12g)", lam)
    if lam <= 0:
        return PerronResult(0.0, float("-inf"), "shifted-eigvals", iteration)
    return PerronResult(lam, math.log(lam), "shifted-eigvals", iteration)


def _power_iteration(m: np.ndarray, tol: float, budget: int):
    x = np.ones(m.shape[0])
    previous = math.nan
    for step in range(1, budget + 1):
        y = m @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return None, step
        quotient = float(x @ y) / float(x @ x)
        x = y / norm
        if abs(quotient - previous) < tol * max(1.0, abs(quotient)):
            return float(np.linalg.norm(m @ x)), step
        previous = quotient
    return None, budget


def is_irreducible(matrix: SymbolMatrix) -> bool:
    """Strong connectivity of the graph ``i -> k`` iff ``M[i, k] > 0``."""
    n = matrix.n
    if n == 1:
        return bool(matrix.entries[0, 0] > 0)
    graph = csr_matrix((matrix.entries > 0).astype(np.int8))
    forward = breadth_first_order(graph, 0, directed=True, return_predecessors=False)
    if len(forward) != n:
        return False
    backward = breadth_first_order(graph.T.tocsr(), 0, directed=True, return_predecessors=False)
    return len(backward) == n


@dataclass(frozen=True)
class Edge:
    initial: int
    terminal: int
    copy: int


def edge_subshift(adjacency: SymbolMatrix) -> Tuple[SymbolMatrix, List[Edge]]:
    """Vertex transition matrix over the edges of an adjacency graph.

    Edges are enumerated row-major with multiplicity; ``T'[e, f] = 1`` iff the
    terminal vertex of ``e`` is the initial vertex of ``f``.
    """
    a = adjacency.entries
    if not a.any():
        raise SymbolicDynamicsError("adjacency matrix has no edges")
    edges = [
        Edge(i, k, c)
        for i in range(a.shape[0])
        for k in range(a.shape[1])
        for c in range(int(a[i, k]))
    ]
    initial = np.array([e.initial for e in edges])
    terminal = np.array([e.terminal for e in edges])
    t = (terminal[:, None] == initial[None, :]).astype(np.int64)
    labels = tuple(f"{e.initial}>{e.terminal}#{e.copy}" for e in edges)
    return SymbolMatrix(t, "transition", labels), edges


def conjugacy_labels(edges: Sequence[Edge]) -> List[int]:
    """Vertex symbol carried by each edge symbol (its initial vertex)."""
    return [e.initial for e in edges]


def count_admissible_words(matrix: SymbolMatrix, n: int) -> int:
    """Number of words of length *n* allowed by *matrix* (sum of entries of ``M^(n-1)``)."""
    if n < 1:
        raise SymbolicDynamicsError("word length must be at least 1")
    m = matrix.entries.astype(object)
    v = np.ones(matrix.n, dtype=object)
    for _ in range(n - 1):
        v = m.dot(v)
    return int(sum(v))

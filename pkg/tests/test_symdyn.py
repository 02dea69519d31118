import math
from collections import Counter
from itertools import product

import numpy as np
import pytest

from stretchchaos.errors import MatrixParseError, SymbolicDynamicsError
from stretchchaos.geometry import RegionPredicate
from stretchchaos.models import IntervalMap
from stretchchaos.symdyn import (
    SymbolMatrix,
    SymbolSequence,
    conjugacy_labels,
    count_admissible_words,
    edge_subshift,
    is_irreducible,
    itinerary,
    lyndon_words,
    perron_eigenvalue,
    shift_distance,
)

GOLDEN_MEAN_ENTROPY = 0.4812118250596


def brute_force_words(entries, n):
    m = len(entries)
    return sum(
        all(entries[a][b] for a, b in zip(word, word[1:]))
        for word in product(range(m), repeat=n)
    )


# --------------------------------------------------------------------------- #
# Entropy
# --------------------------------------------------------------------------- #
def test_golden_mean_entropy():
    result = perron_eigenvalue(SymbolMatrix(np.array([[1, 1], [1, 0]])))
    assert result.eigenvalue == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)
    assert result.entropy == pytest.approx(GOLDEN_MEAN_ENTROPY, abs=1e-10)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_full_shift_entropy(m):
    assert perron_eigenvalue(SymbolMatrix.full(m)).entropy == pytest.approx(math.log(m), abs=1e-12)


def test_permutations_have_zero_entropy():
    swap = perron_eigenvalue(SymbolMatrix(np.array([[0, 1], [1, 0]])))
    assert (swap.eigenvalue, swap.entropy, swap.method) == (1.0, 0.0, "permutation")
    assert perron_eigenvalue(SymbolMatrix(np.array([[1]]))).entropy == 0.0


def test_periodic_matrix_still_converges():
    cycle = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]])
    result = perron_eigenvalue(SymbolMatrix(cycle))
    assert result.eigenvalue == pytest.approx(math.sqrt(2), abs=1e-10)


def test_zero_matrix_is_rejected():
    with pytest.raises(SymbolicDynamicsError):
        perron_eigenvalue(SymbolMatrix(np.zeros((2, 2))))


def test_adjacency_matrix_through_edge_shift():
    adjacency = SymbolMatrix(np.array([[2]]), kind="adjacency")
    edge_matrix, edges = edge_subshift(adjacency)
    assert edge_matrix.entries.tolist() == [[1, 1], [1, 1]]
    assert conjugacy_labels(edges) == [0, 0]
    assert perron_eigenvalue(edge_matrix).entropy == pytest.approx(math.log(2), abs=1e-12)
    assert perron_eigenvalue(adjacency).entropy == pytest.approx(math.log(2), abs=1e-12)


def test_transition_matrices_are_zero_one():
    with pytest.raises(SymbolicDynamicsError):
        SymbolMatrix(np.array([[2]]))


@pytest.mark.parametrize("text", ["", "1 1\n1\n", "1 x\n0 1\n", "1 -1\n0 1\n"])
def test_matrix_parse_errors(text):
    with pytest.raises(MatrixParseError):
        SymbolMatrix.from_text(text)


def test_matrix_text_ignores_comments(tmp_path):
    path = tmp_path / "golden.txt"
    path.write_text("# golden mean\n1 1\n1 0  # no 11\n")
    assert SymbolMatrix.read(path) == SymbolMatrix(np.array([[1, 1], [1, 0]]))
    with pytest.raises(MatrixParseError):
        SymbolMatrix.read(tmp_path / "missing.txt")


def test_irreducibility():
    assert is_irreducible(SymbolMatrix(np.array([[1, 1], [1, 0]])))
    assert not is_irreducible(SymbolMatrix(np.array([[1, 1], [0, 1]])))
    assert not is_irreducible(SymbolMatrix(np.array([[0]])))


@pytest.mark.parametrize("entries", [
    [[1, 1], [1, 0]],
    [[0, 1, 1], [1, 0, 0], [1, 1, 1]],
    [[1, 1, 0], [0, 0, 1], [1, 0, 0]],
])
def test_word_counts_match_enumeration(entries):
    matrix = SymbolMatrix(np.array(entries))
    for n in range(1, 7):
        assert count_admissible_words(matrix, n) == brute_force_words(entries, n)


# --------------------------------------------------------------------------- #
# Sequences
# --------------------------------------------------------------------------- #
def test_binary_lyndon_word_counts():
    counts = Counter(len(w) for w in lyndon_words(2, 8))
    assert [counts[n] for n in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]
    assert sum(1 for _ in lyndon_words(2, 6)) == 23


def test_lyndon_words_are_primitive_rotations_minima():
    for word in lyndon_words(3, 5):
        rotations = [word[k:] + word[:k] for k in range(1, len(word))]
        assert all(word < r for r in rotations)


def test_periodic_sequence_shift():
    seq = SymbolSequence.parse("011", periodic=True)
    assert seq.prefix(7) == (0, 1, 1, 0, 1, 1, 0)
    assert str(seq.shifted(2)) == "101"
    with pytest.raises(SymbolicDynamicsError):
        SymbolSequence.parse("01").shifted(2)


def test_shift_distance_weights_and_tail():
    a = SymbolSequence.parse("0000", periodic=True)
    b = SymbolSequence.parse("1000", periodic=True)
    d = shift_distance(a, b, horizon=20)
    assert d.value == pytest.approx(sum(2.0 ** -(i + 1) for i in (0, 4, 8, 12, 16)), abs=1e-15)
    assert d.tail_bound == pytest.approx(2.0 ** -20)
    same = shift_distance(a, a, horizon=10)
    assert same.value == 0.0
    assert shift_distance(a, b, horizon=1, discrete=True).value == 0.5


def test_itinerary_of_the_doubling_map():
    doubling = IntervalMap(lambda x: (2 * x) % 1.0, 0.0, 1.0, "doubling").embedded()
    halves = [
        RegionPredicate.box(0.0, 0.49, 0.0, 1.0, 0, "I0"),
        RegionPredicate.box(0.51, 1.0, 0.0, 1.0, 1, "I1"),
    ]
    result = itinerary(doubling, halves, [0.2, 0.5], 4, band=1e-9)
    # 0.2 -> 0.4 -> 0.8 -> 0.6
    assert result.ok
    assert result.symbols == (0, 0, 1, 1)
    stuck = itinerary(doubling, halves, [0.25, 0.5], 3, band=1e-9)
    assert not stuck.ok
    assert stuck.failure_index == 1
    assert stuck.reason == "outside"
    assert str(stuck) == "0!1:outside"

"""
Tests for cactus cell enumeration, facets and the Sigma_n relabelling action
"""

import pytest
from hypothesis import given, settings, strategies as st

from services.cactus_cells import (
    CactusCell,
    Shape,
    canonical_rotation,
    compose,
    enumerate_cells,
    facets,
    is_admissible,
    make_cell,
    orbit_normal_form,
    orbit_representatives,
    orbits_and_stabilizers,
    relabel,
    word_stabilizer,
)
from services.errors import InvalidInputError, ResourceLimitError


def counts(n, shape):
    return {dim: len(cells) for dim, cells in enumerate_cells(n, shape).items()}


@pytest.mark.parametrize("word, shape, expected", [
    ((1, 2, 1), Shape.LINEAR, True),
    ((1, 2, 1, 2), Shape.LINEAR, False),
    ((1, 1, 2), Shape.LINEAR, False),
    ((1, 2, 1), Shape.CYCLIC, False),
    ((1, 2, 1, 3), Shape.CYCLIC, True),
    ((1,), Shape.CYCLIC, True),
    ((1, 3), Shape.LINEAR, False),
])
def test_admissibility(word, shape, expected):
    assert is_admissible(word, shape, max(word)) is expected


def test_labels_outside_range_are_rejected():
    with pytest.raises(InvalidInputError):
        is_admissible((1, 4), Shape.LINEAR, 3)
    with pytest.raises(InvalidInputError):
        make_cell((1, 2, 1, 2), Shape.LINEAR)


def test_small_cell_counts():
    assert counts(1, Shape.LINEAR) == {0: 1}
    assert counts(1, Shape.CYCLIC) == {0: 1}
    assert counts(2, Shape.LINEAR) == {0: 2, 1: 2}
    assert counts(2, Shape.CYCLIC) == {0: 1}
    # two zero cells and three edges
    assert counts(3, Shape.CYCLIC) == {0: 2, 1: 3}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_euler_characteristic_of_cell_counts(n):
    linear = sum((-1) ** d * c for d, c in counts(n, Shape.LINEAR).items())
    cyclic = sum((-1) ** d * c for d, c in counts(n, Shape.CYCLIC).items())
    expected_cyclic = 1
    for k in range(2, n):
        expected_cyclic *= 1 - k
    assert linear == 0
    assert cyclic == expected_cyclic


@pytest.mark.parametrize("n", [3, 4, 5])
def test_top_dimensions(n):
    assert max(enumerate_cells(n, Shape.LINEAR)) == n - 1
    assert max(enumerate_cells(n, Shape.CYCLIC)) == n - 2


def test_cyclic_words_are_stored_canonically():
    for cells in enumerate_cells(4, Shape.CYCLIC).values():
        for cell in cells:
            assert canonical_rotation(cell.word)[0] == cell.word


def test_enumeration_refuses_large_n(monkeypatch):
    monkeypatch.setenv("WORKBENCH_MAX_N", "4")
    with pytest.raises(ResourceLimitError):
        enumerate_cells(5, Shape.LINEAR)


def test_facets_of_a_zero_cell_are_empty():
    assert facets(make_cell((1, 2), Shape.CYCLIC)) == []


def test_facets_of_cyclic_edge():
    cell = make_cell((1, 2, 1, 3), Shape.CYCLIC)
    words = sorted(f.cell.word for f in facets(cell))
    assert words == [(1, 2, 3), (1, 3, 2)]


@pytest.mark.parametrize("shape", [Shape.LINEAR, Shape.CYCLIC])
@pytest.mark.parametrize("n", [2, 3, 4, 5, pytest.param(6, marks=pytest.mark.slow)])
def test_facets_are_admissible_and_one_dimension_lower(n, shape):
    for cells in enumerate_cells(n, shape).values():
        for cell in cells:
            found = facets(cell)
            assert len(found) == sum(m for m in cell.multiplicities if m >= 2)
            for facet in found:
                assert facet.cell.dim == cell.dim - 1
                assert is_admissible(facet.cell.word, shape, n)
                assert facet.sign in (1, -1)


def test_facets_of_a_linear_two_cell():
    cell = make_cell((2, 3, 2, 1, 2), Shape.LINEAR, 3)
    assert cell.dim == 2
    found = facets(cell)
    assert [f.cell.word for f in found] == [(3, 2, 1, 2), (2, 3, 1, 2), (2, 3, 2, 1)]
    assert [f.position for f in found] == [0, 2, 4]


def test_relabel_examples():
    assert relabel(make_cell((1, 2, 3), Shape.CYCLIC), (2, 3, 1)).word == (1, 2, 3)
    # (1,3,1,2) rotates back to (1,2,1,3)
    assert relabel(make_cell((1, 2, 1, 3), Shape.CYCLIC), (1, 3, 2)).word == (1, 2, 1, 3)
    with pytest.raises(InvalidInputError):
        relabel(make_cell((1, 2, 3), Shape.CYCLIC), (1, 1, 2))


@st.composite
def cell_and_permutations(draw):
    n = draw(st.integers(min_value=2, max_value=4))
    shape = draw(st.sampled_from([Shape.LINEAR, Shape.CYCLIC]))
    cells = [cell for level in enumerate_cells(n, shape).values() for cell in level]
    cell = draw(st.sampled_from(cells))
    pi = tuple(draw(st.permutations(range(1, n + 1))))
    rho = tuple(draw(st.permutations(range(1, n + 1))))
    return cell, pi, rho


@settings(max_examples=60, deadline=None)
@given(cell_and_permutations())
def test_relabel_is_a_group_action(data):
    cell, pi, rho = data
    identity = tuple(range(1, cell.n + 1))
    assert relabel(cell, identity) == cell
    assert relabel(relabel(cell, pi), rho) == relabel(cell, compose(rho, pi))
    assert relabel(cell, pi).dim == cell.dim


def test_stabilizer_of_the_four_cycle():
    stabilizer = word_stabilizer((1, 2, 3, 4))
    assert stabilizer.order == 4
    assert (1, (4, 1, 2, 3)) in stabilizer.elements or (1, (2, 3, 4, 1)) in stabilizer.elements


def test_orbit_normal_form_transports_the_word():
    word = (2, 3, 2, 1)
    rep, perm = orbit_normal_form(word)
    assert rep == (1, 2, 1, 3)
    assert relabel(CactusCell(canonical_rotation(word)[0], Shape.CYCLIC, 3), perm).word == rep


@pytest.mark.parametrize("n", [3, 4, 5])
def test_orbit_sizes_follow_orbit_stabilizer(n):
    cells = [cell for level in enumerate_cells(n, Shape.CYCLIC).values() for cell in level]
    summaries = orbits_and_stabilizers(cells, n)
    factorial = 1
    for k in range(2, n + 1):
        factorial *= k
    assert sum(s.orbit_size for s in summaries) == len(cells)
    for s in summaries:
        # rotations fixing the word are counted with the permutation they induce
        assert s.orbit_size * s.stabilizer.order == factorial
    reps = orbit_representatives(n)
    assert sorted(w for words in reps.values() for w in words) == sorted(s.representative.word for s in summaries)


def test_stabilizers_at_three_lobes():
    assert word_stabilizer((1, 2, 3)).order == 3
    assert word_stabilizer((1, 2, 1, 3)).order == 2
    cells = [cell for level in enumerate_cells(3, Shape.CYCLIC).values() for cell in level]
    orders = sorted((s.representative.dim, s.stabilizer.order) for s in orbits_and_stabilizers(cells, 3))
    assert orders == [(0, 3), (1, 2)]

"""
Tests for barycentric subdivision, orbit complexes and the full cacti quotient
"""

import pytest

from services.cactus_cells import Shape
from services.chain_algebra import (
    ChainComplex,
    Coefficients,
    cactus_chain_complex,
    homology,
    universal_coefficients_check,
)
from services.equivariant_quotient import (
    barycentric_subdivision,
    from_chain_complex,
    full_quotient_complex,
    full_quotient_homology,
    generic_full_quotient,
    quotient_complex,
    regularity_check,
    subdivide_until_regular,
)
from services.errors import ConsistencyError, InvalidInputError
from services.sparse_matrix import SparseMatrix

IDENTITY = ((0, 1), (0, 1))
ANTIPODAL = ((1, 0), (1, 0))
REFLECTION = ((0, 1), (1, 0))
FLIP = ((1, 0), (0, 1))


def two_gon():
    """Circle with vertices v0, v1 and edges v0 -> v1, v1 -> v0"""
    boundary = SparseMatrix(2, 2, [(0, 0, -1), (1, 0, 1), (0, 1, 1), (1, 1, -1)])
    return ChainComplex(dims=[2, 2], boundaries={1: boundary}, labels=[["v0", "v1"], ["e0", "e1"]])


def test_subdivision_preserves_homology():
    subdivided = barycentric_subdivision(two_gon(), check_homology=True)
    assert subdivided.dims == [4, 4]
    assert homology(subdivided.to_chain_complex()).betti_numbers == (1, 1)


def test_antipodal_quotient_is_a_circle():
    action = from_chain_complex(two_gon(), [IDENTITY, ANTIPODAL])
    quotient = quotient_complex(subdivide_until_regular(barycentric_subdivision(action)))
    assert quotient.dims == [2, 2]
    assert homology(quotient).betti_numbers == (1, 1)


def test_reflection_quotient_is_an_interval():
    action = from_chain_complex(two_gon(), [IDENTITY, REFLECTION])
    quotient = quotient_complex(barycentric_subdivision(action))
    assert quotient.dims == [3, 2]
    assert homology(quotient).is_point()


def test_quotient_of_cells_needs_subdivision():
    action = from_chain_complex(two_gon(), [IDENTITY, REFLECTION])
    assert regularity_check(action)
    with pytest.raises(InvalidInputError):
        quotient_complex(action)


def test_group_must_preserve_faces():
    # an edge v0 - v1 next to an isolated vertex v2
    edge = ChainComplex(dims=[3, 1], boundaries={1: SparseMatrix(3, 1, [(0, 0, -1), (1, 0, 1)])})
    with pytest.raises(InvalidInputError):
        from_chain_complex(edge, [((0, 2, 1), (0,))])


def test_irregular_incidences_are_rejected():
    projective_plane = ChainComplex(
        dims=[1, 1, 1], boundaries={1: SparseMatrix(1, 1), 2: SparseMatrix(1, 1, [(0, 0, 2)])}
    )
    with pytest.raises(InvalidInputError):
        from_chain_complex(projective_plane)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_full_quotient_is_contractible(n):
    result = full_quotient_homology(n)
    assert result.is_point()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fast_path_matches_generic_quotient(n):
    fast = full_quotient_complex(n)
    generic = generic_full_quotient(n)
    assert fast.dims == generic.dims
    assert homology(fast).degrees == homology(generic).degrees


@pytest.mark.parametrize("p", [2, 3])
def test_full_quotient_is_acyclic_mod_small_primes(p):
    for n in (p, p + 1):
        assert full_quotient_homology(n, Coefficients(p)).is_point()


@pytest.mark.slow
def test_full_quotient_at_six_mod_three():
    dims = list(full_quotient_homology(6, Coefficients(3)).betti_numbers)
    assert dims[:5] == [1, 0, 0, 1, 1]
    assert not any(dims[5:])


@pytest.mark.slow
def test_full_quotient_at_six_is_rationally_a_point_with_three_torsion():
    result = full_quotient_homology(6)
    assert result.betti_numbers[0] == 1
    assert not any(result.betti_numbers[1:])
    assert any(t % 3 == 0 for t in result.all_torsion())
    assert all(720 % t == 0 for t in result.all_torsion())


def test_flip_needs_one_subdivision():
    # swaps the two vertices and fixes both edges
    action = from_chain_complex(two_gon(), [IDENTITY, FLIP])
    assert not regularity_check(action)
    regular = subdivide_until_regular(action)
    assert regular.rounds == 1
    assert regularity_check(regular)
    assert homology(quotient_complex(regular)).is_point()


def test_flip_is_not_regular_without_subdivision_rounds():
    action = from_chain_complex(two_gon(), [IDENTITY, FLIP])
    with pytest.raises(ConsistencyError):
        subdivide_until_regular(action, max_rounds=0)


def test_subdivision_preserves_unbased_homology():
    subdivided = barycentric_subdivision(cactus_chain_complex(4, Shape.CYCLIC), check_homology=True)
    assert homology(subdivided.to_chain_complex()).betti_numbers == (1, 5, 6)


@pytest.mark.parametrize("n, p", [(3, 2), (3, 3), (4, 2), (4, 3), (5, 5), pytest.param(6, 3, marks=pytest.mark.slow)])
def test_universal_coefficients_on_full_quotients(n, p):
    integral = full_quotient_homology(n)
    assert universal_coefficients_check(integral, full_quotient_homology(n, Coefficients(p)))


def test_universal_coefficients_on_an_orbit_complex():
    action = from_chain_complex(two_gon(), [IDENTITY, ANTIPODAL])
    quotient = quotient_complex(subdivide_until_regular(barycentric_subdivision(action)))
    assert universal_coefficients_check(homology(quotient), homology(quotient, Coefficients(2)))

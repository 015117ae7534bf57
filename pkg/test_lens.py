"""
Tests for lens complexes and the manifold obstruction of P(n, n-1, ..., 2)
"""

import pytest

from services.chain_algebra import Coefficients, euler_characteristic, homology
from services.errors import InvalidInputError, ResourceLimitError
from services.weighted_projective_lens import (
    EMPTY,
    LensSpec,
    is_homology_sphere,
    join_boundary,
    join_dim,
    lens_chain_complex,
    lens_homology,
    manifold_obstruction,
    moduli_lens,
    sphere_chain_complex,
    subdivision_oracle,
    subdivision_size,
)


def groups(spec):
    return [(h.betti, list(h.torsion)) for h in lens_homology(spec).degrees]


def test_lens_parameters_are_validated():
    with pytest.raises(InvalidInputError):
        LensSpec(1, (1,))
    with pytest.raises(InvalidInputError):
        LensSpec(3, ())
    with pytest.raises(InvalidInputError):
        LensSpec(3, (0, 1))
    assert LensSpec(5, (4, 3, 2)).is_free
    assert not LensSpec(4, (3, 2)).is_free
    assert LensSpec(4, (3, 2)).label == "L(4;3,2)"


def test_join_cells():
    assert join_dim((0, EMPTY)) == 0
    assert join_dim((1, 1)) == 3
    assert join_dim((0, 2)) == 1
    # boundary of an arc on one circle
    assert join_boundary((1, EMPTY), 3) == [((0, EMPTY), -1), ((2, EMPTY), 1)]


@pytest.mark.parametrize("k", [1, 2])
def test_join_model_is_a_sphere(k):
    spec = LensSpec(3, tuple([1] * k))
    result = homology(sphere_chain_complex(spec))
    assert is_homology_sphere(result, 2 * k - 1)


@pytest.mark.parametrize("m, weights, expected", [
    (2, (1,), [(1, []), (1, [])]),
    (3, (1, 2), [(1, []), (0, [3]), (0, []), (1, [])]),
    (2, (1, 1), [(1, []), (0, [2]), (0, []), (1, [])]),
    (5, (4, 3, 2), [(1, []), (0, [5]), (0, []), (0, [5]), (0, []), (1, [])]),
])
def test_free_lens_spaces(m, weights, expected):
    assert groups(LensSpec(m, weights)) == expected


@pytest.mark.parametrize("m, weights", [(2, (1,)), (3, (1, 2)), (2, (1, 1)), (5, (4, 3, 2)), (7, (1, 2, 3))])
def test_free_lens_complexes_have_vanishing_euler_characteristic(m, weights):
    spec = LensSpec(m, weights)
    assert spec.is_free
    assert euler_characteristic(lens_chain_complex(spec)) == 0


def test_non_free_lens():
    assert groups(LensSpec(4, (3, 2))) == [(1, []), (0, [2]), (0, []), (1, [])]


def test_cell_counts_of_the_orbit_complex():
    # S^3 as a join of two circles cut into m arcs has 4m + 4m^2 cells, permuted freely
    complex_ = lens_chain_complex(LensSpec(3, (1, 2)))
    assert sum(complex_.dims) * 3 == 4 * 3 + 4 * 3 * 3


def test_moduli_lens_links():
    assert moduli_lens(3) == LensSpec(3, (2,))
    assert moduli_lens(5) == LensSpec(5, (4, 3, 2))
    with pytest.raises(InvalidInputError):
        moduli_lens(2)


def test_obstruction_at_three_vanishes():
    report = manifold_obstruction(3)
    assert report.homology_sphere
    assert report.is_manifold_point


def test_obstruction_at_four():
    report = manifold_obstruction(4)
    assert not report.homology_sphere
    assert report.local_homology[1] == (0, ())
    assert report.local_homology[2] == (0, (2,))
    assert report.local_homology[4] == (1, ())


@pytest.mark.slow
def test_obstruction_at_six_has_trivial_first_homology():
    report = manifold_obstruction(6)
    assert not report.homology_sphere
    assert report.reduced.betti(1) == 0
    assert report.reduced.torsion(1) == ()


def test_homology_sphere_test_needs_integers():
    field_result = homology(lens_chain_complex(LensSpec(3, (1,))), Coefficients(3))
    with pytest.raises(InvalidInputError):
        is_homology_sphere(field_result, 1)


def test_subdivision_oracle_on_a_free_lens():
    spec = LensSpec(3, (1, 2))
    assert subdivision_oracle(spec).degrees == lens_homology(spec).degrees


def test_subdivision_oracle_on_the_moduli_link():
    spec = moduli_lens(4)
    assert subdivision_oracle(spec).degrees == lens_homology(spec).degrees


@pytest.mark.slow
def test_subdivision_oracle_at_five():
    spec = moduli_lens(5)
    assert subdivision_oracle(spec).degrees == lens_homology(spec).degrees


def test_subdivision_sizes():
    assert subdivision_size(moduli_lens(4)) == 16 * 24
    assert subdivision_size(moduli_lens(5)) == 125 * 720
    assert subdivision_size(moduli_lens(6)) == 1296 * 40320


def test_oracle_refuses_subdivisions_above_the_limit(monkeypatch):
    with pytest.raises(ResourceLimitError):
        subdivision_oracle(moduli_lens(6))
    monkeypatch.setenv("WORKBENCH_ORACLE_LIMIT", "100")
    with pytest.raises(ResourceLimitError, match="WORKBENCH_ORACLE_LIMIT=100"):
        subdivision_oracle(LensSpec(3, (1, 2)))

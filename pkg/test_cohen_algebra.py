"""
Tests for the mod-p homology of configuration spaces and the Delta operator
"""

import pytest

from services import cohen_algebra
from services.cohen_algebra import GeneratorKind
from services.errors import HypothesisError, InvalidInputError, UnsupportedError


def names(n, p):
    return [m.name for m in cohen_algebra.basis(n, p)]


def test_bases():
    assert names(5, 3) == ["a^5", "a^3[a,a]"]
    assert names(2, 2) == ["a^2", "Q^1(a)"]
    assert names(0, 3) == ["1"]
    assert names(1, 5) == ["a"]


def test_basis_by_degree():
    assert [m.name for m in cohen_algebra.basis(6, 3, 4)] == ["βQ^1[a,a]"]
    assert [m.name for m in cohen_algebra.basis(6, 3, 5)] == ["Q^1[a,a]"]


def test_odd_generators_appear_at_most_once():
    for m in cohen_algebra.basis(9, 3):
        for g, e in m.factors:
            if g.is_odd:
                assert e == 1


def test_generators_have_expected_degrees():
    by_name = {g.name: (g.weight, g.degree) for g in cohen_algebra.generators(8, 2)}
    assert by_name == {"a": (1, 0), "Q^1(a)": (2, 1), "Q^2(a)": (4, 3), "Q^3(a)": (8, 7)}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_generating_function_counts_match_bases(p):
    series = cohen_algebra.generating_function_counts(10, p)
    for n in range(11):
        dims = cohen_algebra.fiber_dims(n, p)
        for d, count in enumerate(dims):
            assert series.get((n, d), 0) == count


def test_fiber_dims():
    assert cohen_algebra.fiber_dims(6, 3) == (1, 1, 0, 0, 1, 1)
    assert cohen_algebra.fiber_dims(5, 2) == (1, 1, 1, 1)


def test_delta_on_powers_of_a():
    a5 = cohen_algebra.basis(5, 3, 0)[0]
    term = cohen_algebra.delta(a5, 3)
    assert term.raw_coefficient == 20
    assert term.coefficient == 2
    assert term.target.name == "a^3[a,a]"

    bracket = cohen_algebra.basis(5, 3, 1)[0]
    assert cohen_algebra.delta(bracket, 3).coefficient == 0

    a3 = cohen_algebra.basis(3, 3, 0)[0]
    assert cohen_algebra.delta(a3, 3).coefficient == 0


def test_delta_passes_through_operation_letters():
    kinds = cohen_algebra.GeneratorKind
    source = next(
        m for m in cohen_algebra.basis(8, 3, 4)
        if m.exponent(kinds.POINT) == 2 and m.exponent(kinds.BOCKSTEIN_POWER) == 1
    )
    term = cohen_algebra.delta(source, 3)
    assert term.raw_coefficient == 2
    assert term.target.exponent(kinds.POINT) == 0
    assert term.target.exponent(kinds.BRACKET) == 1
    assert term.target.exponent(kinds.BOCKSTEIN_POWER) == 1

    power = next(
        m for m in cohen_algebra.basis(8, 3)
        if m.exponent(kinds.POINT) == 2 and m.exponent(kinds.POWER) == 1
    )
    assert cohen_algebra.delta(power, 3).coefficient == 2


def test_delta_refuses_p_two():
    with pytest.raises(UnsupportedError):
        cohen_algebra.delta(cohen_algebra.basis(2, 2)[0], 2)


@pytest.mark.parametrize("n, p, expected", [
    (5, 3, {0: 1, 1: 0}),
    (2, 5, {0: 1, 1: 0}),
    (3, 5, {0: 1, 1: 0}),
    (2, 3, {0: 1, 1: 0}),
])
def test_cokernel_of_delta(n, p, expected):
    assert cohen_algebra.coker_delta_dims(n, p) == expected


def test_cokernel_needs_fixed_point_free_action():
    with pytest.raises(HypothesisError):
        cohen_algebra.coker_delta_dims(6, 3)
    with pytest.raises(HypothesisError):
        cohen_algebra.coker_delta_dims(4, 3)
    # the raw computation has no hypothesis
    assert cohen_algebra.delta_cokernel(4, 3)[0] == 1


def test_equivariant_series_branches():
    tensor = cohen_algebra.equivariant_series(5, 2, 6)
    assert tensor.branch == "tensor"
    assert tensor.dims == (1, 1, 2, 2, 2, 2, 2)

    cokernel = cohen_algebra.equivariant_series(5, 3, 4)
    assert cokernel.branch == "cokernel"
    assert cokernel.dims == (1, 0, 0, 0, 0)


def test_fixed_points():
    assert cohen_algebra.fixed_points(6, 3).q == 2
    assert cohen_algebra.fixed_points(5, 2).q == 2
    assert cohen_algebra.fixed_points(7, 3).q == 2
    assert cohen_algebra.fixed_points(5, 3).empty


def test_punctured_plane_homology():
    assert cohen_algebra.cstar_homology(2, 2) == (1, 2, 1)
    assert cohen_algebra.cstar_homology(2, 3) == (1, 2, 1)
    assert cohen_algebra.cstar_homology(1, 5) == (1, 1)
    assert cohen_algebra.cstar_homology(0, 3) == (1,)
    classes = dict(cohen_algebra.cstar_classes(2, 3))
    assert classes["[b,a]·a"] == 1
    assert classes["[[b,a],a]"] == 2


@pytest.mark.parametrize("bad", [1, 4, 9])
def test_non_primes_are_rejected(bad):
    with pytest.raises(InvalidInputError):
        cohen_algebra.basis(3, bad)


def test_exponent_by_kind():
    m = cohen_algebra.basis(5, 3, 1)[0]
    assert m.exponent(GeneratorKind.POINT) == 3
    assert m.exponent(GeneratorKind.BRACKET) == 1
    assert m.to_dict() == {"monomial": "a^3[a,a]", "degree": 1, "weight": 5}

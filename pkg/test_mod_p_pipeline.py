"""
Tests for E2 grids, the Mayer-Vietoris feasibility audit and the mod-p checks
"""

import pytest

from services import cohen_algebra, mod_p_pipeline
from services.chain_algebra import INTEGERS, Coefficients, HomologyDegree, HomologyResult
from services.errors import HypothesisError, InvalidInputError, UnsupportedError


def result(coefficients, betti, torsion=None):
    torsion = torsion or {}
    return HomologyResult(
        coefficients,
        tuple(HomologyDegree(d, b, tuple(torsion.get(d, ()))) for d, b in enumerate(betti)),
    )


def test_e2_grid_layout():
    grid = mod_p_pipeline.e2_grid(5, 2)
    assert grid.rows == (1, 1, 1, 1)
    assert grid.entry(0, 3) == 1
    assert grid.entry(1, 0) == 0
    assert grid.entry(2, 4) == 0
    table = grid.as_table()
    assert len(table) == 4
    assert table[-1][:4] == [1, 0, 1, 0]


@pytest.mark.parametrize("n, p", [
    (n, p) for p in (2, 3, 5) for n in range(2, 8) if p == 2 or n % p in (0, 1)
])
def test_e2_diagonals_match_equivariant_series_in_tensor_branch(n, p):
    grid = mod_p_pipeline.e2_grid(n, p)
    series = cohen_algebra.equivariant_series(n, p, grid.columns - 1)
    assert series.branch == "tensor"
    assert grid.diagonal_sums() == series.dims


def test_fixed_point_grid():
    assert mod_p_pipeline.e2_grid(6, 3, mod_p_pipeline.FIXED_POINTS).rows == (1, 2, 1)
    with pytest.raises(InvalidInputError):
        mod_p_pipeline.e2_grid(5, 3, mod_p_pipeline.FIXED_POINTS)
    with pytest.raises(InvalidInputError):
        mod_p_pipeline.e2_grid(5, 3, "elsewhere")


def test_fixed_point_quotients():
    assert mod_p_pipeline.fixed_point_quotient_dims(1) == (1,)
    assert mod_p_pipeline.fixed_point_quotient_dims(2) == (1, 1)
    with pytest.raises(UnsupportedError):
        mod_p_pipeline.fixed_point_quotient_dims(3)


@pytest.mark.parametrize("n, p", [
    (n, p) for p in (2, 3, 5) for n in range(2, 8) if n % p in (0, 1)
])
def test_monomorphism_inequality(n, p):
    assert mod_p_pipeline.monomorphism_rank_check(n, p)


def test_monomorphism_needs_fixed_points():
    with pytest.raises(HypothesisError):
        mod_p_pipeline.monomorphism_rank_check(5, 3)


def test_mayer_vietoris_at_six_mod_three():
    report = mod_p_pipeline.mayer_vietoris_audit(6, 3, result(Coefficients(3), [1, 0, 0, 1, 1]))
    assert report.passed, report.failures
    assert report.details["q"] == 2
    assert report.details["pinned"][3] == 1
    assert report.details["pinned"][4] == 1
    assert report.details["pinned"][5] == 0


def test_mayer_vietoris_rejects_wrong_cellular_input():
    report = mod_p_pipeline.mayer_vietoris_audit(6, 3, result(Coefficients(3), [1, 0, 0, 0, 0]))
    assert not report.passed
    assert report.failures


def test_mayer_vietoris_with_a_single_fixed_point():
    report = mod_p_pipeline.mayer_vietoris_audit(4, 3, result(Coefficients(3), [1]))
    assert report.passed, report.failures
    assert report.details["q"] == 1


def test_mayer_vietoris_at_p_equals_n():
    report = mod_p_pipeline.mayer_vietoris_audit(5, 5, result(Coefficients(5), [1]))
    assert report.passed, report.failures


def test_mayer_vietoris_argument_checks():
    with pytest.raises(InvalidInputError):
        mod_p_pipeline.mayer_vietoris_audit(6, 3, result(INTEGERS, [1]))
    with pytest.raises(HypothesisError):
        mod_p_pipeline.mayer_vietoris_audit(5, 3, result(Coefficients(3), [1]))


@pytest.mark.parametrize("p", [2, 3])
def test_acyclicity(p):
    report = mod_p_pipeline.acyclicity_check(p)
    assert report.passed, report.failures


@pytest.mark.slow
def test_acyclicity_at_five():
    assert mod_p_pipeline.acyclicity_check(5).passed


@pytest.mark.parametrize("n, p", [(2, 3), (3, 5), (2, 5), (4, 5)])
def test_strict_quotient_equals_homotopy_quotient(n, p):
    report = mod_p_pipeline.strict_equals_homotopy_audit(n, p)
    assert report.passed, report.failures
    assert report.details["branch"] == "cokernel"


def test_strict_comparison_refuses_fixed_points():
    with pytest.raises(HypothesisError):
        mod_p_pipeline.strict_equals_homotopy_audit(4, 3)


def test_integral_checks():
    point = result(INTEGERS, [1])
    assert mod_p_pipeline.torsion_bound_check(3, point)
    assert mod_p_pipeline.loop_relation_check(3, point)
    assert not mod_p_pipeline.torsion_bound_check(3, result(INTEGERS, [1, 0], {1: (7,)}))
    assert not mod_p_pipeline.loop_relation_check(3, result(INTEGERS, [1, 0], {1: (2,)}))
    with pytest.raises(InvalidInputError):
        mod_p_pipeline.torsion_bound_check(3, result(Coefficients(2), [1]))

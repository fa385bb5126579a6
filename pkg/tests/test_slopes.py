from tropbn.slopes import (
    DivisorClass, GeometricInputs, TestCurveNumbers, GENERAL_TYPE_SLOPE,
    canonical_class_coefficients, closed_form_rho1, compare_stage,
    slope_conjecture_bound, slope_report, solve_from_test_curves,
    test_curve_degeneracy as run_degeneracy,
    virtual_class_g23, virtual_class_rho1,
)
from tropbn.chowring import ChowExpr, chern_number_general, parse_expr
from tropbn.errors import ParameterError, PipelineError

from fractions import Fraction
import functools
import pytest

eta, theta = ChowExpr.eta(), ChowExpr.theta()

@functools.cache
def g23() -> DivisorClass:
    return virtual_class_g23(check=True)

def test_virtual_class_g23():
    dc = g23()
    assert dc == DivisorClass(Fraction(15813400408), Fraction(2442978200), Fraction(13502337992))
    assert dc.elliptic_tail_defect() == 0
    assert 44 * dc.b0 - dc.b1 == 93988702808
    assert dc.to_dict() == {"a": "15813400408", "b0": "2442978200", "b1": "13502337992"}

def test_g23_report():
    report = slope_report(g23(), 23)
    assert report.slope == Fraction(470749, 72725)
    assert report.general_type
    assert report.bound == Fraction(13, 2)
    assert report.below_bound
    data = report.to_dict()
    assert data["slope"] == "470749/72725"
    assert data["approx"] == "6.473001"

def test_g23_unchecked_agrees():
    assert virtual_class_g23(check=False) == g23()

def test_rho1_small():
    dc = virtual_class_rho1(2)
    report = slope_report(dc, 11)
    assert report.slope == 7
    assert report.on_bound
    assert not report.below_bound
    assert not report.general_type

def test_rho1_s3():
    expected = DivisorClass(Fraction(862692948), Fraction(132822768), Fraction(731180268))
    assert closed_form_rho1(3) == expected
    assert virtual_class_rho1(3) == expected

@pytest.mark.parametrize("s", [2, 3, 4])
def test_closed_form_matches_pipeline(s):
    closed = closed_form_rho1(s)
    assert virtual_class_rho1(s, check=False) == closed
    assert closed.elliptic_tail_defect() == 0

def test_rho1_rejects():
    with pytest.raises(ParameterError):
        virtual_class_rho1(1)
    with pytest.raises(ParameterError):
        closed_form_rho1(0)

def test_solve_from_test_curves():
    dc = DivisorClass(Fraction(10), Fraction(1), Fraction(2))
    numbers = TestCurveNumbers(5)
    assert numbers.intersect("F_ell", dc) == 0
    f1, f0 = numbers.intersect("F1", dc), numbers.intersect("F0", dc)
    assert (f1, f0) == (12, 6)
    assert solve_from_test_curves(f1, f0, 5) == dc

def test_canonical_class():
    assert canonical_class_coefficients(3) == (13, -2, -3)
    assert canonical_class_coefficients(5) == (13, -2, -3, -2)
    assert canonical_class_coefficients(23) == (13, -2, -3) + (-2,) * 10
    with pytest.raises(ParameterError):
        canonical_class_coefficients(2)

def test_slope_bounds():
    assert slope_conjecture_bound(11) == 7
    assert GENERAL_TYPE_SLOPE == Fraction(13, 2)
    with pytest.raises(ParameterError):
        slope_report(DivisorClass(Fraction(1), Fraction(0), Fraction(0)), 23)

def test_compare_stage_reports_terms():
    compare_stage("same", eta + theta, parse_expr("theta + eta"))
    with pytest.raises(PipelineError) as info:
        compare_stage("F1/locus", eta + theta, 2 * eta + theta)
    assert "F1/locus" in str(info.value)
    assert info.value.terms == ("eta computed 1 recorded 2",)

def test_recorded_stage_mismatch_raises():
    inputs = GeometricInputs.make("F0", 10, 4, 13, 2, lambda e: chern_number_general(2, e))
    stages = run_degeneracy(inputs)
    with pytest.raises(PipelineError):
        run_degeneracy(inputs, {"locus": stages.locus + theta})
    with pytest.raises(ParameterError):
        GeometricInputs.make("F2", 10, 4, 13, 2, lambda e: Fraction(0))

@pytest.mark.parametrize("s", [3, 4, 5, 6])
def test_rho1_below_bound(s):
    g = 2 * s * s + s + 1
    report = slope_report(closed_form_rho1(s), g)
    assert report.below_bound
    assert report.slope > 6

def test_rho1_s3_ratio():
    dc = closed_form_rho1(3)
    # Proportional to (17121, 2636, 14511)
    assert (dc.a / 17121, dc.b0 / 2636, dc.b1 / 14511) == (50388, 50388, 50388)

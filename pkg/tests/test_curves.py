import pytest

from qweyl import StructuralError
from qweyl.coeffring import Coefficient
from qweyl.curves import (
    CURVE_BUILDERS,
    E8_KAPPA_H1,
    CurveSpec,
    PolyBuilder,
    build_explicit_curve,
    hinv_ratio,
    verify_classical_curve,
    verify_constraint_reduction,
    verify_curve_conditions,
    verify_curve_invariance,
    verify_curve_space,
    verify_hinv,
    verify_lambda_fixed,
)
from qweyl.fpoly import check_conditions
from qweyl.lattice import dimension_count
from qweyl.utils.sampler import SpecializationSampler


@pytest.fixture
def curve(group):
    return CurveSpec.from_group(group)


def test_class_fixed(curve):
    assert verify_lambda_fixed(curve)["passed"]


def test_curve_conditions(curve):
    report = verify_curve_conditions(curve)
    assert report["passed"], report["witness"]


def test_curve_normalized(curve):
    P = build_explicit_curve(curve)
    assert P.coefficient(0, 0) == Coefficient.constant(curve.group.table)
    fi, fj = curve.free_monomial
    assert curve.constant in str(P.coefficient(fi, fj))


def test_curve_invariance(curve):
    report = verify_curve_invariance(curve)
    assert report["passed"], report
    assert report["checked"] == list(range(curve.group.rank))


def test_curve_space(curve):
    report = verify_curve_space(curve, SpecializationSampler(0), count=2)
    assert report["passed"], report
    assert report["constrained_dimension"] == dimension_count(curve.lam) + 1


def test_classical_and_reduction(curve):
    assert verify_classical_curve(curve)["passed"]
    assert verify_constraint_reduction(curve)["passed"]


def test_e8_class(e8):
    curve = CurveSpec.from_group(e8)
    assert dimension_count(curve.lam) == 1
    assert curve.eliminate == "e1"
    assert curve.lowered.m[0] == 0


def test_elimination(e8):
    """e1 is traded for h1^6 h2^3 / (e2..e6 e7^2 e8^2 e9^2 e10^3 e11^3)."""
    curve = CurveSpec.from_group(e8)
    t = PolyBuilder(e8.table)
    image = t.m(h1=6, h2=3, e2=-1, e3=-1, e4=-1, e5=-1, e6=-1, e7=-2, e8=-2, e9=-2, e10=-3, e11=-3)
    assert curve.reduce(t.e(1)) == image
    constraint = Coefficient.monomial(e8.table, curve.constraint(e8.table))
    assert curve.reduce(constraint) == t.m()


def test_bad_elimination(e8):
    with pytest.raises(StructuralError):
        CurveSpec.from_group(e8, eliminate="e7")


@pytest.mark.parametrize("i", [0, 3])
def test_hinv(e8, i):
    curve = CurveSpec.from_group(e8)
    num, den = hinv_ratio(curve, i)
    assert len(num) == len(den) > 0
    report = verify_hinv(curve, i)
    assert report["passed"], report


def test_hinv_swap(e8):
    with pytest.raises(StructuralError):
        hinv_ratio(CurveSpec.from_group(e8), 1)


@pytest.mark.parametrize("h1_power", [-2, -4])
def test_e8_kappa_normalization(e8, h1_power):
    """Only h1^-3 in κ makes the E8 curve meet its boundary conditions."""
    curve = CurveSpec.from_group(e8)
    P = CURVE_BUILDERS["E8"](PolyBuilder(e8.table), curve.constant, kappa_h1=h1_power)
    P = curve.reduce_element(P)
    assert E8_KAPPA_H1 == -3
    assert not check_conditions(e8, curve.lam, P, reduce=curve.reduce)["passed"]

from fractions import Fraction

from qweyl.curves import PolyBuilder
from qweyl.skew_algebra import SkewElement
from qweyl.utils.sampler import SpecializationSampler
from qweyl.worked import (
    E8_EXAMPLES,
    evaluate_normal_order,
    ex1_polynomial,
    verify_example,
    verify_two_parameter_image,
    verify_worked_examples,
)


def test_worked_examples(e8):
    report = verify_worked_examples(e8)
    assert report["passed"], report["witness"]
    assert set(report["checks"]) == {"ex1", "ex2", "two-parameter s3"}


def test_each_example(e8):
    for ex in E8_EXAMPLES:
        assert all(w is None for w in verify_example(e8, ex, seed=1, trials=2).values()), ex.label


def test_two_parameter_image(e8):
    assert all(w is None for w in verify_two_parameter_image(e8).values())


def test_ex1_y_slice(e8):
    """The y¹ coefficient of ex1 is e11(1 + (e7/h1) x)(1 + (e9/h1) x)."""
    table = e8.table
    t = PolyBuilder(table)
    expected = SkewElement.from_coefficient(t.e(11)) * t.factors([t.m(e7=1, h1=-1), t.m(e9=1, h1=-1)])
    assert ex1_polynomial(table).slices("y")[1] == expected


def test_normal_order_evaluation(e8):
    sampler = SpecializationSampler(5)
    names = ["q", "h1", "h2"] + [f"e{i}" for i in range(1, 12)]
    v = sampler.draw(names)
    x, y = Fraction(2, 3), Fraction(-1, 5)
    ex = E8_EXAMPLES[0]
    assert evaluate_normal_order(ex.printed(e8.table), v, x, y) == ex.direct(v, x, y)

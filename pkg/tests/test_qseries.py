from fractions import Fraction

from qweyl.coeffring import Coefficient
from qweyl.qseries import (
    TruncatedSeries,
    dilog_sides,
    q_factorial_check,
    q_factorial_series,
    q_pochhammer,
    scratch_table,
    verify_braid_product,
    verify_dilog_identity,
    verify_heine_chain,
    verify_q_binomial,
)
from qweyl.skew_algebra import SkewElement


def test_q_binomial():
    report = verify_q_binomial(order=6, trials=2)
    assert report["passed"], report


def test_dilog_identity():
    report = verify_dilog_identity(order=5, trials=2)
    assert report["passed"], report


def test_dilog_pinned_values():
    report = verify_dilog_identity(order=4, trials=1, values=[(Fraction(2, 3), Fraction(5, 7), Fraction(3, 2))])
    assert report["passed"] and report["trials"] == 1


def test_dilog_sides_nontrivial():
    """Each side alone is a nontrivial series."""
    table = scratch_table(Fraction(3, 2))
    lhs, _ = dilog_sides(table, Fraction(2), Fraction(5), 3)
    assert lhs.difference(TruncatedSeries.one(table, 3)) is not None


def test_heine_chain():
    report = verify_heine_chain(order=5, trials=2)
    assert report["passed"], report


def test_braid_product(e8):
    report = verify_braid_product(e8, 0, 3, order=4, trials=1)
    assert report["passed"], report


def test_q_factorial_inverse():
    assert q_factorial_check(order=4) == {"symbolic": None, "numeric": None}


def test_pochhammer():
    """(z)+_2 = 1 + (1 + q) z + q z²."""
    table = scratch_table(Fraction(2))
    z = Coefficient.constant(table)
    p = q_pochhammer(table, z, "x", 2)
    expected = SkewElement.one(table) + SkewElement.x(table).scale(3) + SkewElement.x(table, 2).scale(2)
    assert p == expected


def test_factorial_series_truncation():
    table = scratch_table(Fraction(2))
    s = q_factorial_series(table, Coefficient.constant(table), "y", 3)
    assert s.element.degree("y") == 3
    assert s.truncate(2).element.degree("y") == 2

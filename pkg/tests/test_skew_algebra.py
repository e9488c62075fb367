from fractions import Fraction

import pytest

from qweyl import NotDivisible, StructuralError
from qweyl.coeffring import Coefficient, SymbolTable
from qweyl.skew_algebra import (
    LinearFactor,
    SkewElement,
    classical_limit,
    divide_univariate,
    left_divide_exact,
    product_of,
    right_divide_exact,
    tau_element,
)


@pytest.fixture
def table():
    return SymbolTable(11)


def c(table, value=1, **exps):
    return Coefficient.monomial(table, table.mono(**exps), value)


def random_element(table, rng, terms=4):
    params = ["h1", "h2", "e1", "e7", "e10"]
    out = SkewElement.zero(table)
    for _ in range(terms):
        coeff = c(table, rng.randint(-3, 3) or 1, **{rng.choice(params): rng.randint(-1, 1)})
        tau = table.mono(**{rng.choice(["t1", "t7", "s1"]): rng.randint(-1, 1)})
        out = out + SkewElement.monomial(table, coeff, tau, rng.randint(0, 2), rng.randint(0, 2))
    return out


def test_commutation(table):
    x, y = SkewElement.x(table), SkewElement.y(table)
    assert y * x == SkewElement.monomial(table, Coefficient.q_power(table, 1), i=1, j=1)
    assert x * y == SkewElement.monomial(table, i=1, j=1)


def test_tau_twist(table):
    """τ1·e1 = q⁻¹·e1·τ1 while τ1 commutes with x, y and the other parameters."""
    t1 = tau_element(table, table.mono(t1=1))
    e1 = SkewElement.from_coefficient(c(table, e1=1))
    assert t1 * e1 == SkewElement.monomial(table, c(table, q=-1, e1=1), table.mono(t1=1))
    assert t1 * SkewElement.x(table) == SkewElement.x(table) * t1
    h1 = SkewElement.from_coefficient(c(table, h1=1))
    assert t1 * h1 == h1 * t1
    s1 = tau_element(table, table.mono(s1=1))
    h2 = SkewElement.from_coefficient(c(table, h2=1))
    assert s1 * h2 == SkewElement.monomial(table, c(table, q=1, h2=1), table.mono(s1=1))


def test_associativity(table, rng):
    for _ in range(10):
        a, b, d = (random_element(table, rng) for _ in range(3))
        assert (a * b) * d == a * (b * d)


def test_distributivity(table, rng):
    for _ in range(5):
        a, b, d = (random_element(table, rng) for _ in range(3))
        assert a * (b + d) == a * b + a * d


def test_mismatched_tables(table):
    with pytest.raises(StructuralError):
        SkewElement.x(table) + SkewElement.x(SymbolTable(10))


def test_classical_limit(table):
    x, y = SkewElement.x(table), SkewElement.y(table)
    classical = classical_limit(y * x)
    assert classical == SkewElement.monomial(table.classical(), i=1, j=1)
    assert classical_limit(x * y - y * x) == SkewElement.zero(table.classical())


def test_slices_and_degree(table):
    F = SkewElement.x(table, 2) * SkewElement.y(table) + SkewElement.y(table, 3) + SkewElement.one(table)
    assert F.degree("x") == 2 and F.degree("y") == 3
    assert sorted(F.slices("x")) == [0, 2]
    assert SkewElement.from_slices(table, "x", F.slices("x")) == F


def test_divide_univariate(table):
    """(1 + a z)(1 + b z) / (1 + a z) = 1 + b z; a single term is never divisible."""
    a, b = c(table, e1=1), c(table, e7=1)
    one = Coefficient.constant(table)
    coeffs = {0: one, 1: a + b, 2: a * b}
    assert divide_univariate(coeffs, a) == {0: one, 1: b}
    with pytest.raises(NotDivisible):
        divide_univariate({0: one, 1: b}, a)
    with pytest.raises(NotDivisible):
        divide_univariate({1: one}, a)


def test_left_right_division(table):
    f = LinearFactor.of("y", c(table, h2=1, e10=-1))
    g = LinearFactor.of("x", c(table, e11=1))
    Q = SkewElement.x(table) + SkewElement.monomial(table, c(table, e1=-1), i=1, j=1) + SkewElement.one(table)
    assert right_divide_exact(Q * f.element(), f) == Q
    assert left_divide_exact(f.element() * Q, f) == Q
    assert right_divide_exact(Q * g.element(), g) == Q
    assert left_divide_exact(g.element() * Q, g) == Q


def test_linear_factor_shift(table):
    f = LinearFactor.of("x", c(table, e1=-1))
    assert f.shifted(2).scale == c(table, q=2, e1=-1)
    assert f.shifted(0) is f
    assert product_of(table, [f, f.shifted(1)]) == f.element() * f.shifted(1).element()
    assert f.root({"e1": Fraction(3)}) == -3


def test_evaluate(table):
    F = SkewElement.one(table) + SkewElement.monomial(table, c(table, e11=1), j=1)
    assert F.evaluate("y", Fraction(2), {"e11": Fraction(5)}) == 11


def test_json(table, rng):
    F = random_element(table, rng)
    assert SkewElement.from_json(table, F.to_json()) == F

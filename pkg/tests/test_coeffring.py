from fractions import Fraction

import pytest

from qweyl import SpecializationError, StructuralError
from qweyl.coeffring import Coefficient, SymbolTable, exp_add


@pytest.fixture
def table():
    return SymbolTable(11)


def mono(table, **exps):
    return Coefficient.monomial(table, table.mono(**exps))


def test_symbol_order(table):
    """Parameters come first, then tau symbols, then x and y."""
    names = table.names
    assert names[0] == "q"
    assert names.index("e11") < table.tau_start == names.index("s1")
    assert table.x_id == len(names) - 2 and table.y_id == len(names) - 1


def test_pairing_signs(table):
    assert table.pairing(table.mono(t1=1), table.mono(e1=1)) == -1
    assert table.pairing(table.mono(s1=1), table.mono(h2=1)) == 1
    assert table.pairing(table.mono(s2=1), table.mono(h1=1)) == 1
    assert table.pairing(table.mono(s1=1), table.mono(h1=1)) == 0
    assert table.pairing(table.mono(t1=1), table.mono(e2=1)) == 0


def test_pairing_is_bilinear(table, rng):
    taus = ["s1", "s2"] + [f"t{i}" for i in range(1, 12)]
    params = ["h1", "h2"] + [f"e{i}" for i in range(1, 12)]
    for _ in range(20):
        a = table.mono(**{n: rng.randint(-2, 2) for n in rng.sample(taus, 3)})
        b = table.mono(**{n: rng.randint(-2, 2) for n in rng.sample(taus, 3)})
        mu = table.mono(**{n: rng.randint(-2, 2) for n in rng.sample(params, 4)})
        assert table.pairing(exp_add(a, b), mu) == table.pairing(a, mu) + table.pairing(b, mu)


def test_classical_table_has_no_twist(table):
    classical = table.classical()
    assert classical.pairing(classical.mono(t1=1), classical.mono(e1=1)) == 0
    assert classical.twist(classical.mono(y=1), classical.mono(x=1)) == 0
    assert table.twist(table.mono(y=1), table.mono(x=1)) == 1


def test_arithmetic(table):
    one = Coefficient.constant(table)
    e1 = mono(table, e1=1)
    assert (one + e1) * (one - e1) == one - e1 * e1
    assert e1 * mono(table, e1=-1) == one
    assert (e1 - e1).terms == {}
    assert 3 * e1 == e1.scale(3)


def test_mismatched_tables_raise(table):
    with pytest.raises(StructuralError):
        Coefficient.constant(table) + Coefficient.constant(SymbolTable(10))


def test_unknown_symbol(table):
    with pytest.raises(StructuralError):
        table.sid("e12")


def test_specialize(table):
    c = mono(table, h1=2, e7=-1) + Coefficient.q_power(table, -1)
    value = c.specialize({"q": 2, "h1": 3, "e7": 5})
    assert value == Fraction(9, 5) + Fraction(1, 2)
    with pytest.raises(SpecializationError):
        c.specialize({"q": 2, "h1": 3})
    with pytest.raises(SpecializationError):
        c.specialize({"q": 2, "h1": 3, "e7": 0})


def test_partial_specialize(table):
    c = mono(table, h1=1, e7=-1)
    assert c.partial_specialize({"h1": 4}) == mono(table, e7=-1).scale(4)


def test_classical_drops_q(table):
    c = Coefficient.q_power(table, 3) * mono(table, h2=1) + mono(table, h2=1)
    classical = c.classical()
    assert classical.table == table.classical()
    assert classical == Coefficient.monomial(classical.table, classical.mono(h2=1), 2)


def test_numeric_q(table):
    numeric = table.with_q(Fraction(3, 2))
    assert Coefficient.q_power(numeric, 2) == Coefficient.constant(numeric, Fraction(9, 4))
    c = Coefficient.monomial(numeric, numeric.mono(e1=1))
    assert c.twisted(numeric.mono(t1=1)) == c.scale(Fraction(2, 3))


def test_twisted(table):
    """τ1·e1·τ1⁻¹ = q⁻¹·e1 and the inverse conjugation undoes it."""
    e1 = mono(table, e1=1)
    t1 = table.mono(t1=1)
    assert e1.twisted(t1) == e1.times_q(-1)
    assert e1.twisted(t1).twisted(t1, sign=-1) == e1


def test_json(table):
    c = mono(table, h1=1, e7=-1).scale(Fraction(-2, 3)) + Coefficient.q_power(table, 2)
    assert Coefficient.from_json(table, c.to_json()) == c

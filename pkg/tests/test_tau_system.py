from fractions import Fraction

import pytest

from qweyl import StructuralError
from qweyl.coeffring import Coefficient
from qweyl.lattice import LatticeVector
from qweyl.skew_algebra import SkewElement
from qweyl.tau_system import (
    BilinearRelation,
    BilinearTerm,
    TauTable,
    evaluate_tau,
    hirota_miwa_checks,
    klass,
    random_words,
    require_e8,
    seed_relations,
    seed_table,
    tau_report,
    transport_batch,
    verify_ex_bilinear,
    verify_path_consistency,
    verify_relation,
    verify_seed_fitting,
    verify_seed_relations,
)


@pytest.fixture(scope="module")
def taus(e8):
    return TauTable(e8)


def test_klass():
    assert klass(11, e={7: 1}) == LatticeVector.E(7, 11)
    assert klass(11, h1=1, e={10: -1}) == LatticeVector(1, 0, (0,) * 9 + (1, 0))


def test_seed_table(e8):
    seeds = seed_table(e8)
    assert len(seeds) == e8.n_points + 4
    y_seed = seeds[klass(11, h2=1, e={1: -1})]
    assert y_seed.F == SkewElement.y(e8.table) and y_seed.normalization == "y"


def test_seed_value(e8, taus):
    table = e8.table
    tau = taus.evaluate(klass(11, e={7: 1}))
    assert tau.word == () and tau.value == SkewElement.monomial(table, tau=table.mono(t7=1))


def test_reached_value(e8, taus):
    """τ(h2/e10) = (1 + q⁻¹(h2/e10) y)·σ2/τ10, reached from τ11 by s0."""
    table = e8.table
    tau = taus.evaluate(klass(11, h2=1, e={10: -1}))
    scale = Coefficient.monomial(table, table.mono(q=-1, h2=1, e10=-1))
    F = SkewElement.one(table) + SkewElement.monomial(table, scale, j=1)
    assert tau.section.F == F


def test_explicit_word(e8, taus):
    lam = klass(11, h2=1, e={10: -1})
    assert taus.evaluate(lam, (0,)).lam == lam
    with pytest.raises(StructuralError):
        taus.evaluate(lam, (3,))
    assert evaluate_tau(e8, lam, (0,)).value == taus.evaluate(lam).value


def test_unreachable(e8):
    with pytest.raises(StructuralError):
        TauTable(e8, max_len=1).evaluate(LatticeVector(5, 5, (0,) * 11))


def test_e8_only(e7):
    with pytest.raises(StructuralError):
        require_e8(e7)
    with pytest.raises(StructuralError):
        seed_relations(e7)


def test_seed_relation_count(e8):
    relations = seed_relations(e8)
    assert len(relations) == 52
    assert len({r.label for r in relations}) == 52


def test_mixed_classes_rejected(e8):
    one = Coefficient.constant(e8.table)
    e1, e2 = klass(11, e={1: 1}), klass(11, e={2: 1})
    with pytest.raises(AssertionError):
        BilinearRelation((BilinearTerm(one, e1, e1),), (BilinearTerm(one, e1, e2),))


def test_seed_relations(e8, taus):
    report = verify_seed_relations(e8, taus)
    assert report["passed"], report
    assert report["checked"] == 52


def test_relation_failure_reported(e8, taus):
    """A seed relation fails when one tau value is replaced by its double."""
    relation = seed_relations(e8)[0]
    values = {lam: taus.evaluate(lam).value for lam in relation.classes}
    lam = relation.classes[0]
    values[lam] = values[lam].scale(2)
    report = verify_relation(relation, values)
    assert not report["passed"] and report["witness"]


def test_ex_bilinear(e8, taus):
    report = verify_ex_bilinear(e8, taus)
    assert report["passed"], report


def test_hirota_miwa(e8, taus):
    report = hirota_miwa_checks(e8, taus=taus)
    assert report["passed"], report


def test_transport(e8, taus):
    report = transport_batch(e8, count=8, max_len=3, seed=1, taus=taus)
    assert report["passed"], report["witness"]


def test_transport_threads(e8, taus):
    report = transport_batch(e8, count=6, max_len=2, seed=2, jobs=2, taus=taus)
    assert report["passed"], report["witness"]


def test_random_words(e8):
    words = random_words(e8, 20, 4, seed=0)
    assert words == random_words(e8, 20, 4, seed=0)
    assert all(1 <= len(w) <= 4 and all(0 <= g < e8.rank for g in w) for w in words)


def test_path_consistency(e8, taus):
    report = verify_path_consistency(e8, depth=3, limit=6, taus=taus)
    assert report["passed"], report


def test_seed_fitting(e8):
    report = verify_seed_fitting(e8, seed=0, count=4, max_len=2)
    assert report["passed"], report


def test_seed_fitting_rejects_zero(e8):
    report = verify_seed_fitting(e8, count=1, max_len=1, overrides={klass(11, e={1: 1}): Fraction(0)})
    assert not report["passed"]


def test_report(taus):
    rows = tau_report(taus, [klass(11, h2=1, e={10: -1})])
    assert rows[0]["word"] == [0] and "tau" in rows[0]["pretty"]

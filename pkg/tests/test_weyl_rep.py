import pytest

from qweyl import NormalizationError, NotDivisible, StructuralError
from qweyl.coeffring import Coefficient
from qweyl.fpoly import construct_via_weyl, orbit_cases
from qweyl.lattice import LatticeVector
from qweyl.skew_algebra import SkewElement
from qweyl.weyl_rep import (
    TauSection,
    act_on_element,
    act_on_parameters,
    act_on_section,
    apply_word,
    k_invariants,
    normalize,
    probe_states,
    rational_image,
    section_of,
    seed_section,
    verify_adjoint_realization,
    verify_classical_compatibility,
    verify_involution,
    verify_k_invariants,
    verify_relations,
)


def c(table, value=1, **exps):
    return Coefficient.monomial(table, table.mono(**exps), value)


def test_parameter_maps(e8):
    table = e8.table
    assert act_on_parameters(e8, 0, c(table, e10=1)) == c(table, h2=1, e11=-1)
    assert act_on_parameters(e8, 0, c(table, h1=1)) == c(table, h1=1, h2=1, e10=-1, e11=-1)
    assert act_on_parameters(e8, 0, c(table, h2=1)) == c(table, h2=1)
    assert act_on_parameters(e8, 3, c(table, e7=1)) == c(table, h1=1, e1=-1)
    assert act_on_parameters(e8, 1, c(table, e8=1)) == c(table, e9=1)


def test_rational_image(e8):
    """s0 rescales y by (1 + (h2/e10) y)/(1 + e11 y) and leaves x alone."""
    table = e8.table
    image, xpow, ypow = rational_image(e8, 0, "y")
    assert (xpow, ypow) == (0, 1)
    assert [f.scale for f in image.num] == [c(table, h2=1, e10=-1)]
    assert [f.scale for f in image.den] == [c(table, e11=1)]
    image, xpow, ypow = rational_image(e8, 0, "x")
    assert (image.num, image.den, xpow, ypow) == ((), (), 1, 0)
    image, _, _ = rational_image(e8, 3, "x")
    assert [f.scale for f in image.num] == [c(table, h1=-1, e7=1)]
    assert [f.scale for f in image.den] == [c(table, e1=-1)]


def test_seed_image(e8):
    """s0(τ11) = (1 + q⁻¹(h2/e10) y)·σ2/τ10."""
    table = e8.table
    image = act_on_section(e8, 0, seed_section(e8, 11))
    F = SkewElement.one(table) + SkewElement.monomial(table, c(table, q=-1, h2=1, e10=-1), j=1)
    assert image == TauSection(F, LatticeVector(0, 1, (0,) * 9 + (1, 0)))


def test_swap_moves_points(e8):
    image = act_on_section(e8, 1, seed_section(e8, 8))
    assert image == seed_section(e8, 9)


def test_relations(group):
    report = verify_relations(group)
    assert report["passed"], report


def test_k_invariants(group):
    report = verify_k_invariants(group)
    assert report["passed"], report


def test_k_invariant_shape(e8):
    k = k_invariants(e8)
    assert k["k1"].degree("x") == 1 and k["k2"].degree("y") == 1
    assert act_on_element(e8, 0, k["k1"]) == k["k1"]


def test_involution_and_classical(group):
    states, _ = probe_states(group)
    assert verify_involution(group, states)["passed"]
    assert verify_classical_compatibility(group, states)["passed"]


def test_involution_and_classical_on_orbit_images(group):
    """Weyl images two or three generators away from the seeds, not the seeds themselves."""
    cases = [(i, word) for i, word in orbit_cases(group, 3) if len(word) >= 2][:8]
    sections = [construct_via_weyl(group, word, i) for i, word in cases]
    involution = verify_involution(group, sections)
    classical = verify_classical_compatibility(group, sections)
    assert involution["passed"], involution
    assert classical["passed"], classical
    assert involution["checked"] == classical["checked"] == len(sections) > 0


def test_non_conforming_section(e8):
    """1 + x at E11 violates the x = ∞ condition and cannot be mapped by s0."""
    table = e8.table
    section = TauSection(SkewElement.one(table) + SkewElement.x(table), LatticeVector.E(11, 11))
    with pytest.raises(NotDivisible):
        act_on_section(e8, 0, section)


def test_section_of(e8):
    s = apply_word(e8, (0, 3), seed_section(e8, 11))
    assert section_of(s.element()) == s
    table = e8.table
    two = SkewElement.monomial(table, tau=table.mono(t1=1)) + SkewElement.monomial(table, tau=table.mono(t2=1))
    with pytest.raises(StructuralError):
        section_of(two)


def test_tau_part_rejected(e8):
    table = e8.table
    with pytest.raises(StructuralError):
        TauSection(SkewElement.monomial(table, tau=table.mono(t1=1)), LatticeVector.E(1, 11))


def test_normalize(e8):
    table = e8.table
    n = e8.n_points
    F = SkewElement.from_coefficient(c(table, e1=1)) + SkewElement.monomial(table, c(table, e1=1, e2=1), i=1)
    s = normalize(TauSection(F, LatticeVector.H1(n)))
    assert s.F == SkewElement.one(table) + SkewElement.monomial(table, c(table, e2=1), i=1)
    assert s.normalization == "origin"
    s = normalize(TauSection(SkewElement.monomial(table, c(table, h1=1), i=1), LatticeVector.H1(n)))
    assert s.F == SkewElement.x(table) and s.normalization == "x"
    bad = SkewElement.from_coefficient(c(table, e1=1) + c(table, e2=1))
    with pytest.raises(NormalizationError):
        normalize(TauSection(bad, LatticeVector.H1(n)))


@pytest.mark.parametrize("i,symbol", [(0, "y"), (0, "t11"), (0, "s1"), (3, "x"), (3, "t7"), (1, "t8"), (0, "h1")])
def test_adjoint_realization(e8, i, symbol):
    report = verify_adjoint_realization(e8, i, symbol, order=4)
    assert report["passed"], report

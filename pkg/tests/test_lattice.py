import pytest

from qweyl import StructuralError
from qweyl.lattice import (
    GROUP_TYPES,
    LatticeVector,
    apply_word,
    delta_red,
    dimension_by_pairing,
    dimension_count,
    enumerate_orbit,
    load_group,
    parse_lattice,
    parse_word,
    relation_words,
    star_action,
    verify_lattice_structure,
)


def test_group_files():
    ranks = {"e8": (11, 9), "e7": (10, 8), "e6": (9, 7), "d5": (8, 6)}
    for name in GROUP_TYPES:
        spec = load_group(name)
        assert (spec.n_points, spec.rank) == ranks[name]
        assert spec.type == name.upper()


def test_unknown_group(tmp_path):
    with pytest.raises(StructuralError):
        load_group("e9", str(tmp_path))


def test_lattice_structure(group):
    report = verify_lattice_structure(group)
    assert report["passed"], report


def test_delta_fixed(group):
    delta = delta_red(group.n_points)
    for i in range(group.rank):
        assert star_action(group, i, delta) == delta


def test_dimension_formulas(rng):
    for _ in range(50):
        n = rng.choice([8, 9, 10, 11])
        lam = LatticeVector(rng.randint(0, 4), rng.randint(0, 4), tuple(rng.randint(-1, 3) for _ in range(n)))
        assert dimension_count(lam) == dimension_by_pairing(lam)


def test_invariant_class_count(e8):
    lam = LatticeVector(6, 3, (1, 1, 1, 1, 1, 1, 2, 2, 2, 3, 3))
    assert dimension_count(lam) == 1
    assert all(star_action(e8, i, lam) == lam for i in range(e8.rank))


def test_worked_class(e8):
    word = (3, 2, 1, 0, 2, 4, 3)
    lam = apply_word(e8, word, LatticeVector.E(1, 11))
    assert lam == LatticeVector(2, 1, (1, 0, 0, 0, 0, 0, 1, 0, 1, 1, 1))


def test_x_reflection_on_exceptional_class(e8):
    """s0 = s^x_{10,11} sends E11 to H2 − E10."""
    assert star_action(e8, 0, LatticeVector.E(11, 11)) == LatticeVector(0, 1, (0,) * 9 + (1, 0))


def test_parse_lattice():
    assert parse_lattice("E7", 11) == LatticeVector.E(7, 11)
    assert parse_lattice("h2", 11) == LatticeVector.H2(11)
    assert parse_lattice("(2,1;1,0,0,0,0,0,1,0,1,1,1)", 11).d1 == 2
    with pytest.raises(StructuralError):
        parse_lattice("(2,1;1,0)", 11)


def test_parse_word(e8):
    assert parse_word("3 2 1") == (3, 2, 1)
    assert parse_word("3,2,1") == (3, 2, 1)
    assert parse_word("") == ()
    with pytest.raises(StructuralError):
        parse_word("s3")
    with pytest.raises(StructuralError):
        apply_word(e8, (9,), LatticeVector.E(1, 11))


def test_relation_words(e8):
    words = dict(relation_words(e8))
    assert words["s0^2"] == (0, 0)
    assert len(words) == e8.rank + e8.rank * (e8.rank - 1) // 2


def test_orbit(e8):
    seed = LatticeVector.E(11, 11)
    orbit = enumerate_orbit(e8, [seed], 1)
    image = LatticeVector(0, 1, (0,) * 9 + (1, 0))
    assert orbit.words[seed] == (0, ())
    assert orbit.words[image] == (0, (0,))
    for lam, (k, word) in enumerate_orbit(e8, [seed], 3).words.items():
        assert apply_word(e8, word, seed) == lam

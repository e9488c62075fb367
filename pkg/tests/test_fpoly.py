from qweyl.coeffring import Coefficient
from qweyl.fpoly import (
    ConditionTemplate,
    boundary_runs,
    check_conditions,
    check_nonlog,
    construct_via_weyl,
    draw_assignments,
    fpoly_report,
    in_solution_space,
    orbit_cases,
    series_solution_oracle,
    solution_vector,
    solve_linear_system,
    two_parameter_family,
    verify_nonlog_consistency,
    verify_oracle_equivalence,
    verify_well_definedness,
)
from qweyl.lattice import LatticeVector, dimension_count
from qweyl.skew_algebra import SkewElement
from qweyl.utils.sampler import SpecializationSampler
from qweyl.worked import ex1_polynomial, ex2_polynomial

EX1 = LatticeVector(2, 1, (1, 0, 0, 0, 0, 0, 1, 0, 1, 1, 1))
EX2 = LatticeVector(2, 2, (1, 1, 0, 0, 0, 0, 1, 1, 0, 2, 1))


def test_conditions_hold(e8):
    assert check_conditions(e8, EX1, ex1_polynomial(e8.table))["passed"]
    assert check_conditions(e8, EX2, ex2_polynomial(e8.table))["passed"]


def test_conditions_detect_mutation(e8):
    table = e8.table
    F = ex1_polynomial(table) + SkewElement.monomial(table, i=1, j=1)
    report = check_conditions(e8, EX1, F)
    assert not report["passed"] and report["witness"]


def test_bidegree_limit(e8):
    F = ex1_polynomial(e8.table) * SkewElement.y(e8.table)
    assert "bidegree" in check_conditions(e8, EX1, F)["witness"]


def test_weyl_construction_degree(e8):
    section = construct_via_weyl(e8, (3, 2, 1, 0, 2, 4, 3), 1)
    assert section.lam == EX1
    assert (section.F.degree("x"), section.F.degree("y")) == (2, 1)
    assert section.F.coefficient(0, 0) == Coefficient.constant(e8.table)


def test_two_parameter_family(e8):
    family = two_parameter_family(e8)
    assert check_conditions(e8, family.lam, family.F)["passed"]
    template = ConditionTemplate.build(e8, family.lam)
    solution = solve_linear_system(e8, family.lam, draw_assignments(template, 2, SpecializationSampler(0)))
    assert solution.dimension == dimension_count(family.lam) == 2
    for assignment, basis in zip(solution.assignments, solution.bases):
        vectors = [solution_vector(b, family.lam, {}) for b in basis]
        assert in_solution_space(vectors, solution_vector(family.F, family.lam, assignment))


def test_oracle_equivalence(e8):
    cases = [(1, (3, 2, 1, 0, 2, 4, 3)), (11, (0, 3, 4, 0, 2, 3, 2, 1, 0, 2, 4, 3))]
    report = verify_oracle_equivalence(e8, cases, count=2)
    assert report["passed"], report


def test_oracle_on_orbit(group):
    report = verify_oracle_equivalence(group, orbit_cases(group, 3, 4), count=2)
    assert report["passed"], report


def test_well_definedness(e8):
    report = verify_well_definedness(e8, max_len=3, limit=4)
    assert report["passed"], report


def test_nonlog_runs(e8):
    """ex2 has a double point at E10, giving a two-step run on the x = ∞ boundary."""
    F = ex2_polynomial(e8.table)
    runs = {(q.boundary, q.label): q for q in boundary_runs(e8, EX2, F)}
    run = runs[("x=inf", "E10")]
    assert run.m == 2
    report = check_nonlog(run)
    assert report["passed"] and report["premise"]
    assert all(check_nonlog(q)["passed"] for q in runs.values())


def test_nonlog_detects_broken_slice(e8):
    table = e8.table
    F = ex2_polynomial(table) + SkewElement.monomial(table, i=1, j=1)
    run = next(q for q in boundary_runs(e8, EX2, F) if (q.boundary, q.label) == ("x=inf", "E10"))
    assert not check_nonlog(run)["passed"]


def test_series_oracle(e8):
    table = e8.table
    sampler = SpecializationSampler(3)
    assignment = sampler.draw(table.names[: table.tau_start])
    good = ex2_polynomial(table)
    bad = good + SkewElement.monomial(table, i=1, j=1)
    for F, expected in ((good, "case2b"), (bad, "case2a")):
        run = next(q for q in boundary_runs(e8, EX2, F) if (q.boundary, q.label) == ("x=inf", "E10"))
        assert series_solution_oracle(run, 2, assignment, sampler)["classification"] == expected


def test_nonlog_consistency(e8):
    sections = [construct_via_weyl(e8, w, i) for i, w in orbit_cases(e8, 3, 6)]
    sections.append(construct_via_weyl(e8, (0, 3, 4, 0, 2, 3, 2, 1, 0, 2, 4, 3), 11))
    report = verify_nonlog_consistency(e8, sections)
    assert report["passed"], report


def test_report(e8):
    section = construct_via_weyl(e8, (3, 2, 1, 0, 2, 4, 3), 1)
    report = fpoly_report(e8, section.lam, section, 2, SpecializationSampler(0))
    assert report["passed"]
    assert report["dimension"] == report["dimension_count"] == 1
    assert report["in_linear_span"] == [True, True]

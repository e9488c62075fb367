"""
F-polynomials: the boundary conditions (x)_λ, (y)_λ, their linear system at exact specializations, the constructive
Weyl-word path, and the non-logarithmic singularity checks of the associated q-difference operators.

Usage:
    from qweyl.fpoly import construct_via_weyl, check_conditions

    section = construct_via_weyl(spec, (3, 2, 1, 0, 2, 4, 3), 1)
    report = check_conditions(spec, section.lam, section.F)
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from qweyl import GenericityError, NotDivisible, QWeylError
from qweyl.coeffring import Coefficient, SymbolTable
from qweyl.lattice import GroupSpec, LatticeVector, dimension_count
from qweyl.skew_algebra import LinearFactor, SkewElement, divide_univariate
from qweyl.utils.general import LOGGER
from qweyl.utils.linalg import nullspace, rank
from qweyl.utils.sampler import Assignment, SpecializationSampler
from qweyl.weyl_rep import TauSection, apply_word, normalize, seed_section

Reducer = Optional[Callable[[Coefficient], Coefficient]]
BOUNDARIES = ("x=0", "x=inf", "y=0", "y=inf")


def _pos(v: int) -> int:
    return max(v, 0)


# Condition templates ---------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class SliceTemplate:
    """Slice `index` on `side` ('x': coefficient A_i(y) of x^i, 'y': coefficient B_i(x) of y^i)."""

    side: str
    index: int
    factors: Tuple[LinearFactor, ...]
    degree: int  # prescribed cofactor degree; negative means the slice vanishes

    @property
    def var(self) -> str:
        return "y" if self.side == "x" else "x"

    def __str__(self):
        return f"{self.side}-slice {self.index}"


@dataclass(frozen=True)
class ConditionTemplate:
    spec: GroupSpec
    lam: LatticeVector
    slices: Tuple[SliceTemplate, ...]

    @classmethod
    def build(cls, spec: GroupSpec, lam: LatticeVector, table: Optional[SymbolTable] = None) -> "ConditionTemplate":
        table = table or spec.table
        d1, d2, m = lam.d1, lam.d2, lam.m
        (xi, xj), (yi, yj) = spec.template_x, spec.template_y

        def factor(var, **exps):
            return LinearFactor(table, var, table.mono(**exps))

        slices = []
        for i in range(d1 + 1):
            fs = [factor("y", **{f"e{k}": 1}).shifted(t) for k in xj for t in range(i, m[k - 1])]
            fs += [factor("y", h2=1, **{f"e{k}": -1}).shifted(t) for k in xi for t in range(d1 - m[k - 1], i)]
            deg = d2 - sum(_pos(i - d1 + m[k - 1]) for k in xi) - sum(_pos(m[k - 1] - i) for k in xj)
            slices.append(SliceTemplate("x", i, tuple(fs), deg))
        for i in range(d2 + 1):
            fs = [factor("x", **{f"e{k}": -1}).shifted(t) for k in yi for t in range(i - m[k - 1], 0)]
            fs += [factor("x", h1=-1, **{f"e{k}": 1}).shifted(t) for k in yj for t in range(0, i - d2 + m[k - 1])]
            deg = d1 - sum(_pos(m[k - 1] - i) for k in yi) - sum(_pos(i - d2 + m[k - 1]) for k in yj)
            slices.append(SliceTemplate("y", i, tuple(fs), deg))
        return cls(spec, lam, tuple(slices))

    @property
    def n_unknowns(self) -> int:
        d1, d2 = self.lam.d1, self.lam.d2
        return (d1 + 1) * (d2 + 1)

    def guard(self, assignment: Assignment) -> bool:
        """Prescribed roots within each slice are finite and pairwise distinct at the assignment."""
        for sl in self.slices:
            roots = set()
            for f in sl.factors:
                c = f.scale.specialize(assignment)
                if c == 0:
                    return False
                roots.add(-1 / c)
            if len(roots) != len(sl.factors):
                return False
        return True


def check_conditions(spec: GroupSpec, lam: LatticeVector, F: SkewElement, reduce: Reducer = None) -> dict:
    """
    Slice-by-slice divisibility and degree check of F against (x)_λ and (y)_λ.

    `reduce` maps coefficients and factor scales into a quotient ring first (a parameter constraint).
    """
    d1, d2 = lam.d1, lam.d2
    template = ConditionTemplate.build(spec, lam, F.table)
    if reduce is not None:
        F = F.map_coefficients(reduce)
    results = []
    if F.has_tau() or F.low_degree("x") < 0 or F.low_degree("y") < 0:
        return {"passed": False, "slices": [], "witness": "F is not a polynomial in x, y"}
    if F.degree("x") > d1 or F.degree("y") > d2:
        return {"passed": False, "slices": [], "witness": f"bidegree exceeds ({d1},{d2})"}
    x_slices, y_slices = F.slices("x"), F.slices("y")
    for sl in template.slices:
        poly = (x_slices if sl.side == "x" else y_slices).get(sl.index, SkewElement.zero(F.table))
        results.append({"slice": str(sl), **_check_slice(poly, sl, reduce)})
    failed = [r for r in results if not r["passed"]]
    return {"passed": not failed, "slices": results, "witness": failed[0] if failed else None}


def _check_slice(poly: SkewElement, sl: SliceTemplate, reduce: Reducer) -> dict:
    coeffs = poly.univariate(sl.var)
    if not coeffs:
        return {"passed": True, "reason": "zero slice"}
    if sl.degree < 0:
        return {"passed": False, "reason": f"slice must vanish, found degree {max(coeffs)}"}
    for f in sl.factors:
        scale = reduce(f.scale) if reduce is not None else f.scale
        try:
            coeffs = divide_univariate(coeffs, scale)
        except NotDivisible:
            return {"passed": False, "reason": f"not divisible by {f}"}
    if coeffs and max(coeffs) > sl.degree:
        return {"passed": False, "reason": f"cofactor degree {max(coeffs)} exceeds {sl.degree}"}
    return {"passed": True, "reason": None}


# Linear system ---------------------------------------------------------------------------------------------------------
@dataclass
class LinearSolution:
    lam: LatticeVector
    dimension: int
    bases: List[List[SkewElement]]  # one echelonized basis per specialization
    assignments: List[Assignment]

    def to_json(self) -> dict:
        return {
            "lambda": self.lam.to_json(),
            "dimension": self.dimension,
            "bases": [[b.to_json() for b in basis] for basis in self.bases],
            "assignments": [{k: str(v) for k, v in sorted(a.items())} for a in self.assignments],
        }


def linear_rows(template: ConditionTemplate, assignment: Assignment) -> List[List[Fraction]]:
    """Vanishing conditions on the unknowns f_ij (column i*(d2+1)+j) at one exact specialization."""
    d1, d2 = template.lam.d1, template.lam.d2
    n = template.n_unknowns
    rows = []

    def column(side, index, power):
        return index * (d2 + 1) + power if side == "x" else power * (d2 + 1) + index

    for sl in template.slices:
        width = d2 if sl.side == "x" else d1
        if sl.degree < 0:
            for p in range(width + 1):
                row = [Fraction(0)] * n
                row[column(sl.side, sl.index, p)] = Fraction(1)
                rows.append(row)
            continue
        for f in sl.factors:
            root = f.root(assignment)
            row = [Fraction(0)] * n
            for p in range(width + 1):
                row[column(sl.side, sl.index, p)] = root**p
            rows.append(row)
    return rows


def solution_vector(F: SkewElement, lam: LatticeVector, assignment: Assignment) -> List[Fraction]:
    d1, d2 = lam.d1, lam.d2
    assert F.degree("x") <= d1 and F.degree("y") <= d2, "F outside the (d1, d2) box"
    return [F.coefficient(i, j).specialize(assignment) for i in range(d1 + 1) for j in range(d2 + 1)]


def vector_element(table: SymbolTable, lam: LatticeVector, v: Sequence[Fraction]) -> SkewElement:
    d2 = lam.d2
    terms = {}
    for k, c in enumerate(v):
        if c:
            terms[((), k // (d2 + 1), k % (d2 + 1))] = Coefficient.constant(table, c)
    return SkewElement(table, terms)


def solve_linear_system(
    spec: GroupSpec, lam: LatticeVector, assignments: Sequence[Assignment], table: Optional[SymbolTable] = None
) -> LinearSolution:
    """
    Solution space of (x)_λ, (y)_λ at each exact specialization by fraction-free elimination.

    Raises GenericityError when the dimensions disagree.
    """
    table = table or spec.table
    template = ConditionTemplate.build(spec, lam, table)
    bases, dims = [], set()
    for assignment in assignments:
        basis = nullspace(linear_rows(template, assignment), template.n_unknowns)
        dims.add(len(basis))
        bases.append([vector_element(table, lam, v) for v in basis])
    if len(dims) > 1:
        raise GenericityError(f"solution dimensions {sorted(dims)} disagree across specializations for {lam}")
    return LinearSolution(lam, dims.pop() if dims else 0, bases, list(assignments))


def draw_assignments(
    template: ConditionTemplate, count: int, sampler: SpecializationSampler, derived=None, fixed=None
) -> List[Assignment]:
    table = template.spec.table
    names = [n for n in table.names[: table.tau_start]]
    return sampler.draw_many(names, count, guard=template.guard, derived=derived, fixed=fixed)


def in_solution_space(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> bool:
    return rank(list(basis) + [list(v)]) == rank(list(basis))


# Constructive path -----------------------------------------------------------------------------------------------------
def construct_via_weyl(spec: GroupSpec, word: Sequence[int], i: int, table: Optional[SymbolTable] = None) -> TauSection:
    """w(τ_i) = F·τ^{w*E_i} with F normalized by F(0,0) = 1."""
    return normalize(apply_word(spec, word, seed_section(spec, i, table)))


def two_parameter_family(spec: GroupSpec, table: Optional[SymbolTable] = None) -> TauSection:
    """c0(1 + e_b y) + c1 x(1 + (h2/e_a) y) at λ = H1 + H2 - E_a - E_b for the x-template pair (a, b)."""
    table = table or spec.table
    a, b = spec.template_x[0][0], spec.template_x[1][0]
    n = spec.n_points
    terms = [
        (dict(c0=1), 0, 0),
        ({"c0": 1, f"e{b}": 1}, 0, 1),
        (dict(c1=1), 1, 0),
        ({"c1": 1, "h2": 1, f"e{a}": -1}, 1, 1),
    ]
    F = SkewElement.zero(table)
    for exps, i, j in terms:
        F = F + SkewElement.monomial(table, table.mono(**exps), i=i, j=j)
    lam = LatticeVector.H1(n) + LatticeVector.H2(n) - LatticeVector.E(a, n) - LatticeVector.E(b, n)
    return TauSection(F, lam)


def verify_oracle_equivalence(
    spec: GroupSpec, cases: Sequence[Tuple[int, Tuple[int, ...]]], count: int = 3, seed: int = 0
) -> dict:
    """
    For each (seed index, word): the Weyl-constructed F satisfies its conditions symbolically, the linear system has
    dimension dimension_count(λ) = 1 at `count` specializations, and the specialized F equals the normalized basis
    vector.
    """
    sampler = SpecializationSampler(seed)
    checked = []
    for i, word in cases:
        section = construct_via_weyl(spec, word, i)
        label = f"{' '.join(map(str, word)) or '()'} on E{i}"
        cond = check_conditions(spec, section.lam, section.F)
        if not cond["passed"]:
            return {"passed": False, "case": label, "witness": cond["witness"]}
        template = ConditionTemplate.build(spec, section.lam)
        assignments = draw_assignments(template, count, sampler)
        solution = solve_linear_system(spec, section.lam, assignments)
        expected = dimension_count(section.lam)
        if solution.dimension != expected or expected != 1:
            return {"passed": False, "case": label, "witness": f"dimension {solution.dimension} vs count {expected}"}
        for assignment, basis in zip(assignments, solution.bases):
            v = solution_vector(section.F, section.lam, assignment)
            b = solution_vector(basis[0], section.lam, assignment)
            if v[0] == 0 or b[0] == 0 or [c / v[0] for c in v] != [c / b[0] for c in b]:
                return {"passed": False, "case": label, "witness": "specialized F is not the normalized solution"}
        checked.append(label)
    return {"passed": True, "checked": len(checked), "witness": None}


# Non-logarithmic singularities -----------------------------------------------------------------------------------------
@dataclass(frozen=True)
class NonLogQuery:
    """
    Successive-exponent data at one boundary: factors (1 + a·q^{∓j}·var) for j < m.

    x=0 and y=0 runs use q^{-j}, x=∞ and y=∞ runs use q^{+j}.
    """

    D: SkewElement
    boundary: str
    a: Coefficient
    m: int
    label: str = ""

    def __post_init__(self):
        assert self.boundary in BOUNDARIES, f"unknown boundary {self.boundary}"
        assert self.a.is_monomial(), "run base must be a parameter monomial"
        assert not self.D.has_tau(), "operator must be a polynomial in x, y"

    @property
    def var(self) -> str:
        return "y" if self.boundary.startswith("x") else "x"

    @property
    def step(self) -> int:
        return -1 if self.boundary.endswith("=0") else 1

    def run_factor(self, j: int) -> LinearFactor:
        return LinearFactor.of(self.var, self.a).shifted(self.step * j)

    def coefficient_index(self, i: int) -> int:
        """Slice carrying the i-th condition: A_i / B_i at 0, A_{d-i} / B_{d-i} at infinity."""
        slice_var = self.boundary[0]
        return i if self.boundary.endswith("=0") else self.D.degree(slice_var) - i

    def slice(self, index: int) -> SkewElement:
        return self.D.slices(self.boundary[0]).get(index, SkewElement.zero(self.D.table))


def boundary_runs(spec: GroupSpec, lam: LatticeVector, D: SkewElement) -> List[NonLogQuery]:
    """Run data read off λ and the templates: one query per template point with m_k > 0."""
    table = D.table
    d1, d2, m = lam.d1, lam.d2, lam.m
    (xi, xj), (yi, yj) = spec.template_x, spec.template_y

    def mono(k_shift, **exps):
        c = Coefficient.monomial(table, table.mono(**exps))
        return c.times_q(k_shift) if k_shift else c

    out = []
    for k in xj:
        if m[k - 1] > 0:
            out.append(NonLogQuery(D, "x=0", mono(m[k - 1] - 1, **{f"e{k}": 1}), m[k - 1], f"E{k}"))
    for k in xi:
        if m[k - 1] > 0:
            out.append(NonLogQuery(D, "x=inf", mono(d1 - m[k - 1], h2=1, **{f"e{k}": -1}), m[k - 1], f"E{k}"))
    for k in yi:
        if m[k - 1] > 0:
            out.append(NonLogQuery(D, "y=0", mono(-1, **{f"e{k}": -1}), m[k - 1], f"E{k}"))
    for k in yj:
        if m[k - 1] > 0:
            out.append(NonLogQuery(D, "y=inf", mono(0, h1=-1, **{f"e{k}": 1}), m[k - 1], f"E{k}"))
    return out


def check_nonlog(query: NonLogQuery, reduce: Reducer = None) -> dict:
    """
    For 1 ≤ i ≤ m-1 the i-th boundary coefficient is divisible by Π_{j=0}^{m-i-1}(1 + a·q^{∓j}·var) (zero slices pass).
    The i = 0 condition is the exponent premise and is reported separately; m = 1 passes vacuously.
    """
    conditions = []
    premise = None
    for i in range(query.m):
        coeffs = query.slice(query.coefficient_index(i)).univariate(query.var)
        ok = True
        if coeffs:
            try:
                for j in range(query.m - i):
                    f = query.run_factor(j)
                    coeffs = divide_univariate(coeffs, reduce(f.scale) if reduce else f.scale)
            except NotDivisible:
                ok = False
        if i == 0:
            premise = ok
        else:
            conditions.append({"i": i, "passed": ok})
    failed = [c for c in conditions if not c["passed"]]
    return {
        "passed": not failed,
        "boundary": query.boundary,
        "run": query.label,
        "m": query.m,
        "premise": premise,
        "conditions": conditions,
        "witness": failed[0] if failed else None,
    }


def series_solution_oracle(
    query: NonLogQuery, depth: int, assignment: Assignment, sampler: Optional[SpecializationSampler] = None
) -> dict:
    """
    Runs the power-series recursion at the run's leading exponent, exactly at `assignment`.

    Classification: case2a when some resonance has X_k != 0, case2b when every resonance has X_k = 0, case1 when no
    resonance occurs. Inconclusive when depth < m - 1.
    """
    sampler = sampler or SpecializationSampler(0)
    D, var = query.D, query.var
    slice_var = query.boundary[0]
    degree = D.degree(slice_var)
    a = query.a.specialize(assignment)
    q = Fraction(assignment["q"]) if "q" in assignment else D.table.q_value
    m = query.m

    def coeff(index: int, point: Fraction) -> Fraction:
        if index < 0 or index > degree:
            return Fraction(0)
        return query.slice(index).evaluate(var, point, assignment)

    if query.boundary == "x=0":
        base = -1 / a

        def term(k, j):  # coefficient of c_j in the k-th equation
            return coeff(k - j, base * q**j)

    elif query.boundary == "x=inf":
        base = -1 / a

        def term(k, j):
            return coeff(degree - k + j, base * q ** (-j))

    elif query.boundary == "y=0":
        base = -(q ** (m - 1)) / a

        def term(k, j):
            return coeff(k - j, base * q ** (-k))

    else:
        base = -(q ** (-(m - 1))) / a

        def term(k, j):
            return coeff(degree - k + j, base * q**k)

    if term(0, 0) != 0:
        return {"classification": "not-an-exponent", "inconclusive": False, "resonances": []}
    c = [Fraction(1)]
    resonances = []
    for k in range(1, depth + 1):
        X = sum((term(k, j) * c[j] for j in range(k)), Fraction(0))
        lead = term(k, k)
        if lead == 0:
            resonances.append({"k": k, "X": str(X)})
            c.append(sampler.rational() if X == 0 else Fraction(0))
        else:
            c.append(-X / lead)
    if any(r["X"] != "0" for r in resonances):
        classification = "case2a"
    elif resonances:
        classification = "case2b"
    else:
        classification = "case1"
    return {"classification": classification, "inconclusive": depth < m - 1, "resonances": resonances}


def verify_nonlog_consistency(
    spec: GroupSpec, sections: Sequence[TauSection], seed: int = 0, reduce: Reducer = None
) -> dict:
    """check_nonlog passes exactly when the series oracle finds case2b (or no resonance for m = 1) on every run."""
    sampler = SpecializationSampler(seed)
    checked = 0
    for s in sections:
        for query in boundary_runs(spec, s.lam, s.F):
            symbolic = check_nonlog(query, reduce)
            assignment = sampler.draw(query.D.table.names[: query.D.table.tau_start])
            oracle = series_solution_oracle(query, max(query.m, 2), assignment, sampler)
            expected = "case2b" if query.m > 1 else oracle["classification"]
            agree = symbolic["passed"] == (oracle["classification"] == expected)
            checked += 1
            if not symbolic["passed"] or not agree:
                return {
                    "passed": False,
                    "lambda": str(s.lam),
                    "run": f"{query.boundary} {query.label}",
                    "witness": {"symbolic": symbolic["passed"], "oracle": oracle["classification"]},
                }
    LOGGER.debug(f"non-log consistency checked on {checked} runs")
    return {"passed": True, "checked": checked, "witness": None}


def orbit_cases(spec: GroupSpec, max_len: int, limit: Optional[int] = None) -> List[Tuple[int, Tuple[int, ...]]]:
    """First `limit` (seed, word) pairs reaching distinct classes outside the seed set, by word length."""
    from qweyl.lattice import enumerate_orbit

    n = spec.n_points
    seeds = [LatticeVector.E(i, n) for i in range(1, n + 1)]
    orbit = enumerate_orbit(spec, seeds, max_len)
    cases = [(k + 1, word) for lam, (k, word) in orbit.words.items() if word]
    cases.sort(key=lambda c: (len(c[1]), c))
    return cases[:limit]


def verify_well_definedness(spec: GroupSpec, max_len: int = 4, limit: int = 8) -> dict:
    """Colliding word pairs from the orbit search give identical normalized F."""
    from qweyl.lattice import enumerate_orbit

    n = spec.n_points
    seeds = [LatticeVector.E(i, n) for i in range(1, n + 1)]
    orbit = enumerate_orbit(spec, seeds, max_len, max_collisions=limit)
    for lam, (k1, w1), (k2, w2) in orbit.collisions:
        try:
            a, b = construct_via_weyl(spec, w1, k1 + 1), construct_via_weyl(spec, w2, k2 + 1)
        except QWeylError as e:
            return {"passed": False, "lambda": str(lam), "witness": f"{type(e).__name__}: {e}"}
        if a != b:
            return {"passed": False, "lambda": str(lam), "witness": f"{w1} vs {w2}"}
    return {"passed": True, "checked": len(orbit.collisions), "witness": None}


def fpoly_report(
    spec: GroupSpec,
    lam: LatticeVector,
    section: Optional[TauSection],
    count: int,
    sampler: SpecializationSampler,
    linear: bool = True,
) -> Dict:
    """
    Combined report: condition matrix and non-log runs of the Weyl-constructed F, the linear solution space per
    specialization and whether F lies in it. Passing needs dimension_count(λ) = linear dimension when F is given.
    """
    report = {"lambda": lam.to_json(), "dimension_count": dimension_count(lam)}
    passed = True
    if section is not None:
        cond = check_conditions(spec, lam, section.F)
        runs = [{"boundary": q.boundary, "run": q.label, **check_nonlog(q)} for q in boundary_runs(spec, lam, section.F)]
        report.update(F=section.to_json(), pretty=section.pretty(), conditions=cond, nonlog=runs)
        passed = cond["passed"] and all(r["passed"] for r in runs)
    if linear:
        template = ConditionTemplate.build(spec, lam)
        solution = solve_linear_system(spec, lam, draw_assignments(template, count, sampler))
        report.update(dimension=solution.dimension, linear=solution.to_json())
        if section is not None:
            members = []
            for assignment, basis in zip(solution.assignments, solution.bases):
                vectors = [solution_vector(b, lam, {}) for b in basis]
                members.append(in_solution_space(vectors, solution_vector(section.F, lam, assignment)))
            report["in_linear_span"] = members
            passed = passed and all(members) and solution.dimension == report["dimension_count"]
    report["passed"] = bool(passed)
    return report

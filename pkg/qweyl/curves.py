"""
Quantum curves: the Weyl-invariant class λ*, its parameter constraint, the explicit curve polynomial per group type and
the checks that tie them to the F-polynomial machinery.

Usage:
    from qweyl.curves import CurveSpec, build_explicit_curve, verify_curve_invariance

    curve = CurveSpec.from_group(load_group("e8"))
    P = build_explicit_curve(curve)
    report = verify_curve_invariance(curve)
"""

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from qweyl import QWeylError, StructuralError
from qweyl.coeffring import Coefficient, ExponentVector, SymbolTable, exp_from_dict, exp_scale
from qweyl.fpoly import ConditionTemplate, check_conditions, draw_assignments, solution_vector, solve_linear_system
from qweyl.lattice import GroupSpec, LatticeVector, dimension_count, star_action
from qweyl.skew_algebra import LinearFactor, SkewElement, classical_limit, product_of
from qweyl.utils.general import LOGGER
from qweyl.utils.linalg import rank
from qweyl.utils.sampler import SpecializationSampler
from qweyl.weyl_rep import TauSection, act_on_parameters, act_on_section, generator_action, normalize


@dataclass(frozen=True)
class CurveSpec:
    """Invariant class λ*, the symbol eliminated to impose e^{λ*} = 1, the free central constant and its monomial."""

    group: GroupSpec
    lam: LatticeVector
    eliminate: str
    constant: str
    free_monomial: Tuple[int, int]

    @classmethod
    def from_group(cls, spec: GroupSpec, eliminate: Optional[str] = None) -> "CurveSpec":
        data = spec.curve
        if not data:
            raise StructuralError(f"group {spec.type} declares no curve class")
        lam = LatticeVector(int(data["d"][0]), int(data["d"][1]), tuple(int(v) for v in data["m"]))
        curve = cls(spec, lam, eliminate or data["eliminate"], data["constant"], tuple(data["free_monomial"]))
        exps = dict(curve.constraint(spec.table))
        if abs(exps.get(spec.table.sid(curve.eliminate), 0)) != 1:
            raise StructuralError(f"{curve.eliminate} does not appear with a unit exponent in the constraint")
        return curve

    def constraint(self, table: SymbolTable) -> ExponentVector:
        """Exponent vector of e^{λ*}; the constraint reads e^{λ*} = 1."""
        return self.lam.param_exps(table)

    def substitution(self, table: SymbolTable) -> Dict[int, ExponentVector]:
        exps = dict(self.constraint(table))
        sid = table.sid(self.eliminate)
        u = exps.pop(sid)
        return {sid: exp_scale(exp_from_dict(exps), -u)}

    def reduce(self, c: Coefficient) -> Coefficient:
        """Monomial substitution eliminating the constraint symbol."""
        return c.substitute(self.substitution(c.table))

    def reduce_element(self, F: SkewElement) -> SkewElement:
        return F.map_coefficients(self.reduce)

    def derived(self, table: SymbolTable) -> Dict[str, Callable]:
        """Sampler hook computing the eliminated symbol from the drawn ones."""
        image = Coefficient.monomial(table, self.substitution(table)[table.sid(self.eliminate)])
        return {self.eliminate: lambda values: image.specialize(values)}

    @property
    def lowered(self) -> LatticeVector:
        """λ* with the multiplicity of the eliminated point lowered by one."""
        k = int(self.eliminate[1:]) - 1
        m = list(self.lam.m)
        m[k] -= 1
        return replace(self.lam, m=tuple(m))

    def to_json(self) -> dict:
        return {
            "type": self.group.type,
            "lambda": self.lam.to_json(),
            "eliminate": self.eliminate,
            "constant": self.constant,
            "free_monomial": list(self.free_monomial),
        }


# Explicit curves -------------------------------------------------------------------------------------------------------
class PolyBuilder:
    """Small builder for polynomials with Laurent coefficients, mostly univariate in x."""

    def __init__(self, table: SymbolTable):
        self.t = table

    def m(self, value=1, **exps) -> Coefficient:
        return Coefficient.monomial(self.t, self.t.mono(**exps), value)

    def e(self, i: int, power: int = 1, **extra) -> Coefficient:
        return self.m(**{f"e{i}": power}, **extra)

    def q(self, k: int) -> Coefficient:
        return Coefficient.q_power(self.t, k)

    def qint(self, k: int) -> Coefficient:
        """[k]_q = 1 + q + ... + q^{k-1}."""
        return self.total(self.q(i) for i in range(k))

    def total(self, items: Iterable[Coefficient]) -> Coefficient:
        out = Coefficient(self.t)
        for c in items:
            out = out + c
        return out

    def poly(self, coeffs: Dict[int, Coefficient]) -> SkewElement:
        out = SkewElement.zero(self.t)
        for power, c in coeffs.items():
            out = out + SkewElement.monomial(self.t, c, i=power)
        return out

    def factors(self, scales: Iterable[Coefficient], var: str = "x") -> SkewElement:
        return product_of(self.t, [LinearFactor.of(var, c) for c in scales])

    def y(self, j: int) -> SkewElement:
        return SkewElement.y(self.t, j)


# h1 power of the E8 normalization κ = e7 e8 e9 e10 e11 · h1^k / h2
E8_KAPPA_H1 = -3


def _e8_curve(t: PolyBuilder, constant: str, kappa_h1: int = E8_KAPPA_H1) -> SkewElement:
    a = [t.e(i) for i in range(1, 7)] + [t.e(i, -1, h1=1) for i in range(7, 10)]
    a_inv = [t.e(i, -1) for i in range(1, 7)] + [t.e(i, h1=-1) for i in range(7, 10)]
    A1, Am1 = t.total(a), t.total(a_inv)
    A2 = t.total(u * v for u, v in combinations(a, 2))
    Am2 = t.total(u * v for u, v in combinations(a_inv, 2))
    kappa = t.m(e7=1, e8=1, e9=1, e10=1, e11=1, h1=kappa_h1, h2=-1)
    e11 = t.e(11)
    upper = [t.e(i, h1=-1) for i in range(7, 10)]

    C0 = t.factors(t.e(i, -1) * t.q(-1) for i in range(1, 7))
    C1 = t.poly(
        {
            0: t.qint(3),
            1: t.qint(2) * Am1,
            2: kappa * A1 + Am2,
            4: kappa * t.q(-1) * (kappa * A2 + Am1),
            5: t.qint(2) * kappa * kappa * A1 * t.q(-2),
            6: t.qint(3) * kappa * kappa * t.q(-3),
        }
    ) * e11
    C2 = t.factors(upper) * t.poly({0: t.qint(3), 1: t.q(1) * Am1, 2: t.q(1) * kappa * A1, 3: t.qint(3) * kappa})
    C2 = C2 * (t.q(1) * e11 * e11)
    C3 = t.factors(upper + [u * t.q(1) for u in upper]) * (t.q(3) * e11 * e11 * e11)
    free = SkewElement.monomial(t.t, t.m(**{constant: 1}), i=3, j=1)
    return C0 + C1 * t.y(1) + C2 * t.y(2) + C3 * t.y(3) + free


def _e7_curve(t: PolyBuilder, constant: str) -> SkewElement:
    kappa = t.m(h2=1, e1=-1, e2=-1, e3=-1, e4=-1, e9=-1) * t.q(-1)
    e10 = t.e(10)
    inner = t.total([t.e(i, h1=-1) for i in range(5, 9)] + [t.e(i, -1) for i in range(1, 5)])
    outer = t.total([t.e(i, -1, h1=1) for i in range(5, 9)] + [t.e(i) for i in range(1, 5)])
    C1 = t.poly(
        {
            0: e10 * t.qint(2),
            1: e10 * inner,
            2: t.m(**{constant: 1}),
            3: kappa * outer,
            4: kappa * t.q(-1) * t.qint(2),
        }
    )
    C0 = t.factors(t.e(i, -1) * t.q(-1) for i in range(1, 5))
    C2 = t.factors(t.e(i, h1=-1) for i in range(5, 9)) * (e10 * e10 * t.q(1))
    return C0 + C1 * t.y(1) + C2 * t.y(2)


def _e6_curve(t: PolyBuilder, constant: str) -> SkewElement:
    base = t.m(h2=1, e1=-1, e2=-1, e3=-1, e7=-1)
    inner = t.total([t.e(i, -1, h1=1) for i in range(4, 7)] + [t.e(i) for i in range(1, 4)])
    C1 = t.poly(
        {
            0: t.e(8) + t.e(9),
            1: t.m(**{constant: 1}),
            2: base * t.q(-1) * inner,
            3: base * t.q(-2) * t.qint(2),
        }
    )
    C0 = t.factors(t.e(i, -1) * t.q(-1) for i in range(1, 4))
    C2 = t.factors(t.e(i, h1=-1) for i in range(4, 7)) * (t.e(8) * t.e(9))
    return C0 + C1 * t.y(1) + C2 * t.y(2)


def _d5_curve(t: PolyBuilder, constant: str) -> SkewElement:
    C1 = t.poly(
        {
            0: t.e(5) + t.e(6),
            1: t.m(**{constant: 1}),
            2: (t.e(1) + t.e(2)) * t.m(h2=1, e1=-1, e2=-1, e7=-1, e8=-1) * t.q(-1),
        }
    )
    C0 = t.factors(t.e(i, -1) * t.q(-1) for i in (7, 8))
    C2 = t.factors(t.e(i, h1=-1) for i in (3, 4)) * (t.e(5) * t.e(6))
    return C0 + C1 * t.y(1) + C2 * t.y(2)


CURVE_BUILDERS = {"E8": _e8_curve, "E7": _e7_curve, "E6": _e6_curve, "D5": _d5_curve}


def build_explicit_curve(curve: CurveSpec, table: Optional[SymbolTable] = None) -> SkewElement:
    """The explicit curve P with P(0,0) = 1 and the free constant on its monomial, reduced modulo the constraint."""
    table = table or curve.group.table
    builder = CURVE_BUILDERS.get(curve.group.type)
    if builder is None:
        raise StructuralError(f"no explicit curve for type {curve.group.type}")
    return curve.reduce_element(builder(PolyBuilder(table), curve.constant))


def curve_section(curve: CurveSpec, table: Optional[SymbolTable] = None) -> TauSection:
    return TauSection(build_explicit_curve(curve, table), curve.lam)


# Verification ----------------------------------------------------------------------------------------------------------
def verify_lambda_fixed(curve: CurveSpec) -> dict:
    spec = curve.group
    for i in range(spec.rank):
        image = star_action(spec, i, curve.lam)
        if image != curve.lam:
            return {"passed": False, "witness": f"s{i}: {curve.lam} -> {image}"}
    return {"passed": True, "witness": None}


def verify_curve_conditions(curve: CurveSpec) -> dict:
    """The explicit curve satisfies the condition template of λ* in the constrained ring."""
    return check_conditions(curve.group, curve.lam, build_explicit_curve(curve), reduce=curve.reduce)


def _vectors(basis: List[SkewElement], lam: LatticeVector, assignment) -> List[List[Fraction]]:
    return [solution_vector(b, lam, assignment) for b in basis]


def verify_curve_space(curve: CurveSpec, sampler: SpecializationSampler, count: int = 3) -> dict:
    """
    Under the constraint the λ* solution space has one dimension more than dimension_count(λ*) and is spanned by the
    explicit curve at constant 0 together with the free monomial. Without the constraint it drops back to
    dimension_count(λ*). The lowered class μ has the constrained dimension generically, and under the constraint its
    solutions already satisfy the extra condition of λ*.
    """
    spec, lam, mu = curve.group, curve.lam, curve.lowered
    table = spec.table
    expected = dimension_count(lam) + 1
    template = ConditionTemplate.build(spec, lam)
    constrained = draw_assignments(template, count, sampler, derived=curve.derived(table))
    report = {"expected": expected, "eliminate": curve.eliminate}

    solution = solve_linear_system(spec, lam, constrained)
    report["constrained_dimension"] = solution.dimension
    if solution.dimension != expected:
        return {**report, "passed": False, "witness": f"constrained dimension {solution.dimension} != {expected}"}

    P = build_explicit_curve(curve)
    P0 = P.specialize({curve.constant: 0})
    fi, fj = curve.free_monomial
    free = SkewElement.monomial(table, 1, i=fi, j=fj)
    for assignment, basis in zip(constrained, solution.bases):
        rows = _vectors(basis, lam, assignment)
        span = [solution_vector(P0, lam, assignment), solution_vector(free, lam, assignment)]
        if rank(span) != 2 or rank(rows + span) != rank(rows):
            return {**report, "passed": False, "witness": "explicit curve and free monomial do not span the space"}

    unconstrained = draw_assignments(template, count, sampler)
    generic = solve_linear_system(spec, lam, unconstrained)
    report["unconstrained_dimension"] = generic.dimension
    if generic.dimension != expected - 1:
        return {**report, "passed": False, "witness": f"unconstrained dimension {generic.dimension}"}

    mu_template = ConditionTemplate.build(spec, mu)
    lowered = solve_linear_system(spec, mu, draw_assignments(mu_template, count, sampler))
    report["lowered_dimension"] = lowered.dimension
    if lowered.dimension != dimension_count(mu) or lowered.dimension != expected:
        return {**report, "passed": False, "witness": f"lowered class dimension {lowered.dimension}"}

    aux = solve_linear_system(spec, mu, constrained)
    for assignment, basis_mu, basis_lam in zip(constrained, aux.bases, solution.bases):
        rows = _vectors(basis_lam, lam, assignment)
        extra = _vectors(basis_mu, lam, assignment)
        if aux.dimension != solution.dimension or rank(rows + extra) != rank(rows):
            return {**report, "passed": False, "witness": "constrained lowered solutions miss the extra root"}
    return {**report, "passed": True, "witness": None}


def verify_curve_invariance(curve: CurveSpec, generators: Optional[Iterable[int]] = None) -> dict:
    """Every generator maps (P, λ*) to a section whose normalized polynomial is P again, modulo the constraint."""
    spec = curve.group
    section = curve_section(curve)
    checked = []
    for i in generators if generators is not None else range(spec.rank):
        try:
            image = normalize(act_on_section(spec, i, section, reduce=curve.reduce))
        except QWeylError as e:
            return {"passed": False, "generator": i, "witness": f"{type(e).__name__}: {e}"}
        F = curve.reduce_element(image.F)
        if F != section.F:
            diff = F - section.F
            (key, c), *_ = sorted(diff.iter_terms(), key=lambda kv: kv[0])
            return {"passed": False, "generator": i, "witness": f"x^{key[1]} y^{key[2]}: {c}"}
        checked.append(i)
    LOGGER.debug(f"{spec.type} curve invariant under {checked}")
    return {"passed": True, "checked": checked, "witness": None}


def hinv_ratio(curve: CurveSpec, i: int) -> Tuple[List[LinearFactor], List[LinearFactor]]:
    """
    Multiplicative factor of s_i(P)/P for a reflection generator as (numerator, denominator) factors.

    x-type s^x_{a,b}: Π_{t<m_b} (1 + q^t (h2/e_a) y) / (1 + q^t e_b y).
    y-type s^y_{a,b}: Π_{-m_a<=t<0} (1 + q^t (e_b/h1) x) / (1 + q^t x/e_a).
    """
    gen = curve.group.generators[i]
    action = generator_action(curve.group.table, gen)
    (beta,), (alpha,) = action.var_num, action.var_den
    if gen.kind == "x":
        shifts = range(curve.lam.m[gen.b - 1])
    elif gen.kind == "y":
        shifts = range(-curve.lam.m[gen.a - 1], 0)
    else:
        raise StructuralError(f"s{i} is a point swap; its ratio is 1")
    return [beta.shifted(t) for t in shifts], [alpha.shifted(t) for t in shifts]


def _times(table: SymbolTable, p: SkewElement, factors: Iterable[LinearFactor]) -> SkewElement:
    return p * product_of(table, list(factors))


def verify_hinv(curve: CurveSpec, i: int) -> dict:
    """
    Cross-multiplied s_i(P) = P·ratio, slice by slice in the variable the generator rescales.

    For s^x the x^k slice of s(P) is Π_{l<k} g(q^l y)·A'_k(y) with g = (1+βy)/(1+αy) and A'_k the parameter image of A_k;
    for s^y the y^k slice is B'_k(x)·Π_{l<k} g(q^l x), and the ratio R(x) on the right becomes R(q^k x).
    """
    spec, table = curve.group, curve.group.table
    P = build_explicit_curve(curve)
    gen = spec.generators[i]
    action = generator_action(table, gen)
    (beta,), (alpha,) = action.var_num, action.var_den
    num, den = hinv_ratio(curve, i)
    slice_var = "x" if gen.kind == "x" else "y"
    image = curve.reduce_element(P.map_coefficients(lambda c: act_on_parameters(spec, i, c)))
    ours, theirs = image.slices(slice_var), P.slices(slice_var)
    for k in sorted(set(ours) | set(theirs)):
        zero = SkewElement.zero(table)
        shift = 0 if gen.kind == "x" else k
        left = _times(table, ours.get(k, zero), [beta.shifted(l) for l in range(k)] + [f.shifted(shift) for f in den])
        rhs = _times(table, theirs.get(k, zero), [f.shifted(shift) for f in num] + [alpha.shifted(l) for l in range(k)])
        left, rhs = curve.reduce_element(left), curve.reduce_element(rhs)
        if left != rhs:
            return {"passed": False, "generator": i, "witness": f"{slice_var}^{k} slice"}
    return {"passed": True, "generator": i, "witness": None}


def verify_classical_curve(curve: CurveSpec) -> dict:
    """classical_limit of the quantum curve equals the curve built directly over the commutative table."""
    quantum = build_explicit_curve(curve)
    classical = build_explicit_curve(curve, curve.group.table.classical())
    ok = classical_limit(quantum) == classical
    return {"passed": ok, "witness": None if ok else "q -> 1 limit differs from the commutative curve"}


def verify_constraint_reduction(curve: CurveSpec) -> dict:
    """Reduction is idempotent and commutes with every generator's parameter map."""
    spec, table = curve.group, curve.group.table
    probes = [Coefficient.monomial(table, table.mono(**{name: 1})) for name in table.names[1 : 3 + spec.n_points]]
    probes += [c for _, c in build_explicit_curve(curve).iter_terms()]
    for c in probes:
        r = curve.reduce(c)
        if curve.reduce(r) != r:
            return {"passed": False, "witness": f"reduction not idempotent on {c}"}
        for i in range(spec.rank):
            if curve.reduce(act_on_parameters(spec, i, c)) != curve.reduce(act_on_parameters(spec, i, r)):
                return {"passed": False, "witness": f"s{i} does not commute with reduction on {c}"}
    return {"passed": True, "checked": len(probes), "witness": None}

"""
Quantum birational representation on tau sections.

A section F(x, y)·τ^λ is acted on by substituting the generator images into F and τ^λ separately. The image of τ^λ
is kept factored, as linear factors (1 + c·var) sitting to the left of a tau monomial, so that the rational parts
can be cancelled key-by-key and the leftovers divided out exactly:

    s(F·τ^λ) = s(F) · N(var)/D(var) · τ^{s*λ}

Usage:
    from qweyl.lattice import load_group
    from qweyl.weyl_rep import apply_word, seed_section

    spec = load_group("e8")
    section = apply_word(spec, (3, 2, 1, 0, 2, 4, 3), seed_section(spec, 1))
"""

from collections import defaultdict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from qweyl import NormalizationError, NotDivisible, StructuralError
from qweyl.coeffring import ONE, Coefficient, ExponentVector, SymbolTable, exp_add, exp_from_dict, exp_neg
from qweyl.lattice import GroupSpec, Generator, LatticeVector, relation_words, star_action, verify_coxeter_relations
from qweyl.skew_algebra import LinearFactor, SkewElement, classical_limit, divide_univariate, product_of
from qweyl.utils.general import LOGGER

Reducer = Optional[Callable[[Coefficient], Coefficient]]


# Sections --------------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class TauSection:
    """F(x, y)·τ^λ with F written entirely to the left of the tau monomial."""

    F: SkewElement
    lam: LatticeVector
    normalization: str = "origin"  # 'origin': F(0,0)=1, 'x': lim x⁻¹F(x,0)=1, 'y': lim y⁻¹F(0,y)=1

    def __post_init__(self):
        if self.F.has_tau():
            raise StructuralError("section polynomial must not carry a TAU part")

    def __eq__(self, other):
        if not isinstance(other, TauSection):
            return NotImplemented
        return self.lam == other.lam and self.F == other.F

    def __hash__(self):
        return hash((self.lam, self.F))

    @property
    def table(self) -> SymbolTable:
        return self.F.table

    def element(self) -> SkewElement:
        """The product F·τ^λ as a single skew element."""
        return self.F.times_tau(self.lam.tau_exps(self.table))

    def classical(self) -> "TauSection":
        return replace(self, F=classical_limit(self.F))

    def to_json(self) -> dict:
        return {"lambda": self.lam.to_json(), "normalization": self.normalization, "F": self.F.to_json()}

    @classmethod
    def from_json(cls, table: SymbolTable, data: dict) -> "TauSection":
        return cls(SkewElement.from_json(table, data["F"]), LatticeVector.from_json(data["lambda"]),
                   data.get("normalization", "origin"))

    def pretty(self) -> str:
        return f"[{self.F.pretty()}] * tau^{self.lam}"

    def __str__(self):
        return self.pretty()


def seed_section(spec: GroupSpec, i: int, table: Optional[SymbolTable] = None) -> TauSection:
    """(1, E_i): the section of τ_i."""
    table = table or spec.table
    return TauSection(SkewElement.one(table), LatticeVector.E(i, spec.n_points))


def section_of(element: SkewElement) -> TauSection:
    """Splits an element with a single tau monomial back into (F, λ)."""
    groups = element.tau_groups()
    if len(groups) != 1:
        raise StructuralError(f"expected a single tau monomial, found {len(groups)}")
    (tau, F), = groups.items()
    return TauSection(F, LatticeVector.from_tau_exps(element.table, tau))


# Factored tau images ---------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class FactoredTau:
    """Π num / Π den · T, every factor a LinearFactor in one variable placed left of the tau monomial T."""

    num: Tuple[LinearFactor, ...] = ()
    den: Tuple[LinearFactor, ...] = ()
    tau: ExponentVector = ONE

    def __mul__(self, other: "FactoredTau") -> "FactoredTau":
        # (N1/D1·T1)(N2/D2·T2) = N1·(T1 N2 T1⁻¹) / D1·(T1 D2 T1⁻¹) · T1T2
        return FactoredTau(
            self.num + tuple(f.twisted(self.tau) for f in other.num),
            self.den + tuple(f.twisted(self.tau) for f in other.den),
            exp_add(self.tau, other.tau),
        )

    def inverse(self) -> "FactoredTau":
        # (N/D·T)⁻¹ = (T⁻¹ D/N T)·T⁻¹
        return FactoredTau(
            tuple(f.twisted(self.tau, -1) for f in self.den),
            tuple(f.twisted(self.tau, -1) for f in self.num),
            exp_neg(self.tau),
        )

    def __pow__(self, k: int) -> "FactoredTau":
        base = self if k >= 0 else self.inverse()
        out = FactoredTau()
        for _ in range(abs(k)):
            out = out * base
        return out

    def shifted(self, t: int) -> "FactoredTau":
        """All factors rescaled var → q^t·var (moving a y^t across x-factors or vice versa)."""
        return FactoredTau(tuple(f.shifted(t) for f in self.num), tuple(f.shifted(t) for f in self.den), self.tau)

    def element(self, table: SymbolTable) -> SkewElement:
        """Expanded image; only defined without denominators."""
        assert not self.den, "cannot expand a factored image with pending denominators"
        return product_of(table, list(self.num)).times_tau(self.tau)


# Generator actions -----------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class GeneratorAction:
    """
    One simple reflection over a fixed symbol table.

    `param_map` is the monomial action on parameters; `tau_images` sends each moved tau symbol to its factored image;
    `var_num`/`var_den` hold the rational image of the moved variable: x ↦ x·num/den for x-type, y ↦ num/den·y for
    y-type.
    """

    table: SymbolTable
    generator: Generator
    param_map: Dict[int, ExponentVector] = field(hash=False)
    tau_images: Dict[int, FactoredTau] = field(hash=False)
    var: Optional[str] = None
    var_num: Tuple[LinearFactor, ...] = ()
    var_den: Tuple[LinearFactor, ...] = ()

    @classmethod
    def build(cls, table: SymbolTable, gen: Generator) -> "GeneratorAction":
        sid, a, b = table.sid, gen.a, gen.b
        ea, eb, ta, tb = table.e(a), table.e(b), table.t(a), table.t(b)
        if gen.kind == "swap":
            param_map = {ea: ((eb, 1),), eb: ((ea, 1),)}
            tau_images = {ta: FactoredTau(tau=((tb, 1),)), tb: FactoredTau(tau=((ta, 1),))}
            return cls(table, gen, param_map, tau_images)

        def factor(var, **exps):
            return LinearFactor(table, var, table_mono(table, exps))

        if gen.kind == "x":
            h, s_own, s_moved, var = "h2", "s2", "s1", "y"
            alpha = factor("y", **{f"e{b}": 1})  # (1 + e_b y)
            beta = factor("y", h2=1, **{f"e{a}": -1})  # (1 + (h2/e_a) y)
            num, den = (beta,), (alpha,)
            left = alpha  # factor standing left in τ_a and σ1 images
            right = beta  # factor standing right in the τ_b image
        else:
            h, s_own, s_moved, var = "h1", "s1", "s2", "x"
            gamma = factor("x", h1=-1, **{f"e{b}": 1})  # (1 + (e_b/h1) x)
            delta = factor("x", **{f"e{a}": -1})  # (1 + x/e_a)
            num, den = (gamma,), (delta,)
            left = gamma
            right = delta
        other = "h1" if h == "h2" else "h2"
        param_map = {
            ea: exp_from_dict({sid(h): 1, eb: -1}),
            eb: exp_from_dict({sid(h): 1, ea: -1}),
            sid(other): exp_from_dict({sid("h1"): 1, sid("h2"): 1, ea: -1, eb: -1}),
        }
        own = sid(s_own)
        t_img_a = exp_from_dict({own: 1, tb: -1})  # σ/τ_b
        t_img_b = exp_from_dict({own: 1, ta: -1})  # σ/τ_a
        t_img_s = exp_from_dict({sid(s_moved): 1, own: 1, ta: -1, tb: -1})
        tau_images = {ta: FactoredTau((left,), (), t_img_a), tb: FactoredTau((right.twisted(t_img_b),), (), t_img_b)}
        if gen.kind == "x":
            tau_images[sid(s_moved)] = FactoredTau((left,), (), t_img_s)  # σ1 ↦ (1+e_b y)σ1σ2/(τ_aτ_b)
        else:
            tau_images[sid(s_moved)] = FactoredTau((right.twisted(t_img_s),), (), t_img_s)  # σ2 ↦ σ1σ2/(τ_aτ_b)(1+x/e_a)
        return cls(table, gen, param_map, tau_images, var, num, den)

    # parameters
    def on_parameters(self, c: Coefficient) -> Coefficient:
        return c.substitute(self.param_map)

    def r_tau(self, tau: ExponentVector) -> ExponentVector:
        """Multiplicatively linear part of the action on a tau monomial (its value at x = y = 0)."""
        return self.on_tau_monomial(tau).tau

    def on_tau_monomial(self, tau: ExponentVector) -> FactoredTau:
        out = FactoredTau()
        for sym, e in tau:
            image = self.tau_images.get(sym, FactoredTau(tau=((sym, 1),)))
            out = out * image**e
        return out

    # sections
    def on_section(self, F: SkewElement, lam: LatticeVector, reduce: Reducer = None) -> Tuple[SkewElement, ExponentVector]:
        """
        Returns (F', T') with s(F·τ^λ) = F'·T'.

        x-type:  F' = Σ_i x^i · s(A_i)(y) · Π_{t<i} g(q^t y) · N(y)/D(y)
        y-type:  F' = Σ_j s(B_j)(x) · Π_{t<j} f(q^t x) · N(q^j x)/D(q^j x) · y^j

        `reduce` maps coefficients into a quotient ring (a parameter constraint); it is applied after all twists.
        """
        table = self.table
        image = self.on_tau_monomial(lam.tau_exps(table))
        mapped = F.map_coefficients(self.on_parameters)
        if reduce is not None:
            mapped = mapped.map_coefficients(reduce)
        if self.var is None:
            assert not image.num and not image.den, "swaps carry no rational factors"
            return mapped, image.tau

        slice_var = "x" if self.var == "y" else "y"  # x-type slices by powers of x, y-type by powers of y
        out: Dict[int, SkewElement] = {}
        for power, sl in mapped.slices(slice_var).items():
            rest = image if slice_var == "x" else image.shifted(power)
            num = [f.shifted(t) for t in range(power) for f in self.var_num] + list(rest.num)
            den = [f.shifted(t) for t in range(power) for f in self.var_den] + list(rest.den)
            if reduce is not None:
                num = [f.mapped(reduce) for f in num]
                den = [f.mapped(reduce) for f in den]
            out[power] = _collect(table, sl, num, den, self.var)
        return SkewElement.from_slices(table, slice_var, out), image.tau


def table_mono(table: SymbolTable, exps: Dict[str, int]) -> ExponentVector:
    return exp_from_dict({table.sid(k): v for k, v in exps.items()})


def _collect(table: SymbolTable, poly: SkewElement, num: List[LinearFactor], den: List[LinearFactor], var: str):
    """poly·Πnum/Πden as a polynomial in `var`: cancel equal keys, multiply the rest, divide exactly."""
    pending = defaultdict(list)
    for f in den:
        pending[f.key].append(f)
    kept = []
    for f in num:
        if pending.get(f.key):
            pending[f.key].pop()
        else:
            kept.append(f)
    out = poly * product_of(table, kept) if kept else poly
    for fs in pending.values():
        for f in fs:
            out = _divide(out, f, var)
    return out


def _divide(poly: SkewElement, f: LinearFactor, var: str) -> SkewElement:
    quotient = divide_univariate(poly.univariate(var), f.scale)
    return SkewElement(poly.table, {((ONE, k, 0) if var == "x" else (ONE, 0, k)): c for k, c in quotient.items()})


@lru_cache(maxsize=None)
def generator_action(table: SymbolTable, gen: Generator) -> GeneratorAction:
    return GeneratorAction.build(table, gen)


# Operations ------------------------------------------------------------------------------------------------------------
def act_on_parameters(spec: GroupSpec, i: int, c: Coefficient) -> Coefficient:
    """Monomial substitution of generator i on a parameter expression."""
    spec.check_word((i,))
    return generator_action(c.table, spec.generators[i]).on_parameters(c)


def act_on_section(
    spec: GroupSpec, i: int, s: TauSection, reduce: Reducer = None, action: Optional[GeneratorAction] = None
) -> TauSection:
    """
    s_i(F·τ^λ) = F'·τ^{s*λ}.

    Raises NotDivisible when the leftover denominators do not divide, i.e. the input violates the boundary conditions
    of its class. `action` substitutes a prebuilt (possibly altered) generator action.
    """
    spec.check_word((i,))
    action = action or generator_action(s.table, spec.generators[i])
    F, tau = action.on_section(s.F, s.lam, reduce)
    lam = LatticeVector.from_tau_exps(s.table, tau)
    assert lam == star_action(spec, i, s.lam), f"tau bookkeeping {lam} disagrees with s*{i}{s.lam}"
    return TauSection(F, lam, s.normalization)


def act_on_element(spec: GroupSpec, i: int, element: SkewElement, reduce: Reducer = None) -> SkewElement:
    """Termwise action on a finite sum of sections Σ F_T·T."""
    out = SkewElement.zero(element.table)
    for tau, F in element.tau_groups().items():
        lam = LatticeVector.from_tau_exps(element.table, tau)
        out = out + act_on_section(spec, i, TauSection(F, lam), reduce).element()
    return out


def apply_word(spec: GroupSpec, word: Sequence[int], s: TauSection, reduce: Reducer = None) -> TauSection:
    """w(F·τ^λ) with the rightmost generator acting first."""
    spec.check_word(word)
    for g in reversed(word):
        s = act_on_section(spec, g, s, reduce)
    return s


def normalize(s: TauSection) -> TauSection:
    """
    Divides F by its normalizing coefficient: F(0,0) when nonzero, else the x- or y-coefficient on the axes.

    The coefficient must be a single parameter monomial.
    """
    F = s.F
    for mode, key in (("origin", (0, 0)), ("x", (1, 0)), ("y", (0, 1))):
        c = F.coefficient(*key)
        if c:
            break
    else:
        raise NormalizationError("section vanishes to second order at the origin")
    if not c.is_monomial():
        raise NormalizationError(f"normalizing coefficient {c} is not a monomial")
    exps, value = c.single()
    if exps == ONE and value == 1:
        return replace(s, normalization=mode)
    scaled = F.map_coefficients(lambda v: v.shift_monomial(exp_neg(exps)).scale(Fraction(1) / value))
    return TauSection(scaled, s.lam, mode)


# Verification ----------------------------------------------------------------------------------------------------------
def k_invariants(spec: GroupSpec) -> Dict[str, SkewElement]:
    """k1 = x·τ_a/τ_b and k2 = y·Π τ_J / Π τ_I from the x- and y-templates (E8: x τ10/τ11, y τ7τ8τ9/(τ1..τ6))."""
    table = spec.table
    (xi, xj), (yi, yj) = spec.template_x, spec.template_y
    t1 = exp_from_dict({**{table.t(k): 1 for k in xi}, **{table.t(k): -1 for k in xj}})
    t2 = exp_from_dict({**{table.t(k): 1 for k in yj}, **{table.t(k): -1 for k in yi}})
    return {"k1": SkewElement.monomial(table, tau=t1, i=1), "k2": SkewElement.monomial(table, tau=t2, j=1)}


def verify_k_invariants(spec: GroupSpec) -> dict:
    """Every generator fixes k1 and k2 exactly."""
    for name, k in k_invariants(spec).items():
        for i in range(spec.rank):
            image = act_on_element(spec, i, k)
            if image != k:
                return {"passed": False, "witness": f"s{i}({name}) = {image.pretty()}"}
    return {"passed": True, "witness": None}


def probe_states(spec: GroupSpec, table: Optional[SymbolTable] = None) -> Tuple[List[TauSection], List[str]]:
    """
    Generic bidegree-(1,1) section p00 + p10 x + p01 y + p11 xy at λ = H1 + H2, and the sections (1, E_i), (1, H1),
    (1, H2).
    """
    table = table or spec.table
    n = spec.n_points
    F = SkewElement.zero(table)
    for i in (0, 1):
        for j in (0, 1):
            F = F + SkewElement.monomial(table, table.mono(**{f"p{i}{j}": 1}), i=i, j=j)
    states = [TauSection(F, LatticeVector.H1(n) + LatticeVector.H2(n))]
    labels = ["generic (1,1) section at H1+H2"]
    for i in range(1, n + 1):
        states.append(seed_section(spec, i, table))
        labels.append(f"(1, E{i})")
    one = SkewElement.one(table)
    states += [TauSection(one, LatticeVector.H1(n)), TauSection(one, LatticeVector.H2(n))]
    labels += ["(1, H1)", "(1, H2)"]
    return states, labels


def verify_relations(spec: GroupSpec, table: Optional[SymbolTable] = None, probe: Optional[Callable] = None) -> dict:
    """Coxeter relations of the full quantum action on the probe states."""
    states, labels = probe_states(spec, table)
    probe = probe or (lambda i, s: act_on_section(spec, i, s))
    report = verify_coxeter_relations(spec, probe, states, labels)
    report["relations"] = len(relation_words(spec))
    return report


def verify_involution(spec: GroupSpec, sections: Sequence[TauSection]) -> dict:
    for s in sections:
        for i in range(spec.rank):
            if act_on_section(spec, i, act_on_section(spec, i, s)) != s:
                return {"passed": False, "witness": f"s{i} on {s.lam}"}
    return {"passed": True, "checked": len(sections), "witness": None}


def verify_classical_compatibility(spec: GroupSpec, sections: Sequence[TauSection]) -> dict:
    """classical_limit ∘ s_i = s_i^classical ∘ classical_limit."""
    classical = spec.table.classical()
    for s in sections:
        for i in range(spec.rank):
            left = act_on_section(spec, i, s).classical()
            right = act_on_section(spec, i, TauSection(classical_limit(s.F), s.lam))
            if left != right:
                return {"passed": False, "witness": f"s{i} on {s.lam}"}
    LOGGER.debug(f"classical compatibility checked over {classical.n_points} points")
    return {"passed": True, "checked": len(sections), "witness": None}


def rational_image(spec: GroupSpec, i: int, symbol: str, table: Optional[SymbolTable] = None):
    """
    Image of a single generator symbol as (FactoredTau, x power, y power): s_i(X) = x^a·(N/D)·T·y^b.

    For parameters the image is returned as a Coefficient instead.
    """
    table = table or spec.table
    action = generator_action(table, spec.generators[i])
    sid = table.sid(symbol)
    if table.is_param(sid):
        return action.on_parameters(Coefficient.monomial(table, ((sid, 1),)))
    if symbol in ("x", "y"):
        if action.var == symbol:
            return FactoredTau(action.var_num, action.var_den), int(symbol == "x"), int(symbol == "y")
        return FactoredTau(), int(symbol == "x"), int(symbol == "y")
    return action.on_tau_monomial(((sid, 1),)), 0, 0


def verify_adjoint_realization(
    spec: GroupSpec, i: int, symbol: str, order: int = 6, table: Optional[SymbolTable] = None
) -> dict:
    """
    s_i(X) = G_i⁻¹·r_i(X)·G_i to total degree `order`, with G_i the ratio of q-factorials built from the generator's
    rational x- or y-image (G_i = 1 for swaps).
    """
    from qweyl.qseries import TruncatedSeries, adjoint_series, geometric_series

    table = table or spec.table
    gen = spec.generators[i]
    action = generator_action(table, gen)
    sid = table.sid(symbol)
    G, G_inv = adjoint_series(table, action, order)

    if table.is_param(sid):
        r = SkewElement.from_coefficient(action.on_parameters(Coefficient.monomial(table, ((sid, 1),))))
        expected = TruncatedSeries(r, order)
    elif symbol in ("x", "y"):
        r = SkewElement.x(table) if symbol == "x" else SkewElement.y(table)
        expected = TruncatedSeries(r, order)
        if action.var == symbol:
            ratio = product_of(table, list(action.var_num))
            for f in action.var_den:
                ratio = ratio * geometric_series(table, f, order)
            expected = TruncatedSeries(r * ratio if symbol == "x" else ratio * r, order)
    else:
        image = action.on_tau_monomial(((sid, 1),))
        r = SkewElement.monomial(table, tau=image.tau)
        expected = TruncatedSeries(image.element(table), order)

    got = G_inv * TruncatedSeries(r, order) * G
    diff = got.difference(expected)
    if diff:
        return {"passed": False, "generator": i, "symbol": symbol, "witness": diff}
    return {"passed": True, "generator": i, "symbol": symbol, "witness": None}

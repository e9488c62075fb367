"""
Normal-ordered skew Laurent polynomials.

A SkewElement is a finite sum of terms c·T·x^i·y^j with c a Coefficient (PARAM block), T a tau monomial, and every
q-power produced by reordering already folded into c. The relations are yx = qxy and τ^λ e^μ = q^{λ·μ} e^μ τ^λ; the
tau variables commute with x and y.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

from qweyl import NotDivisible, StructuralError
from qweyl.coeffring import (
    ONE,
    Coefficient,
    ExponentVector,
    Rational,
    SymbolTable,
    exp_add,
    exp_from_dict,
    exp_get,
    exp_neg,
    format_monomial,
)

TermKey = Tuple[ExponentVector, int, int]  # (tau exponents, x power, y power)


class SkewElement:
    """Element of the skew algebra; immutable by convention."""

    __slots__ = ("table", "terms")

    def __init__(self, table: SymbolTable, terms: Optional[Mapping[TermKey, Coefficient]] = None):
        self.table = table
        self.terms: Dict[TermKey, Coefficient] = {}
        if terms:
            for k, c in terms.items():
                if c:
                    if c.table != table:
                        raise StructuralError("term coefficient over a different symbol table")
                    self.terms[k] = c

    # constructors
    @classmethod
    def zero(cls, table: SymbolTable) -> "SkewElement":
        return cls(table)

    @classmethod
    def one(cls, table: SymbolTable) -> "SkewElement":
        return cls.monomial(table)

    @classmethod
    def monomial(
        cls,
        table: SymbolTable,
        coeff: Union[Coefficient, ExponentVector, Rational] = 1,
        tau: ExponentVector = ONE,
        i: int = 0,
        j: int = 0,
    ) -> "SkewElement":
        """Single term coeff·τ^tau·x^i·y^j; `coeff` may be a Coefficient, a parameter exponent vector or a number."""
        if isinstance(coeff, Coefficient):
            c = coeff
        elif isinstance(coeff, tuple):
            c = Coefficient.monomial(table, coeff)
        else:
            c = Coefficient.constant(table, coeff)
        return cls(table, {(tau, i, j): c})

    @classmethod
    def x(cls, table: SymbolTable, power: int = 1) -> "SkewElement":
        return cls.monomial(table, i=power)

    @classmethod
    def y(cls, table: SymbolTable, power: int = 1) -> "SkewElement":
        return cls.monomial(table, j=power)

    @classmethod
    def from_coefficient(cls, c: Coefficient) -> "SkewElement":
        return cls(c.table, {(ONE, 0, 0): c})

    @classmethod
    def from_slices(cls, table: SymbolTable, var: str, slices: Mapping[int, "SkewElement"]) -> "SkewElement":
        """Inverse of `slices`: Σ x^i·A_i(y) for var='x', Σ B_j(x)·y^j for var='y'."""
        out: Dict[TermKey, Coefficient] = {}
        for power, sl in slices.items():
            for (tau, i, j), c in sl.terms.items():
                key = (tau, power, j) if var == "x" else (tau, i, power)
                out[key] = out[key] + c if key in out else c
        return cls(table, out)

    # predicates and accessors
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "SkewElement"):
        if other.table != self.table:
            raise StructuralError("skew elements over mismatched symbol tables")

    def __eq__(self, other):
        if not isinstance(other, SkewElement):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((k, hash(c)) for k, c in self.terms.items()))

    def has_tau(self) -> bool:
        return any(tau for tau, _, _ in self.terms)

    def coefficient(self, i: int = 0, j: int = 0, tau: ExponentVector = ONE) -> Coefficient:
        return self.terms.get((tau, i, j), Coefficient(self.table))

    def constant_term(self) -> Coefficient:
        return self.coefficient(0, 0)

    def degree(self, var: str) -> int:
        idx = 1 if var == "x" else 2
        return max((k[idx] for k in self.terms), default=-1)

    def low_degree(self, var: str) -> int:
        idx = 1 if var == "x" else 2
        return min((k[idx] for k in self.terms), default=0)

    def tau_groups(self) -> Dict[ExponentVector, "SkewElement"]:
        """Splits Σ F_T·T by tau monomial; each F_T is returned without TAU part."""
        groups: Dict[ExponentVector, Dict[TermKey, Coefficient]] = {}
        for (tau, i, j), c in self.terms.items():
            groups.setdefault(tau, {})[(ONE, i, j)] = c
        return {tau: SkewElement(self.table, t) for tau, t in groups.items()}

    def iter_terms(self) -> Iterator[Tuple[TermKey, Coefficient]]:
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0]))

    # ring operations
    def __add__(self, other: "SkewElement") -> "SkewElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return SkewElement(self.table, out)

    def __neg__(self) -> "SkewElement":
        return SkewElement(self.table, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "SkewElement") -> "SkewElement":
        return self + (-other)

    def __mul__(self, other) -> "SkewElement":
        if isinstance(other, SkewElement):
            return multiply(self, other)
        if isinstance(other, Coefficient):
            return multiply(self, SkewElement.from_coefficient(other))
        return self.scale(other)

    def __rmul__(self, other) -> "SkewElement":
        if isinstance(other, Coefficient):
            return multiply(SkewElement.from_coefficient(other), self)
        return self.scale(other)

    def __pow__(self, n: int) -> "SkewElement":
        assert n >= 0, "negative powers are not defined on skew polynomials"
        out = SkewElement.one(self.table)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, value: Rational) -> "SkewElement":
        return SkewElement(self.table, {k: c.scale(value) for k, c in self.terms.items()})

    def times_tau(self, tau: ExponentVector) -> "SkewElement":
        """Right multiplication by a tau monomial (no twist: tau commutes with x, y)."""
        return SkewElement(self.table, {(exp_add(t, tau), i, j): c for (t, i, j), c in self.terms.items()})

    # maps
    def map_coefficients(self, fn) -> "SkewElement":
        out: Dict[TermKey, Coefficient] = {}
        for k, c in self.terms.items():
            n = fn(c)
            out[k] = out[k] + n if k in out else n
        return SkewElement(self.table, out)

    def substitute_params(self, mapping: Mapping[int, ExponentVector]) -> "SkewElement":
        return self.map_coefficients(lambda c: c.substitute(mapping))

    def specialize(self, assignment: Mapping[str, Rational]) -> "SkewElement":
        """Numbers for the assigned PARAM symbols; unassigned ones stay symbolic."""
        return self.map_coefficients(lambda c: c.partial_specialize(assignment))

    def classical(self) -> "SkewElement":
        return classical_limit(self)

    def rehome(self, table: SymbolTable) -> "SkewElement":
        return SkewElement(table, {k: c.rehome(table) for k, c in self.terms.items()})

    def truncate(self, order: int, graded: Tuple[int, ...] = ()) -> "SkewElement":
        """Drops terms whose total degree in x, y and the `graded` parameter symbols exceeds `order`."""
        out: Dict[TermKey, Coefficient] = {}
        for (tau, i, j), c in self.terms.items():
            if i + j > order:
                continue
            if graded:
                kept = {m: v for m, v in c.terms.items() if i + j + sum(exp_get(m, g) for g in graded) <= order}
                c = Coefficient(self.table, kept)
            if c:
                out[(tau, i, j)] = c
        return SkewElement(self.table, out)

    # slices
    def slices(self, var: str) -> Dict[int, "SkewElement"]:
        """{power: slice}; x-slices are A_i(y) in F = Σ x^i A_i(y), y-slices are B_j(x) in F = Σ B_j(x) y^j."""
        assert not self.has_tau(), "slices are defined on elements without TAU part"
        groups: Dict[int, Dict[TermKey, Coefficient]] = {}
        for (tau, i, j), c in self.terms.items():
            if var == "x":
                groups.setdefault(i, {})[(ONE, 0, j)] = c
            else:
                groups.setdefault(j, {})[(ONE, i, 0)] = c
        return {p: SkewElement(self.table, t) for p, t in groups.items()}

    def univariate(self, var: str) -> Dict[int, Coefficient]:
        """{power: coefficient} of an element in the single variable `var`."""
        idx = 1 if var == "x" else 2
        other = 2 if var == "x" else 1
        out = {}
        for k, c in self.terms.items():
            assert not k[0] and k[other] == 0, f"element is not univariate in {var}"
            out[k[idx]] = c
        return out

    def evaluate(self, var: str, point: Fraction, assignment: Mapping[str, Rational]) -> Fraction:
        """Numeric value of a univariate element at var = point."""
        total = Fraction(0)
        for power, c in self.univariate(var).items():
            total += c.specialize(assignment) * Fraction(point) ** power
        return total

    # output
    def to_json(self) -> list:
        names = self.table.names
        return [
            {"tau": {names[s]: e for s, e in tau}, "x": i, "y": j, "coeff": c.to_json()}
            for (tau, i, j), c in self.iter_terms()
        ]

    @classmethod
    def from_json(cls, table: SymbolTable, data: list) -> "SkewElement":
        terms = {}
        for item in data:
            tau = exp_from_dict({table.sid(n): int(e) for n, e in item.get("tau", {}).items()})
            terms[(tau, int(item["x"]), int(item["y"]))] = Coefficient.from_json(table, item["coeff"])
        return cls(table, terms)

    def pretty(self) -> str:
        """Human-readable text, grouped by tau monomial and x power."""
        if not self.terms:
            return "0"
        chunks = []
        for tau, group in sorted(self.tau_groups().items()):
            by_x = group.slices("x")
            parts = []
            for i in sorted(by_x):
                inner = []
                for (_, _, j), c in by_x[i].iter_terms():
                    ys = "" if j == 0 else ("*y" if j == 1 else f"*y^{j}")
                    inner.append(f"({c}){ys}")
                xs = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
                body = " + ".join(inner)
                parts.append(f"{xs}*[{body}]" if xs else body)
            text = " + ".join(parts)
            chunks.append(f"{{{text}}}*{format_monomial(self.table, tau)}" if tau else text)
        return " + ".join(chunks)

    def __str__(self):
        return self.pretty()

    __repr__ = __str__


def multiply(a: SkewElement, b: SkewElement) -> SkewElement:
    """
    Distributive product with all twists folded into coefficients.

    (ca·Ta·x^i·y^j)(cb·Tb·x^k·y^l) = ca·(Ta cb Ta⁻¹)·q^{jk}·Ta·Tb·x^{i+k}·y^{j+l}
    """
    a._check(b)
    out: Dict[TermKey, Coefficient] = {}
    twisted_cache: Dict[Tuple[ExponentVector, TermKey], Coefficient] = {}
    for (ta, i, j), ca in a.terms.items():
        for kb, cb in b.terms.items():
            tb, k, l = kb
            ck = (ta, kb)
            if ck not in twisted_cache:
                twisted_cache[ck] = cb.twisted(ta)
            c = (ca * twisted_cache[ck]).times_q(j * k)
            key = (exp_add(ta, tb), i + k, j + l)
            if key in out:
                s = out[key] + c
                if s:
                    out[key] = s
                else:
                    del out[key]
            elif c:
                out[key] = c
    return SkewElement(a.table, out)


def classical_limit(p: SkewElement) -> SkewElement:
    """q → 1 with terms merged; the result lives in the commutative twin table."""
    table = p.table.classical()
    out: Dict[TermKey, Coefficient] = {}
    for k, c in p.terms.items():
        n = c.classical(table)
        out[k] = out[k] + n if k in out else n
    return SkewElement(table, out)


def coefficient_slice(p: SkewElement, variable: str, power: int) -> SkewElement:
    """A_i(y) (variable='x') or B_j(x) (variable='y'); zero above the degree."""
    return p.slices(variable).get(power, SkewElement.zero(p.table))


# Linear factors --------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class LinearFactor:
    """(1 + c·var) with c = value·exps a single PARAM monomial; q-shifts are folded into exps (or value)."""

    table: SymbolTable
    var: str
    exps: ExponentVector
    value: Fraction = Fraction(1)

    @classmethod
    def of(cls, var: str, c: Coefficient) -> "LinearFactor":
        exps, value = c.single()
        return cls(c.table, var, exps, value)

    @property
    def scale(self) -> Coefficient:
        return Coefficient(self.table, {self.exps: self.value})

    @property
    def key(self):
        return self.var, self.exps, self.value

    def shifted(self, t: int) -> "LinearFactor":
        """(1 + c·q^t·var)."""
        return LinearFactor.of(self.var, self.scale.times_q(t)) if t else self

    def twisted(self, tau: ExponentVector, sign: int = 1) -> "LinearFactor":
        """T·f·T⁻¹ (sign=+1) or T⁻¹·f·T (sign=-1)."""
        return LinearFactor.of(self.var, self.scale.twisted(tau, sign)) if tau else self

    def mapped(self, fn) -> "LinearFactor":
        """Applies a coefficient map (monomial substitution, constraint reduction) to the scale."""
        return LinearFactor.of(self.var, fn(self.scale))

    def element(self) -> SkewElement:
        i, j = (1, 0) if self.var == "x" else (0, 1)
        return SkewElement.one(self.table) + SkewElement.monomial(self.table, self.scale, i=i, j=j)

    def root(self, assignment: Mapping[str, Rational]) -> Fraction:
        """The value of var where the factor vanishes, at a specialization."""
        return -1 / self.scale.specialize(assignment)

    def __str__(self):
        return f"(1 + ({self.scale})*{self.var})"

    __repr__ = __str__


def product_of(table: SymbolTable, factors: List[LinearFactor]) -> SkewElement:
    """Expanded product of linear factors in one variable (order irrelevant: they commute)."""
    out = SkewElement.one(table)
    for f in factors:
        out = out * f.element()
    return out


def divide_univariate(coeffs: Dict[int, Coefficient], c: Coefficient) -> Dict[int, Coefficient]:
    """
    Exact division of Σ a_n z^n by (1 + c·z) in the commutative ring Laurent[params][z].

    Raises NotDivisible when the remainder is nonzero.
    """
    if not coeffs:
        return {}
    lo, hi = min(coeffs), max(coeffs)
    zero = Coefficient(c.table)
    if lo == hi:
        raise NotDivisible(f"single-term polynomial z^{lo} is not divisible by (1 + ({c})z)")
    quotient: Dict[int, Coefficient] = {}
    prev = zero
    for n in range(lo, hi):
        b = coeffs.get(n, zero) - c * prev
        if b:
            quotient[n] = b
        prev = b
    remainder = coeffs.get(hi, zero) - c * prev
    if remainder:
        raise NotDivisible(f"remainder {remainder} at degree {hi} dividing by (1 + ({c})z)")
    return quotient


def _divide_slices(p: SkewElement, slice_var: str, f: LinearFactor, shift_of) -> SkewElement:
    assert not p.has_tau(), "division is defined on elements without TAU part"
    other = f.var
    out = {}
    for power, sl in p.slices(slice_var).items():
        g = f.shifted(shift_of(power))
        quotient = divide_univariate(sl.univariate(other), g.scale)
        out[power] = SkewElement(
            p.table, {((ONE, k, 0) if other == "x" else (ONE, 0, k)): c for k, c in quotient.items()}
        )
    return SkewElement.from_slices(p.table, slice_var, out)


def right_divide_exact(p: SkewElement, f: LinearFactor) -> SkewElement:
    """Q with Q·f = p. For f in y the x-slices divide directly; for f in x the y^j slice divides by (1+cq^j x)."""
    if f.var == "y":
        q = _divide_slices(p, "x", f, lambda i: 0)
    else:
        q = _divide_slices(p, "y", f, lambda j: j)
    assert multiply(q, f.element()) == p, "right division failed its re-multiplication check"
    return q


def left_divide_exact(p: SkewElement, f: LinearFactor) -> SkewElement:
    """Q with f·Q = p, using (1+cy)·x^i = x^i·(1+q^i c y)."""
    if f.var == "y":
        q = _divide_slices(p, "x", f, lambda i: i)
    else:
        q = _divide_slices(p, "y", f, lambda j: 0)
    assert multiply(f.element(), q) == p, "left division failed its re-multiplication check"
    return q


def tau_element(table: SymbolTable, tau: ExponentVector) -> SkewElement:
    return SkewElement.monomial(table, tau=tau)


def tau_inverse(tau: ExponentVector) -> ExponentVector:
    return exp_neg(tau)

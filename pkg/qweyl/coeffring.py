"""
Exact coefficient layer: symbol tables, sparse exponent vectors, the q-power twist form and Laurent-polynomial
coefficients over the rationals.

Symbols are numbered so that sorting by id gives the normal order PARAM < TAU < POS:

    PARAM = q, h1, h2, e1..eN, declared central constants
    TAU   = s1, s2 (the sigmas), t1..tN
    POS   = x, y
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

from qweyl import SpecializationError, StructuralError

ExponentVector = Tuple[Tuple[int, int], ...]  # sorted (symbol id, nonzero exponent) pairs
Rational = Union[int, Fraction]

ONE: ExponentVector = ()
Q_ID = 0
DEFAULT_CONSTANTS = ("c", "c0", "c1", "p00", "p01", "p10", "p11")


# Exponent vectors ------------------------------------------------------------------------------------------------------
def exp_from_dict(d: Mapping[int, int]) -> ExponentVector:
    """Canonical sparse vector from a {symbol id: exponent} mapping, zeros dropped."""
    return tuple(sorted((k, v) for k, v in d.items() if v))


def exp_add(a: ExponentVector, b: ExponentVector) -> ExponentVector:
    """Componentwise sum."""
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, v in b:
        n = d.get(k, 0) + v
        if n:
            d[k] = n
        else:
            del d[k]
    return tuple(sorted(d.items()))


def exp_scale(a: ExponentVector, k: int) -> ExponentVector:
    """Integer multiple of an exponent vector."""
    if k == 0:
        return ONE
    return tuple((s, v * k) for s, v in a)


def exp_neg(a: ExponentVector) -> ExponentVector:
    return exp_scale(a, -1)


def exp_get(a: ExponentVector, sid: int) -> int:
    for k, v in a:
        if k == sid:
            return v
    return 0


def exp_drop(a: ExponentVector, sids: Iterable[int]) -> ExponentVector:
    """Removes the given symbols (sets their exponents to zero)."""
    drop = set(sids)
    return tuple((k, v) for k, v in a if k not in drop)


def exp_split(a: ExponentVector, boundary: int) -> Tuple[ExponentVector, ExponentVector]:
    """Splits into the parts with ids below and at-or-above `boundary`."""
    return tuple((k, v) for k, v in a if k < boundary), tuple((k, v) for k, v in a if k >= boundary)


def apply_monomial_map(a: ExponentVector, mapping: Mapping[int, ExponentVector]) -> ExponentVector:
    """Integer-linear image of `a`; symbols absent from `mapping` are fixed."""
    out: Dict[int, int] = {}
    for k, v in a:
        image = mapping.get(k)
        if image is None:
            out[k] = out.get(k, 0) + v
        else:
            for s, w in image:
                out[s] = out.get(s, 0) + v * w
    return exp_from_dict(out)


# Symbol table ----------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class SymbolTable:
    """
    Ordered symbol set for one group type.

    `quantum=False` gives the commutative (q = 1) world, where every twist vanishes. `q_value` pins q to an exact
    rational, so twists become numeric factors instead of q exponents.
    """

    n_points: int
    constants: Tuple[str, ...] = DEFAULT_CONSTANTS
    quantum: bool = True
    q_value: Optional[Fraction] = field(default=None)

    @cached_property
    def names(self) -> Tuple[str, ...]:
        n = self.n_points
        params = ("q", "h1", "h2") + tuple(f"e{i}" for i in range(1, n + 1)) + tuple(self.constants)
        taus = ("s1", "s2") + tuple(f"t{i}" for i in range(1, n + 1))
        return params + taus + ("x", "y")

    @cached_property
    def index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    @cached_property
    def tau_start(self) -> int:
        return self.index["s1"]

    @cached_property
    def x_id(self) -> int:
        return self.index["x"]

    @cached_property
    def y_id(self) -> int:
        return self.index["y"]

    @cached_property
    def _dual(self) -> Dict[int, Tuple[int, int]]:
        # tau symbol -> (paired parameter symbol, sign) from the intersection pairing
        d = {self.index["s1"]: (self.index["h2"], 1), self.index["s2"]: (self.index["h1"], 1)}
        for i in range(1, self.n_points + 1):
            d[self.index[f"t{i}"]] = (self.index[f"e{i}"], -1)
        return d

    def sid(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise StructuralError(f"unknown symbol '{name}' for a table with N={self.n_points}") from None

    def e(self, i: int) -> int:
        return self.index[f"e{i}"]

    def t(self, i: int) -> int:
        return self.index[f"t{i}"]

    def is_param(self, sid: int) -> bool:
        return sid < self.tau_start

    def mono(self, **exps: int) -> ExponentVector:
        """Exponent vector from keyword exponents, e.g. mono(h1=1, e7=-1)."""
        return exp_from_dict({self.sid(k): v for k, v in exps.items()})

    def pairing(self, tau: ExponentVector, param: ExponentVector) -> int:
        """Twist exponent k in τ^λ e^μ = q^k e^μ τ^λ, i.e. the intersection pairing λ·μ."""
        if not self.quantum or not tau or not param:
            return 0
        pd = dict(param)
        total = 0
        for sid, a in tau:
            partner = self._dual.get(sid)
            if partner is None:
                continue
            b = pd.get(partner[0])
            if b:
                total += partner[1] * a * b
        return total

    def twist(self, a: ExponentVector, b: ExponentVector) -> int:
        """q-power picked up when the full monomial `b` is moved into normal order behind `a`."""
        if not self.quantum:
            return 0
        a_tau = tuple((k, v) for k, v in a if self.tau_start <= k < self.x_id)
        b_par = tuple((k, v) for k, v in b if k < self.tau_start)
        return self.pairing(a_tau, b_par) + exp_get(a, self.y_id) * exp_get(b, self.x_id)

    def classical(self) -> "SymbolTable":
        """The commutative twin (q = 1)."""
        return SymbolTable(self.n_points, self.constants, quantum=False, q_value=None)

    def with_q(self, value: Rational) -> "SymbolTable":
        """Twin table with q pinned to an exact rational."""
        return SymbolTable(self.n_points, self.constants, quantum=self.quantum, q_value=Fraction(value))


def monomial_multiply(table: SymbolTable, a: ExponentVector, b: ExponentVector) -> Tuple[int, ExponentVector]:
    """Returns (q_power, product) with product = componentwise sum in normal order and a·b = q^q_power·product."""
    return table.twist(a, b), exp_add(a, b)


# Coefficients ----------------------------------------------------------------------------------------------------------
class Coefficient:
    """Laurent polynomial in the PARAM block with exact rational coefficients."""

    __slots__ = ("table", "terms")

    def __init__(self, table: SymbolTable, terms: Optional[Mapping[ExponentVector, Rational]] = None):
        self.table = table
        self.terms: Dict[ExponentVector, Fraction] = {}
        if terms:
            for k, v in terms.items():
                if v:
                    self.terms[k] = Fraction(v)

    # constructors
    @classmethod
    def constant(cls, table: SymbolTable, value: Rational = 1) -> "Coefficient":
        return cls(table, {ONE: value})

    @classmethod
    def monomial(cls, table: SymbolTable, exps: ExponentVector, value: Rational = 1) -> "Coefficient":
        return cls(table, {exps: value})

    @classmethod
    def q_power(cls, table: SymbolTable, k: int) -> "Coefficient":
        """q^k, honoring classical and numeric-q tables."""
        if k == 0 or not table.quantum:
            return cls.constant(table)
        if table.q_value is not None:
            return cls.constant(table, table.q_value**k)
        return cls.monomial(table, ((Q_ID, k),))

    # predicates
    def __bool__(self):
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def single(self) -> Tuple[ExponentVector, Fraction]:
        assert self.is_monomial(), f"expected a single monomial, got {len(self.terms)} terms"
        return next(iter(self.terms.items()))

    def _check(self, other: "Coefficient"):
        if other.table != self.table:
            raise StructuralError("coefficients over mismatched symbol tables")

    def __eq__(self, other):
        if not isinstance(other, Coefficient):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # ring operations
    def __add__(self, other: "Coefficient") -> "Coefficient":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            n = out.get(k, 0) + v
            if n:
                out[k] = n
            else:
                out.pop(k, None)
        return Coefficient(self.table, out)

    def __neg__(self) -> "Coefficient":
        return Coefficient(self.table, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Coefficient") -> "Coefficient":
        return self + (-other)

    def __mul__(self, other: Union["Coefficient", Rational]) -> "Coefficient":
        if not isinstance(other, Coefficient):
            return self.scale(other)
        self._check(other)
        out: Dict[ExponentVector, Fraction] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = exp_add(ka, kb)
                n = out.get(k, 0) + va * vb
                if n:
                    out[k] = n
                else:
                    out.pop(k, None)
        return Coefficient(self.table, out)

    __rmul__ = __mul__

    def scale(self, value: Rational) -> "Coefficient":
        value = Fraction(value)
        if not value:
            return Coefficient(self.table)
        return Coefficient(self.table, {k: v * value for k, v in self.terms.items()})

    def shift_monomial(self, exps: ExponentVector) -> "Coefficient":
        """Multiplication by a unit monomial."""
        return Coefficient(self.table, {exp_add(k, exps): v for k, v in self.terms.items()})

    def times_q(self, k: int) -> "Coefficient":
        """Multiplication by q^k."""
        if k == 0 or not self.table.quantum:
            return self
        if self.table.q_value is not None:
            return self.scale(self.table.q_value**k)
        return self.shift_monomial(((Q_ID, k),))

    def twisted(self, tau: ExponentVector, sign: int = 1) -> "Coefficient":
        """Conjugation by a tau monomial: T·c·T⁻¹ (sign=+1) or T⁻¹·c·T (sign=-1)."""
        table = self.table
        if not tau or not table.quantum:
            return self
        out: Dict[ExponentVector, Fraction] = {}
        for k, v in self.terms.items():
            p = sign * table.pairing(tau, k)
            if p and table.q_value is not None:
                v = v * table.q_value**p
            elif p:
                k = exp_add(k, ((Q_ID, p),))
            n = out.get(k, 0) + v
            if n:
                out[k] = n
            else:
                out.pop(k, None)
        return Coefficient(table, out)

    # maps
    def substitute(self, mapping: Mapping[int, ExponentVector]) -> "Coefficient":
        """Applies an integer-linear monomial map to every exponent vector (q is always fixed)."""
        assert Q_ID not in mapping, "monomial maps must fix q"
        out: Dict[ExponentVector, Fraction] = {}
        for k, v in self.terms.items():
            nk = apply_monomial_map(k, mapping)
            n = out.get(nk, 0) + v
            if n:
                out[nk] = n
            else:
                out.pop(nk, None)
        return Coefficient(self.table, out)

    def specialize(self, assignment: Mapping[str, Rational]) -> Fraction:
        """Exact rational value; every symbol present must be assigned (q may come from the table)."""
        total = Fraction(0)
        for k, v in self.terms.items():
            total += v * _evaluate_monomial(self.table, k, assignment)
        return total

    def partial_specialize(self, assignment: Mapping[str, Rational]) -> "Coefficient":
        """Substitutes the assigned symbols by numbers and keeps the rest symbolic."""
        out = Coefficient(self.table)
        for k, v in self.terms.items():
            keep, value = [], v
            for sid, e in k:
                name = self.table.names[sid]
                if name in assignment:
                    value *= _power(Fraction(assignment[name]), e, name)
                else:
                    keep.append((sid, e))
            out = out + Coefficient(self.table, {tuple(keep): value})
        return out

    def classical(self, table: Optional[SymbolTable] = None) -> "Coefficient":
        """q → 1, moved into the commutative twin table."""
        table = table or self.table.classical()
        out: Dict[ExponentVector, Fraction] = {}
        for k, v in self.terms.items():
            nk = exp_drop(k, (Q_ID,))
            n = out.get(nk, 0) + v
            if n:
                out[nk] = n
            else:
                out.pop(nk, None)
        return Coefficient(table, out)

    def rehome(self, table: SymbolTable) -> "Coefficient":
        """Same terms viewed over an equally-numbered table (e.g. its numeric-q twin)."""
        assert table.names == self.table.names, "rehome needs identical symbol numbering"
        return Coefficient(table, self.terms)

    # output
    def sorted_terms(self):
        return sorted(self.terms.items())

    def to_json(self) -> list:
        names = self.table.names
        return [
            {
                "exponents": {names[s]: e for s, e in k},
                "numerator": str(v.numerator),
                "denominator": str(v.denominator),
            }
            for k, v in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, table: SymbolTable, data: list) -> "Coefficient":
        terms = {}
        for item in data:
            k = exp_from_dict({table.sid(n): int(e) for n, e in item["exponents"].items()})
            terms[k] = Fraction(int(item["numerator"]), int(item["denominator"]))
        return cls(table, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.sorted_terms():
            mono = format_monomial(self.table, k)
            if mono == "1":
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _power(value: Fraction, e: int, name: str) -> Fraction:
    if value == 0 and e < 0:
        raise SpecializationError(f"symbol '{name}' assigned 0 but appears with exponent {e}")
    return value**e


def _evaluate_monomial(table: SymbolTable, k: ExponentVector, assignment: Mapping[str, Rational]) -> Fraction:
    value = Fraction(1)
    for sid, e in k:
        name = table.names[sid]
        if name in assignment:
            base = Fraction(assignment[name])
        elif sid == Q_ID and table.q_value is not None:
            base = table.q_value
        else:
            raise SpecializationError(f"assignment misses symbol '{name}'")
        value *= _power(base, e, name)
    return value


def format_monomial(table: SymbolTable, k: ExponentVector) -> str:
    """Readable monomial text, e.g. 'q^-1*h1^2*e7^-1'."""
    if not k:
        return "1"
    names = table.names
    return "*".join(names[s] if e == 1 else f"{names[s]}^{e}" for s, e in k)

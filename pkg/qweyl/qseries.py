"""
Truncated formal series over the skew algebra.

A TruncatedSeries stores element/den with den a central polynomial in q (a power of (q;q)_N); every product drops the
monomials whose total degree in x, y and the `graded` parameter symbols exceeds `order`. Over numeric-q tables the
denominator is folded into the coefficients right away.

Conventions:
    (z)+∞ = Π_{i≥0}(1 + q^i z) = Σ q^{n(n-1)/2} z^n / (q;q)_n
    1/(z)+∞ = Σ (-z)^n / (q;q)_n
    (z)∞ = Π_{i≥0}(1 - q^i z) = (-z)+∞
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from qweyl import StructuralError
from qweyl.coeffring import ONE, Coefficient, SymbolTable
from qweyl.skew_algebra import LinearFactor, SkewElement
from qweyl.utils.general import LOGGER
from qweyl.utils.sampler import SpecializationSampler

Factor = Tuple[Coefficient, str, int]  # (scale c, variable, ±1) for (c·var)+∞^{±1}


def _qpow(table: SymbolTable, k: int) -> Coefficient:
    if table.q_value is not None:
        return Coefficient.constant(table, table.q_value**k)
    if table.quantum:
        return Coefficient.q_power(table, k)
    raise StructuralError("q-series need a quantum table or a numeric q")


def _cpow(c: Coefficient, n: int) -> Coefficient:
    out = Coefficient.constant(c.table)
    for _ in range(n):
        out = out * c
    return out


def qq_factorial(table: SymbolTable, hi: int, lo: int = 1) -> Coefficient:
    """Π_{k=lo}^{hi}(1 - q^k); (q;q)_n for lo = 1."""
    out = Coefficient.constant(table)
    one = Coefficient.constant(table)
    for k in range(lo, hi + 1):
        out = out * (one - _qpow(table, k))
    return out


@dataclass(frozen=True)
class TruncatedSeries:
    element: SkewElement
    order: int
    den: Optional[Coefficient] = None
    graded: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        element, den = self.element.truncate(self.order, self.graded), self.den
        if den is not None and set(den.terms) <= {ONE}:
            value = den.terms.get(ONE)
            assert value, "zero series denominator"
            element, den = element.scale(1 / value), None
        object.__setattr__(self, "element", element)
        object.__setattr__(self, "den", den)

    @property
    def table(self) -> SymbolTable:
        return self.element.table

    @classmethod
    def one(cls, table: SymbolTable, order: int, graded: Tuple[int, ...] = ()) -> "TruncatedSeries":
        return cls(SkewElement.one(table), order, graded=graded)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        order = min(self.order, other.order)
        a, b = self.element.truncate(order, self.graded), other.element.truncate(order, other.graded)
        den = _den_product(self.den, other.den)
        return TruncatedSeries(a * b, order, den, self.graded or other.graded)

    def _common(self, other: "TruncatedSeries") -> Tuple[SkewElement, SkewElement, Optional[Coefficient], int]:
        order = min(self.order, other.order)
        a = self.element if other.den is None else self.element * other.den
        b = other.element if self.den is None else other.element * self.den
        return a, b, _den_product(self.den, other.den), order

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        a, b, den, order = self._common(other)
        return TruncatedSeries(a + b, order, den, self.graded or other.graded)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        a, b, den, order = self._common(other)
        return TruncatedSeries(a - b, order, den, self.graded or other.graded)

    def truncate(self, order: int) -> "TruncatedSeries":
        assert order <= self.order, f"cannot raise a truncation order {self.order} -> {order}"
        return TruncatedSeries(self.element, order, self.den, self.graded)

    def difference(self, other: "TruncatedSeries") -> Optional[str]:
        """None when equal up to the common order, else the first differing term."""
        a, b, _, order = self._common(other)
        diff = (a - b).truncate(order, self.graded or other.graded)
        if not diff:
            return None
        (tau, i, j), c = next(diff.iter_terms())
        return f"x^{i}*y^{j}" + (f" at tau {tau}" if tau else "") + f": {c}"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.difference(other) is None


def _den_product(a: Optional[Coefficient], b: Optional[Coefficient]) -> Optional[Coefficient]:
    if a is None:
        return b
    return a if b is None else a * b


def _var_power(table: SymbolTable, c: Coefficient, var: str, n: int) -> SkewElement:
    return SkewElement.monomial(table, c, i=n if var == "x" else 0, j=n if var == "y" else 0)


# q-factorials ----------------------------------------------------------------------------------------------------------
def q_factorial_series(
    table: SymbolTable,
    scale: Coefficient,
    var: str,
    order: int,
    inverse: bool = False,
    standard: bool = False,
    graded: Tuple[int, ...] = (),
) -> TruncatedSeries:
    """
    (z)+∞ or its inverse for z = scale·var, exactly to total degree `order`; `standard` switches to (z)∞ = (-z)+∞.

    Symbolic q keeps the common denominator (q;q)_order; the n-th numerator is Π_{k=n+1}^{order}(1 - q^k).
    """
    if standard:
        scale = -scale
    symbolic = table.q_value is None
    terms = SkewElement.zero(table)
    for n in range(order + 1):
        if inverse:
            c = _cpow(-scale, n)
        else:
            c = _cpow(scale, n) * _qpow(table, n * (n - 1) // 2)
        weight = qq_factorial(table, order, n + 1) if symbolic else Coefficient.constant(table, 1 / _num(table, n))
        terms = terms + _var_power(table, c * weight, var, n)
    den = qq_factorial(table, order) if symbolic else None
    return TruncatedSeries(terms, order, den, graded)


def _num(table: SymbolTable, n: int) -> Fraction:
    value = qq_factorial(table, n).terms.get(ONE, Fraction(0))
    assert value, f"(q;q)_{n} vanishes at q = {table.q_value}"
    return value


def q_pochhammer(table: SymbolTable, scale: Coefficient, var: str, n: int) -> SkewElement:
    """Finite product Π_{i<n}(1 + q^i·scale·var), expanded exactly."""
    out = SkewElement.one(table)
    for i in range(n):
        out = out * (SkewElement.one(table) + _var_power(table, scale * _qpow(table, i), var, 1))
    return out


def geometric_series(table: SymbolTable, f: LinearFactor, order: int) -> SkewElement:
    """1/(1 + c·var) = Σ (-c·var)^n to degree `order`."""
    out = SkewElement.zero(table)
    for n in range(order + 1):
        out = out + _var_power(table, _cpow(-f.scale, n), f.var, n)
    return out


def product_series(
    table: SymbolTable, factors: Sequence[Factor], order: int, graded: Tuple[int, ...] = ()
) -> TruncatedSeries:
    """Ordered product of (c·var)+∞^{±1} factors."""
    out = TruncatedSeries.one(table, order, graded)
    for scale, var, e in factors:
        out = out * q_factorial_series(table, scale, var, order, inverse=e < 0, graded=graded)
    return out


# Adjoint realization ---------------------------------------------------------------------------------------------------
def adjoint_factors(action) -> List[Factor]:
    """G = (βy)+/(αy)+ for x-type reflections, (δx)+/(γx)+ for y-type ones, nothing for swaps."""
    if action.var is None:
        return []
    (num,), (den,) = action.var_num, action.var_den
    if action.var == "y":
        return [(num.scale, "y", 1), (den.scale, "y", -1)]
    return [(den.scale, "x", 1), (num.scale, "x", -1)]


def inverse_factors(factors: Sequence[Factor]) -> List[Factor]:
    return [(c, var, -e) for c, var, e in reversed(factors)]


def adjoint_series(table: SymbolTable, action, order: int) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """(G, G⁻¹) for one generator action."""
    factors = adjoint_factors(action)
    return product_series(table, factors, order), product_series(table, inverse_factors(factors), order)


# Identities ------------------------------------------------------------------------------------------------------------
def scratch_table(q: Fraction, quantum: bool = True, constants: Tuple[str, ...] = ("a", "b", "c")) -> SymbolTable:
    """A pointless table carrying only q, x, y and a few central constants."""
    return SymbolTable(0, constants, quantum=quantum, q_value=Fraction(q))


def verify_q_binomial(order: int = 8, trials: int = 3, seed: int = 0) -> dict:
    """(az)+/(z)+ = Σ (a;q)_n/(q;q)_n (-z)^n with the standard (a;q)_n = Π_{i<n}(1 - aq^i)."""
    sampler = SpecializationSampler(seed)
    for t in range(trials):
        a, q = sampler.rational(), sampler.rational()
        table = scratch_table(q, quantum=False)
        one = Coefficient.constant(table)
        lhs = product_series(table, [(one.scale(a), "x", 1), (one, "x", -1)], order)
        rhs = SkewElement.zero(table)
        for n in range(order + 1):
            coeff = Fraction(1)
            for i in range(n):
                coeff *= 1 - a * q**i
            rhs = rhs + _var_power(table, one.scale(coeff / _num(table, n) * (-1) ** n), "x", n)
        witness = lhs.difference(TruncatedSeries(rhs, order))
        if witness:
            return {"passed": False, "trial": t, "a": a, "q": q, "witness": witness}
    return {"passed": True, "trials": trials, "witness": None}


def dilog_sides(table: SymbolTable, a: Fraction, b: Fraction, order: int) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """
    (ay)+/(y)+ · (ax)+/(bx)+ · (y)+/(by)+  and  (x)+/(bx)+ · (ay)+/(by)+ · (ax)+/(x)+.
    """
    one = Coefficient.constant(table)
    A, B = one.scale(a), one.scale(b)
    lhs = [(A, "y", 1), (one, "y", -1), (A, "x", 1), (B, "x", -1), (one, "y", 1), (B, "y", -1)]
    rhs = [(one, "x", 1), (B, "x", -1), (A, "y", 1), (B, "y", -1), (A, "x", 1), (one, "x", -1)]
    return product_series(table, lhs, order), product_series(table, rhs, order)


def verify_dilog_identity(
    order: int = 8, trials: int = 3, seed: int = 0, commutative: bool = False, values: Optional[Sequence] = None
) -> dict:
    """
    The non-commutative product identity for yx = qxy at random exact (a, b, q); `values` pins (a, b, q) triples.
    """
    assert order >= 1, "order must be positive"
    sampler = SpecializationSampler(seed)
    triples = list(values or [])
    while len(triples) < trials:
        triples.append((sampler.rational(), sampler.rational(), sampler.rational()))
    for a, b, q in triples:
        table = scratch_table(q, quantum=not commutative)
        lhs, rhs = dilog_sides(table, Fraction(a), Fraction(b), order)
        witness = lhs.difference(rhs)
        if witness:
            return {"passed": False, "a": str(a), "b": str(b), "q": str(q), "witness": witness}
    LOGGER.debug(f"dilog identity checked on {len(triples)} triples to order {order}")
    return {"passed": True, "trials": len(triples), "witness": None}


def _finite(table: SymbolTable, scale: Coefficient, var: str, n: int, standard: bool = True) -> SkewElement:
    """(z;q)_n = Π_{i<n}(1 - q^i z) (standard) as a polynomial."""
    return q_pochhammer(table, -scale if standard else scale, var, n)


def _finite_inverse(table: SymbolTable, scale: Coefficient, var: str, n: int, order: int, graded) -> TruncatedSeries:
    """1/(z;q)_n expanded as a product of geometric series."""
    out = TruncatedSeries.one(table, order, graded)
    for i in range(n):
        f = LinearFactor.of(var, -scale * _qpow(table, i)) if var in ("x", "y") else None
        if f is not None:
            out = out * TruncatedSeries(geometric_series(table, f, order), order, graded=graded)
        else:
            out = out * TruncatedSeries(_param_geometric(table, scale * _qpow(table, i), order), order, graded=graded)
    return out


def _param_geometric(table: SymbolTable, c: Coefficient, order: int) -> SkewElement:
    """1/(1 - c) for c a graded parameter monomial."""
    out = SkewElement.zero(table)
    for n in range(order + 1):
        out = out + SkewElement.from_coefficient(_cpow(c, n))
    return out


def _std_poch(a: Fraction, q: Fraction, n: int) -> Fraction:
    out = Fraction(1)
    for i in range(n):
        out *= 1 - a * q**i
    return out


def red_ppp_sides(table: SymbolTable, a: Fraction, b: Fraction, order: int) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """
    (ax)∞ Σ (a)_n/(q)_n (bx)_n/(ax)_n y^n (y)∞  and  (x)∞ Σ x^n (a)_n/(q)_n (by)_n/(ay)_n (ay)∞, standard convention.
    """
    one = Coefficient.constant(table)
    q = table.q_value
    A, B = one.scale(a), one.scale(b)

    def middle(var_in, var_out, left_power):
        total = TruncatedSeries(SkewElement.zero(table), order)
        for n in range(order + 1):
            c = one.scale(_std_poch(a, q, n) / _std_poch(q, q, n))
            ratio = TruncatedSeries(_finite(table, B, var_in, n), order) * _finite_inverse(table, A, var_in, n, order, ())
            power = TruncatedSeries(_var_power(table, c, var_out, n), order)
            total = total + (power * ratio if left_power else ratio * power)
        return total

    lhs = (
        q_factorial_series(table, A, "x", order, standard=True)
        * middle("x", "y", left_power=False)
        * q_factorial_series(table, one, "y", order, standard=True)
    )
    rhs = (
        q_factorial_series(table, one, "x", order, standard=True)
        * middle("y", "x", left_power=True)
        * q_factorial_series(table, A, "y", order, standard=True)
    )
    return lhs, rhs


def heine_sides(table: SymbolTable, a: Fraction, order: int) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """
    ₂φ₁(a, b; c; x)  and  (ax)∞/(x)∞ · (b)∞/(c)∞ · ₂φ₁(c/b, x; ax; b), with x, b, c series variables.
    """
    q = table.q_value
    graded = (table.sid("b"), table.sid("c"))
    one = Coefficient.constant(table)
    A = one.scale(a)
    b = Coefficient.monomial(table, table.mono(b=1))
    c = Coefficient.monomial(table, table.mono(c=1))

    def series(el: SkewElement) -> TruncatedSeries:
        return TruncatedSeries(el, order, graded=graded)

    lhs = series(SkewElement.zero(table))
    for n in range(order + 1):
        num = SkewElement.from_coefficient(one.scale(_std_poch(a, q, n) / _std_poch(q, q, n)))
        term = series(num) * series(_finite(table, b, "const", n)) * _finite_inverse(table, c, "const", n, order, graded)
        lhs = lhs + term * series(_var_power(table, one, "x", n))

    inner = series(SkewElement.zero(table))
    for n in range(order + 1):
        # (c/b;q)_n b^n = Π_{i<n}(b - c q^i)
        poly = SkewElement.one(table)
        for i in range(n):
            poly = poly * (SkewElement.from_coefficient(b) - SkewElement.from_coefficient(c * _qpow(table, i)))
        head = series(poly.scale(1 / _std_poch(q, q, n)))
        ratio = series(_finite(table, one, "x", n)) * _finite_inverse(table, A, "x", n, order, graded)
        inner = inner + head * ratio
    rhs = (
        q_factorial_series(table, A, "x", order, standard=True, graded=graded)
        * q_factorial_series(table, one, "x", order, inverse=True, standard=True, graded=graded)
        * _param_product(table, b, order, graded, inverse=False)
        * _param_product(table, c, order, graded, inverse=True)
        * inner
    )
    return lhs, rhs


def _param_product(table: SymbolTable, z: Coefficient, order: int, graded, inverse: bool) -> TruncatedSeries:
    """(z;q)∞ or its inverse for a graded parameter z, from the Euler expansions."""
    q = table.q_value
    out = SkewElement.zero(table)
    for n in range(order + 1):
        if inverse:
            c = _cpow(z, n).scale(1 / _std_poch(q, q, n))
        else:
            c = _cpow(-z, n).scale(q ** (n * (n - 1) // 2) / _std_poch(q, q, n))
        out = out + SkewElement.from_coefficient(c)
    return TruncatedSeries(out, order, graded=graded)


def phi21_symmetric(table: SymbolTable, a: Fraction, b: Fraction, c: Fraction, order: int) -> Tuple[TruncatedSeries, ...]:
    """₂φ₁(a, b; c; x) and ₂φ₁(b, a; c; x) at numeric a, b, c."""
    q = table.q_value
    one = Coefficient.constant(table)

    def phi(u, v):
        out = SkewElement.zero(table)
        for n in range(order + 1):
            coeff = _std_poch(u, q, n) * _std_poch(v, q, n) / (_std_poch(q, q, n) * _std_poch(c, q, n))
            out = out + _var_power(table, one.scale(coeff), "x", n)
        return TruncatedSeries(out, order)

    return phi(a, b), phi(b, a)


def verify_heine_chain(order: int = 8, trials: int = 3, seed: int = 0) -> dict:
    """Commutative reordered product identity, the Heine transformation and the a↔b symmetry of ₂φ₁."""
    sampler = SpecializationSampler(seed)
    for t in range(trials):
        a, b, c, q = (sampler.rational() for _ in range(4))
        table = scratch_table(q, quantum=False)
        checks = {
            "red_ppp": red_ppp_sides(table, a, b, order),
            "heine": heine_sides(table, a, order),
            "symmetry": phi21_symmetric(table, a, b, c, order),
        }
        for name, (lhs, rhs) in checks.items():
            witness = lhs.difference(rhs)
            if witness:
                return {"passed": False, "check": name, "trial": t, "witness": witness}
    return {"passed": True, "trials": trials, "witness": None}


def braid_products(spec, i: int, j: int) -> Tuple[List[Factor], List[Factor]]:
    """
    G = (r_i r_j G_i)(r_i G_j) G_i and G̃ = (r_j r_i G_j)(r_j G_i) G_j for adjacent reflections i, j, as factor lists
    with symbolic scales.
    """
    from qweyl.weyl_rep import generator_action

    table = spec.table
    acts = {k: generator_action(table, spec.generators[k]) for k in (i, j)}

    def moved(factors, word):
        out = []
        for c, var, e in factors:
            for g in reversed(word):
                c = acts[g].on_parameters(c)
            out.append((c, var, e))
        return out

    gi, gj = adjoint_factors(acts[i]), adjoint_factors(acts[j])
    G = moved(gi, (i, j)) + moved(gj, (i,)) + gi
    G_tilde = moved(gj, (j, i)) + moved(gi, (j,)) + gj
    return G, G_tilde


def verify_braid_product(spec, i: int, j: int, order: int = 8, trials: int = 3, seed: int = 0) -> dict:
    """G = G̃ as truncated series at random numeric parameters and q."""
    G, G_tilde = braid_products(spec, i, j)
    sampler = SpecializationSampler(seed)
    params = [n for n in spec.table.names[1 : spec.table.tau_start] if n not in spec.table.constants]
    for t in range(trials):
        assignment = sampler.draw(["q"] + params)
        table = spec.table.with_q(assignment["q"])

        def numeric(factors):
            return [(Coefficient.constant(table, c.specialize(assignment)), var, e) for c, var, e in factors]

        witness = product_series(table, numeric(G), order).difference(product_series(table, numeric(G_tilde), order))
        if witness:
            return {"passed": False, "pair": [i, j], "trial": t, "witness": witness}
    return {"passed": True, "pair": [i, j], "trials": trials, "witness": None}


def q_factorial_check(order: int = 6, seed: int = 0) -> Dict[str, Optional[str]]:
    """(z)+∞·(z)+∞⁻¹ = 1 for symbolic q and for a numeric q."""
    out = {}
    for label, table in (
        ("symbolic", SymbolTable(0, ("a",))),
        ("numeric", SymbolTable(0, ("a",)).with_q(SpecializationSampler(seed).rational())),
    ):
        z = Coefficient.monomial(table, table.mono(a=1))
        prod = q_factorial_series(table, z, "y", order) * q_factorial_series(table, z, "y", order, inverse=True)
        out[label] = prod.difference(TruncatedSeries.one(table, order))
    return out


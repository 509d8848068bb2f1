"""
Polynomial rings, ideals and Groebner bases
Exact sparse arithmetic over the rationals, with localization modelled by Rabinowitsch variables
"""

import re
import threading
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.orderings import MonomialOrder, grevlex, grlex, lex
from sympy.polys.rings import PolyElement
from sympy.polys.rings import PolyRing as SympyRing

from src.logger import get_logger


logger = get_logger(__name__)

INVERSE_PREFIX = "_w"
IDENTIFIER = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

_ORDERS = {"grevlex": grevlex, "grlex": grlex, "lex": lex}

Scalar = Union[int, Fraction]


class RingMismatchError(ValueError):
    """Raised when operands live in different rings"""


class NotAUnitError(ArithmeticError):
    """Raised when an inverse is requested for a non-unit"""


class BlockOrder(MonomialOrder):
    """
    Elimination order: grevlex on the first block of variables, ties broken by
    grevlex on the second block.
    """

    alias = "block"
    is_global = True
    is_default = False

    def __init__(self, first: Sequence[int], second: Sequence[int]):
        self.first = tuple(first)
        self.second = tuple(second)

    def __call__(self, monomial):
        return (
            grevlex(tuple(monomial[i] for i in self.first)),
            grevlex(tuple(monomial[i] for i in self.second)),
        )

    def __repr__(self) -> str:
        return f"BlockOrder({self.first}, {self.second})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BlockOrder)
            and self.first == other.first
            and self.second == other.second
        )

    def __hash__(self) -> int:
        return hash((BlockOrder, self.first, self.second))


def to_qq(value) -> "QQ":
    """Convert an int, Fraction or rational domain element to a QQ element"""
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


# ---------------------------------------------------------------------------
# Buchberger's algorithm on sympy ring elements
# ---------------------------------------------------------------------------

def spoly(f: PolyElement, g: PolyElement) -> PolyElement:
    """Return the s-polynomial of monic polynomials f and g."""
    R = f.ring
    lcm = R.monomial_lcm(f.LM, g.LM)
    return f.mul_monom(R.monomial_div(lcm, f.LM)) - g.mul_monom(R.monomial_div(lcm, g.LM))


def select(G: List[PolyElement], P: set) -> Tuple[int, int]:
    """Normal strategy: the pair whose lcm is smallest in the monomial order."""
    R = G[0].ring
    return min(P, key=lambda p: (R.order(R.monomial_lcm(G[p[0]].LM, G[p[1]].LM)), p))


def update(G: List[PolyElement], P: set, f: PolyElement) -> Tuple[List[PolyElement], set]:
    """Add f to the basis G, pruning pairs with the Gebauer-Moeller criteria."""
    R = f.ring
    lcm, mul, div = R.monomial_lcm, R.monomial_mul, R.monomial_div
    lmf = f.LM
    lmG = [g.LM for g in G]

    P = {
        p for p in P
        if (not div(lcm(lmG[p[0]], lmG[p[1]]), lmf)
            or lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[0]], lmf)
            or lcm(lmG[p[0]], lmG[p[1]]) == lcm(lmG[p[1]], lmf))
    }

    lcm_dict: Dict[tuple, List[int]] = {}
    for i in range(len(G)):
        lcm_dict.setdefault(lcm(lmG[i], lmf), []).append(i)
    minimal_lcms: List[tuple] = []
    for L in sorted(lcm_dict.keys(), key=R.order):
        if all(not div(L, M) for M in minimal_lcms):
            minimal_lcms.append(L)

    new_pairs = set()
    for L in minimal_lcms:
        # product criterion: coprime leading monomials need no pair
        if not any(lcm(lmG[i], lmf) == mul(lmG[i], lmf) for i in lcm_dict[L]):
            new_pairs.add((min(lcm_dict[L]), len(G)))
    return G + [f], P | new_pairs


def minimalize(G: List[PolyElement]) -> List[PolyElement]:
    """Return a minimal Groebner basis from an arbitrary Groebner basis G."""
    if not G:
        return []
    R = G[0].ring
    Gmin: List[PolyElement] = []
    for f in sorted(G, key=lambda h: R.order(h.LM)):
        if all(not R.monomial_div(f.LM, g.LM) for g in Gmin):
            Gmin.append(f)
    return Gmin


def interreduce(G: List[PolyElement]) -> List[PolyElement]:
    """Return the reduced Groebner basis from a minimal Groebner basis G."""
    reduced = []
    for i in range(len(G)):
        reduced.append(G[i].rem(G[:i] + G[i + 1:]).monic())
    return reduced


def groebner_basis(F: Iterable[PolyElement]) -> List[PolyElement]:
    """
    Reduced Groebner basis of the polynomials F in their own ring order

    Args:
        F: Generators, all in the same sympy ring

    Returns:
        Reduced basis sorted by increasing leading monomial
    """
    F = [f for f in F if f]
    if not F:
        return []
    R = F[0].ring
    if any(f.ring != R for f in F):
        raise RingMismatchError("polynomials must be in the same ring")

    G: List[PolyElement] = []
    P: set = set()
    for f in F:
        G, P = update(G, P, f.monic())
    while P:
        i, j = select(G, P)
        P.remove((i, j))
        r = spoly(G[i], G[j]).rem(G)
        if r:
            G, P = update(G, P, r.monic())

    basis = interreduce(minimalize(G))
    return sorted(basis, key=lambda g: R.order(g.LM))


# ---------------------------------------------------------------------------
# Rings and elements
# ---------------------------------------------------------------------------

class PolyRing:
    """
    Q[variables] localized at the inverted polynomials, modulo optional relations.

    The ring is realized as Q[variables, w_0..w_k] / (relations, w_i*f_i - 1)
    with one Rabinowitsch variable per inverted element. Elements are stored
    as normal forms modulo that defining ideal, so equality is structural.
    """

    def __init__(
        self,
        variables: Sequence[str],
        inverted: Sequence = (),
        order: str = "grevlex",
        relations: Sequence = (),
    ):
        variables = tuple(variables)
        if not variables:
            raise ValueError("a polynomial ring needs at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError(f"variable names must be distinct: {variables}")
        for name in variables:
            if not IDENTIFIER.match(name):
                raise ValueError(f"invalid variable name: {name!r}")
        if order not in _ORDERS:
            raise ValueError(f"order must be one of {sorted(_ORDERS)}")

        self.variables = variables
        self.order = order
        self.base = SympyRing(variables, QQ, _ORDERS[order])

        factors = [self._to_base(f) for f in inverted]
        if not all(factors):
            raise ValueError("cannot invert the zero polynomial")
        # leading monomial descending, then by text
        factors.sort(key=format_base)
        factors.sort(key=lambda f: self.base.order(f.LM), reverse=True)
        self.inverted: Tuple[PolyElement, ...] = tuple(factors)
        self.relations: Tuple[PolyElement, ...] = tuple(
            r for r in (self._to_base(r) for r in relations) if r
        )

        symbols = variables + tuple(f"{INVERSE_PREFIX}{k}" for k in range(len(self.inverted)))
        self.internal = SympyRing(symbols, QQ, _ORDERS[order])
        self.nvars = len(variables)

        self._inverted_internal = [f.set_ring(self.internal) for f in self.inverted]
        w = self.internal.gens[self.nvars:]
        self.defining: List[PolyElement] = [r.set_ring(self.internal) for r in self.relations]
        self.defining += [w[k] * f - 1 for k, f in enumerate(self._inverted_internal)]
        self.defining_gb: List[PolyElement] = groebner_basis(self.defining)

        self._key = (self.variables, self.order, self.inverted, self.relations)

    def _to_base(self, value) -> PolyElement:
        if isinstance(value, Poly):
            if value.ring.variables != self.variables or value.ring.inverted:
                raise RingMismatchError(f"{value} is not a polynomial in {self.variables}")
            value = value.numerator()
        if isinstance(value, PolyElement):
            return value.set_ring(self.base)
        if isinstance(value, str):
            return PolyRing(self.variables, order=self.order).poly(value).rep.set_ring(self.base)
        return self.base(to_qq(value))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyRing) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        parts = [f"Q[{', '.join(self.variables)}]"]
        if self.inverted:
            parts.append("inverting " + ", ".join(format_base(f) for f in self.inverted))
        if self.relations:
            parts.append("modulo " + ", ".join(format_base(r) for r in self.relations))
        return f"PolyRing({'; '.join(parts)})"

    # -- construction -----------------------------------------------------

    def reduce(self, rep: PolyElement) -> PolyElement:
        """Normal form of an internal polynomial modulo the defining ideal"""
        if self.defining_gb and rep:
            return rep.rem(self.defining_gb)
        return rep

    @property
    def zero(self) -> "Poly":
        return Poly(self, self.internal.zero, reduced=True)

    @property
    def one(self) -> "Poly":
        return Poly(self, self.internal.one)

    def gens(self) -> List["Poly"]:
        return [Poly(self, g) for g in self.internal.gens[: self.nvars]]

    def var(self, name: str) -> "Poly":
        return self.gens()[self.index(name)]

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise RingMismatchError(f"{name!r} is not a variable of {self}") from None

    def constant(self, value) -> "Poly":
        return Poly(self, self.internal(to_qq(value)))

    def from_base(self, element: PolyElement) -> "Poly":
        return Poly(self, element.set_ring(self.base).set_ring(self.internal))

    def poly(self, value) -> "Poly":
        """Coerce a Poly, number, expression string or sympy element into this ring"""
        if isinstance(value, Poly):
            return value if value.ring == self else self.coerce(value)
        if isinstance(value, str):
            from src.parser import parse
            return parse(value, self)
        if isinstance(value, PolyElement):
            if value.ring == self.internal:
                return Poly(self, value)
            return Poly(self, value.set_ring(self.internal))
        return self.constant(value)

    def coerce(self, p: "Poly") -> "Poly":
        """
        Map an element of a ring on the same variables into this ring.

        Raises:
            RingMismatchError: variables, order or relations differ
            NotAUnitError: a denominator of p is not invertible here
        """
        other = p.ring
        if other == self:
            return p
        if other.variables != self.variables or other.order != self.order:
            raise RingMismatchError(f"cannot map {other} into {self}")
        if set(other.relations) - set(self.relations):
            raise RingMismatchError(f"relations of {other} do not hold in {self}")
        num, exps = p.fraction()
        result = self.from_base(num)
        for f, e in zip(other.inverted, exps):
            if e:
                result = result * self.inverse(self.from_base(f)) ** e
        return result

    # -- structure --------------------------------------------------------

    def inverse(self, p: "Poly") -> "Poly":
        """
        Inverse of a unit: a nonzero constant times a product of inverted factors

        Raises:
            NotAUnitError: if p is not such a unit
        """
        if p.ring != self:
            raise RingMismatchError("element from a different ring")
        num, exps = p.fraction()
        if not num:
            raise NotAUnitError("zero is not invertible")
        counts = [0] * len(self.inverted)
        rest = num
        for k, f in enumerate(self.inverted):
            if f.is_ground:
                continue
            while not rest.is_ground:
                q, r = rest.div(f)
                if r:
                    break
                rest = q
                counts[k] += 1
        if not rest.is_ground:
            raise NotAUnitError(f"{p} is not a unit in {self}")
        result = self.internal(QQ.one / rest.LC)
        w = self.internal.gens[self.nvars:]
        for k, f in enumerate(self._inverted_internal):
            result *= f ** exps[k] * w[k] ** counts[k]
        return Poly(self, result)

    def is_unit(self, p: "Poly") -> bool:
        try:
            self.inverse(p)
        except NotAUnitError:
            return False
        return True

    def is_trivial(self) -> bool:
        """True when the defining ideal contains 1 (the open set is empty)"""
        return any(g.is_ground for g in self.defining_gb)


class Poly:
    """An element of a PolyRing, stored as its normal form in the internal ring"""

    __slots__ = ("ring", "rep")

    def __init__(self, ring: PolyRing, rep: PolyElement, reduced: bool = False):
        self.ring = ring
        self.rep = rep if reduced else ring.reduce(rep)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.ring == other.ring and self.rep == other.rep
        if isinstance(other, (int, Fraction)):
            return self.rep == self.ring.internal(to_qq(other))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, self.rep))

    def __bool__(self) -> bool:
        return bool(self.rep)

    @property
    def is_zero(self) -> bool:
        return not self.rep

    @property
    def is_constant(self) -> bool:
        return self.rep.is_ground

    # -- arithmetic -------------------------------------------------------

    def _coerce_operand(self, other) -> Optional[PolyElement]:
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} and {other.ring} differ")
            return other.rep
        if isinstance(other, (int, Fraction)):
            return self.ring.internal(to_qq(other))
        return None

    def __add__(self, other):
        rep = self._coerce_operand(other)
        return NotImplemented if rep is None else Poly(self.ring, self.rep + rep)

    __radd__ = __add__

    def __sub__(self, other):
        rep = self._coerce_operand(other)
        return NotImplemented if rep is None else Poly(self.ring, self.rep - rep)

    def __rsub__(self, other):
        rep = self._coerce_operand(other)
        return NotImplemented if rep is None else Poly(self.ring, rep - self.rep)

    def __neg__(self):
        return Poly(self.ring, -self.rep, reduced=True)

    def __mul__(self, other):
        rep = self._coerce_operand(other)
        return NotImplemented if rep is None else Poly(self.ring, self.rep * rep)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, Poly):
            return self * other.ring.inverse(other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.ring.inverse(self) * other
        return NotImplemented

    # -- calculus ---------------------------------------------------------

    def diff(self, variable: Union[str, int]) -> "Poly":
        """
        Partial derivative; on localized rings the inverse variables follow the
        chain rule d(w)/dx = -w^2 * df/dx.
        """
        ring = self.ring
        i = ring.index(variable) if isinstance(variable, str) else variable
        out = self.rep.diff(i)
        w = ring.internal.gens[ring.nvars:]
        for k, f in enumerate(ring._inverted_internal):
            dw = self.rep.diff(ring.nvars + k)
            if dw:
                out -= dw * w[k] ** 2 * f.diff(i)
        return Poly(ring, out)

    # -- views ------------------------------------------------------------

    def fraction(self) -> Tuple[PolyElement, Tuple[int, ...]]:
        """
        Reduced fraction view: numerator in the base ring and one exponent per
        inverted element, with common inverted factors cancelled.
        """
        ring = self.ring
        n, k = ring.nvars, len(ring.inverted)
        if not k:
            return self.rep.set_ring(ring.base), ()
        if not self.rep:
            return ring.base.zero, (0,) * k

        monoms = list(self.rep.itermonoms())
        exps = [max(m[n + j] for m in monoms) for j in range(k)]
        num = ring.base.zero
        for m, c in self.rep.iterterms():
            term = ring.base.from_dict({m[:n]: c})
            for j, f in enumerate(ring.inverted):
                term *= f ** (exps[j] - m[n + j])
            num += term
        for j, f in enumerate(ring.inverted):
            if f.is_ground:
                num = num.mul_ground(QQ.one / f.LC ** exps[j])
                exps[j] = 0
                continue
            while exps[j] > 0:
                q, r = num.div(f)
                if r:
                    break
                num = q
                exps[j] -= 1
        return num, tuple(exps)

    def numerator(self) -> PolyElement:
        return self.fraction()[0]

    def degree(self) -> int:
        """Total degree of the stored representative, inverse variables included"""
        return max((sum(m) for m in self.rep.itermonoms()), default=-1)

    def constant_term(self) -> Fraction:
        c = self.rep.get(self.ring.internal.zero_monom, QQ.zero)
        return Fraction(int(c.numerator), int(c.denominator))

    def coefficients(self) -> Dict[tuple, "QQ"]:
        return dict(self.rep.items())

    def substitute(self, images: Sequence["Poly"], target: PolyRing) -> "Poly":
        return substitute(self.rep, images, target)

    def to_expr(self):
        """sympy expression of the fraction view (used for numerical plotting)"""
        num, exps = self.fraction()
        expr = num.as_expr()
        for f, e in zip(self.ring.inverted, exps):
            if e:
                expr = expr / f.as_expr() ** e
        return expr

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)})"


def substitute(rep: PolyElement, images: Sequence[Poly], target: PolyRing) -> Poly:
    """
    Evaluate a sympy polynomial at target-ring elements, one per generator of
    its ring.
    """
    if len(images) != rep.ring.ngens:
        raise ValueError(f"expected {rep.ring.ngens} images, got {len(images)}")
    R = target.internal
    powers: List[Dict[int, PolyElement]] = [{0: R.one} for _ in images]

    def power(i: int, e: int) -> PolyElement:
        cache = powers[i]
        if e not in cache:
            cache[e] = target.reduce(power(i, e - 1) * images[i].rep)
        return cache[e]

    total = R.zero
    for monom, coeff in rep.iterterms():
        term = R(coeff)
        for i, e in enumerate(monom):
            if e:
                term = term * power(i, e)
        total += term
    return Poly(target, total)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _format_coefficient(c) -> str:
    if c.denominator == 1:
        return str(int(c.numerator))
    return f"{int(c.numerator)}/{int(c.denominator)}"


def _format_monomial(monom: tuple, names: Sequence[str]) -> str:
    factors = []
    for name, e in zip(names, monom):
        if e == 1:
            factors.append(name)
        elif e > 1:
            factors.append(f"{name}^{e}")
    return "*".join(factors)


def format_base(element: PolyElement) -> str:
    """Print a plain polynomial with terms in decreasing monomial order"""
    if not element:
        return "0"
    names = [str(s) for s in element.ring.symbols]
    pieces = []
    for index, (monom, coeff) in enumerate(element.terms()):
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        body = _format_monomial(monom, names)
        if not body:
            text = _format_coefficient(magnitude)
        elif magnitude == 1:
            text = body
        else:
            text = f"{_format_coefficient(magnitude)}*{body}"
        if index == 0:
            pieces.append(f"-{text}" if negative else text)
        else:
            pieces.append(f" - {text}" if negative else f" + {text}")
    return "".join(pieces)


def _format_factor(f: PolyElement, e: int) -> str:
    text = format_base(f)
    if len(f) > 1:
        text = f"({text})"
    return text if e == 1 else f"{text}^{e}"


def format_poly(p: Poly) -> str:
    """Canonical text of an element; localized elements print as num/den"""
    num, exps = p.fraction()
    text = format_base(num)
    factors = [(f, e) for f, e in zip(p.ring.inverted, exps) if e]
    if not factors:
        return text
    if len(num) > 1:
        text = f"({text})"
    den = "*".join(_format_factor(f, e) for f, e in factors)
    if len(factors) > 1:
        den = f"({den})"
    return f"{text}/{den}"


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------

class Ideal:
    """An ideal of a PolyRing with a lazily computed, lock-protected Groebner basis"""

    def __init__(self, ring: PolyRing, generators: Iterable = ()):
        self.ring = ring
        gens = [ring.poly(g) for g in generators]
        self.generators: Tuple[Poly, ...] = tuple(g for g in gens if not g.is_zero)
        self._gb: Optional[List[PolyElement]] = None
        self._lock = threading.Lock()

    def groebner(self) -> List[PolyElement]:
        """Reduced basis of the generators together with the ring's defining ideal"""
        with self._lock:
            if self._gb is None:
                F = [g.rep for g in self.generators] + list(self.ring.defining_gb)
                self._gb = groebner_basis(F)
                logger.debug(
                    f"Groebner basis of {len(self.generators)} generators "
                    f"has {len(self._gb)} elements"
                )
        return self._gb

    def normal_form(self, f: Poly) -> Poly:
        return normal_form(f, self)

    def contains(self, f) -> bool:
        return normal_form(self.ring.poly(f), self).is_zero

    def is_zero(self) -> bool:
        return not self.generators

    def is_unit(self) -> bool:
        return any(g.is_ground for g in self.groebner())

    def basis(self) -> List[Poly]:
        """Groebner basis elements that are nonzero in the ring, as elements"""
        seen = []
        for g in self.groebner():
            p = Poly(self.ring, g)
            if not p.is_zero and p not in seen:
                seen.append(p)
        return seen

    def display(self) -> List[str]:
        """Ideal generators up to units: numerators of the basis elements, monic"""
        shown = []
        for p in self.basis():
            num = p.numerator()
            if num.is_ground:
                return ["1"]
            text = format_base(num.monic())
            if text not in shown:
                shown.append(text)
        return shown

    def dimension(self) -> int:
        """
        Krull dimension of the quotient ring, from maximal independent sets of
        leading monomials; -1 for the unit ideal.
        """
        gb = self.groebner()
        if any(g.is_ground for g in gb):
            return -1
        n = self.ring.internal.ngens
        leads = [g.LM for g in gb]
        for size in range(n, -1, -1):
            for subset in combinations(range(n), size):
                chosen = set(subset)
                if all(any(m[i] and i not in chosen for i in range(n)) for m in leads):
                    return size
        return 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Ideal)
            and self.ring == other.ring
            and self.groebner() == other.groebner()
        )

    def __hash__(self) -> int:
        return hash((self.ring, tuple(self.groebner())))

    def __repr__(self) -> str:
        return f"Ideal({', '.join(str(g) for g in self.generators)})"


def normal_form(f: Poly, ideal: Ideal) -> Poly:
    """
    Unique remainder of f modulo the reduced Groebner basis of the ideal

    Raises:
        RingMismatchError: if f and the ideal live in different rings
    """
    if f.ring != ideal.ring:
        raise RingMismatchError(f"{f} is not an element of {ideal.ring}")
    gb = ideal.groebner()
    if not gb or f.is_zero:
        return f
    return Poly(f.ring, f.rep.rem(gb), reduced=True)


def buchberger(ideal: Ideal) -> Ideal:
    """Populate and return the ideal's reduced Groebner basis"""
    ideal.groebner()
    return ideal


def eliminate(ideal: Ideal, keep: Sequence[str]) -> Ideal:
    """
    Intersection of the ideal with Q[keep]

    Inverse variables are always eliminated, so the result lives in a plain
    polynomial ring on the kept variables (in ring order).

    Raises:
        ValueError: if keep is not a subset of the ring variables
    """
    ring = ideal.ring
    unknown = [v for v in keep if v not in ring.variables]
    if unknown:
        raise ValueError(f"cannot keep {unknown}: not variables of {ring}")
    kept = [v for v in ring.variables if v in keep]
    if not kept:
        raise ValueError("keep must name at least one variable")

    symbols = [str(s) for s in ring.internal.symbols]
    keep_idx = [symbols.index(v) for v in kept]
    drop_idx = [i for i in range(len(symbols)) if i not in keep_idx]
    elim_ring = SympyRing(symbols, QQ, BlockOrder(drop_idx, keep_idx))

    F = [g.rep.set_ring(elim_ring) for g in ideal.generators]
    F += [g.set_ring(elim_ring) for g in ring.defining_gb]
    gb = groebner_basis(F)

    target = PolyRing(kept, order=ring.order)
    survivors = [g for g in gb if all(not m[i] for m in g.itermonoms() for i in drop_idx)]
    logger.debug(f"elimination onto {kept}: {len(survivors)} of {len(gb)} basis elements")
    return Ideal(target, [g.set_ring(target.internal) for g in survivors])


def localize(ring: PolyRing, f) -> PolyRing:
    """
    The ring with f inverted

    f is split into its distinct monic irreducible factors; only factors not
    already inverted are added, so localizing at a unit returns the ring.
    The ring keeps its factors in a canonical order, so D(xy) is the same
    ring however the denominators were written or accumulated.

    Raises:
        ValueError: if f is zero
    """
    f = ring.poly(f)
    if f.is_zero:
        raise ValueError("cannot localize at zero")
    num = f.numerator()
    _, factors = num.factor_list()
    inverted = list(ring.inverted)
    for factor, _ in factors:
        if factor.is_ground:
            continue
        factor = factor.monic()
        if factor not in inverted:
            inverted.append(factor)
    if len(inverted) == len(ring.inverted):
        return ring
    logger.debug(f"localizing {ring} at {format_base(num)}")
    return PolyRing(ring.variables, inverted, ring.order, ring.relations)

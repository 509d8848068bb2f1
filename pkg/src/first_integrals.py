"""
Rings of first integrals
Degree-bounded kernel search, generator extraction, subalgebra membership and closedness probes
"""

import random
import threading
from fractions import Fraction
from itertools import islice, product
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyElement
from sympy.polys.rings import PolyRing as SympyRing

from src.diffmod import Distribution, OneForm, foliated_d, generic_rank
from src.foliation import RingMorphism, restrict_to_open
from src.logger import get_logger
from src.poly import (
    BlockOrder,
    Ideal,
    Poly,
    PolyRing,
    format_base,
    groebner_basis,
    substitute,
)
from src.verdicts import FAIL, PASS, Verdict


logger = get_logger(__name__)

TAG_PREFIX = "_t"


def tag_names(prefix: str, count: int) -> List[str]:
    """A lone generator is tagged by the bare prefix, several by prefix1, prefix2, ..."""
    if count == 1:
        return [prefix]
    return [f"{prefix}{i}" for i in range(1, count + 1)]


class Membership(NamedTuple):
    member: bool
    expression: Optional[Poly] = None
    text: str = ""


class SubalgebraModel:
    """
    The ideal (t_i - g_i) + J in B[t] under an order eliminating the variables
    of B; an element lies in Q[g] exactly when its normal form involves tags only.
    """

    def __init__(self, ambient: PolyRing, generators: Sequence[Poly]):
        self.ambient = ambient
        self.generators = tuple(generators)
        self.offset = ambient.internal.ngens
        m = len(self.generators)
        symbols = [str(s) for s in ambient.internal.symbols]
        symbols += [f"{TAG_PREFIX}{i}" for i in range(m)]
        self.ring = SympyRing(symbols, QQ, BlockOrder(range(self.offset), range(self.offset, len(symbols))))
        self._gb: Optional[List[PolyElement]] = None
        self._lock = threading.Lock()

    def groebner(self) -> List[PolyElement]:
        with self._lock:
            if self._gb is None:
                tags = self.ring.gens[self.offset:]
                F = [t - g.rep.set_ring(self.ring) for t, g in zip(tags, self.generators)]
                F += [g.set_ring(self.ring) for g in self.ambient.defining_gb]
                self._gb = groebner_basis(F)
        return self._gb

    def express(self, b: Poly) -> Optional[dict]:
        """Exponent map of the tag polynomial p with p(g) = b, or None when b is not in the subalgebra"""
        gb = self.groebner()
        nf = b.rep.set_ring(self.ring)
        if gb:
            nf = nf.rem(gb)
        terms = {}
        for monom, coeff in nf.iterterms():
            if any(monom[: self.offset]):
                return None
            terms[monom[self.offset:]] = coeff
        return terms

    def relations(self) -> List[dict]:
        """Basis elements in the tags only, as exponent dictionaries"""
        out = []
        for g in self.groebner():
            if all(not any(m[: self.offset]) for m in g.itermonoms()):
                out.append({m[self.offset:]: c for m, c in g.iterterms()})
        return out

    def contains(self, b: Poly) -> bool:
        return self.express(b) is not None


class FirstIntegralAlgebra:
    """
    Q[g_1..g_m] inside a chart ring B, with its relation ideal in tag variables.
    """

    def __init__(
        self,
        ambient: PolyRing,
        generators: Sequence,
        names: Optional[Sequence[str]] = None,
        degree_bound: int = 0,
        complete: bool = False,
    ):
        self.ambient = ambient
        self.generators: Tuple[Poly, ...] = tuple(ambient.poly(g) for g in generators)
        m = len(self.generators)
        self.tag_names: Tuple[str, ...] = tuple(names or tag_names("t", m))
        if len(self.tag_names) != m:
            raise ValueError(f"expected {m} tag names, got {len(self.tag_names)}")
        self.tag_ring: Optional[PolyRing] = PolyRing(self.tag_names) if m else None
        self.degree_bound = degree_bound
        self.complete = complete
        self.model = SubalgebraModel(ambient, self.generators)

        if self.tag_ring is not None:
            base = self.tag_ring.base
            self.relations: Optional[Ideal] = Ideal(
                self.tag_ring, [base.from_dict(r) for r in self.model.relations()]
            )
        else:
            self.relations = None

    @property
    def quotient_ring(self) -> Optional[PolyRing]:
        """The tag ring modulo the relation ideal"""
        if self.tag_ring is None:
            return None
        return PolyRing(self.tag_names, relations=self.relations.generators)

    def relation_strings(self) -> List[str]:
        return self.relations.display() if self.relations is not None else []

    def membership(self, b) -> Membership:
        b = self.ambient.poly(b)
        terms = self.model.express(b)
        if terms is None:
            return Membership(False)
        if self.tag_ring is None:
            value = terms.get((), QQ.zero)
            return Membership(True, None, str(self.ambient.constant(value)))
        expression = self.tag_ring.from_base(self.tag_ring.base.from_dict(terms))
        return Membership(True, expression, str(expression))

    def contains(self, b) -> bool:
        return self.model.contains(self.ambient.poly(b))

    def evaluate(self, p: Poly) -> Poly:
        """p(g_1..g_m) for a tag polynomial p"""
        return p.substitute(list(self.generators), self.ambient)

    def to_morphism(self) -> RingMorphism:
        """The embedding A -> B, t_i -> g_i, from the tag ring modulo relations"""
        if self.tag_ring is None:
            raise ValueError("an algebra of constants has no tag ring")
        return RingMorphism(
            self.quotient_ring, self.ambient, dict(zip(self.tag_names, self.generators))
        )

    def transcendence_degree(self) -> int:
        return self.relations.dimension() if self.relations is not None else 0

    def to_dict(self) -> dict:
        return {
            "ring": repr(self.ambient),
            "generators": [str(g) for g in self.generators],
            "tags": list(self.tag_names),
            "relations": self.relation_strings(),
            "degree_bound": self.degree_bound,
            "complete": self.complete,
        }

    def __repr__(self) -> str:
        return f"FirstIntegralAlgebra(Q[{', '.join(str(g) for g in self.generators)}])"


# ---------------------------------------------------------------------------
# Kernel search
# ---------------------------------------------------------------------------

def _candidates(ring: PolyRing, D: int) -> List[Poly]:
    """Monomials of degree <= D times inverse-variable powers <= D, reduced and deduplicated"""
    R = ring.internal
    n, k = ring.nvars, len(ring.inverted)
    seen = {}
    exponents = []
    for total in range(D + 1):
        for combo in product(range(total + 1), repeat=n):
            if sum(combo) == total:
                exponents.append(combo)
    for a in exponents:
        for e in product(range(D + 1), repeat=k):
            p = Poly(ring, R.term_new(tuple(a) + tuple(e), QQ.one))
            if not p.is_zero and p.rep not in seen:
                seen[p.rep] = p
    return list(seen.values())


def _echelon(elements: Sequence[Poly], ring: PolyRing) -> List[Poly]:
    """Reduced row echelon basis of the span, columns by decreasing monomial"""
    R = ring.internal
    monomials = sorted({m for p in elements for m in p.rep.itermonoms()}, key=R.order, reverse=True)
    if not monomials:
        return []
    column = {m: j for j, m in enumerate(monomials)}
    rows = {}
    for i, p in enumerate(elements):
        row = {column[m]: c for m, c in p.rep.iterterms()}
        if row:
            rows[i] = row
    matrix = DomainMatrix(rows, (len(elements), len(monomials)), QQ)
    reduced, pivots = matrix.rref()
    dod = reduced.to_dod()
    basis = []
    for i in range(len(pivots)):
        entries = dod.get(i, {})
        basis.append(Poly(ring, R.from_dict({monomials[j]: c for j, c in entries.items()}), reduced=True))
    return basis


def kernel_space(dist: Distribution, D: int) -> List[Poly]:
    """
    Basis of {f : deg f <= D, d_F f = 0} over the rationals

    On localized rings the search space is numerators of degree <= D times
    inverted elements to powers <= D. The basis is in reduced echelon form
    with pivots on the largest monomials, so it is unique; it contains 1.

    Raises:
        ValueError: if D is negative
    """
    if D < 0:
        raise ValueError("degree bound must be nonnegative")
    ring = dist.ring
    candidates = _candidates(ring, D)
    rows = {}
    keys = {}
    for j, p in enumerate(candidates):
        derivative = foliated_d(p, dist).vector
        for pos, component in enumerate(derivative):
            for monom, coeff in component.iterterms():
                key = keys.setdefault((pos, monom), len(keys))
                rows.setdefault(key, {})[j] = coeff

    ncols = len(candidates)
    if rows:
        matrix = DomainMatrix(rows, (len(keys), ncols), QQ)
        reduced, pivots = matrix.rref()
        dod = reduced.to_dod()
    else:
        pivots, dod = (), {}

    pivot_set = set(pivots)
    kernel = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        element = candidates[free]
        for i, p in enumerate(pivots):
            coeff = dod.get(i, {}).get(free)
            if coeff:
                element = element - candidates[p] * _fraction(coeff)
        kernel.append(element)

    basis = _echelon([k for k in kernel if not k.is_zero], ring)
    logger.debug(f"kernel search at degree {D}: {ncols} candidates, dimension {len(basis)}")
    return basis


def _fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _normalize(p: Poly) -> Poly:
    """Drop the constant term and scale so the smallest term has coefficient 1"""
    p = p - p.constant_term()
    if p.is_zero:
        return p
    _, coeff = p.rep.terms()[-1]
    return p * (Fraction(1) / _fraction(coeff))


def _generator_order(elements: List[Poly]) -> List[Poly]:
    if not elements:
        return []
    R = elements[0].ring.internal
    ordered = sorted(elements, key=lambda p: R.order(p.rep.LM), reverse=True)
    return sorted(ordered, key=lambda p: sum(p.rep.LM))


def compute_algebra(dist: Distribution, D: int, prefix: str = "t") -> FirstIntegralAlgebra:
    """
    Generators and relations of the first integrals found up to degree D

    Kernel elements are taken by increasing degree and kept only when they are
    not already in the subalgebra generated so far; a final pass drops any
    generator the others generate. complete is claimed when the transcendence
    degree equals the corank and degree D + 1 adds nothing new.
    """
    ring = dist.ring
    elements = []
    for p in kernel_space(dist, D):
        q = _normalize(p)
        if not q.is_zero and q not in elements:
            elements.append(q)

    generators: List[Poly] = []
    for b in _generator_order(elements):
        if generators and SubalgebraModel(ring, generators).contains(b):
            continue
        generators.append(b)

    i = 0
    while i < len(generators):
        others = generators[:i] + generators[i + 1:]
        if others and SubalgebraModel(ring, others).contains(generators[i]):
            del generators[i]
        else:
            i += 1

    algebra = FirstIntegralAlgebra(ring, generators, tag_names(prefix, len(generators)), D)
    algebra.complete = (
        algebra.transcendence_degree() == dist.corank
        and all(algebra.contains(b) for b in kernel_space(dist, D + 1))
    )
    logger.info(
        f"first integrals at degree {D}: {[str(g) for g in generators]}, "
        f"relations {algebra.relation_strings()}, complete={algebra.complete}"
    )
    return algebra


def subalgebra_membership(b, alg: FirstIntegralAlgebra) -> Membership:
    """Decide b in Q[g_1..g_m]; on success the tag expression p with p(g) = b"""
    return alg.membership(b)


# ---------------------------------------------------------------------------
# Probes and checks
# ---------------------------------------------------------------------------

def random_element(alg: FirstIntegralAlgebra, rng: random.Random, degree: int) -> Poly:
    """A random element of the algebra: small integer combination of generator monomials"""
    ring = alg.ambient
    value = ring.constant(rng.randint(-3, 3))
    m = len(alg.generators)
    if not m:
        return value
    for _ in range(rng.randint(1, 3)):
        exponents = [0] * m
        for _ in range(rng.randint(1, max(degree, 1))):
            exponents[rng.randrange(m)] += 1
        term = ring.one
        for g, e in zip(alg.generators, exponents):
            term = term * g ** e
        value = value + term * rng.choice((-2, -1, 1, 2))
    return value


PROBE_MODES = ("split", "coefficients", "power")


def _probe_polynomial(alg: FirstIntegralAlgebra, rng: random.Random, dmax: int, R, mode: str) -> PolyElement:
    """
    A monic p(T) over the algebra, lifted to R = B[T]

    split: product of T - a_i; coefficients: random coefficients a_i;
    power: T^k - r^k g^j for a generator g, whose roots are k-th roots of g^j.
    """
    T = R.gens[-1]
    degree = rng.randint(1, max(dmax, 1))
    if mode == "split":
        p = R.one
        for _ in range(degree):
            p *= T - random_element(alg, rng, dmax).rep.set_ring(R)
        return p
    if mode == "coefficients":
        p = T ** (degree + 1)
        for i in range(degree + 1):
            p += random_element(alg, rng, dmax).rep.set_ring(R) * T ** i
        return p
    k = degree + 1
    r = rng.choice((1, -1, 2))
    if not alg.generators:
        return T ** k - R(r ** k)
    g = rng.choice(alg.generators)
    return T ** k - (g ** rng.randint(1, max(dmax, 1))).rep.set_ring(R) * r ** k


def closedness_probe(
    alg: FirstIntegralAlgebra,
    dist: Distribution,
    samples: int = 200,
    dmax: int = 2,
    seed: int = 0,
) -> Verdict:
    """
    Random check that first integrals are algebraically closed in B

    Each sample draws a monic p(T) over the algebra, either split into linear
    factors T - a_i, with random coefficients, or a pure power T^k - c; p is
    factored over the rationals and every root b in B of a linear factor is
    checked: p(b) = 0 and d_F b = 0.
    """
    rng = random.Random(seed)
    ring = alg.ambient
    logger.info(f"closedness probe seed={seed} samples={samples} dmax={dmax}")
    symbols = [str(s) for s in ring.internal.symbols] + ["_T"]
    R = SympyRing(symbols, QQ, grevlex)
    images = [Poly(ring, g) for g in ring.internal.gens]

    roots_checked = 0
    for sample in range(samples):
        mode = PROBE_MODES[sample % len(PROBE_MODES)]
        p = _probe_polynomial(alg, rng, dmax, R, mode)
        _, factors = p.factor_list()
        for factor, _ in factors:
            if factor.degree(len(symbols) - 1) != 1:
                continue
            lead_part = R.zero
            rest = R.zero
            for monom, coeff in factor.iterterms():
                if monom[-1]:
                    lead_part += R.term_new(monom[:-1] + (0,), coeff)
                else:
                    rest += R.term_new(monom, coeff)
            if not lead_part.is_ground:
                continue
            b = Poly(ring, (-rest).set_ring(ring.internal)) * (
                Fraction(1) / _fraction(lead_part.LC)
            )
            is_root = substitute(p, images + [b], ring).is_zero
            roots_checked += 1
            if not is_root or not foliated_d(b, dist).is_zero:
                logger.warning(f"closedness probe failed at sample {sample} (seed {seed})")
                return Verdict(FAIL, {
                    "polynomial": format_base(p),
                    "root": str(b),
                    "seed": seed,
                    "sample": sample,
                    "mode": mode,
                })
    return Verdict(PASS, {"seed": seed, "samples": samples, "roots": roots_checked})


def localization_check(dist: Distribution, f, D: int) -> Verdict:
    """
    First integrals on D(f) against the localization of those on X at f

    Every generator found on D(f) must lie in Q[generators on X, 1/f].

    Raises:
        ValueError: if f is not a first integral
    """
    f = dist.ring.poly(f)
    if not foliated_d(f, dist).is_zero:
        raise ValueError(f"{f} is not a first integral")
    if f.is_constant:
        return Verdict(PASS, {"detail": "constant localizer"})
    whole = compute_algebra(dist, D)
    local = restrict_to_open(dist, f)
    ring = local.ring
    on_open = compute_algebra(local, D)
    localized = [ring.coerce(g) for g in whole.generators] + [ring.inverse(ring.coerce(f))]
    model = SubalgebraModel(ring, localized)
    for h in on_open.generators:
        if not model.contains(h):
            logger.warning(f"{h} on D({f}) is not in the localized algebra")
            return Verdict(FAIL, {"element": str(h), "localizer": str(f)})
    return Verdict(PASS, {"localizer": str(f), "generators": [str(h) for h in on_open.generators]})


def exactness_check(alg: FirstIntegralAlgebra, dist: Distribution, D: int) -> Verdict:
    """kernel_space(D) lies in the subalgebra generated by the algebra's generators"""
    for b in kernel_space(dist, D):
        if not alg.contains(b):
            return Verdict(FAIL, {"element": str(b), "degree_bound": D})
    return Verdict(PASS, {"degree_bound": D})


def integrability_check(dist: Distribution, alg: FirstIntegralAlgebra) -> Verdict:
    """
    Algebraic integrability: every generator is a first integral and the
    differentials of the generators have generic rank equal to the corank.
    """
    for g in alg.generators:
        if not foliated_d(g, dist).is_zero:
            return Verdict(FAIL, {"element": str(g), "reason": "not a first integral"})
    ring = dist.ring
    rows = [OneForm.d(g) for g in alg.generators]
    rank = generic_rank([[w.coefficient(v) for v in ring.variables] for w in rows], ring.nvars)
    if rank != dist.corank:
        return Verdict(FAIL, {"differential_rank": rank, "corank": dist.corank})
    return Verdict(PASS, {"differential_rank": rank})


def small_rationals() -> Iterator[Fraction]:
    """0, 1, -1, 2, -2, 1/2, -1/2, 3, -3, 1/3, ... by increasing height"""
    yield Fraction(0)
    height = 1
    while True:
        for q in range(1, height + 1):
            for p in (height,) if q < height else range(1, height + 1):
                value = Fraction(p, q)
                if value.numerator == p and value.denominator == q:
                    yield value
                    yield -value
        height += 1


def evaluate_at(p: Poly, values: Sequence[Fraction]) -> Fraction:
    """Value of a polynomial without inverted elements at a rational point"""
    total = Fraction(0)
    for monom, coeff in p.rep.iterterms():
        term = _fraction(coeff)
        for v, e in zip(values, monom):
            term *= v ** e
        total += term
    return total


def rational_points(alg: FirstIntegralAlgebra, count: int, limit: int = 2000) -> List[Tuple[Fraction, ...]]:
    """
    Deterministic small-height rational points of the tag space with nonempty fibre

    Candidates are ordered by the sum of their height indices; points off the
    relation variety or with empty fibres are skipped.
    """
    m = len(alg.generators)
    if not m:
        return []
    values = list(islice(small_rationals(), 40))
    relations = alg.relations.generators if alg.relations is not None else ()
    points = []
    examined = 0
    for total in range(len(values) * m):
        for index in product(range(min(total + 1, len(values))), repeat=m):
            if sum(index) != total:
                continue
            examined += 1
            if examined > limit or len(points) >= count:
                return points
            point = tuple(values[i] for i in index)
            if any(evaluate_at(r, point) != 0 for r in relations):
                continue
            fibre = Ideal(alg.ambient, [g - c for g, c in zip(alg.generators, point)])
            if fibre.is_unit():
                continue
            points.append(point)
    return points


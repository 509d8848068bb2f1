"""
Groebner bases for submodules of free modules
Position-over-term reduction, syzygies and membership over the internal ring of a PolyRing
"""

from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy.polys.rings import PolyElement

from src.logger import get_logger


logger = get_logger(__name__)

Vector = Tuple[PolyElement, ...]


def zero_vector(R, rank: int) -> Vector:
    return tuple(R.zero for _ in range(rank))


def is_zero(v: Vector) -> bool:
    return not any(v)


def lead(v: Vector) -> Optional[Tuple[int, tuple, object]]:
    """Leading (position, monomial, coefficient); higher positions dominate"""
    for pos in range(len(v) - 1, -1, -1):
        if v[pos]:
            monom, coeff = v[pos].LT
            return pos, monom, coeff
    return None


def lead_key(v: Vector, R) -> tuple:
    pos, monom, _ = lead(v)
    return pos, R.order(monom)


def mul_term(v: Vector, monom: tuple, coeff) -> Vector:
    return tuple(c.mul_term((monom, coeff)) if c else c for c in v)


def sub(v: Vector, w: Vector) -> Vector:
    return tuple(a - b for a, b in zip(v, w))


def monic(v: Vector) -> Vector:
    _, _, coeff = lead(v)
    inv = v[0].ring.domain.one / coeff
    return tuple(c.mul_ground(inv) if c else c for c in v)


def degree(v: Vector) -> int:
    return max((sum(m) for c in v for m in c.itermonoms()), default=-1)


def reduce_vector(v: Vector, G: Sequence[Vector]) -> Vector:
    """
    Full reduction of v by the module basis G

    Returns:
        The remainder; zero exactly when v lies in the module if G is a
        Groebner basis
    """
    if not G or is_zero(v):
        return v
    R = v[0].ring
    leads = [lead(g) for g in G]
    work = list(v)
    rest = [R.zero for _ in v]
    while any(work):
        pos = max(i for i, c in enumerate(work) if c)
        monom, coeff = work[pos].LT
        for g, (gpos, gmonom, gcoeff) in zip(G, leads):
            if gpos != pos:
                continue
            quotient = R.monomial_div(monom, gmonom)
            if quotient is None:
                continue
            factor = coeff / gcoeff
            for i, c in enumerate(g):
                if c:
                    work[i] = work[i] - c.mul_term((quotient, factor))
            break
        else:
            term = R.term_new(monom, coeff)
            rest[pos] = rest[pos] + term
            work[pos] = work[pos] - term
    return tuple(rest)


def s_vector(f: Vector, g: Vector) -> Vector:
    R = f[0].ring
    _, fm, fc = lead(f)
    _, gm, gc = lead(g)
    lcm = R.monomial_lcm(fm, gm)
    one = R.domain.one
    return sub(
        mul_term(f, R.monomial_div(lcm, fm), one / fc),
        mul_term(g, R.monomial_div(lcm, gm), one / gc),
    )


def _is_pure(v: Vector) -> bool:
    return sum(1 for c in v if c) == 1


def module_groebner(
    vectors: Iterable[Vector], rank: int, R, base_gb: Sequence[PolyElement] = ()
) -> List[Vector]:
    """
    Reduced Groebner basis of the submodule of (R / base)^rank generated by vectors

    Args:
        vectors: Generators, tuples of length rank over the sympy ring R
        rank: Rank of the free module
        R: Sympy polynomial ring carrying the monomial order
        base_gb: Groebner basis of the ideal the coefficients are taken modulo

    Returns:
        Monic reduced basis sorted by leading (position, monomial)
    """
    generators = [tuple(v) for v in vectors if not is_zero(v)]
    for g in base_gb:
        for pos in range(rank):
            unit = [R.zero] * rank
            unit[pos] = g
            generators.append(tuple(unit))

    G: List[Vector] = []
    pairs: List[Tuple[int, int]] = []

    def add(v: Vector) -> None:
        v = monic(v)
        vpos = lead(v)[0]
        for i, g in enumerate(G):
            if lead(g)[0] == vpos:
                pairs.append((i, len(G)))
        G.append(v)

    for v in generators:
        r = reduce_vector(v, G)
        if not is_zero(r):
            add(r)

    while pairs:
        pairs.sort(
            key=lambda p: (
                R.order(R.monomial_lcm(lead(G[p[0]])[1], lead(G[p[1]])[1])),
                p,
            )
        )
        i, j = pairs.pop(0)
        f, g = G[i], G[j]
        fm, gm = lead(f)[1], lead(g)[1]
        # product criterion, valid for single-component vectors
        if _is_pure(f) and _is_pure(g) and R.monomial_mul(fm, gm) == R.monomial_lcm(fm, gm):
            continue
        r = reduce_vector(s_vector(f, g), G)
        if not is_zero(r):
            add(r)

    # minimalize
    G.sort(key=lambda v: lead_key(v, R))
    minimal: List[Vector] = []
    for v in G:
        pos, monom, _ = lead(v)
        if all(lead(m)[0] != pos or R.monomial_div(monom, lead(m)[1]) is None for m in minimal):
            minimal.append(v)

    # interreduce
    reduced = []
    for i, v in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        reduced.append(monic(reduce_vector(v, others)))
    reduced.sort(key=lambda v: lead_key(v, R))
    logger.debug(f"module Groebner basis: {len(generators)} generators -> {len(reduced)} elements")
    return reduced


def contains(G: Sequence[Vector], v: Vector) -> bool:
    return is_zero(reduce_vector(v, G))


def syzygies(
    columns: Sequence[Vector], R, base_gb: Sequence[PolyElement] = ()
) -> List[Vector]:
    """
    Generators of {a : sum_j a_j * columns[j] = 0 in (R / base)^k}

    Each column is tagged with its unit vector and the tagged vectors are
    reduced with the column block in the highest positions; basis elements
    whose column block vanishes generate the syzygy module.
    """
    m = len(columns)
    if m == 0:
        return []
    k = len(columns[0])
    tagged = []
    for j, col in enumerate(columns):
        unit = [R.zero] * m
        unit[j] = R.one
        tagged.append(tuple(unit) + tuple(col))
    G = module_groebner(tagged, m + k, R, base_gb)
    syz = [g[:m] for g in G if is_zero(g[m:])]
    logger.debug(f"syzygies of {m} columns: {len(syz)} generators")
    return syz


def primitive(v: Vector) -> Vector:
    """Scale v to integer coefficients with gcd 1 and a positive leading coefficient"""
    if is_zero(v):
        return v
    coeffs = [c for comp in v for c in comp.coeffs()]
    den = 1
    for c in coeffs:
        d = int(c.denominator)
        den = den * d // gcd(den, d)
    num = 0
    for c in coeffs:
        num = gcd(num, int(c.numerator) * den // int(c.denominator))
    _, _, lc = lead(v)
    sign = -1 if lc < 0 else 1
    R = v[0].ring
    factor = R.domain.convert(sign * den) / R.domain.convert(num)
    return tuple(c.mul_ground(factor) if c else c for c in v)


def minimal_generators(
    vectors: Sequence[Vector], rank: int, R, base_gb: Sequence[PolyElement] = ()
) -> List[Vector]:
    """
    Greedy minimal generating set: candidates by increasing degree, each kept
    only if it is not in the module spanned by the ones kept before it.
    """
    candidates = sorted(
        (v for v in vectors if not is_zero(v)),
        key=lambda v: (degree(v), lead_key(v, R)),
    )
    kept: List[Vector] = []
    basis: List[Vector] = module_groebner([], rank, R, base_gb) if base_gb else []
    for v in candidates:
        if basis and contains(basis, v):
            continue
        kept.append(v)
        basis = module_groebner(kept, rank, R, base_gb)
    return kept

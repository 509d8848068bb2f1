"""
Stability certificates
Smoothness, relative dimension and connected-fibre checks for a chart mapping to its first integrals
"""

from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from src.diffmod import (
    Distribution,
    OneForm,
    generic_rank,
    saturate_torsion,
)
from src.first_integrals import (
    FirstIntegralAlgebra,
    SubalgebraModel,
    compute_algebra,
    kernel_space,
    _generator_order,
    _normalize,
)
from src.foliation import RingMorphism, is_invariant, restrict_to_open
from src.logger import get_logger
from src.poly import Ideal, Poly, PolyRing, eliminate
from src.verdicts import NO, REFUTED, UNKNOWN, VERIFIED, YES, Verdict


logger = get_logger(__name__)

TRUSTED_THEORY = [
    "flatness is subsumed by the smoothness certificate",
    "universal openness follows from flatness and finite presentation",
    "categorical universality follows from being a geometric quotient",
]


def determinant(matrix: Sequence[Sequence[Poly]], ring: PolyRing) -> Poly:
    """Cofactor expansion along the first row"""
    size = len(matrix)
    if size == 0:
        return ring.one
    if size == 1:
        return matrix[0][0]
    total = ring.zero
    for j, entry in enumerate(matrix[0]):
        if entry.is_zero:
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = entry * determinant(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def fitting_ideal(rows: Sequence[Sequence[Poly]], ring: PolyRing, j: int) -> Ideal:
    """
    Fitt_j of the module presented as the free module on the columns modulo the
    rows: the ideal of (n - j)-minors, the unit ideal when n - j <= 0 and the
    zero ideal when there are fewer rows than n - j.
    """
    n = ring.nvars
    size = n - j
    if size <= 0:
        return Ideal(ring, [ring.one])
    rows = [list(r) for r in rows]
    if size > len(rows):
        return Ideal(ring, [])
    minors = []
    for row_choice in combinations(range(len(rows)), size):
        for col_choice in combinations(range(n), size):
            sub = [[rows[r][c] for c in col_choice] for r in row_choice]
            value = determinant(sub, ring)
            if not value.is_zero and value not in minors:
                minors.append(value)
    return Ideal(ring, minors)


def _rows(forms: Sequence[OneForm]) -> List[List[Poly]]:
    return [[w.coefficient(v) for v in w.ring.variables] for w in forms]


def _witness_ideal(ideal: Ideal) -> List[str]:
    return sorted(ideal.display())


def distribution_freeness(dist: Distribution) -> Verdict:
    """
    F is locally free of rank r: Fitt_{r-1}(F) = 0 and Fitt_r(F) = (1); a proper
    Fitt_r is the locus where freeness fails.
    """
    rows = _rows(dist.relations + dist.ambient)
    r = dist.rank
    if not fitting_ideal(rows, dist.ring, r - 1).is_zero() and r > 0:
        return Verdict(REFUTED, {"fitting_index": r - 1, "reason": "rank drops generically"})
    top = fitting_ideal(rows, dist.ring, r)
    if top.is_unit():
        return Verdict(VERIFIED)
    return Verdict(REFUTED, {"fitting_index": r, "ideal": _witness_ideal(top)})


def _relative_check(target: PolyRing, images: Sequence[Poly], r: int) -> Tuple[Verdict, Verdict]:
    n = target.nvars
    forms = [OneForm.d(g) for g in images] + [OneForm.d(target.from_base(q)) for q in target.relations]
    rows = _rows(forms)
    relative = n - generic_rank(rows, n)
    if relative == r:
        dimension = Verdict(VERIFIED, {"computed": relative, "expected": r})
    else:
        dimension = Verdict(REFUTED, {"computed": relative, "expected": r})

    if target.relations:
        return Verdict(UNKNOWN, detail="ambient has relations; Jacobian criterion not certified"), dimension
    if not fitting_ideal(rows, target, r - 1).is_zero():
        return Verdict(REFUTED, {"fitting_index": r - 1, "reason": "relative rank too small"}), dimension
    top = fitting_ideal(rows, target, r)
    if top.is_unit():
        return Verdict(VERIFIED, detail="differentials of the chart map free of rank r"), dimension
    return Verdict(REFUTED, {"fitting_index": r, "ideal": _witness_ideal(top)}), dimension


def check_smooth_and_dimension(phi: RingMorphism, r: int) -> Tuple[Verdict, Verdict]:
    """
    Smoothness and relative dimension of A -> B from Fitting ideals of the
    relative differentials Omega_{B/A}

    Args:
        phi: The chart map A -> B
        r: Rank of the distribution on the chart

    Returns:
        (smooth, relative_dimension) verdicts
    """
    images = [phi.images[v] for v in phi.source.variables]
    return _relative_check(phi.target, images, r)


def _minimal_polynomial(b: Poly, alg: FirstIntegralAlgebra, max_degree: int) -> Optional[str]:
    """Relation of least positive degree in b over the generators of alg, tags named as in alg"""
    ring = alg.ambient
    names = list(ring.variables)
    tags = list(alg.tag_names) + ["b"]
    while any(t in names for t in tags):
        tags = [t + "_" for t in tags]
    joint = PolyRing(names + tags, ring.inverted, ring.order, ring.relations)
    lifted = [Poly(joint, g.rep.set_ring(joint.internal)) for g in alg.generators + (b,)]
    ideal = Ideal(joint, [joint.var(t) - g for t, g in zip(tags, lifted)])
    best = None
    for rel in eliminate(ideal, tags).basis():
        degree = max(m[-1] for m in rel.rep.itermonoms())
        if 0 < degree <= max_degree and (best is None or degree < best[0]):
            best = (degree, rel)
    return str(best[1]) if best else None


def connected_fibres_probe(phi: RingMorphism, alg: FirstIntegralAlgebra, d_alg: int = 3) -> Verdict:
    """
    Search for elements of B outside A that are algebraic over A

    Such elements have d b in the saturation of the span of d(A), so they are
    first integrals of the relative distribution; any found outside A refutes
    connectedness. Without one, the probe verifies when dim A equals the rank
    of the differentials of A.
    """
    return _fibre_probe(phi.target, [phi.images[v] for v in phi.source.variables], alg, d_alg)


def _fibre_probe(target: PolyRing, images: Sequence[Poly], alg: FirstIntegralAlgebra, d_alg: int) -> Verdict:
    relative = saturate_torsion(Distribution(target, [OneForm.d(g) for g in images]))
    model = SubalgebraModel(target, images)
    elements = [_normalize(e) for e in kernel_space(relative, d_alg)]
    for b in _generator_order([e for e in elements if not e.is_zero]):
        if model.contains(b):
            continue
        minimal = _minimal_polynomial(b, alg, d_alg)
        if minimal is None:
            continue
        logger.warning(f"{b} is algebraic over the first integrals but not one of them")
        return Verdict(REFUTED, {"element": str(b), "minimal_polynomial": minimal})

    dim = alg.transcendence_degree()
    rank = generic_rank(_rows([OneForm.d(g) for g in images]), target.nvars)
    if dim == rank:
        return Verdict(VERIFIED, {"d_alg": d_alg}, detail="no algebraic element outside A up to the bound")
    return Verdict(UNKNOWN, {"d_alg": d_alg, "dimension": dim, "rank": rank})


class StabilityCertificate:
    """Verdicts on smoothness, relative dimension and connected fibres of one chart"""

    def __init__(
        self,
        chart_id: str,
        smooth: Verdict,
        relative_dimension: Verdict,
        connected_fibres: Verdict,
        invariant: Verdict,
    ):
        self.chart_id = chart_id
        self.smooth = smooth
        self.relative_dimension = relative_dimension
        self.connected_fibres = connected_fibres
        self.invariant = invariant
        self.trusted = list(TRUSTED_THEORY)

    @property
    def overall(self) -> str:
        checks = (self.smooth, self.relative_dimension, self.connected_fibres)
        if all(v.status == VERIFIED for v in checks) and self.invariant.ok:
            return VERIFIED
        if any(v.status == REFUTED for v in checks) or self.invariant.status == NO:
            return REFUTED
        return UNKNOWN

    @property
    def verified(self) -> bool:
        return self.overall == VERIFIED

    def to_dict(self) -> Dict[str, object]:
        return {
            "chart": self.chart_id,
            "smooth": self.smooth.to_dict(),
            "relative_dimension": self.relative_dimension.to_dict(),
            "connected_fibres": self.connected_fibres.to_dict(),
            "invariant": self.invariant.to_dict(),
            "overall": self.overall,
            "trusted": self.trusted,
        }

    def __repr__(self) -> str:
        return f"StabilityCertificate({self.chart_id}: {self.overall})"


def certify_chart(
    chart_id: str,
    dist: Distribution,
    alg: FirstIntegralAlgebra,
    d_alg: int = 3,
) -> StabilityCertificate:
    """
    Certify that the chart maps to its first integrals as a geometric quotient

    The distribution must be free of its rank on the chart; otherwise smoothness
    is refuted with the non-free locus as witness.
    """
    dist = saturate_torsion(dist)
    images = list(alg.generators)
    if alg.tag_ring is not None:
        invariant = is_invariant(alg.to_morphism(), dist)
    else:
        invariant = Verdict(YES, detail="algebra of constants")

    smooth, dimension = _relative_check(dist.ring, images, dist.rank)
    freeness = distribution_freeness(dist)
    if freeness.status == REFUTED:
        smooth = freeness
    connected = _fibre_probe(dist.ring, images, alg, d_alg)

    certificate = StabilityCertificate(chart_id, smooth, dimension, connected, invariant)
    logger.info(f"chart {chart_id}: {certificate.overall}")
    return certificate


def search_stable_chart(
    dist: Distribution,
    candidates: Sequence,
    D: int = 4,
    d_alg: int = 3,
) -> Optional[Tuple[Poly, StabilityCertificate]]:
    """First candidate denominator f whose chart D(f) certifies as stable"""
    for f in candidates:
        f = dist.ring.poly(f)
        if f.is_zero:
            continue
        local = restrict_to_open(dist, f)
        alg = compute_algebra(saturate_torsion(local), D)
        certificate = certify_chart(f"D({f})", local, alg, d_alg)
        if certificate.verified:
            return f, certificate
    return None


__all__ = [
    "StabilityCertificate",
    "certify_chart",
    "check_smooth_and_dimension",
    "connected_fibres_probe",
    "determinant",
    "distribution_freeness",
    "fitting_ideal",
    "search_stable_chart",
]

"""
Glued quotients
Overlap algebras, transition maps, cocycle and separatedness checks, classification and leaf fibres
"""

import logging
from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyRing as SympyRing
from tenacity import Retrying, before_sleep_log, retry_if_exception_type, stop_after_attempt

from src import modules
from src.diffmod import Distribution, OneForm, saturate_torsion
from src.first_integrals import (
    FirstIntegralAlgebra,
    SubalgebraModel,
    compute_algebra,
    exactness_check,
)
from src.foliation import MalformedMorphismError, RingMorphism, is_invariant, restrict_to_open
from src.logger import get_logger
from src.poly import Ideal, NotAUnitError, Poly, PolyRing, localize, substitute
from src.stability import StabilityCertificate, fitting_ideal
from src.verdicts import NO, YES, Verdict


logger = get_logger(__name__)

CHART_PREFIXES = "uvwrs"


class RecognitionError(RuntimeError):
    """Raised when an overlap algebra is not recognized as a localization of a chart algebra"""


class CocycleError(RuntimeError):
    """Raised when transition maps disagree on a triple overlap"""

    def __init__(self, message: str, triple: Tuple[str, str, str], atlas: Optional["Atlas"] = None):
        super().__init__(message)
        self.triple = triple
        self.atlas = atlas


class BoundExhaustedError(RuntimeError):
    """Raised when degree escalation runs out before recognition succeeds"""


class ChartNotCertifiedError(ValueError):
    """Raised when gluing is attempted with a chart whose certificate is not verified"""


def chart_prefix(index: int) -> str:
    if index < len(CHART_PREFIXES):
        return CHART_PREFIXES[index]
    return f"c{index}_"


class Chart:
    """A distinguished open D(f) with its first integrals and stability certificate"""

    def __init__(
        self,
        chart_id: str,
        denominator: Poly,
        distribution: Distribution,
        algebra: FirstIntegralAlgebra,
        certificate: StabilityCertificate,
    ):
        self.id = chart_id
        self.denominator = denominator
        self.distribution = distribution
        self.algebra = algebra
        self.certificate = certificate

    @property
    def ring(self) -> PolyRing:
        return self.distribution.ring

    def generators_in(self, ring: PolyRing) -> List[Poly]:
        return [ring.coerce(g) for g in self.algebra.generators]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "denominator": str(self.denominator),
            "algebra": self.algebra.to_dict(),
            "certificate": self.certificate.to_dict(),
        }

    def __repr__(self) -> str:
        return f"Chart({self.id}, D({self.denominator}))"


class TransitionMap:
    """
    Gluing data for an ordered pair (i, j): the overlap algebra, the localizers
    h_i and h_j with (A_i)_{h_i} = A_ij = (A_j)_{h_j}, and the isomorphism from
    the localized tag ring of j to that of i.
    """

    def __init__(
        self,
        source: str,
        target: str,
        ring: PolyRing,
        overlap_algebra: Optional[FirstIntegralAlgebra],
        localizer_source: Poly,
        localizer_target: Poly,
        iso: RingMorphism,
        coordinates: Dict[str, Poly],
    ):
        self.source = source
        self.target = target
        self.ring = ring
        self.overlap_algebra = overlap_algebra
        self.localizer_source = localizer_source
        self.localizer_target = localizer_target
        self.iso = iso
        self.coordinates = coordinates

    @property
    def source_ring(self) -> PolyRing:
        return self.iso.target

    @property
    def target_ring(self) -> PolyRing:
        return self.iso.source

    def to_dict(self) -> dict:
        return {
            "from": self.source,
            "to": self.target,
            "overlap_generators": [
                str(g) for g in (self.overlap_algebra.generators if self.overlap_algebra else ())
            ],
            "localizer_from": str(self.localizer_source),
            "localizer_to": str(self.localizer_target),
            "images": self.iso.to_dict(),
        }

    def __repr__(self) -> str:
        return f"TransitionMap({self.source} -> {self.target}: {self.iso})"


class Atlas:
    """Certified charts glued along their overlaps"""

    def __init__(self, charts: Sequence[Chart]):
        self.charts = list(charts)
        self.transitions: Dict[Tuple[str, str], TransitionMap] = {}
        self.disjoint: List[Tuple[str, str]] = []
        self.cocycle_ok = True
        self.cocycle_witness: Optional[dict] = None
        self.separated = Verdict(YES)
        self.classification = "unclassified"
        self.chart_checks: Dict[str, Dict[str, Verdict]] = {}

    def chart(self, chart_id: str) -> Chart:
        for c in self.charts:
            if c.id == chart_id:
                return c
        raise KeyError(f"no chart {chart_id!r}")

    def to_dict(self) -> dict:
        return {
            "charts": [c.to_dict() for c in self.charts],
            "transitions": [
                t.to_dict() for key, t in sorted(self.transitions.items()) if key[0] != key[1]
            ],
            "disjoint": [list(pair) for pair in self.disjoint],
            "chart_checks": {
                cid: {name: v.to_dict() for name, v in checks.items()}
                for cid, checks in self.chart_checks.items()
            },
            "cocycle_ok": self.cocycle_ok,
            "cocycle_witness": self.cocycle_witness,
            "separated": self.separated.to_dict(),
            "classification": self.classification,
        }


# ---------------------------------------------------------------------------
# Overlaps
# ---------------------------------------------------------------------------

def _tag_monomials(ring: PolyRing, degree: int) -> List[Poly]:
    """Monomials in the tags by increasing degree, larger first within a degree"""
    R = ring.internal
    n = ring.nvars
    monomials = []
    for total in range(degree + 1):
        layer = []
        for combo in _compositions(total, n):
            layer.append(Poly(ring, R.term_new(combo, QQ.one), reduced=True))
        layer.sort(key=lambda p: R.order(p.rep.LM), reverse=True)
        monomials.extend(layer)
    return monomials


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _express(model: SubalgebraModel, b: Poly, images: Sequence[Poly], target: PolyRing) -> Optional[Poly]:
    """b written in the model's generators, mapped through images into target"""
    terms = model.express(b)
    if terms is None:
        return None
    symbols = [f"_s{k}" for k in range(len(images))]
    R = SympyRing(symbols, QQ, grevlex)
    return substitute(R.from_dict(terms), images, target)


class _Side:
    """One chart's view of an overlap: localizer, localized tag ring and membership model"""

    def __init__(self, chart: Chart, ring: PolyRing, localizer: Poly, model: SubalgebraModel):
        self.chart = chart
        self.localizer = localizer
        self.model = model
        quotient = chart.algebra.quotient_ring
        self.tags = localize(quotient, quotient.poly(localizer))
        images = self.tags.gens()
        if not localizer.is_constant:
            images.append(self.tags.inverse(self.tags.poly(localizer)))
        self.images = images

    def express(self, b: Poly) -> Optional[Poly]:
        return _express(self.model, b, self.images, self.tags)


def _recognize(chart: Chart, overlap: FirstIntegralAlgebra, ring: PolyRing, degree: int) -> _Side:
    """
    Find h in A_i with (A_i)_h = A_ij, checked by membership in both directions

    Raises:
        RecognitionError: no monomial in the chart generators up to degree works
    """
    generators = chart.generators_in(ring)
    for g in generators:
        if not overlap.contains(g):
            raise RecognitionError(f"{g} from chart {chart.id} is not a first integral found on the overlap")

    for candidate in _tag_monomials(chart.algebra.tag_ring, degree):
        h = ring.coerce(chart.algebra.evaluate(candidate))
        try:
            inverse = ring.inverse(h)
        except NotAUnitError:
            continue
        extra = [] if candidate.is_constant else [inverse]
        model = SubalgebraModel(ring, generators + extra)
        if all(model.contains(a) for a in overlap.generators):
            logger.debug(f"chart {chart.id}: overlap is the localization at {candidate}")
            return _Side(chart, ring, candidate, model)
    raise RecognitionError(
        f"overlap algebra {[str(a) for a in overlap.generators]} is not a localization "
        f"of chart {chart.id} at any monomial of degree <= {degree}"
    )


def _identity(chart: Chart) -> TransitionMap:
    ring = chart.algebra.quotient_ring
    one = chart.algebra.tag_ring.one
    iso = RingMorphism(ring, ring, {t: ring.var(t) for t in ring.variables})
    return TransitionMap(chart.id, chart.id, chart.ring, chart.algebra, one, one, iso, {})


def _transition(left: _Side, right: _Side, ring: PolyRing, overlap: FirstIntegralAlgebra) -> TransitionMap:
    images = {}
    for tag, g in zip(right.chart.algebra.tag_names, right.chart.generators_in(ring)):
        expression = left.express(g)
        if expression is None:
            raise RecognitionError(f"generator {g} of chart {right.chart.id} not expressible on chart {left.chart.id}")
        images[tag] = expression
    iso = RingMorphism(right.tags, left.tags, images)
    coordinates = {str(a): left.express(a) for a in overlap.generators}
    return TransitionMap(
        left.chart.id, right.chart.id, ring, overlap, left.localizer, right.localizer, iso, coordinates
    )


def _overlap_pair(
    ci: Chart, cj: Chart, D: int, localizer_degree: int, escalations: int
) -> Optional[Tuple[TransitionMap, TransitionMap]]:
    ring = localize(ci.ring, ci.ring.coerce(cj.denominator))
    if ring.is_trivial():
        logger.info(f"charts {ci.id} and {cj.id} are disjoint")
        return None
    dist = saturate_torsion(restrict_to_open(ci.distribution, cj.denominator))

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(escalations + 1),
            retry=retry_if_exception_type(RecognitionError),
            before_sleep=before_sleep_log(logger, logging.WARNING),
            reraise=True,
        ):
            with attempt:
                degree = D + attempt.retry_state.attempt_number - 1
                overlap = compute_algebra(dist, degree)
                left = _recognize(ci, overlap, ring, localizer_degree)
                right = _recognize(cj, overlap, ring, localizer_degree)
                forward = _transition(left, right, ring, overlap)
                backward = _transition(right, left, ring, overlap)
    except RecognitionError as e:
        raise BoundExhaustedError(
            f"overlap of {ci.id} and {cj.id} not recognized up to degree {D + escalations}: {e}"
        ) from e
    return forward, backward


def overlap(
    ci: Chart, cj: Chart, D: int, localizer_degree: int = 2, escalations: int = 0
) -> Optional[TransitionMap]:
    """
    Transition data for the ordered pair (i, j), or None when D(f_i f_j) is empty

    Raises:
        BoundExhaustedError: the overlap algebra was not recognized as a
            localization of both chart algebras within the searched bounds
    """
    if ci.id == cj.id:
        return _identity(ci)
    pair = _overlap_pair(ci, cj, D, localizer_degree, escalations)
    return pair[0] if pair else None


# ---------------------------------------------------------------------------
# Cocycle conditions
# ---------------------------------------------------------------------------

def _coherent(forward: TransitionMap, backward: TransitionMap) -> bool:
    """iso(i<-j) o iso(j<-i) is the identity on the tags of i"""
    try:
        round_trip = forward.iso.compose(backward.iso)
    except MalformedMorphismError:
        return False
    ring = round_trip.source
    return all(round_trip.images[t] == round_trip.target.poly(ring.var(t)) for t in ring.variables)


def _evaluation(chart: Chart, tags: PolyRing, target: PolyRing) -> RingMorphism:
    """Tag ring of a chart, localized on an overlap, evaluated back into functions on target"""
    return RingMorphism(tags, target, dict(zip(chart.algebra.tag_names, chart.generators_in(target))))


def _check_triple(atlas: Atlas, i: Chart, j: Chart, k: Chart) -> Optional[str]:
    t_ij = atlas.transitions.get((i.id, j.id))
    t_jk = atlas.transitions.get((j.id, k.id))
    t_ik = atlas.transitions.get((i.id, k.id))
    if t_ij is None or t_jk is None or t_ik is None:
        return None
    ring = localize(t_ij.ring, t_ij.ring.coerce(k.denominator))
    if ring.is_trivial():
        return None
    try:
        ev_i_ij = _evaluation(i, t_ij.source_ring, ring)
        ev_i_ik = _evaluation(i, t_ik.source_ring, ring)
        through_j = RingMorphism(
            t_jk.source_ring, ring,
            {t: ev_i_ij.apply(img) for t, img in t_ij.iso.images.items()},
        )
    except MalformedMorphismError as e:
        return f"transition does not extend over the triple overlap: {e}"

    for tag, g in zip(k.algebra.tag_names, k.generators_in(ring)):
        direct = ev_i_ik.apply(t_ik.iso.images[tag])
        chained = through_j.apply(t_jk.iso.images[tag])
        if not (direct == chained == g):
            return f"{tag}: direct {direct}, through {j.id} {chained}, actual {g}"

    a = ev_i_ik.apply(t_ik.source_ring.poly(t_ik.localizer_source))
    b = through_j.apply(t_jk.source_ring.poly(t_jk.localizer_source))
    try:
        inv_a, inv_b = ring.inverse(a), ring.inverse(b)
    except NotAUnitError:
        return "localizers are not units on the triple overlap"
    base = i.generators_in(ring)
    h_ij = ev_i_ij.apply(t_ij.source_ring.poly(t_ij.localizer_source))
    base = base + [ring.inverse(h_ij)]
    if not SubalgebraModel(ring, base + [inv_a]).contains(inv_b):
        return "open sets differ: second localizer not invertible on the first"
    if not SubalgebraModel(ring, base + [inv_b]).contains(inv_a):
        return "open sets differ: first localizer not invertible on the second"
    return None


def separatedness_check(atlas: Atlas) -> Verdict:
    """
    A gluing is separated when every A_ij is generated by the images of A_i and A_j
    """
    for (a, b), t in sorted(atlas.transitions.items()):
        if a >= b or t.overlap_algebra is None:
            continue
        ci, cj = atlas.chart(a), atlas.chart(b)
        joint = SubalgebraModel(t.ring, ci.generators_in(t.ring) + cj.generators_in(t.ring))
        for g in t.overlap_algebra.generators:
            if not joint.contains(g):
                logger.info(f"charts {a} and {b}: {g} is not in the joint image")
                return Verdict(NO, {
                    "pair": [a, b],
                    "element": str(g),
                    "expression": str(t.coordinates.get(str(g), "")),
                })
    return Verdict(YES)


def classify(atlas: Atlas) -> str:
    """Name the glued space when it matches a small library of shapes"""
    charts = atlas.charts
    if len(charts) == 1:
        alg = charts[0].algebra
        if alg.relations is not None and not alg.relations.is_zero():
            return "unclassified"
        m = len(alg.generators)
        return {0: "point", 1: "affine line", 2: "affine plane"}.get(m, f"affine {m}-space")

    if len(charts) == 2:
        first, second = charts
        free = all(
            len(c.algebra.generators) == 1 and c.algebra.relations.is_zero() for c in charts
        )
        t = atlas.transitions.get((first.id, second.id))
        if not free or t is None:
            return "unclassified"
        image = t.iso.images[second.algebra.tag_names[0]]
        u = t.source_ring.var(first.algebra.tag_names[0])
        if atlas.separated.status == YES:
            product = image * u
            if product.is_constant and not product.is_zero:
                return "projective line"
        else:
            _, exponents = image.fraction()
            if not any(exponents) and image.degree() == 1:
                return "line with doubled origin"
    return "unclassified"


def build_atlas(
    charts: Sequence[Chart],
    D: int,
    localizer_degree: int = 2,
    escalations: int = 0,
) -> Atlas:
    """
    Glue certified charts and verify the gluing

    Raises:
        ChartNotCertifiedError: a chart is not certified
        BoundExhaustedError: an overlap could not be recognized
        CocycleError: transitions disagree on a triple overlap
    """
    for c in charts:
        if not c.certificate.verified:
            raise ChartNotCertifiedError(f"chart {c.id} is not certified ({c.certificate.overall})")

    atlas = Atlas(charts)
    for c in charts:
        atlas.transitions[(c.id, c.id)] = _identity(c)
        atlas.chart_checks[c.id] = {
            "invariant": is_invariant(c.algebra.to_morphism(), saturate_torsion(c.distribution)),
            "exactness": exactness_check(c.algebra, saturate_torsion(c.distribution), D),
        }

    for ci, cj in combinations(charts, 2):
        pair = _overlap_pair(ci, cj, D, localizer_degree, escalations)
        if pair is None:
            atlas.disjoint.append((ci.id, cj.id))
            continue
        forward, backward = pair
        if not _coherent(forward, backward):
            atlas.cocycle_ok = False
            atlas.cocycle_witness = {"pair": [ci.id, cj.id], "reason": "transitions are not inverse"}
            raise CocycleError(f"transitions between {ci.id} and {cj.id} are not inverse", (ci.id, cj.id, ci.id), atlas)
        atlas.transitions[(ci.id, cj.id)] = forward
        atlas.transitions[(cj.id, ci.id)] = backward

    for i, j, k in permutations(charts, 3):
        failure = _check_triple(atlas, i, j, k)
        if failure:
            atlas.cocycle_ok = False
            atlas.cocycle_witness = {"triple": [i.id, j.id, k.id], "reason": failure}
            logger.error(f"cocycle failure on ({i.id}, {j.id}, {k.id}): {failure}")
            raise CocycleError(failure, (i.id, j.id, k.id), atlas)

    atlas.separated = separatedness_check(atlas)
    atlas.classification = classify(atlas)
    logger.info(
        f"atlas of {len(charts)} charts: separated={atlas.separated.status}, "
        f"classification={atlas.classification}"
    )
    return atlas


# ---------------------------------------------------------------------------
# Leaves
# ---------------------------------------------------------------------------

class LeafReport:
    """Desk-scale checks that a fibre of a chart is a smooth algebraic leaf"""

    def __init__(self, ideal: Ideal, dimension: int, expected: int, smooth: bool, irreducible: str, tangent: bool):
        self.ideal = ideal
        self.dimension = dimension
        self.expected = expected
        self.smooth = smooth
        self.irreducible = irreducible
        self.tangent = tangent

    @property
    def is_leaf(self) -> bool:
        return (
            self.dimension == self.expected
            and self.smooth
            and self.tangent
            and self.irreducible != "no"
        )

    def to_dict(self) -> dict:
        return {
            "ideal": self.ideal.display(),
            "dimension": self.dimension,
            "expected_dimension": self.expected,
            "smooth": self.smooth,
            "irreducible": self.irreducible,
            "tangent": self.tangent,
            "leaf": self.is_leaf,
        }


def _irreducible(ideal: Ideal) -> str:
    ring = ideal.ring
    numerators = [p.numerator() for p in ideal.basis()]
    if not numerators:
        return "unknown"
    if all(max(sum(m) for m in num.itermonoms()) <= 1 for num in numerators):
        return "yes"
    if len(numerators) == 1:
        _, factors = numerators[0].factor_list()
        proper = [(f, e) for f, e in factors if not f.is_ground and f.monic() not in ring.inverted]
        return "yes" if len(proper) == 1 and proper[0][1] == 1 else "no"
    return "unknown"


def leaf_fibre(atlas: Atlas, chart_id: str, point: Sequence) -> LeafReport:
    """
    The fibre (g_i - c_i) of a chart over a rational point, with its leaf report

    Raises:
        KeyError: unknown chart
        ValueError: the point does not have one value per generator
    """
    chart = atlas.chart(chart_id)
    ring = chart.ring
    generators = chart.algebra.generators
    if len(point) != len(generators):
        raise ValueError(f"chart {chart_id} has {len(generators)} generators, got {len(point)} values")
    equations = [g - c for g, c in zip(generators, point)]
    ideal = Ideal(ring, equations)

    dist = saturate_torsion(chart.distribution)
    expected = dist.rank
    dimension = ideal.dimension()

    codim = ring.nvars - expected
    rows = [[OneForm.d(e).coefficient(v) for v in ring.variables] for e in equations]
    if codim <= 0:
        smooth = not ideal.is_unit()
    else:
        minors = fitting_ideal(rows, ring, ring.nvars - codim).generators
        smooth = Ideal(ring, list(ideal.generators) + list(minors)).is_unit()

    vectors = [OneForm.d(e).vector for e in equations]
    for e in ideal.generators:
        for pos in range(ring.nvars):
            unit = [ring.internal.zero] * ring.nvars
            unit[pos] = e.rep
            vectors.append(tuple(unit))
    basis = modules.module_groebner(vectors, ring.nvars, ring.internal, ring.defining_gb)
    tangent = all(modules.contains(basis, w.vector) for w in dist.relations)

    report = LeafReport(ideal, dimension, expected, smooth, _irreducible(ideal), tangent)
    logger.info(f"fibre of chart {chart_id} over {list(map(str, point))}: {report.to_dict()}")
    return report

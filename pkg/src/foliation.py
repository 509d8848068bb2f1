"""
Foliations and invariant morphisms
Lie brackets, involutivity, restriction to distinguished opens and invariance of ring maps
"""

from itertools import combinations
from typing import Dict, List, Mapping, Union

from src import modules
from src.diffmod import (
    Distribution,
    OneForm,
    VectorField,
    dual_vector_fields,
    foliated_d,
    saturate_torsion,
)
from src.logger import get_logger
from src.poly import NotAUnitError, Poly, PolyRing, RingMismatchError, localize, substitute
from src.verdicts import NO, UNKNOWN, YES, YES_GENERICALLY, Verdict


logger = get_logger(__name__)


class MalformedMorphismError(ValueError):
    """Raised when a ring map does not respect relations or inverted elements"""


class RingMorphism:
    """
    A ring map A -> B given by the images of the variables of A.

    Inverted elements of A must map to units of B and relations of A to zero.
    """

    def __init__(self, source: PolyRing, target: PolyRing, images: Mapping[str, Union[Poly, str, int]]):
        if set(images) != set(source.variables):
            raise MalformedMorphismError(
                f"images must be given for exactly {list(source.variables)}, got {sorted(images)}"
            )
        self.source = source
        self.target = target
        self.images: Dict[str, Poly] = {v: target.poly(images[v]) for v in source.variables}
        image_list = [self.images[v] for v in source.variables]

        for r in source.relations:
            if not substitute(r, image_list, target).is_zero:
                raise MalformedMorphismError(f"relation {r.as_expr()} does not map to zero")

        inverses: List[Poly] = []
        for f in source.inverted:
            try:
                inverses.append(target.inverse(substitute(f, image_list, target)))
            except NotAUnitError:
                raise MalformedMorphismError(
                    f"inverted element {f.as_expr()} does not map to a unit of {target}"
                ) from None
        self._all_images = image_list + inverses

    def apply(self, p: Poly) -> Poly:
        """Image of an element of the source ring"""
        if p.ring != self.source:
            p = self.source.coerce(p)
        return substitute(p.rep, self._all_images, self.target)

    __call__ = apply

    def compose(self, inner: "RingMorphism") -> "RingMorphism":
        """self o inner: first inner, then self"""
        if inner.target != self.source:
            raise MalformedMorphismError("target of the inner map is not the source of the outer map")
        return RingMorphism(
            inner.source, self.target, {v: self.apply(img) for v, img in inner.images.items()}
        )

    def to_dict(self) -> Dict[str, str]:
        return {v: str(img) for v, img in self.images.items()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RingMorphism)
            and (self.source, self.target, self.images) == (other.source, other.target, other.images)
        )

    def __repr__(self) -> str:
        body = ", ".join(f"{v} -> {img}" for v, img in self.images.items())
        return f"RingMorphism({body})"


def compose(outer: RingMorphism, inner: RingMorphism) -> RingMorphism:
    return outer.compose(inner)


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    """[v, w] with coefficient v(w_i) - w(v_i) on d/dx_i"""
    if v.ring != w.ring:
        raise RingMismatchError(f"{v.ring} and {w.ring} differ")
    coeffs = {}
    for name in v.ring.variables:
        coeffs[name] = v.apply(w.coefficient(name)) - w.apply(v.coefficient(name))
    return VectorField(v.ring, coeffs)


def omega_wedge_domega(omega: OneForm) -> Dict[str, Poly]:
    """
    Coefficients of omega ^ d(omega) on dx_i ^ dx_j ^ dx_k (i < j < k), nonzero only
    """
    ring = omega.ring
    names = ring.variables
    a = [omega.coefficient(v) for v in names]
    result = {}
    for i, j, k in combinations(range(len(names)), 3):
        c = (
            a[i] * (a[k].diff(j) - a[j].diff(k))
            - a[j] * (a[k].diff(i) - a[i].diff(k))
            + a[k] * (a[j].diff(i) - a[i].diff(j))
        )
        if not c.is_zero:
            result[f"d{names[i]}^d{names[j]}^d{names[k]}"] = c
    return result


def _colon_denominator(form: OneForm, dist: Distribution) -> Poly:
    """A nonzero b with b*form in the module of dist, from syzygies of [form, relations]"""
    ring = dist.ring
    columns = [form.vector] + dist.presentation
    for syz in sorted(modules.syzygies(columns, ring.internal, ring.defining_gb),
                      key=modules.degree):
        b = Poly(ring, syz[0])
        if not b.is_zero:
            return b
    return ring.one


def is_involutive(dist: Distribution) -> Verdict:
    """
    Decide closure of the tangent module under the Lie bracket

    Torsion inputs are saturated first; when saturation changed the module the
    answer is at best yes-generically, with a denominator off whose zero set the
    original presentation already agrees with the saturation.
    """
    original = dist
    dist = saturate_torsion(dist)
    fields = dual_vector_fields(dist)
    tangent_basis = modules.module_groebner(
        [f.vector for f in fields], dist.ring.nvars, dist.ring.internal, dist.ring.defining_gb
    )

    for (i, v), (j, w) in combinations(enumerate(fields), 2):
        bracket = lie_bracket(v, w)
        if not modules.contains(tangent_basis, bracket.vector):
            logger.info(f"bracket of tangent fields {i} and {j} leaves the distribution")
            return _crosscheck(dist, Verdict(NO, {
                "bracket": str(bracket),
                "fields": [str(v), str(w)],
            }))

    if original is dist or all(original.contains(w) for w in dist.relations):
        return _crosscheck(dist, Verdict(YES))

    denominator = original.ring.one
    for form in dist.relations:
        if not original.contains(form):
            denominator = denominator * _colon_denominator(form, original)
    logger.info(f"involutive after saturation; denominator {denominator}")
    return _crosscheck(dist, Verdict(
        YES_GENERICALLY,
        {"denominator": str(denominator)},
        detail="distribution had torsion and was saturated",
    ))


def _crosscheck(dist: Distribution, verdict: Verdict) -> Verdict:
    """
    Compare with the one-form test w ^ dw = 0 on corank-one presentations

    A disagreement downgrades the verdict to unknown, carrying both results.
    """
    if dist.corank != 1 or len(dist.relations) != 1 or dist.ambient:
        return verdict
    omega = dist.relations[0]
    wedge = omega_wedge_domega(omega)
    if (not wedge) == verdict.ok:
        return verdict
    logger.warning(
        f"bracket test and w^dw test disagree on {omega}: "
        f"bracket={verdict.status}, wedge={'zero' if not wedge else 'nonzero'}"
    )
    return Verdict(
        UNKNOWN,
        {
            "bracket": verdict.to_dict(),
            "wedge": {component: str(c) for component, c in wedge.items()},
            "form": str(omega),
        },
        detail="bracket and w^dw tests disagree",
    )


def restrict_to_open(dist: Distribution, f: Union[Poly, str, int]) -> Distribution:
    """
    The same relations over the ring with f inverted

    Raises:
        ValueError: if f is zero
    """
    ring = localize(dist.ring, dist.ring.poly(f))
    if ring == dist.ring:
        return dist
    forms = [
        OneForm(ring, {v: ring.coerce(c) for v, c in form.coeffs.items()})
        for form in dist.relations
    ]
    return Distribution(ring, forms, saturated=dist.saturated)


def is_invariant(phi: RingMorphism, dist: Distribution) -> Verdict:
    """
    The map is invariant when the image of every source variable is a first integral

    Raises:
        MalformedMorphismError: if the distribution does not live on the target ring
    """
    if phi.target != dist.ring:
        raise MalformedMorphismError("distribution is not defined on the target of the map")
    for name, image in phi.images.items():
        derivative = foliated_d(image, dist)
        if not derivative.is_zero:
            logger.info(f"{name} -> {image} is not a first integral")
            return Verdict(NO, {
                "variable": name,
                "image": str(image),
                "derivative": str(derivative),
            })
    return Verdict(YES)

"""
Unit tests for Lie brackets, involutivity, restriction and invariant morphisms
"""

import pytest

from hypothesis import HealthCheck, given, settings, strategies as st

from src.diffmod import Distribution, OneForm, VectorField, foliated_d, module_normal_form
from src.foliation import (
    MalformedMorphismError,
    RingMorphism,
    compose,
    is_invariant,
    is_involutive,
    lie_bracket,
    omega_wedge_domega,
    restrict_to_open,
)
from src.poly import PolyRing, localize
from src.verdicts import NO, UNKNOWN, YES, YES_GENERICALLY
from tests.strategies import (
    FOLIATIONS,
    chart_cases,
    corpus_chart,
    corpus_problem,
    polynomials,
    vector_fields,
)


@pytest.fixture
def line():
    """Q[t]"""
    return PolyRing(["t"])


def test_lie_bracket(plane):
    """Test [d/dx, x d/dy] = d/dy"""
    v = VectorField(plane, {"x": "1"})
    w = VectorField(plane, {"y": "x"})
    assert str(lie_bracket(v, w)) == "d/dy"
    assert lie_bracket(w, v) == -lie_bracket(v, w)
    assert lie_bracket(v, v).is_zero


def test_omega_wedge_domega_contact(contact):
    """Test the contact form has w ^ dw = dx ^ dy ^ dz"""
    result = omega_wedge_domega(contact.relations[0])
    assert list(result) == ["dx^dy^dz"]
    assert result["dx^dy^dz"] == 1


def test_omega_wedge_domega_exact(space):
    """Test exact forms are integrable"""
    assert omega_wedge_domega(OneForm.d(space.poly("x*y + z^2"))) == {}


@pytest.mark.parametrize("name", ["parabola", "radii", "hyperbolae", "hyperbolae3d"])
def test_corpus_distributions_are_involutive(request, name):
    """Test the worked examples are foliations"""
    assert is_involutive(request.getfixturevalue(name)).status == YES


def test_contact_form_is_not_involutive(contact):
    """Test dz - y dx is refuted with the escaping bracket"""
    verdict = is_involutive(contact)
    assert verdict.status == NO
    assert verdict.witness["bracket"] in ("d/dz", "-d/dz")
    assert len(verdict.witness["fields"]) == 2


def test_torsion_input_is_involutive_generically(plane):
    """Test a torsion presentation is saturated and flagged"""
    torsion = Distribution(plane, [OneForm(plane, {"x": "-x*y", "y": "x^2"})])
    verdict = is_involutive(torsion)
    assert verdict.status == YES_GENERICALLY
    assert verdict.witness["denominator"] in ("x", "-x")


def test_restrict_to_open(radii):
    """Test restriction keeps the relations over the localized ring"""
    local = restrict_to_open(radii, "x")
    assert local.ring == localize(radii.ring, "x")
    assert [str(w) for w in local.relations] == [str(w) for w in radii.relations]
    assert restrict_to_open(radii, 1) is radii
    with pytest.raises(ValueError):
        restrict_to_open(radii, 0)


def test_invariance_oracle(line, hyperbolae, parabola, plane):
    """Test t -> xy and t -> y - x^2 are invariant, t -> x is not"""
    assert is_invariant(RingMorphism(line, plane, {"t": "x*y"}), hyperbolae) == YES
    assert is_invariant(RingMorphism(line, plane, {"t": "y - x^2"}), parabola) == YES
    for dist in (hyperbolae, parabola):
        verdict = is_invariant(RingMorphism(line, plane, {"t": "x"}), dist)
        assert verdict.status == NO
        assert verdict.witness["variable"] == "t"
        assert verdict.witness["image"] == "x"


def test_invariance_on_chart(radii, line):
    """Test t -> y/x is invariant on D(x)"""
    local = restrict_to_open(radii, "x")
    phi = RingMorphism(line, local.ring, {"t": "y/x"})
    assert is_invariant(phi, local).status == YES


def test_invariance_needs_matching_target(line, hyperbolae, space):
    """Test the distribution must live on the target"""
    with pytest.raises(MalformedMorphismError):
        is_invariant(RingMorphism(line, space, {"t": "x"}), hyperbolae)


def test_morphism_validation(line, plane):
    """Test images, relations and inverted elements are checked"""
    with pytest.raises(MalformedMorphismError):
        RingMorphism(line, plane, {"s": "x"})
    with pytest.raises(MalformedMorphismError):
        RingMorphism(PolyRing(["t"], relations=["t^2"]), plane, {"t": "x"})
    with pytest.raises(MalformedMorphismError):
        RingMorphism(localize(line, "t"), plane, {"t": "x"})
    assert RingMorphism(PolyRing(["t"], relations=["t^2"]), plane, {"t": "0"}).images["t"] == 0


def test_morphism_apply_and_compose(line, plane):
    """Test evaluation and composition, including inverted sources"""
    punctured = localize(plane, "x*y")
    outer = RingMorphism(localize(line, "t"), punctured, {"t": "x*y"})
    assert str(outer(outer.source.poly("1/t"))) == "1/(x*y)"

    squares = PolyRing(["s"])
    inner = RingMorphism(squares, line, {"s": "t^2"})
    composed = compose(RingMorphism(line, plane, {"t": "x*y"}), inner)
    assert str(composed.images["s"]) == "x^2*y^2"
    with pytest.raises(MalformedMorphismError):
        compose(inner, inner)


def corank_one_forms():
    """Strategy: random one-forms in three variables with degree <= 2 coefficients, plus exact ones"""
    coefficients = st.sampled_from(["0", "1", "x", "y", "z", "x*y", "y*z", "x^2", "z^2 - x", "x + y"])
    random_form = st.tuples(coefficients, coefficients, coefficients).filter(lambda t: t != ("0", "0", "0"))
    exact_times = st.tuples(
        st.sampled_from(["x*y", "x + z^2", "y*z - x", "x^2 + y"]),
        st.sampled_from(["1", "x", "z + 1"]),
    )
    return st.one_of(random_form.map(lambda t: ("form", t)), exact_times.map(lambda t: ("exact", t)))


@settings(deadline=None, max_examples=50)
@given(spec=corank_one_forms())
def test_bracket_test_agrees_with_wedge_test(spec):
    """Test dual Lie-bracket involutivity agrees with w ^ dw = 0"""
    space = PolyRing(["x", "y", "z"])
    kind, data = spec
    if kind == "form":
        form = OneForm(space, dict(zip(("x", "y", "z"), data)))
    else:
        f, g = (space.poly(text) for text in data)
        form = g * OneForm.d(f)
    verdict = is_involutive(Distribution(space, [form]))
    integrable = not omega_wedge_domega(form)
    assert (verdict.status in (YES, YES_GENERICALLY)) == integrable


@pytest.mark.parametrize("variables, denominator", [
    (["x", "y"], "1"),
    (["x", "y"], "x*y"),
    (["x", "y", "z"], "1"),
])
@settings(deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow])
@given(data=st.data())
def test_jacobi_identity(variables, denominator, data):
    """Test [u,[v,w]] + [v,[w,u]] + [w,[u,v]] = 0 on random fields"""
    ring = localize(PolyRing(variables), denominator)
    u, v, w = (data.draw(vector_fields(ring), label=name) for name in "uvw")
    total = (
        lie_bracket(u, lie_bracket(v, w))
        + lie_bracket(v, lie_bracket(w, u))
        + lie_bracket(w, lie_bracket(u, v))
    )
    assert total.is_zero


@pytest.mark.parametrize("name, index", chart_cases(FOLIATIONS))
@settings(deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow])
@given(data=st.data())
def test_restriction_commutes_with_foliated_d(name, index, data):
    """Test localizing then differentiating equals differentiating then localizing"""
    _, dist = corpus_problem(name)
    local = corpus_chart(name, index)
    p = data.draw(polynomials(dist.ring, max_degree=3), label="p")
    restricted = OneForm(local.ring, foliated_d(p, dist).coeffs)
    assert foliated_d(local.ring.coerce(p), local) == module_normal_form(restricted, local)


def test_disagreement_with_wedge_test_is_unknown(contact, mocker):
    """Test a bracket verdict contradicted by w ^ dw is downgraded with both results"""
    mocker.patch("src.foliation.omega_wedge_domega", return_value={})
    verdict = is_involutive(contact)
    assert verdict.status == UNKNOWN
    assert verdict.witness["bracket"]["status"] == NO
    assert verdict.witness["wedge"] == {}
    assert "form" in verdict.witness
    assert not verdict.ok


def test_agreement_keeps_the_verdict(parabola, contact, mocker):
    """Test the wedge crosscheck leaves agreeing verdicts alone"""
    warning = mocker.patch("src.foliation.logger.warning")
    assert is_involutive(parabola) == YES
    assert is_involutive(contact).status == NO
    warning.assert_not_called()

"""
Unit tests for overlaps, gluing, separatedness, classification and leaves
"""

import pytest
from fractions import Fraction

import src.quotient as quotient
from src.first_integrals import compute_algebra
from src.foliation import restrict_to_open
from src.quotient import (
    Atlas,
    BoundExhaustedError,
    Chart,
    ChartNotCertifiedError,
    RecognitionError,
    build_atlas,
    chart_prefix,
    classify,
    leaf_fibre,
    overlap,
    separatedness_check,
)
from src.stability import certify_chart
from src.verdicts import NO, YES


def make_chart(dist, denominator, index, D=2):
    """Chart on D(denominator) tagged by its position"""
    f = dist.ring.poly(denominator)
    local = restrict_to_open(dist, f)
    algebra = compute_algebra(local, D, chart_prefix(index))
    chart_id = f"D({f})"
    return Chart(chart_id, f, local, algebra, certify_chart(chart_id, local, algebra))


@pytest.fixture
def radii_charts(radii):
    """D(x) with slope u = y/x and D(y) with slope v = x/y"""
    return [make_chart(radii, "x", 0), make_chart(radii, "y", 1)]


@pytest.fixture
def hyperbolae_charts(hyperbolae):
    """D(x) and D(y), both with xy as coordinate"""
    return [make_chart(hyperbolae, "x", 0), make_chart(hyperbolae, "y", 1)]


def test_chart_prefix():
    """Test chart tags follow u, v, w, ..."""
    assert [chart_prefix(i) for i in range(3)] == ["u", "v", "w"]
    assert chart_prefix(7) == "c7_"


def test_chart_tags(radii_charts):
    """Test a chart carries its certified algebra"""
    first, second = radii_charts
    assert first.id == "D(x)"
    assert first.algebra.tag_names == ("u",)
    assert [str(g) for g in second.algebra.generators] == ["x/y"]
    assert first.certificate.verified


def test_radii_overlap(radii_charts):
    """Test the slopes are glued by v = 1/u"""
    first, second = radii_charts
    t = overlap(first, second, 2)
    assert str(t.localizer_source) == "u"
    assert str(t.localizer_target) == "v"
    assert str(t.iso.images["v"]) == "1/u"
    assert sorted(t.to_dict()["overlap_generators"]) == ["x/y", "y/x"]


def test_self_overlap_is_identity(radii_charts):
    """Test the overlap of a chart with itself is the identity"""
    chart = radii_charts[0]
    t = overlap(chart, chart, 2)
    assert t.source == t.target == "D(x)"
    assert str(t.iso.images["u"]) == "u"


def test_radii_glue_to_projective_line(radii_charts):
    """Test two affine lines glued by u -> 1/u"""
    atlas = build_atlas(radii_charts, 2)
    assert atlas.cocycle_ok
    assert atlas.separated == YES
    assert atlas.classification == "projective line"
    assert set(atlas.transitions) == {
        ("D(x)", "D(x)"), ("D(y)", "D(y)"), ("D(x)", "D(y)"), ("D(y)", "D(x)")
    }
    assert all(v.ok for checks in atlas.chart_checks.values() for v in checks.values())


def test_hyperbolae_glue_to_doubled_origin(hyperbolae_charts):
    """Test two copies of the xy-line glued away from 0 are not separated"""
    atlas = build_atlas(hyperbolae_charts, 2)
    assert str(atlas.transitions[("D(x)", "D(y)")].iso.images["v"]) == "u"
    assert atlas.separated.status == NO
    assert atlas.separated.witness["pair"] == ["D(x)", "D(y)"]
    assert atlas.separated.witness["element"] == "1/(x*y)"
    assert atlas.separated.witness["expression"] == "1/u"
    assert atlas.classification == "line with doubled origin"


def test_separatedness_check_on_single_chart(parabola):
    """Test one chart is always separated"""
    atlas = Atlas([make_chart(parabola, "1", 0)])
    assert separatedness_check(atlas) == YES


def test_single_chart_is_affine_line(parabola):
    """Test the parabola foliation has the affine line as quotient"""
    atlas = build_atlas([make_chart(parabola, "1", 0)], 2)
    assert atlas.classification == "affine line"
    assert atlas.transitions[("D(1)", "D(1)")].iso.images["u"] == atlas.charts[0].algebra.quotient_ring.var("u")
    assert atlas.to_dict()["transitions"] == []


def test_atlas_to_dict(radii_charts):
    """Test the serialized atlas lists each glued pair once per direction"""
    data = build_atlas(radii_charts, 2).to_dict()
    assert [(t["from"], t["to"]) for t in data["transitions"]] == [("D(x)", "D(y)"), ("D(y)", "D(x)")]
    assert data["classification"] == "projective line"
    assert data["cocycle_ok"] is True
    assert data["disjoint"] == []


def test_uncertified_chart_is_rejected(radii):
    """Test gluing refuses the full plane of the radial foliation"""
    chart = make_chart(radii, "1", 0)
    with pytest.raises(ChartNotCertifiedError):
        build_atlas([chart], 2)


def test_unknown_chart(radii_charts):
    """Test lookup by id"""
    atlas = Atlas(radii_charts)
    assert atlas.chart("D(y)") is radii_charts[1]
    with pytest.raises(KeyError):
        atlas.chart("D(z)")


def test_degree_escalation_is_bounded(radii_charts, mocker):
    """Test recognition retries at increasing degree, then gives up"""
    mocker.patch("src.quotient._recognize", side_effect=RecognitionError("not a localization"))
    spy = mocker.spy(quotient, "compute_algebra")
    first, second = radii_charts
    with pytest.raises(BoundExhaustedError) as exc:
        overlap(first, second, 2, escalations=2)
    assert [call.args[1] for call in spy.call_args_list] == [2, 3, 4]
    assert isinstance(exc.value.__cause__, RecognitionError)


def test_escalation_recovers(radii_charts, mocker):
    """Test a failure at the first degree is retried"""
    real = quotient._recognize
    calls = {"count": 0}

    def flaky(*args):
        calls["count"] += 1
        if calls["count"] == 1:
            raise RecognitionError("first attempt")
        return real(*args)

    mocker.patch("src.quotient._recognize", side_effect=flaky)
    first, second = radii_charts
    t = overlap(first, second, 2, escalations=1)
    assert str(t.iso.images["v"]) == "1/u"


def test_classify_without_transitions(radii_charts):
    """Test an unglued pair is not classified"""
    assert classify(Atlas(radii_charts)) == "unclassified"


@pytest.mark.slow
def test_orbits_in_space_atlas(hyperbolae3d):
    """Test the three coordinate charts of the orbit foliation glue consistently"""
    charts = [make_chart(hyperbolae3d, v, i) for i, v in enumerate(("x", "y", "z"))]
    assert all(c.certificate.verified for c in charts)
    atlas = build_atlas(charts, 2)
    assert atlas.cocycle_ok
    assert atlas.separated.status == NO
    assert atlas.classification == "unclassified"
    assert len(atlas.transitions) == 9


@pytest.mark.slow
def test_orbits_in_space_leaf(hyperbolae3d):
    """Test the fibre over the origin of D(x) is the x-axis"""
    atlas = Atlas([make_chart(hyperbolae3d, "x", 0)])
    report = leaf_fibre(atlas, "D(x)", [Fraction(0), Fraction(0)])
    assert sorted(report.ideal.display()) == ["y", "z"]
    assert report.is_leaf


def test_parabola_leaf(parabola):
    """Test the fibre over 0 is the parabola y = x^2"""
    atlas = Atlas([make_chart(parabola, "1", 0)])
    report = leaf_fibre(atlas, "D(1)", [Fraction(0)])
    assert report.ideal.display() == ["x^2 - y"]
    assert report.dimension == report.expected == 1
    assert report.smooth
    assert report.irreducible == "yes"
    assert report.tangent
    assert report.to_dict()["leaf"] is True


def test_hyperbola_leaf(hyperbolae_charts):
    """Test xy = 1 is a leaf on D(x)"""
    atlas = Atlas(hyperbolae_charts)
    report = leaf_fibre(atlas, "D(x)", [Fraction(1)])
    assert report.dimension == 1
    assert report.smooth
    assert report.is_leaf


def test_leaf_needs_one_value_per_generator(parabola):
    """Test the point must match the chart coordinates"""
    atlas = Atlas([make_chart(parabola, "1", 0)])
    with pytest.raises(ValueError):
        leaf_fibre(atlas, "D(1)", [Fraction(0), Fraction(1)])
    with pytest.raises(KeyError):
        leaf_fibre(atlas, "D(x)", [Fraction(0)])

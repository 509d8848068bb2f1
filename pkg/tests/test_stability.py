"""
Unit tests for Fitting ideals and chart stability certificates
"""

import pytest

from src.diffmod import Distribution, OneForm, saturate_torsion
from src.first_integrals import FirstIntegralAlgebra, compute_algebra
from src.foliation import restrict_to_open
from src.poly import PolyRing
from src.stability import (
    TRUSTED_THEORY,
    certify_chart,
    check_smooth_and_dimension,
    connected_fibres_probe,
    determinant,
    distribution_freeness,
    fitting_ideal,
    search_stable_chart,
)
from src.verdicts import REFUTED, VERIFIED, YES
from tests.strategies import FOLIATIONS, chart_cases, corpus_chart, corpus_problem


@pytest.fixture
def hyperbolae_on_x(hyperbolae):
    """The hyperbolae foliation on D(x) with its algebra Q[xy]"""
    local = restrict_to_open(hyperbolae, "x")
    return local, compute_algebra(local, 2)


def test_determinant(plane):
    """Test cofactor expansion on small matrices"""
    x, y = plane.gens()
    assert determinant([[x, y], [plane.one, x]], plane) == x ** 2 - y
    assert determinant([], plane) == 1
    three = [[x, plane.zero, plane.zero], [plane.zero, y, plane.zero], [plane.zero, plane.zero, x]]
    assert determinant(three, plane) == x ** 2 * y


def test_fitting_ideals(plane):
    """Test Fitting ideals of the cokernel of (x, y)"""
    x, y = plane.gens()
    rows = [[x, y]]
    assert fitting_ideal(rows, plane, 0).is_zero()
    assert sorted(fitting_ideal(rows, plane, 1).display()) == ["x", "y"]
    assert fitting_ideal(rows, plane, 2).is_unit()


def test_distribution_freeness(radii, parabola):
    """Test the radial distribution fails to be free exactly at the origin"""
    verdict = distribution_freeness(radii)
    assert verdict.status == REFUTED
    assert verdict.witness["ideal"] == ["x", "y"]
    assert distribution_freeness(parabola) == VERIFIED


def test_radii_plane_is_refuted(radii):
    """Test the full plane with only constants is not a stable chart"""
    certificate = certify_chart("X", radii, compute_algebra(radii, 2))
    assert certificate.overall == REFUTED
    assert certificate.smooth.witness["ideal"] == ["x", "y"]
    assert certificate.relative_dimension.status == REFUTED
    assert certificate.relative_dimension.witness == {"computed": 2, "expected": 1}


def test_hyperbolae_plane_is_not_smooth(hyperbolae):
    """Test xy : A^2 -> A^1 is singular at the origin"""
    certificate = certify_chart("X", hyperbolae, compute_algebra(hyperbolae, 2))
    assert certificate.relative_dimension == VERIFIED
    assert certificate.smooth.status == REFUTED
    assert certificate.smooth.witness["ideal"] == ["x", "y"]
    assert not certificate.verified


def test_hyperbolae_on_chart_is_verified(hyperbolae_on_x):
    """Test xy on D(x) is a smooth map with connected fibres"""
    local, algebra = hyperbolae_on_x
    certificate = certify_chart("D(x)", local, algebra)
    assert certificate.verified
    assert certificate.connected_fibres == VERIFIED
    assert certificate.invariant == "yes"
    assert certificate.trusted == TRUSTED_THEORY


def test_certificate_to_dict(hyperbolae_on_x):
    """Test the serialized certificate carries every verdict"""
    local, algebra = hyperbolae_on_x
    result = certify_chart("D(x)", local, algebra).to_dict()
    assert result["chart"] == "D(x)"
    assert result["overall"] == VERIFIED
    assert set(result) == {
        "chart", "smooth", "relative_dimension", "connected_fibres", "invariant", "overall", "trusted"
    }


def test_check_smooth_and_dimension(hyperbolae_on_x):
    """Test the chart map alone passes the Jacobian criterion"""
    local, algebra = hyperbolae_on_x
    smooth, dimension = check_smooth_and_dimension(algebra.to_morphism(), local.rank)
    assert smooth == VERIFIED
    assert dimension.witness == {"computed": 1, "expected": 1}


def test_connected_fibres_probe(hyperbolae_on_x):
    """Test no algebraic element lies outside Q[xy] on D(x)"""
    local, algebra = hyperbolae_on_x
    assert connected_fibres_probe(algebra.to_morphism(), algebra, d_alg=3) == VERIFIED


def test_non_normal_subalgebra_is_refuted():
    """Test Q[x^2] in Q[x] has the disconnected fibres x = +-c"""
    line = PolyRing(["x"])
    points = Distribution(line, [OneForm(line, {"x": "1"})])
    squares = FirstIntegralAlgebra(line, ["x^2"])
    certificate = certify_chart("X", points, squares)
    assert certificate.connected_fibres.status == REFUTED
    assert certificate.connected_fibres.witness["element"] == "x"
    assert certificate.smooth.status == REFUTED
    assert certificate.overall == REFUTED


@pytest.mark.slow
def test_orbits_on_chart_are_verified(hyperbolae3d):
    """Test the orbit foliation in space is a quotient on D(y)"""
    local = restrict_to_open(hyperbolae3d, "y")
    certificate = certify_chart("D(y)", local, compute_algebra(local, 2))
    assert certificate.verified


def test_search_stable_chart(hyperbolae):
    """Test the search skips the plane and stops at D(x)"""
    found = search_stable_chart(hyperbolae, ["0", "1", "x", "y"], D=2)
    assert found is not None
    f, certificate = found
    assert str(f) == "x"
    assert certificate.chart_id == "D(x)"


def test_search_stable_chart_gives_up(radii):
    """Test no certified chart among bad candidates"""
    assert search_stable_chart(radii, ["1"], D=2) is None


def certify(dist, chart_id, D=2):
    """Certificate of a chart with its degree-D algebra"""
    saturated = saturate_torsion(dist)
    return certify_chart(chart_id, saturated, compute_algebra(saturated, D))


def test_algebra_of_constants_is_trivially_invariant(radii):
    """Test an empty algebra carries an affirmative invariance verdict"""
    certificate = certify(radii, "X")
    assert certificate.invariant.status == YES
    assert certificate.invariant.detail == "algebra of constants"


@pytest.mark.parametrize("name, index", chart_cases(FOLIATIONS))
@pytest.mark.parametrize("g", ["x", "y"])
def test_stability_survives_shrinking(name, index, g):
    """Test a certified chart D(f) stays certified on D(f*g)"""
    local = corpus_chart(name, index)
    if not certify(local, "D(f)").verified:
        pytest.skip("chart is not certified at this degree bound")
    smaller = restrict_to_open(local, g)
    assert certify(smaller, "D(f*g)").verified


@pytest.mark.parametrize("name", [
    "parabola",
    "radii",
    "hyperbolae",
    pytest.param("hyperbolae3d", marks=pytest.mark.slow),
])
def test_every_example_has_a_stable_chart(name):
    """Test some distinguished open of each foliation certifies"""
    _, dist = corpus_problem(name)
    candidates = ["1"] + list(dist.ring.variables)
    found = search_stable_chart(dist, candidates, D=2)
    assert found is not None
    _, certificate = found
    assert certificate.verified

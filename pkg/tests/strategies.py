"""
Shared Hypothesis strategies, corpus cases and linear-algebra oracles for property tests
"""

from functools import lru_cache
from itertools import product
from pathlib import Path

import pytest
from hypothesis import strategies as st
from sympy import QQ, Matrix

from src.diffmod import OneForm, VectorField
from src.foliation import restrict_to_open
from src.problem import build_distribution, build_ring, chart_denominators, load_problem


CORPUS = Path(__file__).parent.parent / "corpus"

FOLIATIONS = ["parabola", "radii", "hyperbolae", "hyperbolae3d"]
DISTRIBUTIONS = FOLIATIONS + ["contact"]


@lru_cache(maxsize=None)
def corpus_problem(name):
    """Problem spec and distribution of a shipped example"""
    problem = load_problem(str(CORPUS / f"{name}.json"))
    return problem, build_distribution(problem, build_ring(problem))


@lru_cache(maxsize=None)
def corpus_chart(name, index=None):
    """The distribution on chart index of a shipped example; the whole space for None"""
    problem, dist = corpus_problem(name)
    if index is None:
        return dist
    return restrict_to_open(dist, chart_denominators(problem, dist.ring)[index])


def _case(name, index):
    label = f"{name}-X" if index is None else f"{name}-{index}"
    _, dist = corpus_problem(name)
    marks = [pytest.mark.slow] if dist.ring.nvars > 2 else []
    return pytest.param(name, index, id=label, marks=marks)


def chart_cases(names):
    """The listed charts of each example, three-variable ones marked slow"""
    return [_case(name, i) for name in names for i in range(len(corpus_problem(name)[0].charts))]


def open_cases(names):
    """The whole space and every listed chart of each example"""
    cases = []
    for name in names:
        cases.append(_case(name, None))
        cases += [_case(name, i) for i in range(len(corpus_problem(name)[0].charts))]
    return cases


def polynomials(ring, max_degree=2, max_terms=4):
    """Strategy: small integer combinations of monomials, each over at most one inverted factor"""
    exponents = [
        e for e in product(range(max_degree + 1), repeat=ring.nvars) if sum(e) <= max_degree
    ]
    denominators = [ring.one] + [ring.inverse(ring.from_base(f)) for f in ring.inverted]
    term = st.tuples(
        st.integers(min_value=-3, max_value=3),
        st.sampled_from(exponents),
        st.sampled_from(denominators),
    )

    def build(terms):
        total = ring.zero
        for c, e, den in terms:
            monomial = ring.one
            for x, k in zip(ring.gens(), e):
                monomial = monomial * x ** k
            total = total + c * monomial * den
        return total

    return st.lists(term, max_size=max_terms).map(build)


def one_forms(ring, max_degree=2):
    """Strategy: one-forms with random polynomial coefficients"""
    return st.tuples(*[polynomials(ring, max_degree) for _ in ring.variables]).map(
        lambda coeffs: OneForm(ring, dict(zip(ring.variables, coeffs)))
    )


def vector_fields(ring, max_degree=2):
    """Strategy: vector fields with random polynomial coefficients"""
    return st.tuples(*[polynomials(ring, max_degree) for _ in ring.variables]).map(
        lambda coeffs: VectorField(ring, dict(zip(ring.variables, coeffs)))
    )


def homogeneous_basis(ring, d):
    """Monomials of total degree d, as ring elements"""
    result = []
    for e in product(range(d + 1), repeat=ring.nvars):
        if sum(e) == d:
            monomial = ring.one
            for x, k in zip(ring.gens(), e):
                monomial = monomial * x ** k
            result.append(monomial)
    return result


def coordinates(p, basis):
    """Coefficients of p on a list of monomials"""
    terms = dict(p.rep.terms())
    return [QQ.to_sympy(terms.get(m.rep.LM, QQ.zero)) for m in basis]


def form_coordinates(form, basis):
    """Coefficients of every component of a one-form, in variable order"""
    return [c for v in form.ring.variables for c in coordinates(form.coefficient(v), basis)]


def in_span(columns, vector):
    """Linear-algebra membership of vector in the span of columns"""
    if not columns:
        return all(c == 0 for c in vector)
    A = Matrix(columns).T
    return Matrix.hstack(A, Matrix(vector)).rank() == A.rank()


def coefficient_grid(size, rng, limit=729, samples=400):
    """Every vector in {-1, 0, 1}^size, or a seeded sample when there are too many"""
    if 3 ** size <= limit:
        return list(product((-1, 0, 1), repeat=size))
    return [tuple(rng.choice((-1, 0, 1)) for _ in range(size)) for _ in range(samples)]

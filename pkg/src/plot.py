"""
Phase portraits
Deterministic SVG of a planar distribution: tangent arrows and level sets of first integrals
"""

import io
from typing import List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from sympy import lambdify, symbols  # noqa: E402

from src.diffmod import Distribution, dual_vector_fields, saturate_torsion  # noqa: E402
from src.first_integrals import FirstIntegralAlgebra, rational_points  # noqa: E402
from src.logger import get_logger  # noqa: E402
from src.poly import Poly  # noqa: E402


logger = get_logger(__name__)

SVG_SALT = "foliation-quotients"


def _evaluate(p: Poly, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Values on the grid; poles and points off the chart come back masked"""
    names = symbols(list(p.ring.variables))
    f = lambdify(names, p.to_expr(), modules="numpy")
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.asarray(f(X, Y), dtype=float) * np.ones_like(X)
    return np.ma.masked_invalid(values)


def _levels(alg: FirstIntegralAlgebra, count: int) -> List[List[float]]:
    per_generator: List[set] = [set() for _ in alg.generators]
    for point in rational_points(alg, count):
        for k, value in enumerate(point):
            per_generator[k].add(float(value))
    return [sorted(levels) for levels in per_generator]


def render_svg(
    dist: Distribution,
    algebras: Sequence[FirstIntegralAlgebra],
    window: Sequence[float] = (-2.0, 2.0, -2.0, 2.0),
    density: int = 15,
    levels: int = 7,
) -> str:
    """
    Render the portrait of a distribution on a two-variable ring

    Args:
        dist: The distribution; arrows follow the first generator of its tangent module
        algebras: First-integral algebras whose generators are drawn as level sets
        window: x0, x1, y0, y1
        density: Arrow grid points per axis
        levels: Number of rational sample points per algebra

    Returns:
        SVG document text, identical for identical inputs

    Raises:
        ValueError: If the ring does not have exactly two variables
    """
    ring = dist.ring
    if ring.nvars != 2:
        raise ValueError(f"phase portraits need two variables, got {ring.nvars}")
    x0, x1, y0, y1 = window

    plt.rcParams["svg.hashsalt"] = SVG_SALT
    plt.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_xlabel(ring.variables[0])
    ax.set_ylabel(ring.variables[1])
    ax.grid(True, linewidth=0.3)

    fields = dual_vector_fields(saturate_torsion(dist))
    if fields:
        X, Y = np.meshgrid(np.linspace(x0, x1, density), np.linspace(y0, y1, density))
        U = _evaluate(fields[0].coefficient(ring.variables[0]), X, Y)
        V = _evaluate(fields[0].coefficient(ring.variables[1]), X, Y)
        norm = np.ma.sqrt(U ** 2 + V ** 2)
        norm = np.ma.masked_equal(norm, 0.0)
        ax.quiver(X, Y, U / norm, V / norm, angles="xy", pivot="middle", color="0.3")
        logger.debug(f"arrows along {fields[0]} on a {density}x{density} grid")

    fine = np.linspace(x0, x1, 200), np.linspace(y0, y1, 200)
    X, Y = np.meshgrid(*fine)
    for alg in algebras:
        for g, values in zip(alg.generators, _levels(alg, levels)):
            if not values:
                continue
            Z = _evaluate(g, X, Y)
            if Z.count() == 0:
                continue
            ax.contour(X, Y, Z, levels=values, linewidths=0.8, colors="tab:blue")

    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buffer.getvalue()

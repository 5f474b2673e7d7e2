"""Shared test utilities: independent oracles and seeded instance generators.

Oracles here deliberately avoid the code paths of the package: sums use
``math.fsum`` over explicit loops, divided differences use the plain
recursive definition on distinct nodes, and integrals use fixed-order
Gauss-Legendre panels instead of adaptive quadrature.
"""

import math

import numpy as np

from sherman_bounds import StochasticMatrix, WeightedVector, generate_weighted_pair


def fsum_dot(weights, values) -> float:
    return math.fsum(float(w) * float(v) for w, v in zip(weights, values))


def dd_recursive(points, f) -> float:
    """Textbook recursive divided difference; distinct nodes only."""
    pts = [float(p) for p in points]
    if len(pts) == 1:
        return f(pts[0])
    return (dd_recursive(pts[1:], f) - dd_recursive(pts[:-1], f)) / (pts[-1] - pts[0])


def gauss_legendre(f, lo: float, hi: float, nodes: int = 50) -> float:
    """Fixed-order Gauss-Legendre panel; exact for polynomials below 2*nodes."""
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return half * math.fsum(float(w) * f(mid + half * float(x)) for x, w in zip(xs, ws))


def gauss_legendre_pieces(f, cuts, nodes: int = 50) -> float:
    """Gauss-Legendre applied piecewise between consecutive cut points."""
    cuts = sorted(float(c) for c in cuts)
    return math.fsum(
        gauss_legendre(f, lo, hi, nodes) for lo, hi in zip(cuts, cuts[1:]) if hi > lo
    )


def random_row_stochastic(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.dirichlet(np.ones(cols), size=rows)


def random_doubly_stochastic(rng: np.random.Generator, size: int, terms: int = 0) -> np.ndarray:
    """Random convex combination of permutation matrices."""
    if terms <= 0:
        terms = size + 2
    lam = rng.dirichlet(np.ones(terms))
    out = np.zeros((size, size))
    for coeff in lam:
        perm = rng.permutation(size)
        out[np.arange(size), perm] += coeff
    return out


def random_chain_instance(
    rng: np.random.Generator,
    interval: tuple[float, float],
    max_rows: int = 6,
    max_cols: int = 8,
):
    """Random verified weighted-majorization instance on the interval.

    Returns (x_vector, y_vector, witness) with the pair generated from a
    random row-stochastic matrix, so verification holds by construction.
    """
    lo, hi = interval
    rows = int(rng.integers(1, max_rows + 1))
    cols = int(rng.integers(1, max_cols + 1))
    witness = StochasticMatrix(random_row_stochastic(rng, rows, cols), "row")
    x = rng.uniform(lo, hi, cols)
    b = rng.uniform(0.1, 2.0, rows)
    y, a = generate_weighted_pair(x, b, witness)
    return (
        WeightedVector(x, a, interval),
        WeightedVector(y, b, interval),
        witness,
    )


def random_probability(rng: np.random.Generator, size: int) -> np.ndarray:
    """Strictly positive probability vector, bounded away from zero."""
    raw = rng.uniform(0.05, 1.0, size)
    return raw / raw.sum()

"""Shared helpers: deterministic random instances and independent oracles."""

import itertools
import random

import pytest

from fillbound.chains import Chain, SimplicialComplex, boundary
from fillbound.intlin import IntMatrix


def random_complex(rng: random.Random, max_vertices: int = 10, min_vertices: int = 4,
                   max_faces: int = None) -> SimplicialComplex:
    """Random 2-dimensional complex, closed under faces by construction."""
    n = rng.randint(min_vertices, max_vertices)
    all_tris = list(itertools.combinations(range(n), 3))
    cap = len(all_tris) if max_faces is None else min(max_faces, len(all_tris))
    count = rng.randint(1, cap)
    tris = rng.sample(all_tris, count)
    return SimplicialComplex.from_simplices(tris, n_vertices=n)


def random_chain(rng: random.Random, complex: SimplicialComplex, dim: int,
                 max_coeff: int = 4, density: float = 0.5) -> Chain:
    coeffs = {}
    for idx in range(complex.n_simplices(dim)):
        if rng.random() < density:
            a = rng.randint(-max_coeff, max_coeff)
            if a:
                coeffs[idx] = a
    return Chain(dim, coeffs)


def random_boundary(rng: random.Random, complex: SimplicialComplex,
                    max_coeff: int = 3) -> Chain:
    """A 1-boundary, produced as the boundary of a random 2-chain."""
    w = random_chain(rng, complex, 2, max_coeff=max_coeff, density=0.4)
    return boundary(complex, w)


def det_laplace(rows) -> int:
    """Cofactor-expansion determinant; independent of IntMatrix.det."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    sign = 1
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += sign * rows[0][j] * det_laplace(minor)
        sign = -sign
    return total


def box_search_best(a: IntMatrix, b, radius: int):
    """Exhaustive box oracle: min (max-norm, l1, lex) integer solution."""
    best = None
    for xs in itertools.product(range(-radius, radius + 1), repeat=a.cols):
        if a.mul_vec(list(xs)) == list(b):
            cand = (max(map(abs, xs), default=0), sum(map(abs, xs)), xs)
            if best is None or cand < best:
                best = cand
    return None if best is None else list(best[2])


def squared_norm(col) -> int:
    return sum(x * x for x in col)


@pytest.fixture
def rng():
    return random.Random(20240811)

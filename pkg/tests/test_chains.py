import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fillbound.chains import (
    Chain,
    SimplicialComplex,
    boundary,
    boundary_matrix,
    chain_from_simplices,
    is_cycle,
    mass,
    sort_with_sign,
)
from fillbound.errors import DomainError, StructuralError

from conftest import random_chain, random_complex


TRIANGLE = SimplicialComplex.from_simplices([(0, 1, 2)])
TETRA = SimplicialComplex.from_simplices([(0, 1, 2, 3)])

# unit octahedron: vertices +-e_i, faces = one triangle per octant
OCTA_COORDS = [
    (1.0, 0.0, 0.0), (-1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0), (0.0, -1.0, 0.0),
    (0.0, 0.0, 1.0), (0.0, 0.0, -1.0),
]
OCTA_FACES = [
    (0, 2, 4), (1, 2, 4), (1, 3, 4), (0, 3, 4),
    (0, 2, 5), (1, 2, 5), (1, 3, 5), (0, 3, 5),
]
OCTA = SimplicialComplex.from_simplices(OCTA_FACES)


def octa_edge_lengths():
    lengths = []
    for (u, v) in OCTA.simplices(1):
        lengths.append(math.dist(OCTA_COORDS[u], OCTA_COORDS[v]))
    return lengths


def equator_cycle():
    # closed loop +x -> +y -> -x -> -y in the z = 0 plane
    loop = [0, 2, 1, 3]
    terms = []
    for i in range(4):
        terms.append(((loop[i], loop[(i + 1) % 4]), 1))
    return chain_from_simplices(OCTA, 1, terms)


class TestConstruction:
    def test_closure_is_automatic(self):
        k = SimplicialComplex.from_simplices([(2, 0, 1)])
        assert k.simplices(1) == ((0, 1), (0, 2), (1, 2))
        assert k.simplices(2) == ((0, 1, 2),)
        assert k.dimension == 2

    def test_missing_face_rejected(self):
        with pytest.raises(StructuralError):
            SimplicialComplex(3, {2: [(0, 1, 2)]})

    def test_duplicate_and_degenerate_rejected(self):
        with pytest.raises(StructuralError):
            SimplicialComplex.from_simplices([(0, 0, 1)])
        with pytest.raises(StructuralError):
            SimplicialComplex(3, {1: [(0, 1), (0, 1)]})

    def test_lexicographic_indexing(self):
        assert TETRA.index_of(1, (0, 1)) == 0
        assert TETRA.index_of(1, (2, 3)) == 5
        assert TETRA.index_of(2, (1, 2, 3)) == 3
        with pytest.raises(StructuralError):
            TETRA.index_of(1, (0, 4))

    def test_orientation_normalization(self):
        assert sort_with_sign((2, 0, 1)) == ((0, 1, 2), 1)
        assert sort_with_sign((1, 0, 2)) == ((0, 1, 2), -1)
        c = chain_from_simplices(TRIANGLE, 2, [((1, 0, 2), 1)])
        assert c.get(0) == -1


class TestBoundary:
    def test_triangle_boundary(self):
        c = chain_from_simplices(TRIANGLE, 2, [((0, 1, 2), 1)])
        d = boundary(TRIANGLE, c)
        expected = chain_from_simplices(
            TRIANGLE, 1, [((1, 2), 1), ((0, 2), -1), ((0, 1), 1)]
        )
        assert d == expected

    def test_zero_chain(self):
        assert boundary(TETRA, Chain.zero(2)).is_zero()

    def test_boundary_squared_on_tetra(self):
        c = chain_from_simplices(TETRA, 3, [((0, 1, 2, 3), 1)])
        assert boundary(TETRA, boundary(TETRA, c)).is_zero()

    def test_dim_zero_rejected(self):
        with pytest.raises(DomainError):
            boundary(TRIANGLE, Chain(0, {0: 1}))

    def test_bad_index_rejected(self):
        with pytest.raises(StructuralError):
            boundary(TRIANGLE, Chain(1, {17: 1}))


class TestBoundaryMatrix:
    def test_triangle_column(self):
        m = boundary_matrix(TRIANGLE, 2)
        assert (m.rows, m.cols) == (3, 1)
        # edge order (0,1), (0,2), (1,2)
        assert [m[i, 0] for i in range(3)] == [1, -1, 1]

    def test_path_incidence(self):
        path = SimplicialComplex.from_simplices([(0, 1), (1, 2)])
        m = boundary_matrix(path, 1)
        assert (m.rows, m.cols) == (3, 2)
        for j in range(2):
            col = [m[i, j] for i in range(3)]
            assert sorted(col) == [-1, 0, 1]
            assert sum(col) == 0

    def test_octahedron_columns_match_boundary_op(self):
        m = boundary_matrix(OCTA, 2)
        assert (m.rows, m.cols) == (12, 8)
        for j, face in enumerate(OCTA.simplices(2)):
            col = [m[i, j] for i in range(12)]
            assert sum(1 for x in col if x) == 3
            assert all(x in (-1, 0, 1) for x in col)
            via_op = boundary(OCTA, chain_from_simplices(OCTA, 2, [(face, 1)]))
            assert col == via_op.to_vector(12)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            boundary_matrix(TRIANGLE, 3)
        with pytest.raises(DomainError):
            boundary_matrix(TRIANGLE, 0)


class TestMass:
    def test_arithmetic(self):
        c = Chain(1, {0: 2, 1: -3})
        assert mass([1.0, 2.0], c) == pytest.approx(8.0)

    def test_zero(self):
        assert mass([], Chain.zero(1)) == 0.0

    def test_octahedron_equator(self):
        # oracle: sum of the four edge lengths straight from coordinates
        lengths = octa_edge_lengths()
        z = equator_cycle()
        expected = sum(lengths[i] for i in z.support)
        assert expected == pytest.approx(4 * math.sqrt(2))
        assert mass(lengths, z) == pytest.approx(expected, rel=1e-9)

    def test_missing_weight(self):
        with pytest.raises(StructuralError):
            mass([1.0], Chain(1, {3: 1}))

    def test_nonpositive_weight(self):
        with pytest.raises(DomainError):
            mass([0.0], Chain(1, {0: 1}))


class TestIsCycle:
    def test_equator_is_cycle(self):
        assert is_cycle(OCTA, equator_cycle())

    def test_single_edge_is_not(self):
        assert not is_cycle(OCTA, Chain(1, {0: 1}))

    def test_boundaries_are_cycles(self):
        rng = random.Random(5)
        for _ in range(25):
            k = random_complex(rng, max_vertices=8)
            w = random_chain(rng, k, 2)
            assert is_cycle(k, boundary(k, w))


class TestInvariants:
    def test_boundary_squared_randomized(self):
        rng = random.Random(11)
        for _ in range(60):
            k = random_complex(rng, max_vertices=12)
            for dim in range(2, k.dimension + 1):
                for idx in range(k.n_simplices(dim)):
                    c = Chain(dim, {idx: 1})
                    assert boundary(k, boundary(k, c)).is_zero()

    def test_matrix_product_is_zero(self):
        rng = random.Random(13)
        for _ in range(20):
            k = random_complex(rng, max_vertices=9)
            if k.dimension < 2:
                continue
            prod = boundary_matrix(k, 1) @ boundary_matrix(k, 2)
            assert prod.is_zero()

    def test_chain_traversal_matches_matrix(self):
        rng = random.Random(17)
        checked = 0
        while checked < 200:
            k = random_complex(rng, max_vertices=9)
            c = random_chain(rng, k, 2)
            via_chain = boundary(k, c).to_vector(k.n_simplices(1))
            via_matrix = boundary_matrix(k, 2).mul_vec(c.to_vector(k.n_simplices(2)))
            assert via_chain == via_matrix
            checked += 1

    def test_simplex_count_binomial_bound(self):
        rng = random.Random(19)
        for _ in range(50):
            k = random_complex(rng, max_vertices=10)
            for dim in range(1, k.dimension + 1):
                assert k.n_simplices(dim) <= math.comb(k.n_vertices, dim + 1)

    @settings(max_examples=60, deadline=None)
    @given(
        coeffs_a=st.dictionaries(st.integers(0, 7), st.integers(-9, 9), max_size=8),
        coeffs_b=st.dictionaries(st.integers(0, 7), st.integers(-9, 9), max_size=8),
        n=st.integers(-7, 7),
    )
    def test_mass_subadditive_and_homogeneous(self, coeffs_a, coeffs_b, n):
        weights = [0.5, 1.0, 2.0, 0.25, 3.5, 1.75, 0.125, 4.0]
        a = Chain(1, coeffs_a)
        b = Chain(1, coeffs_b)
        assert mass(weights, a + b) <= mass(weights, a) + mass(weights, b) + 1e-12
        assert mass(weights, a.scale(n)) == pytest.approx(abs(n) * mass(weights, a))

import math

import pytest

from fillbound.chains import Chain, SimplicialComplex, boundary, chain_from_simplices
from fillbound.errors import DomainError, StructuralError
from fillbound.filling import min_mass_fill
from fillbound.geom import (
    Cover,
    MetricComplex,
    ball_cover,
    chain_to_closed_walks,
    cone_fill,
    decompose_cycle,
    fill_loop_locally,
    geodesic_graph,
    neck_contract,
    nerve,
    path_chain,
    pipeline_fill,
    project_cycle_to_graph,
    scale_coordinates,
    shortest_path_tree,
    skeleton_diameter,
)
from fillbound.shapes import capped_prism, disk, icosphere, octahedron, prism, tetra_boundary


OCTA = octahedron(1.0)


def octa_equator():
    loop = [0, 2, 1, 3]
    return chain_from_simplices(
        OCTA.complex, 1, [((loop[i], loop[(i + 1) % 4]), 1) for i in range(4)]
    )


def cycle_from_loop(space, loop):
    return chain_from_simplices(
        space.complex, 1,
        [((loop[i], loop[(i + 1) % len(loop)]), 1) for i in range(len(loop))],
    )


class TestMetricComplex:
    def test_octahedron_volumes(self):
        assert all(l == pytest.approx(math.sqrt(2)) for l in OCTA.edge_lengths)
        assert all(a == pytest.approx(math.sqrt(3) / 2) for a in OCTA.triangle_areas)

    def test_degenerate_edge_rejected(self):
        k = SimplicialComplex.from_simplices([(0, 1)])
        with pytest.raises(StructuralError):
            MetricComplex(complex=k, coords=((0.0, 0.0), (0.0, 0.0)))

    def test_degenerate_triangle_rejected(self):
        k = SimplicialComplex.from_simplices([(0, 1, 2)])
        with pytest.raises(StructuralError):
            MetricComplex(
                complex=k, coords=((0.0, 0.0), (1.0, 0.0), (2.0, 1e-15))
            )

    def test_region_validation(self):
        # a neck meeting only one body is rejected
        k = SimplicialComplex.from_simplices([(0, 1, 2)])
        coords = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
        with pytest.raises(StructuralError):
            MetricComplex(complex=k, coords=coords, region=("body:0", "neck:0", "neck:0"))

    def test_capped_prism_valid(self):
        space = capped_prism(6, 2, 1.0)
        assert space.region is not None
        assert set(space.region) == {"body:0", "neck:0", "body:1"}


class TestShortestPaths:
    def test_lexicographic_ties(self):
        # square: two equal-length routes 0-1-3 and 0-2-3; 0-1-3 is lex smaller
        k = SimplicialComplex.from_simplices([(0, 1), (1, 3), (0, 2), (2, 3)])
        coords = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
        space = MetricComplex(complex=k, coords=coords)
        tree = shortest_path_tree(space.adjacency(), 0)
        assert tree[3][1] == (0, 1, 3)

    def test_triangle_inequality_of_graph_edges(self):
        space = icosphere(1)
        cover = ball_cover(space, 0.7)
        graph = geodesic_graph(space, cover)
        adj = space.adjacency()
        trees = {c: shortest_path_tree(adj, c) for c in set(graph.centers)}
        for e in graph.edges:
            ca, cb = graph.centers[e.a], graph.centers[e.b]
            exact = trees[ca][cb][0]
            assert e.length >= exact - 1e-12


class TestBallCover:
    def test_single_set_when_radius_huge(self):
        cover = ball_cover(OCTA, 10.0)
        assert len(cover.sets) == 1
        assert cover.sets[0] == tuple(range(6))

    def test_tiny_radius_gives_singletons(self):
        cover = ball_cover(OCTA, 0.1)
        assert len(cover.sets) == 6
        assert cover.centers == tuple(range(6))
        assert all(s == (c,) for s, c in zip(cover.sets, cover.centers))
        assert cover.warnings  # radius below min edge length

    def test_path_graph_net(self):
        k = SimplicialComplex.from_simplices([(0, 1), (1, 2)])
        space = MetricComplex(complex=k, coords=((0.0,), (1.0,), (2.0,)))
        cover = ball_cover(space, 1.0)
        assert cover.centers == (0, 2)
        assert all(1 in s for s in cover.sets)

    def test_union_covers(self, rng):
        for _ in range(10):
            space = icosphere(1)
            cover = ball_cover(space, 0.3 + rng.random())
            covered = set()
            for s in cover.sets:
                covered.update(s)
            assert covered == set(range(space.complex.n_vertices))

    def test_radius_must_be_positive(self):
        with pytest.raises(DomainError):
            ball_cover(OCTA, 0.0)


class TestNerve:
    def test_disjoint_sets(self):
        cover = Cover(sets=((0,), (1,)), centers=(0, 1), kinds=("body-ball",) * 2)
        n = nerve(cover)
        assert n.n_vertices == 2
        assert n.n_simplices(1) == 0

    def test_full_triangle(self):
        cover = Cover(
            sets=((0, 1), (1, 2), (0, 1, 2)), centers=(0, 2, 1), kinds=("body-ball",) * 3
        )
        n = nerve(cover)
        assert n.n_simplices(1) == 3
        assert n.n_simplices(2) == 1

    def test_circle_cover_has_no_triangle(self):
        # three arcs, pairwise intersecting, empty triple intersection
        cover = Cover(
            sets=((0, 1), (1, 2), (2, 0)), centers=(0, 1, 2), kinds=("body-ball",) * 3
        )
        n = nerve(cover)
        assert n.n_simplices(1) == 3
        assert n.n_simplices(2) == 0

    def test_matches_brute_force(self, rng):
        import itertools

        for _ in range(20):
            n_sets = rng.randint(2, 8)
            universe = list(range(10))
            sets = tuple(
                tuple(sorted(rng.sample(universe, rng.randint(1, 6))))
                for _ in range(n_sets)
            )
            cover = Cover(sets=sets, centers=tuple(s[0] for s in sets),
                          kinds=("body-ball",) * n_sets)
            nv = nerve(cover)
            for i, j in itertools.combinations(range(n_sets), 2):
                expect = bool(set(sets[i]) & set(sets[j]))
                assert nv.has_simplex(1, (i, j)) == expect
            for i, j, k in itertools.combinations(range(n_sets), 3):
                expect = bool(set(sets[i]) & set(sets[j]) & set(sets[k]))
                assert nv.has_simplex(2, (i, j, k)) == expect


class TestGeodesicGraph:
    def test_single_set(self):
        cover = ball_cover(OCTA, 10.0)
        graph = geodesic_graph(OCTA, cover)
        assert len(graph.edges) == 0

    def test_two_sets_shared_vertex(self):
        k = SimplicialComplex.from_simplices([(0, 1), (1, 2)])
        space = MetricComplex(complex=k, coords=((0.0,), (1.0,), (2.0,)))
        cover = Cover(sets=((0, 1), (1, 2)), centers=(0, 2), kinds=("body-ball",) * 2)
        graph = geodesic_graph(space, cover)
        assert len(graph.edges) == 1
        e = graph.edges[0]
        assert e.path == (0, 1, 2)
        assert e.length == pytest.approx(2.0)
        assert not e.used_global_path

    def test_octahedron_skeleton_edges_present(self):
        cover = ball_cover(OCTA, 0.8)
        assert len(cover.sets) == 6
        # each set is its center plus the four neighbors
        for c, s in zip(cover.centers, cover.sets):
            assert len(s) == 5 and c in s
        graph = geodesic_graph(OCTA, cover)
        direct = [e for e in graph.edges if len(e.path) == 2]
        assert len(direct) == 12
        for e in direct:
            assert e.length == pytest.approx(math.sqrt(2))


class TestLocalFill:
    def test_walk_decomposition_reproduces_chain(self, rng):
        space = icosphere(1)
        for _ in range(20):
            loop = _random_cycle(rng, space)
            walks = chain_to_closed_walks(space.complex, loop)
            total = Chain.zero(1)
            for w in walks:
                total = total + path_chain(space.complex, w)
            assert total == loop

    def test_face_walk_fill(self):
        k = OCTA.complex
        # boundary of two adjacent faces reduces by face ears
        w = chain_from_simplices(k, 2, [((0, 2, 4), 1), ((1, 2, 4), -1)])
        z = boundary(k, w)
        filled = fill_loop_locally(OCTA, z)
        assert filled is not None
        assert boundary(k, filled) == z

    def test_equator_blocks_reduction(self):
        # no two consecutive equator edges share a face, so the local
        # reduction reports failure instead of guessing
        assert fill_loop_locally(OCTA, octa_equator()) is None


class TestConeFill:
    def test_single_face(self):
        space = tetra_boundary(1.0)
        face = space.complex.simplices(2)[0]
        z = boundary(space.complex, chain_from_simplices(space.complex, 2, [(face, 1)]))
        filled = cone_fill(space, z, face[0])
        assert filled == chain_from_simplices(space.complex, 2, [(face, 1)])

    def test_zero(self):
        assert cone_fill(OCTA, Chain.zero(1), 0).is_zero()

    def test_octahedron_equator_north_fan(self):
        z = octa_equator()
        filled = cone_fill(OCTA, z, 4)
        assert boundary(OCTA.complex, filled) == z
        # oracle: the four northern faces with matching orientations
        assert set(filled.support) == {
            OCTA.complex.index_of(2, f) for f in [(0, 2, 4), (1, 2, 4), (1, 3, 4), (0, 3, 4)]
        }
        assert OCTA.mass2(filled) == pytest.approx(2 * math.sqrt(3), rel=1e-12)
        _, optimum = min_mass_fill(OCTA.complex, OCTA.volumes, z)
        assert OCTA.mass2(filled) == pytest.approx(optimum, rel=1e-9)

    def test_cone_bound_on_flat_disks(self):
        for r in (1.0, 2.0):
            space = disk(12, 3, r)
            ring = [1 + 2 * 12 + i for i in range(12)]  # outermost ring
            z = cycle_from_loop(space, ring)
            filled = cone_fill(space, z, 0)
            assert boundary(space.complex, filled) == z
            assert space.mass2(filled) <= 1.05 * r * space.mass1(z)

    def test_not_a_cycle_rejected(self):
        with pytest.raises(DomainError):
            cone_fill(OCTA, Chain(1, {0: 1}), 0)


class TestNeckContract:
    def test_already_at_level(self):
        space = prism(6, 2, 1.0)
        ring = list(range(6))  # bottom ring, radial 0
        z = cycle_from_loop(space, ring)
        c2, e = neck_contract(space, z, 0.0)
        assert c2 == z
        assert e.is_zero()

    def test_zero(self):
        space = prism(6, 1, 1.0)
        c2, e = neck_contract(space, Chain.zero(1), 0.0)
        assert c2.is_zero() and e.is_zero()

    def test_hexagonal_prism_sweep(self):
        space = prism(6, 1, 1.0)
        top = [6 + i for i in range(6)]
        z = cycle_from_loop(space, top)
        c2, e = neck_contract(space, z, 0.0)
        bottom = cycle_from_loop(space, list(range(6)))
        assert c2 == bottom
        # exact prism identity and full lateral area
        assert boundary(space.complex, e) == z - c2
        assert e.l1() == 12
        lateral = sum(space.triangle_areas)
        assert space.mass2(e) == pytest.approx(lateral, rel=1e-12)
        span = 1.0
        assert space.mass2(e) <= 1.05 * span * space.mass1(z)

    def test_huge_coefficients_sweep_exactly(self):
        space = prism(6, 1, 1.0)
        big = 10 ** 18
        z = cycle_from_loop(space, [6 + i for i in range(6)]).scale(big)
        c2, e = neck_contract(space, z, 0.0)
        assert boundary(space.complex, e) == z - c2
        assert e.l1() == 12 * big

    def test_missing_radial(self):
        with pytest.raises(StructuralError):
            neck_contract(OCTA, octa_equator(), 0.0)

    def test_non_monotone_rejected(self):
        # vertex 1 sits above the target but has no downhill neighbor
        k = SimplicialComplex.from_simplices([(0, 1, 2), (0, 2, 3)])
        space = MetricComplex(
            complex=k,
            coords=((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
            radial=(1.0, 1.0, 1.0, 0.5),
        )
        z = cycle_from_loop(space, [0, 1, 2])
        with pytest.raises(DomainError):
            neck_contract(space, z, 2.0)  # outside radial range
        with pytest.raises(StructuralError):
            neck_contract(space, z, 0.75)


class TestDecompose:
    def test_single_region(self):
        space = capped_prism(6, 2, 1.0)
        ring = list(range(1, 7))  # bottom ring, body:0
        z = cycle_from_loop(space, ring)
        pieces = decompose_cycle(space, z)
        assert pieces == [("body:0", z)]

    def test_zero(self):
        space = capped_prism(6, 2, 1.0)
        assert decompose_cycle(space, Chain.zero(1)) == []

    def test_pieces_sum_and_support(self, rng):
        space = capped_prism(6, 3, 1.0)
        for _ in range(15):
            z = _random_cycle(rng, space)
            pieces = decompose_cycle(space, z)
            total = Chain.zero(1)
            for label, piece in pieces:
                assert boundary(space.complex, piece).is_zero()
                total = total + piece
                star = _star_vertices(space, label)
                for idx in piece.support:
                    u, v = space.complex.simplices(1)[idx]
                    assert u in star and v in star
            assert total == z

    def test_labels_required(self):
        with pytest.raises(StructuralError):
            decompose_cycle(OCTA, octa_equator())


def _star_vertices(space, label):
    verts = {v for v in range(space.complex.n_vertices) if space.region[v] == label}
    for (u, v) in space.complex.simplices(1):
        if space.region[u] == label:
            verts.add(v)
        if space.region[v] == label:
            verts.add(u)
    return verts


def _random_cycle(rng, space, parts=1):
    """Sum of fundamental cycles of random non-tree edges (deterministic)."""
    k = space.complex
    n = k.n_vertices
    adj = space.adjacency()
    parent = {0: None}
    order = [0]
    stack = [0]
    while stack:
        v = stack.pop()
        for (w, _) in adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
                stack.append(w)
    tree_edges = set()
    for v, p in parent.items():
        if p is not None:
            tree_edges.add(tuple(sorted((v, p))))
    non_tree = [e for e in k.simplices(1) if e not in tree_edges]
    total = Chain.zero(1)
    for _ in range(parts):
        u, v = non_tree[rng.randrange(len(non_tree))]

        def path_to_root(x):
            out = [x]
            while parent[out[-1]] is not None:
                out.append(parent[out[-1]])
            return out

        pu, pv = path_to_root(u), path_to_root(v)
        su, sv = set(pu), set(pv)
        meet = next(x for x in pu if x in sv)
        walk = [v, u] + pu[1:pu.index(meet) + 1] + list(reversed(pv[1:pv.index(meet)]))
        total = total + path_chain(k, walk + [v])
    return total


class TestProjection:
    def test_zero(self):
        cover = ball_cover(OCTA, 0.8)
        graph = geodesic_graph(OCTA, cover)
        cg, e1, rep = project_cycle_to_graph(OCTA, cover, graph, Chain.zero(1))
        assert cg.is_zero() and e1.is_zero()

    def test_octahedron_equator_is_fixed(self):
        cover = ball_cover(OCTA, 0.8)
        graph = geodesic_graph(OCTA, cover)
        z = octa_equator()
        cg, e1, rep = project_cycle_to_graph(OCTA, cover, graph, z)
        assert graph.realize(OCTA, cg) == z
        assert e1.is_zero()

    def test_exactness_on_icosphere(self, rng):
        space = icosphere(1)
        cover = ball_cover(space, 0.6)
        graph = geodesic_graph(space, cover)
        for _ in range(10):
            z = _random_cycle(rng, space, parts=2)
            cg, e1, rep = project_cycle_to_graph(space, cover, graph, z)
            assert boundary(space.complex, e1) == z - graph.realize(space, cg)

    def test_cover_too_fine(self):
        cover = ball_cover(OCTA, 0.1)  # singleton sets contain no edge
        graph = geodesic_graph(OCTA, cover)
        with pytest.raises(DomainError):
            project_cycle_to_graph(OCTA, cover, graph, octa_equator())


class TestPipeline:
    def test_zero_cycle(self):
        cover = ball_cover(OCTA, 0.8)
        e, report = pipeline_fill(OCTA, cover, Chain.zero(1))
        assert e.is_zero()
        assert report.total_mass2 == 0.0
        assert report.measured_f1 is None
        assert report.boundary_verified

    def test_single_triangle_space(self):
        k = SimplicialComplex.from_simplices([(0, 1, 2)])
        space = MetricComplex(
            complex=k, coords=((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
        )
        z = boundary(k, chain_from_simplices(k, 2, [((0, 1, 2), 1)]))
        cover = ball_cover(space, 2.0)
        e, report = pipeline_fill(space, cover, z)
        assert boundary(k, e) == z
        assert report.measured_f1 == pytest.approx(
            space.mass2(e) / space.mass1(z)
        )

    def test_octahedron_equator(self):
        cover = ball_cover(OCTA, 0.8)
        z = octa_equator()
        e, report = pipeline_fill(OCTA, cover, z)
        assert boundary(OCTA.complex, e) == z
        assert report.total_mass2 <= 10.0 * report.input_mass1
        _, optimum = min_mass_fill(OCTA.complex, OCTA.volumes, z)
        assert report.total_mass2 >= optimum - 1e-9
        assert report.total_mass2 == pytest.approx(
            report.mass_e0 + report.mass_e1 + report.mass_e2, rel=1e-9
        )
        assert report.amin_bound == pytest.approx(60.0 * report.total_mass2)

    def test_exactness_randomized_shapes(self, rng):
        spaces = [
            (octahedron(1.0), 0.8),
            (icosphere(1), 0.6),
            (capped_prism(6, 2, 1.0), 1.2),
        ]
        for space, radius in spaces:
            cover = ball_cover(space, radius)
            for _ in range(6):
                z = _random_cycle(rng, space, parts=rng.randint(1, 2))
                e, report = pipeline_fill(space, cover, z)
                assert boundary(space.complex, e) == z
                assert report.boundary_verified

    def test_nontrivial_h1_rejected(self):
        space = prism(6, 1, 1.0)
        cover = ball_cover(space, 1.5)
        z = cycle_from_loop(space, list(range(6)))
        with pytest.raises(DomainError):
            pipeline_fill(space, cover, z)


def tall_composite(n=6, rings=7):
    """Three bodies joined by two necks: cap | neck | band | neck | cap."""
    ring_label = ["body:0", "neck:0", "neck:0", "body:1", "neck:1", "neck:1", "body:2"]
    coords, radial, region = [(0.0, 0.0, -1.0)], [-1.0], ["body:0"]
    for j in range(rings):
        for i in range(n):
            th = 2 * math.pi * i / n
            coords.append((math.cos(th), math.sin(th), float(j)))
            radial.append(float(j))
            region.append(ring_label[j])
    top = len(coords)
    coords.append((0.0, 0.0, float(rings)))
    radial.append(float(rings))
    region.append("body:2")

    def rv(j, i):
        return 1 + j * n + (i % n)

    faces = [(0, rv(0, i), rv(0, i + 1)) for i in range(n)]
    for j in range(rings - 1):
        for i in range(n):
            a, b, c, d = rv(j, i), rv(j, i + 1), rv(j + 1, i + 1), rv(j + 1, i)
            faces += [(a, b, c), (a, c, d)]
    faces += [(top, rv(rings - 1, i), rv(rings - 1, i + 1)) for i in range(n)]
    space = MetricComplex(
        complex=SimplicialComplex.from_simplices(faces, n_vertices=len(coords)),
        coords=tuple(coords),
        radial=tuple(radial),
        region=tuple(region),
    )
    return space, rv, top


class TestTallComposite:
    def test_decompose_meridian(self):
        space, rv, top = tall_composite()
        up = [0] + [rv(j, 0) for j in range(7)] + [top]
        down = [top] + [rv(j, 3) for j in reversed(range(7))] + [0]
        z = path_chain(space.complex, up + down[1:])
        pieces = decompose_cycle(space, z)
        assert [l for l, _ in pieces] == ["body:0", "body:2", "neck:0", "neck:1"]
        total = Chain.zero(1)
        for label, piece in pieces:
            assert boundary(space.complex, piece).is_zero()
            total = total + piece
            star = _star_vertices(space, label)
            for idx in piece.support:
                u, v = space.complex.simplices(1)[idx]
                assert u in star and v in star
        assert total == z

    def test_pipeline_through_two_necks(self):
        space, rv, top = tall_composite()
        cover = ball_cover(space, 1.3)
        up = [0] + [rv(j, 0) for j in range(7)] + [top]
        down = [top] + [rv(j, 3) for j in reversed(range(7))] + [0]
        z = path_chain(space.complex, up + down[1:])
        e, rep = pipeline_fill(space, cover, z)
        assert boundary(space.complex, e) == z
        # ring inside the upper neck contracts down into the middle body
        ring = path_chain(space.complex, [rv(4, i) for i in range(6)] + [rv(4, 0)])
        e2, rep2 = pipeline_fill(space, cover, ring)
        assert boundary(space.complex, e2) == ring
        assert rep2.mass_e0 > 0


class TestHugeCoefficients:
    def test_pipeline_at_coefficient_1e20(self):
        big = 10 ** 20
        cover = ball_cover(OCTA, 0.8)
        z = octa_equator().scale(big)
        e, rep = pipeline_fill(OCTA, cover, z)
        assert boundary(OCTA.complex, e) == z
        # coefficients of this size survive exactly (stage sums may shave
        # a unit off the top, but nothing rounds or wraps)
        assert e.max_abs() >= big - 10
        assert rep.input_mass1 == pytest.approx(big * 4 * math.sqrt(2), rel=1e-9)


class TestScaleEquivariance:
    @pytest.mark.parametrize("t", [0.5, 2.0])
    def test_masses_and_chains_scale(self, t, rng):
        space = icosphere(1)
        scaled = scale_coordinates(space, t)
        cover = ball_cover(space, 0.6)
        cover_scaled = ball_cover(scaled, 0.6 * t)
        assert cover.sets == cover_scaled.sets
        for _ in range(4):
            z = _random_cycle(rng, space, parts=1)
            e, rep = pipeline_fill(space, cover, z)
            e2, rep2 = pipeline_fill(scaled, cover_scaled, z)
            assert e == e2  # integer chains unchanged
            assert rep2.input_mass1 == pytest.approx(t * rep.input_mass1, rel=1e-9)
            assert rep2.total_mass2 == pytest.approx(t * t * rep.total_mass2, rel=1e-9)

    def test_diameter_scales(self):
        space = octahedron(1.0)
        assert skeleton_diameter(space) == pytest.approx(2 * math.sqrt(2))
        assert skeleton_diameter(scale_coordinates(space, 2.0)) == pytest.approx(
            4 * math.sqrt(2)
        )

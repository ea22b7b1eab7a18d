import itertools
import random

import pytest

from clusterlab.annulus import (
    MarkedAnnulus,
    arc_check,
    arc_from_json,
    arc_to_json,
    arc_variable_map,
    candidate_arcs,
    classify_arc,
    crossing_number,
    deck_chord,
    flip,
    flip_bfs,
    flip_state,
    initial_state,
    initial_triangulation,
    lift_triangulation,
    make_arc,
    ptolemy_relation,
    quiver_of,
    reach_state,
    triangles,
    triangulation,
    triangulation_from_json,
    triangulation_to_json,
    variable_of_arc,
    verify_cover_flip,
)
from clusterlab.engine import denominator_vector, initial_seed, mutate_seed
from clusterlab.errors import InvalidArc, MalformedTriangulation
from clusterlab.laurent import LaurentPoly, coordinates
from clusterlab.quiver import are_isomorphic, classify_tilde_A, tilde_A_canonical


@pytest.fixture
def ann11():
    return MarkedAnnulus(1, 1)


@pytest.fixture
def ann21():
    return MarkedAnnulus(2, 1)


@pytest.fixture
def ann32():
    return MarkedAnnulus(3, 2)


class TestArcValidity:
    def test_boundary_segment(self, ann32):
        ok, reason = arc_check(ann32, (0, 0), (0, 1))
        assert not ok and reason == "boundary segment"

    def test_contractible(self, ann32):
        ok, reason = arc_check(ann32, (0, 2), (0, 2))
        assert not ok and "contractible" in reason

    def test_overlong_peripheral_self_crosses(self, ann32):
        ok, reason = arc_check(ann32, (0, 0), (0, 5))
        assert not ok and "deck translates" in reason

    def test_full_loop_is_valid(self, ann32):
        ok, _ = arc_check(ann32, (0, 0), (0, 3))
        assert ok

    def test_bridging_any_winding(self, ann32):
        for winding in range(-3, 4):
            ok, _ = arc_check(ann32, (0, 0), (1, winding))
            assert ok

    def test_make_arc_rejects_invalid(self, ann32):
        with pytest.raises(InvalidArc):
            make_arc(ann32, (0, 0), (0, 1))

    def test_canonicalization(self, ann32):
        # translates collapse to one representative, anchored in the window
        a = make_arc(ann32, (0, 3), (1, 2))
        b = make_arc(ann32, (0, 0), (1, 0))
        assert a == b
        assert 0 <= a.e1[1] < 3


class TestCrossingNumbers:
    def test_self_crossing_zero(self, ann11):
        arc = make_arc(ann11, (0, 0), (1, 3))
        assert crossing_number(arc, arc, ann11) == 0

    def test_bridging_pair(self, ann11):
        a = make_arc(ann11, (0, 0), (1, 0))
        b = make_arc(ann11, (0, 0), (1, 2))
        assert crossing_number(a, b, ann11) == 1

    def test_peripheral_pair(self, ann32):
        a = make_arc(ann32, (0, 0), (0, 2))
        b = make_arc(ann32, (0, 1), (0, 3))
        assert crossing_number(a, b, ann32) == 1

    def test_symmetry_and_deck_invariance(self, ann32):
        rng = random.Random(13)
        pool = candidate_arcs(ann32, winding=2)
        for _ in range(200):
            a, b = rng.choice(pool), rng.choice(pool)
            value = crossing_number(a, b, ann32)
            assert value == crossing_number(b, a, ann32)
            shifted_a = make_arc(ann32, *deck_chord(a.chord, 3, ann32))
            shifted_b = make_arc(ann32, *deck_chord(b.chord, 3, ann32))
            assert value == crossing_number(shifted_a, shifted_b, ann32)

    def test_opposite_boundary_peripherals_never_cross(self):
        ann = MarkedAnnulus(3, 3)
        outer = [a for a in candidate_arcs(ann) if classify_arc(a) == ("peripheral", 0)]
        inner = [a for a in candidate_arcs(ann) if classify_arc(a) == ("peripheral", 1)]
        assert outer and inner
        for a in outer:
            for b in inner:
                assert crossing_number(a, b, ann) == 0

    def test_winding_difference_counts(self, ann11):
        base = make_arc(ann11, (0, 0), (1, 0))
        for w in range(2, 6):
            far = make_arc(ann11, (0, 0), (1, w))
            assert crossing_number(base, far, ann11) == w - 1


class TestClassifyArc:
    def test_bridging(self, ann11):
        assert classify_arc(make_arc(ann11, (0, 0), (1, 0))) == ("bridging", None)

    def test_peripheral_outer(self, ann32):
        assert classify_arc(make_arc(ann32, (0, 0), (0, 2))) == ("peripheral", 0)

    def test_flip_of_inner_fan_arc_is_inner_peripheral(self, ann32):
        tri = initial_triangulation(ann32)
        result = flip(tri, 3)
        assert classify_arc(result.new_arc) == ("peripheral", 1)


class TestInitialTriangulation:
    def test_smallest_annulus(self, ann11):
        tri = initial_triangulation(ann11)
        assert set(tri.arcs) == {
            make_arc(ann11, (0, 0), (1, 0)),
            make_arc(ann11, (0, 1), (1, 0)),
        }

    def test_counts(self):
        for p in range(1, 5):
            for q in range(1, 5):
                tri = initial_triangulation(MarkedAnnulus(p, q))
                assert len(tri.arcs) == p + q

    def test_gives_double_arrow(self, ann11):
        assert are_isomorphic(quiver_of(initial_triangulation(ann11)), tilde_A_canonical(1, 1))

    def test_pairwise_compatible(self, ann32):
        tri = initial_triangulation(ann32)
        for a, b in itertools.combinations(tri.arcs, 2):
            assert crossing_number(a, b, ann32) == 0


class TestTriangles:
    def test_counts_match_rank(self):
        for p, q in ((1, 1), (2, 1), (3, 2)):
            ann = MarkedAnnulus(p, q)
            assert len(triangles(initial_triangulation(ann))) == p + q

    def test_smallest_annulus_structure(self, ann11):
        tri = initial_triangulation(ann11)
        for triangle in triangles(tri):
            arcs = [s for s in triangle.sides if s is not None]
            assert sorted(arcs) == sorted(tri.arcs)
            assert sum(1 for s in triangle.sides if s is None) == 1

    def test_every_arc_on_two_triangles(self, ann32):
        tri = initial_triangulation(ann32)
        counts = {arc: 0 for arc in tri.arcs}
        for triangle in triangles(tri):
            for side in triangle.sides:
                if side is not None:
                    counts[side] += 1
        assert all(count == 2 for count in counts.values())

    def test_maximality(self, ann21):
        tri = initial_triangulation(ann21)
        for candidate in candidate_arcs(ann21, winding=2):
            if candidate in tri.arc_set:
                continue
            assert any(crossing_number(candidate, a, ann21) > 0 for a in tri.arcs)

    def test_rejects_undersized_collections(self, ann21):
        with pytest.raises(MalformedTriangulation):
            triangulation(ann21, [make_arc(ann21, (0, 0), (1, 0))])

    def test_rejects_crossing_pair(self, ann11):
        with pytest.raises(MalformedTriangulation):
            triangulation(
                ann11,
                [make_arc(ann11, (0, 0), (1, 0)), make_arc(ann11, (0, 0), (1, 2))],
            )


class TestQuiverExtraction:
    def test_classification(self):
        for p, q in ((2, 1), (3, 2)):
            label = classify_tilde_A(quiver_of(initial_triangulation(MarkedAnnulus(p, q))))
            assert (label.p, label.q) == (p, q)

    def test_flip_commutes_with_mutation(self, ann32):
        tri = initial_triangulation(ann32)
        quiver = quiver_of(tri)
        for i in range(len(tri.arcs)):
            assert quiver_of(flip(tri, i).triangulation) == quiver.mutate(i)

    def test_commutation_from_flipped_start(self, ann21):
        tri = flip(initial_triangulation(ann21), 1).triangulation
        quiver = quiver_of(tri)
        for i in range(len(tri.arcs)):
            assert quiver_of(flip(tri, i).triangulation) == quiver.mutate(i)


class TestFlip:
    def test_involution(self, ann32):
        tri = initial_triangulation(ann32)
        for i in range(len(tri.arcs)):
            once = flip(tri, i)
            back = flip(once.triangulation, i)
            assert back.triangulation.arcs == tri.arcs
            assert back.new_arc == tri.arcs[i]

    def test_worked_example_shape(self, ann32):
        # flipping the inner fan arc gives the quad with two inner boundary
        # sides and the two extreme fan arcs as the opposite pair
        tri = initial_triangulation(ann32)
        result = flip(tri, 3)
        boundary = sum(1 for pair in result.pairs for s in pair if s is None)
        assert boundary == 2
        interior = {s for pair in result.pairs for s in pair if s is not None}
        assert interior == {tri.arcs[0], tri.arcs[4]}

    def test_smallest_annulus_stays_double_arrow(self, ann11):
        tri = initial_triangulation(ann11)
        for i in range(2):
            flipped = flip(tri, i).triangulation
            assert are_isomorphic(quiver_of(flipped), tilde_A_canonical(1, 1))

    def test_randomized_involution(self):
        rng = random.Random(23)
        states = {
            (p, q): initial_triangulation(MarkedAnnulus(p, q))
            for p, q in ((1, 1), (2, 1), (3, 2))
        }
        for _ in range(200):
            p, q = rng.choice(list(states))
            tri = states[(p, q)]
            i = rng.randrange(p + q)
            once = flip(tri, i)
            assert flip(once.triangulation, i).triangulation.arcs == tri.arcs
            if rng.random() < 0.5:
                states[(p, q)] = once.triangulation  # drift to new triangulations


class TestPtolemy:
    def test_worked_example_values(self, ann32):
        tri = initial_triangulation(ann32)
        x = coordinates(5)
        relation = ptolemy_relation(tri, 3, dict(zip(tri.arcs, x)))
        assert relation.rhs == x[0] + x[4]

    def test_all_boundary_quad_on_smallest_annulus(self, ann11):
        tri = initial_triangulation(ann11)
        x = coordinates(2)
        relation = ptolemy_relation(tri, 0, dict(zip(tri.arcs, x)))
        assert relation.rhs == x[1] * x[1] + 1

    def test_matches_exchange_everywhere(self):
        for p, q in ((1, 1), (2, 1), (3, 2)):
            ann = MarkedAnnulus(p, q)
            tri = initial_triangulation(ann)
            for _ in range(3):
                seed = initial_seed(quiver_of(tri))
                assignment = dict(zip(tri.arcs, seed.cluster))
                for i in range(p + q):
                    relation = ptolemy_relation(tri, i, assignment)
                    mutated = mutate_seed(seed, i)
                    assert seed.cluster[i] * mutated.cluster[i] == relation.rhs
                tri = flip(tri, (p + q) // 2).triangulation

    def test_missing_assignment(self, ann11):
        tri = initial_triangulation(ann11)
        with pytest.raises(KeyError):
            ptolemy_relation(tri, 0, {tri.arcs[0]: LaurentPoly.one(2)})


class TestVariableOfArc:
    def test_initial_arcs_are_coordinates(self, ann32):
        tri = initial_triangulation(ann32)
        for i, arc in enumerate(tri.arcs):
            assert variable_of_arc(ann32, arc) == coordinates(5)[i]

    def test_winding_arc_convention(self, ann11):
        # one flip away from the fan; this package's fan ordering puts the
        # x2-denominator variable here
        x1, x2 = coordinates(2)
        value = variable_of_arc(ann11, make_arc(ann11, (0, 0), (1, 1)))
        assert value == LaurentPoly(2, {(2, -1): 1, (0, -1): 1})

    def test_tiebreak_invariance(self, ann21):
        rng = random.Random(31)
        arcs = [a for a in candidate_arcs(ann21, winding=2)][:10]
        for arc in arcs:
            baseline = variable_of_arc(ann21, arc)
            for _ in range(3):
                assert variable_of_arc(ann21, arc, rng=rng) == baseline

    def test_denominator_matches_crossings(self, ann21):
        # denominator entries are positive exactly at the crossed initial arcs
        tri = initial_triangulation(ann21)
        for arc in candidate_arcs(ann21, winding=2):
            value = variable_of_arc(ann21, arc)
            denominator = denominator_vector(value)
            for i, initial in enumerate(tri.arcs):
                crossed = crossing_number(arc, initial, ann21) > 0
                assert (denominator[i] > 0) == crossed


class TestLockstep:
    def test_flip_bfs_correspondence_is_single_valued(self, ann21):
        nodes = flip_bfs(ann21, 3)
        varmap = arc_variable_map(nodes)
        assert len(set(varmap.values())) == len(varmap)

    def test_reach_state_agrees_with_bfs(self, ann21):
        nodes = flip_bfs(ann21, 3)
        sample = sorted(nodes, key=lambda key: tuple(sorted(key)))[::5]
        for key in sample:
            node = nodes[key]
            reached = reach_state(ann21, node.state.tri)
            assert reached.tri == node.state.tri
            assert set(reached.seed.cluster) == set(node.state.seed.cluster)


class TestLiftedTriangulations:
    def test_lift_count(self, ann11):
        assert len(lift_triangulation(initial_triangulation(ann11), 3)) == 6

    def test_window_validation(self, ann11):
        with pytest.raises(ValueError):
            lift_triangulation(initial_triangulation(ann11), 1)

    def test_cover_flip_on_fan(self, ann32):
        tri = initial_triangulation(ann32)
        assert verify_cover_flip(tri, 4, 4)
        assert verify_cover_flip(tri, 3, 4)

    def test_cover_flip_randomized(self):
        rng = random.Random(41)
        ann = MarkedAnnulus(2, 2)
        state = initial_state(ann)
        for _ in range(20):
            if rng.random() < 0.6:
                state, _ = flip_state(state, rng.randrange(4))
            assert verify_cover_flip(state.tri, rng.randrange(4), 3)


class TestSerialization:
    def test_arc_roundtrip(self, ann32):
        arc = make_arc(ann32, (0, 1), (1, -2))
        assert arc_from_json(ann32, arc_to_json(arc)) == arc

    def test_triangulation_roundtrip(self, ann32):
        tri = initial_triangulation(ann32)
        assert triangulation_from_json(triangulation_to_json(tri)) == tri

import random

import pytest

from clusterlab.errors import LimitExceeded
from clusterlab.quiver import (
    Quiver,
    are_isomorphic,
    canonical_form,
    classify_tilde_A,
    isomorphism,
    mutation_class,
    quiver_from_json,
    quiver_to_dot,
    quiver_to_json,
    tilde_A_canonical,
)


def arrow_step_mutation(n, arrows, k):
    """Reference mutation executed literally on the arrow multiset: reverse
    arrows at k, add one composite per path through k, then cancel 2-cycles
    one by one.  Independent of the matrix rule it checks."""
    incoming = [(s, t) for (s, t) in arrows if t == k]
    outgoing = [(s, t) for (s, t) in arrows if s == k]
    new = [((t, s) if s == k or t == k else (s, t)) for (s, t) in arrows]
    new.extend((s, t2) for (s, _) in incoming for (_, t2) in outgoing)
    cancelled = True
    while cancelled:
        cancelled = False
        for pair in list(new):
            back = (pair[1], pair[0])
            if back in new:
                new.remove(pair)
                new.remove(back)
                cancelled = True
                break
    return Quiver.from_arrows(n, new)


def random_quiver(rng, n, max_arrows=6):
    while True:
        arrows = []
        for _ in range(rng.randrange(1, max_arrows + 1)):
            s, t = rng.sample(range(n), 2)
            arrows.append((s, t))
        try:
            return Quiver.from_arrows(n, arrows)
        except ValueError:
            continue  # drew a 2-cycle; redraw


class TestMutation:
    def test_path_mutated_at_middle(self):
        path = Quiver.from_arrows(3, [(0, 1), (1, 2)])
        mutated = path.mutate(1)
        assert sorted(mutated.arrows()) == [(0, 2), (1, 0), (2, 1)]

    def test_double_arrow_reverses(self):
        kron = tilde_A_canonical(1, 1)
        assert kron.mutate(0) == kron.opposite()

    def test_matrix_rule_matches_arrow_steps(self):
        rng = random.Random(11)
        for _ in range(200):
            n = rng.randrange(2, 6)
            quiver = random_quiver(rng, n)
            k = rng.randrange(n)
            assert quiver.mutate(k) == arrow_step_mutation(n, quiver.arrows(), k)

    def test_involution(self):
        rng = random.Random(5)
        for _ in range(200):
            quiver = random_quiver(rng, rng.randrange(2, 6))
            k = rng.randrange(quiver.n)
            assert quiver.mutate(k).mutate(k) == quiver

    def test_invariants_preserved(self):
        rng = random.Random(6)
        for _ in range(100):
            quiver = random_quiver(rng, 4)
            mutated = quiver.mutate(rng.randrange(4))
            Quiver(mutated.b)  # constructor revalidates loop-freedom and skew symmetry

    def test_opposite_commutes_with_mutation(self):
        rng = random.Random(7)
        for _ in range(100):
            quiver = random_quiver(rng, 4)
            k = rng.randrange(4)
            assert quiver.opposite().mutate(k) == quiver.mutate(k).opposite()

    def test_index_range(self):
        with pytest.raises(ValueError):
            tilde_A_canonical(1, 1).mutate(2)


class TestOpposite:
    def test_single_arrow(self):
        assert Quiver.from_arrows(2, [(0, 1)]).opposite() == Quiver.from_arrows(2, [(1, 0)])

    def test_involution(self):
        quiver = tilde_A_canonical(3, 2)
        assert quiver.opposite().opposite() == quiver

    def test_double_arrow(self):
        kron = tilde_A_canonical(1, 1)
        assert kron.opposite().b == ((0, -2), (2, 0))


class TestIsomorphism:
    def test_self(self):
        quiver = tilde_A_canonical(2, 1)
        assert isomorphism(quiver, quiver) is not None

    def test_relabeling(self):
        a = Quiver.from_arrows(2, [(0, 1)])
        b = Quiver.from_arrows(2, [(1, 0)])
        assert are_isomorphic(a, b)

    def test_multiplicity_distinguishes(self):
        single = Quiver.from_arrows(2, [(0, 1)])
        double = tilde_A_canonical(1, 1)
        assert not are_isomorphic(single, double)

    def test_witness_carries_structure(self):
        rng = random.Random(3)
        for _ in range(50):
            quiver = random_quiver(rng, 5)
            perm = list(range(5))
            rng.shuffle(perm)
            shuffled = quiver.permuted(perm)
            witness = isomorphism(quiver, shuffled)
            assert witness is not None
            assert quiver.permuted(witness) == shuffled

    def test_canonical_form_is_permutation_invariant(self):
        rng = random.Random(4)
        for _ in range(50):
            quiver = random_quiver(rng, 5)
            perm = list(range(5))
            rng.shuffle(perm)
            assert canonical_form(quiver) == canonical_form(quiver.permuted(perm))


class TestCanonicalQuivers:
    def test_rank_two_is_double_arrow(self):
        assert tilde_A_canonical(1, 1).b == ((0, 2), (-2, 0))

    def test_two_one_splits_cycle(self):
        quiver = tilde_A_canonical(2, 1)
        assert sorted(quiver.arrows()) == [(0, 1), (0, 2), (1, 2)]
        assert quiver.is_acyclic()

    def test_matches_annulus_oracle(self):
        # the annulus fan triangulation is the independent source of truth
        from clusterlab.annulus import MarkedAnnulus, initial_triangulation, quiver_of

        for p, q in ((1, 1), (2, 1), (2, 2), (3, 2)):
            oracle = quiver_of(initial_triangulation(MarkedAnnulus(p, q)))
            label = classify_tilde_A(oracle)
            assert (label.p, label.q) == (p, q)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            tilde_A_canonical(1, 2)
        with pytest.raises(ValueError):
            tilde_A_canonical(1, 0)


class TestMutationClass:
    def test_double_arrow_class_is_singleton(self):
        kron = tilde_A_canonical(1, 1)
        assert mutation_class(kron, 10) == {canonical_form(kron)}

    def test_a2_class_is_singleton(self):
        a2 = Quiver.from_arrows(2, [(0, 1)])
        assert mutation_class(a2, 10) == {canonical_form(a2)}

    def test_reflexive(self):
        quiver = tilde_A_canonical(2, 1)
        assert canonical_form(quiver) in mutation_class(quiver, 1000)

    def test_limit_enforced(self):
        with pytest.raises(LimitExceeded):
            mutation_class(tilde_A_canonical(3, 2), 2)


class TestClassify:
    def test_double_arrow(self):
        label = classify_tilde_A(tilde_A_canonical(1, 1))
        assert (label.p, label.q) == (1, 1)

    def test_mutation_preserves_type(self):
        quiver = tilde_A_canonical(3, 2)
        assert classify_tilde_A(quiver.mutate(4)) == classify_tilde_A(quiver)

    def test_a2_is_other(self):
        assert not classify_tilde_A(Quiver.from_arrows(2, [(0, 1)])).is_tilde_a

    def test_a3_path_is_other(self):
        path = Quiver.from_arrows(3, [(0, 1), (1, 2)])
        assert not classify_tilde_A(path).is_tilde_a

    def test_mutation_invariance_sample(self):
        rng = random.Random(9)
        quiver = tilde_A_canonical(2, 2)
        expected = classify_tilde_A(quiver)
        for _ in range(12):
            quiver = quiver.mutate(rng.randrange(quiver.n))
            assert classify_tilde_A(quiver) == expected

    def test_json_shape(self):
        assert classify_tilde_A(tilde_A_canonical(2, 1)).to_json() == {
            "type": "TildeA",
            "p": 2,
            "q": 1,
        }
        assert classify_tilde_A(Quiver.from_arrows(2, [(0, 1)])).to_json() == {
            "type": "Other"
        }


class TestSerialization:
    def test_roundtrip(self):
        quiver = tilde_A_canonical(3, 2)
        assert quiver_from_json(quiver_to_json(quiver)) == quiver

    def test_multiplicity_kept(self):
        kron = tilde_A_canonical(1, 1)
        assert quiver_to_json(kron)["arrows"] == [[0, 1], [0, 1]]

    def test_dot_mentions_all_arrows(self):
        dot = quiver_to_dot(tilde_A_canonical(2, 1))
        assert dot.count("->") == 3

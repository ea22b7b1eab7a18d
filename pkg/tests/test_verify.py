import pytest

from clusterlab.annulus import MarkedAnnulus
from clusterlab.engine import initial_seed, mutate_seed
from clusterlab.errors import (
    CounterexampleFound,
    HypothesisNotSatisfied,
    SideConditionViolated,
)
from clusterlab.laurent import coordinates
from clusterlab.quiver import tilde_A_canonical
from clusterlab.verify import (
    check_dichotomy,
    max_peripheral_crossing,
    report_bridging_chain_formal,
    report_crossing_quadrilateral,
    report_peripheral_chain_formal,
    report_unistructurality,
    run_report,
)


class TestDichotomy:
    def test_rank_two_instance(self):
        x1, x2 = coordinates(2)
        mutated = mutate_seed(initial_seed(tilde_A_canonical(1, 1)), 0)
        x1p = mutated.cluster[0]
        report = check_dichotomy(x1, x1p, [[[x2, x2], []]], [x1p, x2], "a")
        assert report.passed
        assert report.witness["x1_in_cluster"] == "False"

    def test_degenerate_single_term_rejected(self):
        x1, x2 = coordinates(2)
        with pytest.raises(SideConditionViolated):
            check_dichotomy(x1, x2, [[[x1, x2]]], [x1, x2], "a")

    def test_wrong_hypothesis_rejected(self):
        x1, x2 = coordinates(2)
        with pytest.raises(HypothesisNotSatisfied):
            check_dichotomy(x1, x2, [[[x2, x2]]], [x1, x2], "a")

    def test_both_members_is_a_counterexample(self):
        # a rigged two-term identity whose factors both sit in the reference set
        x1, x2 = coordinates(2)
        sigma = [[x1, x2 - 1], [x1]]
        with pytest.raises(CounterexampleFound):
            check_dichotomy(x1, x2, [sigma], [x1, x2], "a")

    def test_variant_b_formal_instance(self):
        report = run_report("lemma31")[0]
        assert report.passed


class TestFormalChains:
    def test_peripheral_chain(self):
        report = report_peripheral_chain_formal()
        assert report.passed
        assert len(report.notes) == 2  # both unprimed displays break the chain

    def test_bridging_chains(self):
        for n in (2, 3, 4):
            assert report_bridging_chain_formal(n).passed

    def test_bridging_chain_validates_n(self):
        with pytest.raises(ValueError):
            report_bridging_chain_formal(5)


class TestQuadrilateral:
    def test_smallest_instance(self):
        report = report_crossing_quadrilateral(2, 1)
        assert report.passed

    def test_boundary_degeneration(self):
        report = report_crossing_quadrilateral(3, 2, want_boundary_sides=2)
        assert report.passed
        assert report.context["boundary_sides"] == 2

    def test_loop_diagonal_instance(self):
        report = report_crossing_quadrilateral(1, 2, want_loop=True)
        assert report.passed
        assert report.context["loop"]


class TestGeometricChain:
    def test_four_one(self):
        report = run_report("case2-geometric", p=4, q=1, depth=6)[0]
        assert report.passed
        assert report.witness["crossing"] == "2"

    def test_peripheral_crossing_ceiling(self):
        assert max_peripheral_crossing(MarkedAnnulus(4, 2)) == 2

    def test_small_boundary_rejected(self):
        with pytest.raises(ValueError):
            run_report("case2-geometric", p=2, q=1)


class TestInduction:
    def test_two_two_K4(self):
        report = run_report("induction", p=2, q=2, K=4)[0]
        assert report.passed

    def test_K_validation(self):
        with pytest.raises(ValueError):
            run_report("induction", K=2)


class TestRecoveryAndUniqueness:
    @pytest.mark.parametrize("p,q,depth", [(1, 1, 3), (2, 1, 4), (3, 2, 3)])
    def test_quiver_recovery(self, p, q, depth):
        report = run_report("quiver-recovery", p=p, q=q, depth=depth)[0]
        assert report.passed
        assert report.witness["orientation"] in ("same", "opposite")

    def test_unistructurality_smallest(self):
        report = report_unistructurality(1, 1, 5)
        assert report.passed
        assert report.witness["compatible_subsets"] == "11"
        assert report.witness["clusters"] == "11"

    def test_unistructurality_two_one(self):
        report = report_unistructurality(2, 1, 4)
        assert report.passed
        assert int(report.witness["witnessed_by_flip_path"]) > 0


class TestCoverFlipReport:
    def test_small_sample(self):
        report = run_report("cover-flip", rng_seed=3)[0]
        assert report.passed

    def test_unknown_report_name(self):
        with pytest.raises(ValueError):
            run_report("no-such-report")

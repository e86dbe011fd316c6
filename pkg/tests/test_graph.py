import itertools
import json

import pytest

from dofam import (
    Bdmg,
    SeparationQuery,
    acyclify,
    classify,
    connecting_path,
    d_separated,
    find_pips,
    inseparable_pairs,
    m_separated,
    markov_equivalent,
    random_bdmg,
    separated,
    sigma_separated,
    sigma_separated_oracle,
    squeeze_separation_holds,
)
from dofam.graph import BowError, CriterionError, GraphError, PreconditionError, UnknownNodeError


def chain():
    return Bdmg(["1", "2", "3"], [("1", "2"), ("2", "3")])


def collider():
    return Bdmg(["1", "2", "3"], [("1", "3"), ("2", "3")])


class TestConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            Bdmg(["a"], [("a", "a")])

    def test_rejects_bow(self):
        with pytest.raises(BowError):
            Bdmg(["a", "b"], [("a", "b")], [("a", "b")])

    def test_allows_parallel_arrows(self):
        g = Bdmg(["a", "b"], [("a", "b"), ("b", "a")])
        assert g.arrow_adjacent("a", "b")
        assert not g.is_acyclic()

    def test_unknown_node(self):
        with pytest.raises(UnknownNodeError):
            Bdmg(["a"], [("a", "b")])

    def test_arc_is_unordered(self):
        g1 = Bdmg(["a", "b"], [], [("a", "b")])
        g2 = Bdmg(["a", "b"], [], [("b", "a")])
        assert g1 == g2


class TestAncestors:
    def test_chain(self):
        assert chain().ancestors({"3"}) == {"1", "2"}

    def test_cycle_figure(self, cycle_figure):
        # frozen from an independent reachability pass over the edge list
        assert cycle_figure.ancestors({"k"}) == {"i", "j", "l"}

    def test_empty_graph(self):
        assert Bdmg(["1", "2"]).ancestors({"1"}) == frozenset()

    def test_self_excluded_on_cycle(self, cycle_figure):
        # i lies on a directed cycle but never appears in its own set
        assert "i" not in cycle_figure.ancestors({"i"})
        assert cycle_figure.ancestors({"i"}) == {"j", "k", "l"}

    def test_set_query_subtracts_argument(self, cycle_figure):
        assert cycle_figure.ancestors({"i", "j", "k", "l"}) == frozenset()


class TestStrongComponents:
    def test_chain_singleton(self):
        assert chain().strong_component("2") == {"2"}

    def test_cycle_figure(self, cycle_figure):
        assert cycle_figure.strong_component("i") == {"i", "j", "k", "l"}

    def test_two_cycle_with_isolated(self):
        g = Bdmg(["a", "b", "c"], [("a", "b"), ("b", "a")])
        assert g.strong_component("c") == {"c"}
        assert g.strong_component("a") == {"a", "b"}


class TestAcyclify:
    def test_dag_unchanged(self):
        g = chain()
        assert acyclify(g) == g

    def test_two_cycle_with_parent(self):
        g = Bdmg(["a", "b", "c"], [("a", "b"), ("b", "a"), ("c", "a")])
        out = acyclify(g)
        assert out.arrows == {("c", "a"), ("c", "b")}
        assert out.arcs == {("a", "b")}

    def test_cycle_figure_arc_clique(self, cycle_figure):
        out = acyclify(cycle_figure)
        assert not out.arrows
        assert len(out.arcs) == 6  # all pairs of the four-node component

    def test_idempotent(self):
        for seed in range(25):
            g = random_bdmg(seed, n=5, arrow_density=0.4, arc_density=0.2)
            once = acyclify(g)
            assert acyclify(once) == once

    def test_result_acyclic(self):
        for seed in range(25):
            g = random_bdmg(seed, n=6, arrow_density=0.5, arc_density=0.25)
            assert acyclify(g).is_acyclic()

    def test_ancestor_lemma(self):
        # an_G agrees with an_acy at strong-component resolution: being a
        # non-component ancestor is the same as one's component meeting the
        # acyclified ancestor set.  (The node-level statement fails, e.g.
        # a<->b cycle with b->c: a is an ancestor of c only in the original.)
        for seed in range(60):
            g = random_bdmg(seed, n=(seed % 6) + 2, arrow_density=0.45, arc_density=0.2)
            acy = acyclify(g)
            for i, j in itertools.permutations(g.nodes, 2):
                lhs = i in g.ancestors({j}) and i not in g.strong_component(j)
                rhs = bool(g.strong_component(i) & acy.ancestors({j}))
                assert lhs == rhs, (seed, i, j)

    def test_ancestor_lemma_node_level_counterexample(self):
        g = Bdmg(["a", "b", "c"], [("a", "b"), ("b", "a"), ("b", "c")])
        assert "a" in g.ancestors({"c"})
        assert "a" not in g.strong_component("c")
        assert "a" not in acyclify(g).ancestors({"c"})


class TestSeparation:
    def test_edgeless_always_separated(self):
        g = Bdmg(["1", "2", "3"])
        for crit in ("sigma", "m", "d"):
            assert separated(g, SeparationQuery({"1"}, {"2"}, frozenset(), crit))

    def test_collider(self):
        g = collider()
        assert d_separated(g, {"1"}, {"2"})
        assert not d_separated(g, {"1"}, {"2"}, {"3"})

    def test_nonmax_pair_never_separates(self, nonmax_figure):
        others = ["i", "l", "h"]
        for r in range(len(others) + 1):
            for c in itertools.combinations(others, r):
                assert not sigma_separated(nonmax_figure, {"j"}, {"k"}, c)

    def test_criterion_class_mismatch(self, cycle_figure):
        with pytest.raises(CriterionError):
            d_separated(cycle_figure, {"i"}, {"k"})
        with pytest.raises(CriterionError):
            m_separated(cycle_figure, {"i"}, {"k"})

    def test_query_validation(self):
        with pytest.raises(PreconditionError):
            SeparationQuery(frozenset(), {"1"}, frozenset())
        with pytest.raises(PreconditionError):
            SeparationQuery({"1"}, {"1"}, frozenset())

    def test_criteria_agree_on_dags(self):
        for seed in range(30):
            g = random_bdmg(seed, n=5, arrow_density=0.4, class_constraint="dag")
            for i, j in itertools.combinations(g.nodes, 2):
                rest = [v for v in g.nodes if v not in (i, j)]
                for c in itertools.combinations(rest, 2):
                    d = d_separated(g, {i}, {j}, c)
                    assert d == m_separated(g, {i}, {j}, c)
                    assert d == sigma_separated(g, {i}, {j}, c)

    def test_fast_sigma_matches_path_oracle(self):
        for seed in range(60):
            g = random_bdmg(seed, n=5, arrow_density=0.45, arc_density=0.25)
            for i, j in itertools.combinations(g.nodes, 2):
                rest = [v for v in g.nodes if v not in (i, j)]
                for r in range(len(rest) + 1):
                    for c in itertools.combinations(rest, r):
                        assert sigma_separated(g, {i}, {j}, c) == \
                            sigma_separated_oracle(g, {i}, {j}, c), (seed, i, j, c)

    def test_set_queries(self):
        g = chain()
        assert sigma_separated(g, {"1"}, {"3"}, {"2"})
        assert not sigma_separated(g, {"1", "2"}, {"3"})


class TestConnectingPath:
    def test_collider_witness(self):
        path = connecting_path(collider(), {"1"}, {"2"}, {"3"}, "d")
        assert str(path) == "1 -> 3 <- 2"

    def test_none_when_separated(self):
        assert connecting_path(chain(), {"1"}, {"3"}, {"2"}, "d") is None

    def test_agrees_with_verdict(self):
        for seed in range(20):
            g = random_bdmg(seed, n=4, arrow_density=0.4, arc_density=0.2)
            for i, j in itertools.combinations(g.nodes, 2):
                sep = sigma_separated(g, {i}, {j})
                path = connecting_path(g, {i}, {j}, frozenset(), "sigma")
                assert (path is None) == sep


class TestClassify:
    def test_dag(self):
        c = classify(chain())
        assert c.is_dag and c.is_admg and c.is_ancestral and c.is_maximal
        assert c.inseparable_pairs == ()
        assert c.valid_order is not None

    def test_nonmax_figure(self, nonmax_figure):
        c = classify(nonmax_figure)
        assert not c.is_maximal
        assert c.inseparable_pairs == (("j", "k"),)
        assert c.is_ancestral  # arcs link only an-incomparable pairs here

    def test_two_cycle(self):
        c = classify(Bdmg(["a", "b"], [("a", "b"), ("b", "a")]))
        assert not c.is_admg and not c.is_dag
        assert c.valid_order is None

    def test_class_implications(self):
        for seed in range(40):
            g = random_bdmg(seed, n=5, arrow_density=0.4, arc_density=0.25)
            c = classify(g)
            if c.is_dag:
                assert c.is_ancestral
            if c.is_ancestral:
                assert c.is_admg
            assert c.is_maximal == (not c.inseparable_pairs)

    def test_valid_order_respects_edges(self):
        from dofam import PartialOrder

        for seed in range(30):
            g = random_bdmg(seed, n=5, arrow_density=0.4, arc_density=0.25,
                            class_constraint="ancestral")
            c = classify(g)
            assert c.valid_order is not None
            order = PartialOrder(c.valid_order)
            for (u, v) in g.arrows:
                assert order.less(v, u)  # arrow tail is larger
            for (u, v) in g.arcs:
                assert not order.less(u, v) and not order.less(v, u)


class TestPips:
    def test_nonmax_single_pip(self, nonmax_figure):
        pips = find_pips(nonmax_figure, "j", "k")
        assert len(pips) == 1
        assert pips[0].nodes == ("j", "l", "h", "k")

    def test_dag_no_pips(self):
        g = Bdmg(["1", "2", "3", "4"], [("1", "2"), ("2", "3"), ("1", "4")])
        for i, j in itertools.combinations(g.nodes, 2):
            if not g.adjacent(i, j):
                assert find_pips(g, i, j) == ()

    def test_twopip_figure(self, twopip_figure):
        pips = find_pips(twopip_figure, "j", "k")
        assert len(pips) == 2
        assert {p.nodes for p in pips} == {("j", "l", "h", "k"), ("j", "l2", "h2", "k")}

    def test_inseparable_pairs_have_pips(self):
        for seed in range(60):
            g = random_bdmg(seed, n=5, arrow_density=0.4, arc_density=0.3)
            for (i, j) in inseparable_pairs(g):
                assert find_pips(g, i, j), (seed, i, j)

    def test_same_endpoint_rejected(self):
        with pytest.raises(PreconditionError):
            find_pips(chain(), "1", "1")


class TestMarkovEquivalent:
    def test_reflexive(self, nonmax_figure):
        assert markov_equivalent(nonmax_figure, nonmax_figure)

    def test_acyclification_equivalent(self, cycle_figure):
        assert markov_equivalent(cycle_figure, acyclify(cycle_figure))

    def test_chain_vs_collider(self):
        assert not markov_equivalent(chain(), collider())

    def test_sets_mode_agrees_on_small_graphs(self):
        for seed in range(10):
            g1 = random_bdmg(seed, n=4, arrow_density=0.4, arc_density=0.2)
            g2 = random_bdmg(seed + 100, n=4, arrow_density=0.4, arc_density=0.2)
            assert markov_equivalent(g1, g2) == markov_equivalent(g1, g2, sets_mode=True)

    def test_node_mismatch(self):
        with pytest.raises(PreconditionError):
            markov_equivalent(chain(), Bdmg(["a", "b", "c"]))


class TestSqueeze:
    def test_chain(self):
        assert squeeze_separation_holds(chain(), "1", "3", {"2"})

    def test_collider_empty_set(self):
        assert squeeze_separation_holds(collider(), "1", "2", set())

    def test_precondition_errors(self, cycle_figure):
        with pytest.raises(PreconditionError):
            squeeze_separation_holds(cycle_figure, "i", "k", set())  # not ancestral
        with pytest.raises(PreconditionError):
            squeeze_separation_holds(chain(), "1", "3", {"1"})
        with pytest.raises(PreconditionError):
            squeeze_separation_holds(chain(), "1", "2", set())  # adjacent pair

    def test_exhaustive_on_random_ancestral(self):
        # the lemma itself: every admissible set between pa and an separates
        for seed in range(40):
            g = random_bdmg(seed, n=6, arrow_density=0.35, arc_density=0.2,
                            class_constraint="ancestral")
            for i, j in itertools.combinations(g.nodes, 2):
                if g.adjacent(i, j):
                    continue
                from dofam.graph import separable

                if not separable(g, i, j):
                    continue
                pa = g.parents_of_set({i, j})
                an = g.ancestors({i, j})
                free = sorted(an - pa)
                for r in range(len(free) + 1):
                    for extra in itertools.combinations(free, r):
                        assert squeeze_separation_holds(g, i, j, pa | set(extra))


class TestSerialization:
    def test_round_trip_byte_stable(self, nonmax_figure):
        text = nonmax_figure.to_json()
        again = Bdmg.from_json(text)
        assert again == nonmax_figure
        assert again.to_json() == text

    def test_dot_format(self):
        g = Bdmg(["a", "b", "c"], [("a", "b")], [("b", "c")])
        dot = g.to_dot()
        assert '"a" -> "b";' in dot
        assert '"b" -> "c" [dir=both];' in dot

    def test_from_json_malformed(self):
        with pytest.raises(GraphError):
            Bdmg.from_json_dict({"arrows": []})

    def test_json_keys_sorted(self):
        g = Bdmg(["b", "a"], [("b", "a")])
        assert g.to_json() == json.dumps(json.loads(g.to_json()), sort_keys=True)

import json
import random

import pytest

from cogal.checker import Evaluator, eval_formula
from cogal.formula import (
    Atom, CoalDia, Fragment, Know, fragment, parse, render, size,
)
from cogal.harness import (
    GenParams, axiom_suite, canonical_item_name, enumerate_models,
    find_countermodel, instantiation_pool, prop4_countermodel, prop4_formula,
    prop4_verifies, random_formula, random_model, set_partitions, train_model,
)
from cogal.harness import _modal_depth
from cogal.model import validate


class TestGenParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            GenParams(max_states=0)
        with pytest.raises(ValueError):
            GenParams(agents=())
        with pytest.raises(ValueError):
            GenParams(seed=-1)


class TestRandomModels:
    def test_deterministic(self):
        params = GenParams(seed=9, count=5)
        for i in range(5):
            assert random_model(params, i).to_doc() \
                == random_model(params, i).to_doc()

    def test_distinct_across_indices(self):
        params = GenParams(max_states=4, seed=9, count=1000)
        assert random_model(params, 0).to_doc() != random_model(params, 1).to_doc()
        # small state counts collide by pigeonhole; among the larger models
        # collisions must stay rare
        docs = [json.dumps(random_model(params, i).to_doc(), sort_keys=True)
                for i in range(300)]
        big = [d for d in docs if d.count('"s2"') > 0]
        assert len(set(big)) >= 0.95 * len(big)

    def test_all_generated_models_validate(self):
        params = GenParams(max_states=6, agents=("a", "b", "c"),
                           props=("p", "q"), seed=4, count=1000)
        for i in range(1000):
            model = random_model(params, i)
            assert validate(model.to_doc()).to_doc() == model.to_doc()

    def test_state_counts_span_range(self):
        params = GenParams(max_states=4, seed=2, count=200)
        sizes = {len(random_model(params, i).states) for i in range(200)}
        assert sizes == {1, 2, 3, 4}


class TestEnumeration:
    def test_single_state_vocabulary(self):
        models = list(enumerate_models(("a",), ("p",), 1))
        assert len(models) == 2  # p true or false at the only state

    def test_two_state_count_matches_closed_form(self):
        # partitions of a 2-element set (2) times valuations (2^2)
        models = [m for m in enumerate_models(("a",), ("p",), 2)
                  if len(m.states) == 2]
        assert len(models) == 2 * 4

    def test_includes_indistinguishable_pair(self):
        found = False
        for m in enumerate_models(("a",), ("p",), 2):
            if len(m.states) == 2 and len(m.partitions["a"]) == 1 \
                    and len(m.truth_set("p")) == 1:
                found = True
        assert found

    def test_partition_count(self):
        assert len(list(set_partitions(("x", "y", "z")))) == 5  # Bell(3)


class TestPool:
    def test_bounds(self):
        pool = instantiation_pool(("a", "b", "c"), ("p", "q"))
        assert len(pool) > 100
        for f in pool:
            assert size(f) <= 9
            assert _modal_depth(f) <= 2
            assert fragment(f) is Fragment.EL

    def test_deterministic_order(self):
        assert instantiation_pool(("a", "b"), ("p",)) \
            == instantiation_pool(("a", "b"), ("p",))


class TestSearch:
    def test_valid_formula_has_no_countermodel(self):
        hit = find_countermodel(parse("K a p -> p"),
                                GenParams(max_states=2, agents=("a",),
                                          props=("p",), count=100))
        assert hit is None

    def test_finds_two_state_countermodel(self):
        hit = find_countermodel(parse("p -> K a p"),
                                GenParams(max_states=2, agents=("a",),
                                          props=("p",), count=100))
        assert hit is not None
        model = hit.pointed.model
        assert len(model.states) == 2
        assert len(model.partitions["a"]) == 1
        assert eval_formula(model, hit.pointed.point, parse("p -> K a p")) \
            is False

    def test_schematic_atoms(self):
        pool = (Atom("p"), Know("a", Atom("p")))
        hit = find_countermodel(parse("x -> K a x"),
                                GenParams(max_states=2, agents=("a",),
                                          props=("p",), count=100),
                                schematic=("x",), pool=pool)
        assert hit is not None
        assert set(hit.assignment) == {"x"}
        assert "x" not in hit.pointed.model.props

    def test_random_fallback_beyond_exhaustive_bound(self):
        hit = find_countermodel(parse("K a (p & q) -> K a p & K a q"),
                                GenParams(max_states=4, agents=("a",),
                                          props=("p", "q"), seed=1, count=40))
        assert hit is None

    def test_search_refutes_coalition_splitting(self):
        """Bounded random search independently rediscovers a countermodel to
        the splitting implication the shipped construction refutes."""
        goal = prop4_formula()
        split = CoalDia(frozenset({"a"}),
                        CoalDia(frozenset({"b"}), goal))
        joint = CoalDia(frozenset({"a", "b"}), goal)
        from cogal.formula import Imp
        hit = find_countermodel(Imp(joint, split),
                                GenParams(max_states=4,
                                          agents=("a", "b", "c"),
                                          props=("p", "q", "r"),
                                          seed=0, count=100))
        assert hit is not None
        ev = Evaluator(hit.pointed.model)
        assert ev.eval(hit.pointed.point, joint) is True
        assert ev.eval(hit.pointed.point, split) is False


class TestProp4:
    def test_shipped_model_verifies(self):
        model, state = prop4_countermodel()
        assert len(model.agents) == 3
        assert len(model.props) == 3
        assert prop4_verifies(model, state)

    def test_goal_formula_shape(self):
        goal = prop4_formula()
        assert render(goal) == ("K b (p & q & r) & ~K a (p & q & r) "
                                "& ~K c (p & q & r)")

    def test_split_fails_while_joint_succeeds(self):
        model, state = prop4_countermodel()
        goal = prop4_formula()
        joint = CoalDia(frozenset({"a", "b"}), goal)
        split = CoalDia(frozenset({"a"}), CoalDia(frozenset({"b"}), goal))
        ev = Evaluator(model)
        assert ev.eval(state, joint) is True
        assert ev.eval(state, split) is False


class TestSuite:
    PARAMS = GenParams(max_states=3, agents=("a", "b", "c"), props=("p", "q"),
                       seed=5, count=6)

    def test_all_items_behave(self):
        report = axiom_suite(self.PARAMS, certify=True)
        assert report.passed
        by_name = {item.name: item for item in report.items}
        assert by_name["canary"].failures > 0
        assert by_name["canary"].passed
        assert by_name["canary"].countermodel is not None
        assert by_name["prop4"].countermodel is not None
        assert report.certificates.checked > 0
        assert report.certificates.ok
        for item in report.items:
            if item.kind == "valid":
                assert item.failures == 0, item.name

    def test_reports_are_byte_identical(self):
        one = axiom_suite(self.PARAMS, items=("C1", "A08", "canary"))
        two = axiom_suite(self.PARAMS, items=("C1", "A08", "canary"))
        assert one.to_text() == two.to_text()
        assert json.dumps(one.to_doc(), sort_keys=True) \
            == json.dumps(two.to_doc(), sort_keys=True)

    def test_countermodel_rechecks_false_under_fresh_checker(self):
        report = axiom_suite(self.PARAMS, items=("canary",))
        record = report.items[0].countermodel
        model = validate(record["model"])
        assert eval_formula(model, record["state"],
                            parse(record["formula"])) is False

    def test_prop4_item_reports_the_construction(self):
        report = axiom_suite(self.PARAMS, items=("prop4",))
        item = report.items[0]
        assert item.passed
        record = item.countermodel
        model = validate(record["model"])
        assert record["state"] == record["model"]["designated"]
        assert eval_formula(model, record["state"],
                            parse(record["formula"])) is False

    def test_item_name_normalization(self):
        assert canonical_item_name("a8") == "A08"
        assert canonical_item_name("A11") == "A11"
        assert canonical_item_name("Prop4") == "prop4"
        assert canonical_item_name("c1") == "C1"
        with pytest.raises(KeyError):
            canonical_item_name("A99")

    def test_exploratory_item_never_fails_the_suite(self):
        report = axiom_suite(self.PARAMS, items=("converse_a11",))
        assert report.items[0].kind == "exploratory"
        assert report.passed

    def test_quantifier_rule_items_are_non_vacuous(self):
        report = axiom_suite(self.PARAMS, items=("R5", "R6"))
        by_name = {item.name: item for item in report.items}
        assert by_name["R5"].instances > 0
        assert by_name["R6"].instances > 0
        assert report.passed

    def test_documented_hundred_model_run_passes(self):
        report = axiom_suite(GenParams(max_states=4, agents=("a", "b", "c"),
                                       props=("p", "q"), seed=7, count=100))
        assert report.passed, [i.name for i in report.items if not i.passed]


class TestRulePremises:
    def test_universal_truth_is_not_a_sound_premise_under_updates(self):
        """Ignorance can hold at every state yet die by announcement, so the
        announcement-rule items must not treat per-model universal truth as
        a premise; only validity instances survive into submodels."""
        model = validate({
            "agents": ["a"], "props": ["p"], "states": ["w", "v"],
            "partitions": {"a": [["w", "v"]]}, "valuation": {"p": ["v"]},
        })
        premise = parse("~K a ~p")
        ev = Evaluator(model)
        assert all(ev.eval(s, premise) for s in model.states)
        conclusion = parse("[~p] ~K a ~p")
        assert ev.eval("w", conclusion) is False

    def test_c5_instances_respect_disjointness(self):
        # the generator only emits disjoint pairs; the pair sets over three
        # agents number 27, each model contributing one instance per state
        report = axiom_suite(GenParams(max_states=1, agents=("a", "b", "c"),
                                       props=("p",), seed=0, count=1),
                             items=("C5",))
        assert report.items[0].instances == 27


class TestRandomFormula:
    def test_respects_fragment(self):
        rng = random.Random("frag")
        for _ in range(100):
            assert fragment(random_formula(rng, ("a",), ("p",),
                                           frag=Fragment.EL,
                                           max_depth=3)) is Fragment.EL
        for _ in range(100):
            f = random_formula(rng, ("a",), ("p",), frag=Fragment.PAL,
                               max_depth=3)
            assert fragment(f) <= Fragment.PAL

    def test_deterministic_given_rng(self):
        a = random.Random(12)
        b = random.Random(12)
        for _ in range(50):
            assert random_formula(a, ("a", "b"), ("p", "q")) \
                == random_formula(b, ("a", "b"), ("p", "q"))


class TestTrainModel:
    def test_shape(self):
        model, point = train_model()
        assert point == "w"
        assert model.states == ("w", "v")
        assert model.truth_set("p") == frozenset({"v"})

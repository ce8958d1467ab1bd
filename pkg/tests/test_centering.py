"""Cf ranking, transitions, state copies, consumption, and the commit step."""

import random

import pytest
from hypothesis import given, strategies as st

from anacent.centering import (
    AmbiguitySpace,
    CenterReading,
    CenteringState,
    CfEntry,
    commit_utterance,
    compute_transition,
    consume_antecedent,
    copy_state,
    format_centering_table,
    normalize_table,
    rank_cf,
    realized_entities,
)
from anacent.errors import ConsumptionError, DiscourseError, UnknownIdentifierError
from anacent.lexicon import DiscourseEntity, FeatureStructure

from conftest import make_reading, make_tree, sentence2_tree


def entity(instance, concept=None, expression=""):
    return DiscourseEntity(instance, concept or instance, expression)


def entry(instance, expression=None, concept=None):
    return CfEntry(
        entity=entity(instance, concept, expression or instance),
        expression=expression or instance,
        features=FeatureStructure.parse("gen=fem;num=sg;pers=3"),
    )


def sentence1_tree(taxonomy):
    fem = "gen=fem;num=sg;pers=3"
    nodes = [
        (1, "In", "Preposition", "case=dat", None),
        (2, "der", "DefiniteDeterminer", f"{fem};case=dat", None),
        (3, "Leistung", "Noun", f"{fem};case=dat", "PERFORMANCE"),
        (4, "konnte", "FiniteVerb", "num=sg;pers=3", None),
        (5, "die", "DefiniteDeterminer", f"{fem};case=nom", None),
        (6, "LPS 105", "Noun", f"{fem};case=nom", "LPS-105"),
        (7, "ebenfalls", "Adverb", "-", None),
        (8, "weitgehend", "Adverb", "-", None),
        (9, "überzeugen", "Verb", "-", None),
    ]
    arcs = [
        (4, 1, "adjunct"),
        (1, 3, "ppObject"),
        (3, 2, "spec"),
        (4, 6, "subject"),
        (6, 5, "spec"),
        (4, 7, "adjunct"),
        (9, 8, "adjunct"),
        (4, 9, "adjunct"),
    ]
    return make_tree(nodes, arcs, taxonomy)


class TestRankCf:
    def test_first_sentence(self, categories, taxonomy):
        tree = sentence1_tree(taxonomy)
        entities = [(3, tree.node(3).entity), (6, tree.node(6).entity)]
        ranked = rank_cf(tree, entities, categories)
        assert [e.entity.instance_id for e in ranked] == ["LPS-105", "PERFORMANCE"]
        assert [e.expression for e in ranked] == ["LPS 105", "Leistung"]

    def test_second_sentence_subject_reading(self, categories, taxonomy):
        tree = sentence2_tree(taxonomy)
        tree.node(11).entity = tree.node(7).entity  # sie resolved to LPS-105
        entities = [
            (pos, tree.node(pos).entity) for pos in (4, 7, 9, 11, 14, 17)
        ]
        ranked = rank_cf(tree, entities, categories)
        assert [e.entity.instance_id for e in ranked] == [
            "LPS-105", "ST-3144", "ACCESS-TIME", "RANK", "CATEGORY",
        ]

    def test_inverted_reading(self, categories, taxonomy):
        tree = sentence2_tree(taxonomy, inverted=True)
        tree.node(11).entity = tree.node(9).entity  # sie resolved to ST-3144
        entities = [
            (pos, tree.node(pos).entity) for pos in (4, 7, 9, 11, 14, 17)
        ]
        ranked = rank_cf(tree, entities, categories)
        assert [e.entity.instance_id for e in ranked] == [
            "ST-3144", "LPS-105", "ACCESS-TIME", "RANK", "CATEGORY",
        ]

    def test_singleton(self, categories, taxonomy):
        tree = sentence1_tree(taxonomy)
        ranked = rank_cf(tree, [(6, tree.node(6).entity)], categories)
        assert [e.entity.instance_id for e in ranked] == ["LPS-105"]

    def test_duplicate_keeps_highest_rank(self, categories, taxonomy):
        tree = sentence2_tree(taxonomy)
        lps = tree.node(7).entity
        tree.node(11).entity = lps
        ranked = rank_cf(tree, [(11, lps), (7, lps)], categories)
        assert len(ranked) == 1
        assert ranked[0].position == 7  # matrix subject outranks embedded subject
        assert ranked[0].expression == "Festplatte"

    def test_unknown_position(self, categories, taxonomy):
        tree = sentence1_tree(taxonomy)
        with pytest.raises(UnknownIdentifierError):
            rank_cf(tree, [(99, entity("X"))], categories)


class TestComputeTransition:
    def _prev(self, cb, cf_ids):
        return CenterReading("p", entity(cb) if cb else None, [entry(i) for i in cf_ids])

    def test_continue_row(self):
        prev = self._prev("LPS-105", ["LPS-105", "PERFORMANCE"])
        cf = [entry("LPS-105"), entry("ST-3144")]
        assert compute_transition(prev, entity("LPS-105"), cf) == "CONTINUE"

    def test_retain_row(self):
        prev = self._prev("LPS-105", ["LPS-105", "PERFORMANCE"])
        cf = [entry("ST-3144"), entry("LPS-105")]
        assert compute_transition(prev, entity("LPS-105"), cf) == "RETAIN"

    def test_discourse_initial_is_continue(self):
        cf = [entry("LPS-105")]
        assert compute_transition(None, entity("LPS-105"), cf) == "CONTINUE"

    def test_smooth_shift(self):
        prev = self._prev("LPS-105", ["LPS-105"])
        cf = [entry("ST-3144")]
        assert compute_transition(prev, entity("ST-3144"), cf) == "SMOOTH-SHIFT"

    def test_disjoint_follow_up_is_rough_shift(self):
        prev = self._prev("LPS-105", ["LPS-105"])
        cf = [entry("RANK"), entry("CATEGORY")]
        assert compute_transition(prev, None, cf) == "ROUGH-SHIFT"

    def test_previous_cb_missing_counts_as_match(self):
        prev = self._prev(None, ["LPS-105"])
        cf = [entry("ST-3144")]
        assert compute_transition(prev, entity("ST-3144"), cf) == "CONTINUE"


def two_entry_state(state_id="master", origin=None):
    reading = CenterReading("c1", entity("LPS-105"), [entry("LPS-105"), entry("PERFORMANCE")])
    return CenteringState(state_id, [reading], origin)


class TestCopyState:
    def test_copies_are_independent(self):
        space = AmbiguitySpace(two_entry_state())
        before = space.serialize_master()
        copy_a = copy_state(space, "r2")
        copy_b = copy_state(space, "r3")
        consume_antecedent(copy_a.readings[0], entity("LPS-105"))
        assert space.serialize_master() == before
        assert copy_b.serialize() != copy_a.serialize()
        assert [e.entity.instance_id for e in copy_b.readings[0].cf] == [
            "LPS-105", "PERFORMANCE",
        ]

    def test_no_copies_without_searches(self):
        space = AmbiguitySpace(two_entry_state())
        assert space.states == [space.master]

    def test_copy_then_consume_leaves_master_equal(self):
        space = AmbiguitySpace(two_entry_state())
        snapshot = space.serialize_master()
        working = copy_state(space, "r9")
        consume_antecedent(working.readings[0], entity("PERFORMANCE"))
        assert space.serialize_master() == snapshot


class TestConsume:
    def test_removes_and_records(self):
        reading = CenterReading("c1", None, [entry("LPS-105"), entry("PERFORMANCE")])
        consume_antecedent(reading, entity("LPS-105"))
        assert [e.entity.instance_id for e in reading.cf] == ["PERFORMANCE"]
        assert reading.consumed == ["LPS-105"]

    def test_sole_element(self):
        reading = CenterReading("c1", None, [entry("LPS-105")])
        consume_antecedent(reading, entity("LPS-105"))
        assert reading.cf == []

    def test_double_consumption_raises(self):
        reading = CenterReading("c1", None, [entry("LPS-105"), entry("PERFORMANCE")])
        consume_antecedent(reading, entity("LPS-105"))
        with pytest.raises(ConsumptionError):
            consume_antecedent(reading, entity("LPS-105"))

    def test_absent_entity_raises(self):
        reading = CenterReading("c1", None, [entry("PERFORMANCE")])
        with pytest.raises(ConsumptionError):
            consume_antecedent(reading, entity("RANK"))

    @given(st.permutations(["A", "B", "C", "D", "E"]), st.integers(0, 4))
    def test_order_of_remaining_entries_preserved(self, ids, pick):
        reading = CenterReading("c1", None, [entry(i) for i in ids])
        target = ids[pick]
        consume_antecedent(reading, entity(target))
        remaining = [e.entity.instance_id for e in reading.cf]
        assert remaining == [i for i in ids if i != target]
        assert tuple(e.entity.instance_id for e in reading.original_cf) == tuple(ids)


class TestCommit:
    def _survivor(self, taxonomy, inverted, prev_state):
        tree = sentence2_tree(taxonomy, inverted=inverted)
        reading = make_reading("rX", [], [], taxonomy)
        reading.reading_id = "r-inv" if inverted else "r-subj"
        reading.tree = tree
        bound = tree.node(9 if inverted else 7).entity
        reading.bind(11, prev_state.readings[0].reading_id, bound)
        return (prev_state, reading)

    def test_two_global_readings_continue_and_retain(self, categories, taxonomy):
        space = AmbiguitySpace(two_entry_state("master-u2"))
        copy_a = space.copy_state("r-subj")
        copy_b = space.copy_state("r-inv")
        consume_antecedent(copy_a.readings[0], entity("LPS-105"))
        consume_antecedent(copy_b.readings[0], entity("LPS-105"))
        survivors = [
            self._survivor(taxonomy, False, copy_a),
            self._survivor(taxonomy, True, copy_b),
        ]
        _, committed = commit_utterance(space, survivors, categories, 2)
        assert len(committed) == 2
        assert [r.transition for r in committed] == ["CONTINUE", "RETAIN"]
        assert all(r.cb.instance_id == "LPS-105" for r in committed)
        assert [e.entity.instance_id for e in committed[0].cf] == [
            "LPS-105", "ST-3144", "ACCESS-TIME", "RANK", "CATEGORY",
        ]
        assert [e.entity.instance_id for e in committed[1].cf] == [
            "ST-3144", "LPS-105", "ACCESS-TIME", "RANK", "CATEGORY",
        ]

    def test_discourse_initial_single_reading(self, categories, taxonomy):
        tree = sentence2_tree(taxonomy)
        reading = make_reading("r1", [], [], taxonomy)
        reading.tree = tree
        _, committed = commit_utterance(None, [(None, reading)], categories, 1)
        assert len(committed) == 1
        assert committed[0].transition == "CONTINUE"
        assert committed[0].cb.instance_id == committed[0].cf[0].entity.instance_id

    def test_no_realized_predecessor_entity(self, categories, taxonomy):
        space = AmbiguitySpace(two_entry_state())
        nodes = [
            (1, "v", "FiniteVerb", "num=sg;pers=3", None),
            (2, "Platz", "Noun", "gen=masc;num=sg;pers=3;case=nom", "RANK"),
        ]
        reading = make_reading("r1", nodes, [(1, 2, "subject")], taxonomy)
        _, committed = commit_utterance(space, [(space.master, reading)], categories, 2)
        assert committed[0].cb is None
        assert committed[0].transition == "ROUGH-SHIFT"

    def test_zero_survivors(self, categories):
        with pytest.raises(DiscourseError):
            commit_utterance(None, [], categories, 1)

    def test_committed_count_sums_over_centers(self, categories, taxonomy):
        master = CenteringState(
            "m",
            [
                CenterReading("c1", entity("LPS-105"), [entry("LPS-105")]),
                CenterReading("c2", entity("ST-3144"), [entry("ST-3144")]),
            ],
        )
        space = AmbiguitySpace(master)
        tree = sentence2_tree(taxonomy)
        reading = make_reading("r1", [], [], taxonomy)
        reading.tree = tree
        _, committed = commit_utterance(space, [(master, reading)], categories, 2)
        assert len(committed) == 2  # one per predecessor center reading


class TestRealizedEntities:
    def test_bindings_override_per_center(self, taxonomy):
        tree = sentence2_tree(taxonomy)
        reading = make_reading("r1", [], [], taxonomy)
        reading.tree = tree
        reading.bind(11, "c1", entity("LPS-105"))
        reading.bind(11, "c2", entity("ST-3144"))
        under_c1 = dict(realized_entities(reading, "c1"))
        under_c2 = dict(realized_entities(reading, "c2"))
        assert under_c1[11].instance_id == "LPS-105"
        assert under_c2[11].instance_id == "ST-3144"

    def test_unresolved_anaphor_contributes_nothing(self, taxonomy):
        tree = sentence2_tree(taxonomy)
        reading = make_reading("r1", [], [], taxonomy)
        reading.tree = tree
        positions = [pos for pos, _ in realized_entities(reading, None)]
        assert 11 not in positions


class TestTableFormat:
    def test_layout_and_normalization(self):
        reading = CenterReading(
            "c1",
            entity("LPS-105", expression="LPS 105"),
            [entry("LPS-105", "LPS 105"), entry("PERFORMANCE", "Leistung")],
            transition="CONTINUE",
        )
        table = format_centering_table([(1, [reading])])
        assert table == (
            "(1)  c1  Cb: LPS-105: LPS 105  "
            "Cf: [LPS-105: LPS 105, PERFORMANCE: Leistung]  CONTINUE\n"
        )
        assert normalize_table(table) == (
            "(1)  Cb: LPS-105: LPS 105  "
            "Cf: [LPS-105: LPS 105, PERFORMANCE: Leistung]  CONTINUE\n"
        )

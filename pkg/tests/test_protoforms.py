import random
from datetime import timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from proctext.analysis import DAY, IndicatorSet, replay
from proctext.discovery import build_dfg
from proctext.errors import InvalidArgument
from proctext.eventlog import from_sequences
from proctext.fuzzy import FuzzySet, LinguisticVariable, default_quantifiers
from proctext.protoforms import (
    KIND_ORDER,
    BoundProtoform,
    Protoform,
    ProtoformInstance,
    SchemaKind,
    bind,
    default_schemas,
    instantiate,
    rank_and_select,
    schema_by_id,
    with_params,
)


def indicators(seqs, step=timedelta(days=1)):
    log = from_sequences(seqs, step=step)
    return replay(log, build_dfg(log))


FIVE_TERMS = LinguisticVariable("arc_waiting", "seconds", tuple(
    FuzzySet(label, a * DAY, b * DAY, c * DAY, d * DAY, "seconds")
    for label, (a, b, c, d) in {
        "very short": (0, 0, 0.5, 1),
        "short": (0.5, 1, 2, 3),
        "medium": (2, 3, 5, 7),
        "long": (5, 7, 14, 21),
        "very long": (14, 21, 60, 90),
    }.items()
))


def test_arc_schema_enumeration():
    ind = indicators([["A", "B", "C"], ["A", "C"]])
    assert len(ind.arcs) == 3
    out = instantiate([schema_by_id("arc_waiting")], ind, [FIVE_TERMS], default_quantifiers())
    assert 0 < len(out) <= 15
    assert len({i.id for i in out}) == len(out)
    assert all(0 <= i.truth_degree <= 1 for i in out)
    assert {i.bindings["term"] for i in out} <= {t.label for t in FIVE_TERMS.terms}


def test_arc_schema_without_vocabulary_uses_hedge():
    ind = indicators([["A", "B"]])
    (inst,) = instantiate([schema_by_id("arc_waiting")], ind)
    assert inst.form == "arc.waiting"
    assert inst.truth_degree == 1.0
    assert inst.bindings["duration"] == DAY


def test_empty_indicators():
    assert instantiate(default_schemas(), IndicatorSet.empty(), [FIVE_TERMS], default_quantifiers()) == []


def test_branch_pattern_composes_arc_children():
    seqs = [["Session", "Intervention"]] * 3 + [["Session", "Second"]]
    ind = indicators(seqs)
    (inst,) = instantiate([schema_by_id("branch")], ind)
    assert inst.kind == SchemaKind.PATTERN
    assert len(inst.children) == 2
    assert [c.form for c in inst.children] == ["arc.waiting", "arc.waiting"]
    assert [(c.bindings["source"], c.bindings["target"]) for c in inst.children] == [
        ("Session", "Second"), ("Session", "Intervention"),
    ]
    fractions = [b["fraction"] for b in inst.bindings["branches"]]
    assert fractions == [0.25, 0.75]
    assert inst.truth_degree == min(c.truth_degree for c in inst.children)


def test_chain_children_match_arcs():
    ind = indicators([["A", "Session", "Intervention"]] * 2 + [["A", "B", "C", "D", "E", "F"]])
    out = instantiate([schema_by_id("chain")], ind)
    # the 5-arc variant exceeds max_arcs
    (inst,) = out
    assert len(inst.children) == 2 == len(inst.bindings["path"]) - 1
    out = instantiate([with_params(schema_by_id("chain"), max_arcs=5)], ind)
    assert sorted(len(i.children) for i in out) == [2, 5]


def test_variant_support_floor():
    ind = indicators([["A", "B"]] * 2 + [["A", "C"]])
    out = instantiate([schema_by_id("variant_cycle")], ind)
    assert [i.bindings["path"] for i in out] == [["A", "B"]]


def test_activity_schemas_need_durations():
    # complete-only logs have no durations: nothing to say
    ind = indicators([["A", "B"]])
    assert instantiate([schema_by_id("activity_duration"), schema_by_id("activity_compare")], ind) == []


def test_unknown_schema():
    with pytest.raises(InvalidArgument):
        schema_by_id("nope")
    bogus = Protoform("nope", SchemaKind.ARC, "x")
    with pytest.raises(InvalidArgument):
        instantiate([bogus], IndicatorSet.empty())


def test_abstraction_levels():
    s = schema_by_id("arc_waiting")
    b = bind(s, "A->B", form="arc.waiting", source="A", target="B")
    inst = b.evaluate(0.5, 3)
    assert (s.abstraction_level, b.abstraction_level, inst.abstraction_level) == (2, 1, 0)
    assert isinstance(b, BoundProtoform)
    assert inst.id == "arc_waiting:A->B"


def make(kind, key, truth, support):
    schema = next(s for s in default_schemas() if s.kind == kind)
    return ProtoformInstance(schema, {"form": f"{kind.value}.x"}, truth, support, key=key)


class TestRankAndSelect:
    def test_threshold(self):
        a, b = make(SchemaKind.ARC, "a", 0.9, 1), make(SchemaKind.ARC, "b", 0.69, 1)
        assert rank_and_select([a, b], 0.7) == [a]

    def test_tie_broken_by_support(self):
        a, b = make(SchemaKind.ARC, "a", 0.8, 2), make(SchemaKind.ARC, "b", 0.8, 9)
        assert rank_and_select([a, b], 0.0, 1) == [b]

    def test_large_cap_keeps_all_sorted(self):
        xs = [make(SchemaKind.VARIANT, "v", 0.2, 1), make(SchemaKind.PERIOD, "p", 0.1, 1),
              make(SchemaKind.ARC, "a", 0.9, 1), make(SchemaKind.ARC, "b", 0.95, 1)]
        out = rank_and_select(xs, 0.0, 100)
        assert [i.key for i in out] == ["p", "b", "a", "v"]

    def test_validation(self):
        with pytest.raises(InvalidArgument):
            rank_and_select([], 1.5, 1)
        with pytest.raises(InvalidArgument):
            rank_and_select([], 0.5, 0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.integers(1, 4))
    def test_permutation_invariant(self, seed, min_truth, cap):
        rng = random.Random(seed)
        xs = [make(rng.choice(list(SchemaKind)), f"k{i}", rng.choice([0.1, 0.5, 0.8, 1.0]),
                   rng.randint(1, 3)) for i in range(rng.randint(0, 15))]
        ref = rank_and_select(xs, min_truth, cap)
        rng.shuffle(xs)
        assert rank_and_select(xs, min_truth, cap) == ref
        kinds = [KIND_ORDER[i.kind] for i in ref]
        assert kinds == sorted(kinds)
        assert all(i.truth_degree >= min_truth for i in ref)


def test_invalid_truth_rejected():
    with pytest.raises(InvalidArgument):
        make(SchemaKind.ARC, "a", 1.2, 1)

"""Graph validation tests, including agreement with the brute-force oracle."""

from __future__ import annotations

from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faime.pipeline import (
    Binding,
    DeviceGraph,
    LearningOutput,
    Stage,
    StageBehavior,
    StageKind,
    Stimulus,
    StimulusChannel,
    Violation,
    device_graph,
    stimulus_bound_parameters,
    topological_order,
    validate_graph,
)
from oracles import oracle_violations


class _Noop(StageBehavior):
    def on_event(self, event, ctx):
        pass


_NOOP = _Noop()


def _stage(sid: str, kind: StageKind, channels=()) -> Stage:
    consumes = frozenset({Stimulus}) if channels else frozenset()
    return Stage(sid, kind, _NOOP, consumes=consumes, channels=frozenset(channels))


def _graph(kinds: dict[str, StageKind], edges, bindings=()) -> DeviceGraph:
    return device_graph([_stage(sid, k) for sid, k in kinds.items()], edges, bindings)


def test_backward_edge_detected():
    g = _graph(
        {"learn": StageKind.LEARNING, "cap": StageKind.STIMULUS_CAPTURE, "prod": StageKind.PRODUCTION},
        [("learn", "cap")],
    )
    assert Violation("backward-edge", ("learn", "cap")) in validate_graph(g)


def test_empty_graph_missing_production():
    assert validate_graph(DeviceGraph(stages={}, edges=frozenset())) == [Violation("no-production")]


def test_valid_chain_passes():
    g = _graph(
        {
            "cap": StageKind.STIMULUS_CAPTURE,
            "adapt": StageKind.STIMULUS_ADAPTATION,
            "prod": StageKind.PRODUCTION,
        },
        [("cap", "adapt"), ("adapt", "prod")],
    )
    assert validate_graph(g) == []


def test_equal_kind_edge_allowed():
    g = _graph(
        {"a": StageKind.PRODUCTION, "b": StageKind.PRODUCTION},
        [("a", "b")],
    )
    assert validate_graph(g) == []


def test_unknown_stage_in_edge():
    g = _graph({"prod": StageKind.PRODUCTION}, [("prod", "ghost")])
    assert Violation("unknown-stage", ("prod", "ghost", "ghost")) in validate_graph(g)


def test_self_loop_is_a_cycle():
    g = _graph({"prod": StageKind.PRODUCTION}, [("prod", "prod")])
    assert Violation("cycle", ("prod",)) in validate_graph(g)


def test_two_cycle_reported_with_both_nodes():
    g = _graph(
        {"a": StageKind.PRODUCTION, "b": StageKind.PRODUCTION},
        [("a", "b"), ("b", "a")],
    )
    assert Violation("cycle", ("a", "b")) in validate_graph(g)


def test_duplicate_binding_detected():
    g = _graph(
        {"prod": StageKind.PRODUCTION},
        [],
        [Binding("p", StimulusChannel("x")), Binding("p", StimulusChannel("y"))],
    )
    codes = {v.code for v in validate_graph(g)}
    assert "duplicate-binding" in codes


def test_binding_source_checks():
    stages = [
        _stage("cap", StageKind.STIMULUS_CAPTURE, channels=("pitch",)),
        _stage("learn", StageKind.LEARNING),
        _stage("prod", StageKind.PRODUCTION),
    ]
    g = device_graph(
        stages,
        [],
        [
            Binding("ok_chan", StimulusChannel("pitch")),
            Binding("bad_chan", StimulusChannel("nope")),
            Binding("ok_learn", LearningOutput("learn")),
            Binding("bad_learn", LearningOutput("ghost")),
            Binding("not_learn", LearningOutput("prod")),
        ],
    )
    violations = validate_graph(g)
    assert Violation("unknown-binding-channel", ("bad_chan", "nope")) in violations
    assert Violation("unknown-binding-stage", ("bad_learn", "ghost")) in violations
    assert Violation("binding-not-learning", ("not_learn", "prod")) in violations
    subjects = {v.subject for v in violations}
    assert not any(s and s[0].startswith("ok") for s in subjects)


def test_stimulus_bound_parameters():
    g = _graph(
        {"prod": StageKind.PRODUCTION},
        [],
        [Binding("freq", StimulusChannel("pitch")), Binding("timbre", LearningOutput("l"))],
    )
    assert stimulus_bound_parameters(g) == frozenset({"freq"})


def test_topological_order_lexicographic_tiebreak():
    g = _graph(
        {"z": StageKind.STIMULUS_CAPTURE, "a": StageKind.STIMULUS_CAPTURE, "m": StageKind.PRODUCTION},
        [("z", "m"), ("a", "m")],
    )
    assert topological_order(g) == ["a", "z", "m"]


def test_duplicate_stage_id_rejected():
    with pytest.raises(ValueError):
        device_graph(
            [_stage("x", StageKind.PRODUCTION), _stage("x", StageKind.FEEDBACK)], []
        )


# -- oracle agreement on random graphs ---------------------------------------

_NODE_IDS = ("a", "b", "c", "d")
_kind_lists = st.lists(st.sampled_from(list(StageKind)), min_size=4, max_size=4)
_edge_sets = st.sets(
    st.tuples(st.sampled_from(_NODE_IDS), st.sampled_from(_NODE_IDS)), max_size=8
)


@given(_kind_lists, _edge_sets)
@settings(max_examples=500, deadline=None)
def test_validation_agrees_with_oracle_on_random_graphs(kinds_list, edges):
    kinds = dict(zip(_NODE_IDS, kinds_list))
    g = _graph(kinds, edges)
    assert Counter(validate_graph(g)) == oracle_violations(kinds, edges)

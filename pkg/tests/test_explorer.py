"""Exploration tests: frozen state counts, witness traces, truncation, and
the invariant checker against deliberately broken markings."""

from __future__ import annotations

from casenet import cpn
from casenet.compiler import compile_model
from casenet.explorer import check_invariants, explore
from oracle import state_count


def codes(violations):
    return [v.code for v in violations]


def test_minimal_exploration(minimal_model):
    net, _ = compile_model(minimal_model)
    report = explore(net)
    assert report.states_visited == 5
    assert report.termination_reachable
    assert not report.truncated
    assert report.violations == []
    assert len(report.witness) == 2


def test_micro_exploration(micro_model):
    net, _ = compile_model(micro_model)
    report = explore(net, max_states=50_000)
    assert report.states_visited == 4539
    assert report.termination_reachable
    assert not report.truncated
    assert report.violations == []
    assert len(report.witness) == 10
    assert report.max_depth_seen == 21


def test_exploration_agrees_with_the_naive_walk(minimal_model, micro_model):
    for model in (minimal_model, micro_model):
        net, _ = compile_model(model)
        report = explore(net, max_states=50_000)
        count, terminable = state_count(net)
        assert report.states_visited == count
        assert report.termination_reachable == terminable


def test_witness_is_a_real_trace(minimal_model, micro_model):
    for model in (minimal_model, micro_model):
        net, _ = compile_model(model)
        report = explore(net, max_states=50_000)
        by_id = {t.id: t for t in net.transitions}
        marking = cpn.initial_marking(net)
        for step in report.witness:
            marking = cpn.fire(
                net, marking, by_id[step["transitionId"]], cpn.binding_from_json(step["binding"])
            )
        assert marking.tokens("o") == (cpn.UNIT,)


def test_truncation_by_state_cap(micro_model):
    net, _ = compile_model(micro_model)
    report = explore(net, max_states=50)
    assert report.truncated
    assert report.states_visited <= 50


def test_truncation_by_depth(mini_model):
    net, _ = compile_model(mini_model)
    report = explore(net, max_depth=2)
    assert report.truncated
    assert report.max_depth_seen == 2
    assert not report.termination_reachable


def test_report_json_shape(minimal_model):
    net, _ = compile_model(minimal_model)
    data = explore(net).to_json()
    assert data["statesVisited"] == 5
    assert data["terminationReachable"] is True
    assert data["violations"] == []
    assert data["truncated"] is False
    assert [s["transitionId"] for s in data["witness"]]
    assert data["maxDepthSeen"] >= len(data["witness"])


# --- the invariant checker on crafted markings ---


C0 = cpn.Id("Conference", 0)
P0 = cpn.Id("Paper", 0)
P1 = cpn.Id("Paper", 1)
R0 = cpn.Id("Review", 0)
R1 = cpn.Id("Review", 1)
R2 = cpn.Id("Review", 2)


def _mini_net(mini_model):
    return compile_model(mini_model)[0]


def _running(net, objects, assocs, config, counters=None):
    tokens = {
        "r": [cpn.UNIT],
        "objects": [frozenset(objects)],
        "associations": [frozenset(assocs)],
    }
    for place, ids in config.items():
        tokens[place] = list(ids)
    counts = counters or {}
    for cls in net.classes:
        have = counts.get(cls, len([o for o in objects if o.class_name == cls]))
        tokens[net.counter_place(cls)] = [have]
    return cpn.Marking(tokens)


def test_clean_running_marking(mini_model):
    net = _mini_net(mini_model)
    m = _running(net, {C0}, set(), {"Conference[scheduled]": [C0]})
    assert check_invariants(net, m) == []


def test_initial_marking_is_clean(mini_model):
    net = _mini_net(mini_model)
    assert check_invariants(net, cpn.initial_marking(net)) == []


def test_abstract_state_exclusivity(mini_model):
    net = _mini_net(mini_model)
    m = _running(net, set(), set(), {}).updated({}, {"i": [cpn.UNIT]})
    assert "AbstractStateExclusivity" in codes(check_invariants(net, m))


def test_set_token_count_while_running(mini_model):
    net = _mini_net(mini_model)
    m = _running(net, set(), set(), {}).updated({"objects": [frozenset()]}, {})
    found = check_invariants(net, m)
    assert codes(found) == ["SetTokenCount"]
    assert "found 0/1" in found[0].message


def test_terminated_marking_has_no_set_tokens(mini_model):
    net = _mini_net(mini_model)
    closed = cpn.Marking({"o": [cpn.UNIT], **{net.counter_place(c): [0] for c in net.classes}})
    assert check_invariants(net, closed) == []

    leftover = closed.updated({}, {"objects": [frozenset()], "associations": [frozenset()]})
    assert "SetTokenCount" in codes(check_invariants(net, leftover))


def test_counter_soundness(mini_model):
    net = _mini_net(mini_model)
    # counter behind the minted ids
    m = _running(net, {C0}, set(), {"Conference[scheduled]": [C0]}, counters={"Conference": 0})
    assert "CounterSoundness" in codes(check_invariants(net, m))
    # counter token missing entirely
    m2 = _running(net, set(), set(), {}).updated({"cnt_Paper": [0]}, {})
    assert "CounterSoundness" in codes(check_invariants(net, m2))


def test_association_endpoints_must_be_objects(mini_model):
    net = _mini_net(mini_model)
    m = _running(net, {C0}, {cpn.assoc(C0, P0)}, {"Conference[scheduled]": [C0]})
    assert "AssociationSubset" in codes(check_invariants(net, m))


def test_configuration_uniqueness(mini_model):
    net = _mini_net(mini_model)
    doubled = _running(
        net, {C0}, set(),
        {"Conference[scheduled]": [C0], "Conference[open_for_submissions]": [C0]},
    )
    assert "ConfigurationUniqueness" in codes(check_invariants(net, doubled))

    adrift = _running(net, {C0}, set(), {})
    assert "ConfigurationUniqueness" in codes(check_invariants(net, adrift))


def test_upper_bound_invariant(mini_model):
    net = _mini_net(mini_model)
    reviews = {R0, R1, R2}
    m = _running(
        net,
        {C0, P0, *reviews},
        {cpn.assoc(P0, r) for r in reviews} | {cpn.assoc(C0, P0)},
        {
            "Conference[scheduled]": [C0],
            "Paper[in_review]": [P0],
            "Review[required]": [R0, R1, R2],
        },
    )
    found = [v for v in check_invariants(net, m) if v.code == "UpperBound"]
    assert len(found) == 1
    assert "3 associated Review" in found[0].message


def test_violations_are_deduplicated(mini_model):
    net = _mini_net(mini_model)
    # both reachable marking checks see the same broken state repeatedly;
    # the report keeps one entry per distinct message
    report = explore(net, max_states=5)
    keys = [(v.code, v.message) for v in report.violations]
    assert len(keys) == len(set(keys))

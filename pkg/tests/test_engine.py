"""Enactment tests: the full conference walkthrough, option identity,
attribute handling, and persistence."""

from __future__ import annotations

import pytest

from casenet import cpn
from casenet.engine import (
    CaseTerminated,
    Engine,
    SchemaError,
    StaleOption,
    VersionMismatch,
    id_str,
    option_id_for,
    parse_id_str,
)


def options(engine, cs, label=None):
    opts = engine.enabled_steps(cs)
    if label is not None:
        opts = [o for o in opts if o.human_label == label]
    return opts


def bound(summary, var, cls, idx):
    v = summary.get(var)
    return bool(v) and v.get("type") == "id" and v["class"] == cls and v["index"] == idx


def pick(engine, cs, label, want=None, forms=None):
    opts = options(engine, cs, label)
    if want:
        opts = [o for o in opts if want(o.binding_summary())]
    assert opts, f"no enabled option '{label}'"
    return engine.apply_step(cs, opts[0], forms or {})


def test_id_strings():
    assert id_str(cpn.Id("Paper", 3)) == "Paper#3"
    assert parse_id_str("Paper#3") == cpn.Id("Paper", 3)
    assert parse_id_str("Odd#Class#0") == cpn.Id("Odd#Class", 0)
    for bad in ("Paper", "#3", "Paper#", "Paper#x"):
        with pytest.raises(ValueError):
            parse_id_str(bad)


def test_new_case(mini_engine):
    cs = mini_engine.create_case()
    assert cs.status == "initial"
    assert cs.model_hash == mini_engine.net.model_hash
    assert cs.step_log == ()
    assert cs.case_id != mini_engine.create_case().case_id
    assert mini_engine.create_case("fixed").case_id == "fixed"
    assert not mini_engine.is_terminable(cs)


def test_initial_options(mini_engine):
    cs = mini_engine.create_case()
    opts = mini_engine.enabled_steps(cs)
    assert [o.human_label for o in opts] == ["conference scheduled"]
    (start,) = opts
    assert start.transition_id == "fa/start/out0"
    assert [f.to_json() for f in start.required_forms] == [
        {
            "class": "Conference",
            "mode": "created",
            "objectId": None,
            "schema": [{"name": "name", "type": "string"}],
        }
    ]


def test_walkthrough(mini_engine):
    """The complete reviewing story for two papers, with every cardinality
    probe asserted along the way."""
    eng = mini_engine
    cs = eng.create_case("walk")

    cs = pick(eng, cs, "conference scheduled", forms={"Conference": {"name": "icpm"}})
    cs = pick(eng, cs, "open submission")
    cs = pick(eng, cs, "submit paper [in 0]",
              forms={"AuthorTeam": {"name": "team a"}, "Paper": {"title": "paper 0"}})

    # one paper submitted, goal is two: closing submissions must stay blocked
    assert not options(eng, cs, "close submission")

    cs = pick(eng, cs, "send submission notification")
    cs = pick(eng, cs, "submit paper [in 0]",
              forms={"AuthorTeam": {"name": "team b"}, "Paper": {"title": "paper 1"}})
    cs = pick(eng, cs, "send submission notification",
              want=lambda s: bound(s, "v_Paper", "Paper", 1))
    cs = pick(eng, cs, "close submission")

    # submissions closed: no submit route stays enabled
    assert not options(eng, cs, "submit paper [in 0]")
    assert not options(eng, cs, "submit paper [in 1]")

    cs = pick(eng, cs, "assign reviewer", want=lambda s: bound(s, "v_Paper", "Paper", 0),
              forms={"Review": {"score": 7}})
    cs = pick(eng, cs, "create review", want=lambda s: bound(s, "v_Review", "Review", 0))
    cs = pick(eng, cs, "assign reviewer", want=lambda s: bound(s, "v_Paper", "Paper", 1),
              forms={"Review": {"score": 4}})
    cs = pick(eng, cs, "create review", want=lambda s: bound(s, "v_Review", "Review", 1))
    cs = pick(eng, cs, "assign reviewer", want=lambda s: bound(s, "v_Paper", "Paper", 1),
              forms={"Review": {"score": 5}})

    # paper 1 holds two reviews, the upper bound: no third assignment for it
    assert not [o for o in options(eng, cs, "assign reviewer")
                if bound(o.binding_summary(), "v_Paper", "Paper", 1)]

    cs = pick(eng, cs, "create review", want=lambda s: bound(s, "v_Review", "Review", 2))

    # the request-another-review route stays open alongside accept/reject
    assert [o for o in options(eng, cs, "decide on paper [out 0]")
            if bound(o.binding_summary(), "v_Paper", "Paper", 0)]

    cs = pick(eng, cs, "decide on paper [out 1]", want=lambda s: bound(s, "v_Paper", "Paper", 0),
              forms={"Decision": {"rationale": "strong", "final": True}})
    cs = pick(eng, cs, "decide on paper [out 2]", want=lambda s: bound(s, "v_Paper", "Paper", 1),
              forms={"Decision": {"rationale": "weak", "final": True}})

    # reviewing is not closed yet, so the case cannot close
    assert not options(eng, cs, "close case")
    assert not eng.is_terminable(cs)

    cs = pick(eng, cs, "send notification [in 0]")
    cs = pick(eng, cs, "send notification [in 1]")
    cs = pick(eng, cs, "close reviewing")
    assert eng.is_terminable(cs)
    cs = pick(eng, cs, "close case")

    assert cs.status == "terminated"
    assert len(cs.step_log) == 19
    assert cs.marking.tokens("o") == (cpn.UNIT,)
    assert cs.marking.tokens("r") == ()

    records = {r.to_json()["id"]: r.to_json() for r in eng.object_records(cs)}
    assert len(records) == 10
    # closing consumed the conference token; every other object keeps its state
    assert {k: v["state"] for k, v in records.items()} == {
        "Conference#0": "consumed",
        "Paper#0": "notified",
        "Paper#1": "notified",
        "AuthorTeam#0": "signed_up",
        "AuthorTeam#1": "signed_up",
        "Review#0": "considered",
        "Review#1": "considered",
        "Review#2": "considered",
        "Decision#0": "accepted",
        "Decision#1": "rejected",
    }
    assert records["Conference#0"]["attributes"] == {"name": "icpm"}
    assert records["Paper#1"]["attributes"] == {"title": "paper 1"}
    assert records["Decision#0"]["attributes"] == {"rationale": "strong", "final": True}
    assert records["Review#2"]["attributes"] == {"score": 5}

    pairs = eng.associations(cs)
    assert ("Conference#0", "Paper#0") in pairs
    assert ("Conference#0", "Paper#1") in pairs
    assert ("Decision#0", "Paper#0") in pairs
    assert ("Decision#1", "Paper#1") in pairs
    assert ("Decision#1", "Review#1") in pairs
    assert ("Decision#1", "Review#2") in pairs
    assert ("Paper#0", "Review#0") in pairs
    assert len(pairs) == 12

    # a terminated case refuses further work
    with pytest.raises(CaseTerminated):
        eng.enabled_steps(cs)
    with pytest.raises(CaseTerminated):
        eng.apply_step(cs, "anything")

    # the recorded log replays to the same marking and attribute store
    replayed = eng.replay([r.to_json() for r in cs.step_log])
    assert replayed.marking == cs.marking
    assert dict(replayed.attributes) == dict(cs.attributes)

    # and the snapshot round-trips, terminated status included
    restored = eng.restore(eng.snapshot(cs))
    assert restored.marking == cs.marking
    assert restored.status == "terminated"
    assert [r.to_json()["transitionId"] for r in restored.step_log] == [
        r.to_json()["transitionId"] for r in cs.step_log
    ]


def _advance(engine, forms_conference=None):
    cs = engine.create_case()
    cs = pick(engine, cs, "conference scheduled",
              forms={"Conference": forms_conference or {"name": "c"}})
    return cs


def test_option_ids_are_stable(mini_engine):
    cs = _advance(mini_engine)
    first = [o.option_id for o in mini_engine.enabled_steps(cs)]
    second = [o.option_id for o in mini_engine.enabled_steps(cs)]
    assert first == second
    assert len(set(first)) == len(first)
    for o in mini_engine.enabled_steps(cs):
        assert o.option_id == option_id_for(o.transition_id, o.binding)


def test_stale_option_is_refused(mini_engine):
    eng = mini_engine
    cs = _advance(eng)
    stale = options(eng, cs, "open submission")[0]
    cs2 = eng.apply_step(cs, stale)  # fine against the state it was listed for
    with pytest.raises(StaleOption):
        eng.apply_step(cs2, stale)  # the conference has moved on


def test_apply_by_option_id_string(mini_engine):
    cs = mini_engine.create_case()
    opt = mini_engine.enabled_steps(cs)[0]
    cs2 = mini_engine.apply_step(cs, opt.option_id, {"Conference": {"name": "c"}})
    assert cs2.status == "running"


def test_attribute_schema_enforcement(mini_engine):
    eng = mini_engine
    cs = eng.create_case()
    (start,) = eng.enabled_steps(cs)

    with pytest.raises(SchemaError, match="no attribute form"):
        eng.apply_step(cs, start, {"Paper": {"title": "t"}})
    with pytest.raises(SchemaError, match="no attribute 'shoe_size'"):
        eng.apply_step(cs, start, {"Conference": {"shoe_size": 43, "name": "c"}})
    with pytest.raises(SchemaError, match="must be of type string"):
        eng.apply_step(cs, start, {"Conference": {"name": 42}})
    with pytest.raises(SchemaError, match="missing value"):
        eng.apply_step(cs, start, {"Conference": {}})
    with pytest.raises(SchemaError, match="missing value"):
        eng.apply_step(cs, start, {})


def _case_with_papers_in_review(eng):
    cs = _advance(eng)
    cs = pick(eng, cs, "open submission")
    for title in ("p0", "p1"):
        cs = pick(eng, cs, "submit paper [in 0]",
                  forms={"AuthorTeam": {"name": "t"}, "Paper": {"title": title}})
    return pick(eng, cs, "close submission")


def test_integer_attributes_refuse_booleans(mini_engine):
    eng = mini_engine
    cs = _case_with_papers_in_review(eng)
    assign = options(eng, cs, "assign reviewer")[0]
    with pytest.raises(SchemaError, match="must be of type integer"):
        eng.apply_step(cs, assign, {"Review": {"score": True}})


def test_boolean_attributes_refuse_integers(mini_engine):
    from casenet.model import AttributeSpec

    spec = AttributeSpec("final", "boolean")
    mini_engine._check_value(spec, True, "Decision")
    with pytest.raises(SchemaError, match="must be of type boolean"):
        mini_engine._check_value(spec, 1, "Decision")


def test_update_forms_allow_partial_values(mini_engine):
    eng = mini_engine
    cs = _advance(eng)
    open_opt = options(eng, cs, "open submission")[0]
    assert [f.to_json() for f in open_opt.required_forms] == [
        {
            "class": "Conference",
            "mode": "updated",
            "objectId": "Conference#0",
            "schema": [{"name": "name", "type": "string"}],
        }
    ]
    # update values are optional entirely
    cs2 = eng.apply_step(cs, open_opt)
    assert cs2.attributes["Conference#0"] == {"name": "c"}
    # or they overwrite in place, keyed by the object id
    cs3 = eng.apply_step(cs, open_opt, {"Conference#0": {"name": "renamed"}})
    assert cs3.attributes["Conference#0"] == {"name": "renamed"}


def test_pure_reads_need_no_forms(mini_engine):
    eng = mini_engine
    cs = _advance(eng)
    cs = pick(eng, cs, "open submission")
    cs = pick(eng, cs, "submit paper [in 0]",
              forms={"AuthorTeam": {"name": "t"}, "Paper": {"title": "p"}})
    notify = options(eng, cs, "send submission notification")[0]
    assert notify.required_forms == ()


def test_attribute_values_never_change_enablement(mini_engine):
    eng = mini_engine
    plain = _advance(eng, {"name": ""})
    fancy = _advance(eng, {"name": "a much longer conference name"})
    key = lambda cs: [
        (o.transition_id, cpn.binding_key(o.binding)) for o in eng.enabled_steps(cs)
    ]
    assert key(plain) == key(fancy)


def test_binding_summary_hides_bookkeeping_vars(mini_engine):
    cs = mini_engine.create_case()
    (start,) = mini_engine.enabled_steps(cs)
    assert start.binding_summary() == {}  # u, n_Conference, O, A are internal

    cs = pick(mini_engine, cs, "conference scheduled", forms={"Conference": {"name": "c"}})
    (open_opt,) = options(mini_engine, cs, "open submission")
    summary = open_opt.binding_summary()
    assert set(summary) == {"v_Conference"}
    assert summary["v_Conference"] == {"type": "id", "class": "Conference", "index": 0}


def test_snapshot_restore_midway(mini_engine):
    eng = mini_engine
    cs = _advance(eng)
    cs = pick(eng, cs, "open submission")
    snap = eng.snapshot(cs)

    restored = eng.restore(snap)
    assert restored.marking == cs.marking
    assert restored.status == "running"
    assert dict(restored.attributes) == dict(cs.attributes)
    # the restored case continues exactly like the original
    key = lambda c: [(o.option_id) for o in eng.enabled_steps(c)]
    assert key(restored) == key(cs)


def test_snapshot_refuses_foreign_model(mini_engine, micro_engine):
    cs = mini_engine.create_case()
    snap = mini_engine.snapshot(cs)
    with pytest.raises(VersionMismatch):
        micro_engine.restore(snap)


def test_replay_midway(mini_engine):
    eng = mini_engine
    cs = _advance(eng)
    cs = pick(eng, cs, "open submission")
    cs = pick(eng, cs, "submit paper [in 0]",
              forms={"AuthorTeam": {"name": "t"}, "Paper": {"title": "p"}})
    replayed = eng.replay([r.to_json() for r in cs.step_log])
    assert replayed.marking == cs.marking
    assert dict(replayed.attributes) == dict(cs.attributes)


def test_object_records_midway(mini_engine):
    eng = mini_engine
    cs = _advance(eng)
    cs = pick(eng, cs, "open submission")
    cs = pick(eng, cs, "submit paper [in 0]",
              forms={"AuthorTeam": {"name": "team"}, "Paper": {"title": "p0"}})
    by_id = {r.to_json()["id"]: r.to_json() for r in eng.object_records(cs)}
    assert by_id["Conference#0"]["state"] == "open_for_submissions"
    assert by_id["Paper#0"]["state"] == "submitted"
    assert by_id["AuthorTeam#0"] == {
        "id": "AuthorTeam#0",
        "class": "AuthorTeam",
        "state": "signed_up",
        "attributes": {"name": "team"},
    }
    assert eng.associations(cs) == [
        ("AuthorTeam#0", "Paper#0"),
        ("Conference#0", "Paper#0"),
    ]


def test_step_records_capture_the_input(mini_engine):
    eng = mini_engine
    cs = eng.create_case()
    cs = eng.apply_step(cs, eng.enabled_steps(cs)[0], {"Conference": {"name": "c"}})
    (record,) = cs.step_log
    data = record.to_json()
    assert data["transitionId"] == "fa/start/out0"
    assert data["attributes"] == {"Conference": {"name": "c"}}
    assert isinstance(data["timestamp"], float)
    assert cpn.binding_from_json(data["binding"])["n_Conference"] == 0

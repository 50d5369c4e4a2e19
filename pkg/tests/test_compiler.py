"""Translation tests: structure counts against the closed-form sums, the
exact shape of representative transitions, and the exchange formats."""

from __future__ import annotations

import random
import re

import pytest

from casenet import cpn
from casenet.compiler import (
    CompileError,
    compile_model,
    export_dot,
    model_hash,
    translate_termination,
)
from casenet.model import (
    CardinalityConstraint,
    CaseModel,
    DataCondition,
    Fragment,
    IOEntry,
    IOSet,
    ObjectConfiguration,
    ObjectLifeCycle,
)
from casenet.parsing import parse_case_model, serialize_case_model
from casenet.preprocess import augment_goal_guards
from conftest import load_doc, load_text
from oracle import expected_counts
from randgen import random_model_doc


def _transition(net, tid):
    for t in net.transitions:
        if t.id == tid:
            return t
    raise AssertionError(f"no transition {tid}")


# --- structure counts ---


def test_mini_counts(mini_model):
    net, report = compile_model(mini_model)
    assert (len(net.transitions), len(net.places)) == (15, 28)
    assert (report.transitions_total, report.places_total) == (15, 28)


@pytest.mark.parametrize("name", ["conference-mini", "conference-micro", "minimal"])
def test_fixture_counts_match_the_closed_form(name):
    doc = load_doc(name)
    net, _ = compile_model(parse_case_model(load_text(name)))
    assert (len(net.transitions), len(net.places)) == expected_counts(doc)


@pytest.mark.parametrize("seed", range(20))
def test_random_model_counts_match_the_closed_form(seed):
    doc = random_model_doc(random.Random(seed))
    net, _ = compile_model(parse_case_model(doc))
    assert (len(net.transitions), len(net.places)) == expected_counts(doc)
    assert len({t.id for t in net.transitions}) == len(net.transitions)
    assert len({p.id for p in net.places}) == len(net.places)


def test_mini_report_breakdown(mini_model):
    _, report = compile_model(mini_model)
    assert report.transitions_by_fragment == {"fa": 4, "fb": 3, "fc": 1, "fd": 1, "fe": 3, "ff": 2}
    assert report.transitions_by_origin == {
        "startEvent": 1,
        "activity": 13,
        "gateway": 0,
        "termination": 1,
    }
    assert report.places_by_role == {
        "initial": 1,
        "running": 1,
        "final": 1,
        "objects": 1,
        "associations": 1,
        "counter": 5,
        "config": 14,  # 4 + 4 + 1 + 3 + 2 states
        "controlFlow": 4,
    }
    assert sum(report.transitions_by_origin.values()) == report.transitions_total
    assert report.to_json()["transitionsTotal"] == 15


def test_unique_ids(mini_model, micro_model):
    for m in (mini_model, micro_model):
        net, _ = compile_model(m)
        assert len({t.id for t in net.transitions}) == len(net.transitions)
        assert len({p.id for p in net.places}) == len(net.places)


# --- representative transitions, checked field by field ---


def test_start_event_translation(mini_model):
    net, _ = compile_model(mini_model)
    t = _transition(net, "fa/start/out0")
    assert t.input_arcs == (
        cpn.SingleToken("i", "u"),
        cpn.CounterTake("Conference", "n_Conference"),
        cpn.SetTake("objects", "O"),
        cpn.SetTake("associations", "A"),
    )
    assert t.guard == ()
    assert t.outputs == (
        cpn.EmitToken("r", "unit"),
        cpn.FreshId("Conference", "Conference[scheduled]", ()),
        cpn.CounterPut("Conference", "n_Conference"),
        cpn.SetPut("objects", "O"),
        cpn.SetPut("associations", "A"),
        cpn.EmitCF(
            "cf:fa:start->open_submission",
            None,
            (("Conference", cpn.NewRef("Conference")),),
        ),
    )


def test_creating_activity_translation(mini_model):
    # first input set of "submit paper": reads the conference, creates the
    # paper and its author team in one go
    net, _ = compile_model(mini_model)
    t = _transition(net, "fb/submit_paper/in0/out0")

    assert t.input_arcs[0] == cpn.TestToken("r", "u")  # fragment entry, no flow yet
    assert cpn.SingleToken("Conference[open_for_submissions]", "v_Conference") in t.input_arcs
    assert cpn.CounterTake("AuthorTeam", "n_AuthorTeam") in t.input_arcs
    assert cpn.CounterTake("Paper", "n_Paper") in t.input_arcs

    assert set(t.guard) == {
        cpn.NotExceedsUpper("v_Conference", "Paper", 5),
        cpn.MeetsLower("v_Conference", 1),
    }

    fresh = {o.class_name: o for o in t.outputs if isinstance(o, cpn.FreshId)}
    assert fresh["Paper"].place == "Paper[submitted]"
    assert set(fresh["Paper"].associate_with) == {cpn.VarRef("v_Conference"), cpn.NewRef("AuthorTeam")}
    assert fresh["AuthorTeam"].associate_with == (cpn.NewRef("Paper"),)

    emit_cf = [o for o in t.outputs if isinstance(o, cpn.EmitCF)]
    assert emit_cf == [
        cpn.EmitCF(
            "cf:fb:submit_paper->send_submission_notification",
            None,
            (
                ("AuthorTeam", cpn.NewRef("AuthorTeam")),
                ("Conference", cpn.VarRef("v_Conference")),
                ("Paper", cpn.NewRef("Paper")),
            ),
        )
    ]


def test_batch_update_translation(mini_model):
    net, _ = compile_model(mini_model)
    t = _transition(net, "fa/close_submission/in0/out0")

    assert t.input_arcs == (
        cpn.SingleToken("cf:fa:open_submission->close_submission", "cf"),
        cpn.SingleToken("Conference[open_for_submissions]", "v_Conference"),
        cpn.CollectionBind("Paper[submitted]", "s_Paper", "v_Conference", "Paper"),
    )
    assert set(t.guard) == {
        cpn.CFConsistent("cf", "Conference", "v_Conference"),
        cpn.AllAssociatedInState("v_Conference", "Paper", "Paper[submitted]"),
        cpn.GoalCount("v_Conference", "Paper", 2),
        cpn.GoalCount("s_Paper", "AuthorTeam", 1),
    }
    assert cpn.EmitToken("Paper[in_review]", "elements:s_Paper") in t.outputs
    assert cpn.EmitToken("Conference[closed_for_submissions]", "v_Conference") in t.outputs


def test_decide_accept_translation(mini_model):
    net, _ = compile_model(mini_model)
    t = _transition(net, "fe/decide_on_paper/in0/out1")

    assert set(t.input_arcs) == {
        cpn.TestToken("r", "u"),
        cpn.SingleToken("Paper[in_review]", "v_Paper"),
        cpn.CollectionBind("Review[available]", "s_Review", "v_Paper", "Review"),
        cpn.CounterTake("Decision", "n_Decision"),
        cpn.SetTake("objects", "O"),
        cpn.SetTake("associations", "A"),
    }
    assert set(t.guard) == {
        cpn.AllAssociatedInState("v_Paper", "Review", "Review[available]"),
        cpn.NotExceedsUpper("v_Paper", "Decision", 1),
        cpn.NotExceedsUpper("s_Review", "Decision", 1),
        cpn.SetSizeAtMost("s_Review", 2),
        cpn.SetSizeAtLeast("s_Review", 1),
        cpn.MeetsLower("v_Paper", 1),
        # taking the paper out of review requires its decision and review,
        # counting what this very firing brings into existence
        cpn.GoalCount("v_Paper", "Decision", 1),
        cpn.GoalCount("v_Paper", "Review", 1),
    }
    fresh = [o for o in t.outputs if isinstance(o, cpn.FreshId)]
    assert fresh == [
        cpn.FreshId("Decision", "Decision[accepted]", (cpn.VarRef("v_Paper"), cpn.VarRef("s_Review")))
    ]
    assert not any(isinstance(o, cpn.EmitCF) for o in t.outputs)


def test_termination_translation(mini_model):
    net, _ = compile_model(mini_model)
    t = _transition(net, "termination/0")

    assert t.input_arcs == (
        cpn.SingleToken("r", "u"),
        cpn.SingleToken("Conference[reviewing_closed]", "v_Conference"),
        cpn.SetTake("objects", "O"),
        cpn.SetTake("associations", "A"),
    )
    assert set(t.guard) == {
        cpn.GoalCount("O", "Paper", 2, owner_class="Conference"),
        cpn.GoalCount("O", "Conference", 1, owner_class="Paper"),
        cpn.GoalCount("O", "AuthorTeam", 1, owner_class="Paper"),
        cpn.GoalCount("O", "Review", 1, owner_class="Paper"),
        cpn.GoalCount("O", "Decision", 1, owner_class="Paper"),
        cpn.GoalCount("O", "Paper", 1, owner_class="AuthorTeam"),
        cpn.GoalCount("O", "Paper", 1, owner_class="Review"),
        cpn.GoalCount("O", "Review", 1, owner_class="Decision"),
        cpn.GoalCount("O", "Paper", 1, owner_class="Decision"),
    }
    assert t.outputs == (cpn.EmitToken("o", "unit"),)


def test_termination_with_two_objects_of_one_class(mini_model):
    cond = DataCondition(
        frozenset({ObjectConfiguration("Paper", "notified"), ObjectConfiguration("Paper", "reviewed")})
    )
    t = translate_termination(augment_goal_guards(mini_model), cond, 3)
    assert t.id == "termination/3"
    vars_used = [a.var for a in t.input_arcs if isinstance(a, cpn.SingleToken)]
    assert vars_used == ["u", "v_Paper_1", "v_Paper_2"]


# --- gateways ---


def _gateway_model():
    f = Fragment(
        id="f1",
        activities=("a", "b"),
        gateways=("g",),
        start_events=("s",),
        labels={"g": "route"},
        flows=(("s", "g"), ("g", "a"), ("g", "b")),
        input_sets={
            "a": (IOSet(frozenset({IOEntry("Order", "s0")})),),
            "b": (IOSet(frozenset({IOEntry("Order", "s0")})),),
        },
        output_sets={
            "s": (IOSet(frozenset({IOEntry("Order", "s0")})),),
            "a": (IOSet(frozenset({IOEntry("Order", "s1")})),),
            "b": (IOSet(frozenset({IOEntry("Order", "s1")})),),
        },
    )
    return CaseModel(
        classes=("Order",),
        case_class="Order",
        constraints=(),
        olcs={"Order": ObjectLifeCycle("Order", ("s0", "s1"), (("s0", "s1"),))},
        attribute_schemas={},
        fragments=(f,),
        termination_conditions=(DataCondition(frozenset({ObjectConfiguration("Order", "s1")})),),
    )


def test_gateway_translation():
    net, report = compile_model(_gateway_model())
    assert report.transitions_by_origin["gateway"] == 2
    assert (len(net.transitions), len(net.places)) == (6, 11)

    t = _transition(net, "f1/g/s->a")
    assert t.input_arcs == (cpn.SingleToken("cf:f1:s->g", "cf"),)
    assert t.guard == ()
    assert t.outputs == (cpn.EmitToken("cf:f1:g->a", "cf"),)
    assert _transition(net, "f1/g/s->b").outputs == (cpn.EmitToken("cf:f1:g->b", "cf"),)


# --- refusal paths ---


def _order_item_model(fragments):
    return CaseModel(
        classes=("Item", "Order"),
        case_class="Order",
        constraints=(
            CardinalityConstraint("Item", "Order", 0, 1, 1),
            CardinalityConstraint("Order", "Item", 1, 1, 1),
        ),
        olcs={
            "Order": ObjectLifeCycle("Order", ("s0", "s1"), (("s0", "s1"),)),
            "Item": ObjectLifeCycle("Item", ("i0", "i1"), (("i0", "i1"),)),
        },
        attribute_schemas={},
        fragments=fragments,
        termination_conditions=(DataCondition(frozenset({ObjectConfiguration("Order", "s1")})),),
    )


def test_collection_without_reference_object_is_refused():
    # upper bound 1 means no class qualifies as the reference
    f = Fragment(
        id="f1", activities=("touch",), gateways=(), start_events=(), labels={}, flows=(),
        input_sets={"touch": (IOSet(frozenset({IOEntry("Order", "s0"),
                                               IOEntry("Item", "i0", collection=True)})),)},
        output_sets={"touch": (IOSet(frozenset({IOEntry("Item", "i1", collection=True)})),)},
    )
    with pytest.raises(CompileError, match="MissingReferenceObject"):
        compile_model(_order_item_model((f,)))


def test_creation_without_supporter_is_refused():
    f = Fragment(
        id="f1", activities=("spawn",), gateways=(), start_events=(), labels={}, flows=(),
        input_sets={"spawn": (IOSet(frozenset()),)},
        output_sets={"spawn": (IOSet(frozenset({IOEntry("Item", "i0")})),)},
    )
    with pytest.raises(CompileError, match="MissingSupporterBinding"):
        compile_model(_order_item_model((f,)))


def test_start_event_cannot_emit_collections():
    f = Fragment(
        id="f1", activities=("touch",), gateways=(), start_events=("s",), labels={},
        flows=(("s", "touch"),),
        input_sets={"touch": (IOSet(frozenset({IOEntry("Order", "s0")})),)},
        output_sets={"s": (IOSet(frozenset({IOEntry("Order", "s0"),
                                            IOEntry("Item", "i0", collection=True)})),),
                     "touch": (IOSet(frozenset({IOEntry("Order", "s1")})),)},
    )
    with pytest.raises(CompileError, match="CollectionCreation"):
        compile_model(_order_item_model((f,)))


# --- hashes and exports ---


def test_model_hash_is_stable(mini_model, micro_model):
    h = model_hash(mini_model)
    assert model_hash(parse_case_model(serialize_case_model(mini_model))) == h
    assert model_hash(augment_goal_guards(mini_model)) == h
    assert model_hash(micro_model) != h

    net, _ = compile_model(mini_model)
    assert net.model_hash == h


def test_net_carries_upper_bounds(mini_model):
    net, _ = compile_model(mini_model)
    assert net.upper("Review", "Paper") == 2
    assert net.upper("Paper", "Conference") == 5
    assert net.upper("Conference", "Review") == 0
    assert net.upper_bounds == tuple(sorted(net.upper_bounds))


def test_export_dot_is_deterministic_and_closed(mini_model):
    net, _ = compile_model(mini_model)
    dot = export_dot(net)
    assert dot == export_dot(compile_model(mini_model)[0])
    assert dot.startswith("digraph net {")
    assert dot.endswith("}\n")

    declared = set()
    edges = []
    for line in dot.splitlines():
        names = re.findall(r'"(?:[^"\\]|\\.)*"', line)
        if "[shape=" in line:
            declared.add(names[0])
        elif " -> " in line:
            edges.append((names[0], names[1]))
    assert declared
    for head, tail in edges:
        assert head in declared, head
        assert tail in declared, tail
    # read-only access is rendered dashed
    assert any("style=dashed" in line for line in dot.splitlines())

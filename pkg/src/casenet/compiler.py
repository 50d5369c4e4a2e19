"""Translation of case models into the restricted colored Petri net.

The net gets five global places (i, r, o, objects, associations), a counter
place per class, a place per object configuration, and a control-flow place
per fragment flow arc. Transitions come from four sources:

* one per start-event output set
* one per activity (input set x output set) pair
* one per gateway (incoming flow x outgoing flow) pair
* one per termination condition

Activity translation classifies every (class, collection) entry pair across
the chosen input and output set as a read, an update, or a creation, and
emits arcs, guard atoms, and output effects accordingly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import cpn
from .model import CaseModel, Fragment, IOSet
from .parsing import serialize_case_model
from .preprocess import augment_goal_guards


class CompileError(RuntimeError):
    def __init__(self, code: str, message: str) -> None:
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class CompileReport:
    places_total: int
    transitions_total: int
    places_by_role: dict[str, int]
    transitions_by_origin: dict[str, int]
    transitions_by_fragment: dict[str, int]

    def to_json(self) -> dict:
        return {
            "placesTotal": self.places_total,
            "transitionsTotal": self.transitions_total,
            "placesByRole": dict(self.places_by_role),
            "transitionsByOrigin": dict(self.transitions_by_origin),
            "transitionsByFragment": dict(self.transitions_by_fragment),
        }


def model_hash(m: CaseModel) -> str:
    """Hash of the guard-augmented model; stable across parse/serialize
    round trips and across augmentation reruns."""
    return cpn.stable_hash(json.loads(serialize_case_model(augment_goal_guards(m))))


def _config_place(class_name: str, state: str) -> str:
    return f"{class_name}[{state}]"


def _cf_place(fragment_id: str, src: str, tgt: str) -> str:
    return f"cf:{fragment_id}:{src}->{tgt}"


@dataclass(frozen=True)
class _Entry:
    class_name: str
    collection: bool
    kind: str  # read | update | create
    in_state: str | None
    out_state: str | None


def _classify(in_set: IOSet, out_set: IOSet) -> list[_Entry]:
    entries: list[_Entry] = []
    for e in in_set:
        match = out_set.entry_for(e.class_name, e.collection)
        if match is None or match.state == e.state:
            entries.append(_Entry(e.class_name, e.collection, "read", e.state, e.state))
        else:
            entries.append(_Entry(e.class_name, e.collection, "update", e.state, match.state))
    for e in out_set:
        if in_set.entry_for(e.class_name, e.collection) is None:
            entries.append(_Entry(e.class_name, e.collection, "create", None, e.state))
    entries.sort(key=lambda e: (e.class_name, e.collection))
    return entries


def _reference_class(m: CaseModel, io_set: IOSet, collection_class: str) -> str:
    refs = [
        e.class_name
        for e in io_set.singletons()
        if m.upper(collection_class, e.class_name) > 1
    ]
    if len(refs) != 1:
        raise CompileError(
            "MissingReferenceObject",
            f"collection entry '{collection_class}' needs exactly one reference object, found {len(refs)}",
        )
    return refs[0]


def translate_activity(
    m: CaseModel,
    fragment: Fragment,
    node: str,
    in_index: int,
    out_index: int,
) -> cpn.Transition:
    in_set = fragment.input_sets[node][in_index]
    out_set = fragment.output_sets[node][out_index]
    entries = _classify(in_set, out_set)

    singles = [e for e in entries if not e.collection and e.kind in ("read", "update")]
    collections = [e for e in entries if e.collection]
    created = [e for e in entries if e.kind == "create" and not e.collection]
    created_classes = {e.class_name for e in created}

    def var(class_name: str) -> str:
        return f"v_{class_name}"

    def set_var(class_name: str) -> str:
        return f"s_{class_name}"

    incoming = fragment.incoming(node)
    outgoing = fragment.outgoing(node)

    arcs: list[cpn.InputArc] = []
    if incoming:
        src, tgt = incoming[0]
        arcs.append(cpn.SingleToken(_cf_place(fragment.id, src, tgt), "cf"))
    else:
        arcs.append(cpn.TestToken("r", "u"))
    for e in singles:
        arcs.append(cpn.SingleToken(_config_place(e.class_name, e.in_state), var(e.class_name)))
    for e in collections:
        ref = _reference_class(m, in_set, e.class_name)
        arcs.append(
            cpn.CollectionBind(
                _config_place(e.class_name, e.in_state), set_var(e.class_name), var(ref), e.class_name
            )
        )
    for e in created:
        arcs.append(cpn.CounterTake(e.class_name, f"n_{e.class_name}"))
    if created:
        arcs.append(cpn.SetTake("objects", "O"))
        arcs.append(cpn.SetTake("associations", "A"))

    guard: list[cpn.GuardAtom] = []
    if incoming:
        for e in singles:
            guard.append(cpn.CFConsistent("cf", e.class_name, var(e.class_name)))
    for i, a in enumerate(singles):
        for b in singles[i + 1 :]:
            if m.associated(a.class_name, b.class_name):
                guard.append(cpn.Associated(var(a.class_name), var(b.class_name)))
    for e in collections:
        ref = _reference_class(m, in_set, e.class_name)
        guard.append(
            cpn.AllAssociatedInState(var(ref), e.class_name, _config_place(e.class_name, e.in_state))
        )
    for e in created:
        for other in singles:
            if m.associated(other.class_name, e.class_name):
                guard.append(
                    cpn.NotExceedsUpper(
                        var(other.class_name), e.class_name, m.upper(e.class_name, other.class_name)
                    )
                )
        for other in collections:
            if m.associated(other.class_name, e.class_name):
                guard.append(
                    cpn.NotExceedsUpper(
                        set_var(other.class_name), e.class_name, m.upper(e.class_name, other.class_name)
                    )
                )
                guard.append(
                    cpn.SetSizeAtMost(set_var(other.class_name), m.upper(other.class_name, e.class_name))
                )
        for supporter in m.classes:
            needed = m.lower(supporter, e.class_name)
            if needed < 1:
                continue
            if any(s.class_name == supporter for s in collections):
                guard.append(cpn.SetSizeAtLeast(set_var(supporter), needed))
            elif any(s.class_name == supporter for s in singles):
                guard.append(cpn.MeetsLower(var(supporter), needed))
            elif supporter in created_classes and supporter != e.class_name:
                pass  # co-creation supplies the one required supporter
            else:
                raise CompileError(
                    "MissingSupporterBinding",
                    f"'{node}' creates '{e.class_name}' but binds no '{supporter}' object",
                )
    for e in entries:
        if e.kind != "update":
            continue
        for g in m.olcs[e.class_name].guards.get((e.in_state, e.out_state), ()):
            v = set_var(e.class_name) if e.collection else var(e.class_name)
            guard.append(cpn.GoalCount(v, g.dependent_class, g.min_count))

    outputs: list[cpn.Output] = []
    for e in singles:
        outputs.append(cpn.EmitToken(_config_place(e.class_name, e.out_state), var(e.class_name)))
    for e in collections:
        outputs.append(
            cpn.EmitToken(_config_place(e.class_name, e.out_state), f"elements:{set_var(e.class_name)}")
        )
    for e in created:
        associate: list[cpn.Ref] = []
        for other in singles:
            if m.associated(other.class_name, e.class_name):
                associate.append(cpn.VarRef(var(other.class_name)))
        for other in collections:
            if m.associated(other.class_name, e.class_name):
                associate.append(cpn.VarRef(set_var(other.class_name)))
        for other in created:
            if other.class_name != e.class_name and m.associated(other.class_name, e.class_name):
                associate.append(cpn.NewRef(other.class_name))
        outputs.append(
            cpn.FreshId(e.class_name, _config_place(e.class_name, e.out_state), tuple(associate))
        )
    for e in created:
        outputs.append(cpn.CounterPut(e.class_name, f"n_{e.class_name}"))
    if created:
        outputs.append(cpn.SetPut("objects", "O"))
        outputs.append(cpn.SetPut("associations", "A"))
    if outgoing:
        src, tgt = outgoing[0]
        updates = []
        for e in singles:
            updates.append((e.class_name, cpn.VarRef(var(e.class_name))))
        for e in created:
            updates.append((e.class_name, cpn.NewRef(e.class_name)))
        updates.sort(key=lambda u: u[0])
        outputs.append(
            cpn.EmitCF(
                _cf_place(fragment.id, src, tgt),
                "cf" if incoming else None,
                tuple(updates),
            )
        )

    return cpn.Transition(
        id=f"{fragment.id}/{node}/in{in_index}/out{out_index}",
        origin=("activity", fragment.id, node, str(in_index), str(out_index)),
        input_arcs=tuple(arcs),
        guard=tuple(guard),
        outputs=tuple(outputs),
    )


def translate_start_event(
    m: CaseModel, fragment: Fragment, node: str, out_index: int
) -> cpn.Transition:
    out_set = fragment.output_sets[node][out_index]
    created = out_set.singletons()
    if out_set.collections():
        raise CompileError(
            "CollectionCreation", f"start event '{node}' cannot emit collection entries"
        )

    arcs: list[cpn.InputArc] = [cpn.SingleToken("i", "u")]
    for e in created:
        arcs.append(cpn.CounterTake(e.class_name, f"n_{e.class_name}"))
    if created:
        arcs.append(cpn.SetTake("objects", "O"))
        arcs.append(cpn.SetTake("associations", "A"))

    outputs: list[cpn.Output] = [cpn.EmitToken("r", "unit")]
    for e in created:
        associate = tuple(
            cpn.NewRef(other.class_name)
            for other in created
            if other.class_name != e.class_name and m.associated(other.class_name, e.class_name)
        )
        outputs.append(cpn.FreshId(e.class_name, _config_place(e.class_name, e.state), associate))
    for e in created:
        outputs.append(cpn.CounterPut(e.class_name, f"n_{e.class_name}"))
    if created:
        outputs.append(cpn.SetPut("objects", "O"))
        outputs.append(cpn.SetPut("associations", "A"))
    outgoing = fragment.outgoing(node)
    if outgoing:
        src, tgt = outgoing[0]
        updates = tuple(sorted(((e.class_name, cpn.NewRef(e.class_name)) for e in created)))
        outputs.append(cpn.EmitCF(_cf_place(fragment.id, src, tgt), None, updates))

    return cpn.Transition(
        id=f"{fragment.id}/{node}/out{out_index}",
        origin=("startEvent", fragment.id, node, str(out_index)),
        input_arcs=tuple(arcs),
        guard=(),
        outputs=tuple(outputs),
    )


def translate_gateway(
    fragment: Fragment, node: str, in_flow: tuple[str, str], out_flow: tuple[str, str]
) -> cpn.Transition:
    return cpn.Transition(
        id=f"{fragment.id}/{node}/{in_flow[0]}->{out_flow[1]}",
        origin=("gateway", fragment.id, node, in_flow[0], out_flow[1]),
        input_arcs=(cpn.SingleToken(_cf_place(fragment.id, *in_flow), "cf"),),
        guard=(),
        outputs=(cpn.EmitToken(_cf_place(fragment.id, *out_flow), "cf"),),
    )


def translate_termination(m: CaseModel, condition, index: int) -> cpn.Transition:
    configs = condition.sorted_configurations()
    arcs: list[cpn.InputArc] = [cpn.SingleToken("r", "u")]
    class_counts: dict[str, int] = {}
    for c in configs:
        class_counts[c.class_name] = class_counts.get(c.class_name, 0) + 1
    seen: dict[str, int] = {}
    for c in configs:
        if class_counts[c.class_name] > 1:
            seen[c.class_name] = seen.get(c.class_name, 0) + 1
            v = f"v_{c.class_name}_{seen[c.class_name]}"
        else:
            v = f"v_{c.class_name}"
        arcs.append(cpn.SingleToken(_config_place(c.class_name, c.state), v))
    arcs.append(cpn.SetTake("objects", "O"))
    arcs.append(cpn.SetTake("associations", "A"))

    guard: list[cpn.GuardAtom] = []
    for owner in m.classes:
        for dependent in m.classes:
            bound = m.goal_lower(dependent, owner)
            if bound > 0:
                guard.append(cpn.GoalCount("O", dependent, bound, owner_class=owner))

    return cpn.Transition(
        id=f"termination/{index}",
        origin=("termination", str(index)),
        input_arcs=tuple(arcs),
        guard=tuple(guard),
        outputs=(cpn.EmitToken("o", "unit"),),
    )


def compile_model(m: CaseModel) -> tuple[cpn.Net, CompileReport]:
    m = augment_goal_guards(m)

    places: list[cpn.Place] = [
        cpn.Place("i", "Unit", ("initial",)),
        cpn.Place("r", "Unit", ("running",)),
        cpn.Place("o", "Unit", ("final",)),
        cpn.Place("objects", "IdSet", ("objects",)),
        cpn.Place("associations", "AssocSet", ("associations",)),
    ]
    for c in m.classes:
        places.append(cpn.Place(f"cnt_{c}", "Int", ("counter", c)))
    for c in m.classes:
        for q in m.olcs[c].states:
            places.append(cpn.Place(_config_place(c, q), "Id", ("config", c, q)))
    for f in m.fragments:
        for src, tgt in f.flows:
            places.append(
                cpn.Place(_cf_place(f.id, src, tgt), "CFMap", ("controlFlow", f.id, src, tgt))
            )

    transitions: list[cpn.Transition] = []
    by_fragment: dict[str, int] = {}
    by_origin = {"startEvent": 0, "activity": 0, "gateway": 0, "termination": 0}
    for f in m.fragments:
        count = 0
        for node in f.start_events:
            for j in range(len(f.output_sets.get(node, ()))):
                transitions.append(translate_start_event(m, f, node, j))
                by_origin["startEvent"] += 1
                count += 1
        for node in f.activities:
            for i in range(len(f.input_sets.get(node, ()))):
                for j in range(len(f.output_sets.get(node, ()))):
                    transitions.append(translate_activity(m, f, node, i, j))
                    by_origin["activity"] += 1
                    count += 1
        for node in f.gateways:
            for in_flow in f.incoming(node):
                for out_flow in f.outgoing(node):
                    transitions.append(translate_gateway(f, node, in_flow, out_flow))
                    by_origin["gateway"] += 1
                    count += 1
        by_fragment[f.id] = count
    for k, condition in enumerate(m.termination_conditions):
        transitions.append(translate_termination(m, condition, k))
        by_origin["termination"] += 1

    net = cpn.Net(
        places=tuple(places),
        transitions=tuple(transitions),
        classes=tuple(m.classes),
        model_hash=model_hash(m),
        upper_bounds=tuple(
            sorted((c.source, c.target, c.upper) for c in m.constraints if c.upper > 0)
        ),
    )

    roles: dict[str, int] = {}
    for p in places:
        roles[p.role[0]] = roles.get(p.role[0], 0) + 1
    report = CompileReport(
        places_total=len(places),
        transitions_total=len(transitions),
        places_by_role=roles,
        transitions_by_origin=by_origin,
        transitions_by_fragment=by_fragment,
    )
    return net, report


def export_dot(net: cpn.Net) -> str:
    """Deterministic DOT rendering: places as ellipses, transitions as
    boxes, dashed edges for read-only access."""

    def quote(s: str) -> str:
        return '"' + s.replace('"', '\\"') + '"'

    lines = ["digraph net {", "  rankdir=LR;"]
    for p in net.places:
        label = f"{p.id}\\n{p.colorset}"
        lines.append(f"  {quote('p:' + p.id)} [shape=ellipse, label={quote(label)}];")
    for t in net.transitions:
        lines.append(f"  {quote('t:' + t.id)} [shape=box, label={quote(t.id)}];")
    for t in net.transitions:
        tnode = quote("t:" + t.id)
        for arc in t.input_arcs:
            if isinstance(arc, cpn.SingleToken):
                lines.append(f"  {quote('p:' + arc.place)} -> {tnode};")
            elif isinstance(arc, cpn.TestToken):
                lines.append(f"  {quote('p:' + arc.place)} -> {tnode} [style=dashed];")
            elif isinstance(arc, cpn.CounterTake):
                lines.append(f"  {quote('p:cnt_' + arc.class_name)} -> {tnode};")
            elif isinstance(arc, cpn.SetTake):
                lines.append(f"  {quote('p:' + arc.place)} -> {tnode};")
            elif isinstance(arc, cpn.CollectionBind):
                lines.append(f"  {quote('p:' + arc.config_place)} -> {tnode} [label=all];")
        for out in t.outputs:
            if isinstance(out, cpn.EmitToken):
                lines.append(f"  {tnode} -> {quote('p:' + out.place)};")
            elif isinstance(out, cpn.FreshId):
                lines.append(f"  {tnode} -> {quote('p:' + out.place)} [label=new];")
            elif isinstance(out, cpn.CounterPut):
                lines.append(f"  {tnode} -> {quote('p:cnt_' + out.class_name)};")
            elif isinstance(out, cpn.SetPut):
                lines.append(f"  {tnode} -> {quote('p:' + out.place)};")
            elif isinstance(out, cpn.EmitCF):
                lines.append(f"  {tnode} -> {quote('p:' + out.place)};")
    lines.append("}")
    return "\n".join(lines) + "\n"

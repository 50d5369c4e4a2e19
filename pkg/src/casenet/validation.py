"""Semantic validation of case models.

Three layers, each returning violations as data:

* validate_domain_model: cardinality bounds, association shape, life cycles
* validate_fragments: per-fragment control-flow and IO-set rules
* validate_case_model: cross-cutting rules tying fragments to constraints

validate_all chains them, running the cross-cutting layer only when the
first two are clean (its checks presuppose a sane domain model).
"""

from __future__ import annotations

from graphlib import CycleError, TopologicalSorter

from .model import CaseModel, Fragment, IOSet, Violation


def _pair_subject(a: str, b: str) -> str:
    return f"{a}--{b}"


def validate_domain_model(m: CaseModel) -> list[Violation]:
    out: list[Violation] = []

    for name in m.classes:
        if not name:
            out.append(Violation("EmptyName", "class names must be non-empty", name))
        olc = m.olcs[name]
        seen_states: set[str] = set()
        for state in olc.states:
            if not state:
                out.append(Violation("EmptyName", "state names must be non-empty", name))
            if state in seen_states:
                out.append(Violation("DuplicateState", f"state '{state}' declared twice", name))
            seen_states.add(state)
        for source, target in olc.transitions:
            for state in (source, target):
                if state not in seen_states:
                    out.append(
                        Violation(
                            "UnknownState",
                            f"transition ({source}, {target}) references undeclared state '{state}'",
                            name,
                        )
                    )
        for (source, target), guards in olc.guards.items():
            for guard in guards:
                if guard.dependent_class not in m.classes:
                    out.append(
                        Violation(
                            "UnknownClass",
                            f"guard on ({source}, {target}) references undeclared class "
                            f"'{guard.dependent_class}'",
                            name,
                        )
                    )
                elif guard.min_count != m.goal_lower(guard.dependent_class, name):
                    out.append(
                        Violation(
                            "GuardMismatch",
                            f"guard on ({source}, {target}) requires {guard.min_count} "
                            f"'{guard.dependent_class}' objects but the goal lower bound is "
                            f"{m.goal_lower(guard.dependent_class, name)}",
                            name,
                        )
                    )

    reported_self: set[str] = set()
    for c in m.constraints:
        subject = _pair_subject(c.source, c.target)
        for endpoint in (c.source, c.target):
            if endpoint not in m.classes:
                out.append(
                    Violation("UnknownClass", f"constraint references undeclared class '{endpoint}'", subject)
                )
        if c.source == c.target and c.source not in reported_self:
            reported_self.add(c.source)
            out.append(
                Violation("SelfAssociation", "a class cannot be associated with itself", subject)
            )
        if min(c.lower, c.goal_lower, c.upper) < 0:
            out.append(Violation("NegativeBound", "cardinality bounds must be non-negative", subject))
        if not (c.lower <= c.goal_lower <= c.upper):
            out.append(
                Violation(
                    "BoundsOrder",
                    f"bounds must satisfy lower <= goalLower <= upper, got "
                    f"{c.lower} / {c.goal_lower} / {c.upper}",
                    subject,
                )
            )

    for a, b in m.association_pairs():
        subject = _pair_subject(a, b)
        if (m.upper(a, b) > 0) != (m.upper(b, a) > 0):
            out.append(
                Violation(
                    "AsymmetricAssociation",
                    "an association must have a positive upper bound in both directions",
                    subject,
                )
            )
            continue
        if m.upper(a, b) > 1 and m.upper(b, a) > 1:
            out.append(
                Violation(
                    "A2ManyToMany",
                    f"many-to-many associations are not supported "
                    f"(upper {m.upper(a, b)} and {m.upper(b, a)}); "
                    f"reify the association into a separate class with two one-to-many associations",
                    subject,
                )
            )
        if m.lower(a, b) == 0 and m.lower(b, a) == 0:
            out.append(
                Violation(
                    "A1NonExistential",
                    "every association must be existential: at least one direction needs a "
                    "positive lower bound",
                    subject,
                )
            )

    return out


def _check_io_set(m: CaseModel, io_set: IOSet, subject: str, out: list[Violation]) -> None:
    seen: set[tuple[str, bool]] = set()
    for entry in io_set:
        key = (entry.class_name, entry.collection)
        if key in seen:
            kind = "collection" if entry.collection else "single-object"
            out.append(
                Violation(
                    "DuplicateClassEntry",
                    f"more than one {kind} entry for class '{entry.class_name}' in one set",
                    subject,
                )
            )
        seen.add(key)
        if entry.class_name not in m.classes:
            out.append(
                Violation("UnknownClass", f"entry references undeclared class '{entry.class_name}'", subject)
            )
        elif entry.state not in m.olcs[entry.class_name].states:
            out.append(
                Violation(
                    "UnknownState",
                    f"entry references undeclared state '{entry.class_name}[{entry.state}]'",
                    subject,
                )
            )


def _validate_fragment(m: CaseModel, f: Fragment) -> list[Violation]:
    out: list[Violation] = []

    if not f.activities:
        out.append(Violation("NoActivities", "a fragment needs at least one activity", f.id))
    if len(f.start_events) > 1:
        out.append(
            Violation("StartEventCount", f"at most one start event allowed, found {len(f.start_events)}", f.id)
        )

    graph: dict[str, set[str]] = {node: set() for node in f.nodes}
    for src, tgt in f.flows:
        graph[tgt].add(src)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        cycle = " -> ".join(exc.args[1])
        out.append(Violation("Acyclicity", f"control flow contains a cycle: {cycle}", f.id))

    for src, tgt in f.flows:
        if tgt in f.start_events:
            out.append(Violation("FlowShape", f"control flow into start event '{tgt}'", f.id))

    for node in f.activities:
        if len(f.incoming(node)) > 1:
            out.append(
                Violation("ActivityIncoming", f"activity '{node}' has more than one incoming flow", f.id)
            )
    for node in f.activities + f.start_events:
        if len(f.outgoing(node)) > 1:
            out.append(
                Violation("OutgoingCount", f"node '{node}' has more than one outgoing flow", f.id)
            )
    for node in f.gateways:
        if not f.incoming(node):
            out.append(Violation("GatewayStart", f"gateway '{node}' has no predecessor", f.id))

    if not f.start_events and not any(v.code == "Acyclicity" for v in out):
        entry_activities = [a for a in f.activities if not f.incoming(a)]
        if f.activities and len(entry_activities) != 1:
            out.append(
                Violation(
                    "EntryPoint",
                    f"a fragment without start event must start with exactly one activity, "
                    f"found {len(entry_activities)}",
                    f.id,
                )
            )

    for node in f.activities:
        if not f.input_sets.get(node):
            out.append(Violation("MissingIOSets", f"activity '{node}' has no input sets", f.id))
        if not f.output_sets.get(node):
            out.append(Violation("MissingIOSets", f"activity '{node}' has no output sets", f.id))
    for node in f.start_events:
        if not f.output_sets.get(node):
            out.append(Violation("MissingIOSets", f"start event '{node}' has no output sets", f.id))
        if f.input_sets.get(node):
            out.append(Violation("InputOnStartEvent", f"start event '{node}' cannot have input sets", f.id))
    for node in f.gateways:
        if f.input_sets.get(node) or f.output_sets.get(node):
            out.append(Violation("IOSetOnGateway", f"gateway '{node}' cannot have input or output sets", f.id))

    for node in f.nodes:
        for kind, sets in (("input", f.input_sets.get(node, ())), ("output", f.output_sets.get(node, ()))):
            for idx, io_set in enumerate(sets):
                _check_io_set(m, io_set, f"{f.id}/{node}/{kind}[{idx}]", out)

    return out


def validate_fragments(m: CaseModel) -> list[Violation]:
    out: list[Violation] = []
    for f in m.fragments:
        out.extend(_validate_fragment(m, f))
    return out


def _classify(in_set: IOSet, out_set: IOSet) -> dict[tuple[str, bool], tuple[str, str | None, str | None]]:
    """Per (class, collection) pairing between one input and one output set.

    Returns {(class, collection): (kind, inState, outState)} with kind one of
    'read', 'update', 'create'.
    """
    result: dict[tuple[str, bool], tuple[str, str | None, str | None]] = {}
    for entry in in_set:
        key = (entry.class_name, entry.collection)
        match = out_set.entry_for(entry.class_name, entry.collection)
        if match is None:
            result[key] = ("read", entry.state, None)
        elif match.state == entry.state:
            result[key] = ("read", entry.state, match.state)
        else:
            result[key] = ("update", entry.state, match.state)
    for entry in out_set:
        key = (entry.class_name, entry.collection)
        if key not in result:
            result[key] = ("create", None, entry.state)
    return result


def validate_case_model(m: CaseModel) -> list[Violation]:
    """Cross-cutting rules: supporter coverage for created dependents,
    set reads for multi-object lower bounds, unique reference objects for
    collections, and fragment state changes matching life cycles."""

    out: list[Violation] = []

    for condition in m.termination_conditions:
        for config in condition.sorted_configurations():
            if config.class_name not in m.classes:
                out.append(
                    Violation(
                        "UnknownClass",
                        f"termination condition references undeclared class '{config.class_name}'",
                        "termination",
                    )
                )
            elif config.state not in m.olcs[config.class_name].states:
                out.append(
                    Violation(
                        "UnknownState",
                        f"termination condition references undeclared state "
                        f"'{config.class_name}[{config.state}]'",
                        "termination",
                    )
                )

    for f in m.fragments:
        for node in f.activities + f.start_events:
            subject = f"{f.id}/{node}"
            in_sets = f.input_sets.get(node, ()) or (IOSet(frozenset()),)
            out_sets = f.output_sets.get(node, ())

            # The reference object disambiguates which associated set a
            # collection entry binds; only input sets construct that binding,
            # so only they need a unique reference.
            for in_set in in_sets:
                for entry in in_set.collections():
                    refs = [
                        other
                        for other in in_set.singletons()
                        if m.upper(entry.class_name, other.class_name) > 1
                    ]
                    if len(refs) != 1:
                        out.append(
                            Violation(
                                "ReferenceObjectRequired",
                                f"collection entry '{entry.class_name}' in an input set "
                                f"needs exactly one single-object entry of a class that can "
                                f"have several '{entry.class_name}' objects, found {len(refs)}",
                                subject,
                            )
                        )

            for in_set in in_sets:
                for out_set in out_sets:
                    pairing = _classify(in_set, out_set)

                    present_classes = {cls for (cls, _flag) in pairing}
                    for (cls, collection), (kind, in_state, out_state) in pairing.items():
                        if cls not in m.classes:
                            continue
                        if kind == "create" and collection:
                            out.append(
                                Violation(
                                    "CollectionCreation",
                                    f"collection entry for '{cls}' appears only in the output set; "
                                    f"sets of objects cannot be created at once",
                                    subject,
                                )
                            )
                            continue
                        if kind == "update" and not m.olcs[cls].has_transition(in_state, out_state):
                            out.append(
                                Violation(
                                    "InvalidStateChange",
                                    f"'{cls}' moves from '{in_state}' to '{out_state}' but the "
                                    f"life cycle has no such transition",
                                    subject,
                                )
                            )
                        if kind == "create":
                            for supporter in m.classes:
                                needed = m.lower(supporter, cls)
                                if needed == 0:
                                    continue
                                if supporter not in present_classes:
                                    out.append(
                                        Violation(
                                            "DependentWithoutSupporter",
                                            f"'{node}' creates '{cls}' objects, which require "
                                            f"{needed} associated '{supporter}' object(s), but "
                                            f"'{supporter}' is neither read nor co-created here",
                                            subject,
                                        )
                                    )
                                elif needed > 1 and (supporter, True) not in pairing:
                                    out.append(
                                        Violation(
                                            "SetReadRequired",
                                            f"'{node}' creates '{cls}' objects requiring {needed} "
                                            f"associated '{supporter}' objects; a collection read "
                                            f"of '{supporter}' is required",
                                            subject,
                                        )
                                    )

    return out


def validate_all(m: CaseModel) -> list[Violation]:
    out = validate_domain_model(m) + validate_fragments(m)
    if out:
        return out
    return validate_case_model(m)

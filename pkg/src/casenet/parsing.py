"""Reading and writing the JSON model document format.

Parsing is purely structural: it checks shapes, types, and key names and
builds a CaseModel. Semantic rules (cardinality order, acyclicity, supporter
coverage) live in the validation module.
"""

from __future__ import annotations

import json
from typing import Any

from .model import (
    AttributeSpec,
    CardinalityConstraint,
    CaseModel,
    DataCondition,
    Fragment,
    GoalGuard,
    IOEntry,
    IOSet,
    ObjectConfiguration,
    ObjectLifeCycle,
    PRIMITIVE_TYPES,
)

TOP_LEVEL_KEYS = {"classes", "constraints", "fragments", "terminationConditions"}
CLASS_KEYS = {"name", "isCaseClass", "attributes", "states", "transitions"}
ATTRIBUTE_KEYS = {"name", "type"}
CONSTRAINT_KEYS = {
    "classA",
    "classB",
    "lowerAperB",
    "goalLowerAperB",
    "upperAperB",
    "lowerBperA",
    "goalLowerBperA",
    "upperBperA",
}
NODE_KEYS = {"id", "type", "label"}
FRAGMENT_KEYS = {"id", "nodes", "flows", "inputSets", "outputSets"}
IO_ENTRY_KEYS = {"class", "state", "collection"}
GUARD_KEYS = {"class", "minCount"}
NODE_TYPES = {"activity", "gateway", "startEvent"}


class ParseError(ValueError):
    """Malformed model document; ``location`` is a path into the JSON."""

    def __init__(self, message: str, location: str = "$") -> None:
        super().__init__(f"{location}: {message}")
        self.location = location
        self.reason = message


class MissingSection(ParseError):
    pass


def _expect(value: Any, kind: type, location: str, what: str) -> Any:
    if kind is int and isinstance(value, bool):
        raise ParseError(f"{what} must be an integer, got boolean", location)
    if not isinstance(value, kind):
        raise ParseError(f"{what} must be {kind.__name__}, got {type(value).__name__}", location)
    return value


def _reject_unknown(obj: dict, allowed: set[str], location: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ParseError(f"unknown key(s): {', '.join(unknown)}", location)


def _parse_io_entry(raw: Any, location: str) -> IOEntry:
    _expect(raw, dict, location, "input/output entry")
    _reject_unknown(raw, IO_ENTRY_KEYS, location)
    if "class" not in raw or "state" not in raw:
        raise ParseError("entry requires 'class' and 'state'", location)
    collection = raw.get("collection", False)
    _expect(collection, bool, f"{location}.collection", "'collection'")
    return IOEntry(
        class_name=_expect(raw["class"], str, f"{location}.class", "'class'"),
        state=_expect(raw["state"], str, f"{location}.state", "'state'"),
        collection=collection,
    )


def _parse_io_sets(raw: Any, location: str) -> tuple[IOSet, ...]:
    _expect(raw, list, location, "input/output set list")
    sets = []
    for i, raw_set in enumerate(raw):
        _expect(raw_set, list, f"{location}[{i}]", "input/output set")
        entries = [_parse_io_entry(e, f"{location}[{i}][{j}]") for j, e in enumerate(raw_set)]
        sets.append(IOSet(frozenset(entries)))
    return tuple(sets)


def _parse_class(raw: Any, location: str) -> tuple[str, bool, tuple[AttributeSpec, ...], ObjectLifeCycle]:
    _expect(raw, dict, location, "class")
    _reject_unknown(raw, CLASS_KEYS, location)
    for key in ("name", "states", "transitions"):
        if key not in raw:
            raise ParseError(f"class requires '{key}'", location)
    name = _expect(raw["name"], str, f"{location}.name", "'name'")
    is_case = raw.get("isCaseClass", False)
    _expect(is_case, bool, f"{location}.isCaseClass", "'isCaseClass'")

    attributes = []
    for i, raw_attr in enumerate(raw.get("attributes", [])):
        loc = f"{location}.attributes[{i}]"
        _expect(raw_attr, dict, loc, "attribute")
        _reject_unknown(raw_attr, ATTRIBUTE_KEYS, loc)
        if "name" not in raw_attr or "type" not in raw_attr:
            raise ParseError("attribute requires 'name' and 'type'", loc)
        attr_type = _expect(raw_attr["type"], str, f"{loc}.type", "'type'")
        if attr_type not in PRIMITIVE_TYPES:
            raise ParseError(f"attribute type must be one of {PRIMITIVE_TYPES}", f"{loc}.type")
        attributes.append(AttributeSpec(name=raw_attr["name"], type=attr_type))

    states = tuple(
        _expect(s, str, f"{location}.states[{i}]", "state name")
        for i, s in enumerate(_expect(raw["states"], list, f"{location}.states", "'states'"))
    )

    transitions: list[tuple[str, str]] = []
    guards: dict[tuple[str, str], tuple[GoalGuard, ...]] = {}
    raw_transitions = _expect(raw["transitions"], list, f"{location}.transitions", "'transitions'")
    for i, raw_t in enumerate(raw_transitions):
        loc = f"{location}.transitions[{i}]"
        _expect(raw_t, list, loc, "transition")
        if len(raw_t) not in (2, 3):
            raise ParseError("transition must be [from, to] with optional guard list", loc)
        source = _expect(raw_t[0], str, f"{loc}[0]", "transition source")
        target = _expect(raw_t[1], str, f"{loc}[1]", "transition target")
        transitions.append((source, target))
        if len(raw_t) == 3:
            raw_guards = _expect(raw_t[2], list, f"{loc}[2]", "guard list")
            parsed = []
            for j, raw_g in enumerate(raw_guards):
                gloc = f"{loc}[2][{j}]"
                _expect(raw_g, dict, gloc, "guard")
                _reject_unknown(raw_g, GUARD_KEYS, gloc)
                if "class" not in raw_g or "minCount" not in raw_g:
                    raise ParseError("guard requires 'class' and 'minCount'", gloc)
                parsed.append(
                    GoalGuard(
                        dependent_class=_expect(raw_g["class"], str, f"{gloc}.class", "'class'"),
                        min_count=_expect(raw_g["minCount"], int, f"{gloc}.minCount", "'minCount'"),
                    )
                )
            guards[(source, target)] = tuple(parsed)

    olc = ObjectLifeCycle(class_name=name, states=states, transitions=tuple(transitions), guards=guards)
    return name, is_case, tuple(attributes), olc


def _parse_constraint(raw: Any, location: str) -> list[CardinalityConstraint]:
    _expect(raw, dict, location, "constraint")
    _reject_unknown(raw, CONSTRAINT_KEYS, location)
    missing = sorted(CONSTRAINT_KEYS - set(raw))
    if missing:
        raise ParseError(f"constraint requires {', '.join(missing)}", location)
    class_a = _expect(raw["classA"], str, f"{location}.classA", "'classA'")
    class_b = _expect(raw["classB"], str, f"{location}.classB", "'classB'")
    bounds = {
        key: _expect(raw[key], int, f"{location}.{key}", f"'{key}'")
        for key in CONSTRAINT_KEYS - {"classA", "classB"}
    }
    return [
        CardinalityConstraint(
            source=class_a,
            target=class_b,
            lower=bounds["lowerAperB"],
            goal_lower=bounds["goalLowerAperB"],
            upper=bounds["upperAperB"],
        ),
        CardinalityConstraint(
            source=class_b,
            target=class_a,
            lower=bounds["lowerBperA"],
            goal_lower=bounds["goalLowerBperA"],
            upper=bounds["upperBperA"],
        ),
    ]


def _parse_fragment(raw: Any, location: str) -> Fragment:
    _expect(raw, dict, location, "fragment")
    _reject_unknown(raw, FRAGMENT_KEYS, location)
    for key in ("id", "nodes", "flows"):
        if key not in raw:
            raise ParseError(f"fragment requires '{key}'", location)
    fragment_id = _expect(raw["id"], str, f"{location}.id", "'id'")

    activities: list[str] = []
    gateways: list[str] = []
    start_events: list[str] = []
    labels: dict[str, str] = {}
    for i, raw_node in enumerate(_expect(raw["nodes"], list, f"{location}.nodes", "'nodes'")):
        loc = f"{location}.nodes[{i}]"
        _expect(raw_node, dict, loc, "node")
        _reject_unknown(raw_node, NODE_KEYS, loc)
        if "id" not in raw_node or "type" not in raw_node:
            raise ParseError("node requires 'id' and 'type'", loc)
        node_id = _expect(raw_node["id"], str, f"{loc}.id", "'id'")
        node_type = _expect(raw_node["type"], str, f"{loc}.type", "'type'")
        if node_type not in NODE_TYPES:
            raise ParseError(f"node type must be one of {sorted(NODE_TYPES)}", f"{loc}.type")
        if node_id in labels:
            raise ParseError(f"duplicate node id '{node_id}'", loc)
        labels[node_id] = _expect(raw_node.get("label", node_id), str, f"{loc}.label", "'label'")
        {"activity": activities, "gateway": gateways, "startEvent": start_events}[node_type].append(node_id)

    flows: list[tuple[str, str]] = []
    for i, raw_flow in enumerate(_expect(raw["flows"], list, f"{location}.flows", "'flows'")):
        loc = f"{location}.flows[{i}]"
        _expect(raw_flow, list, loc, "flow")
        if len(raw_flow) != 2:
            raise ParseError("flow must be [src, tgt]", loc)
        flows.append(
            (
                _expect(raw_flow[0], str, f"{loc}[0]", "flow source"),
                _expect(raw_flow[1], str, f"{loc}[1]", "flow target"),
            )
        )
    for i, (src, tgt) in enumerate(flows):
        for end, node in (("source", src), ("target", tgt)):
            if node not in labels:
                raise ParseError(f"flow {end} '{node}' is not a declared node", f"{location}.flows[{i}]")

    input_sets: dict[str, tuple[IOSet, ...]] = {}
    output_sets: dict[str, tuple[IOSet, ...]] = {}
    for key, store in (("inputSets", input_sets), ("outputSets", output_sets)):
        raw_map = raw.get(key, {})
        _expect(raw_map, dict, f"{location}.{key}", f"'{key}'")
        for node_id, raw_sets in raw_map.items():
            if node_id not in labels:
                raise ParseError(f"'{node_id}' is not a declared node", f"{location}.{key}")
            store[node_id] = _parse_io_sets(raw_sets, f"{location}.{key}.{node_id}")

    return Fragment(
        id=fragment_id,
        activities=tuple(activities),
        gateways=tuple(gateways),
        start_events=tuple(start_events),
        labels=labels,
        flows=tuple(flows),
        input_sets=input_sets,
        output_sets=output_sets,
    )


def parse_case_model(source: str | dict) -> CaseModel:
    """Parse a model document, given as JSON text or as the decoded
    document itself. Raises ParseError (or its subclass MissingSection) on
    structural problems; semantic checks are elsewhere."""

    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}"
            ) from exc
    else:
        doc = source

    _expect(doc, dict, "$", "document")
    _reject_unknown(doc, TOP_LEVEL_KEYS, "$")
    for section in ("classes", "fragments", "terminationConditions"):
        if section not in doc:
            raise MissingSection(f"missing required section '{section}'", "$")

    classes: list[str] = []
    case_classes: list[str] = []
    olcs: dict[str, ObjectLifeCycle] = {}
    schemas: dict[str, tuple[AttributeSpec, ...]] = {}
    _expect(doc["classes"], list, "$.classes", "'classes'")
    for i, raw_class in enumerate(doc["classes"]):
        name, is_case, attributes, olc = _parse_class(raw_class, f"$.classes[{i}]")
        if name in olcs:
            raise ParseError(f"duplicate class '{name}'", f"$.classes[{i}]")
        classes.append(name)
        olcs[name] = olc
        schemas[name] = attributes
        if is_case:
            case_classes.append(name)
    if len(case_classes) != 1:
        raise ParseError(
            f"exactly one class must set isCaseClass, found {len(case_classes)}", "$.classes"
        )

    constraints: list[CardinalityConstraint] = []
    for i, raw_constraint in enumerate(doc.get("constraints", [])):
        pair = _parse_constraint(raw_constraint, f"$.constraints[{i}]")
        for c in pair:
            if any(c.source == p.source and c.target == p.target for p in constraints):
                raise ParseError(
                    f"duplicate constraint for ({c.source}, {c.target})", f"$.constraints[{i}]"
                )
        constraints.extend(pair)

    fragments = []
    _expect(doc["fragments"], list, "$.fragments", "'fragments'")
    for i, raw_fragment in enumerate(doc["fragments"]):
        fragment = _parse_fragment(raw_fragment, f"$.fragments[{i}]")
        if any(f.id == fragment.id for f in fragments):
            raise ParseError(f"duplicate fragment id '{fragment.id}'", f"$.fragments[{i}]")
        fragments.append(fragment)

    conditions = []
    raw_conditions = _expect(
        doc["terminationConditions"], list, "$.terminationConditions", "'terminationConditions'"
    )
    if not raw_conditions:
        raise MissingSection("terminationConditions must be non-empty", "$.terminationConditions")
    for i, raw_condition in enumerate(raw_conditions):
        loc = f"$.terminationConditions[{i}]"
        _expect(raw_condition, list, loc, "termination condition")
        configs = []
        for j, raw_config in enumerate(raw_condition):
            cloc = f"{loc}[{j}]"
            _expect(raw_config, dict, cloc, "configuration")
            _reject_unknown(raw_config, {"class", "state"}, cloc)
            if "class" not in raw_config or "state" not in raw_config:
                raise ParseError("configuration requires 'class' and 'state'", cloc)
            configs.append(
                ObjectConfiguration(
                    class_name=_expect(raw_config["class"], str, f"{cloc}.class", "'class'"),
                    state=_expect(raw_config["state"], str, f"{cloc}.state", "'state'"),
                )
            )
        conditions.append(DataCondition(frozenset(configs)))

    return CaseModel(
        classes=tuple(classes),
        case_class=case_classes[0],
        constraints=tuple(constraints),
        olcs=olcs,
        attribute_schemas=schemas,
        fragments=tuple(fragments),
        termination_conditions=tuple(conditions),
    )


def serialize_case_model(model: CaseModel) -> str:
    """Inverse of parse_case_model; parse(serialize(m)) is structurally
    equal to m."""

    classes = []
    for name in model.classes:
        olc = model.olcs[name]
        transitions: list[list] = []
        for source, target in olc.transitions:
            guards = olc.guards.get((source, target), ())
            entry: list = [source, target]
            if guards:
                entry.append(
                    [{"class": g.dependent_class, "minCount": g.min_count} for g in guards]
                )
            transitions.append(entry)
        classes.append(
            {
                "name": name,
                "isCaseClass": name == model.case_class,
                "attributes": [{"name": a.name, "type": a.type} for a in model.schema(name)],
                "states": list(olc.states),
                "transitions": transitions,
            }
        )

    constraints = []
    done: set[tuple[str, str]] = set()
    for c in model.constraints:
        key = tuple(sorted((c.source, c.target)))
        if key in done:
            continue
        done.add(key)  # type: ignore[arg-type]
        class_a, class_b = key
        constraints.append(
            {
                "classA": class_a,
                "classB": class_b,
                "lowerAperB": model.lower(class_a, class_b),
                "goalLowerAperB": model.goal_lower(class_a, class_b),
                "upperAperB": model.upper(class_a, class_b),
                "lowerBperA": model.lower(class_b, class_a),
                "goalLowerBperA": model.goal_lower(class_b, class_a),
                "upperBperA": model.upper(class_b, class_a),
            }
        )

    def io_entry(e: IOEntry) -> dict:
        out: dict = {"class": e.class_name, "state": e.state}
        if e.collection:
            out["collection"] = True
        return out

    fragments = []
    for f in model.fragments:
        nodes = []
        for node_id in f.start_events:
            nodes.append({"id": node_id, "type": "startEvent", "label": f.label(node_id)})
        for node_id in f.activities:
            nodes.append({"id": node_id, "type": "activity", "label": f.label(node_id)})
        for node_id in f.gateways:
            nodes.append({"id": node_id, "type": "gateway", "label": f.label(node_id)})
        fragments.append(
            {
                "id": f.id,
                "nodes": nodes,
                "flows": [list(flow) for flow in f.flows],
                "inputSets": {
                    node: [[io_entry(e) for e in s] for s in sets]
                    for node, sets in sorted(f.input_sets.items())
                },
                "outputSets": {
                    node: [[io_entry(e) for e in s] for s in sets]
                    for node, sets in sorted(f.output_sets.items())
                },
            }
        )

    conditions = [
        [{"class": c.class_name, "state": c.state} for c in condition.sorted_configurations()]
        for condition in model.termination_conditions
    ]

    return json.dumps(
        {
            "classes": classes,
            "constraints": constraints,
            "fragments": fragments,
            "terminationConditions": conditions,
        },
        indent=2,
    )

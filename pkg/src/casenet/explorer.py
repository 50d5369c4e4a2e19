"""Bounded exhaustive exploration of compiled nets.

Breadth-first search over fire-successors, checking structural invariants
on every visited marking. Depth is the number of fired transitions, so the
first terminating marking found yields a shortest witness trace.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any

from . import cpn


@dataclass(frozen=True)
class InvariantViolation:
    code: str
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message}


def _config_placement(net: cpn.Net, marking: cpn.Marking) -> dict[cpn.Id, list[str]]:
    seen_on: dict[cpn.Id, list[str]] = {}
    for place in net.places:
        if place.role[0] != "config":
            continue
        for token in marking.tokens(place.id):
            seen_on.setdefault(token, []).append(place.id)
    return seen_on


def check_invariants(net: cpn.Net, marking: cpn.Marking) -> list[InvariantViolation]:
    out: list[InvariantViolation] = []

    abstract = sum(len(marking.tokens(p)) for p in ("i", "r", "o"))
    if abstract != 1:
        out.append(
            InvariantViolation(
                "AbstractStateExclusivity",
                f"expected exactly one token across i/r/o, found {abstract}",
            )
        )

    terminated = bool(marking.tokens("o"))
    objects = marking.tokens("objects")
    assocs = marking.tokens("associations")
    required = 0 if terminated else 1  # closing the case consumes both set tokens
    if len(objects) != required or len(assocs) != required:
        out.append(
            InvariantViolation(
                "SetTokenCount",
                f"expected {required} token(s) each on objects/associations, found "
                f"{len(objects)}/{len(assocs)}",
            )
        )
    if len(objects) != 1 or len(assocs) != 1:
        for obj, places in _config_placement(net, marking).items():
            if len(places) > 1:
                out.append(
                    InvariantViolation(
                        "ConfigurationUniqueness",
                        f"{obj!r} sits on several places: {', '.join(sorted(places))}",
                    )
                )
        return out
    object_set: frozenset = objects[0]
    assoc_set: frozenset = assocs[0]

    for class_name in net.classes:
        counter = marking.tokens(net.counter_place(class_name))
        ids = {o for o in object_set if o.class_name == class_name}
        if len(counter) != 1:
            out.append(
                InvariantViolation("CounterSoundness", f"counter for {class_name} missing")
            )
            continue
        expected = {cpn.Id(class_name, n) for n in range(counter[0])}
        if ids != expected:
            out.append(
                InvariantViolation(
                    "CounterSoundness",
                    f"counter for {class_name} is {counter[0]} but objects hold "
                    f"{sorted(i.index for i in ids)}",
                )
            )

    for a, b in assoc_set:
        for end in (a, b):
            if end not in object_set:
                out.append(
                    InvariantViolation(
                        "AssociationSubset",
                        f"association endpoint {end!r} is not a known object",
                    )
                )

    seen_on = _config_placement(net, marking)
    for obj, places in seen_on.items():
        if len(places) > 1:
            out.append(
                InvariantViolation(
                    "ConfigurationUniqueness",
                    f"{obj!r} sits on several places: {', '.join(sorted(places))}",
                )
            )
    if not terminated:
        for obj in object_set:
            if obj not in seen_on:
                out.append(
                    InvariantViolation(
                        "ConfigurationUniqueness",
                        f"{obj!r} is on no configuration place while the case is not closed",
                    )
                )

    for source, target, bound in net.upper_bounds:
        for obj in object_set:
            if obj.class_name != target:
                continue
            count = sum(
                1 for a, b in assoc_set if (a == obj and b.class_name == source) or (b == obj and a.class_name == source)
            )
            if count > bound:
                out.append(
                    InvariantViolation(
                        "UpperBound",
                        f"{obj!r} has {count} associated {source} objects, upper bound is {bound}",
                    )
                )

    return out


@dataclass
class ExploreReport:
    states_visited: int
    termination_reachable: bool
    violations: list[InvariantViolation]
    truncated: bool
    witness: list[dict] | None = None  # transitionId + binding per step
    max_depth_seen: int = 0

    def to_json(self) -> dict:
        return {
            "statesVisited": self.states_visited,
            "terminationReachable": self.termination_reachable,
            "violations": [v.to_json() for v in self.violations],
            "truncated": self.truncated,
            "witness": self.witness,
            "maxDepthSeen": self.max_depth_seen,
        }


@dataclass(frozen=True)
class _Trace:
    parent: Any  # _Trace | None
    transition_id: str
    binding_json: dict = field(compare=False, default_factory=dict)


def _witness_path(trace: _Trace | None) -> list[dict]:
    steps: list[dict] = []
    while trace is not None:
        steps.append({"transitionId": trace.transition_id, "binding": trace.binding_json})
        trace = trace.parent
    steps.reverse()
    return steps


def explore(
    net: cpn.Net,
    max_states: int = 10_000,
    max_depth: int = 1_000_000,
) -> ExploreReport:
    initial = cpn.initial_marking(net)
    visited: set[cpn.Marking] = {initial}
    frontier: deque[tuple[cpn.Marking, int, _Trace | None]] = deque([(initial, 0, None)])

    violations: list[InvariantViolation] = []
    seen_violation_keys: set[tuple[str, str]] = set()
    termination_reachable = False
    witness: list[dict] | None = None
    truncated = False
    max_depth_seen = 0

    while frontier:
        marking, depth, trace = frontier.popleft()
        max_depth_seen = max(max_depth_seen, depth)

        for v in check_invariants(net, marking):
            key = (v.code, v.message)
            if key not in seen_violation_keys:
                seen_violation_keys.add(key)
                violations.append(v)

        if marking.tokens("o") and not termination_reachable:
            termination_reachable = True
            witness = _witness_path(trace)

        if depth >= max_depth:
            if cpn.enabled_bindings(net, marking):
                truncated = True
            continue

        for t, binding in cpn.enabled_bindings(net, marking):
            successor = cpn.fire(net, marking, t, binding)
            if successor in visited:
                continue
            if len(visited) >= max_states:
                truncated = True
                continue
            visited.add(successor)
            frontier.append(
                (successor, depth + 1, _Trace(trace, t.id, cpn.binding_to_json(binding)))
            )

    return ExploreReport(
        states_visited=len(visited),
        termination_reachable=termination_reachable,
        violations=violations,
        truncated=truncated,
        witness=witness,
        max_depth_seen=max_depth_seen,
    )

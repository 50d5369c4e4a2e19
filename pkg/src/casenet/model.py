"""Domain types for case models: classes, cardinality constraints, object
life cycles, fragments, and termination conditions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

PRIMITIVE_TYPES = ("string", "integer", "boolean")


@dataclass(frozen=True)
class CardinalityConstraint:
    """Directed bound: each ``target`` object is associated with between
    ``lower`` and ``upper`` objects of ``source``; ``goal_lower`` must hold
    once the case terminates."""

    source: str
    target: str
    lower: int
    goal_lower: int
    upper: int


@dataclass(frozen=True)
class GoalGuard:
    """Minimum number of associated ``dependent_class`` objects required
    before the guarded life-cycle transition may be taken."""

    dependent_class: str
    min_count: int


@dataclass(frozen=True)
class ObjectLifeCycle:
    class_name: str
    states: tuple[str, ...]
    transitions: tuple[tuple[str, str], ...]
    guards: Mapping[tuple[str, str], tuple[GoalGuard, ...]] = field(default_factory=dict)

    def has_transition(self, source: str, target: str) -> bool:
        return (source, target) in self.transitions

    def successors(self, state: str) -> set[str]:
        return {q2 for (q1, q2) in self.transitions if q1 == state}

    def reachable_from(self, state: str) -> set[str]:
        """States reachable via one or more raw transitions (guards ignored)."""
        seen: set[str] = set()
        frontier = [state]
        while frontier:
            current = frontier.pop()
            for nxt in self.successors(current):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen


@dataclass(frozen=True)
class ObjectConfiguration:
    """A (class, state) pair."""

    class_name: str
    state: str


@dataclass(frozen=True)
class IOEntry:
    """One element of an input or output set; ``collection`` marks a batch
    read of all associated objects instead of a single one."""

    class_name: str
    state: str
    collection: bool = False


@dataclass(frozen=True)
class IOSet:
    entries: frozenset[IOEntry]

    def __iter__(self) -> Iterator[IOEntry]:
        return iter(sorted(self.entries, key=lambda e: (e.class_name, e.collection, e.state)))

    def entry_for(self, class_name: str, collection: bool) -> IOEntry | None:
        for entry in self.entries:
            if entry.class_name == class_name and entry.collection == collection:
                return entry
        return None

    def singletons(self) -> list[IOEntry]:
        return [e for e in self if not e.collection]

    def collections(self) -> list[IOEntry]:
        return [e for e in self if e.collection]

    @property
    def is_empty(self) -> bool:
        return not self.entries


EMPTY_IO_SET = IOSet(frozenset())


@dataclass(frozen=True)
class Fragment:
    """Acyclic control-flow graph of activities, exclusive gateways, and at
    most one start event, with per-node input and output sets."""

    id: str
    activities: tuple[str, ...]
    gateways: tuple[str, ...]
    start_events: tuple[str, ...]
    labels: Mapping[str, str]
    flows: tuple[tuple[str, str], ...]
    input_sets: Mapping[str, tuple[IOSet, ...]]
    output_sets: Mapping[str, tuple[IOSet, ...]]

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.activities + self.gateways + self.start_events

    def label(self, node: str) -> str:
        return self.labels.get(node, node)

    def incoming(self, node: str) -> list[tuple[str, str]]:
        return [f for f in self.flows if f[1] == node]

    def outgoing(self, node: str) -> list[tuple[str, str]]:
        return [f for f in self.flows if f[0] == node]


@dataclass(frozen=True)
class DataCondition:
    configurations: frozenset[ObjectConfiguration]

    def sorted_configurations(self) -> list[ObjectConfiguration]:
        return sorted(self.configurations, key=lambda c: (c.class_name, c.state))


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    type: str  # one of PRIMITIVE_TYPES


@dataclass(frozen=True)
class CaseModel:
    """A complete case model: domain model, one life cycle per class,
    fragments, and termination conditions."""

    classes: tuple[str, ...]
    case_class: str
    constraints: tuple[CardinalityConstraint, ...]
    olcs: Mapping[str, ObjectLifeCycle]
    attribute_schemas: Mapping[str, tuple[AttributeSpec, ...]]
    fragments: tuple[Fragment, ...]
    termination_conditions: tuple[DataCondition, ...]
    _bounds: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        # constraint record order carries no meaning; keep one canonical
        # order so equality and hashing do not depend on input order
        ordered = tuple(sorted(self.constraints, key=lambda c: (c.source, c.target)))
        object.__setattr__(self, "constraints", ordered)
        table: dict[tuple[str, str], CardinalityConstraint] = {}
        for c in ordered:
            table[(c.source, c.target)] = c
        object.__setattr__(self, "_bounds", table)

    def constraint(self, source: str, target: str) -> CardinalityConstraint | None:
        return self._bounds.get((source, target))

    def lower(self, source: str, target: str) -> int:
        """Minimum number of ``source`` objects each ``target`` object must
        be associated with at all times."""
        c = self._bounds.get((source, target))
        return c.lower if c else 0

    def goal_lower(self, source: str, target: str) -> int:
        c = self._bounds.get((source, target))
        return c.goal_lower if c else 0

    def upper(self, source: str, target: str) -> int:
        c = self._bounds.get((source, target))
        return c.upper if c else 0

    def associated(self, a: str, b: str) -> bool:
        return self.upper(a, b) > 0

    def association_pairs(self) -> list[tuple[str, str]]:
        """Unordered associated class pairs, canonically ordered."""
        seen: set[tuple[str, str]] = set()
        for c in self.constraints:
            if c.upper > 0:
                seen.add(tuple(sorted((c.source, c.target))))  # type: ignore[arg-type]
        return sorted(seen)

    def fragment(self, fragment_id: str) -> Fragment:
        for f in self.fragments:
            if f.id == fragment_id:
                return f
        raise KeyError(fragment_id)

    def schema(self, class_name: str) -> tuple[AttributeSpec, ...]:
        return self.attribute_schemas.get(class_name, ())


@dataclass(frozen=True)
class Violation:
    """A named well-formedness violation; validation reports these as data
    and never raises."""

    code: str
    message: str
    subject: str = ""

    def __str__(self) -> str:
        if self.subject:
            return f"{self.code} [{self.subject}]: {self.message}"
        return f"{self.code}: {self.message}"

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "subject": self.subject}

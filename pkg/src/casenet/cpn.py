"""A restricted colored-Petri-net kernel.

Just enough CPN to execute compiled case models: five token kinds, a fixed
vocabulary of arc patterns and guard atoms, deterministic binding
enumeration, and a pure ``fire``. No general inscription language.

Token kinds and their Python carriers:

* Unit       -- the UNIT singleton
* Int        -- int (class counters)
* Id         -- Id dataclass, an object identifier (class, index)
* IdSet      -- frozenset of Id
* AssocSet   -- frozenset of canonically ordered Id pairs
* CFMap      -- CFToken, a total map class -> Id or None
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Sequence


@dataclass(frozen=True)
class Unit:
    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return "unit"


UNIT = Unit()


@dataclass(frozen=True)
class Id:
    class_name: str
    index: int

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"({self.class_name},{self.index})"


def assoc(a: Id, b: Id) -> tuple[Id, Id]:
    """Canonical unordered association pair (sorted by class, then index)."""
    if a == b:
        raise ValueError("association requires two distinct objects")
    return (a, b) if (a.class_name, a.index) <= (b.class_name, b.index) else (b, a)


@dataclass(frozen=True)
class CFToken:
    """Control-flow token: a total map from class name to an Id or None."""

    entries: tuple[tuple[str, Id | None], ...]

    def get(self, class_name: str) -> Id | None:
        for name, value in self.entries:
            if name == class_name:
                return value
        return None

    def updated(self, changes: Mapping[str, Id]) -> CFToken:
        return CFToken(
            tuple((name, changes.get(name, value)) for name, value in self.entries)
        )


def cf_null(classes: Sequence[str]) -> CFToken:
    return CFToken(tuple((c, None) for c in sorted(classes)))


def token_key(token: Any) -> tuple:
    """Total order over all token kinds, for canonical marking layout."""
    if isinstance(token, Unit):
        return (0,)
    if isinstance(token, bool):
        raise TypeError("boolean is not a token")
    if isinstance(token, int):
        return (1, token)
    if isinstance(token, Id):
        return (2, token.class_name, token.index)
    if isinstance(token, frozenset):
        return (3, tuple(sorted(token_key(e) for e in token)))
    if isinstance(token, tuple):  # association pair inside an AssocSet
        return tuple(token_key(e) for e in token)
    if isinstance(token, CFToken):
        return (
            4,
            tuple(
                (name, "" if v is None else v.class_name, -1 if v is None else v.index)
                for name, v in token.entries
            ),
        )
    raise TypeError(f"not a token: {token!r}")


class Marking:
    """Immutable place -> token multiset map with a canonical layout:
    places sorted, tokens sorted, empty places absent."""

    __slots__ = ("entries", "_map", "_hash")

    def __init__(self, place_tokens: Mapping[str, Sequence[Any]]) -> None:
        canonical = tuple(
            (place, tuple(sorted(tokens, key=token_key)))
            for place, tokens in sorted(place_tokens.items())
            if tokens
        )
        object.__setattr__(self, "entries", canonical)
        object.__setattr__(self, "_map", {place: tokens for place, tokens in canonical})
        object.__setattr__(self, "_hash", hash(canonical))

    def __setattr__(self, *_: Any) -> None:
        raise AttributeError("Marking is immutable")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Marking) and self.entries == other.entries

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Marking({self.entries!r})"

    def tokens(self, place: str) -> tuple[Any, ...]:
        return self._map.get(place, ())

    def places(self) -> tuple[str, ...]:
        return tuple(place for place, _ in self.entries)

    def single(self, place: str) -> Any:
        tokens = self.tokens(place)
        if len(tokens) != 1:
            raise ValueError(f"expected exactly one token on '{place}', found {len(tokens)}")
        return tokens[0]

    def updated(self, removed: Mapping[str, Sequence[Any]], added: Mapping[str, Sequence[Any]]) -> Marking:
        working = {place: list(tokens) for place, tokens in self._map.items()}
        for place, tokens in removed.items():
            pool = working.get(place, [])
            for token in tokens:
                try:
                    pool.remove(token)
                except ValueError:
                    raise ValueError(f"token {token!r} not present on '{place}'") from None
        for place, tokens in added.items():
            working.setdefault(place, []).extend(tokens)
        return Marking(working)


# ---------------------------------------------------------------------------
# Net structure


@dataclass(frozen=True)
class Place:
    id: str
    colorset: str  # Unit | Int | Id | IdSet | AssocSet | CFMap
    role: tuple[str, ...]


# --- input arc patterns


@dataclass(frozen=True)
class SingleToken:
    place: str
    var: str


@dataclass(frozen=True)
class TestToken:
    """Consume-and-reproduce: the token must be present but is kept."""

    __test__ = False  # keep pytest from collecting this as a test class

    place: str
    var: str


@dataclass(frozen=True)
class CounterTake:
    class_name: str
    var: str


@dataclass(frozen=True)
class SetTake:
    place: str  # "objects" or "associations"
    var: str


@dataclass(frozen=True)
class CollectionBind:
    """Bind the complete set of ``dependent_class`` objects associated with
    the reference object; all of them must sit on ``config_place``."""

    config_place: str
    set_var: str
    ref_var: str
    dependent_class: str


InputArc = SingleToken | TestToken | CounterTake | SetTake | CollectionBind


# --- guard atoms


@dataclass(frozen=True)
class Associated:
    var_a: str
    var_b: str


@dataclass(frozen=True)
class NotExceedsUpper:
    """Firing will associate one new ``partner_class`` object with the
    object(s) bound to ``owner_var``; the existing count must stay below
    ``bound``."""

    owner_var: str
    partner_class: str
    bound: int


@dataclass(frozen=True)
class MeetsLower:
    var: str
    bound: int


@dataclass(frozen=True)
class GoalCount:
    """Objects bound to ``var`` (one Id or a set; optionally filtered to
    ``owner_class``) must each have at least ``min_count`` associated
    ``dependent_class`` objects."""

    var: str
    dependent_class: str
    min_count: int
    owner_class: str | None = None


@dataclass(frozen=True)
class CFConsistent:
    """The control-flow token's entry for ``class_name`` is NULL or equals
    the object bound to ``var``."""

    cf_var: str
    class_name: str
    var: str


@dataclass(frozen=True)
class AllAssociatedInState:
    ref_var: str
    class_name: str
    config_place: str


@dataclass(frozen=True)
class SetSizeAtLeast:
    set_var: str
    bound: int


@dataclass(frozen=True)
class SetSizeAtMost:
    set_var: str
    bound: int


GuardAtom = (
    Associated
    | NotExceedsUpper
    | MeetsLower
    | GoalCount
    | CFConsistent
    | AllAssociatedInState
    | SetSizeAtLeast
    | SetSizeAtMost
)


# --- output effects


@dataclass(frozen=True)
class VarRef:
    var: str


@dataclass(frozen=True)
class NewRef:
    """References the object created for ``class_name`` by the same firing."""

    class_name: str


Ref = VarRef | NewRef


@dataclass(frozen=True)
class EmitToken:
    place: str
    expr: str  # "unit", a variable name, or "elements:<setVar>"


@dataclass(frozen=True)
class FreshId:
    class_name: str
    place: str
    associate_with: tuple[Ref, ...]


@dataclass(frozen=True)
class CounterPut:
    class_name: str
    var: str  # bound by the matching CounterTake


@dataclass(frozen=True)
class SetPut:
    place: str  # "objects" or "associations"
    var: str


@dataclass(frozen=True)
class EmitCF:
    place: str
    base_var: str | None  # None: start from the all-NULL map
    updates: tuple[tuple[str, Ref], ...]


Output = EmitToken | FreshId | CounterPut | SetPut | EmitCF


@dataclass(frozen=True)
class Transition:
    id: str
    origin: tuple[str, ...]
    input_arcs: tuple[InputArc, ...]
    guard: tuple[GuardAtom, ...]
    outputs: tuple[Output, ...]


@dataclass(frozen=True)
class Net:
    places: tuple[Place, ...]
    transitions: tuple[Transition, ...]
    classes: tuple[str, ...]
    model_hash: str
    upper_bounds: tuple[tuple[str, str, int], ...] = ()  # (source, target, bound)
    _place_map: dict = field(default_factory=dict, compare=False, repr=False)
    _upper_map: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_place_map", {p.id: p for p in self.places})
        object.__setattr__(
            self, "_upper_map", {(s, t): b for s, t, b in self.upper_bounds}
        )

    def place(self, place_id: str) -> Place:
        return self._place_map[place_id]

    def upper(self, source: str, target: str) -> int:
        """Maximum number of ``source`` objects per ``target`` object."""
        return self._upper_map.get((source, target), 0)

    def counter_place(self, class_name: str) -> str:
        return f"cnt_{class_name}"

    def config_place(self, class_name: str, state: str) -> str:
        return f"{class_name}[{state}]"


class NotEnabled(RuntimeError):
    pass


def initial_marking(net: Net) -> Marking:
    tokens: dict[str, list[Any]] = {"i": [UNIT], "objects": [frozenset()], "associations": [frozenset()]}
    for place in net.places:
        if place.role[0] == "counter":
            tokens[place.id] = [0]
    return Marking(tokens)


# ---------------------------------------------------------------------------
# Enablement


def _associated_ids(assoc_set: frozenset, obj: Id, class_name: str) -> frozenset:
    found = set()
    for a, b in assoc_set:
        if a == obj and b.class_name == class_name:
            found.add(b)
        elif b == obj and a.class_name == class_name:
            found.add(a)
    return frozenset(found)


def _as_ids(value: Any) -> tuple[Id, ...]:
    if isinstance(value, Id):
        return (value,)
    if isinstance(value, frozenset):
        return tuple(sorted(value, key=token_key))
    raise TypeError(f"expected an Id or a set of Ids, got {value!r}")


def eval_guard_atom(
    atom: GuardAtom,
    marking: Marking,
    binding: Mapping[str, Any],
    new_pairs: frozenset = frozenset(),
) -> bool:
    """Evaluate one guard atom against a marking and a candidate binding.

    ``new_pairs`` holds the associations the firing itself would establish.
    Goal counts are about the state the firing produces, so they see those
    pairs; every other atom inspects the marking as it stands. Closing a
    case consumes the association set token; afterwards association-based
    atoms see an empty set (and the arcs that need the token keep the
    affected transitions from binding at all).
    """
    assoc_tokens = marking.tokens("associations")
    assoc_set = assoc_tokens[0] if assoc_tokens else frozenset()
    if isinstance(atom, Associated):
        return assoc(binding[atom.var_a], binding[atom.var_b]) in assoc_set
    if isinstance(atom, NotExceedsUpper):
        return all(
            len(_associated_ids(assoc_set, owner, atom.partner_class)) + 1 <= atom.bound
            for owner in _as_ids(binding[atom.owner_var])
        )
    if isinstance(atom, MeetsLower):
        value = binding[atom.var]
        count = len(value) if isinstance(value, frozenset) else 1
        return count >= atom.bound
    if isinstance(atom, GoalCount):
        ids = _as_ids(binding[atom.var])
        if atom.owner_class is not None:
            ids = tuple(i for i in ids if i.class_name == atom.owner_class)
        combined = assoc_set | new_pairs
        return all(
            len(_associated_ids(combined, owner, atom.dependent_class)) >= atom.min_count
            for owner in ids
        )
    if isinstance(atom, CFConsistent):
        entry = binding[atom.cf_var].get(atom.class_name)
        return entry is None or entry == binding[atom.var]
    if isinstance(atom, AllAssociatedInState):
        members = _associated_ids(assoc_set, binding[atom.ref_var], atom.class_name)
        on_place = set(marking.tokens(atom.config_place))
        return all(m in on_place for m in members)
    if isinstance(atom, SetSizeAtLeast):
        return len(binding[atom.set_var]) >= atom.bound
    if isinstance(atom, SetSizeAtMost):
        return len(binding[atom.set_var]) <= atom.bound
    raise TypeError(f"unknown guard atom {atom!r}")


def _arc_order(arcs: Sequence[InputArc]) -> list[InputArc]:
    """CollectionBind arcs last so their reference variables are bound."""
    indices = sorted(range(len(arcs)), key=lambda i: (isinstance(arcs[i], CollectionBind), i))
    return [arcs[i] for i in indices]


def _enumerate_bindings(net: Net, marking: Marking, t: Transition) -> Iterator[dict[str, Any]]:
    arcs = _arc_order(t.input_arcs)

    def recurse(i: int, binding: dict[str, Any], remaining: dict[str, list[Any]]) -> Iterator[dict[str, Any]]:
        if i == len(arcs):
            yield dict(binding)
            return
        arc = arcs[i]
        if isinstance(arc, SingleToken):
            pool = remaining.setdefault(arc.place, list(marking.tokens(arc.place)))
            for token in sorted(set(pool), key=token_key):
                pool.remove(token)
                binding[arc.var] = token
                yield from recurse(i + 1, binding, remaining)
                del binding[arc.var]
                pool.append(token)
        elif isinstance(arc, TestToken):
            pool = remaining.setdefault(arc.place, list(marking.tokens(arc.place)))
            for token in sorted(set(pool), key=token_key):
                binding[arc.var] = token
                yield from recurse(i + 1, binding, remaining)
                del binding[arc.var]
        elif isinstance(arc, CounterTake):
            place = net.counter_place(arc.class_name)
            pool = remaining.setdefault(place, list(marking.tokens(place)))
            if len(pool) == 1:
                token = pool.pop()
                binding[arc.var] = token
                yield from recurse(i + 1, binding, remaining)
                del binding[arc.var]
                pool.append(token)
        elif isinstance(arc, SetTake):
            pool = remaining.setdefault(arc.place, list(marking.tokens(arc.place)))
            if len(pool) == 1:
                token = pool.pop()
                binding[arc.var] = token
                yield from recurse(i + 1, binding, remaining)
                del binding[arc.var]
                pool.append(token)
        elif isinstance(arc, CollectionBind):
            ref = binding.get(arc.ref_var)
            assoc_tokens = marking.tokens("associations")
            if ref is None or not assoc_tokens:
                return
            members = _associated_ids(assoc_tokens[0], ref, arc.dependent_class)
            pool = remaining.setdefault(arc.config_place, list(marking.tokens(arc.config_place)))
            if all(m in pool for m in members):
                for m in members:
                    pool.remove(m)
                binding[arc.set_var] = members
                yield from recurse(i + 1, binding, remaining)
                del binding[arc.set_var]
                pool.extend(members)
        else:  # pragma: no cover - exhaustive
            raise TypeError(f"unknown arc {arc!r}")

    yield from recurse(0, {}, {})


def binding_key(binding: Mapping[str, Any]) -> tuple:
    return tuple(sorted((var, token_key(value)) for var, value in binding.items()))


def _creations(t: Transition, binding: Mapping[str, Any]) -> tuple[dict[str, Id], frozenset]:
    """Ids the firing would mint and the association pairs it would add."""
    created: dict[str, Id] = {}
    for out in t.outputs:
        if isinstance(out, FreshId):
            counter_var = next(
                a.var for a in t.input_arcs if isinstance(a, CounterTake) and a.class_name == out.class_name
            )
            created[out.class_name] = Id(out.class_name, binding[counter_var])
    new_pairs: set[tuple[Id, Id]] = set()
    for out in t.outputs:
        if isinstance(out, FreshId):
            new_id = created[out.class_name]
            for ref in out.associate_with:
                value = binding[ref.var] if isinstance(ref, VarRef) else created[ref.class_name]
                for other in _as_ids(value):
                    if other != new_id:
                        new_pairs.add(assoc(new_id, other))
    return created, frozenset(new_pairs)


def _guards_pass(t: Transition, marking: Marking, binding: Mapping[str, Any]) -> bool:
    new_pairs: frozenset | None = None
    for atom in t.guard:
        if isinstance(atom, GoalCount):
            if new_pairs is None:
                new_pairs = _creations(t, binding)[1]
            if not eval_guard_atom(atom, marking, binding, new_pairs):
                return False
        elif not eval_guard_atom(atom, marking, binding):
            return False
    return True


def enabled_bindings(net: Net, marking: Marking) -> list[tuple[Transition, dict[str, Any]]]:
    """All (transition, binding) pairs firable in ``marking``, ordered by
    transition id and then by the canonical binding order."""
    out: list[tuple[Transition, dict[str, Any]]] = []
    for t in sorted(net.transitions, key=lambda t: t.id):
        found = [b for b in _enumerate_bindings(net, marking, t) if _guards_pass(t, marking, b)]
        found.sort(key=binding_key)
        out.extend((t, b) for b in found)
    return out


# ---------------------------------------------------------------------------
# Firing


@dataclass(frozen=True)
class FireResult:
    marking: Marking
    created: tuple[tuple[str, Id], ...]  # (class, new id), sorted by class
    new_associations: frozenset


def _check_enabled(net: Net, marking: Marking, t: Transition, binding: Mapping[str, Any]) -> None:
    remaining: dict[str, list[Any]] = {}

    def pool(place: str) -> list[Any]:
        return remaining.setdefault(place, list(marking.tokens(place)))

    for arc in _arc_order(t.input_arcs):
        if isinstance(arc, SingleToken):
            if arc.var not in binding or binding[arc.var] not in pool(arc.place):
                raise NotEnabled(f"{t.id}: no token for {arc.var} on {arc.place}")
            pool(arc.place).remove(binding[arc.var])
        elif isinstance(arc, TestToken):
            if arc.var not in binding or binding[arc.var] not in pool(arc.place):
                raise NotEnabled(f"{t.id}: no token for {arc.var} on {arc.place}")
        elif isinstance(arc, CounterTake):
            place = net.counter_place(arc.class_name)
            if pool(place) != [binding.get(arc.var)]:
                raise NotEnabled(f"{t.id}: counter mismatch for {arc.class_name}")
            pool(place).clear()
        elif isinstance(arc, SetTake):
            if pool(arc.place) != [binding.get(arc.var)]:
                raise NotEnabled(f"{t.id}: set token mismatch on {arc.place}")
            pool(arc.place).clear()
        elif isinstance(arc, CollectionBind):
            assoc_tokens = marking.tokens("associations")
            if not assoc_tokens:
                raise NotEnabled(f"{t.id}: association set token is gone")
            members = _associated_ids(assoc_tokens[0], binding[arc.ref_var], arc.dependent_class)
            if binding.get(arc.set_var) != members:
                raise NotEnabled(f"{t.id}: stale collection binding for {arc.set_var}")
            if not all(m in pool(arc.config_place) for m in members):
                raise NotEnabled(f"{t.id}: collection members missing on {arc.config_place}")
            for m in members:
                pool(arc.config_place).remove(m)
    new_pairs: frozenset | None = None
    for atom in t.guard:
        extra = frozenset()
        if isinstance(atom, GoalCount):
            if new_pairs is None:
                new_pairs = _creations(t, binding)[1]
            extra = new_pairs
        if not eval_guard_atom(atom, marking, binding, extra):
            raise NotEnabled(f"{t.id}: guard {atom!r} failed")


def fire_with_details(net: Net, marking: Marking, t: Transition, binding: Mapping[str, Any]) -> FireResult:
    _check_enabled(net, marking, t, binding)

    removed: dict[str, list[Any]] = {}
    for arc in t.input_arcs:
        if isinstance(arc, SingleToken):
            removed.setdefault(arc.place, []).append(binding[arc.var])
        elif isinstance(arc, CounterTake):
            removed.setdefault(net.counter_place(arc.class_name), []).append(binding[arc.var])
        elif isinstance(arc, SetTake):
            removed.setdefault(arc.place, []).append(binding[arc.var])
        elif isinstance(arc, CollectionBind):
            removed.setdefault(arc.config_place, []).extend(binding[arc.set_var])

    created, new_pairs = _creations(t, binding)

    def resolve(ref: Ref) -> Any:
        if isinstance(ref, VarRef):
            return binding[ref.var]
        return created[ref.class_name]

    added: dict[str, list[Any]] = {}
    for out in t.outputs:
        if isinstance(out, EmitToken):
            if out.expr == "unit":
                added.setdefault(out.place, []).append(UNIT)
            elif out.expr.startswith("elements:"):
                added.setdefault(out.place, []).extend(binding[out.expr.split(":", 1)[1]])
            else:
                added.setdefault(out.place, []).append(binding[out.expr])
        elif isinstance(out, FreshId):
            added.setdefault(out.place, []).append(created[out.class_name])
        elif isinstance(out, CounterPut):
            added.setdefault(net.counter_place(out.class_name), []).append(binding[out.var] + 1)
        elif isinstance(out, SetPut):
            base = binding[out.var]
            if out.place == "objects":
                base = base | frozenset(created.values())
            else:
                base = base | new_pairs
            added.setdefault(out.place, []).append(base)
        elif isinstance(out, EmitCF):
            base = binding[out.base_var] if out.base_var else cf_null(net.classes)
            changes = {cls: resolve(ref) for cls, ref in out.updates}
            added.setdefault(out.place, []).append(base.updated(changes))
        else:  # pragma: no cover - exhaustive
            raise TypeError(f"unknown output {out!r}")

    return FireResult(
        marking=marking.updated(removed, added),
        created=tuple(sorted(created.items())),
        new_associations=new_pairs,
    )


def fire(net: Net, marking: Marking, t: Transition, binding: Mapping[str, Any]) -> Marking:
    return fire_with_details(net, marking, t, binding).marking


# ---------------------------------------------------------------------------
# Serialization: tokens, markings, and the net-exchange document


def token_to_json(token: Any) -> Any:
    if isinstance(token, Unit):
        return {"type": "unit"}
    if isinstance(token, bool):
        raise TypeError("boolean is not a token")
    if isinstance(token, int):
        return {"type": "int", "value": token}
    if isinstance(token, Id):
        return {"type": "id", "class": token.class_name, "index": token.index}
    if isinstance(token, frozenset):
        items = sorted(token, key=token_key)
        if items and isinstance(items[0], tuple):
            return {
                "type": "assocSet",
                "pairs": [[_id_json(a), _id_json(b)] for a, b in items],
            }
        return {"type": "idSet", "ids": [_id_json(i) for i in items]}
    if isinstance(token, CFToken):
        return {
            "type": "cf",
            "entries": {name: (None if v is None else _id_json(v)) for name, v in token.entries},
        }
    raise TypeError(f"not a token: {token!r}")


def _id_json(i: Id) -> dict:
    return {"class": i.class_name, "index": i.index}


def _id_from_json(raw: Mapping) -> Id:
    return Id(raw["class"], raw["index"])


def token_from_json(raw: Mapping) -> Any:
    kind = raw["type"]
    if kind == "unit":
        return UNIT
    if kind == "int":
        return raw["value"]
    if kind == "id":
        return _id_from_json(raw)
    if kind == "idSet":
        return frozenset(_id_from_json(i) for i in raw["ids"])
    if kind == "assocSet":
        return frozenset(assoc(_id_from_json(a), _id_from_json(b)) for a, b in raw["pairs"])
    if kind == "cf":
        return CFToken(
            tuple(
                (name, None if v is None else _id_from_json(v))
                for name, v in sorted(raw["entries"].items())
            )
        )
    raise ValueError(f"unknown token type '{kind}'")


def marking_to_json(marking: Marking) -> list:
    return [
        {"place": place, "tokens": [token_to_json(t) for t in tokens]}
        for place, tokens in marking.entries
    ]


def marking_from_json(raw: Sequence[Mapping]) -> Marking:
    return Marking({entry["place"]: [token_from_json(t) for t in entry["tokens"]] for entry in raw})


_REF_TAG = {"VarRef": VarRef, "NewRef": NewRef}


def _ref_to_json(ref: Ref) -> dict:
    if isinstance(ref, VarRef):
        return {"kind": "var", "var": ref.var}
    return {"kind": "new", "class": ref.class_name}


def _ref_from_json(raw: Mapping) -> Ref:
    if raw["kind"] == "var":
        return VarRef(raw["var"])
    return NewRef(raw["class"])


def _arc_to_json(arc: InputArc) -> dict:
    if isinstance(arc, SingleToken):
        return {"kind": "single", "place": arc.place, "var": arc.var}
    if isinstance(arc, TestToken):
        return {"kind": "test", "place": arc.place, "var": arc.var}
    if isinstance(arc, CounterTake):
        return {"kind": "counterTake", "class": arc.class_name, "var": arc.var}
    if isinstance(arc, SetTake):
        return {"kind": "setTake", "place": arc.place, "var": arc.var}
    return {
        "kind": "collectionBind",
        "configPlace": arc.config_place,
        "setVar": arc.set_var,
        "refVar": arc.ref_var,
        "class": arc.dependent_class,
    }


def _arc_from_json(raw: Mapping) -> InputArc:
    kind = raw["kind"]
    if kind == "single":
        return SingleToken(raw["place"], raw["var"])
    if kind == "test":
        return TestToken(raw["place"], raw["var"])
    if kind == "counterTake":
        return CounterTake(raw["class"], raw["var"])
    if kind == "setTake":
        return SetTake(raw["place"], raw["var"])
    if kind == "collectionBind":
        return CollectionBind(raw["configPlace"], raw["setVar"], raw["refVar"], raw["class"])
    raise ValueError(f"unknown arc kind '{kind}'")


def _atom_to_json(atom: GuardAtom) -> dict:
    if isinstance(atom, Associated):
        return {"kind": "associated", "varA": atom.var_a, "varB": atom.var_b}
    if isinstance(atom, NotExceedsUpper):
        return {
            "kind": "notExceedsUpper",
            "ownerVar": atom.owner_var,
            "partnerClass": atom.partner_class,
            "bound": atom.bound,
        }
    if isinstance(atom, MeetsLower):
        return {"kind": "meetsLower", "var": atom.var, "bound": atom.bound}
    if isinstance(atom, GoalCount):
        return {
            "kind": "goalCount",
            "var": atom.var,
            "dependentClass": atom.dependent_class,
            "minCount": atom.min_count,
            "ownerClass": atom.owner_class,
        }
    if isinstance(atom, CFConsistent):
        return {"kind": "cfConsistent", "cfVar": atom.cf_var, "class": atom.class_name, "var": atom.var}
    if isinstance(atom, AllAssociatedInState):
        return {
            "kind": "allAssociatedInState",
            "refVar": atom.ref_var,
            "class": atom.class_name,
            "configPlace": atom.config_place,
        }
    if isinstance(atom, SetSizeAtLeast):
        return {"kind": "setSizeAtLeast", "setVar": atom.set_var, "bound": atom.bound}
    if isinstance(atom, SetSizeAtMost):
        return {"kind": "setSizeAtMost", "setVar": atom.set_var, "bound": atom.bound}
    raise TypeError(f"unknown guard atom {atom!r}")


def _atom_from_json(raw: Mapping) -> GuardAtom:
    kind = raw["kind"]
    if kind == "associated":
        return Associated(raw["varA"], raw["varB"])
    if kind == "notExceedsUpper":
        return NotExceedsUpper(raw["ownerVar"], raw["partnerClass"], raw["bound"])
    if kind == "meetsLower":
        return MeetsLower(raw["var"], raw["bound"])
    if kind == "goalCount":
        return GoalCount(raw["var"], raw["dependentClass"], raw["minCount"], raw["ownerClass"])
    if kind == "cfConsistent":
        return CFConsistent(raw["cfVar"], raw["class"], raw["var"])
    if kind == "allAssociatedInState":
        return AllAssociatedInState(raw["refVar"], raw["class"], raw["configPlace"])
    if kind == "setSizeAtLeast":
        return SetSizeAtLeast(raw["setVar"], raw["bound"])
    if kind == "setSizeAtMost":
        return SetSizeAtMost(raw["setVar"], raw["bound"])
    raise ValueError(f"unknown guard atom kind '{kind}'")


def _output_to_json(out: Output) -> dict:
    if isinstance(out, EmitToken):
        return {"kind": "emit", "place": out.place, "expr": out.expr}
    if isinstance(out, FreshId):
        return {
            "kind": "freshId",
            "class": out.class_name,
            "place": out.place,
            "associateWith": [_ref_to_json(r) for r in out.associate_with],
        }
    if isinstance(out, CounterPut):
        return {"kind": "counterPut", "class": out.class_name, "var": out.var}
    if isinstance(out, SetPut):
        return {"kind": "setPut", "place": out.place, "var": out.var}
    if isinstance(out, EmitCF):
        return {
            "kind": "emitCF",
            "place": out.place,
            "baseVar": out.base_var,
            "updates": [[cls, _ref_to_json(ref)] for cls, ref in out.updates],
        }
    raise TypeError(f"unknown output {out!r}")


def _output_from_json(raw: Mapping) -> Output:
    kind = raw["kind"]
    if kind == "emit":
        return EmitToken(raw["place"], raw["expr"])
    if kind == "freshId":
        return FreshId(
            raw["class"], raw["place"], tuple(_ref_from_json(r) for r in raw["associateWith"])
        )
    if kind == "counterPut":
        return CounterPut(raw["class"], raw["var"])
    if kind == "setPut":
        return SetPut(raw["place"], raw["var"])
    if kind == "emitCF":
        return EmitCF(
            raw["place"],
            raw["baseVar"],
            tuple((cls, _ref_from_json(ref)) for cls, ref in raw["updates"]),
        )
    raise ValueError(f"unknown output kind '{kind}'")


def net_to_json(net: Net) -> dict:
    return {
        "classes": list(net.classes),
        "modelHash": net.model_hash,
        "upperBounds": [[s, t, b] for s, t, b in net.upper_bounds],
        "places": [
            {"id": p.id, "colorset": p.colorset, "role": list(p.role)} for p in net.places
        ],
        "transitions": [
            {
                "id": t.id,
                "origin": list(t.origin),
                "inputArcs": [_arc_to_json(a) for a in t.input_arcs],
                "guard": [_atom_to_json(g) for g in t.guard],
                "outputs": [_output_to_json(o) for o in t.outputs],
            }
            for t in net.transitions
        ],
    }


def net_from_json(raw: Mapping) -> Net:
    return Net(
        places=tuple(Place(p["id"], p["colorset"], tuple(p["role"])) for p in raw["places"]),
        transitions=tuple(
            Transition(
                id=t["id"],
                origin=tuple(t["origin"]),
                input_arcs=tuple(_arc_from_json(a) for a in t["inputArcs"]),
                guard=tuple(_atom_from_json(g) for g in t["guard"]),
                outputs=tuple(_output_from_json(o) for o in t["outputs"]),
            )
            for t in raw["transitions"]
        ),
        classes=tuple(raw["classes"]),
        model_hash=raw["modelHash"],
        upper_bounds=tuple((s, t, b) for s, t, b in raw.get("upperBounds", [])),
    )


def binding_to_json(binding: Mapping[str, Any]) -> dict:
    return {var: token_to_json(value) for var, value in sorted(binding.items())}


def binding_from_json(raw: Mapping) -> dict[str, Any]:
    return {var: token_from_json(value) for var, value in raw.items()}


def stable_hash(document: Any) -> str:
    """sha256 over a canonical JSON rendering; used for model and option ids."""
    text = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()

"""Case enactment on top of the net kernel.

The engine compiles a model once and then drives cases: it lists the
enabled (transition, binding) pairs as selectable step options, executes a
chosen option, and keeps the per-object attribute store that the net itself
knows nothing about. Case states are immutable values; applying a step
returns a new one. Attribute values never influence which steps are
enabled.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass
from typing import Any, Mapping

from . import cpn
from .compiler import compile_model
from .model import AttributeSpec, CaseModel


class CaseTerminated(RuntimeError):
    pass


class StaleOption(RuntimeError):
    pass


class SchemaError(ValueError):
    pass


class VersionMismatch(RuntimeError):
    pass


def id_str(obj: cpn.Id) -> str:
    return f"{obj.class_name}#{obj.index}"


def parse_id_str(text: str) -> cpn.Id:
    class_name, _, index = text.rpartition("#")
    if not class_name or not index.isdigit():
        raise ValueError(f"not an object id: '{text}'")
    return cpn.Id(class_name, int(index))


@dataclass(frozen=True)
class ObjectRecord:
    id: cpn.Id
    current_state: str  # a state name, or "consumed" after termination
    attributes: Mapping[str, Any]

    def to_json(self) -> dict:
        return {
            "id": id_str(self.id),
            "class": self.id.class_name,
            "state": self.current_state,
            "attributes": dict(self.attributes),
        }


@dataclass(frozen=True)
class AttributeForm:
    class_name: str
    mode: str  # "created" or "updated"
    object_id: str | None  # id string for updates, None for creations
    schema: tuple[AttributeSpec, ...]

    def to_json(self) -> dict:
        return {
            "class": self.class_name,
            "mode": self.mode,
            "objectId": self.object_id,
            "schema": [{"name": a.name, "type": a.type} for a in self.schema],
        }


@dataclass(frozen=True)
class StepOption:
    option_id: str
    transition_id: str
    human_label: str
    binding: Mapping[str, Any]  # full binding, as the kernel needs it
    required_forms: tuple[AttributeForm, ...]

    def binding_summary(self) -> dict:
        return {
            var: cpn.token_to_json(value)
            for var, value in sorted(self.binding.items())
            if var.startswith("v_") or var.startswith("s_")
        }

    def to_json(self) -> dict:
        return {
            "optionId": self.option_id,
            "transitionId": self.transition_id,
            "label": self.human_label,
            "binding": self.binding_summary(),
            "requiredForms": [f.to_json() for f in self.required_forms],
        }


@dataclass(frozen=True)
class StepRecord:
    transition_id: str
    binding: dict  # JSON form
    attributes: dict
    timestamp: float

    def to_json(self) -> dict:
        return {
            "transitionId": self.transition_id,
            "binding": self.binding,
            "attributes": self.attributes,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class CaseState:
    case_id: str
    model_hash: str
    marking: cpn.Marking
    attributes: Mapping[str, Mapping[str, Any]]  # id string -> {name: value}
    step_log: tuple[StepRecord, ...] = ()

    @property
    def status(self) -> str:
        if self.marking.tokens("o"):
            return "terminated"
        if self.marking.tokens("r"):
            return "running"
        return "initial"


def option_id_for(transition_id: str, binding: Mapping[str, Any]) -> str:
    return cpn.stable_hash(
        {"transitionId": transition_id, "binding": cpn.binding_to_json(binding)}
    )


class Engine:
    """Holds one compiled model and executes cases against it."""

    def __init__(self, model: CaseModel) -> None:
        self.model = model
        self.net, self.report = compile_model(model)
        self._labels = self._build_labels(model)

    def _build_labels(self, model: CaseModel) -> dict[str, str]:
        labels: dict[str, str] = {}
        for t in self.net.transitions:
            kind = t.origin[0]
            if kind == "activity":
                _, frag_id, node, i, j = t.origin
                fragment = model.fragment(frag_id)
                label = fragment.label(node)
                if len(fragment.input_sets.get(node, ())) > 1:
                    label += f" [in {i}]"
                if len(fragment.output_sets.get(node, ())) > 1:
                    label += f" [out {j}]"
            elif kind == "startEvent":
                _, frag_id, node, j = t.origin
                fragment = model.fragment(frag_id)
                label = fragment.label(node)
                if len(fragment.output_sets.get(node, ())) > 1:
                    label += f" [out {j}]"
            elif kind == "gateway":
                _, frag_id, node, src, tgt = t.origin
                label = f"{model.fragment(frag_id).label(node)}: {src} -> {tgt}"
            else:
                index = t.origin[1]
                label = "close case"
                if len(model.termination_conditions) > 1:
                    label += f" [{index}]"
            labels[t.id] = label
        return labels

    # -- case lifecycle

    def create_case(self, case_id: str | None = None) -> CaseState:
        return CaseState(
            case_id=case_id or uuid.uuid4().hex,
            model_hash=self.net.model_hash,
            marking=cpn.initial_marking(self.net),
            attributes={},
        )

    def _forms_for(self, t: cpn.Transition, binding: Mapping[str, Any]) -> tuple[AttributeForm, ...]:
        forms: list[AttributeForm] = []
        bound_place: dict[str, str] = {}
        for arc in t.input_arcs:
            if isinstance(arc, cpn.SingleToken):
                bound_place[arc.var] = arc.place
        for out in t.outputs:
            if isinstance(out, cpn.FreshId):
                forms.append(
                    AttributeForm(out.class_name, "created", None, self.model.schema(out.class_name))
                )
            elif isinstance(out, cpn.EmitToken) and out.expr in bound_place:
                if out.place != bound_place[out.expr]:
                    obj = binding[out.expr]
                    forms.append(
                        AttributeForm(
                            obj.class_name, "updated", id_str(obj), self.model.schema(obj.class_name)
                        )
                    )
        forms.sort(key=lambda f: (f.mode, f.class_name, f.object_id or ""))
        return tuple(forms)

    def enabled_steps(self, cs: CaseState) -> list[StepOption]:
        if cs.status == "terminated":
            raise CaseTerminated(cs.case_id)
        options = []
        for t, binding in cpn.enabled_bindings(self.net, cs.marking):
            options.append(
                StepOption(
                    option_id=option_id_for(t.id, binding),
                    transition_id=t.id,
                    human_label=self._labels[t.id],
                    binding=binding,
                    required_forms=self._forms_for(t, binding),
                )
            )
        return options

    def is_terminable(self, cs: CaseState) -> bool:
        if cs.status == "terminated":
            return False
        return any(
            t.origin[0] == "termination" for t, _ in cpn.enabled_bindings(self.net, cs.marking)
        )

    # -- attribute handling

    def _check_value(self, spec: AttributeSpec, value: Any, subject: str) -> None:
        ok = (
            (spec.type == "string" and isinstance(value, str))
            or (spec.type == "integer" and isinstance(value, int) and not isinstance(value, bool))
            or (spec.type == "boolean" and isinstance(value, bool))
        )
        if not ok:
            raise SchemaError(f"{subject}.{spec.name} must be of type {spec.type}, got {value!r}")

    def _validate_attributes(
        self,
        option: StepOption,
        attribute_values: Mapping[str, Mapping[str, Any]],
    ) -> dict[str, dict[str, Any]]:
        """Returns {id string or class name: values}; creations stay keyed by
        class name until the fresh Id is known."""
        allowed: dict[str, AttributeForm] = {}
        for form in option.required_forms:
            allowed[form.object_id or form.class_name] = form

        for key in attribute_values:
            if key not in allowed:
                raise SchemaError(f"no attribute form for '{key}' in this step")

        checked: dict[str, dict[str, Any]] = {}
        for key, form in allowed.items():
            values = dict(attribute_values.get(key, {}))
            schema = {a.name: a for a in form.schema}
            for name, value in values.items():
                if name not in schema:
                    raise SchemaError(f"'{form.class_name}' has no attribute '{name}'")
                self._check_value(schema[name], value, key)
            if form.mode == "created":
                missing = sorted(set(schema) - set(values))
                if missing:
                    raise SchemaError(
                        f"missing value(s) for new '{form.class_name}' object: {', '.join(missing)}"
                    )
            if values:
                checked[key] = values
        return checked

    # -- step execution

    def apply_step(
        self,
        cs: CaseState,
        option: StepOption | str,
        attribute_values: Mapping[str, Mapping[str, Any]] | None = None,
    ) -> CaseState:
        if cs.status == "terminated":
            raise CaseTerminated(cs.case_id)
        option_id = option if isinstance(option, str) else option.option_id
        current = {o.option_id: o for o in self.enabled_steps(cs)}
        live = current.get(option_id)
        if live is None:
            raise StaleOption(option_id)

        values = self._validate_attributes(live, attribute_values or {})
        transition = self._transition(live.transition_id)
        result = cpn.fire_with_details(self.net, cs.marking, transition, live.binding)

        attributes = {k: dict(v) for k, v in cs.attributes.items()}
        for class_name, new_id in result.created:
            if class_name in values:
                attributes[id_str(new_id)] = values.pop(class_name)
        for key, vals in values.items():
            attributes.setdefault(key, {}).update(vals)

        record = StepRecord(
            transition_id=live.transition_id,
            binding=cpn.binding_to_json(live.binding),
            attributes={k: dict(v) for k, v in (attribute_values or {}).items()},
            timestamp=time.time(),
        )
        return CaseState(
            case_id=cs.case_id,
            model_hash=cs.model_hash,
            marking=result.marking,
            attributes=attributes,
            step_log=cs.step_log + (record,),
        )

    # -- inspection

    def _data_sets(self, cs: CaseState) -> tuple[frozenset, frozenset]:
        """The (objects, associations) sets for a case. Closing a case
        consumes both set tokens, so for a terminated case they are taken
        from the recorded binding of the closing step."""
        objects = cs.marking.tokens("objects")
        pairs = cs.marking.tokens("associations")
        if objects and pairs:
            return objects[0], pairs[0]
        for record in reversed(cs.step_log):
            transition = self._transition(record.transition_id)
            if transition.origin[0] != "termination":
                continue
            binding = cpn.binding_from_json(record.binding)
            by_place = {
                arc.place: binding[arc.var]
                for arc in transition.input_arcs
                if isinstance(arc, cpn.SetTake)
            }
            return by_place["objects"], by_place["associations"]
        return frozenset(), frozenset()

    def _transition(self, transition_id: str) -> cpn.Transition:
        return next(t for t in self.net.transitions if t.id == transition_id)

    def object_records(self, cs: CaseState) -> list[ObjectRecord]:
        state_of: dict[cpn.Id, str] = {}
        for place in self.net.places:
            if place.role[0] != "config":
                continue
            for token in cs.marking.tokens(place.id):
                state_of[token] = place.role[2]
        records = []
        objects, _ = self._data_sets(cs)
        for obj in sorted(objects, key=cpn.token_key):
            records.append(
                ObjectRecord(
                    id=obj,
                    current_state=state_of.get(obj, "consumed"),
                    attributes=dict(cs.attributes.get(id_str(obj), {})),
                )
            )
        return records

    def associations(self, cs: CaseState) -> list[tuple[str, str]]:
        _, pairs = self._data_sets(cs)
        return [(id_str(a), id_str(b)) for a, b in sorted(pairs, key=cpn.token_key)]

    # -- persistence

    def snapshot(self, cs: CaseState) -> dict:
        return {
            "caseId": cs.case_id,
            "modelHash": cs.model_hash,
            "status": cs.status,
            "marking": cpn.marking_to_json(cs.marking),
            "attributes": {k: dict(v) for k, v in sorted(cs.attributes.items())},
            "stepLog": [r.to_json() for r in cs.step_log],
        }

    def restore(self, document: Mapping) -> CaseState:
        if document.get("modelHash") != self.net.model_hash:
            raise VersionMismatch(
                f"snapshot was taken against model {document.get('modelHash')!r}, "
                f"engine runs {self.net.model_hash!r}"
            )
        return CaseState(
            case_id=document["caseId"],
            model_hash=document["modelHash"],
            marking=cpn.marking_from_json(document["marking"]),
            attributes={k: dict(v) for k, v in document.get("attributes", {}).items()},
            step_log=tuple(
                StepRecord(
                    transition_id=r["transitionId"],
                    binding=dict(r["binding"]),
                    attributes=dict(r.get("attributes", {})),
                    timestamp=r.get("timestamp", 0.0),
                )
                for r in document.get("stepLog", [])
            ),
        )

    def replay(self, step_log: list[Mapping]) -> CaseState:
        """Re-run a recorded step log from a fresh case; reproduces the
        final marking exactly (fresh timestamps, same everything else)."""
        cs = self.create_case()
        for record in step_log:
            binding = cpn.binding_from_json(record["binding"])
            cs = self.apply_step(
                cs,
                option_id_for(record["transitionId"], binding),
                record.get("attributes", {}),
            )
        return cs

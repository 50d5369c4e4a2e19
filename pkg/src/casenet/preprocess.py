"""Goal-cardinality preprocessing.

Goal lower bounds cannot be enforced while associations are still being
added, so they are turned into guards on the life-cycle transitions of the
supporter class: once an object is about to leave the states in which
fragments can still add associations of a dependent class (with no way
back), the required number of dependents must already be present.
"""

from __future__ import annotations

import dataclasses

from .model import CaseModel, GoalGuard, IOSet


class UnknownClass(KeyError):
    pass


def _creation_pairs(m: CaseModel):
    """Yields (inSet, outSet, createdClasses) over all activities and start
    events; start events get one empty input set."""
    for f in m.fragments:
        for node in f.activities + f.start_events:
            in_sets = f.input_sets.get(node) or (IOSet(frozenset()),)
            for in_set in in_sets:
                for out_set in f.output_sets.get(node, ()):
                    created = {
                        e.class_name
                        for e in out_set.singletons()
                        if in_set.entry_for(e.class_name, collection=False) is None
                    }
                    yield in_set, out_set, created


def supporting_states(m: CaseModel, supporter: str, dependent: str) -> set[str]:
    """States of ``supporter`` in which some fragment can still create a
    ``dependent`` object associated with it."""

    for name in (supporter, dependent):
        if name not in m.classes:
            raise UnknownClass(name)

    states: set[str] = set()
    for in_set, out_set, created in _creation_pairs(m):
        if dependent not in created:
            continue
        for entry in in_set:
            if entry.class_name == supporter:
                states.add(entry.state)
        if supporter in created and supporter != dependent:
            entry = out_set.entry_for(supporter, collection=False)
            if entry is not None:
                states.add(entry.state)
    return states


def augment_goal_guards(m: CaseModel) -> CaseModel:
    """Attach goal-cardinality guards to supporter life cycles.

    A guard lands on transition (q, q') when q still supports adding the
    dependent and no state reachable from q' does. Idempotent; everything
    except the guard maps is returned unchanged.
    """

    new_olcs = {}
    for class_name in m.classes:
        olc = m.olcs[class_name]
        guards: dict[tuple[str, str], set[GoalGuard]] = {
            t: set(gs) for t, gs in olc.guards.items()
        }
        for dependent in m.classes:
            bound = m.goal_lower(dependent, class_name)
            if bound <= 0:
                continue
            support = supporting_states(m, class_name, dependent)
            for q, q2 in olc.transitions:
                if q not in support:
                    continue
                if q2 in support or olc.reachable_from(q2) & support:
                    continue
                guards.setdefault((q, q2), set()).add(GoalGuard(dependent, bound))
        cleaned = {
            t: tuple(sorted(gs, key=lambda g: (g.dependent_class, g.min_count)))
            for t, gs in guards.items()
            if gs
        }
        new_olcs[class_name] = dataclasses.replace(olc, guards=cleaned)

    return dataclasses.replace(m, olcs=new_olcs)

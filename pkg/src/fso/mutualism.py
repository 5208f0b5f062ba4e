"""Action systems and mutualistic-relationship checks.

Two systems stand in a mutualistic relationship when each can enact an
action whose counterpart in the other system is evaluated as beneficial
there.  Every system carries an evaluation map from its actions to the
three significance classes +1 (beneficial), 0 (insignificant) and -1
(disadvantageous).  A correspondence links actions of one system with
actions of another as a partial bijection; only linked actions take part
in any check.

Two flavours of the check are provided:

* the strict precondition additionally requires each enacted action to be
  non-negative for its own actor (no self-harm);
* the extended form drops that actor-side clause, admitting actions that
  carry a cost for the actor, such as commercial services.

Witnesses are deterministic: when several action pairs qualify, the
lexicographically least pair of action ids is reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

ALLOWED_EVALUATIONS = (-1, 0, 1)


class CorrespondenceMismatch(Exception):
    """Correspondence endpoints do not name the systems being checked."""


@dataclass(frozen=True)
class ActionSystem:
    """A named set of actions with a total evaluation map over them."""

    id: str
    evaluations: Mapping[str, int]

    def __post_init__(self):
        for action, value in self.evaluations.items():
            if value not in ALLOWED_EVALUATIONS:
                raise ValueError(
                    f"evaluation of {action!r} must be -1, 0 or 1, got {value!r}"
                )

    @property
    def actions(self) -> frozenset[str]:
        return frozenset(self.evaluations)

    def evaluate(self, action: str) -> int:
        return self.evaluations[action]


@dataclass(frozen=True)
class ActionCorrespondence:
    """A partial bijection between the action sets of two systems."""

    source: str
    target: str
    pairs: frozenset[tuple[str, str]]

    def __init__(self, source: str, target: str, pairs):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "pairs", frozenset(tuple(p) for p in pairs))
        forward = [a for a, _ in self.pairs]
        backward = [b for _, b in self.pairs]
        if len(set(forward)) != len(forward) or len(set(backward)) != len(backward):
            raise ValueError("correspondence must be injective in both coordinates")

    def forward(self) -> dict[str, str]:
        return {a: b for a, b in self.pairs}

    def backward(self) -> dict[str, str]:
        return {b: a for a, b in self.pairs}

    def inverse(self) -> "ActionCorrespondence":
        return ActionCorrespondence(
            self.target, self.source, [(b, a) for a, b in self.pairs]
        )


@dataclass(frozen=True)
class MutualisticWitness:
    """The pair of actions certifying a relationship.

    ``forward_action`` belongs to the first system and benefits the second;
    ``backward_action`` belongs to the second system and benefits the first.
    """

    forward_action: str
    backward_action: str


def _validate(d: ActionSystem, r: ActionSystem, corr: ActionCorrespondence):
    if corr.source != d.id or corr.target != r.id:
        raise CorrespondenceMismatch(
            f"correspondence {corr.source!r} -> {corr.target!r} does not"
            f" connect {d.id!r} -> {r.id!r}"
        )
    for a, b in corr.pairs:
        if a not in d.evaluations or b not in r.evaluations:
            raise ValueError(f"correspondence pair ({a!r}, {b!r}) names unknown actions")


def _witness(
    d: ActionSystem,
    r: ActionSystem,
    corr: ActionCorrespondence,
    require_no_actor_cost: bool,
) -> MutualisticWitness | None:
    _validate(d, r, corr)
    forward = corr.forward()
    backward = corr.backward()
    forward_action = None
    for a in sorted(d.actions):
        b = forward.get(a)
        if b is None:
            continue
        if require_no_actor_cost and d.evaluate(a) < 0:
            continue
        if r.evaluate(b) > 0:
            forward_action = a
            break
    if forward_action is None:
        return None
    for b in sorted(r.actions):
        a = backward.get(b)
        if a is None:
            continue
        if require_no_actor_cost and r.evaluate(b) < 0:
            continue
        if d.evaluate(a) > 0:
            return MutualisticWitness(forward_action, b)
    return None


def check_precondition(
    d: ActionSystem, r: ActionSystem, corr: ActionCorrespondence
) -> MutualisticWitness | None:
    """Check the strict mutualistic precondition between two systems.

    Returns the least witness pair, or None when either direction lacks a
    qualifying action.
    """
    return _witness(d, r, corr, require_no_actor_cost=True)


def check_extended(
    d: ActionSystem, r: ActionSystem, corr: ActionCorrespondence
) -> MutualisticWitness | None:
    """Check the extended form, allowing actions costly to their actor."""
    return _witness(d, r, corr, require_no_actor_cost=False)


def mutualistic_closure(
    systems: list[ActionSystem],
    correspondences: list[ActionCorrespondence],
    extended: bool = False,
) -> set[tuple[str, str]]:
    """Reachability over pairwise mutualistic relations.

    An edge (D, R) is present when some listed correspondence between the
    two systems passes the chosen check; the result is the transitive
    closure of those edges over distinct system pairs.
    """
    by_id = {s.id: s for s in systems}
    check = check_extended if extended else check_precondition
    edges: set[tuple[str, str]] = set()
    for corr in correspondences:
        if corr.source not in by_id or corr.target not in by_id:
            raise ValueError(
                f"correspondence references unknown systems"
                f" {corr.source!r}, {corr.target!r}"
            )
        for oriented in (corr, corr.inverse()):
            d, r = by_id[oriented.source], by_id[oriented.target]
            if d.id != r.id and check(d, r, oriented) is not None:
                edges.add((d.id, r.id))
    # transitive closure over distinct pairs
    reachable: dict[str, set[str]] = {s.id: set() for s in systems}
    for d_id, r_id in edges:
        reachable[d_id].add(r_id)
    changed = True
    while changed:
        changed = False
        for d_id in reachable:
            expansion = set()
            for mid in reachable[d_id]:
                expansion |= reachable[mid]
            expansion -= reachable[d_id]
            if expansion:
                reachable[d_id] |= expansion
                changed = True
    return {
        (d_id, r_id)
        for d_id, targets in reachable.items()
        for r_id in targets
        if d_id != r_id
    }


@dataclass
class MutualismInstance:
    """Systems plus correspondences, as loaded from a JSON document."""

    systems: list[ActionSystem] = field(default_factory=list)
    correspondences: list[ActionCorrespondence] = field(default_factory=list)


def load_instance(source) -> MutualismInstance:
    """Load systems and correspondences from JSON text, a dict, or a path.

    Expected shape::

        {"systems": {"animals": {"exhaleCO2": 0, "inhaleO2": 1}, ...},
         "correspondences": [{"source": "animals", "target": "plants",
                              "pairs": [["exhaleCO2", "absorbCO2"]]}]}
    """
    if isinstance(source, dict):
        data = source
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        data = json.loads(source)
    else:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    systems = [
        ActionSystem(name, dict(evaluations))
        for name, evaluations in data.get("systems", {}).items()
    ]
    correspondences = [
        ActionCorrespondence(c["source"], c["target"], c.get("pairs", []))
        for c in data.get("correspondences", [])
    ]
    return MutualismInstance(systems, correspondences)

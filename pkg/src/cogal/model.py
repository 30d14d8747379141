"""Finite S5 epistemic models.

Validation of model documents, announcement updates, bisimulation
contraction by partition refinement, characteristic formulas on contracted
models, realization of announcement choices as epistemic formulas, and DOT
export.
"""

from __future__ import annotations

import json
import weakref
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .formula import (
    Atom, Formula, Know, Not, Top,
    conjoin, disjoin, _require_ident,
)

__all__ = [
    "KripkeModel", "PointedModel", "ContractionMap", "ModelError",
    "validate", "load_model", "save_model", "update", "bisim_contract",
    "is_contracted", "char_formula", "realize_choice", "to_dot",
]


class ModelError(ValueError):
    """Invalid model document or an operation violating a model precondition."""


@dataclass(frozen=True, eq=False)
class KripkeModel:
    """Finite S5 model: ordered states, one partition per agent, valuation.

    All collections iterate in document order. Instances are immutable and
    compared by identity; use `to_doc` for structural comparison.
    """

    states: tuple
    agents: tuple
    props: tuple
    partitions: Mapping[str, tuple]
    valuation: Mapping[str, frozenset]

    def __post_init__(self):
        if not self.states:
            raise ModelError("empty model: the state set must be non-empty")
        state_set = set(self.states)
        if len(state_set) != len(self.states):
            raise ModelError("duplicate state identifiers")
        if len(set(self.agents)) != len(self.agents):
            raise ModelError("duplicate agent identifiers")
        if len(set(self.props)) != len(self.props):
            raise ModelError("duplicate proposition identifiers")
        for a in self.agents:
            _require_ident(a, "agent")
        for p in self.props:
            _require_ident(p, "proposition")
        if set(self.partitions) != set(self.agents):
            raise ModelError("partitions must cover exactly the agent set")
        class_index = {}
        for agent in self.agents:
            seen = set()
            index = {}
            for block in self.partitions[agent]:
                if not block:
                    raise ModelError(f"empty partition block for agent {agent!r}")
                for s in block:
                    if s not in state_set:
                        raise ModelError(f"partition of agent {agent!r} mentions "
                                         f"unknown state {s!r}")
                    if s in index:
                        raise ModelError(f"overlapping partition blocks for agent "
                                         f"{agent!r} at state {s!r}")
                    index[s] = block
                seen.update(block)
            if seen != state_set:
                missing = sorted(state_set - seen)
                raise ModelError(f"partition of agent {agent!r} does not cover "
                                 f"states {missing}")
            class_index[agent] = index
        for prop, extent in self.valuation.items():
            if prop not in self.props:
                raise ModelError(f"valuation mentions unknown proposition {prop!r}")
            for s in extent:
                if s not in state_set:
                    raise ModelError(f"valuation of {prop!r} mentions unknown "
                                     f"state {s!r}")
        object.__setattr__(self, "_class_index", class_index)
        object.__setattr__(self, "_state_set", frozenset(state_set))

    def class_of(self, agent: str, state: str) -> frozenset:
        """Equivalence class of the state under the agent's relation."""
        return self._class_index[agent][state]

    def props_at(self, state: str) -> tuple:
        """Propositions true at the state, in document order."""
        return tuple(p for p in self.props
                     if state in self.valuation.get(p, frozenset()))

    def truth_set(self, prop: str) -> frozenset:
        return self.valuation.get(prop, frozenset())

    def update(self, keep: Iterable[str]) -> "KripkeModel":
        """Restriction to a non-empty subset of states.

        Partition blocks are intersected with the kept set (empty
        intersections dropped) and the valuation is restricted.
        """
        kept = frozenset(keep)
        if not kept:
            raise ModelError("update with an empty state set; an unsatisfied "
                             "announcement must be handled as vacuous truth")
        unknown = kept - self._state_set
        if unknown:
            raise ModelError(f"update mentions unknown states {sorted(unknown)}")
        states = tuple(s for s in self.states if s in kept)
        partitions = {}
        for agent in self.agents:
            blocks = []
            for block in self.partitions[agent]:
                cut = block & kept
                if cut:
                    blocks.append(cut)
            partitions[agent] = tuple(blocks)
        valuation = {p: self.valuation.get(p, frozenset()) & kept
                     for p in self.props}
        return KripkeModel(states, self.agents, self.props, partitions, valuation)

    def to_doc(self, designated: Optional[str] = None) -> dict:
        """JSON-ready document in the external model-file format."""
        doc = {
            "agents": list(self.agents),
            "props": list(self.props),
            "states": list(self.states),
            "partitions": {
                agent: [[s for s in self.states if s in block]
                        for block in self.partitions[agent]]
                for agent in self.agents
            },
            "valuation": {
                p: [s for s in self.states
                    if s in self.valuation.get(p, frozenset())]
                for p in self.props
            },
        }
        if designated is not None:
            doc["designated"] = designated
        return doc


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: str

    def __post_init__(self):
        if self.point not in self.model._state_set:
            raise ModelError(f"designated state {self.point!r} is not a state "
                             "of the model")


@dataclass(frozen=True, eq=False)
class ContractionMap:
    """Result of bisimulation contraction: quotient model plus the surjection
    from original states onto contracted states."""

    original: KripkeModel
    contracted: KripkeModel
    mapping: Mapping[str, str]


def validate(doc: dict) -> KripkeModel:
    """Build a model from a parsed document, checking the full invariant set."""
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    for field in ("agents", "props", "states", "partitions", "valuation"):
        if field not in doc:
            raise ModelError(f"model document is missing field {field!r}")
    for field in ("agents", "props", "states"):
        value = doc[field]
        if (not isinstance(value, list)
                or not all(isinstance(x, str) for x in value)):
            raise ModelError(f"field {field!r} must be a list of strings")
    if not isinstance(doc["partitions"], dict):
        raise ModelError("field 'partitions' must map agents to block lists")
    if not isinstance(doc["valuation"], dict):
        raise ModelError("field 'valuation' must map propositions to state lists")
    partitions = {}
    for agent, blocks in doc["partitions"].items():
        if (not isinstance(blocks, list)
                or not all(isinstance(b, list) for b in blocks)):
            raise ModelError(f"partition of agent {agent!r} must be a list of "
                             "blocks (lists of state ids)")
        partitions[agent] = tuple(frozenset(b) for b in blocks)
        for block, raw in zip(partitions[agent], blocks):
            if len(block) != len(raw):
                raise ModelError(f"partition block {raw} of agent {agent!r} "
                                 "repeats a state")
    valuation = {}
    for prop, states in doc["valuation"].items():
        if not isinstance(states, list):
            raise ModelError(f"valuation of {prop!r} must be a list of state ids")
        valuation[prop] = frozenset(states)
    model = KripkeModel(tuple(doc["states"]), tuple(doc["agents"]),
                        tuple(doc["props"]), partitions, valuation)
    designated = doc.get("designated")
    if designated is not None and designated not in model._state_set:
        raise ModelError(f"designated state {designated!r} is not a state "
                         "of the model")
    return model


def load_model(path) -> tuple:
    """Read a model file; returns (model, designated-or-None)."""
    with open(path, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ModelError(f"model file {path}: {exc}") from exc
    return validate(doc), doc.get("designated")


def save_model(path, model: KripkeModel, designated: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model.to_doc(designated), handle, indent=2)
        handle.write("\n")


def update(model: KripkeModel, keep: Iterable[str]) -> KripkeModel:
    return model.update(keep)


# --- bisimulation contraction -------------------------------------------------

def _refinement_levels(model: KripkeModel) -> list:
    """Partition-refinement ladder: state -> block id per level, from
    valuation equality down to the coarsest bisimulation."""
    signature = {s: model.props_at(s) for s in model.states}
    level = _blocks_by_signature(model.states, signature)
    levels = [level]
    while True:
        current = levels[-1]
        signature = {
            s: (current[s],)
            + tuple(frozenset(current[t] for t in model.class_of(a, s))
                    for a in model.agents)
            for s in model.states
        }
        refined = _blocks_by_signature(model.states, signature)
        if len(set(refined.values())) == len(set(current.values())):
            return levels
        levels.append(refined)


def _blocks_by_signature(states, signature) -> dict:
    ids = {}
    out = {}
    for s in states:
        sig = signature[s]
        if sig not in ids:
            ids[sig] = len(ids)
        out[s] = ids[sig]
    return out


def bisim_contract(model: KripkeModel) -> ContractionMap:
    """Quotient by the coarsest bisimulation respecting the valuation and all
    agent relations. Contracted states are named by their first original
    state in document order."""
    final = _refinement_levels(model)[-1]
    rep_of_block = {}
    for s in model.states:
        rep_of_block.setdefault(final[s], s)
    mapping = {s: rep_of_block[final[s]] for s in model.states}
    reps = tuple(s for s in model.states if mapping[s] == s)
    partitions = {}
    for agent in model.agents:
        blocks = []
        seen = set()
        for block in model.partitions[agent]:
            image = frozenset(mapping[t] for t in block)
            if image not in seen:
                seen.add(image)
                blocks.append(image)
        partitions[agent] = tuple(blocks)
    valuation = {p: frozenset(mapping[s] for s in model.valuation.get(p, frozenset()))
                 for p in model.props}
    contracted = KripkeModel(reps, model.agents, model.props, partitions, valuation)
    return ContractionMap(model, contracted, mapping)


def is_contracted(model: KripkeModel) -> bool:
    """Whether no two distinct states are bisimilar."""
    final = _refinement_levels(model)[-1]
    return len(set(final.values())) == len(model.states)


# --- characteristic formulas ---------------------------------------------------

_CHAR_CACHE = weakref.WeakKeyDictionary()


def _char_table(model: KripkeModel) -> dict:
    try:
        return _CHAR_CACHE[model]
    except KeyError:
        pass
    levels = _refinement_levels(model)
    if len(set(levels[-1].values())) != len(model.states):
        raise ModelError("model is not bisimulation-contracted; distinct "
                         "bisimilar states admit no distinguishing formula")
    memo = {}

    def sep_level(s, t):
        for k, level in enumerate(levels):
            if level[s] != level[t]:
                return k
        raise AssertionError("contracted states must separate")

    def delta(s, t):
        """Purely epistemic formula true at s and false at t."""
        key = (s, t)
        if key in memo:
            return memo[key]
        k = sep_level(s, t)
        if k == 0:
            for p in model.props:
                extent = model.truth_set(p)
                if (s in extent) != (t in extent):
                    out = Atom(p) if s in extent else Not(Atom(p))
                    break
            else:
                raise AssertionError("level-0 separation must be propositional")
        else:
            prev = levels[k - 1]
            out = None
            for agent in model.agents:
                met_s = {prev[u] for u in model.class_of(agent, s)}
                met_t = {prev[u] for u in model.class_of(agent, t)}
                if met_s == met_t:
                    continue
                extra = sorted(met_s - met_t)
                if extra:
                    u = _first_in_block(model, agent, s, prev, extra[0])
                    inner = conjoin(delta(u, t2) for t2 in _ordered(model, model.class_of(agent, t)))
                    out = Not(Know(agent, Not(inner)))
                else:
                    extra = sorted(met_t - met_s)
                    u = _first_in_block(model, agent, t, prev, extra[0])
                    inner = conjoin(delta(u, s2) for s2 in _ordered(model, model.class_of(agent, s)))
                    out = Know(agent, Not(inner))
                break
            if out is None:
                raise AssertionError("separated states must differ for some agent")
        memo[key] = out
        return out

    table = {}
    for s in model.states:
        parts = [delta(s, t) for t in model.states if t != s]
        table[s] = conjoin(parts) if parts else Top()
    _CHAR_CACHE[model] = table
    return table


def _ordered(model, block):
    return [s for s in model.states if s in block]


def _first_in_block(model, agent, state, level, block_id):
    for u in _ordered(model, model.class_of(agent, state)):
        if level[u] == block_id:
            return u
    raise AssertionError("block id must be met by the class")


def char_formula(model: KripkeModel, state: str) -> Formula:
    """Epistemic formula whose extension in a contracted model is exactly
    the given state."""
    if state not in model._state_set:
        raise ModelError(f"unknown state {state!r}")
    return _char_table(model)[state]


def realize_choice(model: KripkeModel, w: str, group: Iterable[str],
                   choice: Mapping[str, frozenset]) -> Formula:
    """Joint announcement formula denoting the given choice: one knowledge
    conjunct per group member, each with extension exactly the member's set.

    Requires a contracted model; each member's set must be a union of that
    member's equivalence classes.
    """
    if w not in model._state_set:
        raise ModelError(f"unknown state {w!r}")
    members = frozenset(group)
    unknown = members - set(model.agents)
    if unknown:
        raise ModelError(f"choice mentions unknown agents {sorted(unknown)}")
    table = _char_table(model)  # also enforces contractedness
    parts = []
    for agent in model.agents:
        if agent not in members:
            continue
        if agent not in choice:
            raise ModelError(f"choice is missing group member {agent!r}")
        chosen = frozenset(choice[agent])
        if chosen - model._state_set:
            raise ModelError(f"choice for agent {agent!r} mentions unknown states")
        for block in model.partitions[agent]:
            if block & chosen and not block <= chosen:
                raise ModelError(f"choice for agent {agent!r} is not a union of "
                                 f"that agent's equivalence classes")
        body = disjoin(table[s] for s in model.states if s in chosen)
        parts.append(Know(agent, body))
    return conjoin(parts) if parts else Top()


# --- DOT export -----------------------------------------------------------------

def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(model: KripkeModel) -> str:
    """Undirected DOT graph: one node per state labeled with its true
    propositions; one edge per non-reflexive related pair labeled with the
    agents that relate it. Reflexive edges are omitted."""
    lines = ["graph model {"]
    for s in model.states:
        props = " ".join(model.props_at(s))
        label = f"{s}: {props}" if props else s
        lines.append(f"  {_dot_quote(s)} [label={_dot_quote(label)}];")
    for i, s in enumerate(model.states):
        for t in model.states[i + 1:]:
            agents = [a for a in model.agents if t in model.class_of(a, s)]
            if agents:
                lines.append(f"  {_dot_quote(s)} -- {_dot_quote(t)} "
                             f"[label={_dot_quote(','.join(agents))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"

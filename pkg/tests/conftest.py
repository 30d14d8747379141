"""Shared fixtures and reference oracles."""

from __future__ import annotations

import pytest

from cogal.formula import (
    And, Atom, Bot, Formula, Iff, Imp, Know, Not, Or, PaBox, PaDia, Top,
)
from cogal.harness import train_model
from cogal.model import KripkeModel


@pytest.fixture()
def train():
    model, point = train_model()
    return model, point


@pytest.fixture()
def train_doc():
    return {
        "agents": ["a", "b", "c"],
        "props": ["p"],
        "states": ["w", "v"],
        "partitions": {"a": [["w"], ["v"]],
                       "b": [["w"], ["v"]],
                       "c": [["w", "v"]]},
        "valuation": {"p": ["v"]},
        "designated": "w",
    }


def naive_pal_eval(model: KripkeModel, state: str, f: Formula,
                   live: frozenset = None) -> bool:
    """Reference semantics for the announcement-free/PAL fragment.

    Deliberately independent of the production engine: no contraction, no
    memoization, no model updates; announcements are tracked as a shrinking
    set of surviving states over the original model.
    """
    if live is None:
        live = frozenset(model.states)
    assert state in live
    if isinstance(f, Atom):
        return state in model.truth_set(f.name)
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not naive_pal_eval(model, state, f.body, live)
    if isinstance(f, And):
        return (naive_pal_eval(model, state, f.left, live)
                and naive_pal_eval(model, state, f.right, live))
    if isinstance(f, Or):
        return (naive_pal_eval(model, state, f.left, live)
                or naive_pal_eval(model, state, f.right, live))
    if isinstance(f, Imp):
        return (not naive_pal_eval(model, state, f.left, live)
                or naive_pal_eval(model, state, f.right, live))
    if isinstance(f, Iff):
        return (naive_pal_eval(model, state, f.left, live)
                == naive_pal_eval(model, state, f.right, live))
    if isinstance(f, Know):
        return all(naive_pal_eval(model, t, f.body, live)
                   for t in model.class_of(f.agent, state) if t in live)
    if isinstance(f, (PaBox, PaDia)):
        satisfied = frozenset(t for t in live
                              if naive_pal_eval(model, t, f.announce, live))
        if state not in satisfied:
            return isinstance(f, PaBox)
        return naive_pal_eval(model, state, f.body, satisfied)
    raise TypeError(f"naive oracle covers the PAL fragment only: {f!r}")

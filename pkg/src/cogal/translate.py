"""Compilation of public-announcement formulas into the announcement-free
epistemic language.

The rewrite system peels announcement operators by the standard reduction
equivalences (atom, negation, conjunction, knowledge, composition). Each
rewrite strictly decreases a multiplicative weight, which guarantees
termination; the additive size measure does not decrease on the composition
rewrite, so the weight below charges an announcement multiplicatively.
"""

from __future__ import annotations

from .formula import (
    And, Atom, Formula, Fragment, Know, Not, PaBox, Top,
    fragment, normalize,
)

__all__ = ["translate"]


def _weight(f: Formula) -> int:
    """Termination measure on primitive-form formulas; announcements weigh
    (4 + weight(announcement)) * weight(body)."""
    if isinstance(f, (Atom, Top)):
        return 1
    if isinstance(f, Not):
        return 1 + _weight(f.body)
    if isinstance(f, Know):
        return 1 + _weight(f.body)
    if isinstance(f, And):
        return 1 + max(_weight(f.left), _weight(f.right))
    if isinstance(f, PaBox):
        return (4 + _weight(f.announce)) * _weight(f.body)
    raise TypeError(f"not in the announcement-free/PAL primitive fragment: {f!r}")


def _imp(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def _t(f: Formula) -> Formula:
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Not):
        return Not(_t(f.body))
    if isinstance(f, And):
        return And(_t(f.left), _t(f.right))
    if isinstance(f, Know):
        return Know(f.agent, _t(f.body))
    if isinstance(f, PaBox):
        announce, body = f.announce, f.body
        if isinstance(body, (Atom, Top)):
            step = _imp(announce, body)
        elif isinstance(body, Not):
            step = _imp(announce, Not(PaBox(announce, body.body)))
        elif isinstance(body, And):
            step = And(PaBox(announce, body.left), PaBox(announce, body.right))
        elif isinstance(body, Know):
            step = _imp(announce, Know(body.agent, PaBox(announce, body.body)))
        elif isinstance(body, PaBox):
            step = PaBox(And(announce, PaBox(announce, body.announce)), body.body)
        else:
            raise TypeError(f"announcement body outside PAL: {body!r}")
        assert _weight(step) < _weight(f), "rewrite must decrease the weight"
        return _t(step)
    raise TypeError(f"not in the PAL primitive fragment: {f!r}")


def translate(f: Formula) -> Formula:
    """Equivalent announcement-free formula for a PAL input.

    The input is normalized to primitive connectives first; the result is in
    primitive form and has the same extension in every model. Group and
    coalition operators are rejected: no such reduction exists for them.
    """
    frag = fragment(f)
    if frag not in (Fragment.EL, Fragment.PAL):
        raise ValueError("translation is defined for the announcement fragment "
                         f"only; input is in {frag.name}")
    return _t(normalize(f))

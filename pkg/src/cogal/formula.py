"""Syntax of coalition and group announcement logic (CoGAL).

Formula AST nodes, the ASCII concrete syntax (parser and renderer),
language-fragment classification, size and announcement-depth measures,
and necessity forms (formula contexts with a single hole).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields
from enum import IntEnum
from typing import Iterable, Mapping

__all__ = [
    "Formula", "Atom", "Top", "Bot", "Not", "And", "Or", "Imp", "Iff",
    "Know", "PaBox", "PaDia", "GroupBox", "GroupDia", "CoalBox", "CoalDia",
    "NecessityForm", "Hole", "ImpCtx", "KnowCtx", "PaCtx",
    "Fragment", "ParseError",
    "parse", "render", "normalize", "resugar", "fragment",
    "is_group_announcement", "size", "depth_pa", "depth_ca", "order_lt",
    "instantiate", "substitute", "atoms", "agents_of", "conjuncts",
    "conjoin", "disjoin",
]

_IDENT_RE = re.compile(r"[a-z][a-z0-9_]*")
_RESERVED = frozenset({"top", "bot"})


def _require_ident(name: str, role: str) -> None:
    if not isinstance(name, str) or not _IDENT_RE.fullmatch(name) or name in _RESERVED:
        raise ValueError(f"invalid {role} name {name!r}: expected [a-z][a-z0-9_]* "
                         f"other than the reserved words 'top' and 'bot'")


def _cached_hash(self):
    try:
        return object.__getattribute__(self, "_hash")
    except AttributeError:
        value = hash((self.__class__,)
                     + tuple(getattr(self, f.name) for f in fields(self)))
        object.__setattr__(self, "_hash", value)
        return value


def _node(cls):
    """Frozen dataclass node with a lazily cached structural hash."""
    cls = dataclass(frozen=True)(cls)
    cls.__hash__ = _cached_hash
    return cls


class Formula:
    """Base class for formula nodes; values are immutable and shareable."""

    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Imp(self, other)

    def __str__(self) -> str:
        return render(self)


@_node
class Atom(Formula):
    name: str

    def __post_init__(self):
        _require_ident(self.name, "proposition")


@_node
class Top(Formula):
    pass


@_node
class Bot(Formula):
    pass


@_node
class Not(Formula):
    body: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Imp(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


@_node
class Know(Formula):
    agent: str
    body: Formula

    def __post_init__(self):
        _require_ident(self.agent, "agent")


def _coerce_group(self):
    group = frozenset(self.group)
    for name in group:
        _require_ident(name, "agent")
    object.__setattr__(self, "group", group)


@_node
class PaBox(Formula):
    """Public announcement box: after a truthful announcement, the body holds."""
    announce: Formula
    body: Formula


@_node
class PaDia(Formula):
    """Public announcement diamond: the announcement is truthful and the body holds after it."""
    announce: Formula
    body: Formula


@_node
class GroupBox(Formula):
    """After every joint truthful announcement by the group, the body holds."""
    group: frozenset
    body: Formula

    __post_init__ = _coerce_group


@_node
class GroupDia(Formula):
    """Some joint truthful announcement by the group makes the body hold."""
    group: frozenset
    body: Formula

    __post_init__ = _coerce_group


@_node
class CoalBox(Formula):
    """For every announcement by the group, the other agents have a simultaneous
    response after which the body holds."""
    group: frozenset
    body: Formula

    __post_init__ = _coerce_group


@_node
class CoalDia(Formula):
    """The group has an announcement after which the body holds no matter what
    the other agents announce simultaneously."""
    group: frozenset
    body: Formula

    __post_init__ = _coerce_group


_GROUPED = (GroupBox, GroupDia, CoalBox, CoalDia)


def _parts(f: Formula) -> tuple:
    if isinstance(f, (Atom, Top, Bot)):
        return ()
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, (And, Or, Imp, Iff)):
        return (f.left, f.right)
    if isinstance(f, Know):
        return (f.body,)
    if isinstance(f, (PaBox, PaDia)):
        return (f.announce, f.body)
    if isinstance(f, _GROUPED):
        return (f.body,)
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> frozenset:
    """All proposition names occurring in the formula."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            out.add(g.name)
        stack.extend(_parts(g))
    return frozenset(out)


def agents_of(f: Formula) -> frozenset:
    """All agent names occurring in the formula, including group members."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Know):
            out.add(g.agent)
        elif isinstance(g, _GROUPED):
            out.update(g.group)
        stack.extend(_parts(g))
    return frozenset(out)


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Replace atoms by formulas; names missing from the mapping are kept."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, (And, Or, Imp, Iff)):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Know):
        return Know(f.agent, substitute(f.body, mapping))
    if isinstance(f, (PaBox, PaDia)):
        return type(f)(substitute(f.announce, mapping), substitute(f.body, mapping))
    return type(f)(f.group, substitute(f.body, mapping))


def conjuncts(f: Formula) -> list:
    """Flatten a conjunction tree into its leaves (associativity only)."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def conjoin(parts: Iterable[Formula]) -> Formula:
    """Left-associated conjunction; empty input yields top."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return Top() if out is None else out


def disjoin(parts: Iterable[Formula]) -> Formula:
    """Left-associated disjunction; empty input yields bot."""
    out = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return Bot() if out is None else out


# --- fragments -------------------------------------------------------------

class Fragment(IntEnum):
    EL = 0
    PAL = 1
    GAL = 2
    COGAL = 3


def fragment(f: Formula) -> Fragment:
    """Smallest sublanguage containing the formula."""
    worst = Fragment.EL
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (CoalBox, CoalDia)):
            return Fragment.COGAL
        if isinstance(g, (GroupBox, GroupDia)):
            worst = max(worst, Fragment.GAL)
        elif isinstance(g, (PaBox, PaDia)):
            worst = max(worst, Fragment.PAL)
        stack.extend(_parts(g))
    return worst


def is_group_announcement(f: Formula, group: Iterable[str]) -> bool:
    """Whether f is a joint announcement for the group: one purely epistemic
    knowledge conjunct per member, up to associativity of conjunction.

    The empty group announces the empty conjunction, i.e. exactly top.
    """
    members = frozenset(group)
    if not members:
        return isinstance(f, Top)
    seen = set()
    for part in conjuncts(f):
        if not isinstance(part, Know) or part.agent not in members:
            return False
        if part.agent in seen:
            return False
        if fragment(part.body) is not Fragment.EL:
            return False
        seen.add(part.agent)
    return seen == members


# --- normal form and measures ----------------------------------------------

def normalize(f: Formula) -> Formula:
    """Expand derived connectives into the primitive set
    {atom, top, ~, &, K, [.]., [G], [<G>]} via the standard abbreviations."""
    if isinstance(f, (Atom, Top)):
        return f
    if isinstance(f, Bot):
        return Not(Top())
    if isinstance(f, Not):
        return Not(normalize(f.body))
    if isinstance(f, And):
        return And(normalize(f.left), normalize(f.right))
    if isinstance(f, Or):
        return Not(And(Not(normalize(f.left)), Not(normalize(f.right))))
    if isinstance(f, Imp):
        return Not(And(normalize(f.left), Not(normalize(f.right))))
    if isinstance(f, Iff):
        return And(normalize(Imp(f.left, f.right)), normalize(Imp(f.right, f.left)))
    if isinstance(f, Know):
        return Know(f.agent, normalize(f.body))
    if isinstance(f, PaBox):
        return PaBox(normalize(f.announce), normalize(f.body))
    if isinstance(f, PaDia):
        return Not(PaBox(normalize(f.announce), Not(normalize(f.body))))
    if isinstance(f, GroupBox):
        return GroupBox(f.group, normalize(f.body))
    if isinstance(f, GroupDia):
        return Not(GroupBox(f.group, Not(normalize(f.body))))
    if isinstance(f, CoalBox):
        return CoalBox(f.group, normalize(f.body))
    if isinstance(f, CoalDia):
        return Not(CoalBox(f.group, Not(normalize(f.body))))
    raise TypeError(f"not a formula: {f!r}")


def _size_prim(f: Formula) -> int:
    if isinstance(f, (Atom, Top)):
        return 1
    if isinstance(f, Not):
        return _size_prim(f.body) + 1
    if isinstance(f, Know):
        return _size_prim(f.body) + 1
    if isinstance(f, (GroupBox, CoalBox)):
        return _size_prim(f.body) + 1
    if isinstance(f, And):
        return _size_prim(f.left) + _size_prim(f.right) + 1
    if isinstance(f, PaBox):
        return _size_prim(f.announce) + 3 * _size_prim(f.body)
    raise TypeError(f"not in primitive form: {f!r}")


def _depth_pa_prim(f: Formula) -> int:
    if isinstance(f, (Atom, Top)):
        return 0
    if isinstance(f, (Not, Know, CoalBox)):
        body = f.body
        return _depth_pa_prim(body)
    if isinstance(f, And):
        return max(_depth_pa_prim(f.left), _depth_pa_prim(f.right))
    if isinstance(f, PaBox):
        return _depth_pa_prim(f.announce) + _depth_pa_prim(f.body)
    if isinstance(f, GroupBox):
        return _depth_pa_prim(f.body) + 1
    raise TypeError(f"not in primitive form: {f!r}")


def _depth_ca_prim(f: Formula) -> int:
    if isinstance(f, (Atom, Top)):
        return 0
    if isinstance(f, (Not, Know, GroupBox)):
        return _depth_ca_prim(f.body)
    if isinstance(f, And):
        return max(_depth_ca_prim(f.left), _depth_ca_prim(f.right))
    if isinstance(f, PaBox):
        return _depth_ca_prim(f.announce) + _depth_ca_prim(f.body)
    if isinstance(f, CoalBox):
        return _depth_ca_prim(f.body) + 1
    raise TypeError(f"not in primitive form: {f!r}")


def size(f: Formula) -> int:
    """Weighted size; announcements charge triple for their body. Derived
    connectives are expanded before measuring."""
    return _size_prim(normalize(f))


def depth_pa(f: Formula) -> int:
    """Nesting depth of group-announcement quantifiers (announcement prefixes
    add the depths of both parts)."""
    return _depth_pa_prim(normalize(f))


def depth_ca(f: Formula) -> int:
    """Nesting depth of coalition-announcement quantifiers; group quantifiers
    are transparent."""
    return _depth_ca_prim(normalize(f))


def order_lt(f: Formula, g: Formula) -> bool:
    """Strict well-founded order: lexicographic on (coalition depth,
    group depth, size)."""
    fn, gn = normalize(f), normalize(g)
    left = (_depth_ca_prim(fn), _depth_pa_prim(fn), _size_prim(fn))
    right = (_depth_ca_prim(gn), _depth_pa_prim(gn), _size_prim(gn))
    return left < right


# --- necessity forms ---------------------------------------------------------

class NecessityForm:
    """Formula context with exactly one hole, closed under implication tails,
    knowledge operators, and announcement prefixes."""


@_node
class Hole(NecessityForm):
    pass


@_node
class ImpCtx(NecessityForm):
    premise: Formula
    tail: NecessityForm


@_node
class KnowCtx(NecessityForm):
    agent: str
    tail: NecessityForm

    def __post_init__(self):
        _require_ident(self.agent, "agent")


@_node
class PaCtx(NecessityForm):
    announce: Formula
    tail: NecessityForm


def instantiate(form: NecessityForm, f: Formula) -> Formula:
    """Replace the hole of the context with the given formula."""
    if isinstance(form, Hole):
        return f
    if isinstance(form, ImpCtx):
        return Imp(form.premise, instantiate(form.tail, f))
    if isinstance(form, KnowCtx):
        return Know(form.agent, instantiate(form.tail, f))
    if isinstance(form, PaCtx):
        return PaBox(form.announce, instantiate(form.tail, f))
    raise TypeError(f"not a necessity form: {form!r}")


# --- concrete syntax ---------------------------------------------------------

class ParseError(ValueError):
    """Malformed concrete syntax; carries position and the expected tokens."""

    def __init__(self, message: str, line: int, column: int,
                 expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(expected))
        text = f"{message} at line {line}, column {column}"
        if self.expected:
            text += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(text)


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    column: int


_SYMBOLS = {"~", "&", "|", "(", ")", "[", "]", "<", ">", "{", "}", ","}


def _tokenize(text: str) -> list:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if text.startswith("<->", i):
            tokens.append(_Token("<->", "<->", line, col))
            i += 3
            col += 3
            continue
        if text.startswith("->", i):
            tokens.append(_Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch == "K":
            tokens.append(_Token("K", "K", line, col))
            i += 1
            col += 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            kind = word if word in _RESERVED else "ident"
            tokens.append(_Token(kind, word, line, col))
            i += len(word)
            col += len(word)
            continue
        raise ParseError(f"unknown operator or character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


_UNARY_START = ("'~'", "'K'", "'['", "'<'", "'('", "identifier", "'top'", "'bot'")


class _Parser:
    def __init__(self, tokens: list):
        self._toks = tokens
        self._pos = 0

    def _peek(self, offset: int = 0) -> _Token:
        idx = min(self._pos + offset, len(self._toks) - 1)
        return self._toks[idx]

    def _advance(self) -> _Token:
        tok = self._toks[self._pos]
        if tok.kind != "eof":
            self._pos += 1
        return tok

    def _expect(self, kind: str, what: str) -> _Token:
        tok = self._peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected {tok.value!r}" if tok.kind != "eof"
                             else "unexpected end of input",
                             tok.line, tok.column, (what,))
        return self._advance()

    def parse(self) -> Formula:
        f = self._iff()
        tok = self._peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing {tok.value!r}",
                             tok.line, tok.column, ("end of input",))
        return f

    def _iff(self) -> Formula:
        left = self._imp()
        if self._peek().kind == "<->":
            self._advance()
            return Iff(left, self._iff())
        return left

    def _imp(self) -> Formula:
        left = self._disj()
        if self._peek().kind == "->":
            self._advance()
            return Imp(left, self._imp())
        return left

    def _disj(self) -> Formula:
        f = self._conj()
        while self._peek().kind == "|":
            self._advance()
            f = Or(f, self._conj())
        return f

    def _conj(self) -> Formula:
        f = self._unary()
        while self._peek().kind == "&":
            self._advance()
            f = And(f, self._unary())
        return f

    def _unary(self) -> Formula:
        tok = self._peek()
        if tok.kind == "~":
            self._advance()
            return Not(self._unary())
        if tok.kind == "K":
            self._advance()
            agent = self._expect("ident", "agent name").value
            return Know(agent, self._unary())
        if tok.kind == "[":
            self._advance()
            return self._box()
        if tok.kind == "<":
            self._advance()
            return self._dia()
        if tok.kind == "(":
            self._advance()
            f = self._iff()
            self._expect(")", "')'")
            return f
        if tok.kind == "ident":
            self._advance()
            return Atom(tok.value)
        if tok.kind == "top":
            self._advance()
            return Top()
        if tok.kind == "bot":
            self._advance()
            return Bot()
        raise ParseError(f"unexpected {tok.value!r}" if tok.kind != "eof"
                         else "unexpected end of input",
                         tok.line, tok.column, _UNARY_START)

    def _group(self) -> frozenset:
        self._expect("{", "'{'")
        names = []
        if self._peek().kind == "ident":
            names.append(self._advance().value)
            while self._peek().kind == ",":
                self._advance()
                names.append(self._expect("ident", "agent name").value)
        self._expect("}", "'}'")
        return frozenset(names)

    def _group_shape_end(self, start: int, open_kind: str, close_kind: str):
        """If tokens from index `start` match `open { id (, id)* } close`,
        return the index just past `close`; otherwise None."""
        i = start
        if self._toks[i].kind != open_kind:
            return None
        i += 1
        if self._toks[i].kind != "{":
            return None
        i += 1
        if self._toks[i].kind == "ident":
            i += 1
            while self._toks[i].kind == ",":
                if self._toks[i + 1].kind != "ident":
                    return None
                i += 2
        if self._toks[i].kind != "}":
            return None
        i += 1
        if self._toks[i].kind != close_kind:
            return None
        return i + 1

    def _box(self) -> Formula:
        # already past '['
        if self._peek().kind == "{":
            group = self._group()
            self._expect("]", "']'")
            return GroupBox(group, self._unary())
        end = self._group_shape_end(self._pos, "<", ">")
        if end is not None and self._toks[end].kind == "]":
            self._advance()  # '<'
            group = self._group()
            self._expect(">", "'>'")
            self._expect("]", "']'")
            return CoalBox(group, self._unary())
        announce = self._iff()
        self._expect("]", "']'")
        return PaBox(announce, self._unary())

    def _dia(self) -> Formula:
        # already past '<'
        if self._peek().kind == "{":
            group = self._group()
            self._expect(">", "'>'")
            return GroupDia(group, self._unary())
        end = self._group_shape_end(self._pos, "[", "]")
        if end is not None and self._toks[end].kind == ">":
            self._advance()  # '['
            group = self._group()
            self._expect("]", "']'")
            self._expect(">", "'>'")
            return CoalDia(group, self._unary())
        announce = self._iff()
        self._expect(">", "'>'")
        return PaDia(announce, self._unary())


def parse(text: str) -> Formula:
    """Parse the ASCII surface syntax into a formula AST."""
    return _Parser(_tokenize(text)).parse()


# Precedence levels, tighter binds higher.
_P_IFF, _P_IMP, _P_OR, _P_AND, _P_UNARY, _P_ATOM = 1, 2, 3, 4, 5, 6


def _group_str(group: frozenset) -> str:
    return "{" + ",".join(sorted(group)) + "}"


def _render(f: Formula, minimum: int) -> str:
    if isinstance(f, Atom):
        text, prec = f.name, _P_ATOM
    elif isinstance(f, Top):
        text, prec = "top", _P_ATOM
    elif isinstance(f, Bot):
        text, prec = "bot", _P_ATOM
    elif isinstance(f, Not):
        text, prec = "~" + _render(f.body, _P_UNARY), _P_UNARY
    elif isinstance(f, Know):
        text, prec = f"K {f.agent} " + _render(f.body, _P_UNARY), _P_UNARY
    elif isinstance(f, PaBox):
        text = "[" + _render(f.announce, 0) + "] " + _render(f.body, _P_UNARY)
        prec = _P_UNARY
    elif isinstance(f, PaDia):
        text = "<" + _render(f.announce, 0) + "> " + _render(f.body, _P_UNARY)
        prec = _P_UNARY
    elif isinstance(f, GroupBox):
        text = "[" + _group_str(f.group) + "] " + _render(f.body, _P_UNARY)
        prec = _P_UNARY
    elif isinstance(f, GroupDia):
        text = "<" + _group_str(f.group) + "> " + _render(f.body, _P_UNARY)
        prec = _P_UNARY
    elif isinstance(f, CoalBox):
        text = "[<" + _group_str(f.group) + ">] " + _render(f.body, _P_UNARY)
        prec = _P_UNARY
    elif isinstance(f, CoalDia):
        text = "<[" + _group_str(f.group) + "]> " + _render(f.body, _P_UNARY)
        prec = _P_UNARY
    elif isinstance(f, And):
        text = _render(f.left, _P_AND) + " & " + _render(f.right, _P_AND + 1)
        prec = _P_AND
    elif isinstance(f, Or):
        text = _render(f.left, _P_OR) + " | " + _render(f.right, _P_OR + 1)
        prec = _P_OR
    elif isinstance(f, Imp):
        text = _render(f.left, _P_IMP + 1) + " -> " + _render(f.right, _P_IMP)
        prec = _P_IMP
    elif isinstance(f, Iff):
        text = _render(f.left, _P_IFF + 1) + " <-> " + _render(f.right, _P_IFF)
        prec = _P_IFF
    else:
        raise TypeError(f"not a formula: {f!r}")
    if prec < minimum:
        return "(" + text + ")"
    return text


def render(f: Formula) -> str:
    """Minimal-parenthesis surface syntax; reparsing yields the same AST."""
    return _render(f, 0)


def resugar(f: Formula) -> Formula:
    """Display aid: fold `~(x & ~y)` back into `x -> y` and `~top` into `bot`,
    bottom-up. Semantics-preserving."""
    if isinstance(f, (Atom, Top, Bot)):
        return f
    if isinstance(f, Not):
        body = resugar(f.body)
        if isinstance(body, Top):
            return Bot()
        if isinstance(body, And) and isinstance(body.right, Not):
            return Imp(body.left, body.right.body)
        return Not(body)
    if isinstance(f, (And, Or, Imp, Iff)):
        return type(f)(resugar(f.left), resugar(f.right))
    if isinstance(f, Know):
        return Know(f.agent, resugar(f.body))
    if isinstance(f, (PaBox, PaDia)):
        return type(f)(resugar(f.announce), resugar(f.body))
    return type(f)(f.group, resugar(f.body))

"""Graded modal formulas: syntax tree, parser, printer and size accounting.

Formulas are immutable and hashable.  The surface operators ``box``, ``dia``
and ``boxdot`` never appear in the tree; they are rewritten into the graded
operators as soon as a formula is built::

    >>> parse("box p")
    AtMost(count=0, body=Not(arg=Letter(name='p')))
    >>> render(parse("q0 & dia>=2 (q1 & ~q0)"))
    'q0 & dia>=2 (q1 & ~q0)'
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

IDENTIFIER = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
KEYWORDS = frozenset({"dia", "box", "boxdot", "true", "false"})


class Formula:
    """Base class of all formula nodes.

    The usual Python operators build formulas: ``~a``, ``a & b`` and ``a | b``.
    """

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def implies(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __str__(self) -> str:
        return render(self)


def _node(cls):
    # Frozen dataclass whose hash is computed once; large formulas are used
    # as dictionary keys all over the package.
    cls = dataclass(frozen=True, eq=False)(cls)
    init = cls.__init__

    def __init__(self, *args, **kwargs):
        init(self, *args, **kwargs)
        object.__setattr__(self, "_hash", hash((cls.__name__,) + self._key()))

    def __eq__(self, other):
        if self is other:
            return True
        if other.__class__ is not self.__class__ or other._hash != self._hash:
            return False
        return self._key() == other._key()

    cls.__init__ = __init__
    cls.__eq__ = __eq__
    cls.__hash__ = lambda self: self._hash
    return cls


@_node
class Letter(Formula):
    name: str
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self):
        if not isinstance(self.name, str) or not IDENTIFIER.match(self.name):
            raise ValueError(f"invalid proposition letter {self.name!r}")
        if self.name in KEYWORDS:
            raise ValueError(f"{self.name!r} is a reserved word")

    def _key(self):
        return (self.name,)


@_node
class Top(Formula):
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def _key(self):
        return ()


@_node
class Bottom(Formula):
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def _key(self):
        return ()


@_node
class Not(Formula):
    arg: Formula
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def _key(self):
        return (self.arg,)


class _Binary(Formula):
    __slots__ = ()

    def _key(self):
        return (self.left, self.right)


@_node
class And(_Binary):
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False, compare=False, default=0)


@_node
class Or(_Binary):
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False, compare=False, default=0)


@_node
class Implies(_Binary):
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False, compare=False, default=0)


@_node
class Iff(_Binary):
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False, compare=False, default=0)


class _Graded(Formula):
    __slots__ = ()

    def __post_init__(self):
        if not isinstance(self.count, int) or isinstance(self.count, bool) or self.count < 0:
            raise ValueError(f"subscript must be a natural number, got {self.count!r}")

    def _key(self):
        return (self.count, self.body)


@_node
class AtLeast(_Graded):
    """At least ``count`` successors satisfy ``body``."""

    count: int
    body: Formula
    _hash: int = field(init=False, repr=False, compare=False, default=0)


@_node
class AtMost(_Graded):
    """At most ``count`` successors satisfy ``body``."""

    count: int
    body: Formula
    _hash: int = field(init=False, repr=False, compare=False, default=0)


TRUE = Top()
FALSE = Bottom()


# -- derived constructors ----------------------------------------------------

def box(f: Formula) -> Formula:
    return AtMost(0, Not(f))


def dia(f: Formula) -> Formula:
    return AtLeast(1, f)


def boxdot(f: Formula) -> Formula:
    return And(f, box(f))


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is ``true``."""
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[-1]
    for f in reversed(parts[:-1]):
        out = And(f, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is ``false``."""
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[-1]
    for f in reversed(parts[:-1]):
        out = Or(f, out)
    return out


def letter(name: str) -> Letter:
    return Letter(name)


# -- traversal ----------------------------------------------------------------

def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, _Binary):
        return (f.left, f.right)
    if isinstance(f, _Graded):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Yield every subformula occurrence in post-order (left to right)."""
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if done:
            yield g
            continue
        stack.append((g, True))
        for c in reversed(children(g)):
            stack.append((c, False))


def letters(f: Formula) -> frozenset:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Letter))


def is_graded(f: Formula) -> bool:
    return isinstance(f, _Graded)


def is_propositional(f: Formula) -> bool:
    return not any(is_graded(g) for g in subformulas(f))


def modal_depth(f: Formula) -> int:
    depth = {}
    for g in subformulas(f):
        below = max((depth[c] for c in children(g)), default=0)
        depth[g] = below + 1 if is_graded(g) else below
    return depth[f]


def subscripts(f: Formula) -> list:
    """All graded subscripts, in post-order."""
    return [g.count for g in subformulas(f) if is_graded(g)]


def size(f: Formula) -> int:
    """Symbol count with binary subscripts.

    Every node counts once; a subscript C adds floor(log2 C) + 1 symbols
    (one symbol for C = 0).
    """
    total = 0
    for g in subformulas(f):
        total += 1
        if is_graded(g):
            total += max(1, g.count.bit_length())
    return total


def fresh_letters(n: int, avoid: Iterable[str] = (), prefix: str = "p_") -> list:
    """Return ``n`` distinct letters ``prefix0, prefix1, ...`` not in ``avoid``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    avoid = set(avoid)
    out = []
    k = 0
    while len(out) < n:
        name = f"{prefix}{k}"
        if name not in avoid:
            out.append(name)
        k += 1
    return out


# -- parsing ------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<graded>dia\s*(?P<op>>=|<=)\s*(?P<num>-?[0-9]+))
  | (?P<sym><->|->|[~&|()])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


def _tokenize(text: str):
    pos = 0
    line, line_start = 1, 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        if m.group("graded"):
            kind = "graded"
            num = m.group("num")
            if num.startswith("-"):
                raise ParseError(f"negative subscript {num}", line, col)
            value = (m.group("op"), int(num))
        elif m.group("sym"):
            kind, value = "sym", m.group("sym")
        elif m.group("ident"):
            kind, value = "ident", m.group("ident")
        else:
            kind, value = "ws", None
        if kind != "ws":
            tokens.append((kind, value, line, col))
        chunk = m.group(0)
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(("eof", None, line, pos - line_start + 1))
    return tokens


_BINARY = {"<->": (1, Iff), "->": (2, Implies), "|": (3, Or), "&": (4, And)}
_PREFIX_WORDS = {"dia": dia, "box": box, "boxdot": boxdot}


def _error(message, tok):
    return ParseError(message, tok[2], tok[3])


def _apply_prefix(ops, f):
    while ops and ops[-1][0] == "prefix":
        f = ops.pop()[1](f)
    return f


def _reduce(ops, vals):
    _, (_, cls), _ = ops.pop()
    right = vals.pop()
    vals.append(cls(vals.pop(), right))


def parse(text: str) -> Formula:
    """Parse a formula written in the ASCII grammar.

    Raises :class:`ParseError` carrying the line and column of the problem.
    """
    # operator precedence with explicit stacks, so nesting depth is unbounded
    ops, vals = [], []
    operand = True
    for tok in _tokenize(text):
        kind, value = tok[0], tok[1]
        if operand:
            if kind == "sym" and value == "~":
                ops.append(("prefix", Not, tok))
            elif kind == "graded":
                op, count = value
                ops.append(("prefix", (lambda b, c=count: AtLeast(c, b)) if op == ">=" else (lambda b, c=count: AtMost(c, b)), tok))
            elif kind == "ident" and value in _PREFIX_WORDS:
                ops.append(("prefix", _PREFIX_WORDS[value], tok))
            elif kind == "sym" and value == "(":
                ops.append(("open", None, tok))
            elif kind == "ident":
                if value == "true":
                    f = TRUE
                elif value == "false":
                    f = FALSE
                elif not IDENTIFIER.match(value):
                    raise _error(f"invalid letter name {value!r}", tok)
                else:
                    f = Letter(value)
                vals.append(_apply_prefix(ops, f))
                operand = False
            elif kind == "eof":
                raise _error("unexpected end of input", tok)
            else:
                raise _error(f"unexpected token {value!r}", tok)
            continue
        if kind == "sym" and value in _BINARY:
            prec, cls = _BINARY[value]
            while ops and ops[-1][0] == "binary":
                top = ops[-1][1][0]
                if top > prec or (top == prec and cls is not Implies):
                    _reduce(ops, vals)
                else:
                    break
            ops.append(("binary", (prec, cls), tok))
            operand = True
            continue
        while ops and ops[-1][0] == "binary":
            _reduce(ops, vals)
        is_open = bool(ops) and ops[-1][0] == "open"
        if kind == "sym" and value == ")" and is_open:
            ops.pop()
            vals.append(_apply_prefix(ops, vals.pop()))
        elif is_open:
            raise _error("expected ')'", tok)
        elif kind == "eof":
            return vals.pop()
        else:
            raise _error(f"unexpected token {value!r}", tok)
    raise AssertionError("unreachable")


# -- printing -----------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_UNARY = 5


def _prec(f):
    if isinstance(f, _Binary):
        return _PREC[type(f)]
    if isinstance(f, (Not, _Graded)):
        return _UNARY
    return 6


def render(f: Formula) -> str:
    """Print ``f`` in the parser's grammar with minimal parentheses."""
    out = []
    # explicit stack so that very deep formulas do not hit the recursion limit
    stack = [(f, 0)]
    while stack:
        g, need = stack.pop()
        if isinstance(g, str):
            out.append(g)
            continue
        paren = _prec(g) < need
        if paren:
            stack.append((")", 0))
        if isinstance(g, _Binary):
            p = _prec(g)
            # and/or/iff are left-nested, implication is right-nested
            left_need, right_need = (p + 1, p) if isinstance(g, Implies) else (p, p + 1)
            stack.append((g.right, right_need))
            stack.append((f" {_SYMBOL[type(g)]} ", 0))
            stack.append((g.left, left_need))
        elif isinstance(g, Not):
            stack.append((g.arg, _UNARY))
            stack.append(("~", 0))
        elif isinstance(g, _Graded):
            op = ">=" if isinstance(g, AtLeast) else "<="
            stack.append((g.body, _UNARY))
            stack.append((f"dia{op}{g.count} ", 0))
        elif isinstance(g, Letter):
            stack.append((g.name, 0))
        elif isinstance(g, Top):
            stack.append(("true", 0))
        else:
            stack.append(("false", 0))
        if paren:
            stack.append(("(", 0))
    return "".join(out)

"""A small expression language for distributions.

Grammar::

    expr  := ident '(' [arg {',' arg}] ')'
    arg   := number | ident | expr | pair | number ':' expr
    pair  := '(' number ',' number ')'

Families: ``pareto(a)``, ``frechet(a)``, ``lomax(a)``, ``logcauchy()``,
``cauchy()``, ``uniform(a, b)``, ``point(c)``, ``piecewise_eta((t, e), ...)``
and ``paper(NAME[, param])``.  Transforms take a distribution as first
argument: ``powcdf``, ``powsurv``, ``scale``, ``shift``, ``maxof``,
``excess``, ``excess_rand``, ``cond``, ``trunc``, ``convexmap``,
``mixture(w:expr, ...)``, ``sum2``, ``compound_binomial(m, p, expr)`` and
``compound_poisson(lam, expr)``.  Maps for ``convexmap`` are ``pow(p)``,
``add(c)``, ``mul(k)``, ``exp()`` and ``poly((x, y), ...)``.

``format_expr(parse(s)) == s`` whenever ``s`` is canonical, that is, numbers
printed by :func:`~htd.distributions.format_number` and arguments separated
by ``", "``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

from .distributions import (
    EXAMPLE_NAMES,
    Distribution,
    format_number,
    make_cauchy_std,
    make_example,
    make_frechet,
    make_logcauchy,
    make_lomax,
    make_pareto,
    make_piecewise_eta,
    make_point_mass,
    make_uniform,
)
from .errors import HTDError, ParseError

# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float
    offset: int = -1

    def __eq__(self, other):
        return isinstance(other, Num) and self.value == other.value

    def __hash__(self):
        return hash(self.value)


@dataclass(frozen=True)
class Ident:
    name: str
    offset: int = -1

    def __eq__(self, other):
        return isinstance(other, Ident) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


@dataclass(frozen=True)
class Pair:
    first: Num
    second: Num
    offset: int = -1

    def __eq__(self, other):
        return isinstance(other, Pair) and (self.first, self.second) == (other.first, other.second)

    def __hash__(self):
        return hash((self.first, self.second))


@dataclass(frozen=True)
class Weighted:
    weight: Num
    expr: "Node"
    offset: int = -1

    def __eq__(self, other):
        return isinstance(other, Weighted) and (self.weight, self.expr) == (other.weight, other.expr)

    def __hash__(self):
        return hash((self.weight, self.expr))


Arg = Union[Num, Ident, Pair, Weighted, "Node"]


@dataclass(frozen=True)
class Node:
    """A call ``name(args)``; ``kind`` is FAMILY, TRANSFORM or MAP."""

    kind: str
    name: str
    args: tuple
    offset: int = -1

    @property
    def children(self) -> tuple["Node", ...]:
        out = []
        for a in self.args:
            if isinstance(a, Node):
                out.append(a)
            elif isinstance(a, Weighted):
                out.append(a.expr)
        return tuple(out)

    @property
    def params(self) -> tuple:
        """Scalar and pair arguments as plain Python values."""
        out = []
        for a in self.args:
            if isinstance(a, Num):
                out.append(a.value)
            elif isinstance(a, Ident):
                out.append(a.name)
            elif isinstance(a, Pair):
                out.append((a.first.value, a.second.value))
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, Node) and (self.kind, self.name, self.args) == (other.kind, other.name, other.args)

    def __hash__(self):
        return hash((self.kind, self.name, self.args))

    def __str__(self) -> str:
        return format_expr(self)


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------

# argument slots: "D" distribution, "M" map, "N" number, "I" identifier,
# "P*" one or more pairs, "W*" one or more weighted distributions
_Check = Callable[[float], bool]


@dataclass(frozen=True)
class _Sig:
    kind: str
    slots: tuple[str, ...]
    checks: tuple[tuple[_Check, str] | None, ...] = ()
    optional: int = 0  # trailing slots that may be omitted


_pos = (lambda v: v > 0, "must be positive")
_any = (lambda v: v == v and abs(v) != float("inf"), "must be finite")
_unit_open = (lambda v: 0 < v < 1, "must lie in (0, 1)")
_unit_closed = (lambda v: 0 <= v <= 1, "must lie in [0, 1]")
_ge1 = (lambda v: v >= 1, "must be at least 1")
_count = (lambda v: v >= 1 and float(v).is_integer(), "must be an integer >= 1")

SIGNATURES: dict[str, _Sig] = {
    "pareto": _Sig("FAMILY", ("N",), (_pos,)),
    "frechet": _Sig("FAMILY", ("N",), (_pos,)),
    "lomax": _Sig("FAMILY", ("N",), (_pos,)),
    "logcauchy": _Sig("FAMILY", ()),
    "cauchy": _Sig("FAMILY", ()),
    "uniform": _Sig("FAMILY", ("N", "N"), (_any, _any)),
    "point": _Sig("FAMILY", ("N",), (_any,)),
    "piecewise_eta": _Sig("FAMILY", ("P*",)),
    "paper": _Sig("FAMILY", ("I", "N"), (None, _pos), optional=1),
    "powcdf": _Sig("TRANSFORM", ("D", "N"), (None, _pos)),
    "powsurv": _Sig("TRANSFORM", ("D", "N"), (None, _unit_open)),
    "scale": _Sig("TRANSFORM", ("D", "N"), (None, _pos)),
    "shift": _Sig("TRANSFORM", ("D", "N"), (None, _any)),
    "maxof": _Sig("TRANSFORM", ("D", "D")),
    "excess": _Sig("TRANSFORM", ("D", "N"), (None, _pos)),
    "excess_rand": _Sig("TRANSFORM", ("D", "D")),
    "cond": _Sig("TRANSFORM", ("D", "N"), (None, _any)),
    "trunc": _Sig("TRANSFORM", ("D", "N"), (None, _pos)),
    "convexmap": _Sig("TRANSFORM", ("D", "M")),
    "mixture": _Sig("TRANSFORM", ("W*",)),
    "sum2": _Sig("TRANSFORM", ("D",)),
    "compound_binomial": _Sig("TRANSFORM", ("N", "N", "D"), (_count, _unit_closed, None)),
    "compound_poisson": _Sig("TRANSFORM", ("N", "D"), (_pos, None)),
    "pow": _Sig("MAP", ("N",), (_ge1,)),
    "add": _Sig("MAP", ("N",), (_any,)),
    "mul": _Sig("MAP", ("N",), (_pos,)),
    "exp": _Sig("MAP", ()),
    "poly": _Sig("MAP", ("P*",)),
}

FAMILIES = tuple(k for k, s in SIGNATURES.items() if s.kind == "FAMILY")
TRANSFORMS = tuple(k for k, s in SIGNATURES.items() if s.kind == "TRANSFORM")
MAPS = tuple(k for k, s in SIGNATURES.items() if s.kind == "MAP")
_DIST_NAMES = FAMILIES + TRANSFORMS

# ---------------------------------------------------------------------------
# Tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf\b)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),:]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, ident, punct, end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError("SYNTAX", f"unexpected character {text[pos]!r}", pos, ("number", "identifier", "(", ")", ",", ":"))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def expect(self, text: str) -> _Tok:
        t = self.tok
        if t.kind != "punct" or t.text != text:
            got = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError("SYNTAX", f"expected {text!r}, got {got}", t.offset, (text,))
        self.i += 1
        return t

    def number(self) -> Num:
        t = self.tok
        if t.kind != "num":
            got = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError("SYNTAX", f"expected a number, got {got}", t.offset, ("number",))
        self.i += 1
        return Num(float(t.text), t.offset)

    def pair(self) -> Pair:
        start = self.expect("(").offset
        a = self.number()
        self.expect(",")
        b = self.number()
        self.expect(")")
        return Pair(a, b, start)

    def call(self, allowed: tuple[str, ...]) -> Node:
        t = self.tok
        if t.kind != "ident":
            got = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError("SYNTAX", f"expected a name, got {got}", t.offset, ("identifier",))
        name = t.text
        if name not in SIGNATURES:
            raise ParseError("UNKNOWN_NAME", f"unknown name {name!r}", t.offset, allowed)
        sig = SIGNATURES[name]
        if name not in allowed:
            want = "a map" if allowed == MAPS else "a distribution"
            raise ParseError("SYNTAX", f"{name!r} is not {want}", t.offset, allowed)
        self.i += 1
        self.expect("(")
        args = []
        if not (self.tok.kind == "punct" and self.tok.text == ")"):
            while True:
                args.append(self.arg(sig, len(args), name))
                if self.tok.kind == "punct" and self.tok.text == ",":
                    self.i += 1
                    continue
                break
        close = self.tok
        self.expect(")")
        self._check_arity(name, sig, args, t.offset, close.offset)
        return Node(sig.kind, name, tuple(args), t.offset)

    def _slot(self, sig: _Sig, k: int) -> str | None:
        if sig.slots and sig.slots[-1].endswith("*") and k >= len(sig.slots) - 1:
            return sig.slots[-1]
        return sig.slots[k] if k < len(sig.slots) else None

    def arg(self, sig: _Sig, k: int, name: str):
        slot = self._slot(sig, k)
        t = self.tok
        if slot is None:
            raise ParseError("ARITY", f"{name} takes at most {len(sig.slots)} argument(s)", t.offset, (")",))
        if slot == "N":
            num = self.number()
            check = sig.checks[k] if k < len(sig.checks) else None
            if check is not None and not check[0](num.value):
                raise ParseError("PARAM_RANGE", f"argument {k + 1} of {name} {check[1]}", num.offset, ())
            return num
        if slot == "I":
            if t.kind != "ident":
                raise ParseError("SYNTAX", "expected a name", t.offset, ("identifier",))
            if name == "paper" and t.text.upper() not in EXAMPLE_NAMES:
                raise ParseError("UNKNOWN_NAME", f"unknown example {t.text!r}", t.offset, EXAMPLE_NAMES)
            self.i += 1
            return Ident(t.text, t.offset)
        if slot == "P*":
            return self.pair()
        if slot == "W*":
            w = self.number()
            if not 0 <= w.value <= 1:
                raise ParseError("PARAM_RANGE", "mixture weights must lie in [0, 1]", w.offset, ())
            self.expect(":")
            return Weighted(w, self.call(_DIST_NAMES), w.offset)
        if slot == "M":
            return self.call(MAPS)
        return self.call(_DIST_NAMES)

    def _check_arity(self, name, sig, args, offset, close):
        fixed = [s for s in sig.slots if not s.endswith("*")]
        star = any(s.endswith("*") for s in sig.slots)
        lo = len(fixed) - sig.optional + (1 if star else 0)
        if len(args) < lo:
            raise ParseError("ARITY", f"{name} needs at least {lo} argument(s), got {len(args)}", close, ())

    def parse(self) -> Node:
        node = self.call(_DIST_NAMES)
        if self.tok.kind != "end":
            raise ParseError("SYNTAX", f"unexpected {self.tok.text!r} after expression", self.tok.offset, ("end of input",))
        return node


def parse(text: str) -> Node:
    """Parse an expression; errors carry the character offset and expected tokens."""
    return _Parser(text).parse()


def format_expr(node) -> str:
    """Canonical text of an AST."""
    if isinstance(node, Num):
        return format_number(node.value)
    if isinstance(node, Ident):
        return node.name
    if isinstance(node, Pair):
        return f"({format_number(node.first.value)}, {format_number(node.second.value)})"
    if isinstance(node, Weighted):
        return f"{format_number(node.weight.value)}:{format_expr(node.expr)}"
    return f"{node.name}({', '.join(format_expr(a) for a in node.args)})"


# ---------------------------------------------------------------------------
# Building
# ---------------------------------------------------------------------------


def _build_map(node: Node):
    from .transforms import ConvexMap

    p = node.params
    if node.name == "pow":
        return ConvexMap.power(p[0])
    if node.name == "add":
        return ConvexMap.shift(p[0])
    if node.name == "mul":
        return ConvexMap.scale(p[0])
    if node.name == "exp":
        return ConvexMap.exp()
    return ConvexMap.polyline(p)


def _build(node: Node, path: str) -> Distribution:
    from . import compound as cp
    from . import transforms as tr

    here = f"{path} > {node.name}" if path else node.name
    try:
        p = node.params
        kids = node.children
        sub = lambda i: _build(kids[i], f"{here}[{i}]")
        n = node.name
        if n == "pareto":
            return make_pareto(p[0])
        if n == "frechet":
            return make_frechet(p[0])
        if n == "lomax":
            return make_lomax(p[0])
        if n == "logcauchy":
            return make_logcauchy()
        if n == "cauchy":
            return make_cauchy_std()
        if n == "uniform":
            return make_uniform(p[0], p[1])
        if n == "point":
            return make_point_mass(p[0])
        if n == "piecewise_eta":
            return make_piecewise_eta(p)
        if n == "paper":
            return make_example(p[0], p[1] if len(p) > 1 else None)
        if n == "powcdf":
            return tr.pow_cdf(sub(0), p[0])
        if n == "powsurv":
            return tr.pow_survival(sub(0), p[0])
        if n == "scale":
            return tr.convex_map(sub(0), tr.ConvexMap.scale(p[0]))
        if n == "shift":
            return tr.convex_map(sub(0), tr.ConvexMap.shift(p[0]))
        if n == "maxof":
            return tr.max_of(sub(0), sub(1))
        if n == "excess":
            return tr.excess(sub(0), p[0])
        if n == "excess_rand":
            return tr.excess_random(sub(0), sub(1))
        if n == "cond":
            return tr.condition_exceed(sub(0), p[0])
        if n == "trunc":
            return tr.truncate_upper(sub(0), p[0])
        if n == "convexmap":
            return tr.convex_map(sub(0), _build_map(node.args[1]))
        if n == "mixture":
            ws = [a.weight.value for a in node.args]
            return tr.mixture(ws, [sub(i) for i in range(len(kids))])
        if n == "sum2":
            return tr.sum_iid_closed(sub(0), 2)
        if n == "compound_binomial":
            return cp.compound_binomial(int(p[0]), p[1], sub(0))
        if n == "compound_poisson":
            return cp.compound_poisson(p[0], sub(0))
    except ParseError:
        raise
    except HTDError as exc:
        if exc.message.startswith("at "):
            raise
        raise HTDError(exc.code, f"at {here}: {exc.message}") from exc
    raise HTDError("UNKNOWN_NAME", f"{node.name!r} is not a distribution")


def build(expr: Node | str) -> Distribution:
    """Construct the distribution described by an AST or expression text."""
    node = parse(expr) if isinstance(expr, str) else expr
    if node.kind == "MAP":
        raise HTDError("UNKNOWN_NAME", f"{node.name!r} is a map, not a distribution")
    return _build(node, "")


def canonical(text: str) -> str:
    """Canonical form of an expression."""
    return format_expr(parse(text))

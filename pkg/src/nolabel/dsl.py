"""Bra-ket text format for pair states.

A state text has semicolon-separated sections: statistics, basis, optional
observable names, optional parameter defaults, then the state expression::

    fermion; basis L:up,L:dn,R:up,R:dn; obs site,spin;
    params a=0.6, b=0.8; a*|L:up,R:dn> + b*|L:dn,R:up>

Coefficients are arithmetic over numbers, ``pi``, the imaginary unit ``i``,
declared or free parameters, and cos/sin/tan/exp/sqrt. Purely numeric
subexpressions fold at parse time; parameters are bound when the state is
built. Parsing and serialization round-trip exactly.
"""
from __future__ import annotations

import cmath
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .algebra import Basis, BasisLabel, Statistics, TwoParticleState
from .errors import DegenerateStateError, ParseError, PauliViolationError

FUNCTIONS = {"cos": cmath.cos, "sin": cmath.sin, "tan": cmath.tan,
             "exp": cmath.exp, "sqrt": cmath.sqrt}
CONSTANTS = {"pi": complex(cmath.pi), "i": 1j}
KEYWORDS = {"boson", "fermion", "basis", "obs", "params"}

_POS0 = (0, 0)


# ---------------------------------------------------------------------------
# coefficient syntax tree

@dataclass(frozen=True)
class Num:
    value: complex
    pos: tuple[int, int] = field(default=_POS0, compare=False, repr=False)


@dataclass(frozen=True)
class ParamRef:
    name: str
    pos: tuple[int, int] = field(default=_POS0, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"
    pos: tuple[int, int] = field(default=_POS0, compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: tuple[int, int] = field(default=_POS0, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    pos: tuple[int, int] = field(default=_POS0, compare=False, repr=False)


Node = Num | ParamRef | Call | Neg | BinOp


def fold(node: Node) -> Node:
    """Collapse parameter-free subtrees into Num nodes."""
    if isinstance(node, (Num, ParamRef)):
        return node
    if isinstance(node, Neg):
        inner = fold(node.operand)
        if isinstance(inner, Num):
            return Num(-inner.value, node.pos)
        return Neg(inner, node.pos)
    if isinstance(node, Call):
        arg = fold(node.arg)
        if isinstance(arg, Num):
            return Num(_apply(node.fn, arg.value, node.pos), node.pos)
        return Call(node.fn, arg, node.pos)
    left, right = fold(node.left), fold(node.right)
    if isinstance(left, Num) and isinstance(right, Num):
        return Num(_combine(node.op, left.value, right.value, node.pos),
                   node.pos)
    return BinOp(node.op, left, right, node.pos)


def _apply(fn: str, value: complex, pos: tuple[int, int]) -> complex:
    try:
        return complex(FUNCTIONS[fn](value))
    except (ValueError, OverflowError) as exc:
        raise ParseError(f"cannot evaluate {fn}: {exc}", *pos,
                         code="E_BAD_COEFFICIENT") from None


def _combine(op: str, a: complex, b: complex, pos: tuple[int, int]) -> complex:
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b
        return a ** b
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise ParseError(f"cannot evaluate coefficient: {exc}", *pos,
                         code="E_BAD_COEFFICIENT") from None


def evaluate(node: Node, env: dict[str, float]) -> complex:
    """Evaluate a coefficient tree with parameter values bound."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, ParamRef):
        try:
            return complex(env[node.name])
        except KeyError:
            raise ParseError(f"parameter {node.name!r} has no value",
                             *node.pos, code="E_UNBOUND_PARAMETER") from None
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Call):
        return _apply(node.fn, evaluate(node.arg, env), node.pos)
    return _combine(node.op, evaluate(node.left, env),
                    evaluate(node.right, env), node.pos)


def param_names(node: Node) -> set[str]:
    if isinstance(node, ParamRef):
        return {node.name}
    if isinstance(node, Neg):
        return param_names(node.operand)
    if isinstance(node, Call):
        return param_names(node.arg)
    if isinstance(node, BinOp):
        return param_names(node.left) | param_names(node.right)
    return set()


# ---------------------------------------------------------------------------
# tokenizer

_SYMBOLS = {";", ",", ":", "|", ">", "(", ")", "+", "-", "*", "/", "^", "="}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER SYMBOL END
    text: str
    line: int
    column: int

    @property
    def pos(self) -> tuple[int, int]:
        return (self.line, self.column)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    k = 0
    while k < len(text):
        ch = text[k]
        if ch == "\n":
            line += 1
            col = 1
            k += 1
            continue
        if ch.isspace():
            col += 1
            k += 1
            continue
        start_line, start_col = line, col
        if ch.isdigit() or (ch == "." and k + 1 < len(text)
                            and text[k + 1].isdigit()):
            j = k
            seen_dot = seen_exp = False
            while j < len(text):
                c = text[j]
                if c.isdigit():
                    j += 1
                elif c == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif c in "eE" and not seen_exp and j + 1 < len(text) and (
                        text[j + 1].isdigit()
                        or (text[j + 1] in "+-" and j + 2 < len(text)
                            and text[j + 2].isdigit())):
                    seen_exp = True
                    j += 2 if text[j + 1] in "+-" else 1
                else:
                    break
            tokens.append(Token("NUMBER", text[k:j], start_line, start_col))
            col += j - k
            k = j
            continue
        if ch.isalpha() or ch == "_":
            j = k
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[k:j], start_line, start_col))
            col += j - k
            k = j
            continue
        if ch == "*" and k + 1 < len(text) and text[k + 1] == "*":
            tokens.append(Token("SYMBOL", "^", start_line, start_col))
            col += 2
            k += 2
            continue
        if ch in _SYMBOLS:
            tokens.append(Token("SYMBOL", ch, start_line, start_col))
            col += 1
            k += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("END", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# spec model

@dataclass(frozen=True)
class Term:
    """One additive contribution: coefficient times a two-particle ket."""

    coeff: Node
    left: BasisLabel
    right: BasisLabel
    pos: tuple[int, int] = field(default=_POS0, compare=False, repr=False)


@dataclass(frozen=True)
class StateSpec:
    """Parsed state text: statistics, basis, names, defaults, expression."""

    statistics: Statistics
    basis: Basis
    observables: tuple[str, ...] | None
    params: tuple[tuple[str, float], ...]
    terms: tuple[Term, ...]

    @property
    def declared_params(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def referenced_params(self) -> set[str]:
        names: set[str] = set()
        for term in self.terms:
            names |= param_names(term.coeff)
        return names

    def observable_index(self, name: str) -> int:
        """Resolve an observable by declared name or numeric position."""
        if self.observables and name in self.observables:
            return self.observables.index(name)
        if name.isdigit() and int(name) < self.basis.arity:
            return int(name)
        raise ParseError(f"unknown observable {name!r}", 1, 1,
                         code="E_UNKNOWN_OBSERVABLE")

    def to_text(self) -> str:
        """Canonical one-line rendering; parsing it back gives an equal spec."""
        chunks = [self.statistics.name,
                  "basis " + ",".join(str(l) for l in self.basis.labels)]
        if self.observables:
            chunks.append("obs " + ",".join(self.observables))
        if self.params:
            chunks.append("params " + ", ".join(
                f"{n}={_fmt_float(v)}" for n, v in self.params))
        chunks.append(_render_terms(self.terms))
        return "; ".join(chunks)


def with_param_defaults(spec: StateSpec,
                        overrides: dict[str, float] | None) -> StateSpec:
    """Return a spec whose parameter defaults include the given overrides.

    Useful before a sweep: the swept parameter varies per grid point while
    every other override becomes a baked-in default. Overriding a name the
    expression never references is rejected.
    """
    if not overrides:
        return spec
    declared = dict(spec.params)
    for name in overrides:
        if name not in declared and name not in spec.referenced_params:
            raise ParseError(f"parameter {name!r} does not occur in the state",
                             1, 1, code="E_UNKNOWN_PARAM")
    merged = dict(declared)
    merged.update({k: float(v) for k, v in overrides.items()})
    extra = sorted(k for k in overrides if k not in declared)
    names = [n for n, _ in spec.params] + extra
    return dataclasses.replace(
        spec, params=tuple((n, merged[n]) for n in names))


def build_state(spec: StateSpec,
                overrides: dict[str, float] | None = None) -> TwoParticleState:
    """Evaluate the expression into a coefficient-matrix state.

    ``overrides`` supply or replace parameter values; every referenced
    parameter must end up bound. The result may be unnormalized and must be
    nonzero after symmetry reduction.
    """
    env = dict(spec.params)
    for name, value in (overrides or {}).items():
        if name not in env and name not in spec.referenced_params:
            raise ParseError(f"parameter {name!r} does not occur in the state",
                             1, 1, code="E_UNKNOWN_PARAM")
        env[name] = float(value)
    d = spec.basis.dim
    sign = spec.statistics.exchange_sign
    coeffs = np.zeros((d, d), dtype=np.complex128)
    for term in spec.terms:
        value = evaluate(term.coeff, env)
        a = spec.basis.index(term.left)
        b = spec.basis.index(term.right)
        coeffs[a, b] += value / 2.0
        coeffs[b, a] += sign * value / 2.0
    state = TwoParticleState(spec.statistics, spec.basis, coeffs)
    if state.is_zero():
        raise DegenerateStateError(
            "expression vanishes after symmetry reduction")
    return state


# ---------------------------------------------------------------------------
# parser

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.k = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.k]

    def advance(self) -> Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def fail(self, message: str, expected: tuple[str, ...] = (),
             code: str = "E_SYNTAX"):
        tok = self.current
        raise ParseError(message, tok.line, tok.column, expected, code)

    def accept_symbol(self, text: str) -> bool:
        tok = self.current
        if tok.kind == "SYMBOL" and tok.text == text:
            self.k += 1
            return True
        return False

    def expect_symbol(self, text: str) -> Token:
        tok = self.current
        if tok.kind != "SYMBOL" or tok.text != text:
            self.fail(f"found {tok.text or 'end of input'!r}", (repr(text),))
        return self.advance()

    def expect_ident(self, what: str) -> Token:
        tok = self.current
        if tok.kind != "IDENT":
            self.fail(f"found {tok.text or 'end of input'!r}", (what,))
        return self.advance()

    # -- sections ------------------------------------------------------

    def parse_spec(self) -> StateSpec:
        stats_tok = self.expect_ident("'boson' or 'fermion'")
        if stats_tok.text not in ("boson", "fermion"):
            raise ParseError(f"unknown statistics {stats_tok.text!r}",
                             stats_tok.line, stats_tok.column,
                             ("boson", "fermion"))
        statistics = Statistics.from_name(stats_tok.text)
        self.expect_symbol(";")

        key = self.expect_ident("'basis'")
        if key.text != "basis":
            raise ParseError("state text must declare its basis next",
                             key.line, key.column, ("basis",))
        basis = self.parse_basis()
        self.expect_symbol(";")

        observables: tuple[str, ...] | None = None
        params: list[tuple[str, float]] = []
        while (self.current.kind == "IDENT"
               and self.current.text in ("obs", "params")):
            section = self.advance()
            if section.text == "obs":
                if observables is not None:
                    raise ParseError("duplicate obs section", section.line,
                                     section.column, code="E_DUPLICATE_OBS")
                observables = self.parse_observables(basis)
            else:
                if params:
                    raise ParseError("duplicate params section", section.line,
                                     section.column, code="E_DUPLICATE_PARAM")
                params = self.parse_params()
            self.expect_symbol(";")

        terms = self.parse_terms(statistics, basis)
        if self.current.kind != "END":
            self.fail(f"trailing input {self.current.text!r}",
                      ("end of input",))
        return StateSpec(statistics, basis, observables, tuple(params),
                         tuple(terms))

    def parse_basis(self) -> Basis:
        labels: list[BasisLabel] = []
        while True:
            labels.append(self.parse_label())
            if not self.accept_symbol(","):
                break
        if len({lab.arity for lab in labels}) != 1:
            self.fail("basis labels must all have the same number of parts",
                      code="E_BASIS_ARITY")
        if len(set(labels)) != len(labels):
            self.fail("basis labels must be distinct",
                      code="E_DUPLICATE_LABEL")
        return Basis(tuple(labels))

    def parse_label(self) -> BasisLabel:
        parts = [self.expect_ident("basis label").text]
        while self.accept_symbol(":"):
            parts.append(self.expect_ident("label part").text)
        return BasisLabel(tuple(parts))

    def parse_observables(self, basis: Basis) -> tuple[str, ...]:
        names = [self.expect_ident("observable name").text]
        while self.accept_symbol(","):
            names.append(self.expect_ident("observable name").text)
        if len(names) != basis.arity:
            self.fail(f"{len(names)} observable names for labels with "
                      f"{basis.arity} parts", code="E_OBS_ARITY")
        if len(set(names)) != len(names):
            self.fail("observable names must be distinct",
                      code="E_DUPLICATE_OBSERVABLE")
        return tuple(names)

    def parse_params(self) -> list[tuple[str, float]]:
        out: list[tuple[str, float]] = []
        while True:
            name_tok = self.expect_ident("parameter name")
            name = name_tok.text
            if name in FUNCTIONS or name in CONSTANTS or name in KEYWORDS:
                raise ParseError(f"{name!r} is reserved", name_tok.line,
                                 name_tok.column, code="E_RESERVED_NAME")
            if any(name == seen for seen, _ in out):
                raise ParseError(f"duplicate parameter {name!r}",
                                 name_tok.line, name_tok.column,
                                 code="E_DUPLICATE_PARAM")
            self.expect_symbol("=")
            node = fold(self.parse_scalar())
            if not isinstance(node, Num):
                raise ParseError("parameter defaults must be numeric",
                                 name_tok.line, name_tok.column,
                                 code="E_BAD_COEFFICIENT")
            if abs(node.value.imag) > 1e-15:
                raise ParseError("parameter defaults must be real",
                                 name_tok.line, name_tok.column,
                                 code="E_BAD_COEFFICIENT")
            out.append((name, float(node.value.real)))
            if not self.accept_symbol(","):
                return out

    # -- expression ----------------------------------------------------

    def parse_terms(self, statistics: Statistics, basis: Basis) -> list[Term]:
        negate = self.accept_symbol("-")
        if not negate:
            self.accept_symbol("+")
        terms = [self.parse_term(statistics, basis, negate=negate)]
        while self.current.kind == "SYMBOL" and self.current.text in "+-":
            negate = self.advance().text == "-"
            terms.append(self.parse_term(statistics, basis, negate=negate))
        return terms

    def parse_term(self, statistics: Statistics, basis: Basis, *,
                   negate: bool) -> Term:
        pos = self.current.pos
        coeff: Node | None = None
        ket: tuple[BasisLabel, BasisLabel] | None = None
        op = "*"
        while True:
            if self.current.kind == "SYMBOL" and self.current.text == "|":
                if ket is not None:
                    self.fail("a term may contain only one ket")
                if op == "/":
                    self.fail("cannot divide by a ket")
                ket = self.parse_ket(statistics, basis)
            else:
                factor = self.parse_unary()
                if coeff is None:
                    # a factor after "ket/" divides the ket's implicit 1
                    coeff = (factor if op == "*"
                             else BinOp("/", Num(1.0 + 0j, pos), factor, pos))
                else:
                    coeff = BinOp(op, coeff, factor, factor.pos)
            if self.current.kind == "SYMBOL" and self.current.text in "*/":
                op = self.advance().text
                continue
            break
        if ket is None:
            self.fail("term has no ket", ("|label,label>",),
                      code="E_MISSING_KET")
        if coeff is None:
            coeff = Num(1.0 + 0j, pos)
        if negate:
            coeff = Neg(coeff, pos)
        return Term(fold(coeff), ket[0], ket[1], pos)

    def parse_ket(self, statistics: Statistics,
                  basis: Basis) -> tuple[BasisLabel, BasisLabel]:
        self.expect_symbol("|")
        left = self.parse_known_label(basis)
        self.expect_symbol(",")
        right = self.parse_known_label(basis)
        self.expect_symbol(">")
        if statistics.exchange_sign == -1 and left == right:
            raise PauliViolationError(
                f"fermion ket |{left},{right}> places both particles in the "
                "same state")
        return left, right

    def parse_known_label(self, basis: Basis) -> BasisLabel:
        tok = self.current
        label = self.parse_label()
        if label not in basis.labels:
            raise ParseError(f"unknown basis label {label!s}", tok.line,
                             tok.column, code="E_UNKNOWN_LABEL")
        return label

    def parse_scalar(self) -> Node:
        node = self.parse_product()
        while self.current.kind == "SYMBOL" and self.current.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.parse_product(), node.pos)
        return node

    def parse_product(self) -> Node:
        node = self.parse_unary()
        while self.current.kind == "SYMBOL" and self.current.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.parse_unary(), node.pos)
        return node

    def parse_unary(self) -> Node:
        # Binds looser than "^", so -2^2 means -(2^2) as in ordinary math.
        tok = self.current
        if tok.kind == "SYMBOL" and tok.text == "-":
            self.advance()
            return Neg(self.parse_unary(), tok.pos)
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_atom()
        if self.current.kind == "SYMBOL" and self.current.text == "^":
            self.advance()
            # The exponent may itself be signed or another power (2^3^2
            # associates to the right).
            return BinOp("^", base, self.parse_unary(), base.pos)
        return base

    def parse_atom(self) -> Node:
        tok = self.current
        if tok.kind == "NUMBER":
            self.advance()
            return Num(complex(float(tok.text)), tok.pos)
        if tok.kind == "IDENT":
            self.advance()
            if self.current.kind == "SYMBOL" and self.current.text == "(":
                if tok.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {tok.text!r}",
                                     tok.line, tok.column,
                                     tuple(sorted(FUNCTIONS)),
                                     code="E_UNKNOWN_FUNCTION")
                self.advance()
                arg = self.parse_scalar()
                self.expect_symbol(")")
                return Call(tok.text, arg, tok.pos)
            if tok.text in CONSTANTS:
                return Num(CONSTANTS[tok.text], tok.pos)
            if tok.text in KEYWORDS:
                raise ParseError(f"{tok.text!r} is reserved", tok.line,
                                 tok.column, code="E_RESERVED_NAME")
            return ParamRef(tok.text, tok.pos)
        if tok.kind == "SYMBOL" and tok.text == "(":
            self.advance()
            node = self.parse_scalar()
            self.expect_symbol(")")
            return node
        self.fail(f"found {tok.text or 'end of input'!r}",
                  ("number", "parameter", "function", "'('"),
                  code="E_BAD_COEFFICIENT")


def parse_state(text: str) -> StateSpec:
    """Parse a state text; errors carry line, column, and an error code."""
    return _Parser(tokenize(text)).parse_spec()


def evaluate_scalar(text: str, env: dict[str, float] | None = None) -> complex:
    """Evaluate a standalone numeric expression like ``pi/2``."""
    parser = _Parser(tokenize(text))
    node = parser.parse_scalar()
    if parser.current.kind != "END":
        parser.fail(f"trailing input {parser.current.text!r}",
                    ("end of input",))
    return evaluate(node, env or {})


# ---------------------------------------------------------------------------
# rendering

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 3}


def _fmt_float(x: float) -> str:
    return repr(float(x))


def _fmt_complex(z: complex) -> str:
    re, im = z.real, z.imag
    if im == 0.0:
        return _fmt_float(re)
    if re == 0.0:
        if im == 1.0:
            return "i"
        if im == -1.0:
            return "-i"
        # parenthesized so the textual "*" cannot rebind to neighbors
        return f"({_fmt_float(im)}*i)"
    sign = "+" if im >= 0 else "-"
    mag = abs(im)
    im_text = "i" if mag == 1.0 else f"{_fmt_float(mag)}*i"
    return f"({_fmt_float(re)}{sign}{im_text})"


def _node_text(node: Node) -> tuple[str, int]:
    """Render a node, returning its text and effective precedence."""
    if isinstance(node, Num):
        text = _fmt_complex(node.value)
        return text, (2 if text.startswith("-") else 4)
    if isinstance(node, ParamRef):
        return node.name, 4
    if isinstance(node, Call):
        return f"{node.fn}({render_node(node.arg)})", 4
    if isinstance(node, Neg):
        return "-" + render_node(node.operand, 3), 2
    prec = _PRECEDENCE[node.op]
    if node.op == "^":
        left = render_node(node.left, prec + 1)
        right = render_node(node.right, prec)
    else:
        left = render_node(node.left, prec)
        right = render_node(node.right,
                            prec + 1 if node.op in ("-", "/") else prec)
    sep = f" {node.op} " if prec == 1 else node.op
    return f"{left}{sep}{right}", prec


def render_node(node: Node, min_prec: int = 0) -> str:
    text, prec = _node_text(node)
    return f"({text})" if prec < min_prec else text


def _render_terms(terms: tuple[Term, ...]) -> str:
    pieces: list[str] = []
    for term in terms:
        ket = f"|{term.left},{term.right}>"
        coeff = term.coeff
        # The leading sign may be hoisted to the "+"/"-" joining the terms
        # only when reparsing Neg(rest) folds back to exactly this tree:
        # plain negative numbers and explicit negations. A product whose
        # first factor happens to render negative keeps its sign inline.
        if isinstance(coeff, Num) and coeff.value == 1.0:
            negative, body = False, ket
        elif isinstance(coeff, Num) and coeff.value == -1.0:
            negative, body = True, ket
        elif isinstance(coeff, (Num, Neg)):
            text = render_node(coeff, 2)
            negative = text.startswith("-")
            if negative:
                text = text[1:]
            body = f"{text}*{ket}"
        else:
            negative = False
            text = render_node(coeff, 2)
            if text.startswith("-"):
                text = f"({text})"
            body = f"{text}*{ket}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)

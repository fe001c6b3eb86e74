"""Abstract syntax, parser and pretty-printer for concurrent pGCL.

Concrete syntax (binding strength ``;`` > ``||`` > ``+``/``+[p]``, all
left-associative, parentheses override)::

    file    := header program
    header  := ("var" ident ("," ident)* ";")?  |  "bits" nat "qubits" nat ";"
    program := par ( "+[" rational "]" par | "+" par )*
    par     := seq ( "||" seq )*
    seq     := unit ( ";" unit )*
    unit    := "skip" | atomic
             | "if" cond "then" "{" program "}" "else" "{" program "}"
             | "while" cond "{" program "}" | "(" program ")"

Classical atomics are ``x := e`` and ``x :~ {p1: e1, p2: e2, ...}`` (with
``x :~ coin(p)`` as sugar for ``{p: 1, 1-p: 0}``).  Quantum atomics are
``U(q1, ..., qk)``, ``qi <- |0>`` and ``M[xi <- qj]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Union

from .errors import ParseError, SourceSpan

# --------------------------------------------------------------------------
# Expressions and conditions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


Expr = Union[Const, Var, BinOp, Neg]


@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # one of = != < <= > >=
    left: Expr
    right: Expr


@dataclass(frozen=True)
class BitTest:
    """``x_bit = value`` on the classical register of a quantum program."""

    bit: int
    value: int


@dataclass(frozen=True)
class Not:
    operand: "Condition"


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"


Condition = Union[BoolConst, Cmp, BitTest, Not, And, Or]

TRUE = BoolConst(True)
FALSE = BoolConst(False)

# --------------------------------------------------------------------------
# Programs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


@dataclass(frozen=True)
class RandAssign:
    var: str
    branches: tuple  # tuple[(Fraction, Expr), ...]


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple  # 1-based qubit indices


@dataclass(frozen=True)
class Reset:
    qubit: int


@dataclass(frozen=True)
class Measure:
    bit: int
    qubit: int


ATOMIC_TYPES = (Assign, RandAssign, Gate, Reset, Measure)


# The binary nodes cache their hash: configurations are dict keys in every
# memo table and while-unrolling nests them deeply.
@dataclass(frozen=True)
class Seq:
    left: "Program"
    right: "Program"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __hash__(self):
        return _cached_hash(self, ("seq", self.left, self.right))


@dataclass(frozen=True)
class Par:
    left: "Program"
    right: "Program"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __hash__(self):
        return _cached_hash(self, ("par", self.left, self.right))


@dataclass(frozen=True)
class PChoice:
    prob: Fraction
    left: "Program"
    right: "Program"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.prob, Fraction):
            object.__setattr__(self, "prob", Fraction(self.prob))
        if not 0 <= self.prob <= 1:
            raise ValueError(f"probability {self.prob} outside [0, 1]")

    def __hash__(self):
        return _cached_hash(self, ("pchoice", self.prob, self.left, self.right))


@dataclass(frozen=True)
class NChoice:
    left: "Program"
    right: "Program"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __hash__(self):
        return _cached_hash(self, ("nchoice", self.left, self.right))


@dataclass(frozen=True)
class If:
    cond: Condition
    then: "Program"
    orelse: "Program"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __hash__(self):
        return _cached_hash(self, ("if", self.cond, self.then, self.orelse))


@dataclass(frozen=True)
class While:
    cond: Condition
    body: "Program"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __hash__(self):
        return _cached_hash(self, ("while", self.cond, self.body))


def _cached_hash(node, parts) -> int:
    h = node._hash
    if h == 0:
        h = hash(parts) or 1
        object.__setattr__(node, "_hash", h)
    return h


Program = Union[Skip, Assign, RandAssign, Gate, Reset, Measure,
                Seq, Par, PChoice, NChoice, If, While]


@dataclass(frozen=True)
class Header:
    """Declares the state space: integer variables, or bit/qubit counts."""

    kind: str = "classical"  # "classical" | "quantum"
    variables: tuple = ()
    bits: int = 0
    qubits: int = 0

    @classmethod
    def classical(cls, *names: str) -> "Header":
        return cls("classical", tuple(names))

    @classmethod
    def quantum(cls, bits: int, qubits: int) -> "Header":
        return cls("quantum", (), bits, qubits)


@dataclass(frozen=True)
class Source:
    header: Header
    program: Program


# Arity of the shipped gate library; the quantum backend owns the matrices.
DEFAULT_GATE_ARITY = {
    "I": 1, "X": 1, "Y": 1, "Z": 1, "H": 1, "S": 1, "T": 1,
    "CNOT": 2, "CZ": 2, "SWAP": 2,
}

# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*|//[^\n]*)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|0>|\|\||&&|:=|:~|<-|<=|>=|!=|\+\[|[=<>+\-*/;,(){}\[\]:!&|])
    """,
    re.VERBOSE,
)

KEYWORDS = frozenset(
    {"skip", "if", "then", "else", "while", "var", "bits", "qubits",
     "true", "false", "coin"}
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | op | eof
    text: str
    start: int  # character offsets
    end: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             byte_span(text, pos, pos + 1))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    tokens.append(Token("eof", "", n, n))
    return tokens


def byte_span(text: str, start: int, end: int) -> SourceSpan:
    b0 = len(text[:start].encode("utf-8", "surrogatepass"))
    b1 = b0 + len(text[start:end].encode("utf-8", "surrogatepass"))
    return SourceSpan(b0, b1)


def _decode(text) -> str:
    if isinstance(text, (bytes, bytearray)):
        try:
            return bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"invalid UTF-8: {e.reason}",
                             SourceSpan(e.start, e.end)) from None
    return text


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class Parser:
    """Recursive-descent parser; also reused by the formula parser."""

    def __init__(self, text: str, header: Header | None = None,
                 gate_arity: Mapping[str, int] | None = None):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.header = header
        self.gate_arity = dict(DEFAULT_GATE_ARITY if gate_arity is None
                               else gate_arity)

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind != "eof" and t.text == text

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.describe(self.tok)}")
        return self.advance()

    def error(self, message: str, token: Token | None = None):
        t = token or self.tok
        raise ParseError(message, byte_span(self.text, t.start, t.end))

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def expect_eof(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.describe(self.tok)}")

    # -- literals ---------------------------------------------------------

    def nat(self) -> int:
        t = self.tok
        if t.kind != "number" or "." in t.text:
            self.error(f"expected a natural number, found {self.describe(t)}")
        self.advance()
        return int(t.text)

    def rational(self) -> Fraction:
        t = self.tok
        if t.kind != "number":
            self.error(f"expected a rational, found {self.describe(t)}")
        self.advance()
        value = Fraction(t.text)
        if self.at("/") and self.peek().kind == "number":
            self.advance()
            d = self.tok
            if "." in d.text:
                self.error("denominator must be an integer", d)
            self.advance()
            if "." in t.text:
                self.error("numerator of a fraction must be an integer", t)
            if int(d.text) == 0:
                self.error("zero denominator", d)
            value = Fraction(int(t.text), int(d.text))
        return value

    def probability(self) -> Fraction:
        t = self.tok
        p = self.rational()
        if p > 1:
            self.error(f"probability {p} exceeds 1", t)
        return p

    # -- header -----------------------------------------------------------

    def parse_header(self) -> Header:
        if self.accept("var"):
            names = [self.ident_decl()]
            while self.accept(","):
                names.append(self.ident_decl())
            seen = set()
            for name in names:
                if name in seen:
                    self.error(f"variable {name!r} declared twice",
                               self.tokens[self.pos - 1])
                seen.add(name)
            self.expect(";")
            return Header.classical(*names)
        if self.accept("bits"):
            nbits = self.nat()
            self.expect("qubits")
            nqubits = self.nat()
            self.expect(";")
            return Header.quantum(nbits, nqubits)
        return Header()

    def ident_decl(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"expected an identifier, found {self.describe(t)}")
        self.advance()
        return t.text

    # -- programs ---------------------------------------------------------

    def program(self) -> Program:
        left = self.par()
        while True:
            if self.accept("+["):
                p = self.probability()
                self.expect("]")
                left = PChoice(p, left, self.par())
            elif self.accept("+"):
                left = NChoice(left, self.par())
            else:
                return left

    def par(self) -> Program:
        left = self.seq()
        while self.accept("||"):
            left = Par(left, self.seq())
        return left

    def seq(self) -> Program:
        left = self.unit()
        while self.accept(";"):
            left = Seq(left, self.unit())
        return left

    def unit(self) -> Program:
        t = self.tok
        if self.accept("skip"):
            return Skip()
        if self.accept("("):
            p = self.program()
            self.expect(")")
            return p
        if self.accept("if"):
            c = self.condition()
            self.expect("then")
            self.expect("{")
            then = self.program()
            self.expect("}")
            self.expect("else")
            self.expect("{")
            orelse = self.program()
            self.expect("}")
            return If(c, then, orelse)
        if self.accept("while"):
            c = self.condition()
            self.expect("{")
            body = self.program()
            self.expect("}")
            return While(c, body)
        if t.kind == "ident" and t.text not in KEYWORDS:
            if self.quantum:
                return self.quantum_atomic()
            return self.classical_atomic()
        self.error(f"expected a program, found {self.describe(t)}")

    @property
    def quantum(self) -> bool:
        return self.header is not None and self.header.kind == "quantum"

    def starts_statement(self, k: int) -> bool:
        """Whether the token ``k`` ahead begins a program rather than an operand."""
        t = self.peek(k)
        if t.kind == "ident" and t.text in ("skip", "if", "while"):
            return True
        return t.kind == "ident" and self.peek(k + 1).text in (":=", ":~")

    # -- classical atomics, expressions -----------------------------------

    def classical_atomic(self) -> Program:
        t = self.advance()
        self.check_var(t)
        if self.accept(":="):
            return Assign(t.text, self.expr())
        if self.accept(":~"):
            return RandAssign(t.text, self.distribution())
        self.error(f"expected ':=' or ':~' after {t.text!r}")

    def distribution(self) -> tuple:
        if self.accept("coin"):
            self.expect("(")
            p = self.probability()
            self.expect(")")
            branches = [(p, Const(1)), (1 - p, Const(0))]
            return tuple((w, e) for w, e in branches if w > 0)
        start = self.expect("{")
        branches = []
        while True:
            wt = self.tok
            w = self.probability()
            if w == 0:
                self.error("branch weights must be positive", wt)
            self.expect(":")
            branches.append((w, self.expr()))
            if not self.accept(","):
                break
        self.expect("}")
        if sum(w for w, _ in branches) != 1:
            self.error("branch weights must sum to 1", start)
        return tuple(branches)

    def check_var(self, t: Token):
        if self.header is None:
            return
        if t.text not in self.header.variables:
            self.error(f"unknown variable {t.text!r}", t)

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            if self.tok.text == "+" and self.starts_statement(1):
                break
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.advance().text
            left = BinOp(op, left, self.factor())
        return left

    def factor(self) -> Expr:
        t = self.tok
        if self.accept("-"):
            return Neg(self.factor())
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "number":
            if "." in t.text:
                self.error("integer expected", t)
            self.advance()
            return Const(int(t.text))
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            self.check_var(t)
            return Var(t.text)
        self.error(f"expected an expression, found {self.describe(t)}")

    # -- quantum atomics --------------------------------------------------

    def index(self, prefix: str, limit: int) -> int:
        t = self.tok
        m = re.fullmatch(prefix + r"([0-9]+)", t.text) if t.kind == "ident" else None
        if m is None:
            self.error(f"expected {prefix}<index>, found {self.describe(t)}")
        i = int(m.group(1))
        if not 1 <= i <= limit:
            what = "qubit" if prefix == "q" else "bit"
            self.error(f"{what} {t.text} out of range 1..{limit}")
        self.advance()
        return i

    def quantum_atomic(self) -> Program:
        h = self.header
        t = self.tok
        if t.text == "M" and self.peek().text == "[":
            self.advance()
            self.advance()
            bit = self.index("x", h.bits)
            self.expect("<-")
            qubit = self.index("q", h.qubits)
            self.expect("]")
            return Measure(bit, qubit)
        if self.peek().text == "<-":
            qubit = self.index("q", h.qubits)
            self.expect("<-")
            self.expect("|0>")
            return Reset(qubit)
        if self.peek().text == "(":
            self.advance()
            if t.text not in self.gate_arity:
                self.error(f"unknown atomic program {t.text!r}", t)
            self.advance()
            qubits = [self.index("q", h.qubits)]
            while self.accept(","):
                qubits.append(self.index("q", h.qubits))
            self.expect(")")
            if len(qubits) != self.gate_arity[t.text]:
                self.error(f"gate {t.text} takes {self.gate_arity[t.text]} "
                           f"qubit(s), got {len(qubits)}", t)
            if len(set(qubits)) != len(qubits):
                self.error(f"gate {t.text} applied to repeated qubits", t)
            return Gate(t.text, tuple(qubits))
        self.error(f"unknown atomic program {t.text!r}", t)

    # -- conditions -------------------------------------------------------

    def condition(self) -> Condition:
        left = self.cond_and()
        while self.accept("||"):
            left = Or(left, self.cond_and())
        return left

    def cond_and(self) -> Condition:
        left = self.cond_not()
        while self.accept("&&"):
            left = And(left, self.cond_not())
        return left

    def cond_not(self) -> Condition:
        if self.accept("!"):
            return Not(self.cond_not())
        return self.cond_atom()

    def cond_atom(self) -> Condition:
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.at("("):
            saved = self.pos
            self.advance()
            try:
                c = self.condition()
                self.expect(")")
                return c
            except ParseError:
                if self.quantum:
                    raise
                self.pos = saved  # an arithmetic operand such as "(x + 1) < 2"
        if self.quantum:
            return self.bit_test()
        return self.comparison()

    def comparison(self) -> Condition:
        left = self.expr()
        t = self.tok
        if t.text == "<-":  # "x<-1" lexes as "<-"; read it as "< -1"
            self.advance()
            return Cmp("<", left, Neg(self.factor()))
        if t.kind == "op" and t.text in ("=", "!=", "<", "<=", ">", ">="):
            self.advance()
            return Cmp(t.text, left, self.expr())
        self.error(f"expected a comparison operator, found {self.describe(t)}")

    def bit_test(self) -> Condition:
        bit = self.index("x", self.header.bits)
        t = self.tok
        if not (self.at("=") or self.at("!=")):
            self.error(f"expected '=' or '!=', found {self.describe(t)}")
        op = self.advance().text
        v = self.tok
        if v.text not in ("0", "1"):
            self.error("bit tests compare against 0 or 1")
        self.advance()
        test = BitTest(bit, int(v.text))
        return Not(test) if op == "!=" else test


def parse_source(text, gate_arity: Mapping[str, int] | None = None) -> Source:
    """Parse a program file: optional header followed by a program."""
    text = _decode(text)
    p = Parser(text, gate_arity=gate_arity)
    header = p.parse_header()
    p.header = header
    prog = p.program()
    p.expect_eof()
    return Source(header, prog)


def parse_program(text, header: Header | None = None,
                  gate_arity: Mapping[str, int] | None = None) -> Program:
    """Parse ``text`` into a :data:`Program`.

    If ``text`` starts with a header it is used for the declaration checks;
    otherwise ``header`` is (defaulting to an empty classical header).
    """
    text = _decode(text)
    p = Parser(text, gate_arity=gate_arity)
    declared = p.parse_header()
    if declared == Header() and header is not None:
        declared = header
    p.header = declared
    prog = p.program()
    p.expect_eof()
    return prog


def parse_condition(text, header: Header) -> Condition:
    text = _decode(text)
    p = Parser(text, header=header)
    c = p.condition()
    p.expect_eof()
    return c


# --------------------------------------------------------------------------
# Pretty-printer
# --------------------------------------------------------------------------

_CHOICE, _PAR, _SEQ, _UNIT = 1, 2, 3, 4


def fmt_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _level(p: Program) -> int:
    if isinstance(p, (PChoice, NChoice)):
        return _CHOICE
    if isinstance(p, Par):
        return _PAR
    if isinstance(p, Seq):
        return _SEQ
    return _UNIT


def _ends_with_expr(p: Program) -> bool:
    while isinstance(p, (Seq, Par, PChoice, NChoice)):
        p = p.right
    return isinstance(p, Assign)


def _wrap(p: Program, min_level: int) -> str:
    s = _pp(p)
    return f"({s})" if _level(p) < min_level else s


def _pp(p: Program) -> str:
    match p:
        case Skip():
            return "skip"
        case Assign(var, e):
            return f"{var} := {pp_expr(e)}"
        case RandAssign(var, branches):
            inner = ", ".join(f"{fmt_rational(w)}: {pp_expr(e)}" for w, e in branches)
            return f"{var} :~ {{{inner}}}"
        case Gate(name, qubits):
            return f"{name}({', '.join(f'q{q}' for q in qubits)})"
        case Reset(q):
            return f"q{q} <- |0>"
        case Measure(b, q):
            return f"M[x{b} <- q{q}]"
        case Seq(l, r):
            return f"{_wrap(l, _SEQ)}; {_wrap(r, _SEQ + 1)}"
        case Par(l, r):
            return f"{_wrap(l, _PAR)} || {_wrap(r, _PAR + 1)}"
        case PChoice() | NChoice():
            op = f"+[{fmt_rational(p.prob)}]" if isinstance(p, PChoice) else "+"
            left = _wrap(p.left, _CHOICE)
            right = _wrap(p.right, _CHOICE + 1)
            # "x := 1 + (..." would read the parenthesis as an operand
            if op == "+" and right.startswith("(") and _ends_with_expr(p.left) \
                    and not left.startswith("("):
                left = f"({left})"
            return f"{left} {op} {right}"
        case If(c, t, e):
            return f"if {pp_cond(c)} then {{ {_pp(t)} }} else {{ {_pp(e)} }}"
        case While(c, b):
            return f"while {pp_cond(c)} {{ {_pp(b)} }}"
    raise TypeError(f"not a program: {p!r}")


@lru_cache(maxsize=65536)
def pretty_print(p: Program) -> str:
    """Render ``p`` so that ``parse_program(pretty_print(p)) == p``."""
    return _pp(p)


def pretty_print_source(src: Source) -> str:
    h = src.header
    if h.kind == "quantum":
        head = f"bits {h.bits} qubits {h.qubits};\n"
    elif h.variables:
        head = f"var {', '.join(h.variables)};\n"
    else:
        head = ""
    return head + pretty_print(src.program) + "\n"


_EXPR_LEVEL = {"+": 1, "-": 1, "*": 2, "/": 2}


def pp_expr(e: Expr, min_level: int = 0) -> str:
    match e:
        case Const(v):
            s = str(v) if v >= 0 else f"-{-v}"
            return f"({s})" if v < 0 and min_level > 2 else s
        case Var(name):
            return name
        case Neg(x):
            s = f"-{pp_expr(x, 3)}"
            return f"({s})" if min_level > 2 else s
        case BinOp(op, l, r):
            lvl = _EXPR_LEVEL[op]
            s = f"{pp_expr(l, lvl)} {op} {pp_expr(r, lvl + 1)}"
            return f"({s})" if lvl < min_level else s
    raise TypeError(f"not an expression: {e!r}")


_COND_LEVEL = {Or: 1, And: 2}


def pp_cond(c: Condition, min_level: int = 0) -> str:
    match c:
        case BoolConst(v):
            return "true" if v else "false"
        case Cmp(op, l, r):
            s = f"{pp_expr(l)} {op} {pp_expr(r)}"
            return f"({s})" if min_level > 3 else s
        case BitTest(b, v):
            s = f"x{b} = {v}"
            return f"({s})" if min_level > 3 else s
        case Not(x):
            return f"!{pp_cond(x, 4)}"
        case And(l, r) | Or(l, r):
            lvl = _COND_LEVEL[type(c)]
            op = "&&" if isinstance(c, And) else "||"
            s = f"{pp_cond(l, lvl)} {op} {pp_cond(r, lvl + 1)}"
            return f"({s})" if lvl < min_level else s
    raise TypeError(f"not a condition: {c!r}")

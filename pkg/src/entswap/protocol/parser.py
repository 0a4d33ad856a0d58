"""Lexer and recursive-descent parser for ``.qproto`` scripts.

Grammar::

    program   := { statement }
    statement := (prepare | measure | report) ";"
    prepare   := "prepare" ( "singlet" pair
                           | "bell" bellkind pair
                           | "ket" bits [ "(" labels ")" ] )
    measure   := "measure" basis "on" targets
    basis     := "spin" "(" axis ")" | "bell"
    axis      := "x" | "y" | "z" | "(" number "," number "," number ")"
    targets   := label | "(" label "," label ")"
    report    := "report" metric
    metric    := "probs" | "rdm" "(" labels ")"
               | ("schmidt" | "entropy") "(" labels "|" labels ")"
               | "concurrence" "(" label "," label ")"
               | "correlator" "(" label "," axis "," label "," axis ")"
    bellkind  := ("psi" | "phi") ("+" | "-")
    bits      := ("+" | "-") { "+" | "-" }
    label     := positive integer

``#`` starts a comment running to the end of the line. A ket without a
label list takes the labels following the largest one prepared so far.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..states import BellKind
from .nodes import Axis, Measure, Pos, Prepare, ProtocolProgram, Report

_SYMBOLS = set("(),;|+-")
_DIGITS = set("0123456789")
_NAME_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_NAME_REST = _NAME_START | _DIGITS


class ParseError(ValueError):
    """Syntax or semantic error at a 1-based ``line``/``column``."""

    def __init__(self, line: int, column: int, message: str, token: str = ""):
        self.line = line
        self.column = column
        self.message = message
        self.token = token
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str  # "name" | "int" | "number" | "sym" | "bad" | "eof"
    text: str
    line: int
    column: int

    @property
    def pos(self) -> Pos:
        return Pos(self.line, self.column)

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(source: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r\f\v":
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start = i
        if ch in _NAME_START:
            while i < n and source[i] in _NAME_REST:
                i += 1
            kind = "name"
        elif ch in _DIGITS or (ch == "." and i + 1 < n and source[i + 1] in _DIGITS):
            kind = "int"
            while i < n and source[i] in _DIGITS:
                i += 1
            if i < n and source[i] == ".":
                kind = "number"
                i += 1
                while i < n and source[i] in _DIGITS:
                    i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j] in _DIGITS:
                    kind = "number"
                    i = j
                    while i < n and source[i] in _DIGITS:
                        i += 1
        elif ch in _SYMBOLS:
            i += 1
            kind = "sym"
        else:
            # reported by the parser, so earlier syntax errors win
            tokens.append(Token("bad", ch, line, col))
            return tokens
        text = source[start:i]
        tokens.append(Token(kind, text, line, col))
        col += i - start
    if tokens:
        # point just past the last token rather than at trailing blank lines
        last = tokens[-1]
        line, col = last.line, last.column + len(last.text)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.top_label = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind not in ("eof", "bad"):
            self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        if tok.kind == "bad":
            return ParseError(tok.line, tok.column, f"unexpected character {tok.text!r}", tok.text)
        return ParseError(tok.line, tok.column, f"{message}, found {tok.describe()}", tok.text)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "name") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def keyword(self, *choices: str) -> Token:
        if self.tok.kind == "name" and self.tok.text in choices:
            return self.advance()
        names = ", ".join(repr(c) for c in choices)
        raise self.error(f"expected one of {names}" if len(choices) > 1 else f"expected {names}")

    # -- terminals --

    def label(self) -> int:
        tok = self.tok
        if tok.kind != "int":
            raise self.error("expected a particle label")
        value = int(tok.text)
        if value < 1:
            raise self.error("particle labels must be positive integers")
        self.advance()
        return value

    def labels(self) -> tuple[int, ...]:
        out = [self.label()]
        while self.at(","):
            self.advance()
            out.append(self.label())
        return tuple(out)

    def pair(self) -> tuple[int, int]:
        self.expect("(")
        a = self.label()
        self.expect(",")
        b = self.label()
        self.expect(")")
        return a, b

    def number(self) -> float:
        sign = 1.0
        if self.at("+") or self.at("-"):
            sign = -1.0 if self.advance().text == "-" else 1.0
        tok = self.tok
        if tok.kind not in ("int", "number"):
            raise self.error("expected a number")
        self.advance()
        return sign * float(tok.text)

    def axis(self) -> Axis:
        tok = self.tok
        if tok.kind == "name" and tok.text in ("x", "y", "z"):
            self.advance()
            return Axis(name=tok.text, pos=tok.pos)
        if self.at("("):
            self.advance()
            x = self.number()
            self.expect(",")
            y = self.number()
            self.expect(",")
            z = self.number()
            self.expect(")")
            return Axis(vector=(x, y, z), pos=tok.pos)
        raise self.error("expected an axis (x, y, z or a triple)")

    def bellkind(self) -> BellKind:
        tok = self.keyword("psi", "phi")
        if not (self.at("+") or self.at("-")):
            raise self.error("expected '+' or '-' after Bell state name")
        sign = self.advance().text
        return BellKind.parse(tok.text + sign)

    # -- statements --

    def program(self) -> tuple:
        statements = []
        while self.tok.kind not in ("eof", "bad"):
            statements.append(self.statement())
            self.expect(";")
        if self.tok.kind == "bad":
            raise self.error("")
        return tuple(statements)

    def statement(self):
        tok = self.tok
        if tok.kind == "name" and tok.text == "prepare":
            self.advance()
            return self.prepare(tok.pos)
        if tok.kind == "name" and tok.text == "measure":
            self.advance()
            return self.measure(tok.pos)
        if tok.kind == "name" and tok.text == "report":
            self.advance()
            return self.report(tok.pos)
        raise self.error("expected 'prepare', 'measure' or 'report'")

    def prepare(self, pos: Pos) -> Prepare:
        source = self.keyword("singlet", "bell", "ket").text
        if source == "singlet":
            stmt = Prepare("singlet", self.pair(), pos=pos)
        elif source == "bell":
            kind = self.bellkind()
            stmt = Prepare("bell", self.pair(), bell=kind, pos=pos)
        else:
            bits = []
            while self.at("+") or self.at("-"):
                bits.append(self.advance().text)
            if not bits:
                raise self.error("expected a bit pattern of '+' and '-'")
            if self.at("("):
                self.advance()
                labels = self.labels()
                self.expect(")")
            else:
                labels = tuple(range(self.top_label + 1, self.top_label + 1 + len(bits)))
            stmt = Prepare("ket", labels, bits="".join(bits), pos=pos)
        self.top_label = max(self.top_label, *stmt.labels)
        return stmt

    def measure(self, pos: Pos) -> Measure:
        basis = self.keyword("spin", "bell").text
        axis = None
        if basis == "spin":
            self.expect("(")
            axis = self.axis()
            self.expect(")")
        self.keyword("on")
        if self.at("("):
            targets = self.pair()
        else:
            targets = (self.label(),)
        return Measure(basis, targets, axis, pos=pos)

    def report(self, pos: Pos) -> Report:
        metric = self.keyword("probs", "rdm", "schmidt", "entropy", "concurrence", "correlator").text
        if metric == "probs":
            return Report("probs", (), pos=pos)
        self.expect("(")
        if metric == "rdm":
            args = (self.labels(),)
        elif metric in ("schmidt", "entropy"):
            left = self.labels()
            self.expect("|")
            args = (left, self.labels())
        elif metric == "concurrence":
            a = self.label()
            self.expect(",")
            args = (a, self.label())
        else:
            p = self.label()
            self.expect(",")
            a = self.axis()
            self.expect(",")
            q = self.label()
            self.expect(",")
            args = (p, a, q, self.axis())
        self.expect(")")
        return Report(metric, args, pos=pos)


def _decode(source: str | bytes) -> str:
    if isinstance(source, str):
        return source
    try:
        return bytes(source).decode("utf-8")
    except UnicodeDecodeError as exc:
        head = bytes(source)[: exc.start].decode("utf-8")
        line = head.count("\n") + 1
        column = len(head) - (head.rfind("\n") + 1) + 1
        raise ParseError(line, column, "input is not valid UTF-8") from None


def parse(source: str | bytes, name: str = "script") -> ProtocolProgram:
    """Parse script text into a :class:`ProtocolProgram`.

    Raises :class:`ParseError` pointing at the first problem in reading order.
    """
    text = _decode(source)
    return ProtocolProgram(_Parser(tokenize(text)).program(), name=name)

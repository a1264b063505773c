"""Recursive-descent parser for the concrete syntax.

Blocks desugar as they are read: ``{ }`` is the unit value, ``{ e }`` is
``e``, ``{ s; rest }`` is a sequence and ``{ let x = e; rest }`` a let.
A statement that ends in ``;`` with nothing after it is followed by unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import ast as A
from .ast import Pos
from .types import (
    BoolType,
    Domain,
    ListType,
    QualType,
    Stage,
    UIntType,
    UnitType,
)


class ParseError(Exception):
    def __init__(self, message: str, pos: Pos):
        super().__init__(f"{pos}: {message}")
        self.message = message
        self.pos = pos


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "str", "op", "eof"
    text: str
    pos: Pos


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<op>\.\.|->|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){}\[\];:,$@.])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "fn", "let", "mut", "if", "else", "for", "in", "wire", "as", "true",
    "false", "assert", "assert_zero", "get_public", "get_instance",
    "get_witness", "uint", "bool", "list",
}

# Reserved words of the full language that the monomorphic core rejects.
UNSUPPORTED = {"rec", "ref", "struct", "where", "return", "while", "match", "impl", "type"}

_GETS = {
    "get_public": Domain.PUBLIC,
    "get_instance": Domain.VERIFIER,
    "get_witness": Domain.PROVER,
}


def tokenize(src: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if m is None:
            raise ParseError(f"unexpected character {src[i]!r}", Pos(line, i - line_start + 1))
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, text, Pos(line, i - line_start + 1)))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = i + text.rindex("\n") + 1
        i = m.end()
    tokens.append(Token("eof", "", Pos(line, i - line_start + 1)))
    return tokens


def _unescape(lit: str) -> str:
    body = lit[1:-1]
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


_LARGE_START = {"if", "for", "wire", "{"}


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.i = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.describe(self.tok)}")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def describe(self, t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def error(self, message: str, pos: Optional[Pos] = None):
        raise ParseError(message, pos or self.tok.pos)

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            self.error(f"expected identifier, found {self.describe(t)}")
        if t.text in UNSUPPORTED:
            self.error(f"'{t.text}' is not supported in the monomorphic core")
        if t.text in KEYWORDS:
            self.error(f"expected identifier, found keyword {t.text!r}")
        return self.advance()

    # programs

    def program(self) -> A.Program:
        funs = []
        seen = {}
        while self.tok.kind != "eof":
            f = self.fundef()
            if f.name in seen:
                self.error(f"duplicate function {f.name!r}", f.pos)
            seen[f.name] = f
            funs.append(f)
        main = seen.get("main")
        if main is None:
            self.error("program has no main function")
        if main.params:
            self.error("main must not take parameters", main.pos)
        return A.Program(tuple(funs))

    def fundef(self) -> A.FunDef:
        if self.tok.kind == "ident" and self.tok.text in UNSUPPORTED:
            self.error(f"'{self.tok.text}' is not supported in the monomorphic core")
        start = self.expect("fn").pos
        name = self.ident().text
        if self.at("["):
            self.error("type parameters are not supported in the monomorphic core")
        self.expect("(")
        params = []
        names = set()
        while not self.at(")"):
            ptok = self.ident()
            if ptok.text in names:
                self.error(f"duplicate parameter {ptok.text!r}", ptok.pos)
            names.add(ptok.text)
            self.expect(":")
            params.append(A.Param(ptok.text, self.qualtype(), pos=ptok.pos))
            if not self.accept(","):
                break
        self.expect(")")
        ret = None
        if self.accept("->"):
            ret = self.qualtype()
        if self.at("where"):
            self.error("'where' constraints are not supported in the monomorphic core")
        body = self.block()
        return A.FunDef(name, tuple(params), ret, body, pos=start)

    # types

    def qualtype(self) -> QualType:
        data = self.datatype()
        stage = None
        domain = Domain.PUBLIC
        if self.at("$"):
            stage = self.stage_qualifier()
        if self.at("@"):
            domain = self.domain_qualifier()
        return QualType(data, stage, domain)

    def stage_qualifier(self) -> Stage:
        self.expect("$")
        t = self.advance()
        if t.kind == "ident" and t.text in ("pre", "post"):
            return Stage[t.text.upper()]
        self.error("stage variables are not supported in the monomorphic core", t.pos)

    def domain_qualifier(self) -> Domain:
        self.expect("@")
        t = self.advance()
        if t.kind == "ident" and t.text in ("public", "verifier", "prover"):
            return Domain[t.text.upper()]
        self.error("domain variables are not supported in the monomorphic core", t.pos)

    def datatype(self):
        t = self.tok
        if self.accept("("):
            self.expect(")")
            return UnitType()
        if t.text in ("uint", "bool") and t.kind == "ident":
            self.advance()
            modulus = None
            if self.accept("["):
                m = self.advance()
                if m.kind == "num":
                    modulus = int(m.text)
                elif m.kind == "ident" and m.text == "N":
                    modulus = "N"
                else:
                    self.error("modulus must be N or a natural number", m.pos)
                self.expect("]")
            return UIntType(modulus) if t.text == "uint" else BoolType(modulus)
        if t.text == "list" and t.kind == "ident":
            self.advance()
            self.expect("[")
            elem = self.qualtype()
            self.expect("]")
            return ListType(elem)
        self.error(f"expected a type, found {self.describe(t)}")

    def starts_type(self) -> bool:
        t = self.tok
        return (t.kind == "ident" and t.text in ("uint", "bool", "list")) or (
            self.at("(") and self.peek().text == ")"
        )

    # blocks and statements

    def block(self) -> A.Expr:
        start = self.expect("{").pos
        return self.block_rest(start)

    def block_rest(self, start: Pos) -> A.Expr:
        if self.accept("}"):
            return A.UnitLit(pos=start)
        t = self.tok
        if self.at("let"):
            return self.let_stmt()
        first = self.expr()
        if self.accept("}"):
            return first
        if self.accept(";"):
            rest = self.block_rest(self.tok.pos)
        elif _is_large(first) and self.toks[self.i - 1].text == "}":
            rest = self.block_rest(self.tok.pos)
        else:
            self.error(f"expected ';' or '}}', found {self.describe(self.tok)}")
        return A.Seq(first, rest, pos=t.pos)

    def let_stmt(self) -> A.Expr:
        start = self.expect("let").pos
        mutable = self.accept("mut")
        name = self.ident().text
        ann = None
        if self.accept(":"):
            ann = self.qualtype()
        self.expect("=")
        bound = self.expr()
        if ann is not None and isinstance(bound, A.Get) and bound.annotation is None:
            bound.annotation = ann
        self.expect(";")
        rest = self.block_rest(self.tok.pos)
        return A.Let(mutable, name, ann, bound, rest, pos=start)

    # expressions, lowest precedence first

    def expr(self) -> A.Expr:
        lhs = self.binary(0)
        if self.at("="):
            t = self.advance()
            if not A.is_lvalue(lhs):
                self.error("left-hand side of '=' is not assignable", t.pos)
            rhs = self.expr()
            return A.Assign(lhs, rhs, pos=lhs.pos)
        return lhs

    _LEVELS = (("||",), ("&&",), ("==", "<", "<="), ("+", "-"), ("*", "/", "%"))

    def binary(self, level: int) -> A.Expr:
        if level == len(self._LEVELS):
            return self.cast()
        ops = self._LEVELS[level]
        lhs = self.binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance()
            rhs = self.binary(level + 1)
            lhs = A.BinOp(op.text, lhs, rhs, pos=op.pos)
            if level == 2 and self.tok.kind == "op" and self.tok.text in ops:
                self.error("comparison operators do not chain")
        if self.tok.kind == "op" and self.tok.text in ("!=", ">", ">=", "!"):
            self.error(f"operator {self.tok.text!r} is not part of the core language")
        return lhs

    def cast(self) -> A.Expr:
        e = self.postfix()
        while self.at("as"):
            t = self.advance()
            if self.at("$"):
                target = self.stage_qualifier()
            elif self.at("@"):
                target = self.domain_qualifier()
            else:
                target = self.qualtype()
            e = A.Cast(e, target, pos=t.pos)
        return e

    def postfix(self) -> A.Expr:
        e = self.primary()
        while self.at("["):
            t = self.advance()
            if not A.is_lvalue(e):
                self.error("only variables and their elements can be indexed", t.pos)
            idx = self.expr()
            self.expect("]")
            e = A.Load(e, idx, pos=e.pos)
        return e

    def primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return A.NatLit(int(t.text), pos=t.pos)
        if t.kind == "op":
            if t.text == "(":
                self.advance()
                if self.accept(")"):
                    return A.UnitLit(pos=t.pos)
                e = self.expr()
                self.expect(")")
                return e
            if t.text == "{":
                return self.block()
            if t.text == "-":
                self.error("negative literals are not part of the core language")
            self.error(f"unexpected {self.describe(t)}")
        if t.kind == "str":
            self.error("string literals may only appear as input keys")
        if t.kind == "eof":
            self.error("unexpected end of input")
        word = t.text
        if word in ("true", "false"):
            self.advance()
            return A.BoolLit(word == "true", pos=t.pos)
        if word == "if":
            return self.if_expr()
        if word == "for":
            self.advance()
            var = self.ident().text
            self.expect("in")
            lo = self.expr()
            self.expect("..")
            hi = self.expr()
            body = self.block()
            return A.For(var, lo, hi, body, pos=t.pos)
        if word == "wire":
            self.advance()
            return A.Wire(self.block(), pos=t.pos)
        if word in ("assert", "assert_zero"):
            self.advance()
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            node = A.Assert if word == "assert" else A.AssertZero
            return node(arg, pos=t.pos)
        if word in _GETS:
            self.advance()
            self.expect("(")
            key_tok = self.tok
            if key_tok.kind != "str":
                self.error("input key must be a string literal")
            self.advance()
            self.expect(")")
            ann = None
            if self.accept(":"):
                ann = self.qualtype()
            return A.Get(_GETS[word], _unescape(key_tok.text), ann, pos=t.pos)
        name = self.ident()
        if self.at("("):
            self.advance()
            args = []
            while not self.at(")"):
                args.append(self.expr())
                if not self.accept(","):
                    break
            self.expect(")")
            return A.Call(name.text, tuple(args), pos=name.pos)
        return A.Var(name.text, pos=name.pos)

    def if_expr(self) -> A.Expr:
        start = self.expect("if").pos
        guard = self.expr()
        then = self.block()
        if self.accept("else"):
            orelse = self.if_expr() if self.at("if") else self.block()
        else:
            orelse = A.UnitLit(pos=self.tok.pos)
        return A.If(guard, then, orelse, pos=start)


def _is_large(e: A.Expr) -> bool:
    return isinstance(e, (A.If, A.For, A.Wire, A.Seq, A.Let, A.UnitLit))


def parse_program(src: str) -> A.Program:
    return Parser(src).program()


def parse_expr(src: str) -> A.Expr:
    p = Parser(src)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.describe(p.tok)} after expression")
    return e


def parse_type(src: str) -> QualType:
    p = Parser(src)
    q = p.qualtype()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.describe(p.tok)} after type")
    return q

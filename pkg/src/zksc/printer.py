"""Pretty-printer producing source that parses back to the same tree."""

from __future__ import annotations

from . import ast as A
from .types import Domain, QualType, Stage

_INDENT = "    "

_GET_NAMES = {
    Domain.PUBLIC: "get_public",
    Domain.VERIFIER: "get_instance",
    Domain.PROVER: "get_witness",
}

_PREC = {"||": 1, "&&": 2, "==": 3, "<": 3, "<=": 3, "+": 4, "-": 4, "*": 5, "/": 5, "%": 5}
_CAST_PREC = 6
_ATOM_PREC = 8


def format_type(q: QualType) -> str:
    return str(q)


def _format_target(t: A.CastTarget) -> str:
    if isinstance(t, (Stage, Domain)):
        return str(t)
    return format_type(t)


def _quote(key: str) -> str:
    escaped = key.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _prec(e: A.Expr) -> int:
    if isinstance(e, A.Assign):
        return 0
    if isinstance(e, A.BinOp):
        return _PREC[e.op]
    if isinstance(e, A.Cast) or (isinstance(e, A.Get) and e.annotation is not None):
        return _CAST_PREC
    return _ATOM_PREC


class _Printer:
    def __init__(self):
        self.depth = 0

    def expr(self, e: A.Expr, min_prec: int = 0) -> str:
        text = self._expr(e)
        if _prec(e) < min_prec:
            return f"({text})"
        return text

    def _expr(self, e: A.Expr) -> str:
        if isinstance(e, A.UnitLit):
            return "()"
        if isinstance(e, A.NatLit):
            return str(e.value)
        if isinstance(e, A.BoolLit):
            return "true" if e.value else "false"
        if isinstance(e, A.Var):
            return e.name
        if isinstance(e, A.BinOp):
            p = _PREC[e.op]
            right = p + 1
            left = p + 1 if p == 3 else p
            return f"{self.expr(e.lhs, left)} {e.op} {self.expr(e.rhs, right)}"
        if isinstance(e, A.Assert):
            return f"assert({self.expr(e.arg)})"
        if isinstance(e, A.AssertZero):
            return f"assert_zero({self.expr(e.arg)})"
        if isinstance(e, A.Get):
            text = f"{_GET_NAMES[e.domain]}({_quote(e.key)})"
            if e.annotation is not None:
                text += f" : {format_type(e.annotation)}"
            return text
        if isinstance(e, A.If):
            return (
                f"if {self.expr(e.guard)} {self.block(e.then)} "
                f"else {self.block(e.orelse)}"
            )
        if isinstance(e, A.For):
            return (
                f"for {e.var} in {self.expr(e.lo)} .. {self.expr(e.hi)} "
                f"{self.block(e.body)}"
            )
        if isinstance(e, A.Wire):
            return f"wire {self.block(e.body)}"
        if isinstance(e, A.Cast):
            return f"{self.expr(e.body, _CAST_PREC)} as {_format_target(e.target)}"
        if isinstance(e, A.Load):
            return f"{self.expr(e.lvalue, _ATOM_PREC)}[{self.expr(e.index)}]"
        if isinstance(e, A.Assign):
            return f"{self.expr(e.lvalue, _ATOM_PREC)} = {self.expr(e.rhs)}"
        if isinstance(e, (A.Let, A.Seq)):
            return self.block(e)
        if isinstance(e, A.Call):
            return f"{e.name}({', '.join(self.expr(a) for a in e.args)})"
        raise TypeError(f"cannot print {type(e).__name__}")

    def block(self, e: A.Expr) -> str:
        self.depth += 1
        lines = self.statements(e)
        self.depth -= 1
        if not lines:
            return "{ }"
        pad = _INDENT * (self.depth + 1)
        body = "\n".join(pad + line for line in lines)
        return "{\n" + body + "\n" + _INDENT * self.depth + "}"

    def statements(self, e: A.Expr) -> list[str]:
        lines = []
        while True:
            if isinstance(e, A.Let):
                head = "let mut " if e.mutable else "let "
                ann = f" : {format_type(e.annotation)}" if e.annotation is not None else ""
                lines.append(f"{head}{e.var}{ann} = {self.expr(e.bound)};")
                e = e.rest
            elif isinstance(e, A.Seq):
                lines.append(self.expr(e.first) + ";")
                e = e.rest
            elif isinstance(e, A.UnitLit):
                return lines
            else:
                lines.append(self.expr(e))
                return lines


def format_expr(e: A.Expr) -> str:
    return _Printer().expr(e)


def format_fundef(f: A.FunDef) -> str:
    params = ", ".join(f"{p.name}: {format_type(p.type)}" for p in f.params)
    ret = f" -> {format_type(f.return_type)}" if f.return_type is not None else ""
    return f"fn {f.name}({params}){ret} {_Printer().block(f.body)}\n"


def format_program(p: A.Program) -> str:
    return "\n".join(format_fundef(f) for f in p.functions)

"""Greedy shrinking of failing programs.

Candidates come from local rewrites of the ``main`` body: dropping statements
and unused lets, collapsing branches, shortening loops and replacing
subexpressions with literals of the same type.  A candidate is kept when it
still typechecks and still fails the same check.
"""

from __future__ import annotations

from dataclasses import fields, replace
from typing import Callable, Iterator

from .. import ast as A
from ..typecheck import TypeCheckErrors, TypedProgram, typecheck_program
from ..types import BoolType, Domain, UIntType, UnitType
from .generator import syntax_type


def _free_in(name: str, e: A.Expr) -> bool:
    return any(isinstance(n, A.Var) and n.name == name for n in A.walk(e))


def _literal_for(e: A.Expr):
    q = e.ty
    if q is None:
        return None
    t = q.data
    if isinstance(t, UIntType):
        lit = A.NatLit(0)
    elif isinstance(t, BoolType):
        lit = A.BoolLit(True)
    elif isinstance(t, UnitType):
        lit = A.UnitLit()
        return lit if q.domain is Domain.PUBLIC else A.Cast(lit, q.domain)
    else:
        return None
    if isinstance(e, (A.NatLit, A.BoolLit)) or (isinstance(e, A.Cast) and isinstance(e.body, (A.NatLit, A.BoolLit))):
        return None
    return A.Cast(lit, syntax_type(q))


def _local_rewrites(e: A.Expr) -> Iterator[A.Expr]:
    if isinstance(e, A.Seq):
        yield e.rest
    if isinstance(e, A.Let) and not _free_in(e.var, e.rest):
        yield e.rest
    if isinstance(e, A.If):
        yield e.then
        yield e.orelse
    if isinstance(e, A.For) and isinstance(e.hi, A.NatLit) and isinstance(e.lo, A.NatLit) and e.hi.value > e.lo.value:
        yield replace(e, hi=A.NatLit(e.hi.value - 1))
    lit = _literal_for(e)
    if lit is not None:
        yield lit


def _child_slots(e: A.Expr):
    for f in fields(e):
        v = getattr(e, f.name)
        if isinstance(v, A.Expr):
            yield f.name


def _rewrites(e: A.Expr) -> Iterator[A.Expr]:
    """Every tree obtained by one local rewrite somewhere in ``e``."""
    yield from _local_rewrites(e)
    for slot in _child_slots(e):
        child = getattr(e, slot)
        for new in _rewrites(child):
            yield replace(e, **{slot: new})


def shrink(
    tp: TypedProgram,
    still_fails: Callable[[TypedProgram], bool],
    max_steps: int = 200,
) -> TypedProgram:
    """Smallest program reachable by greedy rewrites that still fails."""
    current = tp
    steps = 0
    improved = True
    while improved and steps < max_steps:
        improved = False
        main = current.main
        for body in _rewrites(main.body):
            steps += 1
            if steps > max_steps:
                break
            fun = replace(main, body=body)
            program = A.Program(tuple(fun if f.name == "main" else f for f in current.program.functions))
            try:
                candidate = typecheck_program(program, current.modulus)
            except TypeCheckErrors:
                continue
            if A.size(candidate.body) >= A.size(current.body):
                continue
            try:
                fails = still_fails(candidate)
            except Exception:
                fails = False
            if fails:
                current = candidate
                improved = True
                break
    return current

"""Shared helpers for the test modules."""

from importlib.resources import files

from zksc.parser import parse_expr, parse_program
from zksc.typecheck import typecheck_expr, typecheck_program

P61 = 2**61 - 1
FACTOR_DIR = files("zksc.examples") / "factor"


def typed(src: str, modulus: int = P61):
    return typecheck_program(parse_program(src), modulus)


def main_of(body: str) -> str:
    return "fn main() -> () $pre @public {\n" + body + "\n}\n"


def typed_body(body: str, modulus: int = P61):
    return typed(main_of(body), modulus)


def check(src: str, env=(), expected=None, modulus: int = P61):
    return typecheck_expr(env, parse_expr(src), expected, modulus)

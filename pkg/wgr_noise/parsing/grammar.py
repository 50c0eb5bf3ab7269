"""
Line-oriented structured-text grammar shared by material files and scan configs.

    document   := statement*
    statement  := assignment | block | row
    assignment := IDENT "=" value
    block      := IDENT+ "{" statement* "}"
    row        := NUMBER NUMBER
    value      := NUMBER | STRING | IDENT | "[" [value ("," value)*] "]"

``#`` starts a comment that runs to the end of the line. ``true``/``false`` are booleans.
"""

from __future__ import annotations

from typing import Any, NamedTuple

import pyparsing as pp


class Assign(NamedTuple):
    key: str
    value: Any
    line: int


class Block(NamedTuple):
    head: tuple[str, ...]
    body: tuple[Any, ...]
    line: int


class Row(NamedTuple):
    values: tuple[float, float]
    line: int


class GrammarError(Exception):
    def __init__(self, msg: str, line: int, column: int):
        self.msg = msg
        self.line = line
        self.column = column
        super().__init__(f"{msg} (line {line}, column {column})")


def _to_number(tokens: pp.ParseResults) -> int | float:
    text = tokens[0]
    if any(c in text for c in ".eE"):
        return float(text)
    return int(text)


def _to_ident(tokens: pp.ParseResults) -> Any:
    text = tokens[0]
    if text == "true":
        return True
    if text == "false":
        return False
    return text


def _build_grammar() -> pp.ParserElement:
    lbrace, rbrace, eq, lbrack, rbrack = map(pp.Suppress, "{}=[]")

    number = pp.Regex(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?").set_name("number")
    number.set_parse_action(_to_number)
    string = pp.QuotedString('"', esc_char="\\").set_name("string")
    ident = pp.Word(pp.alphas + "_", pp.alphanums + "_.-").set_name("identifier")
    ident_value = ident.copy().set_parse_action(_to_ident)

    scalar = number | string | ident_value
    listing = pp.Group(lbrack + pp.Optional(pp.DelimitedList(scalar)) + rbrack)
    listing.set_parse_action(lambda t: pp.ParseResults.List(list(t[0])))
    value = listing | scalar

    statement = pp.Forward()

    assignment = ident + eq + value
    assignment.set_parse_action(lambda s, loc, t: Assign(t[0], t[1], pp.lineno(loc, s)))

    block = pp.Group(pp.OneOrMore(ident)) + lbrace + pp.Group(pp.ZeroOrMore(statement)) + rbrace
    block.set_parse_action(
        lambda s, loc, t: Block(tuple(t[0]), tuple(t[1]), pp.lineno(loc, s))
    )

    row = number + number
    row.set_parse_action(lambda s, loc, t: Row((float(t[0]), float(t[1])), pp.lineno(loc, s)))

    statement <<= assignment | block | row

    document = pp.ZeroOrMore(statement) + pp.StringEnd()
    document.ignore(pp.python_style_comment)
    return document


_GRAMMAR = _build_grammar()


def parse_document(text: str) -> list[Assign | Block | Row]:
    """
    Parse a structured-text document into its top-level statements.

    Raises
    ------
    GrammarError
        With the line and column of the first token that does not parse.

    """
    try:
        return list(_GRAMMAR.parse_string(text, parse_all=True))
    except pp.ParseBaseException as e:
        raise GrammarError(e.msg, e.lineno, e.col) from e

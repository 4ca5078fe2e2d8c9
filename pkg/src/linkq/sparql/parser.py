"""Tokenizer and recursive-descent parser for the SELECT subset we preview.

Covers the query shapes this system generates and inspects: SELECT with
DISTINCT/REDUCED and expression aliases, WHERE groups with ';' and ','
abbreviations, FILTER and FILTER NOT EXISTS, SERVICE and OPTIONAL blocks,
GROUP BY, ORDER BY with ASC/DESC, LIMIT/OFFSET, and PREFIX declarations.
Anything outside the subset fails with a positioned error; no input may
crash the parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import InvalidQuery
from .model import (
    DEFAULT_PREFIXES,
    ENTITY_PREFIX,
    PROPERTY_PREFIXES,
    Term,
    TermKind,
    TriplePattern,
)

_PNAME_RE = re.compile(
    r"[A-Za-z_][A-Za-z0-9_\-]*:(?:[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?"
)
_VAR_RE = re.compile(r"[?$][A-Za-z_][A-Za-z0-9_]*")
_IRI_RE = re.compile(r"<[^<>\"{}|^`\\\x00-\x20]*>")
_NUM_RE = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_LANGTAG_RE = re.compile(r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*")

_TWO_CHAR_OPS = ("<=", ">=", "!=", "&&", "||", "^^")
_ONE_CHAR_OPS = "=<>!+-*/"
_PUNCT = "{}();,."

_Q_LOCAL_RE = re.compile(r"Q[0-9]+")
_P_LOCAL_RE = re.compile(r"P[0-9]+")

_MAX_GROUP_DEPTH = 50

_STRING_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


@dataclass(frozen=True)
class Token:
    kind: str  # pname | var | iri | string | number | word | punct | op | eof
    text: str
    pos: int
    value: str = ""
    datatype: str | None = None


@dataclass
class ParsedQuery:
    """Just enough structure for validation, ID scanning, and BGP extraction.

    ``prefixes`` is the effective namespace map: the standard Wikidata
    defaults overlaid with any explicit PREFIX declarations.
    """

    prefixes: dict[str, str]
    distinct: bool
    select_star: bool
    where: "GroupPattern"
    limit: int | None = None
    offset: int | None = None
    tokens: tuple[Token, ...] = ()


@dataclass(frozen=True)
class FilterPattern:
    """A FILTER constraint; contributes no graph triples."""


@dataclass(frozen=True)
class NotExistsPattern:
    group: "GroupPattern"


@dataclass(frozen=True)
class ServicePattern:
    name: Term
    group: "GroupPattern"


@dataclass(frozen=True)
class OptionalPattern:
    group: "GroupPattern"


@dataclass(frozen=True)
class SubGroupPattern:
    group: "GroupPattern"


@dataclass
class GroupPattern:
    elements: list = field(default_factory=list)

    def triples(self) -> list[TriplePattern]:
        """Triple patterns at this group level only, in source order."""
        return [e for e in self.elements if isinstance(e, TriplePattern)]


def _fail(message: str, pos: int) -> InvalidQuery:
    return InvalidQuery(message, position=pos)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            nl = text.find("\n", i)
            i = n if nl < 0 else nl + 1
            continue
        if ch in "\"'":
            tok, i = _scan_string(text, i)
            tokens.append(tok)
            continue
        if ch == "<":
            m = _IRI_RE.match(text, i)
            if m:
                tokens.append(Token("iri", m.group(), i, value=m.group()[1:-1]))
                i = m.end()
                continue
            # fall through: comparison operator
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUM_RE.match(text, i)
            if m:
                tokens.append(Token("number", m.group(), i, value=m.group()))
                i = m.end()
                continue
        if ch in "?$":
            m = _VAR_RE.match(text, i)
            if not m:
                raise _fail("expected a variable name after '?'", i)
            tokens.append(Token("var", m.group(), i, value=m.group()[1:]))
            i = m.end()
            continue
        m = _PNAME_RE.match(text, i)
        if m:
            tokens.append(Token("pname", m.group(), i, value=m.group()))
            i = m.end()
            continue
        m = _WORD_RE.match(text, i)
        if m:
            tokens.append(Token("word", m.group(), i, value=m.group()))
            i = m.end()
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(Token("op", two, i))
            i += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token("punct", ch, i))
            i += 1
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(Token("op", ch, i))
            i += 1
            continue
        raise _fail(f"unexpected character {ch!r}", i)
    tokens.append(Token("eof", "", n))
    return tokens


def _scan_string(text: str, start: int) -> tuple[Token, int]:
    quote = text[start]
    i = start + 1
    n = len(text)
    out: list[str] = []
    while i < n:
        ch = text[i]
        if ch == quote:
            i += 1
            break
        if ch in "\r\n":
            raise _fail("newline inside string literal", start)
        if ch == "\\":
            if i + 1 >= n:
                raise _fail("dangling escape at end of input", i)
            esc = text[i + 1]
            out.append(_STRING_ESCAPES.get(esc, esc))
            i += 2
            continue
        out.append(ch)
        i += 1
    else:
        raise _fail("unterminated string literal", start)

    datatype = None
    m = _LANGTAG_RE.match(text, i)
    if m:
        i = m.end()
    elif text[i:i + 2] == "^^":
        j = i + 2
        m = _PNAME_RE.match(text, j) or _IRI_RE.match(text, j)
        if not m:
            raise _fail("expected a datatype after '^^'", j)
        datatype = m.group()
        i = m.end()
    return Token("string", text[start:i], start, value="".join(out), datatype=datatype), i


def _classify_pname(tok: Token) -> Term:
    prefix, _, local = tok.text.partition(":")
    if prefix == ENTITY_PREFIX and _Q_LOCAL_RE.fullmatch(local):
        return Term(TermKind.ENTITY, tok.text, local, prefix=prefix)
    if prefix in PROPERTY_PREFIXES and _P_LOCAL_RE.fullmatch(local):
        return Term(TermKind.PROPERTY, tok.text, local, prefix=prefix)
    return Term(TermKind.OTHER_IRI, tok.text, tok.text)


_NUMERIC_DATATYPES = ("integer", "decimal", "double")


def _number_term(tok: Token) -> Term:
    if "e" in tok.text or "E" in tok.text:
        dt = "double"
    elif "." in tok.text:
        dt = "decimal"
    else:
        dt = "integer"
    return Term(TermKind.LITERAL, tok.text, tok.value, datatype=dt)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.depth = 0

    # -- token helpers ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        j = min(self.i + ahead, len(self.tokens) - 1)
        return self.tokens[j]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at_punct(self, symbol: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == symbol

    def eat_punct(self, symbol: str) -> bool:
        if self.at_punct(symbol):
            self.advance()
            return True
        return False

    def expect_punct(self, symbol: str) -> Token:
        if not self.at_punct(symbol):
            tok = self.peek()
            raise _fail(f"expected {symbol!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    def at_kw(self, *keywords: str) -> bool:
        tok = self.peek()
        return tok.kind == "word" and tok.text.upper() in keywords

    def eat_kw(self, *keywords: str) -> bool:
        if self.at_kw(*keywords):
            self.advance()
            return True
        return False

    def expect_kw(self, keyword: str) -> Token:
        if not self.at_kw(keyword):
            tok = self.peek()
            raise _fail(f"expected {keyword}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    # -- grammar ----------------------------------------------------------

    def parse(self) -> ParsedQuery:
        prefixes = {**DEFAULT_PREFIXES, **self.prologue()}
        self.expect_kw("SELECT")
        distinct = self.eat_kw("DISTINCT")
        if not distinct:
            self.eat_kw("REDUCED")
        select_star = self.select_items()
        self.eat_kw("WHERE")
        where = self.group()
        limit, offset = self.modifiers()
        tok = self.peek()
        if tok.kind != "eof":
            raise _fail(f"unexpected trailing content {tok.text!r}", tok.pos)
        return ParsedQuery(
            prefixes=prefixes,
            distinct=distinct,
            select_star=select_star,
            where=where,
            limit=limit,
            offset=offset,
            tokens=tuple(self.tokens),
        )

    def prologue(self) -> dict[str, str]:
        prefixes: dict[str, str] = {}
        while self.at_kw("PREFIX", "BASE"):
            if self.eat_kw("BASE"):
                tok = self.advance()
                if tok.kind != "iri":
                    raise _fail("expected an IRI after BASE", tok.pos)
                continue
            self.advance()
            ns = self.advance()
            if ns.kind != "pname" or not ns.text.endswith(":") or ns.text.count(":") != 1:
                raise _fail("expected a namespace like 'wd:' after PREFIX", ns.pos)
            iri = self.advance()
            if iri.kind != "iri":
                raise _fail("expected an IRI in PREFIX declaration", iri.pos)
            prefixes[ns.text[:-1]] = iri.value
        return prefixes

    def select_items(self) -> bool:
        if self.peek().kind == "op" and self.peek().text == "*":
            self.advance()
            return True
        count = 0
        while True:
            tok = self.peek()
            if tok.kind == "var":
                self.advance()
                count += 1
            elif self.at_punct("("):
                self.advance()
                self.expression()
                self.expect_kw("AS")
                alias = self.advance()
                if alias.kind != "var":
                    raise _fail("expected a variable after AS", alias.pos)
                self.expect_punct(")")
                count += 1
            else:
                break
        if count == 0:
            raise _fail("SELECT needs '*' or at least one variable", self.peek().pos)
        return False

    def group(self) -> GroupPattern:
        self.depth += 1
        if self.depth > _MAX_GROUP_DEPTH:
            raise _fail("group nesting too deep", self.peek().pos)
        try:
            self.expect_punct("{")
            pattern = GroupPattern()
            while not self.at_punct("}"):
                tok = self.peek()
                if tok.kind == "eof":
                    raise _fail("unclosed group: expected '}'", tok.pos)
                if self.at_kw("FILTER"):
                    pattern.elements.append(self.filter_element())
                elif self.at_kw("SERVICE"):
                    pattern.elements.append(self.service_element())
                elif self.at_kw("OPTIONAL"):
                    self.advance()
                    pattern.elements.append(OptionalPattern(self.group()))
                elif self.at_punct("{"):
                    pattern.elements.append(SubGroupPattern(self.group()))
                elif self.at_kw("UNION", "MINUS", "BIND", "VALUES", "GRAPH"):
                    raise _fail(f"{tok.text.upper()} is not supported in this query subset", tok.pos)
                else:
                    self.triples_same_subject(pattern)
                    after = self.peek()
                    if not (
                        self.at_punct(".")
                        or self.at_punct("}")
                        or self.at_punct("{")
                        or self.at_kw("FILTER", "SERVICE", "OPTIONAL")
                    ):
                        raise _fail("expected '.' after triple pattern", after.pos)
                self.eat_punct(".")
            self.expect_punct("}")
            return pattern
        finally:
            self.depth -= 1

    def filter_element(self):
        self.expect_kw("FILTER")
        if self.at_kw("NOT"):
            self.advance()
            self.expect_kw("EXISTS")
            return NotExistsPattern(self.group())
        if self.at_kw("EXISTS"):
            self.advance()
            return NotExistsPattern(self.group())
        if self.at_punct("("):
            self.advance()
            self.expression()
            self.expect_punct(")")
            return FilterPattern()
        if self.peek().kind == "word":
            self.function_call()
            return FilterPattern()
        raise _fail("expected a constraint after FILTER", self.peek().pos)

    def service_element(self) -> ServicePattern:
        self.expect_kw("SERVICE")
        self.eat_kw("SILENT")
        tok = self.peek()
        if tok.kind not in ("pname", "iri", "var"):
            raise _fail("expected a service name", tok.pos)
        name = self.term()
        return ServicePattern(name, self.group())

    def triples_same_subject(self, pattern: GroupPattern) -> None:
        subject = self.term()
        if subject.kind is TermKind.LITERAL:
            raise _fail("a literal cannot be the subject of a triple", self.peek().pos)
        while True:
            predicate = self.verb()
            while True:
                obj = self.term()
                pattern.elements.append(TriplePattern(subject, predicate, obj))
                if not self.eat_punct(","):
                    break
            if self.eat_punct(";"):
                # Trailing ';' before '.' or '}' is legal.
                if self.at_punct(".") or self.at_punct("}") or self.eat_punct(";"):
                    break
                continue
            break

    def verb(self) -> Term:
        tok = self.peek()
        if tok.kind == "word" and tok.text == "a":
            self.advance()
            return Term(TermKind.OTHER_IRI, "a", "a")
        if tok.kind in ("pname", "iri", "var"):
            return self.term()
        raise _fail(f"expected a predicate, found {tok.text or 'end of input'!r}", tok.pos)

    def term(self) -> Term:
        tok = self.advance()
        if tok.kind == "pname":
            return _classify_pname(tok)
        if tok.kind == "iri":
            return Term(TermKind.OTHER_IRI, tok.text, tok.value)
        if tok.kind == "var":
            return Term(TermKind.VARIABLE, tok.text, tok.value)
        if tok.kind == "string":
            return Term(TermKind.LITERAL, tok.text, tok.value, datatype=tok.datatype)
        if tok.kind == "number":
            return _number_term(tok)
        if tok.kind == "word" and tok.text.upper() in ("TRUE", "FALSE"):
            return Term(TermKind.LITERAL, tok.text, tok.text.lower(), datatype="boolean")
        raise _fail(f"expected a term, found {tok.text or 'end of input'!r}", tok.pos)

    # -- expressions (validated, not evaluated) ----------------------------

    def expression(self) -> None:
        self.depth += 1
        if self.depth > _MAX_GROUP_DEPTH:
            raise _fail("expression nesting too deep", self.peek().pos)
        try:
            self.and_expression()
            while self.peek().kind == "op" and self.peek().text == "||":
                self.advance()
                self.and_expression()
        finally:
            self.depth -= 1

    def and_expression(self) -> None:
        self.relational()
        while self.peek().kind == "op" and self.peek().text == "&&":
            self.advance()
            self.relational()

    def relational(self) -> None:
        self.additive()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("=", "!=", "<", ">", "<=", ">="):
            self.advance()
            self.additive()

    def additive(self) -> None:
        self.multiplicative()
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            self.advance()
            self.multiplicative()

    def multiplicative(self) -> None:
        self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            self.advance()
            self.unary()

    def unary(self) -> None:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("!", "-", "+"):
            self.advance()
            self.unary()
            return
        self.primary()

    def primary(self) -> None:
        tok = self.peek()
        if self.at_punct("("):
            self.advance()
            self.expression()
            self.expect_punct(")")
            return
        if tok.kind == "word":
            if tok.text.upper() in ("TRUE", "FALSE"):
                self.advance()
                return
            self.function_call()
            return
        if tok.kind == "pname":
            self.advance()
            if self.at_punct("("):
                self.arguments()
            return
        if tok.kind in ("var", "string", "number", "iri"):
            self.advance()
            return
        raise _fail(f"expected an expression, found {tok.text or 'end of input'!r}", tok.pos)

    def function_call(self) -> None:
        name = self.advance()
        if name.kind != "word":
            raise _fail("expected a function name", name.pos)
        if not self.at_punct("("):
            raise _fail(f"expected '(' after {name.text}", self.peek().pos)
        self.arguments()

    def arguments(self) -> None:
        self.expect_punct("(")
        self.eat_kw("DISTINCT")
        if self.eat_punct(")"):
            return
        if self.peek().kind == "op" and self.peek().text == "*":
            self.advance()
            self.expect_punct(")")
            return
        self.expression()
        while self.eat_punct(","):
            self.expression()
        self.expect_punct(")")

    # -- solution modifiers -------------------------------------------------

    def modifiers(self) -> tuple[int | None, int | None]:
        limit: int | None = None
        offset: int | None = None
        if self.at_kw("GROUP"):
            self.advance()
            self.expect_kw("BY")
            self.group_or_order_condition(order=False)
            while self.condition_starts():
                self.group_or_order_condition(order=False)
        if self.at_kw("HAVING"):
            raise _fail("HAVING is not supported in this query subset", self.peek().pos)
        if self.at_kw("ORDER"):
            self.advance()
            self.expect_kw("BY")
            self.group_or_order_condition(order=True)
            while self.condition_starts():
                self.group_or_order_condition(order=True)
        while self.at_kw("LIMIT", "OFFSET"):
            is_limit = self.peek().text.upper() == "LIMIT"
            self.advance()
            tok = self.advance()
            if tok.kind != "number" or not tok.text.isdigit():
                raise _fail("expected a non-negative integer", tok.pos)
            if is_limit:
                if limit is not None:
                    raise _fail("duplicate LIMIT", tok.pos)
                limit = int(tok.text)
            else:
                if offset is not None:
                    raise _fail("duplicate OFFSET", tok.pos)
                offset = int(tok.text)
        return limit, offset

    def condition_starts(self) -> bool:
        tok = self.peek()
        if tok.kind == "var" or self.at_punct("("):
            return True
        if tok.kind == "word" and tok.text.upper() not in (
            "GROUP", "ORDER", "LIMIT", "OFFSET", "HAVING",
        ):
            return True
        return False

    def group_or_order_condition(self, order: bool) -> None:
        tok = self.peek()
        if tok.kind == "var":
            self.advance()
            return
        if order and self.at_kw("ASC", "DESC"):
            self.advance()
            self.expect_punct("(")
            self.expression()
            self.expect_punct(")")
            return
        if self.at_punct("("):
            self.advance()
            self.expression()
            if self.eat_kw("AS"):
                alias = self.advance()
                if alias.kind != "var":
                    raise _fail("expected a variable after AS", alias.pos)
            self.expect_punct(")")
            return
        if tok.kind == "word":
            self.function_call()
            return
        raise _fail("expected a grouping or ordering condition", tok.pos)


def parse_query(text: str) -> ParsedQuery:
    """Parse a query or raise InvalidQuery with the failure position."""
    return _Parser(text).parse()

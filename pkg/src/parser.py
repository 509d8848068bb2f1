"""
Polynomial expression parser
Turns expression strings into ring elements; printing lives with Poly in src.poly
"""

import re
from typing import List, NamedTuple, Optional

from src.poly import NotAUnitError, Poly, PolyRing


class ParseError(ValueError):
    """Raised for malformed expression text; position is a 0-based character offset"""

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


class Token(NamedTuple):
    kind: str
    value: str
    position: int


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")
_OPERATORS = set("+-*/^()")


def tokenize(text: str) -> List[Token]:
    """Split expression text into NUMBER, IDENT and operator tokens"""
    tokens: List[Token] = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None or match.end() == position:
            break
        number, ident, other = match.groups()
        start = match.start(match.lastindex) if match.lastindex else match.end()
        if number is not None:
            tokens.append(Token("NUMBER", number, start))
        elif ident is not None:
            tokens.append(Token("IDENT", ident, start))
        elif other is not None:
            if other not in _OPERATORS:
                raise ParseError(f"unexpected character {other!r}", start, text)
            tokens.append(Token(other, other, start))
        position = match.end()
    tokens.append(Token("END", "", len(text)))
    return tokens


class Parser:
    """
    Recursive-descent parser over the grammar

        expr  := term (('+' | '-') term)*
        term  := unary (('*' | '/') unary)*
        unary := ('-' | '+') unary | power
        power := atom ('^' NUMBER)?
        atom  := NUMBER | IDENT | '(' expr ')'

    Division is allowed only by units of the ring (nonzero constants and
    products of inverted elements), which covers rationals p/q.
    """

    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.position, self.text)

    def parse(self) -> Poly:
        if self.current.kind == "END":
            raise self.error("empty expression")
        result = self.expr()
        if self.current.kind != "END":
            raise self.error(f"unexpected {self.current.value!r}")
        return result

    def expr(self) -> Poly:
        result = self.term()
        while self.current.kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            result = result + rhs if op == "+" else result - rhs
        return result

    def term(self) -> Poly:
        result = self.unary()
        while self.current.kind in ("*", "/"):
            op = self.advance()
            rhs_token = self.current
            rhs = self.unary()
            if op.kind == "*":
                result = result * rhs
                continue
            if rhs.is_zero:
                raise self.error("division by zero", rhs_token)
            try:
                result = result * self.ring.inverse(rhs)
            except NotAUnitError:
                raise self.error(f"cannot divide by non-unit {rhs}", rhs_token) from None
        if self.current.kind in ("NUMBER", "IDENT", "("):
            raise self.error("missing operator (juxtaposition is not multiplication)")
        return result

    def unary(self) -> Poly:
        if self.current.kind == "-":
            self.advance()
            return -self.unary()
        if self.current.kind == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.current.kind != "^":
            return base
        self.advance()
        token = self.current
        if token.kind == "-":
            raise self.error("exponents must be nonnegative integers")
        if token.kind != "NUMBER":
            raise self.error("expected an integer exponent")
        self.advance()
        if self.current.kind == "^":
            raise self.error("chained exponents need parentheses")
        return base ** int(token.value)

    def atom(self) -> Poly:
        token = self.current
        if token.kind == "NUMBER":
            self.advance()
            return self.ring.constant(int(token.value))
        if token.kind == "IDENT":
            self.advance()
            if token.value not in self.ring.variables:
                raise self.error(f"unknown variable {token.value!r}", token)
            return self.ring.var(token.value)
        if token.kind == "(":
            self.advance()
            inner = self.expr()
            if self.current.kind != ")":
                raise self.error("expected ')'")
            self.advance()
            return inner
        if token.kind == "END":
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected {token.value!r}")


def parse(text: str, ring: PolyRing) -> Poly:
    """
    Parse an expression string into an element of ring

    Args:
        text: Expression such as "y - x^2" or "3/2*y/x"
        ring: Ring whose variables the expression may reference

    Returns:
        The parsed element in canonical form

    Raises:
        ParseError: malformed text, unknown variable or non-unit divisor
    """
    return Parser(text, ring).parse()

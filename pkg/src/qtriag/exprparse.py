"""Text grammar for expressions over the deformed-generator alphabet.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := unit ('*'? unit)*
    unit   := coeff | factor
    factor := gen ('^' int)?
    gen    := 'a' | 'b' | 'as' | 'bs' | 'ai' | 'asi'
    coeff  := '(' gausslit ')' | rat | rat 'i' | 'i' | spow
    spow   := 's' ('^' int)?
    rat    := '-'? digits ('/' digits)?

``as``/``bs`` spell the adjoints, ``ai``/``asi`` the inverses; q has no
token of its own and is written ``s^8``.  Tokenization is longest-match, so
juxtaposed factors need no separator: ``asbs`` is as * bs.

:func:`format_expr` emits canonical text that reparses to an equal
expression (scalars split into one printed term per s-power).
"""

from __future__ import annotations

import re
from fractions import Fraction

from .coeffs import GaussQ, Scalar
from .ncpoly import NCExpr, PresentationError

#: token -> (generator name, exponent sign carried by the token)
QTRIAG_TOKENS: dict[str, tuple[str, int]] = {
    "a": ("a", 1),
    "b": ("b", 1),
    "as": ("as", 1),
    "bs": ("bs", 1),
    "ai": ("a", -1),
    "asi": ("as", -1),
}


class ExprSyntaxError(ValueError):
    """Parse failure; carries the offending position in the input."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>asi|ai|as|bs|a|b|s|i)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        if m.group("num"):
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name"):
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, gen_tokens: dict[str, tuple[str, int]]):
        self.text = text
        self.tokens = _tokenize(text)
        self.idx = 0
        self.gen_tokens = gen_tokens

    def peek(self):
        return self.tokens[self.idx] if self.idx < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", len(self.text))
        self.idx += 1
        return tok

    def expect_op(self, op: str):
        tok = self.next()
        if tok[0] != "op" or tok[1] != op:
            raise ExprSyntaxError(f"expected {op!r}", tok[2])

    # -- grammar ---------------------------------------------------------

    def parse_expr(self) -> NCExpr:
        acc = self.parse_term()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                self.next()
                term = self.parse_term()
                acc = acc + (term if tok[1] == "+" else -term)
            else:
                break
        return acc

    def parse_term(self) -> NCExpr:
        coeff = Scalar.one()
        word: list[tuple[str, int]] = []
        saw_unit = False
        lead = self.peek()
        if lead and lead[0] == "op" and lead[1] == "-":
            self.next()
            coeff = -coeff
        while True:
            tok = self.peek()
            if tok is None:
                break
            kind, val, pos = tok
            if kind == "op" and val == "*":
                self.next()
                continue
            if kind == "op" and val == "(":
                coeff = coeff * self.parse_paren_gauss()
            elif kind == "num":
                coeff = coeff * self.parse_scalar_atom()
            elif kind == "name" and val == "i":
                self.next()
                coeff = coeff * Scalar.from_gauss(GaussQ.of(0, 1))
            elif kind == "name" and val == "s":
                self.next()
                coeff = coeff * Scalar.s_power(self.parse_opt_exponent())
            elif kind == "name" and val in self.gen_tokens:
                self.next()
                name, sign = self.gen_tokens[val]
                exp = sign * self.parse_opt_exponent()
                if exp != 0:
                    word.append((name, exp))
            elif kind == "name":
                raise ExprSyntaxError(f"unknown generator {val!r}", pos)
            else:
                break
            saw_unit = True
        if not saw_unit:
            tok = self.peek()
            raise ExprSyntaxError("expected a term", tok[2] if tok else len(self.text))
        return NCExpr.word(tuple(word), coeff=coeff)

    def parse_opt_exponent(self) -> int:
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "^":
            self.next()
            return self.parse_int()
        return 1

    def parse_int(self) -> int:
        sign = 1
        tok = self.next()
        if tok[0] == "op" and tok[1] == "-":
            sign = -1
            tok = self.next()
        if tok[0] != "num":
            raise ExprSyntaxError("expected an integer", tok[2])
        return sign * int(tok[1])

    def parse_rational(self) -> Fraction:
        sign = 1
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "-":
            self.next()
            sign = -1
        tok = self.next()
        if tok[0] != "num":
            raise ExprSyntaxError("expected a rational", tok[2])
        num = int(tok[1])
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] == "/":
            self.next()
            den_tok = self.next()
            if den_tok[0] != "num":
                raise ExprSyntaxError("expected a denominator", den_tok[2])
            return Fraction(sign * num, int(den_tok[1]))
        return Fraction(sign * num)

    def parse_scalar_atom(self) -> Scalar:
        """rat ['i'] outside parentheses."""
        r = self.parse_rational()
        tok = self.peek()
        if tok and tok[0] == "name" and tok[1] == "i":
            self.next()
            return Scalar.from_gauss(GaussQ(Fraction(0), r))
        return Scalar.from_gauss(GaussQ(r))

    def parse_paren_gauss(self) -> Scalar:
        """'(' rat ['i'] [('+'|'-') rat ['i']] ')' with at most one i part."""
        self.expect_op("(")
        re_part = Fraction(0)
        im_part = Fraction(0)
        r = self.parse_rational()
        tok = self.peek()
        if tok and tok[0] == "name" and tok[1] == "i":
            self.next()
            im_part += r
        else:
            re_part += r
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] in "+-":
                sign = 1 if tok[1] == "+" else -1
                self.next()
                r2 = self.parse_rational()
                itok = self.next()
                if itok[0] != "name" or itok[1] != "i":
                    raise ExprSyntaxError("expected 'i' after imaginary part", itok[2])
                im_part += sign * r2
        self.expect_op(")")
        return Scalar.from_gauss(GaussQ(re_part, im_part))


def parse_expr(text: str,
               gen_tokens: dict[str, tuple[str, int]] = QTRIAG_TOKENS) -> NCExpr:
    """Parse arity-1 expression text; raises ExprSyntaxError with position."""
    parser = _Parser(text, gen_tokens)
    expr = parser.parse_expr()
    tok = parser.peek()
    if tok is not None:
        raise ExprSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    return expr


# ---------------------------------------------------------------------------
# canonical printing
# ---------------------------------------------------------------------------

_GEN_SPELLING = {"a": "a", "b": "b", "as": "as", "bs": "bs"}


def _format_word(w) -> str:
    parts = []
    for name, exp in w:
        spelled = _GEN_SPELLING.get(name, name)
        parts.append(spelled if exp == 1 else f"{spelled}^{exp}")
    return "*".join(parts)


def _format_gauss(g: GaussQ) -> str:
    sign = "+" if g.im >= 0 else "-"
    return f"({g.re}{sign}{abs(g.im)}i)"


def format_expr(e: NCExpr) -> str:
    """Canonical text form; for arity 1 it reparses to an equal expression."""
    if e.is_zero():
        return "0"
    pieces = []
    for factors in sorted(e.terms.keys()):
        coeff = e.terms[factors]
        words = " (x) ".join(_format_word(w) if w else "1" for w in factors)
        for spow in sorted(coeff.terms):
            g = coeff.terms[spow]
            head = _format_gauss(g)
            if spow:
                head += f"*s^{spow}"
            if any(factors):
                pieces.append(f"{head}*{words}")
            else:
                pieces.append(head)
    return " + ".join(pieces)

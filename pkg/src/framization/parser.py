"""Recursive-descent parser for scalar and element expressions.

Grammar (whitespace insensitive)::

    element  := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := ['-'] INT | '(' ['-'] INT ')'
    atom     := INT | NAME | '(' element ')'

Letter names are ``g1 G1 h1 t1 tau1 T Tinv`` plus ``e1`` for the framing
idempotent; parameter names are ``l m y0 y1.. u q Q u1.. x``.  ``^`` on a
framing letter sets its exponent mod d; on anything else it is repeated
multiplication, and negative powers are only allowed on scalars.
"""

from __future__ import annotations

import re
from typing import Mapping

from .freealg import BT, BTINV, Context, Element, Kind, Letter, Word, g, ginv, h, normalize_word, tau
from .scalar import UNIVERSE, Scalar, y0

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")
_LETTER = re.compile(r"^(g|G|h|t|tau|e)(\d+)$")
_PARAMS = set(UNIVERSE) | {"y0"}


class ParseError(ValueError):
    def __init__(self, message: str, src: str, pos: int):
        line = src.count("\n", 0, pos) + 1
        col = pos - (src.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        mo = _TOKEN.match(src, pos)
        num, name, op = mo.groups()
        start = mo.start(1) if num else mo.start(2) if name else mo.start(3)
        if num:
            tokens.append(("int", int(num), start))
        elif name:
            tokens.append(("name", name, start))
        else:
            if op not in "+-*/^()":
                raise ParseError(f"unexpected character {op!r}", src, start)
            tokens.append(("op", op, start))
        pos = mo.end()
    tokens.append(("end", None, len(src)))
    return tokens


class _Value:
    """Either a pure scalar or an element; scalars stay scalars for '/' and '^'."""

    __slots__ = ("scalar", "element", "tletter")

    def __init__(self, scalar=None, element=None, tletter=None):
        self.scalar = scalar
        self.element = element
        self.tletter = tletter


class _Parser:
    def __init__(self, src: str, ctx: Context | None, params: Mapping[str, Scalar]):
        self.src = src
        self.ctx = ctx
        self.params = params
        self.tokens = _tokenize(src)
        self.i = 0

    # -- token helpers ----------------------------------------------------

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}", tok)
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.src, tok[2])

    def at_op(self, *ops):
        tok = self.peek()
        return tok[0] == "op" and tok[1] in ops

    # -- value arithmetic -------------------------------------------------

    def as_element(self, v: _Value) -> Element:
        if v.element is not None:
            return v.element
        if self.ctx is None:
            raise AssertionError("scalar-only parse never builds elements")
        return Element.scalar(self.ctx, v.scalar)

    def add(self, a: _Value, b: _Value, sign: int) -> _Value:
        if a.scalar is not None and b.scalar is not None:
            return _Value(a.scalar + b.scalar if sign > 0 else a.scalar - b.scalar)
        x, y = self.as_element(a), self.as_element(b)
        return _Value(element=x + y if sign > 0 else x - y)

    def mul(self, a: _Value, b: _Value) -> _Value:
        if a.scalar is not None and b.scalar is not None:
            return _Value(a.scalar * b.scalar)
        if a.scalar is not None:
            return _Value(element=self.as_element(b).scale(a.scalar))
        if b.scalar is not None:
            return _Value(element=self.as_element(a).scale(b.scalar))
        return _Value(element=a.element * b.element)

    # -- grammar ----------------------------------------------------------

    def parse(self) -> _Value:
        v = self.element()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return v

    def element(self) -> _Value:
        v = self.term()
        while self.at_op("+", "-"):
            sign = 1 if self.take()[1] == "+" else -1
            v = self.add(v, self.term(), sign)
        return v

    def term(self) -> _Value:
        v = self.unary()
        while self.at_op("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op[1] == "*":
                v = self.mul(v, rhs)
            else:
                if rhs.scalar is None:
                    self.fail("can only divide by a scalar", op)
                if rhs.scalar.is_zero():
                    self.fail("division by zero", op)
                v = self.mul(v, _Value(rhs.scalar.inverse()))
        return v

    def unary(self) -> _Value:
        if self.at_op("-"):
            self.take()
            return self.mul(_Value(Scalar(-1)), self.unary())
        if self.at_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> int:
        paren = self.at_op("(")
        if paren:
            self.take()
        sign = 1
        if self.at_op("-"):
            self.take()
            sign = -1
        tok = self.take()
        if tok[0] != "int":
            self.fail("expected an integer exponent", tok)
        if paren:
            self.expect(")")
        return sign * tok[1]

    def power(self) -> _Value:
        base = self.atom()
        if not self.at_op("^"):
            return base
        caret = self.take()
        k = self.exponent()
        if base.tletter is not None:
            i, e = base.tletter
            return _Value(element=Element.word(self.ctx, self.ctx.tpow(i, e * k)))
        if base.scalar is not None:
            if k < 0 and base.scalar.is_zero():
                self.fail("zero to a negative power", caret)
            return _Value(base.scalar**k)
        if k < 0:
            self.fail("negative exponent on a non-framing, non-scalar factor", caret)
        return _Value(element=base.element**k)

    def atom(self) -> _Value:
        tok = self.take()
        kind, val, _ = tok
        if kind == "int":
            return _Value(Scalar(val))
        if kind == "op" and val == "(":
            v = self.element()
            self.expect(")")
            return v
        if kind == "name":
            if val in _PARAMS:
                if val == "y0":
                    return _Value(y0())
                return _Value(self.params.get(val, Scalar.var(val)))
            return self.letter(val, tok)
        self.fail("unexpected token", tok)

    def letter(self, name: str, tok) -> _Value:
        ctx = self.ctx
        if ctx is None:
            self.fail(f"{name!r} is not a scalar parameter", tok)
        if name in ("T", "Tinv"):
            return _Value(element=Element.letter(ctx, BT if name == "T" else BTINV))
        mo = _LETTER.match(name)
        if not mo:
            self.fail(f"unknown name {name!r}", tok)
        head, i = mo.group(1), int(mo.group(2))
        if head == "t":
            if not 1 <= i <= ctx.n:
                self.fail(f"index {i} out of range for t (n={ctx.n})", tok)
            return _Value(element=Element.word(ctx, ctx.tpow(i, 1)), tletter=(i, 1))
        if not 1 <= i <= ctx.n - 1:
            self.fail(f"index {i} out of range for {head} (n={ctx.n})", tok)
        if head == "e":
            from .algebras import e_element

            return _Value(element=e_element(i, ctx.d, ctx.n))
        letter = {"g": g, "G": ginv, "h": h, "tau": tau}[head](i)
        return _Value(element=Element.letter(ctx, letter))


def parse_expression(src: str, ctx: Context, params: Mapping[str, Scalar] | None = None) -> Element:
    """Parse ``src`` into an element over ``ctx``.

    ``params`` optionally fixes parameter names to given scalars.
    """
    v = _Parser(src, ctx, params or {}).parse()
    return v.element if v.element is not None else Element.scalar(ctx, v.scalar)


parse_element = parse_expression


def parse_scalar(src: str, params: Mapping[str, Scalar] | None = None) -> Scalar:
    v = _Parser(src, None, params or {}).parse()
    return v.scalar


def parse_word(src: str, ctx: Context) -> Word:
    """Parse a bare ``*``-separated word such as ``t1^2*h1``; ``1`` is empty."""
    src = src.strip()
    if src == "1":
        return ()
    letters: list[Letter] = []
    for part in src.split("*"):
        part = part.strip()
        name, _, exp = part.partition("^")
        if name == "T":
            letters.append(BT)
            continue
        if name == "Tinv":
            letters.append(BTINV)
            continue
        mo = _LETTER.match(name)
        if not mo or mo.group(1) == "e":
            raise ParseError(f"bad letter {part!r}", src, src.find(part))
        head, i = mo.group(1), int(mo.group(2))
        if head == "t":
            letters.append(Letter(Kind.TPOW, i, int(exp or 1)))
        else:
            if exp:
                raise ParseError(f"exponent on {name!r} in a word", src, src.find(part))
            letters.append({"g": g, "G": ginv, "h": h, "tau": tau}[head](i))
    word = normalize_word(letters, ctx.d)
    for letter in word:
        ctx.check_letter(letter)
    return word

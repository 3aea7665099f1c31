"""Words and Scalar-linear combinations of words over the generator alphabet.

Nothing here applies a relation of any algebra except the two that are
built into the alphabet: framing letters carry an exponent reduced mod
``d``, and adjacent framing letters with the same index are merged.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Mapping, NamedTuple

from .scalar import ONE, ZERO, Scalar, as_scalar


class Kind(IntEnum):
    """Letter kinds, listed in term-order precedence (t < h < g < ...)."""

    TPOW = 0
    H = 1
    G = 2
    GINV = 3
    BT = 4
    BTINV = 5
    TAU = 6


class Letter(NamedTuple):
    kind: Kind
    index: int
    exp: int = 0

    def __str__(self):
        kind = self.kind
        if kind is Kind.TPOW:
            return f"t{self.index}^{self.exp}"
        if kind is Kind.G:
            return f"g{self.index}"
        if kind is Kind.GINV:
            return f"G{self.index}"
        if kind is Kind.H:
            return f"h{self.index}"
        if kind is Kind.TAU:
            return f"tau{self.index}"
        if kind is Kind.BT:
            return "T"
        return "Tinv"


Word = tuple  # tuple[Letter, ...]


def g(i: int) -> Letter:
    return Letter(Kind.G, i)


def ginv(i: int) -> Letter:
    return Letter(Kind.GINV, i)


def h(i: int) -> Letter:
    return Letter(Kind.H, i)


def t(i: int, k: int = 1) -> Letter:
    return Letter(Kind.TPOW, i, k)


def tau(i: int) -> Letter:
    return Letter(Kind.TAU, i)


BT = Letter(Kind.BT, 0)
BTINV = Letter(Kind.BTINV, 0)


def inverse_letter(letter: Letter) -> Letter | None:
    """The formal inverse letter, when the alphabet has one."""
    kind = letter.kind
    if kind is Kind.G:
        return Letter(Kind.GINV, letter.index)
    if kind is Kind.GINV:
        return Letter(Kind.G, letter.index)
    if kind is Kind.BT:
        return BTINV
    if kind is Kind.BTINV:
        return BT
    return None


@dataclass(frozen=True)
class Context:
    """The concrete (d, n) an element lives over."""

    d: int = 1
    n: int = 2

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")

    def check_letter(self, letter: Letter) -> None:
        kind, i = letter.kind, letter.index
        if kind is Kind.TPOW:
            ok = 1 <= i <= self.n and 0 < letter.exp < self.d
        elif kind in (Kind.BT, Kind.BTINV):
            ok = i == 0
        else:
            ok = 1 <= i <= self.n - 1
        if not ok:
            raise ValueError(f"letter {letter} outside the alphabet for d={self.d}, n={self.n}")

    def tpow(self, i: int, k: int) -> Word:
        """The word for t_i^k, empty when k is 0 mod d."""
        k %= self.d
        return (Letter(Kind.TPOW, i, k),) if k else ()


def normalize_word(letters: Iterable[Letter], d: int) -> Word:
    """Reduce framing exponents mod d and merge adjacent equal-index t's."""
    out: list[Letter] = []
    for letter in letters:
        if letter.kind is Kind.TPOW:
            k = letter.exp % d
            if out and out[-1].kind is Kind.TPOW and out[-1].index == letter.index:
                k = (k + out.pop().exp) % d
            if k:
                out.append(Letter(Kind.TPOW, letter.index, k))
        else:
            out.append(letter)
    return tuple(out)


def join(left: Word, right: Word, d: int) -> Word:
    """Concatenate two normalized words, merging across the seam only."""
    if not left or not right:
        return left or right
    a, b = left[-1], right[0]
    if a.kind is not Kind.TPOW or b.kind is not Kind.TPOW or a.index != b.index:
        return left + right
    i = len(left) - 1
    j = 0
    out = list(left[:i])
    k = (a.exp + b.exp) % d
    j = 1
    while True:
        if k:
            out.append(Letter(Kind.TPOW, a.index, k))
            return tuple(out) + right[j:]
        # the merged letter vanished; the new neighbours may merge too
        if not out or j >= len(right):
            return tuple(out) + right[j:]
        a, b = out[-1], right[j]
        if a.kind is not Kind.TPOW or b.kind is not Kind.TPOW or a.index != b.index:
            return tuple(out) + right[j:]
        out.pop()
        k = (a.exp + b.exp) % d
        j += 1


def word_key(word: Word):
    """Sort key for the term order.

    Words compare first by the number of non-framing letters, then by
    the non-framing letters lexicographically, then by full length, then
    lexicographically letter by letter (t < h < g < G < T < Tinv < tau,
    smaller index first, smaller framing exponent first).  Framing letters
    are weightless in the leading components so that a relation may trade
    one braid letter for a framing-decorated lower one.
    """
    core = tuple(x for x in word if x.kind is not Kind.TPOW)
    return (len(core), core, len(word), word)


def word_compare(a: Word, b: Word) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    ka, kb = word_key(a), word_key(b)
    return (ka > kb) - (ka < kb)


def word_str(word: Word) -> str:
    return "*".join(str(x) for x in word) if word else "1"


class Element:
    """A finite Scalar-linear combination of words over a fixed context."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: Context, terms: Mapping[Word, object] | None = None):
        self.ctx = ctx
        clean: dict[Word, Scalar] = {}
        for word, coeff in (terms or {}).items():
            coeff = as_scalar(coeff)
            word = normalize_word(word, ctx.d)
            for letter in word:
                ctx.check_letter(letter)
            total = clean.get(word, ZERO) + coeff
            if total.is_zero():
                clean.pop(word, None)
            else:
                clean[word] = total
        self.terms = clean
        self._hash = None

    @classmethod
    def _make(cls, ctx, terms):
        obj = object.__new__(cls)
        obj.ctx = ctx
        obj.terms = terms
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, ctx: Context) -> "Element":
        return cls._make(ctx, {})

    @classmethod
    def unit(cls, ctx: Context) -> "Element":
        return cls._make(ctx, {(): ONE})

    @classmethod
    def scalar(cls, ctx: Context, c) -> "Element":
        c = as_scalar(c)
        return cls._make(ctx, {(): c} if c else {})

    @classmethod
    def word(cls, ctx: Context, word: Iterable[Letter], coeff=1) -> "Element":
        return cls(ctx, {tuple(word): coeff})

    @classmethod
    def letter(cls, ctx: Context, letter: Letter) -> "Element":
        return cls.word(ctx, (letter,))

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, word: Word) -> Scalar:
        return self.terms.get(tuple(word), ZERO)

    def words(self) -> list[Word]:
        """Support in descending term order."""
        return sorted(self.terms, key=word_key, reverse=True)

    def items(self) -> Iterator[tuple[Word, Scalar]]:
        for word in self.words():
            yield word, self.terms[word]

    def leading_word(self) -> Word:
        return max(self.terms, key=word_key)

    def __len__(self):
        return len(self.terms)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Element"):
        if self.ctx != other.ctx:
            raise ValueError(f"context mismatch: {self.ctx} vs {other.ctx}")

    def _lift(self, other):
        if isinstance(other, Element):
            self._check(other)
            return other
        try:
            return Element.scalar(self.ctx, as_scalar(other))
        except TypeError:
            return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for word, coeff in small.items():
            total = out.get(word)
            total = coeff if total is None else total + coeff
            if total.is_zero():
                del out[word]
            else:
                out[word] = total
        return Element._make(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Element._make(self.ctx, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "Element":
        c = as_scalar(c)
        if c.is_zero():
            return Element.zero(self.ctx)
        if c.is_one():
            return self
        return Element._make(self.ctx, {w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        d = self.ctx.d
        out: dict[Word, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = join(w1, w2, d)
                c = c1 * c2
                prev = out.get(w)
                if prev is not None:
                    c = prev + c
                    if c.is_zero():
                        del out[w]
                        continue
                out[w] = c
        return Element._make(self.ctx, out)

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __truediv__(self, other):
        try:
            return self.scale(as_scalar(other).inverse())
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Element.unit(self.ctx)
        for _ in range(k):
            out = out * self
        return out

    def map_words(self, fn) -> "Element":
        """Apply ``fn`` to every word (returning a word) and recollect."""
        out: dict[Word, Scalar] = {}
        for word, coeff in self.terms.items():
            new = normalize_word(fn(word), self.ctx.d)
            total = out.get(new, ZERO) + coeff
            if total.is_zero():
                out.pop(new, None)
            else:
                out[new] = total
        return Element._make(self.ctx, out)

    def map_coefficients(self, fn) -> "Element":
        out = {}
        for word, coeff in self.terms.items():
            c = fn(coeff)
            if not c.is_zero():
                out[word] = c
        return Element._make(self.ctx, out)

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.ctx == other.ctx and self.terms == other.terms
        try:
            other = Element.scalar(self.ctx, as_scalar(other))
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self.terms.items())))
        return self._hash

    # -- text -------------------------------------------------------------

    def __str__(self):
        return element_str(self)

    def __repr__(self):
        return f"Element({element_str(self)!r})"


def _coeff_prefix(c: Scalar) -> tuple[str, str]:
    """Split a coefficient into a sign and a printable factor ('' for 1)."""
    text = str(c)
    sign = "+"
    if text.startswith("-"):
        sign, text = "-", str(-c)
    if c.is_integer() or (c.den.is_one() and len(c.num) == 1):
        return sign, text
    return sign, f"({text})"


def element_str(a: Element) -> str:
    """Canonical text: terms by ascending word order, parseable back."""
    if a.is_zero():
        return "0"
    parts = []
    for word in sorted(a.terms, key=word_key):
        coeff = a.terms[word]
        sign, factor = _coeff_prefix(coeff)
        if not word:
            body = factor
        elif factor == "1":
            body = word_str(word)
        else:
            body = f"{factor}*{word_str(word)}"
        if not parts:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


def elem_add(a: Element, b: Element) -> Element:
    return a + b


def elem_mul(a: Element, b: Element) -> Element:
    return a * b


def elem_scale(c, a: Element) -> Element:
    return a.scale(c)


class Gens:
    """Shorthand constructors for elements over one context."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.one = Element.unit(ctx)

    def g(self, i):
        return Element.letter(self.ctx, g(i))

    def G(self, i):
        return Element.letter(self.ctx, ginv(i))

    def h(self, i):
        return Element.letter(self.ctx, h(i))

    def t(self, i, k=1):
        return Element.word(self.ctx, self.ctx.tpow(i, k))

    def tau(self, i):
        return Element.letter(self.ctx, tau(i))

    @property
    def T(self):
        return Element.letter(self.ctx, BT)

    @property
    def Tinv(self):
        return Element.letter(self.ctx, BTINV)

    def scalar(self, c):
        return Element.scalar(self.ctx, c)

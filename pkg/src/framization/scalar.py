"""Exact rational functions over Q in the algebra parameters.

Every :class:`Scalar` is stored as a pair of integer polynomials
``num/den`` in canonical form: the two are coprime (polynomial gcd and
integer content removed) and the leading coefficient of ``den`` is
positive under the graded-lex order of :data:`UNIVERSE`.  Equality of
field elements is therefore equality of representations.

The polynomial backend is FLINT's ``fmpz_mpoly`` (through python-flint).
All scalars share one polynomial ring over a fixed universe of names, so
values coming from different presentations can be mixed freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import flint

MAX_D = 8
MAX_R = 8

#: Parameter names in increasing monomial-order precedence.  ``x`` is a
#: formal commuting variable used for polynomial identities in one unknown.
UNIVERSE: tuple[str, ...] = (
    ("l", "m")
    + tuple(f"y{k}" for k in range(1, MAX_D))
    + ("u", "q", "Q")
    + tuple(f"u{k}" for k in range(1, MAX_R + 1))
    + ("x",)
)

# FLINT's lex puts the first generator highest, so hand it the reversed list.
_CTX = flint.fmpz_mpoly_ctx.get(tuple(reversed(UNIVERSE)), "deglex")
_GENS = dict(zip(reversed(UNIVERSE), _CTX.gens()))
_SLOT = {name: len(UNIVERSE) - 1 - k for k, name in enumerate(UNIVERSE)}
_ZERO = _CTX.from_dict({})
_ONE = _CTX.constant(1)


class PoleError(ZeroDivisionError):
    """Raised when a denominator vanishes at an evaluation point."""


@dataclass(frozen=True)
class ParameterField:
    """The ordered list of indeterminates a presentation works over."""

    indeterminates: tuple[str, ...]

    def __post_init__(self):
        names = self.indeterminates
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate indeterminates in {names}")
        for name in names:
            if name == "y0":
                raise ValueError("y0 is eliminated, never an indeterminate")
            if name not in _SLOT:
                raise ValueError(f"unknown parameter {name!r}")
        ranks = [_SLOT[name] for name in names]
        if ranks != sorted(ranks, reverse=True):
            raise ValueError("indeterminates must follow the fixed parameter order")

    def __contains__(self, name):
        return name in self.indeterminates

    def gens(self) -> tuple["Scalar", ...]:
        return tuple(Scalar.var(name) for name in self.indeterminates)


class Scalar:
    """An element of Q(l, m, y1, ..., u, q, Q, u1, ..., x) in canonical form."""

    __slots__ = ("num", "den", "_hash", "_text")

    def __init__(self, num=0, den=1):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = _canonical(num, den)
        self._hash = None
        self._text = None

    @classmethod
    def _raw(cls, num, den):
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        obj._text = None
        return obj

    @classmethod
    def var(cls, name: str) -> "Scalar":
        if name == "y0":
            return y0()
        try:
            return cls._raw(_GENS[name], _ONE)
        except KeyError:
            raise ValueError(f"unknown parameter {name!r}") from None

    @classmethod
    def from_fraction(cls, value) -> "Scalar":
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        from .parser import parse_scalar

        return parse_scalar(text)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.den.is_one() and self.num.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_integer(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return Fraction(int(self.num.leading_coefficient()) if not self.num.is_zero() else 0,
                        int(self.den.leading_coefficient()))

    def variables(self) -> frozenset[str]:
        used = set()
        for poly in (self.num, self.den):
            for exps in poly.monoms():
                for slot, e in enumerate(exps):
                    if e:
                        used.add(UNIVERSE[len(UNIVERSE) - 1 - slot])
        return frozenset(used)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.den == other.den:
            return Scalar._from_pair(self.num + other.num, self.den)
        # with g = gcd of the denominators only the gcd with g can be nontrivial
        g = self.den.gcd(other.den)
        d1, d2 = _div(self.den, g), _div(other.den, g)
        num = self.num * d2 + other.num * d1
        if num.is_zero():
            return ZERO
        if not g.is_one():
            c = num.gcd(g)
            if not c.is_one():
                num, g = _div(num, c), _div(g, c)
        return Scalar._signed(num, d1 * d2 * g)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_one() and other.den.is_one():
            return Scalar._raw(self.num * other.num, _ONE)
        # cross-cancel before multiplying; both inputs are already reduced
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        num = _div(self.num, g1) * _div(other.num, g2)
        den = _div(self.den, g2) * _div(other.den, g1)
        return Scalar._signed(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        return Scalar._signed(self.den, self.num)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return Scalar._raw(self.num**k, self.den**k)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(self.num.to_dict().items()), tuple(self.den.to_dict().items())))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    # -- evaluation and substitution -------------------------------------

    def evaluate(self, assignment: Mapping[str, object]) -> Fraction:
        """Exact value at a rational point.  Raises :class:`PoleError`."""
        missing = self.variables() - set(assignment)
        if missing:
            raise ValueError(f"assignment misses {sorted(missing)}")
        num = _eval_poly(self.num, assignment)
        den = _eval_poly(self.den, assignment)
        if den == 0:
            point = ", ".join(f"{k}={assignment[k]}" for k in sorted(assignment))
            raise PoleError(f"denominator vanishes at {point}")
        return num / den

    def substitute(self, mapping: Mapping[str, "Scalar"]) -> "Scalar":
        """Replace parameters by scalars (a field homomorphism where defined)."""
        mapping = {k: _coerce(v) for k, v in mapping.items() if k in self.variables()}
        if not mapping:
            return self
        num = _subs_poly(self.num, mapping)
        den = _subs_poly(self.den, mapping)
        if den.is_zero():
            raise PoleError(f"denominator vanishes under {sorted(mapping)}")
        return num / den

    # -- text -------------------------------------------------------------

    def __str__(self):
        if self._text is None:
            self._text = self._render()
        return self._text

    def _render(self) -> str:
        if self.den.is_one():
            return _poly_str(self.num)
        num = _poly_str(self.num)
        den = _poly_str(self.den)
        if len(self.num) > 1:
            num = f"({num})"
        if not _is_atom(self.den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"Scalar({str(self)!r})"

    # -- internals --------------------------------------------------------

    @staticmethod
    def _from_pair(num, den):
        if num.is_zero():
            return ZERO
        if den.is_one():
            return Scalar._raw(num, den)
        g = num.gcd(den)
        if not g.is_one():
            num = _div(num, g)
            den = _div(den, g)
        return Scalar._signed(num, den)

    @staticmethod
    def _signed(num, den):
        if num.is_zero():
            return ZERO
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return Scalar._raw(num, den)


def _as_poly(value):
    if isinstance(value, flint.fmpz_mpoly):
        return value
    if isinstance(value, int):
        return _CTX.constant(value)
    raise TypeError(f"cannot build a polynomial from {value!r}")


def _div(a, b):
    return a if b.is_one() else a / b


def _canonical(num, den):
    if num.is_zero():
        return _ZERO, _ONE
    g = num.gcd(den)
    num, den = _div(num, g), _div(den, g)
    if den.leading_coefficient() < 0:
        num, den = -num, -den
    return num, den


def _coerce(value):
    if isinstance(value, Scalar):
        return value
    if isinstance(value, int):
        return Scalar._raw(_CTX.constant(value), _ONE)
    if isinstance(value, Fraction):
        return Scalar.from_fraction(value)
    return NotImplemented


def _eval_poly(poly, assignment) -> Fraction:
    values = [Fraction(assignment.get(name, 0)) for name in reversed(UNIVERSE)]
    total = Fraction(0)
    for exps, coeff in poly.terms():
        term = Fraction(int(coeff))
        for value, e in zip(values, exps):
            if e:
                term *= value ** int(e)
        total += term
    return total


def _subs_poly(poly, mapping) -> Scalar:
    images = []
    for name in reversed(UNIVERSE):
        images.append(mapping[name] if name in mapping else Scalar.var(name))
    total = ZERO
    for exps, coeff in poly.terms():
        term = Scalar(int(coeff))
        for image, e in zip(images, exps):
            if e:
                term = term * image ** int(e)
        total = total + term
    return total


@lru_cache(maxsize=65536)
def _monomial_str(exps) -> str:
    # exponent slots run in reverse UNIVERSE order
    return "*".join(name if e == 1 else f"{name}^{e}"
                    for name, e in zip(UNIVERSE, reversed(exps)) if e)


def _poly_str(poly) -> str:
    if poly.is_zero():
        return "0"
    out = []
    for exps, coeff in poly.terms():
        coeff = int(coeff)
        mono = _monomial_str(tuple(exps))
        mag = abs(coeff)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(body if coeff > 0 else f"-{body}")
        else:
            out.append(f" + {body}" if coeff > 0 else f" - {body}")
    return "".join(out)


def _is_atom(poly) -> bool:
    """True for an integer or a single variable power (safe after '/')."""
    if poly.is_constant():
        return int(poly.leading_coefficient()) > 0
    if len(poly) != 1:
        return False
    exps, coeff = next(iter(poly.terms()))
    return int(coeff) == 1 and sum(1 for e in exps if e) == 1


ZERO = Scalar._raw(_ZERO, _ONE)
ONE = Scalar._raw(_ONE, _ONE)


def as_scalar(value) -> Scalar:
    out = _coerce(value)
    if out is NotImplemented:
        raise TypeError(f"not a scalar: {value!r}")
    return out


def y0() -> Scalar:
    """The distinguished value y = 1 + (1/l - l)/m."""
    l, m = Scalar.var("l"), Scalar.var("m")
    return 1 + (l.inverse() - l) / m


def substitute_y0(expr) -> Scalar:
    """Return ``expr`` with every ``y0`` replaced by ``1 + (1/l - l)/m``.

    ``expr`` may be a string in the scalar grammar (where ``y0`` is a
    reserved token) or an already-built Scalar, which never contains y0.
    """
    if isinstance(expr, Scalar):
        return expr
    return Scalar.parse(expr)


def scalars(names: Iterable[str]) -> tuple[Scalar, ...]:
    return tuple(Scalar.var(name) for name in names)

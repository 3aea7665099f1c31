"""Presentation catalog, the framing idempotents, framed braids and spanning sets.

Every algebra is given by an oriented rule list over the free algebra of
:mod:`framization.freealg`.  Rule names read ``family[instance]``; the
family says what the relation does (``gh-absorb`` is ``g_i h_i = l^-1 h_i``,
``t-through-g`` moves a framing letter left past a braid generator, ...).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .freealg import (
    BT,
    BTINV,
    Context,
    Element,
    Kind,
    Letter,
    Word,
    g,
    ginv,
    h,
    join,
    normalize_word,
    t,
    tau,
    word_key,
    word_str,
)
from .rewrite import DEFAULT_MAX_STEPS, Expansion, OrientationError, RewriteRule, RuleSystem
from .scalar import MAX_D, MAX_R, ONE, ParameterField, Scalar, as_scalar, y0

TAGS = (
    "BMW", "FBMW", "YH", "HECKE", "YTL", "SHECKE", "FSHECKE",
    "HB", "HB_CYC", "HB_INF", "FHB", "FHB_CYC", "FHB_INF",
)
FRAMED = frozenset({"FBMW", "YH", "YTL", "FSHECKE", "FHB", "FHB_CYC", "FHB_INF"})
CYCLOTOMIC = frozenset({"HB_CYC", "FHB_CYC"})
TH_COMMUTE = "topological-th-commute"

_KINDS = {
    "BMW": (Kind.G, Kind.GINV, Kind.H),
    "FBMW": (Kind.TPOW, Kind.G, Kind.GINV, Kind.H),
    "YH": (Kind.TPOW, Kind.G, Kind.GINV),
    "HECKE": (Kind.G, Kind.GINV),
    "YTL": (Kind.TPOW, Kind.G, Kind.GINV),
    "SHECKE": (Kind.G, Kind.GINV, Kind.TAU),
    "FSHECKE": (Kind.TPOW, Kind.G, Kind.GINV, Kind.TAU),
}
for _tag in ("HB", "HB_CYC", "HB_INF"):
    _KINDS[_tag] = (Kind.G, Kind.GINV, Kind.BT, Kind.BTINV)
for _tag in ("FHB", "FHB_CYC", "FHB_INF"):
    _KINDS[_tag] = (Kind.TPOW, Kind.G, Kind.GINV, Kind.BT, Kind.BTINV)


@dataclass(frozen=True)
class AlgebraKind:
    """A catalog entry: tag plus its numeric data and parameter overrides.

    ``params`` maps parameter names (``u``, ``q``, ``Q``, ``u1``...) to
    scalars; names left out stay indeterminate.  ``options`` holds rule
    flags; :data:`TH_COMMUTE` is on unless ``no-`` prefixed.
    """

    tag: str
    d: int = 1
    r: int | None = None
    params: tuple[tuple[str, Scalar], ...] = ()
    options: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown algebra tag {self.tag!r}; choose from {', '.join(TAGS)}")
        if self.tag in FRAMED:
            if not 1 <= self.d <= MAX_D:
                raise ValueError(f"d must lie in 1..{MAX_D}, got {self.d}")
        elif self.d != 1:
            raise ValueError(f"{self.tag} has no framing generators; d must be 1")
        if self.tag in CYCLOTOMIC:
            if self.r is None or not 1 <= self.r <= MAX_R:
                raise ValueError(f"{self.tag} needs a degree r in 1..{MAX_R}, got {self.r}")
        elif self.r is not None:
            raise ValueError(f"{self.tag} takes no degree r")
        allowed = set(parameter_names(self.tag, self.d, self.r))
        for name, _ in self.params:
            if name not in allowed:
                raise ValueError(f"{self.tag} has no parameter {name!r}")

    @classmethod
    def make(cls, tag: str, d: int = 1, r: int | None = None,
             params: Mapping[str, object] | None = None, options: Iterable[str] = ()):
        tag = tag.upper()
        items = tuple(sorted((k, as_scalar(v)) for k, v in (params or {}).items()))
        return cls(tag, d, r, items, frozenset(options))

    @property
    def framed(self) -> bool:
        return self.tag in FRAMED

    def param(self, name: str) -> Scalar:
        for key, value in self.params:
            if key == name:
                return value
        return Scalar.var(name)

    def option(self, name: str, default: bool) -> bool:
        if name in self.options:
            return True
        if "no-" + name in self.options:
            return False
        return default

    def describe(self) -> dict:
        out = {"kind": self.tag}
        if self.framed:
            out["d"] = self.d
        if self.r is not None:
            out["r"] = self.r
        for key, value in self.params:
            out[key] = str(value)
        if self.options:
            out["options"] = sorted(self.options)
        return out


def parameter_names(tag: str, d: int = 1, r: int | None = None) -> tuple[str, ...]:
    if tag == "BMW":
        return ("l", "m")
    if tag == "FBMW":
        return ("l", "m") + tuple(f"y{k}" for k in range(1, d))
    if tag in ("YH", "YTL", "FSHECKE", "FHB_INF"):
        return ("u",)
    if tag in ("HECKE", "SHECKE", "HB_INF"):
        return ("q",)
    if tag == "HB":
        return ("q", "Q")
    if tag == "HB_CYC":
        return ("q",) + tuple(f"u{k}" for k in range(1, (r or 0) + 1))
    if tag == "FHB":
        return ("u", "Q")
    if tag == "FHB_CYC":
        return ("u",) + tuple(f"u{k}" for k in range(1, (r or 0) + 1))
    raise ValueError(f"unknown algebra tag {tag!r}")


def parameter_field(kind: AlgebraKind) -> ParameterField:
    return ParameterField(parameter_names(kind.tag, kind.d, kind.r))


# -- the framing idempotent ---------------------------------------------------


def e_element(i: int, d: int, n: int) -> Element:
    """(1/d) * sum over s of t_i^s t_{i+1}^(d-s), exponents mod d."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"e_{i} needs 1 <= i <= n-1 (n={n})")
    ctx = Context(d, n)
    c = Scalar(1) / d
    terms = {}
    for s in range(d):
        terms[ctx.tpow(i, s) + ctx.tpow(i + 1, d - s)] = c
    return Element(ctx, terms)


# -- presentations ------------------------------------------------------------


class _Builder:
    def __init__(self, kind: AlgebraKind, ctx: Context):
        self.kind = kind
        self.ctx = ctx
        self.rules: list[RewriteRule] = []
        self.expansions: list[Expansion] = []
        self.n = ctx.n
        self.d = ctx.d
        self.one = Element.unit(ctx)

    def w(self, *letters: Letter, c=1) -> Element:
        return Element.word(self.ctx, letters, c)

    def e(self, i: int) -> Element:
        return e_element(i, self.d, self.n)

    def add(self, family: str, lhs: Iterable[Letter], rhs: Element, provenance: str):
        lhs = normalize_word(tuple(lhs), self.d)
        key = " ".join(str(x) for x in lhs)
        self.rules.append(RewriteRule(f"{family}[{key}]", lhs, rhs, provenance))

    def expansion(self, family: str, letter: Letter, rhs: Element, provenance: str):
        self.expansions.append(Expansion(f"{family}[{letter}]", letter, rhs, provenance))

    def idx(self):
        return range(1, self.n)

    def neighbours(self, i):
        return [j for j in (i - 1, i + 1) if 1 <= j <= self.n - 1]

    # -- shared blocks ----------------------------------------------------

    def inverse_cancel(self):
        for i in self.idx():
            self.add("inverse", (g(i), ginv(i)), self.one, "group law: g_i g_i^-1 = 1")
            self.add("inverse", (ginv(i), g(i)), self.one, "group law: g_i^-1 g_i = 1")

    def framing(self):
        """Commuting framing letters of order d, permuted by the braid generators."""
        d, n = self.d, self.n
        if d == 1:
            return
        exps = range(1, d)
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for a, b in itertools.product(exps, exps):
                    self.add("t-commute", (t(j, b), t(i, a)), self.w(t(i, a), t(j, b)),
                             "framing relation: t_i t_j = t_j t_i")
        for i in self.idx():
            for j in range(1, n + 1):
                sj = i + 1 if j == i else i if j == i + 1 else j
                for a in exps:
                    self.add("t-through-g", (g(i), t(j, a)), self.w(t(sj, a), g(i)),
                             "framing relation: t_j g_i = g_i t_{s_i(j)}")
                    self.add("t-through-g", (ginv(i), t(j, a)), self.w(t(sj, a), ginv(i)),
                             "consequence of t_j g_i = g_i t_{s_i(j)}, conjugated by g_i^-1")

    def braid(self):
        for i in self.idx():
            for j in range(i + 2, self.n):
                self.add("braid-far", (g(j), g(i)), self.w(g(i), g(j)),
                         "braid relation: g_i g_j = g_j g_i for |i-j| > 1")
        for i in range(1, self.n - 1):
            self.add("braid3", (g(i + 1), g(i), g(i + 1)), self.w(g(i), g(i + 1), g(i)),
                     "braid relation: g_i g_{i+1} g_i = g_{i+1} g_i g_{i+1}")

    # -- BMW and its framization -----------------------------------------

    def bmw(self, framed: bool):
        k = self.kind
        l, m = k.param("l"), k.param("m")
        li = l.inverse()
        y = y0().substitute({"l": l, "m": m})
        n = self.n
        self.inverse_cancel()
        if framed:
            self.framing()
            self.framed_h_rules(y)
        for i in self.idx():
            if framed:
                rhs = (self.one.scale(1 - m) - (self.e(i) * self.w(g(i))).scale(m)
                       + self.e(i).scale(m) + self.w(h(i), c=m * li))
                self.add("quadratic", (g(i), g(i)), rhs,
                         "framed quadratic: g_i^2 = (1-m) - m e_i (g_i - 1) + m l^-1 h_i")
            else:
                rhs = self.one - self.w(g(i), c=m) + self.w(h(i), c=m * li)
                self.add("quadratic", (g(i), g(i)), rhs, "quadratic: g_i^2 = 1 - m g_i + m l^-1 h_i")
        for i in self.idx():
            self.add("gh-absorb", (g(i), h(i)), self.w(h(i), c=li), "defining relation: g_i h_i = l^-1 h_i")
            self.add("hg-absorb", (h(i), g(i)), self.w(h(i), c=li), "derived relation: h_i g_i = l^-1 h_i")
            self.add("h-square", (h(i), h(i)), self.w(h(i), c=y),
                     "derived relation: h_i^2 = y h_i with y = 1 + (l^-1 - l)/m")
        for i in self.idx():
            for j in self.neighbours(i):
                self.add("hgh", (h(i), g(j), h(i)), self.w(h(i), c=l),
                         "defining relation: h_i g_{i+-1} h_i = l h_i")
        for i in self.idx():
            for j in self.neighbours(i):
                ax = "derived relation (held as axiom): "
                self.add("hhh", (h(i), h(j), h(i)), self.w(h(i)), ax + "h_i h_{i+-1} h_i = h_i")
                self.add("ggh", (g(j), g(i), h(j)), self.w(h(i), h(j)),
                         ax + "g_{i+-1} g_i h_{i+-1} = h_i h_{i+-1}")
                self.add("hgg", (h(i), g(j), g(i)), self.w(h(i), h(j)),
                         ax + "h_i g_{i+-1} g_i = h_i h_{i+-1}")
                self.add("ghh", (g(j), h(i), h(j)), self.w(ginv(i), h(j)),
                         ax + "g_{i+-1} h_i h_{i+-1} = g_i^-1 h_{i+-1}")
                self.add("hhg", (h(j), h(i), g(j)), self.w(h(j), ginv(i)),
                         ax + "h_{i+-1} h_i g_{i+-1} = h_{i+-1} g_i^-1")
                self.add("conjugate-h", (ginv(i), h(j), ginv(i)), self.w(g(j), h(i), g(j)),
                         ax + "g_{i+-1} h_i g_{i+-1} = g_i^-1 h_{i+-1} g_i^-1")
        for i in self.idx():
            for j in range(i + 2, n):
                self.add("h-far", (h(j), h(i)), self.w(h(i), h(j)),
                         "derived relation: h_i h_j = h_j h_i for |i-j| >= 2")
            for j in self.idx():
                if abs(i - j) >= 2:
                    self.add("gh-far", (g(i), h(j)), self.w(h(j), g(i)),
                             "derived: g_i h_j = h_j g_i for |i-j| >= 2 (h_j is a polynomial in g_j)")
        self.braid()
        for i in self.idx():
            if framed:
                c = (1 - m).inverse()
                rhs = (self.w(g(i), c=c) - (self.w(g(i)) * self.e(i)).scale(m * c)
                       - self.w(h(i), c=m) + self.e(i).scale(m))
                self.add("inverse-expand", (ginv(i),), rhs,
                         "g_i^-1 = (1-m)^-1 g_i - m (1-m)^-1 g_i e_i - m h_i + m e_i")
            else:
                rhs = self.w(g(i)) - self.w(h(i), c=m) + self.one.scale(m)
                self.add("inverse-expand", (ginv(i),), rhs, "derived relation: g_i^-1 = g_i - m h_i + m")

    def framed_h_rules(self, y):
        k = self.kind
        d, n = self.d, self.n
        exps = range(1, d)
        yk = [y] + [k.param(f"y{a}") for a in exps]
        for i in self.idx():
            for a in exps:
                self.add("t-slide", (t(i + 1, a), h(i)), self.w(t(i, a), h(i)),
                         "framing relation: t_i h_i = t_{i+1} h_i")
                self.add("t-slide", (h(i), t(i + 1, a)), self.w(h(i), t(i, a)),
                         "framing relation: h_i t_i = h_i t_{i+1}")
            for a in exps:
                self.add("h-loop", (h(i), t(i, a), h(i)), self.w(h(i), c=yk[a]),
                         "framing relation: h_i t_i^k h_i = y_k h_i")
            if k.option(TH_COMMUTE, True):
                for j in range(1, n + 1):
                    if j in (i, i + 1):
                        continue
                    for a in exps:
                        self.add("th-commute", (h(i), t(j, a)), self.w(t(j, a), h(i)),
                                 "derived: t_j h_i = h_i t_j for j not in {i, i+1}")
            for a, b in itertools.product(exps, exps):
                self.add("h-merge-t", (h(i), t(i, a), t(i + 1, b)), self.w(h(i), t(i, a + b)),
                         "framing relation: h_i t_{i+1} = h_i t_i, merged")
            for a in exps:
                ratio = yk[a] / y
                self.add("h-absorbs-t", (h(i), t(i, a)), self.w(h(i), c=ratio),
                         "derived: y_0 h_i t_i^k = y_k h_i")
                self.add("h-absorbs-t", (t(i, a), h(i)), self.w(h(i), c=ratio),
                         "derived: y_0 t_i^k h_i = y_k h_i")

    # -- Hecke-type algebras ---------------------------------------------

    def yokonuma_quadratic(self):
        u = self.kind.param("u")
        for i in self.idx():
            eg = self.e(i) * self.w(g(i))
            rhs = self.one + self.e(i).scale(u - 1) - eg.scale(u - 1)
            self.add("quadratic", (g(i), g(i)), rhs, "Yokonuma quadratic: g_i^2 = 1 + (u-1) e_i (1 - g_i)")

    def yokonuma_inverse(self):
        u = self.kind.param("u")
        c = 1 - u.inverse()
        for i in self.idx():
            rhs = self.w(g(i)) + self.e(i).scale(c) - (self.e(i) * self.w(g(i))).scale(c)
            self.add("inverse-expand", (ginv(i),), rhs,
                     "from the Yokonuma quadratic: g_i^-1 = g_i + (1 - u^-1) e_i (1 - g_i)")

    def hecke_quadratic(self):
        q = self.kind.param("q")
        for i in self.idx():
            self.add("quadratic", (g(i), g(i)), self.one.scale(q) + self.w(g(i), c=q - 1),
                     "Hecke quadratic: g_i^2 = q + (q-1) g_i")

    def hecke_inverse(self):
        q = self.kind.param("q")
        qi = q.inverse()
        for i in self.idx():
            self.add("inverse-expand", (ginv(i),), self.w(g(i), c=qi) + self.one.scale(qi - 1),
                     "from the Hecke quadratic: g_i^-1 = q^-1 g_i + (q^-1 - 1)")

    def ytl_quotient(self):
        for i in range(1, self.n - 1):
            j = i + 1
            rhs = -(self.w(g(i), g(j)) + self.w(g(j), g(i)) + self.w(g(i)) + self.w(g(j)) + self.one)
            self.add("ytl-quotient", (g(i), g(j), g(i)), rhs,
                     "quotient relation: g_i g_j g_i + g_i g_j + g_j g_i + g_i + g_j + 1 = 0, |i-j| = 1")

    def singular(self):
        n = self.n
        for i in self.idx():
            self.add("tau-commute", (tau(i), g(i)), self.w(g(i), tau(i)), "singular relation: g_i tau_i = tau_i g_i")
        for i in self.idx():
            for j in self.idx():
                if abs(i - j) > 1:
                    self.add("tau-far", (tau(j), g(i)), self.w(g(i), tau(j)),
                             "singular relation: g_i tau_j = tau_j g_i for |i-j| > 1")
                if j > i + 1:
                    self.add("tau-far", (tau(j), tau(i)), self.w(tau(i), tau(j)),
                             "singular relation: tau_i tau_j = tau_j tau_i for |i-j| > 1")
        for i in self.idx():
            for j in self.neighbours(i):
                self.add("tau-braid", (tau(j), g(i), g(j)), self.w(g(i), g(j), tau(i)),
                         "singular relation: g_i g_j tau_i = tau_j g_i g_j for |i-j| = 1")
        del n

    # -- B-type -----------------------------------------------------------

    def b_type(self, framed: bool):
        self.add("inverse", (BT, BTINV), self.one, "group law: T T^-1 = 1")
        self.add("inverse", (BTINV, BT), self.one, "group law: T^-1 T = 1")
        for i in range(2, self.n):
            self.add("T-far", (BT, g(i)), self.w(g(i), BT), "B-type relation: g_i T = T g_i for i > 1")
            self.add("T-far", (BTINV, g(i)), self.w(g(i), BTINV), "consequence of g_i T = T g_i for i > 1")
        if self.n >= 2:
            self.add("T-braid", (BT, g(1), BT, g(1)), self.w(g(1), BT, g(1), BT),
                     "B-type relation: g_1 T g_1 T = T g_1 T g_1")
        if framed and self.d > 1:
            for j in range(1, self.n + 1):
                for a in range(1, self.d):
                    self.add("T-framing", (BT, t(j, a)), self.w(t(j, a), BT),
                             "T permutes no strand: T t_j = t_j T")
                    self.add("T-framing", (BTINV, t(j, a)), self.w(t(j, a), BTINV),
                             "T permutes no strand: T^-1 t_j = t_j T^-1")

    def t_polynomial(self, coeffs: list[Scalar], provenance: str):
        """Impose sum c_k T^k = 0 (monic, degree r) and define T^-1 from it."""
        r = len(coeffs) - 1
        top = (BT,) * r
        rhs = Element.zero(self.ctx)
        for k in range(r):
            rhs = rhs - self.w(*(BT,) * k, c=coeffs[k])
        self.add("T-polynomial", top, rhs, provenance)
        c0 = coeffs[0]
        inv = Element.zero(self.ctx)
        for k in range(1, r + 1):
            inv = inv - self.w(*(BT,) * (k - 1), c=coeffs[k] / c0)
        text = "inverse of T read off its polynomial relation"
        if all(word_key(w) < word_key((BTINV,)) for w in inv.terms):
            self.add("T-inverse-expand", (BTINV,), inv, text)
        else:
            self.expansion("T-inverse-expand", BTINV, inv, text)


def _poly_from_roots(roots: list[Scalar]) -> list[Scalar]:
    """Coefficients (constant first) of prod (x - root)."""
    coeffs = [ONE]
    for root in roots:
        nxt = [Scalar(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] = nxt[k + 1] + c
            nxt[k] = nxt[k] - root * c
        coeffs = nxt
    return coeffs


def presentation(kind: AlgebraKind | str, n: int, *, max_steps: int = DEFAULT_MAX_STEPS, **kw) -> RuleSystem:
    """The oriented rule system of ``kind`` on ``n`` strands.

    ``kind`` may be a tag string, in which case ``kw`` is passed to
    :meth:`AlgebraKind.make` (``d``, ``r``, ``params``, ``options``).
    """
    if isinstance(kind, str):
        kind = AlgebraKind.make(kind, **kw)
    elif kw:
        raise TypeError("keyword options only apply when kind is a tag string")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    ctx = Context(kind.d, n)
    b = _Builder(kind, ctx)
    tag = kind.tag
    if tag in ("BMW", "FBMW"):
        b.bmw(framed=tag == "FBMW")
    elif tag in ("YH", "YTL", "FSHECKE", "FHB", "FHB_CYC", "FHB_INF"):
        b.inverse_cancel()
        b.framing()
        if tag in ("FHB", "FHB_CYC", "FHB_INF"):
            b.b_type(framed=True)
        b.yokonuma_quadratic()
        if tag == "YTL":
            b.ytl_quotient()
        if tag == "FSHECKE":
            b.singular()
        b.braid()
        b.yokonuma_inverse()
    else:
        b.inverse_cancel()
        if tag in ("HB", "HB_CYC", "HB_INF"):
            b.b_type(framed=False)
        b.hecke_quadratic()
        if tag == "SHECKE":
            b.singular()
        b.braid()
        b.hecke_inverse()
    if tag in ("HB", "FHB"):
        Q = kind.param("Q")
        b.t_polynomial([-Q, 1 - Q, ONE], "B-type quadratic: T^2 = (Q-1) T + Q")
    elif tag in CYCLOTOMIC:
        roots = [kind.param(f"u{k}") for k in range(1, kind.r + 1)]
        b.t_polynomial(_poly_from_roots(roots), "cyclotomic relation: (T - u_1) ... (T - u_r) = 0")
    meta = kind.describe()
    meta.pop("d", None)
    sys = RuleSystem(ctx, b.rules, expansions=b.expansions, kinds=_KINDS[tag],
                     max_steps=max(max_steps, DEFAULT_MAX_STEPS), meta=meta)
    if tag in ("BMW", "FBMW"):
        sys = _with_swap_lemmas(sys)
    return sys.with_max_steps(max_steps)


def _group_inverse(alpha: list[Scalar]) -> list[Scalar]:
    """Inverse of sum alpha_s x^s in Q(params)[x]/(x^d - 1), by a d x d solve."""
    d = len(alpha)
    rows = [[alpha[(k - r) % d] for r in range(d)] + [ONE if k == 0 else Scalar(0)] for k in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if not rows[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("framing coefficient is not invertible")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [x * inv for x in rows[col]]
        for r in range(d):
            if r != col and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [rows[k][d] for k in range(d)]


def _with_swap_lemmas(sys: RuleSystem) -> RuleSystem:
    """Append g_j h_i g_j -> g_i h_j g_i + ... (j = i+1) for every i.

    Both one-step reducts of g_j h_i h_j g_i give, after reduction,
    alpha * g_j h_i g_j + rest = 0 with alpha a polynomial in t_j alone.
    alpha is a unit of the group algebra of <t_j>, so the relation solves
    for g_j h_i g_j.  Without this rule the n = 3 overlaps do not join.
    The rule is skipped when its solved form does not orient.
    """
    from .rewrite import substitute_at

    ctx = sys.ctx
    d = ctx.d
    for i in range(1, ctx.n - 1):
        j = i + 1
        word = (g(j), h(i), h(j), g(i))
        left = substitute_at(word, 0, 3, sys.rule(f"ghh[g{j} h{i} h{j}]").rhs, d)
        right = substitute_at(word, 1, 3, sys.rule(f"hhg[h{i} h{j} g{i}]").rhs, d)
        (lnf, lex), (rnf, rex) = (sys.normal_form(Element._make(ctx, x)) for x in (left, right))
        if lex or rex:
            raise RuntimeError(f"step budget exhausted while deriving the g{j} h{i} g{j} rule")
        rel = lnf - rnf
        x = (g(j), h(i), g(j))
        alpha = [rel.coefficient(ctx.tpow(j, s) + x) for s in range(d)]
        rest = rel
        for s in range(d):
            rest = rest - Element.word(ctx, ctx.tpow(j, s) + x, alpha[s])
        beta = Element(ctx, {ctx.tpow(j, s): -c for s, c in enumerate(_group_inverse(alpha))})
        rhs = sys.normal_form(beta * rest)[0]
        try:
            rule = RewriteRule(f"swap-conjugate-h[g{j} h{i} g{j}]", x, rhs,
                               f"derived: joins the two reductions of g{j} h{i} h{j} g{i}")
        except OrientationError:
            # without t-h commutation the solved form is not below the left side
            continue
        sys = sys.with_rules(sys.rules + (rule,))
    return sys


# -- specialization t -> 1 ----------------------------------------------------


def specialize_t_to_one(a: Element) -> Element:
    """Image under t_i -> 1 (so y_k -> y_0), as an element over d = 1."""
    ctx = Context(1, a.ctx.n)
    y = y0()
    to_y0 = {f"y{k}": y for k in range(1, MAX_D)}
    out: dict[Word, Scalar] = {}
    for word, coeff in a.terms.items():
        bare = tuple(x for x in word if x.kind is not Kind.TPOW)
        c = coeff.substitute(to_y0) if any(v.startswith("y") for v in coeff.variables()) else coeff
        total = out.get(bare, Scalar(0)) + c
        if total.is_zero():
            out.pop(bare, None)
        else:
            out[bare] = total
    return Element._make(ctx, out)


# -- framed braids -------------------------------------------------------------


def braid_permutation(braid: Word, n: int) -> tuple[int, ...]:
    """The permutation p (0-based, p[j] = image of strand j) of a g/G word.

    Reading g_i t_j = t_{s_i(j)} g_i, a braid b carries t_j to t_{p(j)}
    when t_j is pushed leftward through b.
    """
    perm = list(range(n))
    for letter in reversed(braid):
        i = letter.index - 1
        perm = [i + 1 if x == i else i if x == i + 1 else x for x in perm]
    return tuple(perm)


@dataclass(frozen=True)
class FramedBraidNF:
    """An element of (Z/dZ)^n x| B_n: framings (strand 1 first) times a braid word."""

    framings: tuple[int, ...]
    braid: Word
    d: int

    def __mul__(self, other: "FramedBraidNF") -> "FramedBraidNF":
        if (self.d, len(self.framings)) != (other.d, len(other.framings)):
            raise ValueError("framed braids over different (d, n)")
        perm = braid_permutation(self.braid, len(self.framings))
        f = list(self.framings)
        for j, a in enumerate(other.framings):
            f[perm[j]] = (f[perm[j]] + a) % self.d
        return FramedBraidNF(tuple(f), self.braid + other.braid, self.d)

    def word(self) -> Word:
        """The word t_1^a1 ... t_n^an * braid."""
        pre = tuple(Letter(Kind.TPOW, j + 1, a) for j, a in enumerate(self.framings) if a)
        return pre + self.braid

    def __str__(self):
        return f"({', '.join(map(str, self.framings))}) {' '.join(map(str, self.braid)) or '1'}"


def framed_nf(word: Iterable[Letter], d: int, n: int) -> FramedBraidNF:
    """Move every framing letter to the far left through the braid letters.

    Braid letters are kept verbatim (no cancellation of g_i g_i^-1).
    """
    framings = [0] * n
    braid: list[Letter] = []
    for letter in word:
        if letter.kind is Kind.TPOW:
            if not 1 <= letter.index <= n:
                raise ValueError(f"{letter} outside n={n}")
            perm = braid_permutation(tuple(braid), n)
            j = perm[letter.index - 1]
            framings[j] = (framings[j] + letter.exp) % d
        elif letter.kind in (Kind.G, Kind.GINV):
            if not 1 <= letter.index <= n - 1:
                raise ValueError(f"{letter} outside n={n}")
            braid.append(letter)
        else:
            raise ValueError(f"framed_nf takes braid and framing letters only, got {letter}")
    return FramedBraidNF(tuple(framings), tuple(braid), d)


# -- spanning sets ----------------------------------------------------------------


@dataclass(frozen=True)
class SpanningSet:
    """The set X_n: t_n^s, g_{n-1} and t_{n-1}^s h_{n-1} t_{n-1}^r, 1 <= r, s <= d."""

    n: int
    d: int
    elements: tuple[tuple, ...] = field(init=False)

    def __post_init__(self):
        d = self.d
        items = [("t", s) for s in range(1, d + 1)]
        if self.n >= 2:
            items.append(("g",))
            items += [("h", s, r) for s in range(1, d + 1) for r in range(1, d + 1)]
        object.__setattr__(self, "elements", tuple(items))

    def __len__(self):
        return len(self.elements)

    def word(self, item) -> Word:
        n, d = self.n, self.d
        ctx = Context(d, n)
        if item[0] == "t":
            return ctx.tpow(n, item[1])
        if item[0] == "g":
            return (g(n - 1),)
        _, s, r = item
        return ctx.tpow(n - 1, s) + (h(n - 1),) + ctx.tpow(n - 1, r)


def dimension_bound(d: int, n: int) -> int:
    """Number of spanning monomials alpha f beta before deduplication."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    bound = d
    for _ in range(2, n + 1):
        bound = bound * bound * (d + 1 + d * d)
    return bound


class SpanningExhausted(RuntimeError):
    """The spanning reduction ran past its step budget."""


@dataclass(frozen=True)
class _Tok:
    start: int
    end: int
    kind: str  # "T" t_L^a, "g" g_{L-1}, "G" g_{L-1}^-1, "H" t_{L-1}^s h_{L-1} t_{L-1}^r
    a: int = 0
    b: int = 0


def _tokens(word: Word, level: int) -> list[_Tok]:
    """The X_level letters of ``word``, an h absorbing its adjacent t_{level-1} powers."""
    k = level - 1
    out: list[_Tok] = []
    i = 0
    while i < len(word):
        x = word[i]
        if x.kind is Kind.TPOW and x.index == level:
            out.append(_Tok(i, i + 1, "T", x.exp))
        elif x.kind in (Kind.G, Kind.GINV) and x.index == k:
            out.append(_Tok(i, i + 1, "g" if x.kind is Kind.G else "G"))
        elif x.kind is Kind.H and x.index == k:
            start, s, r, end = i, 0, 0, i + 1
            prev = word[i - 1] if i else None
            if prev and prev.kind is Kind.TPOW and prev.index == k and (not out or out[-1].end < i):
                start, s = i - 1, prev.exp
            nxt = word[i + 1] if i + 1 < len(word) else None
            if nxt and nxt.kind is Kind.TPOW and nxt.index == k:
                end, r = i + 2, nxt.exp
            out.append(_Tok(start, end, "H", s, r))
            i = end
            continue
        i += 1
    return out


class _Spanner:
    """Case reductions of the spanning argument inside one FBMW system."""

    def __init__(self, sys: RuleSystem):
        self.sys = sys
        self.ctx = sys.ctx
        self.d = sys.ctx.d
        self.memo: dict[tuple[Word, int], dict[Word, Scalar]] = {}
        self.active: set[tuple[Word, int]] = set()
        self.budget = sys.max_steps
        self.l_inv = as_scalar(sys.rule("gh-absorb[g1 h1]").rhs.coefficient((h(1),)))

    def el(self, *parts: Word, c=1) -> Element:
        word: Word = ()
        for p in parts:
            word = join(word, p, self.d)
        return Element.word(self.ctx, _sort_t_runs(word, self.d), c)

    def tw(self, i: int, a: int) -> Word:
        return self.ctx.tpow(i, a)

    def hw(self, k: int, s: int, r: int) -> Word:
        return self.tw(k, s) + (h(k),) + self.tw(k, r)

    def loop(self, k: int, a: int) -> Scalar:
        a %= self.d
        name = f"h-square[h{k} h{k}]" if a == 0 else f"h-loop[h{k} t{k}^{a} h{k}]"
        return self.sys.rule(name).rhs.coefficient((h(k),))

    def word_of(self, tok: _Tok, level: int) -> Word:
        k = level - 1
        if tok.kind == "T":
            return self.tw(level, tok.a)
        if tok.kind == "g":
            return (g(k),)
        if tok.kind == "G":
            return (ginv(k),)
        return self.hw(k, tok.a, tok.b)

    def pair(self, f1: _Tok, f2: _Tok, level: int) -> Element:
        """f1 f2 for two X_level letters: the nine cases."""
        k = level - 1
        a, b = f1.kind, f2.kind
        if a == "T" and b == "T":
            return self.el(self.tw(level, f1.a + f2.a))
        if a == "T" and b == "g":
            return self.el((g(k),), self.tw(k, f1.a))
        if a == "g" and b == "T":
            return self.el(self.tw(k, f2.a), (g(k),))
        if a == "T" and b == "H":
            return self.el(self.hw(k, f2.a + f1.a, f2.b))
        if a == "H" and b == "T":
            return self.el(self.hw(k, f1.a, f1.b + f2.a))
        if a == "g" and b == "g":
            return self.sys.rule(f"quadratic[g{k} g{k}]").rhs
        if a == "g" and b == "H":
            return self.el(self.hw(k, f2.a, f2.b), c=self.l_inv)
        if a == "H" and b == "g":
            return self.el(self.hw(k, f1.a, f1.b), c=self.l_inv)
        if a == "H" and b == "H":
            return self.el(self.hw(k, f1.a, f2.b), c=self.loop(k, f1.b + f2.a))
        raise AssertionError((a, b))

    def triple(self, f1: _Tok, f: _Tok, f2: _Tok, level: int, fw: Word) -> Element:
        """f1 f f2 with f an X_{level-1} letter whose word is ``fw``."""
        k = level - 1
        if f.kind == "T":
            ta = self.el(self.tw(k, f.a))
            if f1.kind == "T":
                return ta * self.pair(f1, f2, level)
            if f1.kind == "H":
                return self.pair(_Tok(0, 0, "H", f1.a, f1.b + f.a), f2, level)
            if f2.kind == "T":
                return self.pair(f1, f2, level) * ta
            if f2.kind == "H":
                return self.pair(f1, _Tok(0, 0, "H", f2.a + f.a, f2.b), level)
            if f1.kind == "g" and f2.kind == "g":
                return self.el(self.tw(level, f.a)) * self.pair(f1, f2, level)
        else:
            if f1.kind == "T":
                return self.el(fw) * self.pair(f1, f2, level)
            if f2.kind == "T":
                return self.pair(f1, f2, level) * self.el(fw)
            if f1.kind == "g" and f2.kind == "g":
                if f.kind == "g":
                    return self.el((g(k - 1), g(k), g(k - 1)))
                if f.kind == "H":
                    gi = (ginv(k - 1),)
                    return self.el(gi, self.hw(k, f.a, f.b), gi)
        lhs = self.el(self.word_of(f1, level), fw, self.word_of(f2, level))
        final, exhausted = self.sys.normal_form(lhs)
        if exhausted:
            raise SpanningExhausted(f"reducing {lhs}")
        return final

    def step(self, word: Word, level: int) -> Element | None:
        """One reduction of a non-conforming word, or None if it conforms."""
        toks = _tokens(word, level)
        for tok in toks:
            if tok.kind == "G":
                rhs = self.sys.rule(f"inverse-expand[G{level - 1}]").rhs
                return self.splice(word, tok.start, tok.end, rhs)
        if len(toks) <= 1:
            return None
        f1, f2 = toks[0], toks[1]
        m1, m2, m3 = word[:f1.start], word[f1.end:f2.start], word[f2.end:]
        inner = _tokens(m2, level - 1) if level >= 2 else []
        if not inner:
            return self.el(m1, m2) * self.pair(f1, f2, level) * self.el(m3)
        if len(inner) == 1:
            f = inner[0]
            a, fw, b = m2[:f.start], m2[f.start:f.end], m2[f.end:]
            return self.el(m1, a) * self.triple(f1, f, f2, level, fw) * self.el(b, m3)
        sub = self.run(m2, level - 1)
        return self.el(m1, self.word_of(f1, level)) * sub * self.el(self.word_of(f2, level), m3)

    def splice(self, word: Word, start: int, end: int, rhs: Element) -> Element:
        return self.el(word[:start]) * rhs * self.el(word[end:])

    def run(self, word: Word, level: int) -> Element:
        return Element._make(self.ctx, self.resolve(_sort_t_runs(word, self.d), level))

    def resolve(self, word: Word, level: int) -> dict[Word, Scalar]:
        key = (word, level)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if key in self.active:
            raise SpanningExhausted(f"spanning reduction of {word_str(word)} returns to itself")
        self.budget -= 1
        if self.budget < 0:
            raise SpanningExhausted(f"spanning reduction ran past {self.sys.max_steps} steps")
        out = self.step(word, level)
        if out is None:
            result = {word: ONE}
        else:
            self.active.add(key)
            result: dict[Word, Scalar] = {}
            for u, cu in out.terms.items():
                for v, cv in self.resolve(_sort_t_runs(u, self.d), level).items():
                    _acc(result, v, cu * cv)
            self.active.discard(key)
        self.memo[key] = result
        return result


def _sort_t_runs(word: Word, d: int) -> Word:
    """Sort each maximal run of framing letters by strand (they commute)."""
    out: list[Letter] = []
    run: list[Letter] = []
    for x in word + (None,):
        if x is not None and x.kind is Kind.TPOW:
            run.append(x)
            continue
        if run:
            out.extend(normalize_word(sorted(run, key=lambda y: y.index), d))
            run = []
        if x is not None:
            out.append(x)
    return tuple(out)


def _acc(terms: dict[Word, Scalar], word: Word, c: Scalar):
    total = terms.get(word)
    total = c if total is None else total + c
    if total.is_zero():
        terms.pop(word, None)
    else:
        terms[word] = total


def conforms(word: Word, n: int) -> bool:
    """Whether ``word`` has at most one X_n letter and no g_{n-1}^-1."""
    toks = _tokens(word, n)
    return len(toks) <= 1 and all(tok.kind != "G" for tok in toks)


def spanning_reduce(mono: Iterable[Letter], sys: RuleSystem) -> Element:
    """Rewrite a monomial of F_{d,n} into a combination of alpha f beta words.

    f is one X_n letter; alpha and beta use g_i, h_i (i <= n-2), their
    inverses and t_1..t_{n-1}.  The two leftmost X_n letters f1, f2 are
    brought together: directly when nothing between them lies in X_{n-1},
    through the triple f1 f f2 when exactly one X_{n-1} letter f does, and
    after reducing the middle at level n-1 otherwise.
    """
    if sys.meta.get("kind") not in ("FBMW", "BMW"):
        raise ValueError("spanning_reduce needs a BMW or FBMW system")
    word = normalize_word(tuple(mono), sys.ctx.d)
    sys.check(Element.word(sys.ctx, word))
    if sys.ctx.n < 2:
        return Element.word(sys.ctx, word)
    return _Spanner(sys).run(word, sys.ctx.n)


@dataclass
class SpanEnumeration:
    """Distinct reduced alpha f beta elements, with the candidate count and exhausted inputs."""

    d: int
    n: int
    elements: list[Element]
    candidates: int
    exhausted: list[str]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "candidates": self.candidates,
            "distinct": len(self.elements),
            "bound": dimension_bound(self.d, self.n),
            "elements": [str(a) for a in self.elements],
            "exhausted": list(self.exhausted),
        }


def _projective_key(a: Element) -> str:
    """Text of a scaled so its leading coefficient is 1."""
    lead = a.leading_word()
    return str(a.scale(a.terms[lead].inverse()))


def spanning_enumerate(d: int, n: int, sys: RuleSystem | None = None) -> SpanEnumeration:
    """Reduce every alpha f beta with alpha, beta among the level n-1 survivors.

    Level 1 is t_1^0 .. t_1^(d-1).  Survivors are deduplicated up to a
    nonzero scalar multiple and zero is dropped.
    """
    if not (1 <= n <= 3 and 1 <= d <= 3):
        raise ValueError(f"spanning_enumerate is limited to n <= 3 and d <= 3, got d={d}, n={n}")
    if sys is None:
        sys = presentation("FBMW", n, d=d)
    ctx = sys.ctx
    if (ctx.d, ctx.n) != (d, n):
        raise ValueError(f"system is over d={ctx.d}, n={ctx.n}, not d={d}, n={n}")
    level = [Element.word(ctx, ctx.tpow(1, s)) for s in range(d)]
    candidates = len(level)
    exhausted: list[str] = []
    for m in range(2, n + 1):
        xs = SpanningSet(m, d)
        found: dict[str, Element] = {}
        candidates = 0
        for alpha in level:
            for item in xs.elements:
                f = Element.word(ctx, xs.word(item))
                for beta in level:
                    candidates += 1
                    cand = alpha * f * beta
                    final, ex = sys.normal_form(cand)
                    if ex:
                        exhausted.append(str(cand))
                    if not final.is_zero():
                        found.setdefault(_projective_key(final), final)
        level = list(found.values())
    return SpanEnumeration(d, n, level, candidates, exhausted)

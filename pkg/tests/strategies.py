"""Shared hypothesis strategies and seeded generators."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from framization import Element, Scalar
from framization.freealg import Context
from framization.verify import random_word

L, M = Scalar.var("l"), Scalar.var("m")


@st.composite
def polynomials(draw, names=("l", "m"), max_degree=2):
    out = Scalar(0)
    for _ in range(draw(st.integers(0, 3))):
        c = draw(st.integers(-5, 5))
        mono = Scalar(c)
        for name in names:
            mono = mono * Scalar.var(name) ** draw(st.integers(0, max_degree))
        out = out + mono
    return out


@st.composite
def scalars(draw):
    num = draw(polynomials())
    den = draw(polynomials())
    if den.is_zero():
        den = Scalar(1)
    return num / den


def small_scalar(rng: random.Random) -> Scalar:
    """A random nonzero scalar such as -3, 2/5, m/l or (l+1)/m."""
    pick = rng.randrange(5)
    if pick == 0:
        return Scalar(rng.choice([-3, -2, -1, 1, 2, 5]))
    if pick == 1:
        return Scalar(rng.randint(1, 4)) / Scalar(rng.randint(2, 7))
    if pick == 2:
        return M / L
    if pick == 3:
        return (L + 1) / M
    return L * L - M


def random_element(rng: random.Random, sys, max_terms: int = 3, max_len: int = 5) -> Element:
    """A random element over the alphabet of ``sys``."""
    from framization.freealg import Kind, Letter, normalize_word

    ctx: Context = sys.ctx
    kinds = sorted(sys.kinds)
    letters = []
    for kind in kinds:
        if kind is Kind.TPOW:
            letters += [Letter(kind, i, k) for i in range(1, ctx.n + 1) for k in range(1, ctx.d)]
        elif kind in (Kind.BT, Kind.BTINV):
            letters.append(Letter(kind, 0, 0))
        else:
            letters += [Letter(kind, i, 0) for i in range(1, ctx.n)]
    out = Element.zero(ctx)
    for _ in range(rng.randint(1, max_terms)):
        word = normalize_word([rng.choice(letters) for _ in range(rng.randint(0, max_len))], ctx.d)
        out = out + Element.word(ctx, word, small_scalar(rng))
    return out


PROPERTY_CONFIGS = ((1, 2), (2, 2), (3, 2), (1, 3), (2, 3))


def catalog(d: int, n: int):
    """(tag, system) for every catalog algebra that exists at this (d, n)."""
    from framization import presentation
    from framization.algebras import CYCLOTOMIC, FRAMED, TAGS

    for tag in TAGS:
        if tag not in FRAMED and d != 1:
            continue
        kw = {"d": d} if tag in FRAMED else {}
        if tag in CYCLOTOMIC:
            kw["r"] = 2
        yield tag, presentation(tag, n, **kw)


def reduce_property_failures(sys, samples: int, seed: int) -> list[str]:
    """Idempotence and linearity of reduce on random elements; returns failures."""
    from framization import reduce

    rng = random.Random(seed)
    bad = []
    for _ in range(samples):
        a, b = random_element(rng, sys), random_element(rng, sys)
        c = small_scalar(rng)
        ra, rb = reduce(a, sys), reduce(b, sys)
        if ra.exhausted or rb.exhausted:
            bad.append(f"exhausted on {a} or {b}")
            continue
        if reduce(ra.final, sys).final != ra.final:
            bad.append(f"not idempotent on {a}")
        if reduce(a.scale(c) + b, sys).final != ra.final.scale(c) + rb.final:
            bad.append(f"not linear on {c}, {a}, {b}")
    return bad


ROUND_TRIP_SYSTEMS = (
    ("FBMW", 2, {"d": 1}), ("FBMW", 2, {"d": 2}), ("FBMW", 2, {"d": 3}), ("FBMW", 3, {"d": 2}),
    ("BMW", 3, {}), ("YH", 3, {"d": 3}), ("HECKE", 3, {}), ("SHECKE", 3, {}),
    ("FSHECKE", 2, {"d": 2}), ("HB", 3, {}), ("FHB_CYC", 2, {"d": 2, "r": 2}),
)


def round_trip_failures(samples: int, seed: int) -> list[str]:
    """print then parse must give back the element, across several contexts."""
    from framization import parse_expression, presentation
    from framization.cli import print_element

    systems = [presentation(tag, n, **kw) for tag, n, kw in ROUND_TRIP_SYSTEMS]
    rng = random.Random(seed)
    bad = []
    for k in range(samples):
        sys = systems[k % len(systems)]
        a = random_element(rng, sys)
        text = print_element(a)
        if parse_expression(text, sys.ctx) != a:
            bad.append(text)
    return bad


__all__ = [
    "PROPERTY_CONFIGS", "ROUND_TRIP_SYSTEMS", "catalog", "reduce_property_failures",
    "round_trip_failures","L", "M", "polynomials", "scalars", "small_scalar", "random_element", "random_word"]

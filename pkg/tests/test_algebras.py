import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framization import (
    AlgebraKind, Context, Element, FramedBraidNF, Gens, SpanningSet, conforms, dimension_bound,
    e_element, framed_nf, parse_expression, presentation, reduce, spanning_enumerate,
    spanning_reduce, specialize_t_to_one, verify_identity,
)
from framization.algebras import TAGS, braid_permutation, parameter_names
from framization.freealg import Kind, Letter, g, ginv, h, normalize_word, t
from framization.scalar import Scalar, y0
from framization.verify import random_word

from strategies import L, M

U, Q = Scalar.var("u"), Scalar.var("Q")


def P(src, sys):
    return parse_expression(src, sys.ctx)


# -- presentations -------------------------------------------------------------


def test_framing_order_one_matches_bmw():
    a, b = presentation("FBMW", 2, d=1), presentation("BMW", 2)
    assert reduce(P("g1*g1", a), a).final == reduce(P("g1*g1", b), b).final


def test_yokonuma_quadratic_uses_expanded_e():
    sys = presentation("YH", 2, d=2)
    rule = next(r for r in sys.rules if r.lhs == (g(1), g(1)))
    x, e = Gens(sys.ctx), e_element(1, 2, 2)
    assert e == (Element.unit(sys.ctx) + x.t(1) * x.t(2)).scale(Scalar(1) / 2)
    assert rule.rhs == Element.unit(sys.ctx) + (e * (1 - x.g(1))).scale(U - 1)


def test_b_type_quadratic():
    sys = presentation("HB", 2)
    x = Gens(sys.ctx)
    rule = next(r for r in sys.rules if r.lhs == (x.T.words()[0][0],) * 2)
    assert rule.rhs == x.T.scale(Q - 1) + Element.scalar(sys.ctx, Q)


def test_hecke_quadratic():
    sys = presentation("HECKE", 2)
    assert reduce(P("g1*g1", sys), sys).final == P("q + (q-1)*g1", sys)
    assert verify_identity(P("G1*g1", sys), P("1", sys), sys).verified


def test_cyclotomic_relation_holds():
    sys = presentation("HB_CYC", 2, r=3)
    us = [Scalar.var(f"u{k}") for k in (1, 2, 3)]
    x = Gens(sys.ctx)
    prod = Element.unit(sys.ctx)
    for u in us:
        prod = prod * (x.T - u)
    assert reduce(prod, sys).final.is_zero()


def test_parameter_overrides():
    sys = presentation("YH", 2, d=2, params={"u": 3})
    rule = next(r for r in sys.rules if r.lhs == (g(1), g(1)))
    assert "u" not in {v for c in rule.rhs.terms.values() for v in c.variables()}


@pytest.mark.parametrize("kw,msg", [
    ({"tag": "HB_CYC", "r": 0}, "degree r"),
    ({"tag": "FHB_CYC", "d": 2}, "degree r"),
    ({"tag": "FBMW", "d": 0}, "d must"),
    ({"tag": "BMW", "d": 2}, "no framing"),
    ({"tag": "HECKE", "r": 2}, "no degree"),
    ({"tag": "NOPE"}, "unknown"),
    ({"tag": "HECKE", "params": {"u": 2}}, "no parameter"),
])
def test_unsupported_parameters(kw, msg):
    with pytest.raises(ValueError, match=msg):
        AlgebraKind.make(**kw)


def test_every_tag_builds():
    for tag in TAGS:
        kw = {"d": 2} if tag.startswith("F") or tag in ("YH", "YTL") else {}
        if tag.endswith("_CYC"):
            kw["r"] = 2
        for n in (1, 2, 3):
            sys = presentation(tag, n, **kw)
            assert sys.meta["kind"] == tag
        assert parameter_names(tag, kw.get("d", 1), kw.get("r")) is not None


def test_topological_commutation_flag():
    on = presentation("FBMW", 3, d=2)
    off = presentation("FBMW", 3, d=2, options=["no-topological-th-commute"])
    assert len(on.rules) > len(off.rules)
    assert reduce(P("h1*t3", on), on).final == P("t3*h1", on)
    assert reduce(P("h1*t3", off), off).final == P("h1*t3", off)


# -- e_i -----------------------------------------------------------------------


def test_e_element_examples():
    assert e_element(1, 1, 2) == Element.unit(Context(1, 2))
    ctx = Context(2, 2)
    assert e_element(1, 2, 2) == parse_expression("(1/2)*(1 + t1*t2)", ctx)
    for d in range(1, 7):
        for n, i in ((2, 1), (3, 2)):
            e = e_element(i, d, n)
            assert len(e) == d
            assert all(c == Scalar(1) / d for c in e.terms.values())
            assert specialize_t_to_one(e) == Element.unit(Context(1, n))


def test_e_element_index_range():
    with pytest.raises(ValueError):
        e_element(2, 2, 2)
    with pytest.raises(ValueError):
        e_element(0, 2, 2)


# -- framed braids -------------------------------------------------------------


def test_framed_nf_examples():
    nf = framed_nf((g(1), t(1)), 2, 3)
    assert nf.framings == (0, 1, 0) and nf.braid == (g(1),)
    assert nf.word() == (t(2), g(1))
    nf = framed_nf((t(2), t(1)), 2, 2)
    assert nf.framings == (1, 1) and nf.braid == ()
    nf = framed_nf((t(1), g(1), ginv(1)), 2, 2)
    assert nf.framings == (1, 0) and nf.braid == (g(1), ginv(1))


def test_framed_nf_rejects_tangles():
    with pytest.raises(ValueError):
        framed_nf((h(1),), 2, 2)


def test_braid_permutation():
    assert braid_permutation((g(1),), 3) == (1, 0, 2)
    assert braid_permutation((g(1), g(2)), 3) == (1, 2, 0)
    # g1 g2 t1 = t2 g1 g2
    assert framed_nf((g(1), g(2), t(1)), 2, 3).framings == (0, 1, 0)


def _braid_words(d, n):
    letters = [Letter(Kind.TPOW, i, k) for i in range(1, n + 1) for k in range(1, d)]
    letters += [x(i) for i in range(1, n) for x in (g, ginv)]
    return st.lists(st.sampled_from(letters), max_size=8).map(lambda w: normalize_word(w, d))


@settings(max_examples=500)
@given(st.data())
def test_framed_nf_is_multiplicative(data):
    d, n = data.draw(st.sampled_from([(2, 2), (3, 3), (4, 4), (2, 3)]))
    u = data.draw(_braid_words(d, n))
    v = data.draw(_braid_words(d, n))
    assert framed_nf(u + v, d, n) == framed_nf(u, d, n) * framed_nf(v, d, n)


@settings(max_examples=300)
@given(st.data())
def test_framed_nf_preserves_total_framing(data):
    d, n = data.draw(st.sampled_from([(2, 2), (3, 3), (5, 4)]))
    w = data.draw(_braid_words(d, n))
    nf = framed_nf(w, d, n)
    assert sum(nf.framings) % d == sum(x.exp for x in w if x.kind is Kind.TPOW) % d
    assert all(0 <= a < d for a in nf.framings)
    assert all(x.kind in (Kind.G, Kind.GINV) for x in nf.braid)


def test_framed_nf_word_agrees_with_rewriting():
    # the Yokonuma-Hecke rules carry the same t-through-g relations
    rng = random.Random(11)
    sys = presentation("YH", 3, d=2)
    for _ in range(50):
        w = tuple(x for x in random_word(rng, 2, 3, 6) if x.kind is not Kind.H)
        nf = framed_nf(w, 2, 3)
        assert FramedBraidNF(nf.framings, nf.braid, 2) == nf
        assert verify_identity(Element.word(sys.ctx, w), Element.word(sys.ctx, nf.word()), sys).verified


# -- spanning set --------------------------------------------------------------


@pytest.mark.parametrize("d", range(1, 7))
def test_spanning_set_size(d):
    for n in (2, 3, 4):
        xs = SpanningSet(n, d)
        assert len(xs) == d + 1 + d * d
        assert len({xs.word(item) for item in xs.elements}) == len(xs)


def test_dimension_bound_examples():
    assert dimension_bound(1, 2) == 3
    assert all(dimension_bound(d, 1) == d for d in range(1, 7))
    assert dimension_bound(2, 2) == 28
    assert dimension_bound(1, 3) == 27
    assert dimension_bound(2, 3) == 28 * 28 * 7


def _spanning_input(d, s, r):
    ctx = Context(d, 3)
    return ctx, (g(2),) + ctx.tpow(1, s) + (h(1),) + ctx.tpow(1, r) + (g(2),)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_spanning_reduce_conjugated_tangle(d):
    sys = presentation("FBMW", 3, d=d)
    s, r = 1, d - 1
    ctx, w = _spanning_input(d, s, r)
    want = (ginv(1),) + ctx.tpow(2, s) + (h(2),) + ctx.tpow(2, r) + (ginv(1),)
    assert spanning_reduce(w, sys) == Element.word(ctx, want)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_spanning_reduce_absorbs_g(d):
    sys = presentation("FBMW", 3, d=d)
    ctx = sys.ctx
    f = ctx.tpow(2, 1) + (h(2),) + ctx.tpow(2, d - 1)
    assert spanning_reduce((g(2),) + f, sys) == Element.word(ctx, f, L.inverse())


def test_spanning_reduce_leaves_conforming_words():
    sys = presentation("FBMW", 3, d=2)
    for w in [(), (g(1), t(2), h(2), ginv(1)), (t(3),), (h(1), g(2), t(1))]:
        w = normalize_word(w, 2)
        assert conforms(w, 3)
        assert spanning_reduce(w, sys) == Element.word(sys.ctx, w)


def test_spanning_reduce_needs_bmw_type_system():
    with pytest.raises(ValueError):
        spanning_reduce((g(1),), presentation("HECKE", 3))


@pytest.mark.parametrize("d", [1, 2])
def test_spanning_reduce_random_words(d):
    rng = random.Random(d)
    sys, bmw = presentation("FBMW", 3, d=d), presentation("BMW", 3)
    for _ in range(25):
        w = random_word(rng, d, 3, 6)
        out = spanning_reduce(w, sys)
        assert all(conforms(u, 3) for u in out.terms)
        if d == 1:
            assert verify_identity(out, Element.word(sys.ctx, w), sys).verified
        else:
            lhs = reduce(specialize_t_to_one(out), bmw).final
            rhs = reduce(specialize_t_to_one(Element.word(sys.ctx, w)), bmw).final
            assert lhs == rhs


# -- enumeration ---------------------------------------------------------------


@pytest.mark.parametrize("d,n,candidates,distinct", [
    (1, 2, 3, 3), (2, 2, 28, 9), (3, 2, 117, 19), (1, 3, 27, 18), (2, 3, 567, 88),
    (3, 3, 4693, 260), (1, 1, 1, 1), (3, 1, 3, 3),
])
def test_spanning_enumerate_counts(d, n, candidates, distinct):
    out = spanning_enumerate(d, n)
    assert (out.candidates, len(out)) == (candidates, distinct)
    assert out.candidates <= dimension_bound(d, n)
    assert out.exhausted == []
    assert out.to_json()["bound"] == dimension_bound(d, n)


def test_spanning_enumerate_small_cases():
    assert set(map(str, spanning_enumerate(1, 2))) == {"1", "g1", "h1"}
    got = spanning_enumerate(3, 1).elements
    assert got == [Element.word(Context(3, 1), Context(3, 1).tpow(1, s)) for s in range(3)]


def test_spanning_enumerate_guard():
    with pytest.raises(ValueError):
        spanning_enumerate(4, 2)
    with pytest.raises(ValueError):
        spanning_enumerate(1, 4)


# -- specialization ------------------------------------------------------------


def test_specialize_examples():
    ctx = Context(3, 2)
    assert specialize_t_to_one(parse_expression("t1^2*g1", ctx)) == Gens(Context(1, 2)).g(1)
    loop = specialize_t_to_one(parse_expression("h1*t1^2*h1", ctx))
    bmw = presentation("BMW", 2)
    assert loop == P("h1*h1", bmw)
    assert reduce(loop, bmw).final == Gens(bmw.ctx).h(1).scale(y0())


def test_specialize_sends_y_to_loop_value():
    ctx = Context(3, 2)
    a = Gens(ctx).h(1).scale(Scalar.var("y2") * M)
    assert specialize_t_to_one(a) == Gens(Context(1, 2)).h(1).scale(y0() * M)

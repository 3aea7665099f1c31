import pytest

from framization import (
    SUITES, Element, Gens, Scalar, e_element, presentation, reduce, replay_quartic_proof,
    run_suite, verify_identity, verify_quintic_polynomial,
)
from framization.verify import Move, apply_move, check, span_chains
from framization.freealg import g, h, t

from strategies import M

QUICK = {
    "E_IDEMPOTENT": [1, 2, 3], "E_ABSORB_H": [1, 2, 3], "G_INVERSE": [1, 2, 3],
    "QUARTIC": [1, 2, 3], "QUINTIC": [1, 2, 3], "YH_CUBIC": [2, 3], "YTL_QUOTIENT_SMOKE": [2, 3],
    "SPAN_CASES": [2, 3],
}


@pytest.mark.parametrize("suite,d", [(s, d) for s, ds in QUICK.items() for d in ds])
def test_suite_passes(suite, d):
    report = run_suite(suite, d)
    assert report.passed, report.summary()
    assert all(item.residual is None for item in report.items)


@pytest.mark.parametrize("suite", ["FACTORIZATION", "BMW_SHORT_DERIVED"])
def test_parameter_free_suites(suite):
    assert run_suite(suite).passed


def test_sampled_suites_small():
    assert run_suite("D1_COLLAPSE", samples=30).passed
    assert run_suite("EPI_T1", 2, 2, samples=30).passed


def test_suite_names_are_fixed():
    assert len(SUITES) == 12
    with pytest.raises(ValueError):
        run_suite("NOPE")
    with pytest.raises(ValueError):
        run_suite("QUARTIC", 7)
    with pytest.raises(ValueError):
        run_suite("QUARTIC", 2, 3)
    with pytest.raises(ValueError):
        run_suite("YH_CUBIC", 2, params={"q": 2})


def test_idempotent_by_hand_at_d2():
    sys = presentation("FBMW", 2, d=2)
    x, e = Gens(sys.ctx), e_element(1, 2, 2)
    tt = x.t(1) * x.t(2)
    # (1/4)(1 + tt)^2 = (1/4)(2 + 2 tt) once tt*tt reduces to 1
    assert reduce(tt * tt, sys).final == Element.unit(sys.ctx)
    assert reduce(e * e, sys).final == reduce((2 + tt + tt).scale(Scalar(1) / 4), sys).final
    assert reduce(e * e - e, sys).final.is_zero()
    assert run_suite("E_IDEMPOTENT", 2).passed


def test_inverse_collapses_at_d1():
    sys = presentation("FBMW", 2, d=1)
    x = Gens(sys.ctx)
    inv = x.g(1) - x.h(1).scale(M) + M
    assert verify_identity(x.g(1) * inv, Element.unit(sys.ctx), sys).verified
    assert verify_identity(inv * x.g(1), Element.unit(sys.ctx), sys).verified
    assert run_suite("G_INVERSE", 1).passed


@pytest.mark.parametrize("u", [None, 3])
def test_cubic_with_and_without_fixed_u(u):
    params = None if u is None else {"u": u}
    report = run_suite("YH_CUBIC", 2, params=params)
    assert report.passed
    if u is not None:
        assert report.params["u"] == "3"


# -- quartic replay ------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 2])
def test_replay_has_six_passing_steps(d):
    report = replay_quartic_proof(d)
    assert len(report.items) == 6
    assert report.passed
    assert [item.name.split(":")[0] for item in report.items] == [f"step {k}" for k in range(1, 7)]


def test_step_two_standalone():
    sys = presentation("FBMW", 2, d=2)
    x, e = Gens(sys.ctx), e_element(1, 2, 2)
    q = x.g(1) * x.g(1) + (M - 1)
    assert verify_identity(e * q, q, sys).verified


def test_quartic_suite_ends_with_replayed_identity():
    for d in (1, 2):
        suite = run_suite("QUARTIC", d)
        replay = replay_quartic_proof(d)
        assert suite.items[0].name == replay.items[-1].name.split(": ", 1)[1]
        assert suite.items[1:] == replay.items


# -- quintic -------------------------------------------------------------------


@pytest.mark.parametrize("d", [1, 3])
def test_quintic(d):
    report = verify_quintic_polynomial(d)
    assert report.passed and len(report.items) == 3


def test_quintic_fourth_coefficient():
    report = verify_quintic_polynomial(1)
    assert report.items[2].name == "x^4 coefficient of the quintic is m - 1/l"
    assert report.items[2].verified
    assert report.items[1].name == "quintic = (x - 1/l) * quartic as polynomials"


# -- spanning chains -----------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3])
def test_span_chain_families(d):
    first, second = span_chains(d)
    assert [fam for fam, _ in first[2]] == ["t-through-g", "gh-absorb", "t-slide"]
    assert [fam for fam, _ in second[2]] == ["t-through-g", "conjugate-h", "t-through-g"]
    report = run_suite("SPAN_CASES", d)
    chains = [item for item in report.items if item.name.startswith("chain")]
    assert [len(item.steps) for item in chains] == [3, 3]
    assert [s.split(":")[0] for s in chains[0].steps] == ["t-through-g", "gh-absorb", "t-slide"]
    assert [s.split(":")[0] for s in chains[1].steps] == ["t-through-g", "conjugate-h", "t-through-g"]


def test_first_chain_intermediate_forms():
    report = run_suite("SPAN_CASES", 2)
    assert report.items[0].steps == [
        "t-through-g: t3^1*g2*h2*t2^1",
        "gh-absorb: (1/l)*t3^1*h2*t2^1",
        "t-slide: (1/l)*t2^1*h2*t2^1",
    ]


def test_guided_move_checks_its_pattern():
    sys = presentation("FBMW", 3, d=2)
    coeff, word = apply_move(Scalar(1), (g(2), t(2), h(2)), Move("t-through-g[g2 t2^1]", 0), sys)
    assert word == (t(3), g(2), h(2)) and coeff == Scalar(1)
    with pytest.raises(ValueError):
        apply_move(Scalar(1), (h(2), g(2)), Move("t-through-g[g2 t2^1]", 0), sys)
    with pytest.raises(ValueError):
        span_chains(1)


# -- reports -------------------------------------------------------------------


def test_reports_are_deterministic():
    for suite, d in [("QUARTIC", 2), ("SPAN_CASES", 2), ("YH_CUBIC", 3)]:
        a, b = run_suite(suite, d), run_suite(suite, d)
        assert a.to_json(timing=False) == b.to_json(timing=False)
    a = run_suite("D1_COLLAPSE", samples=20, seed=5)
    b = run_suite("D1_COLLAPSE", samples=20, seed=5)
    assert a.to_json(timing=False) == b.to_json(timing=False)


def test_report_json_shape():
    doc = run_suite("E_IDEMPOTENT", 2).to_json()
    assert list(doc) == ["suite", "params", "passed", "items", "wall_time_ms"]
    assert doc["params"] == {"d": 2, "n": 2}
    assert set(doc["items"][0]) >= {"name", "verified", "steps"}


def test_failing_item_keeps_residual():
    sys = presentation("BMW", 2)
    x = Gens(sys.ctx)
    item = check("g1 = h1", x.g(1), x.h(1), sys)
    assert not item.verified
    assert item.residual == str(x.g(1) - x.h(1)) == "-h1 + g1"

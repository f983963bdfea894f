import json
import random
from fractions import Fraction as F

import pytest
import sympy as sp

from hotspots.certifier import Rect, apply_tactics, certify_nonpos, check_certificate
from hotspots.exactq import PiQuad, QSqrt
from hotspots.poly import Poly2
from hotspots.proofs import (
    CASE_IDS,
    K4_ALPHA,
    Obligation,
    build_case,
    check_case_certificate,
    k4_script,
    run_all,
    run_case,
)

a_, b_, t_ = sp.symbols("a b t")
s3, s7 = sp.sqrt(3), sp.sqrt(7)
N_ = 64 * t_ * (a_**2 + b_**2 + 3) + 243 * (a_**2 + b_**2 - 6 * a_ - 3)


def _sp_scalar(c):
    if isinstance(c, QSqrt):
        return sp.Rational(c.p) + sp.Rational(c.q) * sp.sqrt(c.d)
    return sp.Rational(c)


def _sp_value(q: PiQuad):
    return sum(_sp_scalar(c) * t_**k for k, c in enumerate(PiQuad.coerce(q).coeffs()))


def _ob(case, name, literal=False) -> Obligation:
    return next(o for o in build_case(case, literal).obligations if o.name == name)


# displayed inequalities in the symmetric placement, written independently of the library
DISPLAYS = {
    ("S2", "S2"): N_ * (a_**2 - a_ + 1 + 3 * a_ * b_ - sp.Rational(3, 2) * b_ + 2 * b_**2) - 2 * t_ * 288 * b_**2,
    ("S3", "S3"): N_ * ((a_**2 - a_ + 1 + 2 * b_**2 + 3 * a_ * b_ - sp.Rational(3, 2) * b_)
                        + (b_ - a_) * (a_**2 + 3 + 2 * b_**2 + 3 * a_ * b_))
    - 2 * t_ * 288 * b_**2 * (2 * b_ - 2 * a_ + 1),
    ("S4", "S4"): N_ * (a_ + b_) - 384 * b_ * t_ + 1250 * (4 - (a_ + 1) ** 2 - b_**2) * (b_ - s3 / 2),
    ("S5", "S5"): N_ * (a_ * (a_**2 - a_ + 1) + (sp.Rational(1, 2) - a_) * (a_**2 + 1))
    - 288 * b_**2 * t_ * (sp.Rational(3, 4) * (sp.Rational(1, 2) - a_) + sp.Rational(2, 3) * a_),
    ("S6", "S6-ineq3"): N_ * (a_**2 + 3 * a_ * b_ + 2 * b_**2 - a_ - sp.Rational(3, 2) * b_ + 1)
    - 576 * b_**2 * t_ + 5000 * (4 - (a_ + 1) ** 2 - b_**2) * (b_ - s3 / 2),
    ("S6", "S6-ineq1"): N_ * (a_**2 + 3 + 3 * a_ * b_ + 2 * b_**2) - 4 * t_ * 288 * b_**2
    + 7000 * (4 - (a_ + 1) ** 2 - b_**2) * (b_ - 1) ** 2,
    ("S8", "S8-bound"): 4 * a_ * (a_ - 20) + 3 * (b_**2 - 3),
    ("S8", "S8-dominate"): N_ / 12 - t_ * (11 + 7 * b_**2 + 7 * a_**2 - 4 * a_) - (4 * a_ * (a_ - 20) + 3 * (b_**2 - 3)),
}
LITERAL_DISPLAYS = {
    ("S4", "S4"): N_ * (a_ + b_) - 384 * b_ * t_ + 2000 * (4 - (a_ + 1) ** 2 - b_**2) * (b_ - s3 / 2),
    ("S6", "S6-ineq3"): N_ * (a_**2 + 3 * a_ * b_ + 2 * b_**2 - a_ - sp.Rational(3, 2) * b_ + 1)
    - 576 * b_**2 * t_ + 10**4 * (4 - (a_ + 1) ** 2 - b_**2) * (b_ - s3 / 2),
}
# certification coordinates (b', a') -> placement coordinates (b, a)
PREMAPS = {
    "S2": lambda b, a: (s7 / 2 - b, a + sp.Rational(1, 2)),
    "S3": lambda b, a: (s7 / 2 - b, a + sp.Rational(1, 2)),
    "S4": lambda b, a: (s3 - b, a),
    "S5": lambda b, a: (b, a),
    "S6": lambda b, a: (s3 - b, a),
    "S8": lambda b, a: (s3 - b, a),
}


def _compare(ob, expr, premap, n=6, seed=0):
    rng = random.Random(seed)
    for _ in range(n):
        bp, ap = F(rng.randint(0, 100), 97), F(rng.randint(0, 100), 89)
        got = _sp_value(ob.poly.evaluate_exact(bp, ap))
        B, A = premap(sp.Rational(bp), sp.Rational(ap))
        want = expr.subs({b_: B, a_: A}, simultaneous=True)
        assert sp.simplify(sp.expand(got - want)) == 0, (ob.name, bp, ap)


@pytest.mark.parametrize("key", sorted(DISPLAYS))
def test_catalog_matches_displayed_inequality(key):
    case, name = key
    _compare(_ob(case, name), DISPLAYS[key], PREMAPS[case])


@pytest.mark.parametrize("key", sorted(LITERAL_DISPLAYS))
def test_literal_variant_matches_printed_constants(key):
    case, name = key
    _compare(_ob(case, name, literal=True), LITERAL_DISPLAYS[key], PREMAPS[case])


def test_s7_gamma_coefficient_display():
    expr = (a_ + b_ - 1) * (b_**2 - a_**2 - 3) + sp.Rational(8, 7) * (s3 - b_) * (b_**2 - a_**2 - 1)
    ob = _ob("S7", "S7-gcoef-a0")  # a = 0, polynomial in b
    for bv in (F(1), F(3, 2), F(17, 10)):
        got = _sp_value(ob.poly.evaluate_exact(bv, 0))
        assert sp.simplify(got - expr.subs({a_: 0, b_: sp.Rational(bv)})) == 0
    ob = _ob("S7", "S7-gcoef-a1b")  # a = 1 - b
    for bv in (F(9, 10), F(19, 20)):
        got = _sp_value(ob.poly.evaluate_exact(bv, 0))
        assert sp.simplify(got - expr.subs({a_: 1 - sp.Rational(bv), b_: sp.Rational(bv)})) == 0


def test_k_cases_match_coefficient_tables():
    from hotspots.bounds import B_COEFFS, C_COEFFS, Q_COEFFS

    k1 = _ob("K1", "K1").poly
    k3 = _ob("K3", "K3").poly
    for k, c in enumerate(C_COEFFS):
        assert k1.coeff(k, 0) == -c
    for k, c in enumerate(Q_COEFFS):
        assert k3.coeff(k, 0) == -c
    k2 = _ob("K2", "K2").poly
    t = PiQuad.t()
    assert k2.coeff(1, 0) == 7 * t * C_COEFFS[1] - 12 * B_COEFFS[1]


# -- catalog structure


def test_catalog_builds_and_is_numerically_true():
    for cid in CASE_IDS:
        c = build_case(cid)
        assert c.obligations
        assert c.sanity_check(200, seed=1) == [], cid


def test_s2_rectangles():
    rects = build_case("S2").rectangles
    assert rects == [
        Rect.from_bounds(0, F(1, 4), 0, F(99, 1000)),
        Rect.from_bounds(F(1, 9), F(1, 9) + F(15, 100), F(99, 1000), F(199, 1000)),
    ]


def test_k4_script_has_five_steps():
    c = build_case("K4")
    assert len(c.tactics) == 5
    assert c.params == {} and K4_ALPHA == F(4, 9)


def test_s8_domain():
    ob = _ob("S8", "S8-bound")
    assert ob.domain == Rect.from_bounds(0, QSqrt(0, F(1, 2), 3), 0, F(1, 2))


def test_s5_note_flags_the_implied_strip():
    c = build_case("S5")
    assert any("empty" in n for n in c.notes)
    origins = [p.origin for p in c.obligations[0].pieces]
    assert origins == ["listed", "implied"]


def test_unknown_ids():
    with pytest.raises(KeyError):
        build_case("S9")
    with pytest.raises(KeyError):
        build_case("S2", literal=True)


# -- running


def test_each_case_certifies_and_rechecks():
    rep = run_all()
    assert rep.ok, rep.summary()
    for c in rep.cases:
        assert c.rechecked
        ok, errs = check_case_certificate(c.certificate_json())
        assert ok, (c.id, errs)


def test_k4_rewrite_ends_linear_and_negative():
    p = _ob("K4", "K4-tactic").poly
    cert, hist = apply_tactics(p, Rect.interval(0, F(1, 2)), k4_script())
    assert cert.ok and cert.strict
    final = hist[-1].collapse(96)
    assert final.degree == (1, 0)
    assert final.coeff(0, 0).hi < 0 and final.coeff(1, 0).hi < 0


def test_literal_variants_fail():
    k4 = run_case(build_case("K4", literal=True))
    assert not k4.ok
    assert "a^5" in k4.obligations[0].error
    for cid in ("S4", "S6"):
        c = build_case(cid, literal=True)
        assert not run_case(c).ok
        # the printed slack makes the claim itself false somewhere on the rectangles
        assert c.sanity_check(400, seed=2)


def test_k4_subdivide_strategy():
    rep = run_case("K4", strategy="subdivide")
    assert rep.ok and [o.name for o in rep.obligations] == ["K4-subdivide"]


def test_s2_subdivide_strategy_keeps_rectangles():
    rep = run_case("S2", strategy="subdivide")
    assert rep.ok
    ob = next(o for o in rep.obligations if o.name == "S2")
    assert len(ob.pieces) == 2


def test_low_precision_never_certifies_false_claims():
    # 9.8696 < pi^2 < 9.8697
    t = Poly2.pi2()
    r = Rect(0, 0, 1, 1)
    false_claim = t - F(98696, 10**4)  # pi^2 - 9.8696 <= 0 is false
    true_claim = t - F(98697, 10**4)
    for bits in (8, 12, 16, 24, 96):
        assert not certify_nonpos(false_claim, r, 4, pi_bits=bits).ok
    assert certify_nonpos(true_claim, r, 4, pi_bits=24).ok
    rep = run_all(pi_bits=8, ids=["S4", "S6", "K4"])
    for c in rep.cases:
        if c.ok:
            assert build_case(c.id).sanity_check(200) == []
    for cid in ("S4", "S6"):
        assert not run_case(build_case(cid, literal=True), pi_bits=8).ok


def test_report_is_deterministic():
    r1 = run_all(ids=["S2", "K4", "S7"])
    r2 = run_all(ids=["S2", "K4", "S7"])
    assert r1.dumps() == r2.dumps()
    for c1, c2 in zip(r1.cases, r2.cases):
        assert json.dumps(c1.certificate_json(), sort_keys=True) == json.dumps(c2.certificate_json(), sort_keys=True)


# -- case certificate checking


def test_case_certificate_rejects_tampering():
    rep = run_case("S3")
    data = rep.certificate_json()
    assert check_case_certificate(data)[0]
    d = json.loads(json.dumps(data))
    d["obligations"][1]["certificates"].pop()
    ok, errs = check_case_certificate(d)
    assert not ok and any("do not match" in e for e in errs)
    d = json.loads(json.dumps(data))
    d["obligations"].pop(0)
    ok, errs = check_case_certificate(d)
    assert not ok and any("missing" in e for e in errs)
    d = json.loads(json.dumps(data))
    d["case"] = "S2"
    assert not check_case_certificate(d)[0]
    assert check_case_certificate(d, rebuild=False)[0]


# -- mutation: the certifier must notice a damaged inequality


def _dominant_negative(ob: Obligation):
    X = max(float(p.rect.x1) for p in ob.pieces)
    Y = max(float(p.rect.y1) for p in ob.pieces)
    neg = [(i, j, c) for i, j, c in ob.poly.terms() if float(c) < 0]
    return max(neg, key=lambda t: abs(float(t[2])) * X ** t[0] * (Y ** t[1] if t[1] else 1))


def _positive_samples(poly, pieces, n=300, seed=1):
    rng = random.Random(seed)
    hits = 0
    for _ in range(n):
        r = rng.choice(pieces).rect
        x = float(r.x0) + rng.random() * float(r.dx)
        y = float(r.y0) + rng.random() * float(r.dy)
        hits += poly.float_eval(x, y) > 0
    return hits


@pytest.mark.parametrize("cid", CASE_IDS)
def test_flipping_the_dominant_negative_term_breaks_certification(cid):
    from hotspots.proofs import _run_obligation

    for ob in build_case(cid).obligations:
        i, j, c = _dominant_negative(ob)
        mut = ob.poly.with_terms({(i, j): -c})
        mob = Obligation(ob.name, mut, ob.pieces, ob.domain, ob.premap, None, ob.strict)
        assert _positive_samples(mut, ob.pieces) > 0, ob.name
        assert not _run_obligation(mob, 96, 12, 192, None).ok, ob.name

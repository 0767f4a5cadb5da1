import pytest
from hypothesis import given, settings, strategies as st

from dedmod.frontend.parser import ParseError, parse_theory
from dedmod.rewriting import (
    FuelExhausted, No, NormalForm, RuleError, RewriteRule, Unknown, Yes,
    congruent, critical_pairs, locally_confluent, normalize, replay, rewrite_at, rewrite_step, whnf,
)
from dedmod.syntax import Atom, Imp

from conftest import prop


def test_rewrite_step_examples(qr, crabbe):
    assert rewrite_step(prop("P", qr), qr).result == prop("Q => R", qr)
    assert rewrite_step(prop("Q", qr), qr) is None
    assert rewrite_step(prop("P", crabbe), crabbe).result == prop("P => R", crabbe)


def test_rewrite_below_connectives(qr):
    step = rewrite_step(prop("Q /\\ P", qr), qr)
    assert step.position == (1,)
    assert step.result == prop("Q /\\ (Q => R)", qr)
    assert rewrite_at(prop("Q /\\ P", qr), (1,), "r", qr) == step.result
    assert rewrite_at(prop("Q /\\ P", qr), (0,), "r", qr) is None


def test_normalize_examples(qr, crabbe):
    n = normalize(prop("P", qr), qr, 10)
    assert isinstance(n, NormalForm) and n.value == prop("Q => R", qr)
    m = normalize(prop("P", crabbe), crabbe, 5)
    assert isinstance(m, FuelExhausted)
    # five unfoldings of the leftmost P: ((((P => R) => R) => R) => R) => R
    expected = prop("P", crabbe)
    for _ in range(5):
        expected = Imp(expected, Atom("R", ()))
    assert m.value == expected
    a = prop("Q => R", qr)
    assert normalize(a, qr, 0) == NormalForm(a)
    assert isinstance(normalize(prop("P", qr), qr, 0), FuelExhausted)


def test_whnf_exposes_head(crabbe):
    w = whnf(prop("P", crabbe), crabbe, 3)
    assert w.value == prop("P => R", crabbe)


def test_congruent_examples(qr, crabbe):
    yes = congruent(prop("P", qr), prop("Q => R", qr), qr)
    assert isinstance(yes, Yes) and replay(yes.witness, qr)
    assert isinstance(congruent(prop("Q", qr), prop("R", qr), qr), No)
    v = congruent(prop("P", crabbe), prop("P => R", crabbe), crabbe, 2)
    assert isinstance(v, Yes) and replay(v.witness, crabbe)


def test_congruent_never_says_no_without_confluence():
    R = parse_theory("prop P A B\nrule a : P --> A\nrule b : P --> B\n")
    assert not locally_confluent(R)
    assert not isinstance(congruent(Atom("A", ()), Atom("B", ()), R, 3), No)


def test_congruent_unknown_on_loop(crabbe):
    v = congruent(prop("P => R", crabbe), prop("R", crabbe), crabbe, 3)
    assert isinstance(v, Unknown)


def test_critical_pairs_examples(qr):
    assert critical_pairs(qr) == []
    ff = parse_theory("sort i\nfun f : i -> i\nrule ff : f(f(x)) --> x\n")
    cps = critical_pairs(ff)
    assert len(cps) == 1 and cps[0].joinable
    assert str(cps[0].peak).count("f") == 3
    two = parse_theory("prop P A B\nrule a : P --> A\nrule b : P --> B\n")
    cps = critical_pairs(two)
    assert len(cps) == 1 and not cps[0].joinable


def test_rule_validation():
    with pytest.raises(ParseError):
        parse_theory("prop P Q R\nrule bad : (Q => R) --> P\n")
    with pytest.raises(RuleError):
        RewriteRule("bad", Imp(Atom("Q", ()), Atom("R", ())), Atom("P", ()))
    assert parse_theory("").rules == ()


def test_term_rules_in_atoms():
    R = parse_theory("sort i\nfun z : i\nfun f : i -> i\npred P : i\nrule ff : f(f(x)) --> x\n")
    a = prop("P(f(f(f(z))))", R)
    assert normalize(a, R).value == prop("P(f(z))", R)


# -- properties ---------------------------------------------------------------

NAT = parse_theory("sort nat\nfun z : nat\nfun s : nat -> nat\nfun d : nat -> nat\n"
                   "pred E : nat\nrule d0 : d(z) --> z\nrule d1 : d(s(x)) --> s(s(d(x)))\n")


def numeral(n, wrap_d):
    t = "z"
    for _ in range(n):
        t = f"s({t})"
    return f"d({t})" if wrap_d else t


@settings(max_examples=30)
@given(st.integers(0, 6))
def test_doubling_normalizes_to_numeral(n):
    a = prop(f"E({numeral(n, True)})", NAT)
    assert normalize(a, NAT).value == prop(f"E({numeral(2 * n, False)})", NAT)


@settings(max_examples=30)
@given(st.integers(0, 4), st.integers(0, 4))
def test_congruence_decides_numerals(m, n):
    a = prop(f"E({numeral(m, True)})", NAT)
    b = prop(f"E({numeral(n, False)})", NAT)
    v = congruent(a, b, NAT, 12)
    if 2 * m == n:
        assert isinstance(v, Yes) and replay(v.witness, NAT)
    else:
        assert isinstance(v, No)

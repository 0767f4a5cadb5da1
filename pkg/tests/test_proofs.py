import pytest
from hypothesis import given, settings, strategies as st

from dedmod.frontend.parser import parse_theory
from dedmod.frontend.printer import show_derived_rule
from dedmod.proofs.check import Derivation, Rejection, RuleSystem, System, modulo, typecheck
from dedmod.proofs.derived import UnsupportedRule, derive_fold_unfold, derive_supernatural
from dedmod.proofs.terms import App, Hyp, Lam, RuleClass, classify_last_rule, free_hyps, proof_alpha_eq, subst_hyp

from conftest import seq, term


def check(text, sequent, theory, kind=System.MODULO):
    s = seq(sequent, theory)
    return typecheck(term(text, theory, s), s.context, s.goal, RuleSystem(kind, theory))


def test_self_application_typechecks_under_crabbe(crabbe):
    d = check("fun x : P . x x", "|- P => R", crabbe)
    assert isinstance(d, Derivation) and d.replay()
    assert check("(fun x : P . x x) (fun x : P . x x)", "|- R", crabbe)


def test_elimination_through_congruence(qr):
    d = check("p q", "p : P, q : Q |- R", qr)
    assert d and d.replay()
    assert d.root.rule


def test_rejections(empty, qr):
    r = check("fun x : Q . x", "|- R", empty)
    assert isinstance(r, Rejection) and r.reason
    assert not check("p q", "p : P, q : Q |- R", qr, System.FOLD_UNFOLD)
    assert check("(unfold r p) q", "p : P, q : Q |- R", qr, System.FOLD_UNFOLD)
    assert not check("h", "h : Q |- R", qr)


def test_fold_requires_named_rule(qr):
    assert not check("fold s h", "h : Q => R |- P", qr, System.FOLD_UNFOLD)
    assert check("fold r h", "h : Q => R |- P", qr, System.FOLD_UNFOLD)


def test_supernatural_rules(qr):
    assert check("selim r 1 [] (p, q)", "p : P, q : Q |- R", qr, System.SUPERNATURAL)
    assert check("sintro r {; x . h x}", "h : Q => R |- P", qr, System.SUPERNATURAL)
    assert not check("sintro r {; x . x}", "h : Q => R |- P", qr, System.SUPERNATURAL)


def test_derive_fold_unfold_shapes(qr):
    fold, unfold = derive_fold_unfold(qr.rules[0])
    assert show_derived_rule(fold) == "G |- Q => R\n----------- fold\nG |- P"
    assert show_derived_rule(unfold) == "G |- P\n----------- unfold\nG |- Q => R"


def test_derive_fold_unfold_with_parameter():
    t = parse_theory("sort i\npred P : i\nprop R\nrule r : P(x) --> P(x) => R\n")
    fold, unfold = derive_fold_unfold(t.rules[0])
    assert show_derived_rule(fold).endswith("G |- P(x)")
    assert show_derived_rule(unfold).endswith("G |- P(x) => R")


def test_derive_fold_unfold_rejects_term_rule():
    t = parse_theory("sort i\nfun f : i -> i\nrule e : f(x) --> x\n")
    with pytest.raises(ValueError):
        derive_fold_unfold(t.rules[0])


def test_derive_supernatural_shapes(qr):
    intro, elims = derive_supernatural(qr.rules[0])
    assert show_derived_rule(intro) == "G, Q |- R\n--------- r-intro\nG |- P"
    assert [show_derived_rule(e) for e in elims] == ["G |- P   G |- Q\n--------------- r-elim\nG |- R"]


def test_derive_supernatural_two_implications():
    t = parse_theory("prop P Q R\nrule r : P --> Q => R => Q\n")
    intro, elims = derive_supernatural(t.rules[0])
    assert show_derived_rule(intro).splitlines()[0] == "G, Q, R |- Q"
    (elim,) = elims
    assert show_derived_rule(elim).splitlines()[0] == "G |- P   G |- Q   G |- R"
    assert show_derived_rule(elim).splitlines()[-1] == "G |- Q"


def test_derive_supernatural_rejects_disjunction():
    t = parse_theory("prop P Q R\nrule r : P --> Q \\/ R\n")
    with pytest.raises(UnsupportedRule):
        derive_supernatural(t.rules[0])
    with pytest.raises(UnsupportedRule):
        RuleSystem(System.SUPERNATURAL, t)


def test_classify_last_rule():
    assert classify_last_rule(Lam("x", None, Hyp("x"))) is RuleClass.INTRODUCTION
    assert classify_last_rule(App(Hyp("p"), Hyp("q"))) is RuleClass.ELIMINATION
    assert classify_last_rule(Hyp("p")) is RuleClass.HYPOTHESIS


def test_alpha_equivalence_of_proofs(qr):
    a = term("fun x : Q . x", qr)
    b = term("fun y : Q . y", qr)
    assert proof_alpha_eq(a, b) and a != b


def test_substitution_avoids_capture(qr):
    p = term("fun x : Q . h", qr, "h : Q |- Q => Q")
    q = subst_hyp(p, "h", Hyp("x"))
    assert free_hyps(q) == {"x"}


# -- properties ---------------------------------------------------------------

QR = parse_theory("prop P Q R\nrule r : P --> Q => R\n")
SYSTEMS = {k: RuleSystem(k, QR) for k in System}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["h", "p", "q", "u"]), st.sampled_from(["P", "Q", "R", "Q => R", "P => P"]))
def test_hypothesis_rule_checks_exactly_at_congruent_props(name, goal):
    ctx_text = "h : Q => R, p : P, q : Q, u : R"
    s = seq(f"{ctx_text} |- {goal}", QR)
    d = typecheck(Hyp(name), s.context, s.goal, modulo(QR))
    hyp = s.context.lookup(name)
    congruent_pairs = {("P", "Q => R"), ("Q => R", "P")}
    same = str(hyp) == goal or (str(hyp), goal) in congruent_pairs
    assert bool(d) == same

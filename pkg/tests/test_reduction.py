import pytest
from hypothesis import given, settings, strategies as st

from dedmod.proofs.check import RuleSystem, System, modulo, typecheck
from dedmod.proofs.terms import App, Fold, Hyp, Unfold, proof_alpha_eq
from dedmod.reduction import (
    SN, DisjunctChoice, NotApplicable, NotSN, SNUnknown, Witness,
    cut_free, erase, extract_constructive_content, is_cut, normalize_proof, redexes, reduce_step,
    strongly_normalizing,
)
from dedmod.syntax import Func

from conftest import prop, seq, term

OMEGA = "fun x : P . x x"


def test_is_cut_examples(qr):
    assert is_cut(term("(fun x : Q . x) q", qr, "q : Q |- Q"))
    assert not is_cut(term("fun x : Q . x", qr))
    assert is_cut(Unfold("r", Fold("r", Hyp("h"))))
    assert not is_cut(Unfold("r", Fold("s", Hyp("h"))))


def test_reduce_step_examples(qr, crabbe):
    assert reduce_step(term("(fun x : Q . x) q", qr, "q : Q |- Q")).result == Hyp("q")
    step = reduce_step(term("fst <a, b>", qr, "a : Q, b : R |- Q"))
    assert step.result == Hyp("a") and step.rule == "fst"
    w = term(f"({OMEGA}) ({OMEGA})", crabbe)
    assert proof_alpha_eq(reduce_step(w).result, w)


def test_normalize_proof_examples(qr, crabbe):
    t = normalize_proof(term("(fun x : Q . x) q", qr, "q : Q |- Q"), 10)
    assert t.normal and t.final == Hyp("q") and len(t.steps) == 1
    c = normalize_proof(term(f"({OMEGA}) ({OMEGA})", crabbe), 10)
    assert c.outcome == "cycle" and c.cycle == (1, 0)
    p = term("fun x : Q . x", qr)
    z = normalize_proof(p, 0)
    assert z.normal and z.final == p


def test_normalize_fuel_outcome(crabbe):
    # a proof that keeps growing never repeats, so fuel runs out
    grow = term("(fun x : P . x x x) (fun x : P . x x x)", crabbe)
    t = normalize_proof(grow, 5)
    assert t.outcome == "fuel" and len(t.steps) == 5


def test_strong_normalization_examples(qr, crabbe):
    assert isinstance(strongly_normalizing(term("fun x : Q . x", qr)), SN)
    v = strongly_normalizing(term(f"({OMEGA}) ({OMEGA})", crabbe))
    assert isinstance(v, NotSN) and len(v.witness) == 2
    assert isinstance(strongly_normalizing(term(OMEGA, crabbe)), SN)
    grow = term("(fun x : P . x x x) (fun x : P . x x x)", crabbe)
    assert isinstance(strongly_normalizing(grow, 20), SNUnknown)


def test_sn_counts_every_reduction_order(qr):
    p = term("(fun a : Q . (fun b : Q . b) a) ((fun c : Q . c) q)", qr, "q : Q |- Q")
    v = strongly_normalizing(p)
    assert isinstance(v, SN) and v.longest == 3
    assert len(list(redexes(p))) == 3


def test_commuting_conversion(qr):
    s = seq("p : P |- P", qr)
    p = term("(case (fun u : true \\/ R . u) (inl tt) of a. (fun x : P . x) | b. (fun x : P . x)) p", qr, s)
    rules = [st.rule for st in normalize_proof(p).steps]
    assert "case-commute" in rules
    t = normalize_proof(p)
    assert t.normal and t.final == Hyp("p")


def test_fold_unfold_cycle(crabbe):
    omega = "fun x : P . (unfold r x) x"
    p = term(f"({omega}) (fold r ({omega}))", crabbe)
    t = normalize_proof(p, 10)
    assert t.outcome == "cycle" and [s.rule for s in t.steps] == ["beta", "unfold-fold"]


def test_extraction_examples(empty):
    sysm = modulo(empty)
    d = extract_constructive_content(term("inl (fun x : Q . x)", empty), prop("(Q => Q) \\/ R", empty), sysm)
    assert isinstance(d, DisjunctChoice) and d.side == "left"
    assert d.proof == term("fun x : Q . x", empty)
    w = extract_constructive_content(term("pack c, tt", empty), prop("exists x : i. true", empty), sysm)
    assert isinstance(w, Witness) and w.term == Func("c", (), "i")
    n = extract_constructive_content(term("fun x : Q . x", empty), prop("Q => Q", empty), sysm)
    assert isinstance(n, NotApplicable)


def test_extraction_preconditions(empty):
    with pytest.raises(ValueError):
        extract_constructive_content(Hyp("h"), prop("Q", empty), modulo(empty))
    with pytest.raises(ValueError):
        extract_constructive_content(term("(fun u : Q \\/ R . u) (inl q)", empty, "q : Q |- Q \\/ R"),
                                     prop("Q \\/ R", empty), modulo(empty))


def test_erase_to_modulo(qr):
    for kind, text in ((System.FOLD_UNFOLD, "fun h : Q => R . fold r h"),
                       (System.SUPERNATURAL, "fun h : Q => R . sintro r {; x . h x}")):
        s = seq("|- (Q => R) => P", qr)
        d = typecheck(term(text, qr, s), s.context, s.goal, RuleSystem(kind, qr))
        e = erase(d)
        assert typecheck(e, s.context, s.goal, modulo(qr))
    s = seq("p : P, q : Q |- R", qr)
    d = typecheck(term("selim r 1 [] (p, q)", qr, s), s.context, s.goal, RuleSystem(System.SUPERNATURAL, qr))
    assert erase(d) == App(Hyp("p"), Hyp("q"))


# -- properties ---------------------------------------------------------------


def test_subject_reduction_on_corpus(all_corpus_proofs):
    """Every one-step reduct of every proof reachable from a corpus proof still checks."""
    for c in all_corpus_proofs:
        s = c.entry.sequent
        frontier, seen = [c.entry.proof], set()
        while frontier and len(seen) < 50:
            p = frontier.pop()
            assert typecheck(p, s.context, s.goal, c.system), c.label
            for step in redexes(p):
                if step.result not in seen:
                    seen.add(step.result)
                    frontier.append(step.result)


ids = st.recursive(
    st.sampled_from(["q"]),
    lambda inner: st.one_of(
        inner.map(lambda e: f"(fun x : Q . x) ({e})"),
        inner.map(lambda e: f"fst <{e}, tt>"),
        inner.map(lambda e: f"snd <tt, {e}>"),
        inner.map(lambda e: f"case (fun u : Q \\/ false . u) (inl ({e})) of a. a | b. absurd b : Q"),
    ),
    max_leaves=6,
)


@settings(max_examples=60, deadline=None)
@given(ids)
def test_simple_cut_towers_normalize_to_the_hypothesis(qr_text):
    from dedmod.frontend.parser import parse_theory
    qr = parse_theory("prop P Q R\nrule r : P --> Q => R\n")
    s = seq("q : Q |- Q", qr)
    p = term(qr_text, qr, s)
    assert typecheck(p, s.context, s.goal, modulo(qr))
    t = normalize_proof(p)
    assert t.normal and t.final == Hyp("q") and cut_free(t.final)
    v = strongly_normalizing(p)
    assert isinstance(v, SN)


SR_CASES = [
    ("h : Q |- Q \\/ R",
     "((fun u : (Q \\/ R) \\/ R . case u of a. (case a of b. inl b | c. inr c) | d. inr d)"
     " : (Q \\/ R) \\/ R => Q \\/ R) (inl (inl h))"),
    ("s : S(c) |- exists x : i. S(x)",
     "((fun e : (exists x : i. S(x)) . unpack e as y : i, h in pack y, h)"
     " : (exists x : i. S(x)) => exists x : i. S(x)) (pack c, s)"),
    ("h : Q |- Q", "fst ((fun p : Q /\\ true . p) <h, tt>)"),
    ("h : Q |- Q", "(case (fun u : true \\/ R . u) (inl tt) of a. (fun x : Q . x) | b. (fun x : Q . x)) h"),
]


def _sr_walk(p, s, system, limit=200):
    frontier, seen = [p], {p}
    while frontier and len(seen) < limit:
        q = frontier.pop()
        d = typecheck(q, s.context, s.goal, system)
        assert d, (q, d.reason)
        for step in redexes(q):
            if step.result not in seen:
                seen.add(step.result)
                frontier.append(step.result)
    return seen


@pytest.mark.parametrize("sequent,text", SR_CASES)
def test_subject_reduction_through_annotations(empty, sequent, text):
    s = seq(sequent, empty)
    p = term(text, empty, s)
    reachable = _sr_walk(p, s, modulo(empty))
    t = normalize_proof(p)
    assert t.normal and len(reachable) > 1


def test_annotation_round_trip_and_cut(empty):
    s = seq("h : Q |- Q", empty)
    q = term("case (inl h : Q \\/ R) of a. a | b. h", empty, s)
    assert typecheck(q, s.context, s.goal, modulo(empty))
    assert is_cut(q)
    assert normalize_proof(q).final == Hyp("h")

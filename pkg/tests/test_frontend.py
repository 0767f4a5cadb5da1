from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from dedmod import corpus
from dedmod.frontend.parser import (
    ParseError, parse_lattice, parse_proof_term, parse_proofs, parse_prop, parse_theory, parse_theory_file,
)
from dedmod.frontend.printer import (
    show_derived_rule, show_lattice, show_proof, show_proof_file, show_prop, show_theory,
)
from dedmod.proofs.derived import derive_fold_unfold, derive_supernatural
from dedmod.proofs.terms import Ann, App, Case, Hyp, Inl, Lam, Unit, proof_alpha_eq
from dedmod.syntax import And, Atom, Imp, Or, TOP, Signature, PredDecl

from conftest import prop

GOLDEN = Path(__file__).parent / "golden"


def test_parse_theory_examples():
    t = parse_theory("prop P prop Q prop R  rule r : P --> (Q => R)")
    assert len(t.rules) == 1 and t.rules[0].kind == "prop"
    assert t.rules[0].rhs == Imp(Atom("Q"), Atom("R"))
    empty = parse_theory("")
    assert empty.rules == () and empty.signature.predicates == ()


def test_non_atomic_lhs_is_rejected():
    with pytest.raises(ParseError):
        parse_theory("prop P Q R\nrule bad : (Q => R) --> P")


@pytest.mark.parametrize("text, line, col", [
    ("prop P\nrule r : P --> Q\n", 2, 16),
    ("prop P\nrule r : P -> P\n", 2, 12),
])
def test_errors_carry_positions(text, line, col):
    with pytest.raises(ParseError) as err:
        parse_theory(text)
    assert (err.value.line, err.value.col) == (line, col)


def test_options_are_kept():
    tf = parse_theory_file("prop P\noption fuel 50\n")
    assert tf.options == (("fuel", 50),)
    assert parse_theory_file(show_theory(tf.system, tf.options)) == tf


def test_precedence(qr):
    a = prop("P /\\ Q \\/ R => Q => R", qr)
    assert a == Imp(Or(And(Atom("P"), Atom("Q")), Atom("R")), Imp(Atom("Q"), Atom("R")))
    assert show_prop(a) == "P /\\ Q \\/ R => Q => R"
    assert show_prop(prop("(P => Q) => R", qr)) == "(P => Q) => R"


def test_application_is_left_associative(qr):
    p = parse_proof_term("f g h", qr.signature)
    assert p == App(App(Hyp("f"), Hyp("g")), Hyp("h"))
    assert show_proof(App(Hyp("f"), App(Hyp("g"), Hyp("h")))) == "f (g h)"


def test_binders_extend_right(qr):
    p = parse_proof_term("fun x : P . x x", qr.signature)
    assert p == Lam("x", Atom("P"), App(Hyp("x"), Hyp("x")))


def test_annotation_round_trip(qr):
    p = parse_proof_term("case (inl tt : true \\/ R) of a. a | b. tt", qr.signature)
    assert isinstance(p, Case) and p.scrut == Ann(Inl(Unit()), Or(TOP, Atom("R")))
    assert parse_proof_term(show_proof(p), qr.signature) == p


@pytest.mark.parametrize("path", corpus.files("theories"), ids=lambda p: p.name)
def test_theory_files_round_trip(path):
    tf = parse_theory_file(path.read_text())
    again = parse_theory_file(show_theory(tf.system, tf.options))
    assert again == tf
    assert show_theory(again.system, again.options) == show_theory(tf.system, tf.options)


@pytest.mark.parametrize("name", sorted(corpus.PROOF_THEORY), ids=str)
def test_proof_files_round_trip(name):
    sig = corpus.theory(corpus.PROOF_THEORY[name]).signature
    pf = parse_proofs(corpus.path("proofs", name).read_text(), sig)
    again = parse_proofs(show_proof_file(pf), sig)
    assert again.system == pf.system
    assert [(e.name, e.sequent) for e in again.proofs] == [(e.name, e.sequent) for e in pf.proofs]
    assert all(proof_alpha_eq(a.proof, b.proof) for a, b in zip(again.proofs, pf.proofs))
    assert show_proof_file(again) == show_proof_file(pf)


@pytest.mark.parametrize("path", corpus.files("lattices"), ids=lambda p: p.name)
def test_lattice_files_round_trip(path):
    spec = parse_lattice(path.read_text())
    assert parse_lattice(show_lattice(spec)) == spec


def test_derived_rules_match_golden(qr):
    fold, unfold = derive_fold_unfold(qr.rules[0])
    intro, elims = derive_supernatural(qr.rules[0])
    blocks = [show_derived_rule(r) for r in (fold, unfold, intro, *elims)]
    assert "\n\n".join(blocks) + "\n" == (GOLDEN / "qr_rules.txt").read_text()


# -- properties ---------------------------------------------------------------

SIG = Signature((), (), (PredDecl("P"), PredDecl("Q"), PredDecl("R")))
atoms = st.sampled_from([Atom("P"), Atom("Q"), Atom("R"), TOP])
props = st.recursive(
    atoms,
    lambda ps: st.tuples(st.sampled_from([And, Or, Imp]), ps, ps).map(lambda t: t[0](t[1], t[2])),
    max_leaves=8,
)


@given(props)
def test_print_parse_is_identity_on_props(a):
    assert parse_prop(show_prop(a), SIG) == a


hyps = st.sampled_from(["x", "y", "h"]).map(Hyp)
proofs = st.recursive(
    hyps,
    lambda ps: st.one_of(
        st.tuples(ps, ps).map(lambda t: App(*t)),
        st.tuples(st.sampled_from(["x", "y"]), props, ps).map(lambda t: Lam(*t)),
        st.tuples(ps, props).map(lambda t: Ann(*t)),
        st.tuples(ps, ps, ps).map(lambda t: Case(t[0], "x", t[1], "y", t[2])),
        ps.map(Inl),
    ),
    max_leaves=6,
)


@given(proofs)
def test_print_parse_is_identity_on_proofs(p):
    assert parse_proof_term(show_proof(p), SIG) == p

from hypothesis import given, strategies as st

from dedmod.syntax import (
    TOP, And, Atom, Func, Imp, Or, Signature, PredDecl, FunDecl, Var,
    alpha_eq, close, forall, free_vars, open_, substitute, size, subformulas,
)

SIG = Signature(("i",), (FunDecl("f", ("i",), "i"), FunDecl("c", (), "i")),
                (PredDecl("P", ("i",)), PredDecl("Q", ("i",)), PredDecl("R")))
x, y, z = Var("x", "i"), Var("y", "i"), Var("z", "i")
c = Func("c", (), "i")


def P(t):
    return Atom("P", (t,))


def f(t):
    return Func("f", (t,), "i")


def test_substitute_free_occurrence():
    assert substitute(P(x), x, f(y)) == P(f(y))


def test_substitute_leaves_bound_occurrence():
    a = forall(x, P(x))
    assert substitute(a, x, c) == a


def test_substitute_avoids_capture():
    a = forall(y, Atom("Q", (x,)))
    b = substitute(a, x, y)
    # the substituted y stays free, the binder is still a binder
    assert free_vars(b) == {y}
    assert alpha_eq(b, forall(z, Atom("Q", (y,))))


def test_alpha_eq_examples():
    assert alpha_eq(forall(x, P(x)), forall(y, P(y)))
    assert not alpha_eq(forall(x, P(x)), forall(x, Atom("Q", (x,))))
    r, q = Atom("R", ()), Atom("Q", (c,))
    assert alpha_eq(Imp(q, r), Imp(q, r))


def test_free_vars_examples():
    assert free_vars(P(x)) == {x}
    assert free_vars(forall(x, P(x))) == set()
    assert free_vars(Imp(P(f(x)), Atom("R", ()))) == {x}


def test_open_close_inverse():
    body = close(Imp(P(x), P(f(x))), x)
    assert open_(body, x) == Imp(P(x), P(f(x)))
    assert open_(body, c) == Imp(P(c), P(f(c)))


def test_subformulas_and_size():
    a = And(P(c), Or(TOP, Atom("R", ())))
    subs = list(subformulas(a))
    assert a in subs and P(c) in subs and TOP in subs
    assert size(a) >= len(subs)


# -- properties ---------------------------------------------------------------

terms = st.recursive(st.sampled_from([x, y, c]), lambda ts: ts.map(f), max_leaves=4)
atoms = terms.map(P) | st.just(Atom("R", ()))
props = st.recursive(
    atoms,
    lambda ps: st.one_of(
        st.tuples(ps, ps).map(lambda ab: Imp(*ab)),
        st.tuples(ps, ps).map(lambda ab: And(*ab)),
        st.tuples(ps, ps).map(lambda ab: Or(*ab)),
        st.tuples(st.sampled_from([x, y]), ps).map(lambda vb: forall(*vb)),
    ),
    max_leaves=6,
)


@given(props)
def test_alpha_eq_reflexive(a):
    assert alpha_eq(a, a)


@given(props, terms)
def test_substitution_removes_variable(a, t):
    b = substitute(a, x, t)
    if x not in free_vars(t):
        assert x not in free_vars(b)
    assert free_vars(b) <= (free_vars(a) - {x}) | free_vars(t)


@given(props)
def test_renaming_bound_variable_is_alpha_equal(a):
    assert alpha_eq(forall(x, a), forall(z, substitute(a, x, z)))


@given(props)
def test_closed_quantifier_has_no_free_binder(a):
    assert x not in free_vars(forall(x, a))

"""Curry-Howard proof terms for natural deduction modulo.

Proof terms use named binders (hypotheses and eigenvariables).  Substitution
renames binders to avoid capture; :func:`canonical` gives a representative
that is equal for alpha-equivalent proofs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union

from ..syntax import Prop, Term, Var, fresh_name, free_vars, substitute


@dataclass(frozen=True)
class Hyp:
    name: str


@dataclass(frozen=True)
class Lam:
    name: str
    prop: Prop
    body: Proof


@dataclass(frozen=True)
class App:
    fun: Proof
    arg: Proof


@dataclass(frozen=True)
class Pair:
    left: Proof
    right: Proof


@dataclass(frozen=True)
class Fst:
    arg: Proof


@dataclass(frozen=True)
class Snd:
    arg: Proof


@dataclass(frozen=True)
class Inl:
    arg: Proof


@dataclass(frozen=True)
class Inr:
    arg: Proof


@dataclass(frozen=True)
class Case:
    scrut: Proof
    lname: str
    left: Proof
    rname: str
    right: Proof


@dataclass(frozen=True)
class Gen:
    var: Var
    body: Proof


@dataclass(frozen=True)
class Inst:
    arg: Proof
    term: Term


@dataclass(frozen=True)
class Pack:
    term: Term
    body: Proof


@dataclass(frozen=True)
class Unpack:
    arg: Proof
    var: Var
    hyp: str
    body: Proof


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Absurd:
    arg: Proof
    prop: Prop


@dataclass(frozen=True)
class Fold:
    rule: str
    arg: Proof


@dataclass(frozen=True)
class Unfold:
    rule: str
    arg: Proof


@dataclass(frozen=True)
class Ann:
    """A proof with the proposition it proves written out, so that its
    proposition can be inferred rather than only checked."""

    proof: Proof
    prop: Prop


@dataclass(frozen=True)
class Branch:
    """One premise of a supernatural introduction: binds eigenvariables and
    hypotheses over ``body``."""

    eigen: tuple[Var, ...]
    hyps: tuple[str, ...]
    body: Proof


@dataclass(frozen=True)
class SuperIntro:
    rule: str
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class SuperElim:
    rule: str
    index: int
    terms: tuple[Term, ...]
    args: tuple[Proof, ...]  # major premise first


Proof = Union[
    Hyp, Lam, App, Pair, Fst, Snd, Inl, Inr, Case, Gen, Inst, Pack, Unpack,
    Unit, Absurd, Fold, Unfold, SuperIntro, SuperElim, Ann,
]

INTRODUCTIONS = (Lam, Pair, Inl, Inr, Gen, Pack, Unit)
ELIMINATIONS = (App, Fst, Snd, Case, Inst, Unpack, Absurd)


# ---------------------------------------------------------------------------
# Generic child access


def children(p: Proof) -> list[tuple[str, Proof]]:
    match p:
        case Lam(_, _, b) | Gen(_, b) | Pack(_, b):
            return [("body", b)]
        case App(f, a):
            return [("fun", f), ("arg", a)]
        case Pair(l, r):
            return [("left", l), ("right", r)]
        case Fst(a) | Snd(a) | Inl(a) | Inr(a) | Inst(a, _) | Absurd(a, _) | Fold(_, a) | Unfold(_, a):
            return [("arg", a)]
        case Case(s, _, l, _, r):
            return [("scrut", s), ("left", l), ("right", r)]
        case Ann(q, _):
            return [("proof", q)]
        case Unpack(a, _, _, b):
            return [("arg", a), ("body", b)]
        case SuperIntro(_, bs):
            return [(f"b{i}", b.body) for i, b in enumerate(bs)]
        case SuperElim(_, _, _, args):
            return [(f"a{i}", a) for i, a in enumerate(args)]
    return []


def with_child(p: Proof, label: str, new: Proof) -> Proof:
    match p:
        case SuperIntro(rule, bs):
            i = int(label[1:])
            b = bs[i]
            return SuperIntro(rule, bs[:i] + (Branch(b.eigen, b.hyps, new),) + bs[i + 1:])
        case SuperElim(rule, k, ts, args):
            i = int(label[1:])
            return SuperElim(rule, k, ts, args[:i] + (new,) + args[i + 1:])
    fields = dict(p.__dict__)
    fields[label] = new
    return type(p)(**fields)


def subproof(p: Proof, path: tuple[str, ...]) -> Proof:
    for label in path:
        p = dict(children(p))[label]
    return p


def iter_nodes(p: Proof, path: tuple[str, ...] = ()) -> Iterator[tuple[tuple[str, ...], Proof]]:
    yield path, p
    for label, c in children(p):
        yield from iter_nodes(c, path + (label,))


def proof_size(p: Proof) -> int:
    return 1 + sum(proof_size(c) for _, c in children(p))


# ---------------------------------------------------------------------------
# Free variables


def free_hyps(p: Proof) -> set[str]:
    match p:
        case Hyp(n):
            return {n}
        case Lam(n, _, b):
            return free_hyps(b) - {n}
        case Case(s, ln, l, rn, r):
            return free_hyps(s) | (free_hyps(l) - {ln}) | (free_hyps(r) - {rn})
        case Unpack(a, _, h, b):
            return free_hyps(a) | (free_hyps(b) - {h})
        case SuperIntro(_, bs):
            out: set[str] = set()
            for b in bs:
                out |= free_hyps(b.body) - set(b.hyps)
            return out
    out = set()
    for _, c in children(p):
        out |= free_hyps(c)
    return out


def free_term_vars(p: Proof) -> set[Var]:
    match p:
        case Lam(_, a, b):
            return free_vars(a) | free_term_vars(b)
        case Gen(v, b):
            return free_term_vars(b) - {v}
        case Inst(a, t):
            return free_term_vars(a) | free_vars(t)
        case Pack(t, b):
            return free_vars(t) | free_term_vars(b)
        case Unpack(a, v, _, b):
            return free_term_vars(a) | (free_term_vars(b) - {v})
        case Absurd(a, prop) | Ann(a, prop):
            return free_term_vars(a) | free_vars(prop)
        case SuperIntro(_, bs):
            out: set[Var] = set()
            for b in bs:
                out |= free_term_vars(b.body) - set(b.eigen)
            return out
        case SuperElim(_, _, ts, args):
            out = set()
            for t in ts:
                out |= free_vars(t)
            for a in args:
                out |= free_term_vars(a)
            return out
    out = set()
    for _, c in children(p):
        out |= free_term_vars(c)
    return out


def bound_names(p: Proof) -> set[str]:
    out: set[str] = set()
    for _, n in iter_nodes(p):
        match n:
            case Lam(x, _, _):
                out.add(x)
            case Case(_, x, _, y, _):
                out |= {x, y}
            case Gen(v, _):
                out.add(v.name)
            case Unpack(_, v, h, _):
                out |= {v.name, h}
            case SuperIntro(_, bs):
                for b in bs:
                    out |= set(b.hyps) | {v.name for v in b.eigen}
    return out


def is_closed(p: Proof) -> bool:
    return not free_hyps(p)


# ---------------------------------------------------------------------------
# Substitution


def subst_hyp(p: Proof, h: str, q: Proof) -> Proof:
    """Replace free occurrences of hypothesis ``h`` by the proof ``q``."""
    if h not in free_hyps(p):
        return p
    qh, qv = free_hyps(q), {v.name for v in free_term_vars(q)}
    return _subst_hyp(p, h, q, qh, qv)


def _bind_hyp(name: str, body: Proof, h: str, q, qh, qv) -> tuple[str, Proof]:
    if name == h:
        return name, body
    if name in qh:
        new = fresh_name(name, qh | free_hyps(body) | {h})
        body = _subst_hyp(body, name, Hyp(new), {new}, set())
        name = new
    return name, _subst_hyp(body, h, q, qh, qv)


def _bind_var(v: Var, body: Proof, avoid: set[str]) -> tuple[Var, Proof]:
    if v.name not in avoid:
        return v, body
    new = Var(fresh_name(v.name, avoid | {u.name for u in free_term_vars(body)}), v.sort)
    return new, subst_term(body, v, new)


def _subst_hyp(p: Proof, h: str, q: Proof, qh: set[str], qv: set[str]) -> Proof:
    match p:
        case Hyp(n):
            return q if n == h else p
        case Lam(n, a, b):
            n, b = _bind_hyp(n, b, h, q, qh, qv)
            return Lam(n, a, b)
        case Case(s, ln, l, rn, r):
            s = _subst_hyp(s, h, q, qh, qv)
            ln, l = _bind_hyp(ln, l, h, q, qh, qv)
            rn, r = _bind_hyp(rn, r, h, q, qh, qv)
            return Case(s, ln, l, rn, r)
        case Gen(v, b):
            v, b = _bind_var(v, b, qv)
            return Gen(v, _subst_hyp(b, h, q, qh, qv))
        case Unpack(a, v, k, b):
            a = _subst_hyp(a, h, q, qh, qv)
            v, b = _bind_var(v, b, qv)
            k, b = _bind_hyp(k, b, h, q, qh, qv)
            return Unpack(a, v, k, b)
        case SuperIntro(rule, bs):
            out = []
            for br in bs:
                eigen, hyps, body = [], list(br.hyps), br.body
                for v in br.eigen:
                    v, body = _bind_var(v, body, qv)
                    eigen.append(v)
                if h in hyps:
                    out.append(Branch(tuple(eigen), tuple(hyps), body))
                    continue
                for i, name in enumerate(hyps):
                    if name in qh:
                        new = fresh_name(name, qh | free_hyps(body) | set(hyps) | {h})
                        body = _subst_hyp(body, name, Hyp(new), {new}, set())
                        hyps[i] = new
                out.append(Branch(tuple(eigen), tuple(hyps), _subst_hyp(body, h, q, qh, qv)))
            return SuperIntro(rule, tuple(out))
    for label, c in children(p):
        p = with_child(p, label, _subst_hyp(c, h, q, qh, qv))
    return p


def subst_term(p: Proof, x: Var, t: Term) -> Proof:
    """Replace the free term variable ``x`` by ``t`` throughout ``p``."""
    if x not in free_term_vars(p):
        return p
    avoid = {v.name for v in free_vars(t)}
    return _subst_term(p, x, t, avoid)


def _st_bind(v: Var, body: Proof, x: Var, t: Term, avoid: set[str]) -> tuple[Var, Proof]:
    if v == x:
        return v, body
    v, body = _bind_var(v, body, avoid | {x.name})
    return v, _subst_term(body, x, t, avoid)


def _subst_term(p: Proof, x: Var, t: Term, avoid: set[str]) -> Proof:
    match p:
        case Lam(n, a, b):
            return Lam(n, substitute(a, x, t), _subst_term(b, x, t, avoid))
        case Gen(v, b):
            return Gen(*_st_bind(v, b, x, t, avoid))
        case Inst(a, u):
            return Inst(_subst_term(a, x, t, avoid), substitute(u, x, t))
        case Pack(u, b):
            return Pack(substitute(u, x, t), _subst_term(b, x, t, avoid))
        case Unpack(a, v, k, b):
            v, b = _st_bind(v, b, x, t, avoid)
            return Unpack(_subst_term(a, x, t, avoid), v, k, b)
        case Absurd(a, prop):
            return Absurd(_subst_term(a, x, t, avoid), substitute(prop, x, t))
        case Ann(a, prop):
            return Ann(_subst_term(a, x, t, avoid), substitute(prop, x, t))
        case SuperIntro(rule, bs):
            out = []
            for br in bs:
                if x in br.eigen:
                    out.append(br)
                    continue
                eigen, body = [], br.body
                for v in br.eigen:
                    v, body = _bind_var(v, body, avoid | {x.name})
                    eigen.append(v)
                out.append(Branch(tuple(eigen), br.hyps, _subst_term(body, x, t, avoid)))
            return SuperIntro(rule, tuple(out))
        case SuperElim(rule, k, ts, args):
            return SuperElim(rule, k, tuple(substitute(u, x, t) for u in ts),
                             tuple(_subst_term(a, x, t, avoid) for a in args))
    for label, c in children(p):
        p = with_child(p, label, _subst_term(c, x, t, avoid))
    return p


# ---------------------------------------------------------------------------
# Alpha-equivalence


def canonical(p: Proof, level: int = 0) -> Proof:
    """Rename every binder to ``%<level>``; alpha-equivalent proofs get equal
    canonical forms.  ``%`` never occurs in parsed names."""

    def hname(k):
        return f"%{k}"

    match p:
        case Lam(n, a, b):
            return Lam(hname(level), a, canonical(subst_hyp(b, n, Hyp(hname(level))), level + 1))
        case Case(s, ln, l, rn, r):
            return Case(
                canonical(s, level),
                hname(level), canonical(subst_hyp(l, ln, Hyp(hname(level))), level + 1),
                hname(level), canonical(subst_hyp(r, rn, Hyp(hname(level))), level + 1),
            )
        case Gen(v, b):
            nv = Var(hname(level), v.sort)
            return Gen(nv, canonical(subst_term(b, v, nv), level + 1))
        case Unpack(a, v, k, b):
            nv = Var(hname(level), v.sort)
            b = subst_term(b, v, nv)
            b = subst_hyp(b, k, Hyp(hname(level + 1)))
            return Unpack(canonical(a, level), nv, hname(level + 1), canonical(b, level + 2))
        case SuperIntro(rule, bs):
            out = []
            for br in bs:
                k, body, eigen, hyps = level, br.body, [], []
                for v in br.eigen:
                    nv = Var(hname(k), v.sort)
                    body = subst_term(body, v, nv)
                    eigen.append(nv)
                    k += 1
                for h in br.hyps:
                    body = subst_hyp(body, h, Hyp(hname(k)))
                    hyps.append(hname(k))
                    k += 1
                out.append(Branch(tuple(eigen), tuple(hyps), canonical(body, k)))
            return SuperIntro(rule, tuple(out))
    for label, c in children(p):
        p = with_child(p, label, canonical(c, level))
    return p


def proof_alpha_eq(p: Proof, q: Proof) -> bool:
    return canonical(p) == canonical(q)


class RuleClass(str, enum.Enum):
    INTRODUCTION = "introduction"
    ELIMINATION = "elimination"
    HYPOTHESIS = "hypothesis"
    FOLD_UNFOLD = "fold-unfold"
    SUPER = "super"


def classify_last_rule(p: Proof) -> RuleClass:
    """Classify the root node only; annotations are transparent."""
    while isinstance(p, Ann):
        p = p.proof
    match p:
        case Hyp():
            return RuleClass.HYPOTHESIS
        case Fold() | Unfold():
            return RuleClass.FOLD_UNFOLD
        case SuperIntro() | SuperElim():
            return RuleClass.SUPER
        case _ if isinstance(p, INTRODUCTIONS):
            return RuleClass.INTRODUCTION
    return RuleClass.ELIMINATION


def ends_with_introduction(p: Proof) -> bool:
    """True for logical introductions and for the introduction-like rules of
    the other systems (``fold`` and supernatural introductions)."""
    while isinstance(p, Ann):
        p = p.proof
    return classify_last_rule(p) is RuleClass.INTRODUCTION or isinstance(p, (Fold, SuperIntro))

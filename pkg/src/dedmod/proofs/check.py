"""Directed type checking of proof terms modulo a congruence.

Three rule systems share one checker:

* ``modulo`` compares propositions up to the congruence of every rule;
* ``foldunfold`` only uses the term rules for conversion and reaches the
  proposition rules through explicit ``fold``/``unfold`` nodes;
* ``supernatural`` likewise, through derived ``r-intro``/``r-elim`` nodes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union

from ..config import DEFAULTS
from ..rewriting import (
    FuelExhausted,
    No,
    RewriteSystem,
    Step,
    Witness,
    Yes,
    congruent,
    match_prop,
    normalize,
    replay,
    replay_steps,
    whnf,
)
from ..syntax import (
    And,
    Bot,
    Context,
    Exists,
    Forall,
    Imp,
    Or,
    Prop,
    Sequent,
    SortError,
    TOP,
    Top,
    Var,
    check_prop,
    check_term,
    close,
    fresh_name,
    free_vars,
    open_,
    substitute_many,
)
from .derived import DerivedRule, derive_supernatural
from .terms import (
    Absurd,
    Ann,
    App,
    Case,
    Fold,
    Fst,
    Gen,
    Hyp,
    Inl,
    Inr,
    Inst,
    Lam,
    Pack,
    Pair,
    Proof,
    Snd,
    SuperElim,
    SuperIntro,
    Unfold,
    Unit,
    Unpack,
    free_term_vars,
    subst_term,
)


class System(str, enum.Enum):
    MODULO = "modulo"
    FOLD_UNFOLD = "foldunfold"
    SUPERNATURAL = "supernatural"


@dataclass(frozen=True)
class RuleSystem:
    kind: System
    theory: RewriteSystem

    def __post_init__(self):
        if self.kind is System.SUPERNATURAL:
            for r in self.theory.prop_rules:
                derive_supernatural(r)

    @property
    def congruence(self) -> RewriteSystem:
        if self.kind is System.MODULO:
            return self.theory
        return self.theory.term_part()

    def supernatural(self, rule: str) -> tuple[DerivedRule, list[DerivedRule]]:
        key = ("supernatural", rule)
        cache = self.theory._cache
        if key not in cache:
            cache[key] = derive_supernatural(self.theory.rule(rule))
        return cache[key]


def modulo(theory: RewriteSystem) -> RuleSystem:
    return RuleSystem(System.MODULO, theory)


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Exposure:
    """Head rewriting that exposed a connective."""

    start: Prop
    steps: tuple[Step, ...]
    result: Prop


Evidence = Union[Witness, Exposure]


@dataclass(frozen=True)
class Node:
    rule: str
    sequent: Sequent
    premises: tuple[Node, ...] = ()
    evidence: tuple[Evidence, ...] = ()
    path: tuple[str, ...] = ()

    @property
    def prop(self) -> Prop:
        return self.sequent.goal

    def walk(self) -> Iterator[Node]:
        yield self
        for p in self.premises:
            yield from p.walk()


@dataclass(frozen=True)
class Derivation:
    proof: Proof
    root: Node
    system: RuleSystem

    def __bool__(self):
        return True

    @property
    def conclusion(self) -> Sequent:
        return self.root.sequent

    def evidence(self) -> Iterator[Evidence]:
        for n in self.root.walk():
            yield from n.evidence

    def replay(self) -> bool:
        """Re-validate every recorded congruence witness and exposure."""
        R = self.system.congruence
        for ev in self.evidence():
            if isinstance(ev, Witness):
                if not replay(ev, R):
                    return False
            elif replay_steps(ev.start, ev.steps, R) != ev.result:
                return False
        return True


@dataclass(frozen=True)
class Rejection:
    reason: str
    path: tuple[str, ...] = ()
    kind: str = "mismatch"  # mismatch | budget | scope | system | annotation | sort

    def __bool__(self):
        return False


class _Reject(Exception):
    def __init__(self, rejection: Rejection):
        super().__init__(rejection.reason)
        self.rejection = rejection


# ---------------------------------------------------------------------------
# Checker


@dataclass
class Checker:
    system: RuleSystem
    depth: int = DEFAULTS.depth
    _sig: object = field(init=False)

    def __post_init__(self):
        self._sig = self.system.theory.signature

    def fail(self, reason, path, kind="mismatch"):
        raise _Reject(Rejection(reason, path, kind))

    # -- conversion ---------------------------------------------------------

    def conv(self, got: Prop, want: Prop, path) -> tuple[Evidence, ...]:
        if got == want:
            return ()
        verdict = congruent(got, want, self.system.congruence, self.depth)
        if isinstance(verdict, Yes):
            return (verdict.witness,)
        if isinstance(verdict, No):
            self.fail(f"{got} is not congruent to {want}", path)
        self.fail(f"could not decide whether {got} and {want} are congruent within depth {self.depth}",
                  path, "budget")

    def expose(self, a: Prop, cls, path) -> tuple[Prop, tuple[Evidence, ...]]:
        if isinstance(a, cls):
            return a, ()
        nf = whnf(a, self.system.congruence, self.depth)
        if isinstance(nf, FuelExhausted):
            self.fail(f"head of {a} not exposed within {self.depth} steps", path, "budget")
        if not isinstance(nf.value, cls):
            self.fail(f"expected {cls.__name__.lower()}, found {a}", path)
        return nf.value, (Exposure(a, nf.steps, nf.value),)

    def _prop_ok(self, a: Prop, path):
        try:
            check_prop(a, self._sig)
        except SortError as e:
            self.fail(str(e), path, "sort")

    def _term_ok(self, t, path):
        try:
            check_term(t, self._sig)
        except SortError as e:
            self.fail(str(e), path, "sort")

    def _require(self, kind: System, p, path):
        if self.system.kind is not kind:
            self.fail(f"{type(p).__name__} nodes are not allowed in the {self.system.kind.value} system",
                      path, "system")

    def _fresh_eigen(self, v: Var, body: Proof, ctx: Context, *props: Prop) -> tuple[Var, Proof]:
        taken = {u.name for u in ctx.free_vars()}
        for a in props:
            taken |= {u.name for u in free_vars(a)}
        if v.name not in taken:
            return v, body
        nv = Var(fresh_name(v.name, taken | {u.name for u in free_term_vars(body)}), v.sort)
        return nv, subst_term(body, v, nv)

    def _match_lhs(self, pattern: Prop, a: Prop):
        sigma = match_prop(pattern, a)
        if sigma is None and self.system.theory.term_rules:
            nf = normalize(a, self.system.congruence, self.depth)
            sigma = match_prop(pattern, nf.value)
        return sigma

    # -- checking mode -------------------------------------------------------

    def check(self, p: Proof, ctx: Context, a: Prop, path=()) -> Node:
        seq = Sequent(ctx, a)
        match p:
            case Lam(x, t, b):
                self._prop_ok(t, path)
                imp, ev = self.expose(a, Imp, path)
                ev += self.conv(t, imp.left, path)
                body = self.check(b, ctx.extend(x, t), imp.right, path + ("body",))
                return Node("imp-intro", seq, (body,), ev, path)
            case Pair(l, r):
                conj, ev = self.expose(a, And, path)
                nl = self.check(l, ctx, conj.left, path + ("left",))
                nr = self.check(r, ctx, conj.right, path + ("right",))
                return Node("and-intro", seq, (nl, nr), ev, path)
            case Inl(q) | Inr(q):
                disj, ev = self.expose(a, Or, path)
                side = disj.left if isinstance(p, Inl) else disj.right
                n = self.check(q, ctx, side, path + ("arg",))
                return Node("or-intro1" if isinstance(p, Inl) else "or-intro2", seq, (n,), ev, path)
            case Unit():
                _, ev = self.expose(a, Top, path)
                return Node("top-intro", seq, (), ev, path)
            case Gen(v, b):
                fa, ev = self.expose(a, Forall, path)
                if v.sort != fa.sort:
                    self.fail(f"eigenvariable {v.name} has sort {v.sort}, expected {fa.sort}", path, "sort")
                v, b = self._fresh_eigen(v, b, ctx, a, fa)
                n = self.check(b, ctx, open_(fa.body, v), path + ("body",))
                return Node("forall-intro", seq, (n,), ev, path)
            case Pack(t, b):
                self._term_ok(t, path)
                ex, ev = self.expose(a, Exists, path)
                if t.sort != ex.sort:
                    self.fail(f"witness {t} has sort {t.sort}, expected {ex.sort}", path, "sort")
                n = self.check(b, ctx, open_(ex.body, t), path + ("body",))
                return Node("exists-intro", seq, (n,), ev, path)
            case Case(s, x, l, y, r):
                ns = self.infer(s, ctx, path + ("scrut",))
                disj, ev = self.expose(ns.prop, Or, path)
                nl = self.check(l, ctx.extend(x, disj.left), a, path + ("left",))
                nr = self.check(r, ctx.extend(y, disj.right), a, path + ("right",))
                return Node("or-elim", seq, (ns, nl, nr), ev, path)
            case Unpack(q, v, h, b):
                nq = self.infer(q, ctx, path + ("arg",))
                ex, ev = self.expose(nq.prop, Exists, path)
                if v.sort != ex.sort:
                    self.fail(f"eigenvariable {v.name} has sort {v.sort}, expected {ex.sort}", path, "sort")
                v, b = self._fresh_eigen(v, b, ctx, a, ex)
                nb = self.check(b, ctx.extend(h, open_(ex.body, v)), a, path + ("body",))
                return Node("exists-elim", seq, (nq, nb), ev, path)
            case Fold(rule, q):
                self._require(System.FOLD_UNFOLD, p, path)
                r = self._prop_rule(rule, path)
                sigma = self._match_lhs(r.lhs, a)
                if sigma is None:
                    self.fail(f"fold {rule}: {a} is not an instance of {r.lhs}", path)
                n = self.check(q, ctx, substitute_many(r.rhs, sigma), path + ("arg",))
                return Node("fold", seq, (n,), (), path)
            case SuperIntro(rule, branches):
                self._require(System.SUPERNATURAL, p, path)
                r = self._prop_rule(rule, path)
                sigma = self._match_lhs(r.lhs, a)
                if sigma is None:
                    self.fail(f"{rule}-intro: {a} is not an instance of {r.lhs}", path)
                intro, _ = self.system.supernatural(rule)
                if len(branches) != len(intro.premises):
                    self.fail(f"{rule}-intro expects {len(intro.premises)} premises, got {len(branches)}", path)
                nodes = []
                for i, (br, prem) in enumerate(zip(branches, intro.premises)):
                    bpath = path + (f"b{i}",)
                    if len(br.eigen) != len(prem.eigen) or len(br.hyps) != len(prem.hyps):
                        self.fail(f"{rule}-intro premise {i} binds {len(prem.eigen)} variables "
                                  f"and {len(prem.hyps)} hypotheses", bpath)
                    body = br.body
                    eigen = []
                    for v, want in zip(br.eigen, prem.eigen):
                        if v.sort != want.sort:
                            self.fail(f"eigenvariable {v.name} has sort {v.sort}, expected {want.sort}", bpath, "sort")
                        v, body = self._fresh_eigen(v, body, ctx, a)
                        eigen.append(v)
                    inst = {**sigma, **dict(zip(prem.eigen, eigen))}
                    sub = ctx
                    for h, hp in zip(br.hyps, prem.hyps):
                        sub = sub.extend(h, substitute_many(hp, inst))
                    nodes.append(self.check(body, sub, substitute_many(prem.goal, inst), bpath))
                return Node(intro.name, seq, tuple(nodes), (), path)
        n = self.infer(p, ctx, path)
        ev = self.conv(n.prop, a, path)
        if not ev:
            return n
        return Node("conv", seq, (n,), ev, path)

    # -- inference mode ------------------------------------------------------

    def _prop_rule(self, name: str, path):
        try:
            r = self.system.theory.rule(name)
        except KeyError:
            self.fail(f"unknown rule {name}", path, "scope")
        if r.kind != "prop":
            self.fail(f"rule {name} is a term rule", path, "scope")
        return r

    def _major(self, q: Proof, lhs: Prop, ctx: Context, path) -> Node:
        # A ground left-hand side fixes the premise, so it can be checked.
        if not free_vars(lhs):
            return self.check(q, ctx, lhs, path)
        return self.infer(q, ctx, path)

    def infer(self, p: Proof, ctx: Context, path=()) -> Node:
        match p:
            case Hyp(name):
                a = ctx.lookup(name)
                if a is None:
                    self.fail(f"unbound hypothesis {name}", path, "scope")
                return Node("hyp", Sequent(ctx, a), (), (), path)
            case Lam(x, t, b):
                self._prop_ok(t, path)
                nb = self.infer(b, ctx.extend(x, t), path + ("body",))
                return Node("imp-intro", Sequent(ctx, Imp(t, nb.prop)), (nb,), (), path)
            case App(f, q):
                nf = self.infer(f, ctx, path + ("fun",))
                imp, ev = self.expose(nf.prop, Imp, path)
                nq = self.check(q, ctx, imp.left, path + ("arg",))
                return Node("imp-elim", Sequent(ctx, imp.right), (nf, nq), ev, path)
            case Pair(l, r):
                nl = self.infer(l, ctx, path + ("left",))
                nr = self.infer(r, ctx, path + ("right",))
                return Node("and-intro", Sequent(ctx, And(nl.prop, nr.prop)), (nl, nr), (), path)
            case Fst(q) | Snd(q):
                nq = self.infer(q, ctx, path + ("arg",))
                conj, ev = self.expose(nq.prop, And, path)
                first = isinstance(p, Fst)
                out = conj.left if first else conj.right
                return Node("and-elim1" if first else "and-elim2", Sequent(ctx, out), (nq,), ev, path)
            case Unit():
                return Node("top-intro", Sequent(ctx, TOP), (), (), path)
            case Gen(v, b):
                v, b = self._fresh_eigen(v, b, ctx)
                nb = self.infer(b, ctx, path + ("body",))
                return Node("forall-intro", Sequent(ctx, Forall(v.sort, close(nb.prop, v), v.name)), (nb,), (), path)
            case Inst(q, t):
                self._term_ok(t, path)
                nq = self.infer(q, ctx, path + ("arg",))
                fa, ev = self.expose(nq.prop, Forall, path)
                if t.sort != fa.sort:
                    self.fail(f"term {t} has sort {t.sort}, expected {fa.sort}", path, "sort")
                return Node("forall-elim", Sequent(ctx, open_(fa.body, t)), (nq,), ev, path)
            case Case(s, x, l, y, r):
                ns = self.infer(s, ctx, path + ("scrut",))
                disj, ev = self.expose(ns.prop, Or, path)
                nl = self.infer(l, ctx.extend(x, disj.left), path + ("left",))
                nr = self.check(r, ctx.extend(y, disj.right), nl.prop, path + ("right",))
                return Node("or-elim", Sequent(ctx, nl.prop), (ns, nl, nr), ev, path)
            case Unpack(q, v, h, b):
                nq = self.infer(q, ctx, path + ("arg",))
                ex, ev = self.expose(nq.prop, Exists, path)
                if v.sort != ex.sort:
                    self.fail(f"eigenvariable {v.name} has sort {v.sort}, expected {ex.sort}", path, "sort")
                v, b = self._fresh_eigen(v, b, ctx, ex)
                nb = self.infer(b, ctx.extend(h, open_(ex.body, v)), path + ("body",))
                if v in free_vars(nb.prop):
                    self.fail(f"eigenvariable {v.name} escapes in {nb.prop}", path, "annotation")
                return Node("exists-elim", Sequent(ctx, nb.prop), (nq, nb), ev, path)
            case Ann(q, a):
                self._prop_ok(a, path)
                nq = self.check(q, ctx, a, path + ("proof",))
                return Node("annotation", Sequent(ctx, a), (nq,), (), path)
            case Absurd(q, a):
                self._prop_ok(a, path)
                nq = self.infer(q, ctx, path + ("arg",))
                _, ev = self.expose(nq.prop, Bot, path)
                return Node("bot-elim", Sequent(ctx, a), (nq,), ev, path)
            case Fold(rule, q):
                self._require(System.FOLD_UNFOLD, p, path)
                r = self._prop_rule(rule, path)
                nq = self.infer(q, ctx, path + ("arg",))
                sigma = self._match_lhs(r.rhs, nq.prop)
                if sigma is None:
                    self.fail(f"fold {rule}: {nq.prop} is not an instance of {r.rhs}", path)
                if not free_vars(r.lhs) <= set(sigma):
                    self.fail(f"fold {rule}: instance not determined; use in checking position", path, "annotation")
                return Node("fold", Sequent(ctx, substitute_many(r.lhs, sigma)), (nq,), (), path)
            case Unfold(rule, q):
                self._require(System.FOLD_UNFOLD, p, path)
                r = self._prop_rule(rule, path)
                nq = self._major(q, r.lhs, ctx, path + ("arg",))
                sigma = self._match_lhs(r.lhs, nq.prop)
                if sigma is None:
                    self.fail(f"unfold {rule}: {nq.prop} is not an instance of {r.lhs}", path)
                return Node("unfold", Sequent(ctx, substitute_many(r.rhs, sigma)), (nq,), (), path)
            case SuperElim(rule, k, terms, args):
                self._require(System.SUPERNATURAL, p, path)
                r = self._prop_rule(rule, path)
                _, elims = self.system.supernatural(rule)
                if not 0 <= k < len(elims):
                    self.fail(f"{rule} has {len(elims)} elimination rules, no index {k}", path, "scope")
                er = elims[k]
                if len(terms) != len(er.params) or len(args) != len(er.premises):
                    self.fail(f"{er.name} expects {len(er.params)} terms and {len(er.premises)} premises", path)
                if not args:
                    self.fail(f"{er.name} needs a major premise", path)
                nmaj = self._major(args[0], r.lhs, ctx, path + ("a0",))
                sigma = self._match_lhs(r.lhs, nmaj.prop)
                if sigma is None:
                    self.fail(f"{er.name}: {nmaj.prop} is not an instance of {r.lhs}", path)
                for t, want in zip(terms, er.params):
                    self._term_ok(t, path)
                    if t.sort != want.sort:
                        self.fail(f"term {t} has sort {t.sort}, expected {want.sort}", path, "sort")
                inst = {**sigma, **dict(zip(er.params, terms))}
                nodes = [nmaj]
                for i, (q, prem) in enumerate(zip(args[1:], er.premises[1:]), start=1):
                    nodes.append(self.check(q, ctx, substitute_many(prem.goal, inst), path + (f"a{i}",)))
                return Node(er.name, Sequent(ctx, substitute_many(er.conclusion.goal, inst)), tuple(nodes), (), path)
            case Inl() | Inr() | Pack() | SuperIntro():
                self.fail(f"cannot infer the proposition proved by {type(p).__name__}; "
                          "use it in checking position", path, "annotation")
        raise TypeError(f"not a proof term: {p!r}")


def typecheck(
    p: Proof,
    ctx: Context,
    a: Prop,
    system: RuleSystem,
    depth: int = DEFAULTS.depth,
) -> Derivation | Rejection:
    checker = Checker(system, depth)
    try:
        for _, h in ctx:
            checker._prop_ok(h, ())
        checker._prop_ok(a, ())
        node = checker.check(p, ctx, a)
    except _Reject as e:
        return e.rejection
    return Derivation(p, node, system)


def infer(p: Proof, ctx: Context, system: RuleSystem, depth: int = DEFAULTS.depth) -> Node | Rejection:
    try:
        return Checker(system, depth).infer(p, ctx)
    except _Reject as e:
        return e.rejection

"""Bounded search for cut-free proofs.

Goals are first exposed by weak-head normalization and introduced when the
exposed connective is invertible; otherwise the search tries introductions
and elimination spines that start from a hypothesis.  Disjunction,
existential and absurdity eliminations only ever close a spine, so the proofs
found contain no cuts and no commuting redexes.

Depth is the height of the proof tree.  Fold and unfold nodes are
conversions and do not count (unless all they expose is another atom), so
the three rule systems share one budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from ..config import DEFAULTS
from ..proofs.check import RuleSystem, System, modulo
from ..proofs.derived import UnsupportedRule
from ..proofs.terms import (
    Absurd,
    App,
    Branch,
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
)
from ..rewriting import RewriteSystem, congruent, match_prop, whnf
from ..syntax import (
    And,
    Atom,
    Bot,
    Context,
    Exists,
    Forall,
    Imp,
    Or,
    Prop,
    Sequent,
    Term,
    Top,
    Var,
    fresh_name,
    free_vars,
    open_,
    substitute_many,
)

_NAMES = ("x", "y", "z", "u", "v", "w")


@dataclass
class Searcher:
    system: RuleSystem
    depth_budget: int = DEFAULTS.depth  # head exposure budget
    _failed: set = field(default_factory=set)

    @property
    def R(self) -> RewriteSystem:
        return self.system.congruence

    # -- helpers ---------------------------------------------------------

    def _key(self, ctx: Context, goal: Prop, d: int):
        return frozenset(ctx.props()), goal, d

    def _fresh_hyp(self, ctx: Context, taken=()) -> str:
        used = set(ctx.names()) | set(taken)
        for n in _NAMES:
            if n not in used:
                return n
        return fresh_name("x", used)

    def _expose(self, a: Prop) -> Prop:
        return whnf(a, self.R, self.depth_budget).value

    def _conv(self, a: Prop, b: Prop) -> bool:
        return a == b or bool(congruent(a, b, self.R, self.depth_budget))

    def _terms(self, ctx: Context, goal: Prop, sort: str) -> list[Term]:
        vs = set(free_vars(goal)) | ctx.free_vars()
        out = sorted((v for v in vs if v.sort == sort), key=lambda v: v.name)
        out += self.R.signature.constants(sort)
        return out

    def _fold_rules(self, a: Prop):
        """Proposition rules whose left-hand side matches the atom ``a``."""
        if self.system.kind is System.MODULO or not isinstance(a, Atom):
            return
        for r in self.system.theory.prop_rules:
            sigma = match_prop(r.lhs, a)
            if sigma is None:
                sigma = match_prop(r.lhs, whnf(a, self.R, self.depth_budget).value)
            if sigma is not None:
                yield r, sigma

    # -- search ----------------------------------------------------------

    def prove(self, ctx: Context, goal: Prop, d: int) -> Proof | None:
        if d <= 0:
            return None
        key = self._key(ctx, goal, d)
        if key in self._failed:
            return None
        p = self._prove(ctx, goal, d)
        if p is None:
            self._failed.add(key)
        return p

    def _prove(self, ctx: Context, goal: Prop, d: int) -> Proof | None:
        for h, a in ctx:
            if self._conv(a, goal):
                return Hyp(h)
        g = self._expose(goal)
        match g:
            case Imp(a, b):
                x = self._fresh_hyp(ctx)
                body = self.prove(ctx.extend(x, a), b, d - 1)
                return None if body is None else Lam(x, a, body)
            case And(a, b):
                left = self.prove(ctx, a, d - 1)
                if left is None:
                    return None
                right = self.prove(ctx, b, d - 1)
                return None if right is None else Pair(left, right)
            case Top():
                return Unit()
            case Forall(s, body, hint):
                avoid = {v.name for v in ctx.free_vars() | free_vars(g)}
                y = Var(fresh_name(hint, avoid), s)
                q = self.prove(ctx, open_(body, y), d - 1)
                return None if q is None else Gen(y, q)
            case Or(a, b):
                for side, make in ((a, Inl), (b, Inr)):
                    q = self.prove(ctx, side, d - 1)
                    if q is not None:
                        return make(q)
            case Exists(s, body):
                for t in self._terms(ctx, g, s):
                    q = self.prove(ctx, open_(body, t), d - 1)
                    if q is not None:
                        return Pack(t, q)
            case Atom():
                p = self._intro_atom(ctx, g, d)
                if p is not None:
                    return p
        for h, a in ctx:
            p = self._spine(ctx, Hyp(h), a, goal, d - 1)
            if p is not None:
                return p
        return None

    def _intro_atom(self, ctx: Context, g: Atom, d: int) -> Proof | None:
        for r, sigma in self._fold_rules(g):
            if self.system.kind is System.FOLD_UNFOLD:
                rhs = substitute_many(r.rhs, sigma)
                q = self.prove(ctx, rhs, d - 1 if isinstance(rhs, Atom) else d)
                if q is not None:
                    return Fold(r.name, q)
            else:
                try:
                    intro, _ = self.system.supernatural(r.name)
                except UnsupportedRule:
                    continue
                branches = []
                for prem in intro.premises:
                    avoid = {v.name for v in ctx.free_vars() | free_vars(g)}
                    eigen = []
                    inst = dict(sigma)
                    for v in prem.eigen:
                        y = Var(fresh_name(v.name, avoid), v.sort)
                        avoid.add(y.name)
                        eigen.append(y)
                        inst[v] = y
                    sub, names = ctx, []
                    for hp in prem.hyps:
                        x = self._fresh_hyp(sub)
                        sub = sub.extend(x, substitute_many(hp, inst))
                        names.append(x)
                    q = self.prove(sub, substitute_many(prem.goal, inst), d - 1)
                    if q is None:
                        break
                    branches.append(Branch(tuple(eigen), tuple(names), q))
                else:
                    return SuperIntro(r.name, tuple(branches))
        return None

    def _spine(self, ctx: Context, head: Proof, a: Prop, goal: Prop, d: int) -> Proof | None:
        """Eliminations applied to ``head : a`` until ``goal`` is reached."""
        if self._conv(a, goal):
            return head
        if d <= 0:
            return None
        e = self._expose(a)
        match e:
            case Imp(b, c):
                arg = self.prove(ctx, b, d)
                if arg is not None:
                    p = self._spine(ctx, App(head, arg), c, goal, d - 1)
                    if p is not None:
                        return p
            case And(b, c):
                for proj, side in ((Fst, b), (Snd, c)):
                    p = self._spine(ctx, proj(head), side, goal, d - 1)
                    if p is not None:
                        return p
            case Forall(s, body):
                for t in self._terms(ctx, goal, s):
                    p = self._spine(ctx, Inst(head, t), open_(body, t), goal, d - 1)
                    if p is not None:
                        return p
            case Or(b, c):
                x = self._fresh_hyp(ctx)
                left = self.prove(ctx.extend(x, b), goal, d)
                if left is not None:
                    y = self._fresh_hyp(ctx)
                    right = self.prove(ctx.extend(y, c), goal, d)
                    if right is not None:
                        return Case(head, x, left, y, right)
            case Exists(s, body, hint):
                avoid = {v.name for v in ctx.free_vars() | free_vars(goal) | free_vars(e)}
                v = Var(fresh_name(hint, avoid), s)
                h = self._fresh_hyp(ctx)
                q = self.prove(ctx.extend(h, open_(body, v)), goal, d)
                if q is not None:
                    return Unpack(head, v, h, q)
            case Bot():
                return Absurd(head, goal)
            case Atom():
                return self._spine_atom(ctx, head, e, goal, d)
        return None

    def _spine_atom(self, ctx, head, a: Atom, goal, d) -> Proof | None:
        for r, sigma in self._fold_rules(a):
            if self.system.kind is System.FOLD_UNFOLD:
                rhs = substitute_many(r.rhs, sigma)
                p = self._spine(ctx, Unfold(r.name, head), rhs, goal, d - 1 if isinstance(rhs, Atom) else d)
                if p is not None:
                    return p
                continue
            try:
                _, elims = self.system.supernatural(r.name)
            except UnsupportedRule:
                continue
            for k, er in enumerate(elims):
                for terms in self._param_choices(ctx, goal, er.params):
                    inst = {**sigma, **dict(zip(er.params, terms))}
                    minors = []
                    for prem in er.premises[1:]:
                        q = self.prove(ctx, substitute_many(prem.goal, inst), d)
                        if q is None:
                            break
                        minors.append(q)
                    else:
                        node = SuperElim(r.name, k, tuple(terms), (head, *minors))
                        p = self._spine(ctx, node, substitute_many(er.conclusion.goal, inst), goal, d - 1)
                        if p is not None:
                            return p
        return None

    def _param_choices(self, ctx, goal, params) -> Iterator[tuple[Term, ...]]:
        if not params:
            yield ()
            return
        first, rest = params[0], params[1:]
        for t in self._terms(ctx, goal, first.sort):
            for more in self._param_choices(ctx, goal, rest):
                yield (t,) + more

    def search(self, ctx: Context, goal: Prop, depth: int) -> Proof | None:
        """Iterative deepening up to ``depth``."""
        for d in range(1, depth + 1):
            p = self.prove(ctx, goal, d)
            if p is not None:
                return p
        return None


def search_cutfree(
    seq: Sequent,
    theory: RewriteSystem | RuleSystem,
    depth: int = DEFAULTS.search_depth,
    searcher: Searcher | None = None,
) -> Proof | None:
    system = theory if isinstance(theory, RuleSystem) else modulo(theory)
    s = searcher or Searcher(system)
    return s.search(seq.context, seq.goal, depth)

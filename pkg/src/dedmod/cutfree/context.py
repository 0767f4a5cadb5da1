"""The context-set algebra and the desk-scale sharpened completeness check.

Worlds are contexts drawn from the rewrite-normalized subformula closure of
a goal sequent, ordered by inclusion.  A truth value is an upward-closed set
of worlds; implication is the Kripke one.  Atoms denote the contexts from
which they have a cut-free proof, so membership in a denotation should imply
cut-free provability, which is what the check verifies exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from ..config import DEFAULTS
from ..frontend.printer import show_prop
from ..proofs.check import Derivation, modulo
from ..rewriting import NormalForm, RewriteSystem, normalize
from ..semantics import Model, denote
from ..syntax import Atom, Context, Exists, Forall, Func, Prop, Sequent, subformulas
from ..tva import FiniteAlgebra, LawReport, check_laws
from .search import Searcher

World = frozenset  # of propositions


class UniverseTooLarge(ValueError):
    pass


# Rewriting still running after this many steps is taken not to stop.  Each
# step can nest the formula deeper, and any formula that large would blow the
# universe cap anyway.
NF_FUEL = 64


def normal_form(a: Prop, theory: RewriteSystem, fuel: int = NF_FUEL) -> Prop:
    """The normal form of ``a``, or ``a`` itself when rewriting does not stop."""
    n = normalize(a, theory, fuel)
    return n.value if isinstance(n, NormalForm) else a


def _key(a: Prop) -> str:
    return show_prop(a)


def closure(props: Iterable[Prop], theory: RewriteSystem) -> tuple[Prop, ...]:
    out: dict[Prop, None] = {}
    todo = [normal_form(a, theory) for a in props]
    while todo:
        a = todo.pop()
        for b in subformulas(a):
            b = normal_form(b, theory)
            if b not in out:
                if isinstance(b, (Forall, Exists)):
                    raise ValueError(f"context models handle propositional goals only; found {show_prop(b)}")
                out[b] = None
                if b != a:
                    todo.append(b)
    return tuple(sorted(out, key=lambda b: (len(_key(b)), _key(b))))


def world_key(w: World) -> tuple:
    return (len(w), sorted(_key(a) for a in w))


def show_world(w: World) -> str:
    return "{" + ", ".join(sorted(_key(a) for a in w)) + "}"


def as_context(w: World) -> Context:
    return Context(tuple((f"h{i + 1}", a) for i, a in enumerate(sorted(w, key=_key))))


@dataclass(frozen=True)
class ContextUniverse:
    """Every subset of the closure; ``max_hyps`` bounds the worlds that get checked."""

    formulas: tuple[Prop, ...]
    max_hyps: int = DEFAULTS.max_hyps

    @cached_property
    def worlds(self) -> tuple[World, ...]:
        ws = [frozenset(c) for k in range(len(self.formulas) + 1) for c in combinations(self.formulas, k)]
        return tuple(sorted(ws, key=world_key))

    @cached_property
    def supersets(self) -> dict[World, tuple[World, ...]]:
        return {w: tuple(v for v in self.worlds if w <= v) for w in self.worlds}

    @property
    def checked(self) -> tuple[World, ...]:
        return tuple(w for w in self.worlds if len(w) <= self.max_hyps)

    def up(self, s: Iterable[World]) -> frozenset:
        return frozenset(v for w in s for v in self.supersets[w])


def make_universe(goal: Sequent, theory: RewriteSystem, max_hyps: int = DEFAULTS.max_hyps,
                  cap: int = DEFAULTS.carrier_cap) -> ContextUniverse:
    forms = closure([*goal.context.props(), goal.goal], theory)
    if 2 ** len(forms) > cap:
        raise UniverseTooLarge(f"closure of {len(forms)} formulas gives {2 ** len(forms)} contexts, cap {cap}")
    return ContextUniverse(forms, max_hyps)


@dataclass(frozen=True)
class ContextAlgebra:
    universe: ContextUniverse
    name: str = "contexts"

    @property
    def top(self) -> frozenset:
        return frozenset(self.universe.worlds)

    @property
    def bottom(self) -> frozenset:
        return frozenset()

    def imp(self, a, b):
        sup = self.universe.supersets
        return frozenset(w for w in self.universe.worlds if all(v in b for v in sup[w] if v in a))

    def meet(self, a, b):
        return a & b

    def join(self, a, b):
        return a | b

    def forall(self, family):
        return reduce(self.meet, family, self.top)

    def exists(self, family):
        return reduce(self.join, family, self.bottom)

    def is_positive(self, a) -> bool:
        return frozenset() in a

    def show(self, a) -> str:
        return "[" + "; ".join(show_world(w) for w in sorted(a, key=world_key)) + "]"

    def generated(self, gens: Iterable[frozenset], cap: int = 64) -> FiniteAlgebra:
        """The finite subalgebra generated by ``gens``, top and bottom."""
        els = {self.top, self.bottom, *gens}
        frontier = list(els)
        while frontier:
            new = []
            for a in list(els):
                for b in frontier:
                    for c in (self.meet(a, b), self.join(a, b), self.imp(a, b), self.imp(b, a)):
                        if c not in els:
                            els.add(c)
                            new.append(c)
                if len(els) > cap:
                    raise UniverseTooLarge(f"generated subalgebra exceeds {cap} elements")
            frontier = new
        order = sorted(els, key=lambda s: (-len(s), sorted(world_key(w) for w in s)))
        pairs = [(a, b) for a in order for b in order]
        return FiniteAlgebra(
            self.name, tuple(order), self.top, self.bottom,
            {(a, b): self.imp(a, b) for a, b in pairs},
            {(a, b): self.meet(a, b) for a, b in pairs},
            {(a, b): self.join(a, b) for a, b in pairs},
            frozenset(a for a in order if self.is_positive(a)),
            {a: self.show(a) for a in order},
        )


@dataclass(frozen=True)
class ContextModel:
    model: Model
    universe: ContextUniverse
    theory: RewriteSystem
    depth: int
    searcher: Searcher = field(compare=False, repr=False)

    @property
    def algebra(self) -> ContextAlgebra:
        return self.model.algebra

    def value(self, a: Prop) -> frozenset:
        return denote(normal_form(a, self.theory), {}, self.model)

    def provable(self, w: World, a: Prop) -> bool:
        return self.searcher.search(as_context(w), a, self.depth) is not None


def build_context_model(
    goal: Sequent,
    theory: RewriteSystem,
    depth: int = DEFAULTS.search_depth,
    max_hyps: int = DEFAULTS.max_hyps,
    overrides: Mapping[Atom, Iterable[World]] | None = None,
) -> ContextModel:
    """``overrides`` replaces atom denotations (a negative-control hook)."""
    u = make_universe(goal, theory, max_hyps)
    alg = ContextAlgebra(u)
    searcher = Searcher(modulo(theory))
    atoms = [a for a in u.formulas if isinstance(a, Atom)]
    sig = theory.signature
    preds: dict[str, dict] = {p.name: {} for p in sig.predicates}
    terms: dict[str, set] = {s: set() for s in sig.sorts}
    for a in atoms:
        for t in a.args:
            _ground_subterms(t, terms)
    for a in atoms:
        if overrides and a in overrides:
            den = u.up(frozenset(w) for w in overrides[a])
        else:
            den = u.up(w for w in u.worlds if searcher.search(as_context(w), a, depth) is not None)
        preds[a.pred][a.args] = den
    funs = {f.name: (lambda *xs, _f=f: Func(_f.name, tuple(xs), _f.result)) for f in sig.functions}
    model = Model(alg, sig, {s: tuple(sorted(ts, key=str)) for s, ts in terms.items()}, funs, preds,
                  note=f"context model, {len(u.worlds)} worlds")
    return ContextModel(model, u, theory, depth, searcher)


def _ground_subterms(t, acc):
    if isinstance(t, Func):
        acc[t.sort].add(t)
        for a in t.args:
            _ground_subterms(a, acc)
    else:
        raise ValueError("context models need ground atoms")


@dataclass(frozen=True)
class Failure:
    kind: str  # "membership" or "soundness"
    world: World
    prop: Prop
    label: str = ""

    def show(self) -> str:
        extra = f" ({self.label})" if self.label else ""
        return f"{self.kind}: {show_world(self.world)} |- {show_prop(self.prop)}{extra}"


@dataclass(frozen=True)
class CompletenessReport:
    worlds: int
    formulas: int
    checked: int
    failures: tuple[Failure, ...]
    laws: LawReport
    goal_member: bool  # the empty context belongs to the goal's denotation

    @property
    def membership_failures(self) -> tuple[Failure, ...]:
        return tuple(f for f in self.failures if f.kind == "membership")

    @property
    def soundness_failures(self) -> tuple[Failure, ...]:
        return tuple(f for f in self.failures if f.kind == "soundness")

    @property
    def ok(self) -> bool:
        return not self.failures and self.laws.heyting


def sharpened_completeness_check(
    goal: Sequent,
    theory: RewriteSystem,
    depth: int = DEFAULTS.search_depth,
    max_hyps: int = DEFAULTS.max_hyps,
    corpus: Sequence[tuple[str, Derivation]] = (),
    model: ContextModel | None = None,
) -> CompletenessReport:
    cm = model or build_context_model(goal, theory, depth, max_hyps)
    u = cm.universe
    values = {a: cm.value(a) for a in u.formulas}
    failures = []
    checked = 0
    for w in u.checked:
        for a in u.formulas:
            checked += 1
            if w in values[a] and not cm.provable(w, a):
                failures.append(Failure("membership", w, a))
    forms = set(u.formulas)
    for label, d in corpus:
        seq = d.conclusion
        hyps = frozenset(normal_form(a, theory) for a in seq.context.props())
        concl = normal_form(seq.goal, theory)
        if hyps <= forms and concl in forms and hyps not in values[concl]:
            failures.append(Failure("soundness", hyps, concl, label))
    gens = [v for a, v in values.items() if isinstance(a, Atom)]
    laws = check_laws(cm.algebra.generated(gens))
    goal_value = cm.value(goal.goal)
    member = frozenset(normal_form(a, theory) for a in goal.context.props()) in goal_value
    failures.sort(key=lambda f: (f.kind, world_key(f.world), _key(f.prop)))
    return CompletenessReport(len(u.worlds), len(u.formulas), checked, tuple(failures), laws, member)

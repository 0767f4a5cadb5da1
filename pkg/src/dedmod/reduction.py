"""Cuts, proof reduction, strong-normalization probing, and extraction of
constructive content from normal proofs.

Besides the introduction/elimination cuts, reduction includes the commuting
conversions that push an elimination into the branches of a ``case`` or the
body of an ``unpack``.  Fold/unfold and supernatural redexes contract exactly
like the modulo redex they stand for.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .config import DEFAULTS
from .proofs.check import Derivation, RuleSystem, System, typecheck
from .proofs.terms import (
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
    bound_names,
    canonical,
    children,
    free_hyps,
    free_term_vars,
    iter_nodes,
    subst_hyp,
    subst_term,
    with_child,
)
from .rewriting import match_prop, whnf
from .syntax import And, Context, Exists, Forall, Imp, Or, Prop, Term, Top, Var, fresh_name, open_, substitute_many

Path = tuple[str, ...]


class KernelInvariantError(AssertionError):
    """Raised when a property the kernel guarantees turns out false."""


# ---------------------------------------------------------------------------
# Redexes

_PRINCIPAL = {App: "fun", Fst: "arg", Snd: "arg", Case: "scrut", Inst: "arg", Unpack: "arg",
              Unfold: "arg", Absurd: "arg", SuperElim: "a0"}


def _principal(p: Proof) -> Proof | None:
    label = _PRINCIPAL.get(type(p))
    if label is None:
        return None
    if isinstance(p, SuperElim):
        return p.args[0] if p.args else None
    return getattr(p, label)


def _subst_hyps(body: Proof, names, proofs) -> Proof:
    """Simultaneous substitution of hypotheses."""
    pairs = [(h, q) for h, q in zip(names, proofs)]
    avoid = set(names) | bound_names(body) | free_hyps(body)
    for q in proofs:
        avoid |= free_hyps(q)
    tmp = []
    for h, q in pairs:
        t = fresh_name(f"{h}%", avoid)
        avoid.add(t)
        body = subst_hyp(body, h, Hyp(t))
        tmp.append((t, q))
    for t, q in tmp:
        body = subst_hyp(body, t, q)
    return body


def _subst_terms(body: Proof, vars_, terms) -> Proof:
    avoid = {v.name for v in vars_} | {v.name for v in free_term_vars(body)} | bound_names(body)
    tmp = []
    for v, t in zip(vars_, terms):
        nv = Var(fresh_name(f"{v.name}%", avoid), v.sort)
        avoid.add(nv.name)
        body = subst_term(body, v, nv)
        tmp.append((nv, t))
    for nv, t in tmp:
        body = subst_term(body, nv, t)
    return body


def synthesizable(p: Proof) -> bool:
    """Whether the checker can infer what ``p`` proves (up to rule instances)."""
    match p:
        case Hyp() | Unit() | Ann():
            return True
        case Inl() | Inr() | Pack() | SuperIntro():
            return False
        case Pair(l, r) | Case(l, _, r, _, _) | Unpack(l, _, _, r):
            return synthesizable(l) and synthesizable(r)
        case Lam(_, _, b) | Gen(_, b) | Fold(_, b):
            return synthesizable(b)
        case Unfold(_, q) | SuperElim(_, _, _, (q, *_)):
            return synthesizable(q) or isinstance(q, (Fold, SuperIntro))
    q = _principal(p)
    return q is not None and synthesizable(q)


def annotate(p: Proof, a: Prop | None) -> Proof:
    """``p`` annotated with ``a`` when its proposition could not be inferred otherwise.

    Reduction moves proofs out of checking positions (arguments) into
    positions where their proposition is inferred; the annotation keeps the
    result checkable.
    """
    if a is None or synthesizable(p):
        return p
    return Ann(p, a)


def _strip(p: Proof) -> tuple[Proof, Prop | None]:
    ann = None
    while isinstance(p, Ann):
        p, ann = p.proof, ann or p.prop
    return p, ann


def _part(ann: Prop | None, cls, pick):
    return pick(ann) if isinstance(ann, cls) else None


def cut_contract(p: Proof) -> tuple[str, Proof] | None:
    """Contract the root if it is an introduction/elimination cut.

    Annotations on the principal premise are looked through.
    """
    ann = None
    label = _PRINCIPAL.get(type(p))
    if label is not None and isinstance(_principal(p), Ann):
        inner, ann = _strip(_principal(p))
        p = with_child(p, label, inner)
    match p:
        case App(Lam(x, a, b), q):
            return "beta", subst_hyp(b, x, annotate(q, a))
        case Fst(Pair(l, _)):
            return "fst", l
        case Snd(Pair(_, r)):
            return "snd", r
        case Case(Inl(a), x, l, _, _):
            return "case-inl", subst_hyp(l, x, annotate(a, _part(ann, Or, lambda o: o.left)))
        case Case(Inr(a), _, _, y, r):
            return "case-inr", subst_hyp(r, y, annotate(a, _part(ann, Or, lambda o: o.right)))
        case Inst(Gen(v, b), t):
            return "inst", subst_term(b, v, t)
        case Unpack(Pack(t, q), v, h, b):
            q = annotate(q, _part(ann, Exists, lambda e: open_(e.body, t)))
            return "unpack", subst_hyp(subst_term(b, v, t), h, q)
        case Unfold(r, Fold(r2, q)) if r == r2:
            return "unfold-fold", q
        case SuperElim(r, k, ts, (SuperIntro(r2, branches), *minors)) if r == r2 and k < len(branches):
            br = branches[k]
            if len(br.eigen) != len(ts) or len(br.hyps) != len(minors):
                return None
            body = _subst_terms(br.body, br.eigen, ts)
            return f"{r}-super", _subst_hyps(body, br.hyps, minors)
    return None


def is_cut(p: Proof) -> bool:
    return cut_contract(p) is not None


def _commute(p: Proof) -> tuple[str, Proof] | None:
    """Push the elimination at the root into a case/unpack principal premise."""
    inner, ann = _strip(_principal(p)) if type(p) in _PRINCIPAL else (None, None)
    label = _PRINCIPAL.get(type(p))
    if not isinstance(inner, (Case, Unpack)):
        return None
    hole = with_child(p, label, Unit())
    fh = free_hyps(hole)
    fv = {v.name for v in free_term_vars(hole)}
    if isinstance(p, Absurd):
        fv |= {v.name for v in free_term_vars(Absurd(Unit(), p.prop))}
    match inner:
        case Case(s, x, l, y, r):
            if x in fh:
                nx = fresh_name(x, fh | free_hyps(l))
                l, x = subst_hyp(l, x, Hyp(nx)), nx
            if y in fh:
                ny = fresh_name(y, fh | free_hyps(r))
                r, y = subst_hyp(r, y, Hyp(ny)), ny
            l, r = annotate(l, ann), annotate(r, ann)
            return "case-commute", Case(s, x, with_child(p, label, l), y, with_child(p, label, r))
        case Unpack(q, v, h, b):
            if v.name in fv:
                nv = Var(fresh_name(v.name, fv | {u.name for u in free_term_vars(b)}), v.sort)
                b, v = subst_term(b, v, nv), nv
            if h in fh:
                nh = fresh_name(h, fh | free_hyps(b))
                b, h = subst_hyp(b, h, Hyp(nh)), nh
            return "unpack-commute", Unpack(q, v, h, with_child(p, label, annotate(b, ann)))
    return None


def root_redex(p: Proof) -> tuple[str, Proof] | None:
    return cut_contract(p) or _commute(p)


@dataclass(frozen=True)
class ProofStep:
    path: Path
    rule: str
    result: Proof


def redexes(p: Proof, path: Path = ()) -> Iterator[ProofStep]:
    """Every one-step reduct, leftmost-outermost first."""
    here = root_redex(p)
    if here is not None:
        yield ProofStep(path, *here)
    for label, c in children(p):
        for step in redexes(c, path + (label,)):
            # step.result is the reduct of the child c
            yield ProofStep(step.path, step.rule, with_child(p, label, step.result))


def reduce_step(p: Proof) -> ProofStep | None:
    return next(redexes(p), None)


def is_normal(p: Proof) -> bool:
    return reduce_step(p) is None


def cut_free(p: Proof) -> bool:
    """No introduction/elimination cut at any node."""
    return not any(is_cut(n) for _, n in iter_nodes(p))


# ---------------------------------------------------------------------------
# Normalization with cycle detection


@dataclass(frozen=True)
class ReductionTrace:
    initial: Proof
    steps: tuple[ProofStep, ...]
    outcome: str  # "normal" | "cycle" | "fuel"
    cycle: tuple[int, int] | None = None  # (step index, index of the repeated proof)

    @property
    def final(self) -> Proof:
        return self.steps[-1].result if self.steps else self.initial

    @property
    def proofs(self) -> list[Proof]:
        return [self.initial] + [s.result for s in self.steps]

    @property
    def normal(self) -> bool:
        return self.outcome == "normal"


def normalize_proof(p: Proof, fuel: int = DEFAULTS.fuel) -> ReductionTrace:
    seen = {canonical(p): 0}
    steps: list[ProofStep] = []
    cur = p
    while True:
        step = reduce_step(cur)
        if step is None:
            return ReductionTrace(p, tuple(steps), "normal")
        if len(steps) >= fuel:
            return ReductionTrace(p, tuple(steps), "fuel")
        steps.append(step)
        cur = step.result
        key = canonical(cur)
        if key in seen:
            return ReductionTrace(p, tuple(steps), "cycle", (len(steps), seen[key]))
        seen[key] = len(steps)


# ---------------------------------------------------------------------------
# Strong normalization probe


@dataclass(frozen=True)
class SN:
    reachable: tuple[Proof, ...]
    longest: int  # length of the longest reduction sequence

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotSN:
    witness: tuple[Proof, ...]  # reduction path whose last proof repeats an earlier one

    def __bool__(self):
        return False


@dataclass(frozen=True)
class SNUnknown:
    explored: int

    def __bool__(self):
        return False


SNVerdict = Union[SN, NotSN, SNUnknown]


def strongly_normalizing(p: Proof, fuel: int = DEFAULTS.sn_fuel) -> SNVerdict:
    """Explore the whole reduction graph (every redex position).

    ``SN`` when the graph is finite and acyclic within ``fuel`` distinct
    proofs, ``NotSN`` when a cycle is found, ``SNUnknown`` otherwise.
    """
    root = canonical(p)
    rep = {root: p}
    succ: dict[Proof, list[Proof]] = {}
    state: dict[Proof, int] = {root: 1}  # 1 on stack, 2 done
    longest: dict[Proof, int] = {}
    stack = [(root, None)]
    path = [root]
    while stack:
        node, it = stack[-1]
        if it is None:
            if len(rep) > fuel:
                return SNUnknown(len(rep))
            kids = []
            for step in redexes(rep[node]):
                k = canonical(step.result)
                rep.setdefault(k, step.result)
                kids.append(k)
            succ[node] = kids
            it = iter(kids)
            stack[-1] = (node, it)
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            path.pop()
            state[node] = 2
            longest[node] = max((longest[k] + 1 for k in succ[node]), default=0)
            continue
        st = state.get(nxt)
        if st == 1:
            return NotSN(tuple(rep[k] for k in path) + (rep[nxt],))
        if st is None:
            state[nxt] = 1
            stack.append((nxt, None))
            path.append(nxt)
    return SN(tuple(rep[k] for k in succ), longest[root])


# ---------------------------------------------------------------------------
# Constructive content


@dataclass(frozen=True)
class DisjunctChoice:
    side: str  # "left" | "right"
    proof: Proof
    prop: Prop


@dataclass(frozen=True)
class Witness:
    term: Term
    proof: Proof
    prop: Prop


@dataclass(frozen=True)
class NotApplicable:
    prop: Prop


def extract_constructive_content(
    p: Proof, a: Prop, system: RuleSystem, depth: int = DEFAULTS.depth
) -> DisjunctChoice | Witness | NotApplicable:
    if free_hyps(p):
        raise ValueError("extraction needs a closed proof")
    if not is_normal(p):
        raise ValueError("extraction needs a normal proof")
    d = typecheck(p, Context(), a, system, depth)
    if not d:
        raise ValueError(f"proof does not check against {a}: {d.reason}")
    while isinstance(p, (Fold, Ann)):
        if isinstance(p, Ann):
            p = p.proof
            continue
        rule = system.theory.rule(p.rule)
        sigma = match_prop(rule.lhs, a)
        if sigma is None:
            raise KernelInvariantError(f"fold {p.rule} at the root of a proof of {a}")
        a, p = substitute_many(rule.rhs, sigma), p.arg
    head = whnf(a, system.congruence, depth).value
    match head:
        case Or(left, right):
            match p:
                case Inl(q):
                    return DisjunctChoice("left", q, left)
                case Inr(q):
                    return DisjunctChoice("right", q, right)
            raise KernelInvariantError(f"closed normal proof of {a} does not end with a disjunction introduction")
        case Exists(_, body):
            if isinstance(p, Pack):
                return Witness(p.term, p.body, open_(body, p.term))
            raise KernelInvariantError(f"closed normal proof of {a} does not end with an existential introduction")
    return NotApplicable(a)


# ---------------------------------------------------------------------------
# Erasure to the modulo system


def _leaves(c: Prop) -> int:
    match c:
        case Imp(_, r):
            return _leaves(r)
        case And(l, r):
            return _leaves(l) + _leaves(r)
        case Forall(_, body):
            return _leaves(body)
        case Top():
            return 0
    return 1


def erase(d: Derivation) -> Proof:
    """Translate a fold/unfold or supernatural proof into the modulo system.

    Fold and unfold nodes vanish; supernatural introductions and eliminations
    expand to the logical introductions and eliminations they absorb.
    """
    if d.system.kind is System.MODULO:
        return d.proof
    goals: dict[Path, Prop] = {}
    for n in d.root.walk():
        goals.setdefault(n.path, n.prop)
    theory = d.system.theory
    taken = bound_names(d.proof) | free_hyps(d.proof) | {v.name for v in free_term_vars(d.proof)}

    def fresh(base):
        name = fresh_name(base, taken)
        taken.add(name)
        return name

    def go(p: Proof, path: Path) -> Proof:
        match p:
            case Fold(_, q) | Unfold(_, q):
                return go(q, path + ("arg",))
            case SuperIntro(rule, branches):
                r = theory.rule(rule)
                sigma = match_prop(r.lhs, goals[path])
                if sigma is None:
                    sigma = match_prop(r.lhs, whnf(goals[path], theory.term_part()).value) or {}
                counter = iter(range(len(branches)))

                def build(c: Prop, hyps: list[str], eig: list[Var]) -> Proof:
                    match c:
                        case Imp(l, rr):
                            z = fresh("h")
                            return Lam(z, substitute_many(l, sigma), build(rr, hyps + [z], eig))
                        case And(l, rr):
                            return Pair(build(l, hyps, eig), build(rr, hyps, eig))
                        case Forall(s, body, hint):
                            y = Var(fresh(hint), s)
                            return Gen(y, build(open_(body, y), hyps, eig + [y]))
                        case Top():
                            return Unit()
                    i = next(counter)
                    br = branches[i]
                    body = _subst_terms(br.body, br.eigen, eig)
                    body = _subst_hyps(body, br.hyps, [Hyp(h) for h in hyps])
                    # renaming never changes the tree shape, so paths still line up
                    return go(body, path + (f"b{i}",))

                return build(r.rhs, [], [])
            case SuperElim(rule, k, ts, args):
                r = theory.rule(rule)
                acc = go(args[0], path + ("a0",))
                minors = iter(enumerate(args[1:], start=1))
                terms = iter(ts)
                c, idx = r.rhs, k
                while True:
                    match c:
                        case Imp(_, rr):
                            i, m = next(minors)
                            acc = App(acc, go(m, path + (f"a{i}",)))
                            c = rr
                        case And(l, rr):
                            n = _leaves(l)
                            if idx < n:
                                acc, c = Fst(acc), l
                            else:
                                acc, c, idx = Snd(acc), rr, idx - n
                        case Forall(_, body):
                            t = next(terms)
                            acc, c = Inst(acc, t), open_(body, t)
                        case _:
                            return acc
        out = p
        for label, ch in children(p):
            out = with_child(out, label, go(ch, path + (label,)))
        return out

    return go(d.proof, ())

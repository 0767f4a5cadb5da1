"""Algebra-valued models of rewrite theories.

A model interprets sorts by finite (or truncated) domains, function symbols
by total maps and predicates by maps into the carrier of a truth values
algebra.  The same machinery runs over the candidates algebra, which is how
the Tait-style membership check is phrased.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence, Union

from .config import DEFAULTS
from .proofs.check import Derivation, modulo, typecheck
from .proofs.terms import App, Hyp, Lam, Proof
from .reduction import NotSN, erase, strongly_normalizing
from .rewriting import RewriteRule, RewriteSystem, congruent, whnf
from .syntax import (
    And,
    Atom,
    Bot,
    Context,
    Exists,
    Forall,
    Func,
    Imp,
    Or,
    Prop,
    Signature,
    Top,
    Var,
    free_vars,
    open_,
)
from .tva import (
    CandidateAlgebra,
    CTop,
    COpaque,
    FiniteAlgebra,
    TruthValueAlgebra,
    Verdict,
    candidate_member,
    show_candidate,
)

Table = Union[Mapping[tuple, object], Callable[..., object]]
Valuation = Mapping[Var, object]


class TruncationOverflow(ArithmeticError):
    """A function application left the (truncated) domain."""


@dataclass(frozen=True)
class Model:
    algebra: TruthValueAlgebra
    signature: Signature
    domains: Mapping[str, tuple]
    functions: Mapping[str, Table]
    predicates: Mapping[str, Table]
    note: str = ""

    def describe(self) -> dict:
        show = getattr(self.algebra, "show", None) or (lambda a: show_candidate(a) if not isinstance(a, str) else a)
        out = {"algebra": self.algebra.name, "domains": {s: [str(d) for d in ds] for s, ds in self.domains.items()}}
        preds = {}
        for name, table in self.predicates.items():
            if isinstance(table, Mapping):
                preds[name] = {",".join(map(str, k)) or "()": show(v) for k, v in table.items()}
        funs = {}
        for name, table in self.functions.items():
            if isinstance(table, Mapping):
                funs[name] = {",".join(map(str, k)) or "()": str(v) for k, v in table.items()}
        out["predicates"] = preds
        out["functions"] = funs
        return out


def _call(table: Table, args: tuple, what: str):
    if isinstance(table, Mapping):
        try:
            return table[args]
        except KeyError:
            raise TruncationOverflow(f"{what}{args} outside the interpreted domain") from None
    return table(*args)


def _quantifier_family(domain, values, algebra):
    if isinstance(algebra, CandidateAlgebra):
        return tuple(zip(domain, values))
    return values


def denote(e, phi: Valuation, m: Model):
    """Compositional denotation of a term (domain element) or proposition (carrier element)."""
    b = m.algebra
    match e:
        case Var():
            if e not in phi:
                raise ValueError(f"variable {e.name} has no value")
            return phi[e]
        case Func(name, args, sort):
            vals = tuple(denote(a, phi, m) for a in args)
            out = _call(m.functions[name], vals, name)
            if out not in m.domains[sort]:
                raise TruncationOverflow(f"{name}{vals} = {out} leaves the domain of {sort}")
            return out
        case Atom(pred, args):
            vals = tuple(denote(a, phi, m) for a in args)
            return _call(m.predicates[pred], vals, pred)
        case Top():
            return b.top
        case Bot():
            return b.bottom
        case Imp(l, r):
            return b.imp(denote(l, phi, m), denote(r, phi, m))
        case And(l, r):
            return b.meet(denote(l, phi, m), denote(r, phi, m))
        case Or(l, r):
            return b.join(denote(l, phi, m), denote(r, phi, m))
        case Forall(s, body) | Exists(s, body):
            x = Var(f"%q{len(phi)}", s)
            dom = m.domains[s]
            vals = [denote(open_(body, x), {**phi, x: d}, m) for d in dom]
            fam = _quantifier_family(dom, vals, b)
            return b.forall(fam) if isinstance(e, Forall) else b.exists(fam)
    raise TypeError(f"cannot denote {e!r}")


def valuations(vars_: Iterable[Var], m: Model) -> list[dict]:
    vs = sorted(set(vars_), key=lambda v: (v.name, v.sort))
    return [dict(zip(vs, combo)) for combo in product(*(m.domains[v.sort] for v in vs))]


# ---------------------------------------------------------------------------
# Rule validity


@dataclass(frozen=True)
class Valid:
    checked: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Invalid:
    valuation: dict
    lhs: object
    rhs: object

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Inconclusive:
    checked: int
    overflowed: tuple[dict, ...]

    def __bool__(self):
        return False


RuleVerdict = Union[Valid, Invalid, Inconclusive]


def rule_valid(rule: RewriteRule, m: Model, phis: Sequence[Valuation] | None = None) -> RuleVerdict:
    if phis is None:
        phis = valuations(free_vars(rule.lhs), m)
    checked, overflow = 0, []
    for phi in phis:
        try:
            left, right = denote(rule.lhs, phi, m), denote(rule.rhs, phi, m)
        except TruncationOverflow:
            overflow.append(dict(phi))
            continue
        if left != right:
            return Invalid(dict(phi), left, right)
        checked += 1
    if overflow:
        return Inconclusive(checked, tuple(overflow))
    return Valid(checked)


def is_model(theory: RewriteSystem, m: Model) -> bool:
    return all(isinstance(rule_valid(r, m), Valid) for r in theory.rules)


# ---------------------------------------------------------------------------
# Model search


class SearchTooLarge(ValueError):
    pass


def _arg_tuples(decl_args, domains):
    return list(product(*(domains[s] for s in decl_args)))


def enumerate_models(
    theory: RewriteSystem, b: FiniteAlgebra, size: int = DEFAULTS.model_size, limit: int = 1_000_000
):
    """All models over domains ``{0..size-1}``, in canonical order.

    Predicates vary before functions (the first declared predicate slowest),
    carrier elements in declared order.
    """
    sig = theory.signature
    domains = {s: tuple(range(size)) for s in sig.sorts}
    pred_slots = [(p.name, args) for p in sig.predicates for args in _arg_tuples(p.args, domains)]
    fun_slots = [(f.name, args, f.result) for f in sig.functions for args in _arg_tuples(f.args, domains)]
    total = len(b.elements) ** len(pred_slots) * size ** len(fun_slots)
    if total > limit:
        raise SearchTooLarge(f"{total} interpretations exceed the search limit {limit}")
    for pvals in product(b.elements, repeat=len(pred_slots)):
        preds: dict[str, dict] = {p.name: {} for p in sig.predicates}
        for (name, args), v in zip(pred_slots, pvals):
            preds[name][args] = v
        for fvals in product(*(domains[res] for _, _, res in fun_slots)):
            funs: dict[str, dict] = {f.name: {} for f in sig.functions}
            for (name, args, _), v in zip(fun_slots, fvals):
                funs[name][args] = v
            m = Model(b, sig, domains, funs, preds)
            if is_model(theory, m):
                yield m


def find_model(theory: RewriteSystem, b: FiniteAlgebra, size: int = DEFAULTS.model_size) -> Model | None:
    return next(enumerate_models(theory, b, size), None)


# ---------------------------------------------------------------------------
# Successor recursion over a truncated N


def successor_model(
    theory: RewriteSystem,
    b: TruthValueAlgebra,
    bound: int = DEFAULTS.nat_bound,
    alpha0=None,
    others=None,
    rule_name: str | None = None,
) -> Model:
    """Model of a rule ``P(f(x)) --> A`` on ``{0..bound}`` with ``f`` the successor.

    ``P`` is defined by recursion: ``alpha(0)`` is ``alpha0`` (default top),
    ``alpha(n+1)`` the denotation of ``A`` at ``x = n``.  Other predicates get
    ``others`` (default top), constants denote 0.  ``f(bound)`` overflows.
    """
    sig = theory.signature
    rules = [r for r in theory.prop_rules if rule_name in (None, r.name)]
    rule = next((r for r in rules if _successor_shape(r)), None)
    if rule is None:
        raise ValueError("no rule of the shape P(f(x)) --> A")
    pname = rule.lhs.pred
    fterm = rule.lhs.args[0]
    sort = fterm.sort
    dom = tuple(range(bound + 1))
    domains = {s: dom if s == sort else (0,) for s in sig.sorts}
    funs: dict[str, Table] = {}
    for f in sig.functions:
        if f.name == fterm.name:
            funs[f.name] = {(n,): n + 1 for n in dom if n < bound}
        elif not f.args:
            funs[f.name] = {(): 0}
        else:
            funs[f.name] = {args: 0 for args in _arg_tuples(f.args, domains)}
    top = b.top if others is None else others
    preds: dict[str, dict] = {}
    for p in sig.predicates:
        preds[p.name] = {args: top for args in _arg_tuples(p.args, domains)}
    alpha = {(0,): b.top if alpha0 is None else alpha0}
    preds[pname] = alpha
    x = fterm.args[0]
    m = Model(b, sig, domains, funs, preds, note=f"{pname} by successor recursion on {{0..{bound}}}")
    for n in range(bound):
        alpha[(n + 1,)] = denote(rule.rhs, {x: n}, m)
    return m


def _successor_shape(r: RewriteRule) -> bool:
    match r.lhs:
        case Atom(_, (Func(_, (Var() as x,), _),)):
            return free_vars(r.rhs) <= {x}
    return False


# ---------------------------------------------------------------------------
# Super-consistency


@dataclass(frozen=True)
class NotSNEvidence:
    proof: Proof
    prop: Prop
    witness: tuple[Proof, ...]
    origin: str  # "pattern" or "supplied"


@dataclass(frozen=True)
class AlgebraResult:
    algebra: str
    model: Model | None
    seconds: float
    error: str = ""


@dataclass(frozen=True)
class SuperConsistencyReport:
    results: tuple[AlgebraResult, ...]
    evidence: tuple[NotSNEvidence, ...]
    note: str = "finite-algebra models are necessary-condition checks only"

    @property
    def models_found(self) -> int:
        return sum(r.model is not None for r in self.results)

    @property
    def all_models(self) -> bool:
        return self.models_found == len(self.results)


def self_application(theory: RewriteSystem, depth: int = DEFAULTS.depth) -> list[tuple[Proof, Prop]]:
    """Proofs ``omega omega`` for rules ``P --> A`` with ``A`` exposing ``B => C`` and ``B`` congruent to ``P``."""
    out = []
    for r in theory.prop_rules:
        if free_vars(r.lhs):
            continue
        head = whnf(r.rhs, theory, depth).value
        if not isinstance(head, Imp) or not congruent(head.left, r.lhs, theory, depth):
            continue
        omega = Lam("x", r.lhs, App(Hyp("x"), Hyp("x")))
        p = App(omega, omega)
        if typecheck(p, Context(), head.right, modulo(theory), depth):
            out.append((p, head.right))
    return out


def super_consistency_report(
    theory: RewriteSystem,
    battery: Sequence[FiniteAlgebra],
    size: int = DEFAULTS.model_size,
    proofs: Sequence[tuple[Proof, Prop]] = (),
    fuel: int = DEFAULTS.sn_fuel,
) -> SuperConsistencyReport:
    results = []
    for b in battery:
        start = time.perf_counter()
        try:
            m, err = find_model(theory, b, size), ""
        except SearchTooLarge as e:
            m, err = None, str(e)
        results.append(AlgebraResult(b.name, m, time.perf_counter() - start, err))
    evidence = []
    for origin, items in (("pattern", self_application(theory)), ("supplied", proofs)):
        for p, a in items:
            v = strongly_normalizing(p, fuel)
            if isinstance(v, NotSN):
                evidence.append(NotSNEvidence(p, a, v.witness, origin))
    return SuperConsistencyReport(tuple(results), tuple(evidence))


# ---------------------------------------------------------------------------
# Soundness and Tait desk checks


def soundness_check(d: Derivation, m: Model, phis: Sequence[Valuation] | None = None) -> bool:
    """``(meet of the context) => goal`` is positive under every tested valuation."""
    seq = d.conclusion
    b = m.algebra
    if phis is None:
        vs = set(free_vars(seq.goal))
        for a in seq.context.props():
            vs |= free_vars(a)
        phis = valuations(vs, m)
    for phi in phis:
        try:
            hyp = b.top
            for a in seq.context.props():
                hyp = b.meet(hyp, denote(a, phi, m))
            val = b.imp(hyp, denote(seq.goal, phi, m))
        except TruncationOverflow:
            continue
        if not b.is_positive(val):
            return False
    return True


def candidate_denotation(a: Prop, theory: RewriteSystem, depth: int = DEFAULTS.depth, terms=None):
    """Candidate of ``a`` in the pre-model that sends irreducible atoms to top.

    Reducible atoms denote the candidate of what they rewrite to; after
    ``depth`` unfoldings the candidate becomes opaque.
    """
    cand = CandidateAlgebra()

    def go(a: Prop, fuel: int):
        match a:
            case Atom():
                w = whnf(a, theory, 1)
                if w.value == a or not w.steps:
                    return CTop()
                if fuel == 0:
                    return COpaque(str(a))
                return go(w.value, fuel - 1)
            case Top() | Bot():
                return CTop()
            case Imp(l, r):
                return cand.imp(go(l, fuel), go(r, fuel))
            case And(l, r):
                return cand.meet(go(l, fuel), go(r, fuel))
            case Or(l, r):
                return cand.join(go(l, fuel), go(r, fuel))
            case Forall(s, body) | Exists(s, body):
                dom = _sample_terms(s, theory.signature, terms)
                fam = tuple((t, go(open_(body, t), fuel)) for t in dom)
                return cand.forall(fam) if isinstance(a, Forall) else cand.exists(fam)
        raise TypeError(a)

    return go(a, depth)


def _sample_terms(sort: str, sig: Signature, terms) -> list:
    if terms is not None and sort in terms:
        return list(terms[sort])
    return [Var("%t", sort)] + sig.constants(sort)


def tait_check(
    p: Proof | Derivation,
    a: Prop,
    theory: RewriteSystem,
    fuel: int = DEFAULTS.sn_fuel,
    samples=None,
    depth: int = DEFAULTS.depth,
) -> Verdict:
    """Membership of a closed proof in the candidate denotation of its proposition.

    Fold/unfold and supernatural proofs are first translated to the modulo
    system, where the candidate operations are defined.
    """
    if isinstance(p, Derivation):
        proof = erase(p)
    else:
        proof = p
    return candidate_member(candidate_denotation(a, theory, depth), proof, fuel, samples)

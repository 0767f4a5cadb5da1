"""Rewrite systems on terms and propositions, and the congruence they generate.

The strategy is fixed leftmost-outermost.  ``congruent`` is three-valued: a
``Yes`` always carries a joinability witness that can be replayed step by
step, and ``No`` is only claimed when both sides reach distinct normal forms
in a system whose critical pairs are all joinable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from .config import DEFAULTS
from .syntax import (
    And,
    Atom,
    BVar,
    Exists,
    Expr,
    Forall,
    Func,
    Imp,
    Or,
    Prop,
    Signature,
    SortError,
    Term,
    Var,
    check_prop,
    check_term,
    close,
    free_vars,
    iter_terms,
    open_,
    substitute_many,
)

Position = tuple[int, ...]


class RuleError(ValueError):
    pass


def is_term(e) -> bool:
    return isinstance(e, (Var, BVar, Func))


@dataclass(frozen=True)
class RewriteRule:
    name: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if is_term(self.lhs) != is_term(self.rhs):
            raise RuleError(f"rule {self.name}: both sides must be terms or both propositions")
        if not is_term(self.lhs) and not isinstance(self.lhs, Atom):
            raise RuleError(f"rule {self.name}: proposition rule left-hand side must be atomic")
        if isinstance(self.lhs, Var):
            raise RuleError(f"rule {self.name}: left-hand side cannot be a variable")
        if is_term(self.lhs) and self.lhs.sort != self.rhs.sort:
            raise RuleError(f"rule {self.name}: sides have different sorts")
        extra = free_vars(self.rhs) - free_vars(self.lhs)
        if extra:
            names = sorted(v.name for v in extra)
            raise RuleError(f"rule {self.name}: right-hand side variables {names} not bound by the left")

    @property
    def kind(self) -> str:
        return "term" if is_term(self.lhs) else "prop"


@dataclass(frozen=True)
class RewriteSystem:
    rules: tuple[RewriteRule, ...] = ()
    signature: Signature = field(default_factory=Signature)
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(names) != len(set(names)):
            raise RuleError(f"duplicate rule names: {names}")
        for r in self.rules:
            try:
                if r.kind == "term":
                    check_term(r.lhs, self.signature)
                    check_term(r.rhs, self.signature)
                else:
                    check_prop(r.lhs, self.signature)
                    check_prop(r.rhs, self.signature)
            except SortError as e:
                raise RuleError(f"rule {r.name}: {e}") from None

    def rule(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    @property
    def term_rules(self) -> tuple[RewriteRule, ...]:
        return tuple(r for r in self.rules if r.kind == "term")

    @property
    def prop_rules(self) -> tuple[RewriteRule, ...]:
        return tuple(r for r in self.rules if r.kind == "prop")

    def term_part(self) -> RewriteSystem:
        """The same system with its proposition rules dropped."""
        key = "term_part"
        if key not in self._cache:
            self._cache[key] = RewriteSystem(self.term_rules, self.signature)
        return self._cache[key]


# ---------------------------------------------------------------------------
# Matching


def match_term(pat: Term, t: Term, sigma: dict[Var, Term]) -> dict[Var, Term] | None:
    match pat:
        case Var():
            if pat.sort != t.sort or any(isinstance(u, BVar) for u in iter_terms(t)):
                return None
            bound = sigma.get(pat)
            if bound is None:
                return {**sigma, pat: t}
            return sigma if bound == t else None
        case Func(name, args, _):
            if not isinstance(t, Func) or t.name != name or len(t.args) != len(args):
                return None
            for p, u in zip(args, t.args):
                sigma = match_term(p, u, sigma)
                if sigma is None:
                    return None
            return sigma
    return sigma if pat == t else None


def match_prop(pat: Prop, a: Prop, sigma: dict[Var, Term] | None = None) -> dict[Var, Term] | None:
    """Structural first-order matching of a proposition pattern."""
    sigma = {} if sigma is None else sigma
    match pat:
        case Atom(p, args):
            if not isinstance(a, Atom) or a.pred != p or len(a.args) != len(args):
                return None
            for q, u in zip(args, a.args):
                sigma = match_term(q, u, sigma)
                if sigma is None:
                    return None
            return sigma
        case And(l, r) | Or(l, r) | Imp(l, r):
            if type(a) is not type(pat):
                return None
            sigma = match_prop(l, a.left, sigma)
            return None if sigma is None else match_prop(r, a.right, sigma)
        case Forall(s, body) | Exists(s, body):
            if type(a) is not type(pat) or a.sort != s:
                return None
            return match_prop(body, a.body, sigma)
    return sigma if pat == a else None


def instantiate(rule: RewriteRule, sigma: dict[Var, Term]) -> Expr:
    return substitute_many(rule.rhs, sigma)


# ---------------------------------------------------------------------------
# One-step rewriting


@dataclass(frozen=True)
class Step:
    position: Position
    rule: str
    result: Expr
    match: tuple[tuple[Var, Term], ...] = ()


def _binder_var(depth: int, sort: str) -> Var:
    # '%' never occurs in parsed identifiers, so these cannot clash.
    return Var(f"%b{depth}", sort)


def _term_redexes(t: Term, rules, pos: Position) -> Iterator[tuple[Position, RewriteRule, dict, Term]]:
    for r in rules:
        sigma = match_term(r.lhs, t, {})
        if sigma is not None:
            yield pos, r, sigma, instantiate(r, sigma)
    if isinstance(t, Func):
        for i, a in enumerate(t.args):
            for p, r, sigma, new in _term_redexes(a, rules, pos + (i,)):
                args = list(t.args)
                args[i] = new
                yield p, r, sigma, Func(t.name, tuple(args), t.sort)


def _prop_redexes(a: Prop, R: RewriteSystem, pos: Position, depth: int):
    match a:
        case Atom(_, args):
            for r in R.prop_rules:
                sigma = match_prop(r.lhs, a)
                if sigma is not None:
                    yield pos, r, sigma, instantiate(r, sigma)
            for i, t in enumerate(args):
                for p, r, sigma, new in _term_redexes(t, R.term_rules, pos + (i,)):
                    new_args = list(args)
                    new_args[i] = new
                    yield p, r, sigma, Atom(a.pred, tuple(new_args))
        case And(l, r_) | Or(l, r_) | Imp(l, r_):
            for p, r, sigma, new in _prop_redexes(l, R, pos + (0,), depth):
                yield p, r, sigma, type(a)(new, r_)
            for p, r, sigma, new in _prop_redexes(r_, R, pos + (1,), depth):
                yield p, r, sigma, type(a)(l, new)
        case Forall(s, body, hint) | Exists(s, body, hint):
            x = _binder_var(depth, s)
            for p, r, sigma, new in _prop_redexes(open_(body, x), R, pos + (0,), depth + 1):
                yield p, r, sigma, type(a)(s, close(new, x), hint)


def redexes(e: Expr, R: RewriteSystem) -> Iterator[Step]:
    """Every one-step rewrite of ``e``, in leftmost-outermost order."""
    if is_term(e):
        gen = _term_redexes(e, R.term_rules, ())
    else:
        gen = _prop_redexes(e, R, (), 0)
    for pos, rule, sigma, result in gen:
        yield Step(pos, rule.name, result, tuple(sorted(sigma.items(), key=lambda kv: kv[0].name)))


def rewrite_step(e: Expr, R: RewriteSystem) -> Step | None:
    return next(redexes(e, R), None)


def rewrite_at(e: Expr, position: Position, rule: str, R: RewriteSystem) -> Expr | None:
    """Contract ``rule`` at ``position`` if that is a redex."""
    for step in redexes(e, R):
        if step.position == position and step.rule == rule:
            return step.result
    return None


# ---------------------------------------------------------------------------
# Normalization


@dataclass(frozen=True)
class NormalForm:
    value: Expr
    steps: tuple[Step, ...] = ()


@dataclass(frozen=True)
class FuelExhausted:
    value: Expr
    steps: tuple[Step, ...] = ()


Normalization = Union[NormalForm, FuelExhausted]


def normalize(e: Expr, R: RewriteSystem, fuel: int = DEFAULTS.fuel) -> Normalization:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    steps = []
    for _ in range(fuel + 1):
        step = rewrite_step(e, R)
        if step is None:
            return NormalForm(e, tuple(steps))
        if len(steps) == fuel:
            break
        steps.append(step)
        e = step.result
    return FuelExhausted(e, tuple(steps))


def whnf(a: Prop, R: RewriteSystem, budget: int = DEFAULTS.depth) -> Normalization:
    """Rewrite at head position until the head is a connective or no rule applies.

    Term rules fire inside the atom's arguments only when no proposition rule
    matches the atom as it stands.
    """
    steps = []
    while isinstance(a, Atom):
        step = None
        for r in R.prop_rules:
            sigma = match_prop(r.lhs, a)
            if sigma is not None:
                step = Step((), r.name, instantiate(r, sigma), tuple(sorted(sigma.items(), key=lambda kv: kv[0].name)))
                break
        if step is None:
            if not R.prop_rules or not any(r.lhs.pred == a.pred for r in R.prop_rules):
                break
            step = next(redexes(a, R.term_part()), None)
            if step is None:
                break
        if len(steps) == budget:
            return FuelExhausted(a, tuple(steps))
        steps.append(step)
        a = step.result
    return NormalForm(a, tuple(steps))


# ---------------------------------------------------------------------------
# Congruence


@dataclass(frozen=True)
class Witness:
    """Rewrite sequences from both sides to a common form."""

    left: Expr
    right: Expr
    left_steps: tuple[Step, ...]
    right_steps: tuple[Step, ...]
    join: Expr


@dataclass(frozen=True)
class Yes:
    witness: Witness

    def __bool__(self):
        return True


@dataclass(frozen=True)
class No:
    left_normal: Expr
    right_normal: Expr

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Unknown:
    reason: str = "budget"

    def __bool__(self):
        return False


Verdict = Union[Yes, No, Unknown]


def _reach(e: Expr, R: RewriteSystem, depth: int) -> list[dict[Expr, tuple[Step, ...]]]:
    """Breadth-first levels of forms reachable from ``e``; each form maps to
    the first (canonical) step sequence reaching it."""
    seen: dict[Expr, tuple[Step, ...]] = {e: ()}
    levels = [{e: ()}]
    for _ in range(depth):
        nxt: dict[Expr, tuple[Step, ...]] = {}
        for form, path in levels[-1].items():
            for step in redexes(form, R):
                if step.result not in seen:
                    seen[step.result] = path + (step,)
                    nxt[step.result] = path + (step,)
        if not nxt:
            break
        levels.append(nxt)
    return levels


def join(a: Expr, b: Expr, R: RewriteSystem, depth: int) -> Witness | None:
    """Search for a common reduct within ``depth`` steps on each side.

    Among all meeting points the one with the fewest total steps is chosen,
    ties broken by the left side's breadth-first order, so the answer does
    not depend on which side is searched first.
    """
    if a == b:
        return Witness(a, b, (), (), a)
    key = ("join", a, b, depth)
    if key in R._cache:
        return R._cache[key]
    la, lb = _reach(a, R, depth), _reach(b, R, depth)
    flat_b: dict[Expr, tuple[Step, ...]] = {}
    for level in lb:
        for form, path in level.items():
            flat_b.setdefault(form, path)
    best = None
    for level in la:
        for form, path in level.items():
            if form in flat_b:
                cost = len(path) + len(flat_b[form])
                if best is None or cost < best[0]:
                    best = (cost, form, path, flat_b[form])
    result = None
    if best is not None:
        _, form, pa, pb = best
        result = Witness(a, b, pa, pb, form)
    R._cache[key] = result
    return result


def congruent(a: Prop, b: Prop, R: RewriteSystem, depth: int = DEFAULTS.depth) -> Verdict:
    w = join(a, b, R, depth)
    if w is not None:
        return Yes(w)
    na, nb = normalize(a, R, depth), normalize(b, R, depth)
    if isinstance(na, NormalForm) and isinstance(nb, NormalForm) and na.value != nb.value:
        if locally_confluent(R):
            return No(na.value, nb.value)
        return Unknown("distinct normal forms, but the system has unjoinable critical pairs")
    return Unknown("budget")


def replay(w: Witness, R: RewriteSystem) -> bool:
    """Re-validate every recorded step of a witness."""
    for start, steps in ((w.left, w.left_steps), (w.right, w.right_steps)):
        cur = start
        for s in steps:
            nxt = rewrite_at(cur, s.position, s.rule, R)
            if nxt is None or nxt != s.result:
                return False
            cur = nxt
        if cur != w.join:
            return False
    return True


def replay_steps(start: Expr, steps, R: RewriteSystem) -> Expr | None:
    cur = start
    for s in steps:
        nxt = rewrite_at(cur, s.position, s.rule, R)
        if nxt is None or nxt != s.result:
            return None
        cur = nxt
    return cur


# ---------------------------------------------------------------------------
# Critical pairs


@dataclass(frozen=True)
class CriticalPair:
    rules: tuple[str, str]
    position: Position
    peak: Expr
    left: Expr
    right: Expr
    joinable: bool


def _rename_apart(rule: RewriteRule, suffix: str) -> RewriteRule:
    sigma = {v: Var(v.name + suffix, v.sort) for v in free_vars(rule.lhs)}
    return RewriteRule(rule.name, substitute_many(rule.lhs, sigma), substitute_many(rule.rhs, sigma))


def _walk(sigma: dict[Var, Term], t: Term) -> Term:
    while isinstance(t, Var) and t in sigma:
        t = sigma[t]
    return t


def _occurs(x: Var, t: Term, sigma) -> bool:
    t = _walk(sigma, t)
    if t == x:
        return True
    return isinstance(t, Func) and any(_occurs(x, a, sigma) for a in t.args)


def unify(s: Term, t: Term, sigma: dict[Var, Term] | None = None) -> dict[Var, Term] | None:
    """Syntactic first-order unification (Robinson)."""
    sigma = {} if sigma is None else dict(sigma)
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a, b = _walk(sigma, a), _walk(sigma, b)
        if a == b:
            continue
        if a.sort != b.sort:
            return None
        if isinstance(a, Var):
            if _occurs(a, b, sigma):
                return None
            sigma[a] = b
        elif isinstance(b, Var):
            stack.append((b, a))
        elif isinstance(a, Func) and isinstance(b, Func) and a.name == b.name and len(a.args) == len(b.args):
            stack.extend(zip(a.args, b.args))
        else:
            return None
    return sigma


def _resolve(e: Expr, sigma) -> Expr:
    prev = None
    while prev != e:
        prev, e = e, substitute_many(e, sigma) if sigma else e
    return e


def _subterms(t: Term, pos: Position = ()) -> Iterator[tuple[Position, Term]]:
    yield pos, t
    if isinstance(t, Func):
        for i, a in enumerate(t.args):
            yield from _subterms(a, pos + (i,))


def _replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    args = list(t.args)
    args[pos[0]] = _replace_at(args[pos[0]], pos[1:], new)
    return Func(t.name, tuple(args), t.sort)


def _atom_subterms(a: Atom):
    for i, t in enumerate(a.args):
        for p, u in _subterms(t):
            yield (i,) + p, u


def _atom_replace(a: Atom, pos: Position, new: Term) -> Atom:
    args = list(a.args)
    args[pos[0]] = _replace_at(args[pos[0]], pos[1:], new)
    return Atom(a.pred, tuple(args))


def critical_pairs(R: RewriteSystem, depth: int = DEFAULTS.depth) -> list[CriticalPair]:
    key = ("cps", depth)
    if key in R._cache:
        return R._cache[key]
    out = []
    terms, props = R.term_rules, R.prop_rules
    # term rule (inner, renamed apart) overlapping a non-variable subterm of another rule's lhs
    for outer in (*terms, *props):
        if outer.kind == "term":
            sites = list(_subterms(outer.lhs))
        else:
            sites = list(_atom_subterms(outer.lhs))
        for pos, sub in sites:
            if isinstance(sub, Var):
                continue
            for inner in terms:
                if inner is outer and not pos:
                    continue
                inn = _rename_apart(inner, "'")
                sigma = unify(sub, inn.lhs)
                if sigma is None:
                    continue
                peak = _resolve(outer.lhs, sigma)
                left = _resolve(outer.rhs, sigma)
                if outer.kind == "term":
                    right = _resolve(_replace_at(outer.lhs, pos, inn.rhs), sigma)
                else:
                    right = _resolve(_atom_replace(outer.lhs, pos, inn.rhs), sigma)
                out.append((outer.name, inner.name, pos, peak, left, right))
    # proposition rule / proposition rule at the root (atomic left-hand sides)
    for i, r1 in enumerate(props):
        for r2 in props[i + 1:]:
            if r1.lhs.pred != r2.lhs.pred or len(r1.lhs.args) != len(r2.lhs.args):
                continue
            r2r = _rename_apart(r2, "'")
            sigma: dict | None = {}
            for s, t in zip(r1.lhs.args, r2r.lhs.args):
                sigma = unify(s, t, sigma)
                if sigma is None:
                    break
            if sigma is None:
                continue
            out.append((r1.name, r2.name, (), _resolve(r1.lhs, sigma), _resolve(r1.rhs, sigma), _resolve(r2r.rhs, sigma)))
    pairs = [
        CriticalPair((o, i), pos, peak, left, right, join(left, right, R, depth) is not None)
        for o, i, pos, peak, left, right in out
    ]
    R._cache[key] = pairs
    return pairs


def locally_confluent(R: RewriteSystem, depth: int = DEFAULTS.depth) -> bool:
    return all(cp.joinable for cp in critical_pairs(R, depth))

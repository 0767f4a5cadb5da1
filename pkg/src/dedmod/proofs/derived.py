"""Deduction rules derived from proposition rewrite rules.

``P --> A`` yields a fold/unfold pair, and (when ``A`` is built from atoms
with =>, /\\, forall and true) supernatural introduction and elimination
rules that absorb the connectives of ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..rewriting import RewriteRule
from ..syntax import And, Atom, Forall, Imp, Prop, Top, Var, fresh_name, free_vars, open_


class UnsupportedRule(ValueError):
    pass


@dataclass(frozen=True)
class SchemaSequent:
    """``G, hyps |- goal``, where ``G`` stands for the ambient context."""

    hyps: tuple[Prop, ...]
    goal: Prop
    eigen: tuple[Var, ...] = ()


@dataclass(frozen=True)
class DerivedRule:
    name: str
    source: str
    premises: tuple[SchemaSequent, ...]
    conclusion: SchemaSequent
    params: tuple[Var, ...] = ()  # instantiation terms of an elimination


def derive_fold_unfold(rule: RewriteRule) -> tuple[DerivedRule, DerivedRule]:
    if rule.kind != "prop":
        raise ValueError(f"rule {rule.name} is a term rule; fold/unfold needs a proposition rule")
    fold = DerivedRule("fold", rule.name, (SchemaSequent((), rule.rhs),), SchemaSequent((), rule.lhs))
    unfold = DerivedRule("unfold", rule.name, (SchemaSequent((), rule.lhs),), SchemaSequent((), rule.rhs))
    return fold, unfold


def _fresh(hint: str, sort: str, used: set[str]) -> Var:
    name = fresh_name(hint, used)
    used.add(name)
    return Var(name, sort)


def _intro_premises(a: Prop, hyps, eigen, used, rule) -> list[SchemaSequent]:
    match a:
        case Atom():
            return [SchemaSequent(tuple(hyps), a, tuple(eigen))]
        case Top():
            return []
        case Imp(l, r):
            return _intro_premises(r, hyps + [l], eigen, used, rule)
        case And(l, r):
            return _intro_premises(l, hyps, eigen, used, rule) + _intro_premises(r, hyps, eigen, used, rule)
        case Forall(s, body, hint):
            y = _fresh(hint, s, used)
            return _intro_premises(open_(body, y), hyps, eigen + [y], used, rule)
    raise UnsupportedRule(
        f"rule {rule.name}: supernatural rules need a right-hand side built with =>, /\\, forall; found {type(a).__name__}"
    )


def _elim_paths(a: Prop, minors, params, used) -> list[tuple[list[Prop], list[Var], Prop]]:
    match a:
        case Atom():
            return [(minors, params, a)]
        case Top():
            return []
        case Imp(l, r):
            return _elim_paths(r, minors + [l], params, used)
        case And(l, r):
            return _elim_paths(l, minors, params, used) + _elim_paths(r, minors, params, used)
        case Forall(s, body, hint):
            t = _fresh(hint, s, used)
            return _elim_paths(open_(body, t), minors, params + [t], used)
    raise AssertionError("checked by _intro_premises")


def derive_supernatural(rule: RewriteRule) -> tuple[DerivedRule, list[DerivedRule]]:
    if rule.kind != "prop":
        raise ValueError(f"rule {rule.name} is a term rule")
    used = {v.name for v in free_vars(rule.lhs)}
    premises = _intro_premises(rule.rhs, [], [], set(used), rule)
    intro = DerivedRule(f"{rule.name}-intro", rule.name, tuple(premises), SchemaSequent((), rule.lhs))
    paths = _elim_paths(rule.rhs, [], [], set(used))
    elims = []
    for k, (minors, params, leaf) in enumerate(paths):
        name = f"{rule.name}-elim" if len(paths) == 1 else f"{rule.name}-elim{k + 1}"
        prem = (SchemaSequent((), rule.lhs),) + tuple(SchemaSequent((), m) for m in minors)
        elims.append(DerivedRule(name, rule.name, prem, SchemaSequent((), leaf), tuple(params)))
    return intro, elims


def supernatural_supported(rule: RewriteRule) -> bool:
    try:
        derive_supernatural(rule)
    except UnsupportedRule:
        return False
    return True

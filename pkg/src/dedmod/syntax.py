"""Object language: sorts, signatures, terms, propositions, contexts, sequents.

Propositions are locally nameless: variables bound by a quantifier are
de Bruijn indices (:class:`BVar`), free variables are named (:class:`Var`).
Binder names survive only as display hints and take no part in equality, so
``==`` on propositions *is* alpha-equivalence and substitution never captures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union


class SortError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class FunDecl:
    name: str
    args: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class PredDecl:
    name: str
    args: tuple[str, ...] = ()


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...] = ()
    functions: tuple[FunDecl, ...] = ()
    predicates: tuple[PredDecl, ...] = ()

    def __post_init__(self):
        for kind, names in (
            ("sort", self.sorts),
            ("function", [f.name for f in self.functions]),
            ("predicate", [p.name for p in self.predicates]),
        ):
            dup = {n for n in names if names.count(n) > 1}
            if dup:
                raise SortError(f"duplicate {kind} name(s): {sorted(dup)}")
        declared = set(self.sorts)
        for f in self.functions:
            for s in (*f.args, f.result):
                if s not in declared:
                    raise SortError(f"function {f.name} uses undeclared sort {s}")
        for p in self.predicates:
            for s in p.args:
                if s not in declared:
                    raise SortError(f"predicate {p.name} uses undeclared sort {s}")

    @cached_property
    def fun(self) -> dict[str, FunDecl]:
        return {f.name: f for f in self.functions}

    @cached_property
    def pred(self) -> dict[str, PredDecl]:
        return {p.name: p for p in self.predicates}

    def constants(self, sort: str) -> list[Func]:
        return [Func(f.name, (), f.result) for f in self.functions if not f.args and f.result == sort]

    def app(self, name: str, *args: Term) -> Func:
        """Build a well-sorted function application."""
        decl = self.fun[name]
        if len(args) != len(decl.args):
            raise SortError(f"{name} expects {len(decl.args)} arguments, got {len(args)}")
        for a, s in zip(args, decl.args):
            if sort_of(a) != s:
                raise SortError(f"argument {a} of {name} has sort {sort_of(a)}, expected {s}")
        return Func(name, tuple(args), decl.result)

    def atom(self, name: str, *args: Term) -> Atom:
        decl = self.pred[name]
        if len(args) != len(decl.args):
            raise SortError(f"{name} expects {len(decl.args)} arguments, got {len(args)}")
        for a, s in zip(args, decl.args):
            if sort_of(a) != s:
                raise SortError(f"argument {a} of {name} has sort {sort_of(a)}, expected {s}")
        return Atom(name, tuple(args))

    def merge(self, other: Signature) -> Signature:
        return Signature(
            self.sorts + tuple(s for s in other.sorts if s not in self.sorts),
            self.functions + tuple(f for f in other.functions if f.name not in self.fun),
            self.predicates + tuple(p for p in other.predicates if p.name not in self.pred),
        )


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class BVar:
    index: int
    sort: str

    def __str__(self):
        return f"#{self.index}"


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple[Term, ...]
    sort: str

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(str, self.args))})"


Term = Union[Var, BVar, Func]


def sort_of(t: Term) -> str:
    return t.sort


# ---------------------------------------------------------------------------
# Propositions


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class And:
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Or:
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Imp:
    left: Prop
    right: Prop


@dataclass(frozen=True)
class Forall:
    sort: str
    body: Prop
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Exists:
    sort: str
    body: Prop
    hint: str = field(default="x", compare=False)


Prop = Union[Atom, Top, Bot, And, Or, Imp, Forall, Exists]
Binary = (And, Or, Imp)
Quant = (Forall, Exists)
TOP = Top()
BOT = Bot()

Expr = Union[Term, Prop]


def forall(x: Var, body: Prop) -> Forall:
    """Bind the free variable ``x`` in ``body``."""
    return Forall(x.sort, close(body, x), x.name)


def exists(x: Var, body: Prop) -> Exists:
    return Exists(x.sort, close(body, x), x.name)


# ---------------------------------------------------------------------------
# Traversal primitives


def _map_term(t: Term, fn, depth: int) -> Term:
    r = fn(t, depth)
    if r is not None:
        return r
    if isinstance(t, Func) and t.args:
        return Func(t.name, tuple(_map_term(a, fn, depth) for a in t.args), t.sort)
    return t


def _map_prop(a: Prop, fn, depth: int = 0) -> Prop:
    """Apply ``fn(term, depth)`` to every term leaf; ``depth`` counts binders crossed."""
    match a:
        case Atom(p, args):
            if not args:
                return a
            return Atom(p, tuple(_map_term(t, fn, depth) for t in args))
        case And(l, r) | Or(l, r) | Imp(l, r):
            return type(a)(_map_prop(l, fn, depth), _map_prop(r, fn, depth))
        case Forall(s, body, hint) | Exists(s, body, hint):
            return type(a)(s, _map_prop(body, fn, depth + 1), hint)
    return a


def _map(e: Expr, fn) -> Expr:
    if isinstance(e, (Var, BVar, Func)):
        return _map_term(e, fn, 0)
    return _map_prop(e, fn)


def open_(body: Prop, t: Term) -> Prop:
    """Instantiate the outermost bound variable of a quantifier body with ``t``."""

    def fn(u, depth):
        if isinstance(u, BVar):
            if u.index == depth:
                return t
            if u.index > depth:
                return BVar(u.index - 1, u.sort)
            return u
        return None

    return _map_prop(body, fn)


def close(body: Prop, x: Var) -> Prop:
    """Abstract the free variable ``x``, producing a quantifier body."""

    def fn(u, depth):
        if isinstance(u, BVar) and u.index >= depth:
            return BVar(u.index + 1, u.sort)
        if u == x:
            return BVar(depth, x.sort)
        return None

    return _map_prop(body, fn)


def substitute(e: Expr, x: Var, u: Term) -> Expr:
    """Replace the free occurrences of ``x`` in ``e`` by ``u``."""
    if sort_of(u) != x.sort:
        raise SortError(f"cannot substitute {u} : {sort_of(u)} for {x.name} : {x.sort}")
    return _map(e, lambda t, d: u if t == x else None)


def substitute_many(e: Expr, sigma: dict[Var, Term]) -> Expr:
    """Simultaneous substitution."""
    if not sigma:
        return e
    for x, u in sigma.items():
        if sort_of(u) != x.sort:
            raise SortError(f"cannot substitute {u} : {sort_of(u)} for {x.name} : {x.sort}")
    return _map(e, lambda t, d: sigma.get(t) if isinstance(t, Var) else None)


def rename_var(e: Expr, old: str, new: str) -> Expr:
    return _map(e, lambda t, d: Var(new, t.sort) if isinstance(t, Var) and t.name == old else None)


def alpha_eq(a: Expr, b: Expr) -> bool:
    return a == b


def iter_terms(e: Expr) -> Iterator[Term]:
    """All term nodes of ``e`` in pre-order."""
    match e:
        case Var() | BVar():
            yield e
        case Func(_, args, _):
            yield e
            for t in args:
                yield from iter_terms(t)
        case Atom(_, args):
            for t in args:
                yield from iter_terms(t)
        case And(l, r) | Or(l, r) | Imp(l, r):
            yield from iter_terms(l)
            yield from iter_terms(r)
        case Forall(_, body) | Exists(_, body):
            yield from iter_terms(body)


def free_vars(e: Expr) -> set[Var]:
    return {t for t in iter_terms(e) if isinstance(t, Var)}


def free_var_names(*es: Expr) -> set[str]:
    return {v.name for e in es for v in free_vars(e)}


def is_locally_closed(e: Expr) -> bool:
    def check(x, depth):
        match x:
            case BVar(i, _):
                return i < depth
            case Var():
                return True
            case Func(_, args, _):
                return all(check(t, depth) for t in args)
            case Atom(_, args):
                return all(check(t, depth) for t in args)
            case And(l, r) | Or(l, r) | Imp(l, r):
                return check(l, depth) and check(r, depth)
            case Forall(_, body) | Exists(_, body):
                return check(body, depth + 1)
        return True

    return check(e, 0)


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    if base not in avoid:
        return base
    for k in itertools.count(1):
        cand = base + "'" * k
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def subformulas(a: Prop) -> Iterator[Prop]:
    """Immediate and transitive subformulas; quantifier bodies are skipped
    because they are not locally closed (callers instantiate them)."""
    yield a
    match a:
        case And(l, r) | Or(l, r) | Imp(l, r):
            yield from subformulas(l)
            yield from subformulas(r)


def size(e: Expr) -> int:
    match e:
        case Func(_, args, _) | Atom(_, args):
            return 1 + sum(size(t) for t in args)
        case And(l, r) | Or(l, r) | Imp(l, r):
            return 1 + size(l) + size(r)
        case Forall(_, body) | Exists(_, body):
            return 1 + size(body)
    return 1


# ---------------------------------------------------------------------------
# Well-sortedness


def check_term(t: Term, sig: Signature) -> None:
    match t:
        case Func(name, args, s):
            decl = sig.fun.get(name)
            if decl is None:
                raise SortError(f"undeclared function {name}")
            if len(args) != len(decl.args) or s != decl.result:
                raise SortError(f"ill-formed application of {name}")
            for a, want in zip(args, decl.args):
                if a.sort != want:
                    raise SortError(f"argument {a} of {name} has sort {a.sort}, expected {want}")
                check_term(a, sig)
        case Var(_, s) | BVar(_, s):
            if s not in sig.sorts:
                raise SortError(f"undeclared sort {s}")


def check_prop(a: Prop, sig: Signature) -> None:
    def go(a, binders):
        match a:
            case Atom(p, args):
                decl = sig.pred.get(p)
                if decl is None:
                    raise SortError(f"undeclared predicate {p}")
                if len(args) != len(decl.args):
                    raise SortError(f"{p} expects {len(decl.args)} arguments, got {len(args)}")
                for t, want in zip(args, decl.args):
                    if t.sort != want:
                        raise SortError(f"argument {t} of {p} has sort {t.sort}, expected {want}")
                    check_term(t, sig)
                    for u in iter_terms(t):
                        if isinstance(u, BVar):
                            if u.index >= len(binders) or binders[-1 - u.index] != u.sort:
                                raise SortError(f"bound variable {u} misused")
            case And(l, r) | Or(l, r) | Imp(l, r):
                go(l, binders)
                go(r, binders)
            case Forall(s, body) | Exists(s, body):
                if s not in sig.sorts:
                    raise SortError(f"undeclared sort {s}")
                go(body, binders + [s])

    go(a, [])


# ---------------------------------------------------------------------------
# Contexts and sequents


@dataclass(frozen=True)
class Context:
    entries: tuple[tuple[str, Prop], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.entries]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate hypothesis names in context: {names}")

    @classmethod
    def of(cls, *pairs: tuple[str, Prop]) -> Context:
        return cls(tuple(pairs))

    def lookup(self, name: str) -> Prop | None:
        for n, a in self.entries:
            if n == name:
                return a
        return None

    def extend(self, name: str, a: Prop) -> Context:
        """Add ``name : a``; an older hypothesis of the same name is shadowed."""
        return Context(tuple((n, b) for n, b in self.entries if n != name) + ((name, a),))

    def names(self) -> set[str]:
        return {n for n, _ in self.entries}

    def props(self) -> tuple[Prop, ...]:
        return tuple(a for _, a in self.entries)

    def free_vars(self) -> set[Var]:
        out: set[Var] = set()
        for _, a in self.entries:
            out |= free_vars(a)
        return out

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class Sequent:
    context: Context
    goal: Prop

    def free_vars(self) -> set[Var]:
        return self.context.free_vars() | free_vars(self.goal)


def _show(self) -> str:
    from .frontend.printer import show_prop

    return show_prop(self)


for _cls in (Atom, Top, Bot, And, Or, Imp, Forall, Exists):
    _cls.__str__ = _show

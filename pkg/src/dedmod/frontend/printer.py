"""Canonical ASCII printing.  ``parse(print(v)) == v`` for every syntax value."""

from __future__ import annotations

from ..syntax import (
    And,
    Atom,
    Bot,
    Context,
    Exists,
    Forall,
    Func,
    Imp,
    Or,
    Sequent,
    Top,
    Var,
    BVar,
    fresh_name,
    free_var_names,
    open_,
)


def show_term(t) -> str:
    match t:
        case Var(name, _):
            return name
        case BVar(i, _):
            return f"#{i}"
        case Func(name, args, _):
            if not args:
                return name
            return f"{name}({', '.join(show_term(a) for a in args)})"
    raise TypeError(t)


def _binder(a, prec: int) -> str:
    kw = "forall" if isinstance(a, Forall) else "exists"
    name = fresh_name(a.hint, free_var_names(a.body) | {"_"})
    body = open_(a.body, Var(name, a.sort))
    s = f"{kw} {name} : {a.sort}. {show_prop(body, 0)}"
    return f"({s})" if prec > 0 else s


def show_prop(a, prec: int = 0) -> str:
    match a:
        case Atom(p, args):
            return p if not args else f"{p}({', '.join(show_term(t) for t in args)})"
        case Top():
            return "true"
        case Bot():
            return "false"
        case Imp(l, r):
            s = f"{show_prop(l, 2)} => {show_prop(r, 1)}"
            return f"({s})" if prec > 1 else s
        case Or(l, r):
            s = f"{show_prop(l, 3)} \\/ {show_prop(r, 2)}"
            return f"({s})" if prec > 2 else s
        case And(l, r):
            s = f"{show_prop(l, 4)} /\\ {show_prop(r, 3)}"
            return f"({s})" if prec > 3 else s
        case Forall() | Exists():
            return _binder(a, prec)
    raise TypeError(a)


def show_context(ctx: Context) -> str:
    return ", ".join(f"{n} : {show_prop(a)}" for n, a in ctx)


def show_sequent(seq: Sequent) -> str:
    left = show_context(seq.context)
    return f"{left} |- {show_prop(seq.goal)}" if left else f"|- {show_prop(seq.goal)}"


# ---------------------------------------------------------------------------
# Proof terms.  Levels: 0 binders, 1 application, 2 prefix, 3 postfix/atoms.


def _wrap(s: str, level: int, want: int) -> str:
    return f"({s})" if level < want else s


def show_proof(p, want: int = 0) -> str:
    from ..proofs import terms as T

    match p:
        case T.Hyp(name):
            return name
        case T.Unit():
            return "tt"
        case T.Pair(l, r):
            return f"<{show_proof(l)}, {show_proof(r)}>"
        case T.Lam(x, a, body):
            return _wrap(f"fun {x} : {show_prop(a)} . {show_proof(body)}", 0, want)
        case T.Gen(v, body):
            return _wrap(f"gen {v.name} : {v.sort} . {show_proof(body)}", 0, want)
        case T.Case(s, x, l, y, r):
            s_ = f"case {show_proof(s, 1)} of {x}. {show_proof(l, 1)} | {y}. {show_proof(r)}"
            return _wrap(s_, 0, want)
        case T.Unpack(q, v, h, body):
            s_ = f"unpack {show_proof(q, 1)} as {v.name} : {v.sort}, {h} in {show_proof(body)}"
            return _wrap(s_, 0, want)
        case T.Pack(t, body):
            return _wrap(f"pack {show_term(t)}, {show_proof(body)}", 0, want)
        case T.Absurd(q, a):
            return _wrap(f"absurd {show_proof(q, 1)} : {show_prop(a)}", 0, want)
        case T.App(f, a):
            return _wrap(f"{show_proof(f, 1)} {show_proof(a, 2)}", 1, want)
        case T.Fst(q) | T.Snd(q) | T.Inl(q) | T.Inr(q):
            kw = type(p).__name__.lower()
            return _wrap(f"{kw} {show_proof(q, 2)}", 2, want)
        case T.Fold(r, q):
            return _wrap(f"fold {r} {show_proof(q, 2)}", 2, want)
        case T.Unfold(r, q):
            return _wrap(f"unfold {r} {show_proof(q, 2)}", 2, want)
        case T.Inst(q, t):
            return f"{show_proof(q, 3)} [{show_term(t)}]"
        case T.Ann(q, a):
            return f"({show_proof(q)} : {show_prop(a)})"
        case T.SuperIntro(r, branches):
            parts = []
            for b in branches:
                eig = ", ".join(f"{v.name} : {v.sort}" for v in b.eigen)
                hyps = ", ".join(b.hyps)
                head = f"{eig} ; {hyps}".strip()
                parts.append(f"{{{head} . {show_proof(b.body)}}}")
            return " ".join([f"sintro {r}"] + parts)
        case T.SuperElim(r, k, ts, args):
            terms = ", ".join(show_term(t) for t in ts)
            return f"selim {r} {k + 1} [{terms}] ({', '.join(show_proof(a) for a in args)})"
    raise TypeError(p)


# ---------------------------------------------------------------------------
# Files and derived rules


def show_theory(theory, options=()) -> str:
    sig = theory.signature
    lines = [f"sort {s}" for s in sig.sorts]
    for f in sig.functions:
        lines.append(f"fun {f.name} : {', '.join(f.args)} -> {f.result}" if f.args else f"fun {f.name} : {f.result}")
    props = [p.name for p in sig.predicates if not p.args]
    for p in sig.predicates:
        if p.args:
            lines.append(f"pred {p.name} : {', '.join(p.args)}")
    if props:
        lines.append("prop " + " ".join(props))
    for r in theory.rules:
        show = show_prop if r.kind == "prop" else show_term
        lines.append(f"rule {r.name} : {show(r.lhs)} --> {show(r.rhs)}")
    for k, v in options:
        lines.append(f"option {k} {v}")
    return "\n".join(lines) + "\n"


def show_proof_file(pf) -> str:
    lines = [f"system {pf.system.value}"]
    for name, p in pf.defs:
        lines.append(f"def {name} := {show_proof(p)}")
    for e in pf.proofs:
        lines.append(f"proof {e.name} : {show_sequent(e.sequent)} := {show_proof(e.proof)}")
    return "\n".join(lines) + "\n"


def _schema(seq) -> str:
    left = ", ".join(["G"] + [show_prop(h) for h in seq.hyps])
    return f"{left} |- {show_prop(seq.goal)}"


def show_derived_rule(rule) -> str:
    """An inference-rule block: premises, a bar with the rule name, conclusion."""
    prem = "   ".join(_schema(p) for p in rule.premises)
    concl = _schema(rule.conclusion)
    fresh = sorted({v.name for p in rule.premises for v in p.eigen})
    label = rule.name
    if fresh:
        label += f" ({', '.join(fresh)} fresh)"
    if rule.params:
        label += f" [{', '.join(v.name for v in rule.params)}]"
    bar = "-" * max(len(prem), len(concl), 1)
    return "\n".join([prem, f"{bar} {label}", concl]) if prem else "\n".join([f"{bar} {label}", concl])


def show_lattice(spec) -> str:
    lines = [f"name {spec.name}", "elements " + " ".join(spec.elements)]
    lines += [f"order {a} <= {b}" for a, b in spec.order]
    if spec.top is not None:
        lines.append(f"top {spec.top}")
    if spec.bottom is not None:
        lines.append(f"bottom {spec.bottom}")
    if spec.positive is not None:
        lines.append("positive " + " ".join(spec.positive))
    return "\n".join(lines) + "\n"

"""Parsers for theory (.dmt), proof (.prf) and lattice (.lat) files.

Theory files::

    sort nat
    fun z : nat
    fun f : nat -> nat
    pred P : nat
    prop Q R
    rule r : P(f(x)) --> P(x) => R
    option fuel 500

Proof files name a rule system once, then list definitions and proofs::

    system modulo
    def omega := fun x : P . x x
    proof loop : |- R := omega omega

Definitions are expanded where their name occurs free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..proofs.check import System
from ..proofs.terms import (
    Absurd,
    Ann,
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
from ..rewriting import RewriteRule, RewriteSystem, RuleError
from ..syntax import (
    BOT,
    TOP,
    And,
    Atom,
    Context,
    Exists,
    Forall,
    FunDecl,
    Func,
    Imp,
    Or,
    PredDecl,
    Prop,
    Sequent,
    Signature,
    SortError,
    Term,
    Var,
    close,
)
from ..tva import LatticeSpec


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        super().__init__(f"{line}:{col}: {message}" if line else message)


_TOKEN = re.compile(
    r"""(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>\#[^\n]*)
    |(?P<sym>-->|->|=>|/\\|\\/|\|-|:=|<=|[()<>\[\]{},:;.|])
    |(?P<num>\d+(?:/\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_']*)""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class Tok:
    kind: str  # "sym", "ident", "num", "eof"
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Tok]:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Tok(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Tok("eof", "", line, pos - start + 1))
    return out


class _Stream:
    def __init__(self, toks: list[Tok]):
        self.toks, self.i = toks, 0

    @property
    def peek(self) -> Tok:
        return self.toks[self.i]

    def next(self) -> Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, *texts: str) -> bool:
        t = self.peek
        return t.kind in ("sym", "ident") and t.text in texts

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.next()

    def ident(self, what: str = "identifier") -> str:
        t = self.peek
        if t.kind != "ident":
            self.fail(f"expected {what}")
        self.i += 1
        return t.text

    def fail(self, msg: str, tok: Tok | None = None):
        t = tok or self.peek
        found = t.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", t.line, t.col)


PROP_KEYWORDS = {"forall", "exists", "true", "false"}
PROOF_KEYWORDS = {"fun", "fst", "snd", "inl", "inr", "case", "of", "gen", "pack", "unpack", "as", "in",
                  "tt", "absurd", "fold", "unfold", "sintro", "selim", "def", "proof", "system"}


# ---------------------------------------------------------------------------
# Terms and propositions


@dataclass
class _Scope:
    """Term variables in scope; with ``free`` set, unknown names become
    variables whose sort is read off their position."""

    sig: Signature
    vars: dict[str, str] = field(default_factory=dict)
    free: dict[str, str] | None = None

    def bind(self, name: str, sort: str) -> _Scope:
        return _Scope(self.sig, {**self.vars, name: sort}, self.free)


def _term(s: _Stream, sc: _Scope, sort: str | None) -> Term:
    tok = s.peek
    name = s.ident("term")
    if name in sc.vars:
        v = Var(name, sc.vars[name])
        if sort is not None and v.sort != sort:
            s.fail(f"variable {name} has sort {v.sort}, expected {sort}", tok)
        return v
    decl = sc.sig.fun.get(name)
    if decl is not None:
        args = []
        if decl.args:
            s.expect("(")
            for i, a in enumerate(decl.args):
                if i:
                    s.expect(",")
                args.append(_term(s, sc, a))
            s.expect(")")
        if sort is not None and decl.result != sort:
            s.fail(f"{name} has sort {decl.result}, expected {sort}", tok)
        return Func(name, tuple(args), decl.result)
    if sc.free is not None:
        if sort is None:
            s.fail(f"cannot infer the sort of variable {name}", tok)
        if sc.free.setdefault(name, sort) != sort:
            s.fail(f"variable {name} used at sorts {sc.free[name]} and {sort}", tok)
        return Var(name, sort)
    s.fail(f"unknown term {name}", tok)


def _prop(s: _Stream, sc: _Scope) -> Prop:
    if s.at("forall", "exists"):
        kw = s.next().text
        x = s.ident("bound variable")
        s.expect(":")
        sort = s.ident("sort")
        if sort not in sc.sig.sorts:
            s.fail(f"unknown sort {sort}")
        s.expect(".")
        body = _prop(s, sc.bind(x, sort))
        v = Var(x, sort)
        return Forall(sort, close(body, v), x) if kw == "forall" else Exists(sort, close(body, v), x)
    left = _disj(s, sc)
    if s.accept("=>"):
        return Imp(left, _prop(s, sc))
    return left


def _disj(s: _Stream, sc: _Scope) -> Prop:
    left = _conj(s, sc)
    if s.accept("\\/"):
        return Or(left, _disj_or_binder(s, sc))
    return left


def _disj_or_binder(s, sc):
    return _prop_tail(s, sc, _disj)


def _conj(s: _Stream, sc: _Scope) -> Prop:
    left = _atomic(s, sc)
    if s.accept("/\\"):
        return And(left, _prop_tail(s, sc, _conj))
    return left


def _prop_tail(s, sc, level):
    # a binder may close an operator chain without parentheses
    if s.at("forall", "exists"):
        return _prop(s, sc)
    return level(s, sc)


def _atomic(s: _Stream, sc: _Scope) -> Prop:
    if s.accept("("):
        a = _prop(s, sc)
        s.expect(")")
        return a
    if s.accept("true"):
        return TOP
    if s.accept("false"):
        return BOT
    if s.at("forall", "exists"):
        return _prop(s, sc)
    tok = s.peek
    name = s.ident("proposition")
    decl = sc.sig.pred.get(name)
    if decl is None:
        s.fail(f"unknown predicate {name}", tok)
    args = []
    if decl.args:
        s.expect("(")
        for i, a in enumerate(decl.args):
            if i:
                s.expect(",")
            args.append(_term(s, sc, a))
        s.expect(")")
    return Atom(name, tuple(args))


def parse_prop(text: str, sig: Signature, free: dict[str, str] | None = None) -> Prop:
    """Parse a proposition; free variables get their sorts from position."""
    s = _Stream(tokenize(text))
    a = _prop(s, _Scope(sig, {}, {} if free is None else free))
    if s.peek.kind != "eof":
        s.fail("trailing input")
    return a


def _sequent(s: _Stream, sc: _Scope) -> Sequent:
    entries = []
    if not s.at("|-"):
        while True:
            h = s.ident("hypothesis name")
            s.expect(":")
            entries.append((h, _prop(s, sc)))
            if not s.accept(","):
                break
    s.expect("|-")
    try:
        ctx = Context(tuple(entries))
    except ValueError as e:
        s.fail(str(e))
    return Sequent(ctx, _prop(s, sc))


def parse_sequent(text: str, sig: Signature) -> Sequent:
    s = _Stream(tokenize(text))
    seq = _sequent(s, _Scope(sig, {}, {}))
    if s.peek.kind != "eof":
        s.fail("trailing input")
    return seq


# ---------------------------------------------------------------------------
# Theories


@dataclass(frozen=True)
class TheoryFile:
    system: RewriteSystem
    options: tuple[tuple[str, int], ...] = ()


def parse_theory_file(text: str) -> TheoryFile:
    s = _Stream(tokenize(text))
    sorts: list[str] = []
    funs: list[FunDecl] = []
    preds: list[PredDecl] = []
    pending: list[tuple[Tok, str, list[Tok]]] = []
    options: list[tuple[str, int]] = []
    while s.peek.kind != "eof":
        tok = s.peek
        kw = s.ident("declaration")
        if kw == "sort":
            sorts.append(s.ident("sort name"))
        elif kw == "fun":
            name = s.ident("function name")
            s.expect(":")
            sig_sorts = [s.ident("sort")]
            while s.accept(","):
                sig_sorts.append(s.ident("sort"))
            if s.accept("->"):
                funs.append(FunDecl(name, tuple(sig_sorts), s.ident("sort")))
            elif len(sig_sorts) == 1:
                funs.append(FunDecl(name, (), sig_sorts[0]))
            else:
                s.fail("expected '->'")
        elif kw == "pred":
            name = s.ident("predicate name")
            args = []
            if s.accept(":"):
                args.append(s.ident("sort"))
                while s.accept(","):
                    args.append(s.ident("sort"))
            preds.append(PredDecl(name, tuple(args)))
        elif kw == "prop":
            preds.append(PredDecl(s.ident("proposition name")))
            while s.peek.kind == "ident" and s.peek.text not in ("sort", "fun", "pred", "prop", "rule", "option"):
                preds.append(PredDecl(s.next().text))
        elif kw == "rule":
            name = s.ident("rule name")
            s.expect(":")
            body = []
            while not (s.peek.kind == "eof" or (s.peek.kind == "ident" and s.peek.text in
                                                  ("sort", "fun", "pred", "prop", "rule", "option"))):
                body.append(s.next())
            pending.append((tok, name, body))
        elif kw == "option":
            key = s.ident("option name")
            t = s.next()
            if t.kind != "num" or "/" in t.text:
                s.fail("expected a number", t)
            options.append((key, int(t.text)))
        else:
            s.fail("expected sort, fun, pred, prop, rule or option", tok)
    try:
        sig = Signature(tuple(sorts), tuple(funs), tuple(preds))
    except (SortError, ValueError) as e:
        raise ParseError(str(e), 1, 1) from None
    rules = []
    for tok, name, body in pending:
        rs = _Stream(body + [Tok("eof", "", body[-1].line if body else tok.line, 0)])
        sc = _Scope(sig, {}, {})
        lhs = _rule_side(rs, sc)
        rs.expect("-->")
        rhs = _rule_side(rs, sc)
        if rs.peek.kind != "eof":
            rs.fail("trailing input in rule")
        try:
            rules.append(RewriteRule(name, lhs, rhs))
        except RuleError as e:
            raise ParseError(str(e), tok.line, tok.col) from None
    try:
        system = RewriteSystem(tuple(rules), sig)
    except (RuleError, SortError, ValueError) as e:
        raise ParseError(str(e), 1, 1) from None
    return TheoryFile(system, tuple(options))


def _rule_side(s: _Stream, sc: _Scope):
    """A rule side is a term when it starts with a function symbol or variable."""
    t = s.peek
    if t.kind == "ident" and t.text not in sc.sig.pred and t.text not in PROP_KEYWORDS:
        decl = sc.sig.fun.get(t.text)
        sort = decl.result if decl else sc.free.get(t.text)
        if sort is None:
            s.fail("cannot infer the sort of a variable rule side")
        return _term(s, sc, sort)
    return _prop(s, sc)


def parse_theory(text: str) -> RewriteSystem:
    return parse_theory_file(text).system


# ---------------------------------------------------------------------------
# Proofs


@dataclass(frozen=True)
class ProofEntry:
    name: str
    sequent: Sequent
    proof: Proof


@dataclass(frozen=True)
class ProofFile:
    system: System
    defs: tuple[tuple[str, Proof], ...]
    proofs: tuple[ProofEntry, ...]

    def get(self, name: str) -> ProofEntry:
        for e in self.proofs:
            if e.name == name:
                return e
        raise KeyError(name)


class _ProofParser:
    def __init__(self, s: _Stream, sig: Signature, defs: dict[str, Proof]):
        self.s, self.sig, self.defs = s, sig, defs

    def starts_atom(self) -> bool:
        t = self.s.peek
        if t.kind == "ident":
            return t.text not in PROOF_KEYWORDS or t.text in ("tt", "fst", "snd", "inl", "inr", "fold", "unfold",
                                                              "sintro", "selim")
        return t.kind == "sym" and t.text in ("(", "<")

    def term(self, sc: _Scope, hyps: frozenset) -> Proof:
        s = self.s
        if s.accept("fun"):
            x = s.ident("hypothesis name")
            s.expect(":")
            a = _prop(s, sc)
            s.expect(".")
            return Lam(x, a, self.term(sc, hyps | {x}))
        if s.accept("gen"):
            x = s.ident("variable")
            s.expect(":")
            sort = self.sort()
            s.expect(".")
            return Gen(Var(x, sort), self.term(sc.bind(x, sort), hyps))
        if s.accept("case"):
            scrut = self.term(sc, hyps)
            s.expect("of")
            x = s.ident("hypothesis name")
            s.expect(".")
            left = self.app(sc, hyps | {x})
            s.expect("|")
            y = s.ident("hypothesis name")
            s.expect(".")
            return Case(scrut, x, left, y, self.term(sc, hyps | {y}))
        if s.accept("unpack"):
            arg = self.term(sc, hyps)
            s.expect("as")
            x = s.ident("variable")
            s.expect(":")
            sort = self.sort()
            s.expect(",")
            h = s.ident("hypothesis name")
            s.expect("in")
            return Unpack(arg, Var(x, sort), h, self.term(sc.bind(x, sort), hyps | {h}))
        if s.accept("pack"):
            t = _term(s, sc, None)
            s.expect(",")
            return Pack(t, self.term(sc, hyps))
        if s.accept("absurd"):
            arg = self.app(sc, hyps)
            s.expect(":")
            return Absurd(arg, _prop(s, sc))
        return self.app(sc, hyps)

    def sort(self) -> str:
        tok = self.s.peek
        sort = self.s.ident("sort")
        if sort not in self.sig.sorts:
            self.s.fail(f"unknown sort {sort}", tok)
        return sort

    def app(self, sc, hyps) -> Proof:
        if not self.starts_atom():
            self.s.fail("expected a proof term")
        f = self.unary(sc, hyps)
        while self.starts_atom():
            f = App(f, self.unary(sc, hyps))
        return f

    def unary(self, sc, hyps) -> Proof:
        s = self.s
        for kw, make in (("fst", Fst), ("snd", Snd), ("inl", Inl), ("inr", Inr)):
            if s.accept(kw):
                return make(self.unary(sc, hyps))
        if s.accept("fold"):
            return Fold(s.ident("rule name"), self.unary(sc, hyps))
        if s.accept("unfold"):
            return Unfold(s.ident("rule name"), self.unary(sc, hyps))
        p = self.atom(sc, hyps)
        while s.accept("["):
            p = Inst(p, _term(s, sc, None))
            s.expect("]")
        return p

    def atom(self, sc, hyps) -> Proof:
        s = self.s
        if s.accept("("):
            p = self.term(sc, hyps)
            if s.accept(":"):
                p = Ann(p, _prop(s, sc))
            s.expect(")")
            return p
        if s.accept("<"):
            left = self.term(sc, hyps)
            s.expect(",")
            right = self.term(sc, hyps)
            s.expect(">")
            return Pair(left, right)
        if s.accept("tt"):
            return Unit()
        if s.accept("sintro"):
            rule = s.ident("rule name")
            branches = []
            while s.accept("{"):
                eigen, names = [], []
                inner = sc
                while s.peek.kind == "ident":
                    x = s.ident()
                    s.expect(":")
                    sort = self.sort()
                    eigen.append(Var(x, sort))
                    inner = inner.bind(x, sort)
                    if not s.accept(","):
                        break
                s.expect(";")
                while s.peek.kind == "ident":
                    names.append(s.ident())
                    if not s.accept(","):
                        break
                s.expect(".")
                body = self.term(inner, hyps | set(names))
                s.expect("}")
                branches.append(Branch(tuple(eigen), tuple(names), body))
            return SuperIntro(rule, tuple(branches))
        if s.accept("selim"):
            rule = s.ident("rule name")
            t = s.next()
            if t.kind != "num" or "/" in t.text or int(t.text) < 1:
                s.fail("expected an elimination index (from 1)", t)
            s.expect("[")
            terms = []
            if not s.at("]"):
                terms.append(_term(s, sc, None))
                while s.accept(","):
                    terms.append(_term(s, sc, None))
            s.expect("]")
            s.expect("(")
            args = [self.term(sc, hyps)]
            while s.accept(","):
                args.append(self.term(sc, hyps))
            s.expect(")")
            return SuperElim(rule, int(t.text) - 1, tuple(terms), tuple(args))
        name = s.ident("hypothesis")
        if name in hyps or name not in self.defs:
            return Hyp(name)
        return self.defs[name]


def parse_proof_term(text: str, sig: Signature, sequent: Sequent | None = None,
                     defs: dict[str, Proof] | None = None) -> Proof:
    s = _Stream(tokenize(text))
    sc = _Scope(sig, {v.name: v.sort for v in (sequent.context.free_vars() if sequent else set())})
    hyps = frozenset(sequent.context.names()) if sequent else frozenset()
    p = _ProofParser(s, sig, defs or {}).term(sc, hyps)
    if s.peek.kind != "eof":
        s.fail("trailing input")
    return p


def parse_proofs(text: str, sig: Signature) -> ProofFile:
    s = _Stream(tokenize(text))
    system = System.MODULO
    defs: dict[str, Proof] = {}
    def_order: list[tuple[str, Proof]] = []
    proofs: list[ProofEntry] = []
    seen = set()
    while s.peek.kind != "eof":
        tok = s.peek
        if s.accept("system"):
            t = s.peek
            name = s.ident("system name")
            try:
                system = System(name)
            except ValueError:
                s.fail(f"unknown system {name}; use modulo, foldunfold or supernatural", t)
        elif s.accept("def"):
            name = s.ident("definition name")
            s.expect(":=")
            p = _ProofParser(s, sig, defs).term(_Scope(sig), frozenset())
            defs[name] = p
            def_order.append((name, p))
        elif s.accept("proof"):
            name = s.ident("proof name")
            if name in seen:
                s.fail(f"duplicate proof name {name}", tok)
            seen.add(name)
            s.expect(":")
            seq = _sequent(s, _Scope(sig, {}, {}))
            s.expect(":=")
            sc = _Scope(sig, {v.name: v.sort for v in _seq_vars(seq)})
            p = _ProofParser(s, sig, defs).term(sc, frozenset(seq.context.names()))
            proofs.append(ProofEntry(name, seq, p))
        else:
            s.fail("expected system, def or proof", tok)
    return ProofFile(system, tuple(def_order), tuple(proofs))


def _seq_vars(seq: Sequent) -> set[Var]:
    from ..syntax import free_vars

    return seq.context.free_vars() | free_vars(seq.goal)


# ---------------------------------------------------------------------------
# Lattices


def parse_lattice(text: str) -> LatticeSpec:
    s = _Stream(tokenize(text))
    elements: list[str] = []
    order: list[tuple[str, str]] = []
    top = bottom = None
    positive = None
    name = "lattice"

    def element() -> str:
        t = s.next()
        if t.kind not in ("ident", "num"):
            s.fail("expected an element", t)
        return t.text

    keys = ("elements", "order", "top", "bottom", "positive", "name")
    while s.peek.kind != "eof":
        tok = s.peek
        kw = s.ident("lattice declaration")
        if kw == "elements":
            while s.peek.kind in ("ident", "num") and s.peek.text not in keys:
                elements.append(element())
        elif kw == "order":
            a = element()
            s.expect("<=")
            order.append((a, element()))
        elif kw == "top":
            top = element()
        elif kw == "bottom":
            bottom = element()
        elif kw == "positive":
            positive = []
            while s.peek.kind in ("ident", "num") and s.peek.text not in keys:
                positive.append(element())
        elif kw == "name":
            name = s.ident("name")
        else:
            s.fail("expected elements, order, top, bottom, positive or name", tok)
    return LatticeSpec(tuple(elements), tuple(order), top, bottom,
                       tuple(positive) if positive is not None else None, name)

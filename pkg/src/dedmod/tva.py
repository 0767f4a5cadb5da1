"""Truth values algebras.

An algebra supplies the seven operations and a positivity predicate.  The
pre-order ``a <= b`` holds when ``a => b`` is positive; finite algebras are
checked law by law against it, and antisymmetry is reported on its own
because it is the one Heyting law a truth values algebra may lack.

The reducibility-candidates algebra is intensional: a candidate is an
expression tree and membership of a proof is decided (or not) by a bounded
oracle over reduction graphs and sampled arguments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, product
from typing import Hashable, Mapping, Protocol, Sequence, Union

from .config import DEFAULTS
from .proofs.terms import Ann, Fold, Gen, Hyp, Inl, Inr, Lam, Pack, Pair, Proof, subst_hyp, subst_term
from .reduction import NotSN, SNUnknown, strongly_normalizing
from .syntax import Term

Element = Hashable


class TruthValueAlgebra(Protocol):
    name: str

    @property
    def top(self) -> Element: ...

    @property
    def bottom(self) -> Element: ...

    def imp(self, a, b) -> Element: ...

    def meet(self, a, b) -> Element: ...

    def join(self, a, b) -> Element: ...

    def forall(self, family) -> Element: ...

    def exists(self, family) -> Element: ...

    def is_positive(self, a) -> bool: ...


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite algebra given by operation tables.

    ``elements`` keeps the declared order, which model search follows.
    """

    name: str
    elements: tuple
    top: Element
    bottom: Element
    imp_table: Mapping
    meet_table: Mapping
    join_table: Mapping
    positive: frozenset
    labels: Mapping = field(default_factory=dict, compare=False)

    def imp(self, a, b):
        return self.imp_table[a, b]

    def meet(self, a, b):
        return self.meet_table[a, b]

    def join(self, a, b):
        return self.join_table[a, b]

    def forall(self, family):
        return reduce(self.meet, family, self.top)

    def exists(self, family):
        return reduce(self.join, family, self.bottom)

    def is_positive(self, a) -> bool:
        return a in self.positive

    def show(self, a) -> str:
        return self.labels.get(a, str(a))

    def __len__(self):
        return len(self.elements)


def pre_order(b: TruthValueAlgebra, x, y) -> bool:
    return b.is_positive(b.imp(x, y))


# ---------------------------------------------------------------------------
# Lattices


@dataclass(frozen=True)
class LatticeSpec:
    elements: tuple[str, ...]
    order: tuple[tuple[str, str], ...]  # generating pairs a <= b
    top: str | None = None
    bottom: str | None = None
    positive: tuple[str, ...] | None = None
    name: str = "lattice"


def _closure(elements, pairs) -> set[tuple]:
    le = {(a, a) for a in elements} | set(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in product(list(le), repeat=2):
            if b == c and (a, d) not in le:
                le.add((a, d))
                changed = True
    return le


def from_lattice(spec: LatticeSpec) -> FiniteAlgebra:
    """Heyting operations of a finite bounded distributive lattice, by brute force."""
    els = tuple(spec.elements)
    if len(set(els)) != len(els) or not els:
        raise LatticeError("elements must be distinct and non-empty")
    for a, b in spec.order:
        if a not in els or b not in els:
            raise LatticeError(f"order pair mentions unknown element {a if a not in els else b}")
    le = _closure(els, spec.order)
    for a, b in combinations(els, 2):
        if (a, b) in le and (b, a) in le:
            raise LatticeError(f"order is not antisymmetric: {a} <= {b} <= {a}")

    def bound(cands, below: bool):
        best = [c for c in cands if all(((d, c) if below else (c, d)) in le for d in cands)]
        return best[0] if best else None

    def glb(a, b):
        lower = [c for c in els if (c, a) in le and (c, b) in le]
        g = bound(lower, below=True)
        if g is None:
            raise LatticeError(f"{a} and {b} have no greatest lower bound")
        return g

    def lub(a, b):
        upper = [c for c in els if (a, c) in le and (b, c) in le]
        g = bound(upper, below=False)
        if g is None:
            raise LatticeError(f"{a} and {b} have no least upper bound")
        return g

    meet = {(a, b): glb(a, b) for a, b in product(els, repeat=2)}
    join = {(a, b): lub(a, b) for a, b in product(els, repeat=2)}
    top = bound(list(els), below=True)
    bottom = bound(list(els), below=False)
    if top is None or bottom is None:
        raise LatticeError("lattice is not bounded")
    if spec.top is not None and spec.top != top:
        raise LatticeError(f"declared top {spec.top} is not the greatest element {top}")
    if spec.bottom is not None and spec.bottom != bottom:
        raise LatticeError(f"declared bottom {spec.bottom} is not the least element {bottom}")
    for a, b, c in product(els, repeat=3):
        if meet[a, join[b, c]] != join[meet[a, b], meet[a, c]]:
            raise LatticeError(f"lattice is not distributive at {a}, {b}, {c}; relative complements need not exist")
    imp = {}
    for a, b in product(els, repeat=2):
        cs = [c for c in els if (meet[a, c], b) in le]
        g = bound(cs, below=True)
        if g is None:
            raise LatticeError(f"no relative complement {a} => {b}")
        imp[a, b] = g
    positive = frozenset(spec.positive) if spec.positive is not None else frozenset({top})
    if not positive <= set(els):
        raise LatticeError("positive set mentions unknown elements")
    return FiniteAlgebra(spec.name, els, top, bottom, imp, meet, join, positive)


def _chain(name: str, els: tuple[str, ...]) -> FiniteAlgebra:
    # els listed top first; the order is the reverse of the listing
    pairs = tuple((els[i + 1], els[i]) for i in range(len(els) - 1))
    return from_lattice(LatticeSpec(els, pairs, name=name))


def bool2() -> FiniteAlgebra:
    return _chain("bool2", ("1", "0"))


def chain3() -> FiniteAlgebra:
    return _chain("chain3", ("1", "1/2", "0"))


def diamond4() -> FiniteAlgebra:
    els = ("1", "a", "b", "0")
    return from_lattice(LatticeSpec(els, (("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")), name="diamond4"))


def doubled_top() -> FiniteAlgebra:
    """bool2 with its top split into two distinct positive copies t and t'.

    Every operation computes in bool2 and answers ``t`` for true, so ``t``
    and ``t'`` are each below the other without being equal.
    """
    base = bool2()
    down = {"t": "1", "t'": "1", "0": "0"}
    up = {"1": "t", "0": "0"}
    els = ("t", "t'", "0")

    def lift(op):
        return {(a, b): up[op(down[a], down[b])] for a, b in product(els, repeat=2)}

    return FiniteAlgebra("doubled_top", els, "t", "0", lift(base.imp), lift(base.meet), lift(base.join),
                         frozenset({"t", "t'"}))


BUNDLED = {"bool2": bool2, "chain3": chain3, "diamond4": diamond4, "doubled_top": doubled_top}


def make_algebra(spec: str | LatticeSpec) -> FiniteAlgebra:
    if isinstance(spec, LatticeSpec):
        return from_lattice(spec)
    try:
        return BUNDLED[spec]()
    except KeyError:
        raise LatticeError(f"unknown algebra {spec!r}; bundled: {', '.join(BUNDLED)}") from None


def default_battery() -> list[FiniteAlgebra]:
    return [make() for make in BUNDLED.values()]


# ---------------------------------------------------------------------------
# Law checking


@dataclass(frozen=True)
class LawResult:
    law: str
    passed: bool
    counterexample: tuple = ()


@dataclass(frozen=True)
class LawReport:
    algebra: str
    laws: tuple[LawResult, ...]
    antisymmetry: LawResult

    @property
    def tva(self) -> bool:
        """Every truth values algebra law holds."""
        return all(r.passed for r in self.laws)

    @property
    def heyting(self) -> bool:
        return self.tva and self.antisymmetry.passed

    def failures(self) -> list[str]:
        out = [r.law for r in self.laws if not r.passed]
        if not self.antisymmetry.passed:
            out.append(self.antisymmetry.law)
        return out


def _families(els, cap: int = 3):
    n = len(els) if len(els) <= 6 else cap
    for k in range(n + 1):
        yield from combinations(els, k)


def check_laws(b: FiniteAlgebra) -> LawReport:
    els = b.elements
    le = {(x, y): pre_order(b, x, y) for x, y in product(els, repeat=2)}

    def law(name, cases, pred):
        for case in cases:
            if not pred(*case):
                return LawResult(name, False, case)
        return LawResult(name, True)

    pairs = list(product(els, repeat=2))
    triples = list(product(els, repeat=3))
    fams = list(_families(els))
    laws = (
        law("reflexive", [(x,) for x in els], lambda x: le[x, x]),
        law("transitive", triples, lambda x, y, z: not (le[x, y] and le[y, z]) or le[x, z]),
        law("top-greatest", [(x,) for x in els], lambda x: le[x, b.top]),
        law("bottom-least", [(x,) for x in els], lambda x: le[b.bottom, x]),
        law("meet-glb", triples,
            lambda x, y, c: le[b.meet(x, y), x] and le[b.meet(x, y), y] and (not (le[c, x] and le[c, y]) or le[c, b.meet(x, y)])),
        law("join-lub", triples,
            lambda x, y, c: le[x, b.join(x, y)] and le[y, b.join(x, y)] and (not (le[x, c] and le[y, c]) or le[b.join(x, y), c])),
        law("imp-adjoint", triples, lambda x, y, c: le[c, b.imp(x, y)] == le[b.meet(x, c), y]),
        law("forall-glb", [(f, c) for f in fams for c in els],
            lambda f, c: le[c, b.forall(f)] == all(le[c, x] for x in f) and all(le[b.forall(f), x] for x in f)),
        law("exists-lub", [(f, c) for f in fams for c in els],
            lambda f, c: le[b.exists(f), c] == all(le[x, c] for x in f) and all(le[x, b.exists(f)] for x in f)),
        law("positive-top", [()], lambda: b.is_positive(b.top)),
        law("positive-modus-ponens", pairs,
            lambda x, y: not (b.is_positive(b.imp(x, y)) and b.is_positive(x)) or b.is_positive(y)),
        law("positive-meet", pairs,
            lambda x, y: not (b.is_positive(x) and b.is_positive(y)) or b.is_positive(b.meet(x, y))),
    )
    anti = law("antisymmetric", pairs, lambda x, y: not (le[x, y] and le[y, x]) or x == y)
    return LawReport(b.name, laws, anti)


# ---------------------------------------------------------------------------
# Reducibility candidates


@dataclass(frozen=True)
class CTop:
    """The strongly normalizing proofs."""


@dataclass(frozen=True)
class CImp:
    left: Candidate
    right: Candidate


@dataclass(frozen=True)
class CAnd:
    left: Candidate
    right: Candidate


@dataclass(frozen=True)
class COr:
    left: Candidate
    right: Candidate


@dataclass(frozen=True)
class CForall:
    family: tuple[tuple[Term, Candidate], ...]


@dataclass(frozen=True)
class CExists:
    family: tuple[tuple[Term, Candidate], ...]


@dataclass(frozen=True)
class COpaque:
    """A candidate the oracle cannot look inside (denotation cut off)."""

    label: str


Candidate = Union[CTop, CImp, CAnd, COr, CForall, CExists, COpaque]


def show_candidate(c: Candidate) -> str:
    match c:
        case CTop():
            return "T~"
        case CImp(l, r):
            return f"({show_candidate(l)} =>~ {show_candidate(r)})"
        case CAnd(l, r):
            return f"({show_candidate(l)} /\\~ {show_candidate(r)})"
        case COr(l, r):
            return f"({show_candidate(l)} \\/~ {show_candidate(r)})"
        case CForall(fam):
            return "forall~{" + ", ".join(show_candidate(x) for _, x in fam) + "}"
        case CExists(fam):
            return "exists~{" + ", ".join(show_candidate(x) for _, x in fam) + "}"
        case COpaque(label):
            return f"?{label}"
    raise TypeError(c)


@dataclass(frozen=True)
class CandidateAlgebra:
    """Operations build expression trees; every candidate is positive."""

    name: str = "candidates"

    @property
    def top(self) -> Candidate:
        return CTop()

    @property
    def bottom(self) -> Candidate:
        return CTop()

    def imp(self, a, b):
        return CImp(a, b)

    def meet(self, a, b):
        return CAnd(a, b)

    def join(self, a, b):
        return COr(a, b)

    def forall(self, family):
        return CForall(tuple(family))

    def exists(self, family):
        return CExists(tuple(family))

    def is_positive(self, a) -> bool:
        return True


@dataclass(frozen=True)
class Member:
    checks: int = 0

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NonMember:
    candidate: Candidate
    proof: Proof
    argument: Proof | Term | None = None  # the sampled argument that failed
    reason: str = ""
    trace: tuple[Proof, ...] = ()

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Unknown:
    reason: str

    def __bool__(self):
        return False


Verdict = Union[Member, NonMember, Unknown]
Samples = Union[Mapping[Candidate, Sequence[Proof]], Sequence[Proof], None]

NEUTRAL = Hyp("%n")


@dataclass
class _Oracle:
    fuel: int
    samples: Samples
    _sn: dict = field(default_factory=dict)
    _memo: dict = field(default_factory=dict)

    def sn(self, p: Proof):
        if p not in self._sn:
            self._sn[p] = strongly_normalizing(p, self.fuel)
        return self._sn[p]

    def sample_set(self, c: Candidate) -> list[Proof]:
        if isinstance(self.samples, Mapping):
            extra = list(self.samples.get(c, ()))
        else:
            extra = list(self.samples or ())
        return [NEUTRAL] + extra

    def member(self, c: Candidate, p: Proof) -> Verdict:
        key = (c, p)
        if key not in self._memo:
            self._memo[key] = Unknown("cyclic membership question")
            self._memo[key] = self._member(c, p)
        return self._memo[key]

    def _member(self, c: Candidate, p: Proof) -> Verdict:
        while isinstance(p, Ann):
            p = p.proof
        if isinstance(p, Hyp):
            return Member(1)  # neutral and normal: in every candidate
        sn = self.sn(p)
        if isinstance(sn, NotSN):
            return NonMember(c, p, None, "not strongly normalizing", sn.witness)
        if isinstance(sn, SNUnknown):
            return Unknown(f"strong normalization undecided within fuel {self.fuel}")
        match c:
            case CTop():
                return Member(1)
            case COpaque(label):
                return Unknown(f"candidate {label} is opaque")
        checks = 0
        unknown: Unknown | None = None
        for r in sn.reachable:
            v = self._shape(c, r)
            if isinstance(v, NonMember):
                return NonMember(c, p, v.argument, v.reason, v.trace)
            if isinstance(v, Unknown):
                unknown = unknown or v
            else:
                checks += v.checks
        return unknown or Member(checks + 1)

    def _shape(self, c: Candidate, r: Proof) -> Verdict:
        while isinstance(r, (Fold, Ann)):
            r = r.arg if isinstance(r, Fold) else r.proof
        match c, r:
            case CImp(a, b), Lam(x, _, body):
                return self._apply(a, b, r, lambda s: subst_hyp(body, x, s))
            case CAnd(a, b), Pair(left, right):
                return self._all([(a, left, None), (b, right, None)])
            case COr(a, _), Inl(q):
                return self._all([(a, q, None)])
            case COr(_, b), Inr(q):
                return self._all([(b, q, None)])
            case CForall(fam), Gen(v, body):
                return self._all([(ct, subst_term(body, v, t), t) for t, ct in fam if t.sort == v.sort])
            case CExists(fam), Pack(t, q):
                match = [ct for u, ct in fam if u == t]
                if not match:
                    return Unknown(f"witness {t} outside the sampled domain")
                return self._all([(match[0], q, t)])
        return Member(0)

    def _all(self, goals) -> Verdict:
        checks, unknown = 0, None
        for cand, q, arg in goals:
            v = self.member(cand, q)
            if isinstance(v, NonMember):
                return NonMember(v.candidate, v.proof, arg if arg is not None else v.argument, v.reason, v.trace)
            if isinstance(v, Unknown):
                unknown = unknown or v
            else:
                checks += v.checks
        return unknown or Member(checks)

    def _apply(self, a, b, lam, plug) -> Verdict:
        checks, unknown = 0, None
        for s in self.sample_set(a):
            sv = self.member(a, s)
            if isinstance(sv, NonMember):
                continue  # not an element of the domain; it tests nothing
            if isinstance(sv, Unknown):
                unknown = unknown or sv
                continue
            v = self.member(b, plug(s))
            if isinstance(v, NonMember):
                return NonMember(b, plug(s), s, v.reason, v.trace)
            if isinstance(v, Unknown):
                unknown = unknown or v
            else:
                checks += v.checks
        return unknown or Member(checks)


def candidate_member(c: Candidate, p: Proof, fuel: int = DEFAULTS.sn_fuel, samples: Samples = None) -> Verdict:
    """Bounded membership oracle.

    ``samples`` is either one list used for every domain or a mapping from
    candidates to lists.  A fresh neutral hypothesis is always sampled, and
    each sample counts only once it is itself certified a member.
    """
    return _Oracle(fuel, samples).member(c, p)

"""Agreement harnesses.

Bounded provability is compared across the three rule systems, and
cut-free search is compared with the outcome of normalizing corpus proofs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from ..config import DEFAULTS
from ..proofs.check import RuleSystem, System
from ..proofs.terms import Proof
from ..reduction import normalize_proof
from ..rewriting import RewriteSystem
from ..syntax import Context, Prop, Sequent, subformulas
from .search import Searcher


def sequents(formulas: Iterable[Prop], max_hyps: int) -> list[Sequent]:
    forms: dict[Prop, None] = {}
    for a in formulas:
        for b in subformulas(a):
            forms.setdefault(b)
    pool = list(forms)
    out = []
    for k in range(max_hyps + 1):
        for hyps in combinations(pool, k):
            ctx = Context(tuple((f"h{i + 1}", a) for i, a in enumerate(hyps)))
            out.extend(Sequent(ctx, g) for g in pool)
    return out


@dataclass(frozen=True)
class Disagreement:
    sequent: Sequent
    provable: dict  # system value -> bool


@dataclass(frozen=True)
class AgreementReport:
    total: int
    provable: dict  # system value -> count
    disagreements: tuple[Disagreement, ...]

    @property
    def ok(self) -> bool:
        return not self.disagreements


def three_formalism_agreement(
    theory: RewriteSystem,
    formulas: Sequence[Prop],
    max_hyps: int = 2,
    depth: int = 6,
) -> AgreementReport:
    searchers = {k: Searcher(RuleSystem(k, theory)) for k in System}
    counts = {k.value: 0 for k in System}
    bad = []
    seqs = sequents(formulas, max_hyps)
    for seq in seqs:
        res = {k.value: s.search(seq.context, seq.goal, depth) is not None for k, s in searchers.items()}
        for k, v in res.items():
            counts[k] += v
        if len(set(res.values())) > 1:
            bad.append(Disagreement(seq, res))
    return AgreementReport(len(seqs), counts, tuple(bad))


@dataclass(frozen=True)
class CutAgreement:
    system: str
    sequent: Sequent
    proofs: tuple[str, ...]
    normalizes: bool  # some corpus proof of the sequent normalizes
    searched: bool

    @property
    def agree(self) -> bool:
        return self.normalizes == self.searched


def cut_elimination_agreement(
    entries: Iterable[tuple[str, RuleSystem, Sequent, Proof]],
    depth: int = DEFAULTS.search_depth,
    fuel: int = DEFAULTS.fuel,
) -> list[CutAgreement]:
    """Per sequent: search succeeds iff some corpus proof of it normalizes."""
    groups: dict[tuple, list] = {}
    for name, system, seq, proof in entries:
        groups.setdefault((system, seq), []).append((name, proof))
    out = []
    searchers: dict[RuleSystem, Searcher] = {}
    for (system, seq), items in groups.items():
        s = searchers.setdefault(system, Searcher(system))
        normal = any(normalize_proof(p, fuel).normal for _, p in items)
        found = s.search(seq.context, seq.goal, depth) is not None
        out.append(CutAgreement(system.kind.value, seq, tuple(n for n, _ in items), normal, found))
    return out

"""The bundled corpus: theories, proof files and lattice specs."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..frontend.parser import ProofEntry, ProofFile, TheoryFile, parse_lattice, parse_proofs, parse_theory_file
from ..proofs.check import Derivation, RuleSystem, typecheck
from ..tva import LatticeSpec

# proof file -> theory it is written against
PROOF_THEORY = {
    "omega.prf": "crabbe",
    "omega_fu.prf": "crabbe",
    "omega_sn.prf": "crabbe",
    "qr.prf": "qr",
    "qr_fu.prf": "qr",
    "qr_sn.prf": "qr",
    "empty.prf": "empty",
    "nat.prf": "nat",
}

# goal sequents for the sharpened completeness check, per theory
GOALS = {
    "empty": ("|- Q => Q", "|- (Q => Q) \\/ R", "h : Q |- Q \\/ R"),
    "qr": ("|- Q => R", "|- (Q => R) => P", "p : P |- Q => R", "q : Q, p : P |- R"),
    "crabbe": ("|- R", "|- P => R"),
}


def root() -> Path:
    return Path(str(resources.files(__package__)))


def path(kind: str, name: str) -> Path:
    return root() / kind / name


@lru_cache(maxsize=None)
def theory_file(name: str) -> TheoryFile:
    return parse_theory_file(path("theories", f"{name}.dmt").read_text())


def theory(name: str):
    return theory_file(name).system


@lru_cache(maxsize=None)
def proof_file(name: str) -> ProofFile:
    return parse_proofs(path("proofs", name).read_text(), theory(PROOF_THEORY[name]).signature)


def lattice(name: str) -> LatticeSpec:
    return parse_lattice(path("lattices", f"{name}.lat").read_text())


@dataclass(frozen=True)
class CorpusProof:
    file: str
    theory_name: str
    system: RuleSystem
    entry: ProofEntry

    @property
    def label(self) -> str:
        return f"{self.file}:{self.entry.name}"

    @property
    def closed(self) -> bool:
        return not self.entry.sequent.context.entries

    def derivation(self) -> Derivation:
        d = typecheck(self.entry.proof, self.entry.sequent.context, self.entry.sequent.goal, self.system)
        if not d:
            raise ValueError(f"{self.label} does not check: {d.reason}")
        return d


def proofs(theory_name: str | None = None) -> list[CorpusProof]:
    out = []
    for fname, tname in PROOF_THEORY.items():
        if theory_name is not None and tname != theory_name:
            continue
        pf = proof_file(fname)
        system = RuleSystem(pf.system, theory(tname))
        out.extend(CorpusProof(fname, tname, system, e) for e in pf.proofs)
    return out


def files(kind: str) -> list[Path]:
    return sorted((root() / kind).iterdir())

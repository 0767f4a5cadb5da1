from dedmod import corpus
from dedmod.proofs.check import System
from dedmod.reduction import normalize_proof


def test_corpus_size_and_systems(all_corpus_proofs):
    assert len(all_corpus_proofs) >= 20
    assert {c.system.kind for c in all_corpus_proofs} == set(System)


def test_every_corpus_proof_checks(all_corpus_proofs):
    for c in all_corpus_proofs:
        assert c.derivation(), c.label


def test_labels_are_unique(all_corpus_proofs):
    labels = [c.label for c in all_corpus_proofs]
    assert len(labels) == len(set(labels))


def test_theory_lookup():
    assert {p.name for p in corpus.files("theories")} == {f"{n}.dmt" for n in ("crabbe", "empty", "nat", "qr")}
    assert set(corpus.PROOF_THEORY.values()) <= {"crabbe", "empty", "nat", "qr"}


def test_only_the_crabbe_proofs_loop(all_corpus_proofs):
    looping = {c.theory_name for c in all_corpus_proofs if not normalize_proof(c.entry.proof, 200).normal}
    assert looping == {"crabbe"}

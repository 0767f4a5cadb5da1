import pytest

from dedmod import corpus
from dedmod.frontend.parser import parse_proof_term, parse_prop, parse_sequent, parse_theory

QR = "prop P Q R\nrule r : P --> Q => R\n"
CRABBE = "prop P R\nrule r : P --> P => R\n"
EMPTY = "sort i\nfun c : i\npred S : i\nprop Q R\n"
NAT = "sort nat\nfun z : nat\nfun f : nat -> nat\npred P : nat\nprop R\nrule s : P(f(x)) --> P(x) => R\n"


@pytest.fixture(scope="session")
def qr():
    return parse_theory(QR)


@pytest.fixture(scope="session")
def crabbe():
    return parse_theory(CRABBE)


@pytest.fixture(scope="session")
def empty():
    return parse_theory(EMPTY)


@pytest.fixture(scope="session")
def nat():
    return parse_theory(NAT)


def prop(text, theory):
    return parse_prop(text, theory.signature)


def seq(text, theory):
    return parse_sequent(text, theory.signature)


def term(text, theory, sequent=None):
    if isinstance(sequent, str):
        sequent = seq(sequent, theory)
    return parse_proof_term(text, theory.signature, sequent)


@pytest.fixture(scope="session")
def all_corpus_proofs():
    return corpus.proofs()


# criterion number -> PASS/FAIL line, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

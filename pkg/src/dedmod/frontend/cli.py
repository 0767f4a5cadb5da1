"""Command-line surface: ``dedmod <command> [flags]``.

Exit status is 0 on success, 1 on a logical failure (a rejected proof, a
missing model, a counterexample) and 2 on usage or parse errors.  Every
command prints a text report, or a JSON one with ``--json``.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import product
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Callable

from .. import corpus
from ..config import DEFAULTS, Budgets
from ..cutfree.agreement import three_formalism_agreement
from ..cutfree.context import UniverseTooLarge, sharpened_completeness_check
from ..cutfree.search import Searcher
from ..proofs.check import RuleSystem, System, typecheck
from ..proofs.derived import UnsupportedRule, derive_fold_unfold, derive_supernatural
from ..reduction import SN, NotSN, normalize_proof, strongly_normalizing
from ..rewriting import RewriteSystem
from ..syntax import free_vars
from ..semantics import (
    Invalid,
    SearchTooLarge,
    find_model,
    rule_valid,
    successor_model,
    super_consistency_report,
)
from ..tva import BUNDLED, LatticeError, check_laws, default_battery, make_algebra
from .parser import ParseError, ProofFile, parse_lattice, parse_prop, parse_proofs, parse_sequent, parse_theory_file
from .printer import show_derived_rule, show_proof, show_prop, show_sequent


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    ok: bool
    report: dict
    text: list[str]


# ---------------------------------------------------------------------------
# Inputs


def _find(arg: str, kind: str, ext: str) -> Path:
    p = Path(arg)
    if p.is_file():
        return p
    name = arg if arg.endswith(ext) else arg + ext
    q = corpus.path(kind, Path(name).name)
    if q.is_file():
        return q
    raise UsageError(f"no such {kind[:-1]} file: {arg}")


def _theory(args) -> tuple[RewriteSystem, Budgets]:
    tf = parse_theory_file(_find(args.theory, "theories", ".dmt").read_text())
    budgets = DEFAULTS
    known = {f.name for f in fields(Budgets)}
    for key, value in tf.options:
        if key in known:
            budgets = replace(budgets, **{key: value})
    for f in fields(Budgets):
        v = getattr(args, f.name, None)
        if v is not None:
            budgets = replace(budgets, **{f.name: v})
    return tf.system, budgets


def _proofs(args, theory: RewriteSystem) -> ProofFile:
    pf = parse_proofs(_find(args.proof, "proofs", ".prf").read_text(), theory.signature)
    if args.name:
        try:
            pf = replace(pf, proofs=(pf.get(args.name),))
        except KeyError:
            raise UsageError(f"no proof named {args.name}") from None
    return pf


def _algebras(names: list[str] | None):
    if not names or names == ["default"]:
        return default_battery()
    out = []
    for n in names:
        for part in n.split(","):
            if part == "default":
                out.extend(default_battery())
            elif part == "bundled":
                out.extend(make_algebra(b) for b in BUNDLED)
            elif part in BUNDLED:
                out.append(make_algebra(part))
            else:
                out.append(make_algebra(parse_lattice(_find(part, "lattices", ".lat").read_text())))
    return out


# ---------------------------------------------------------------------------
# Commands


def cmd_check(args) -> Outcome:
    theory, b = _theory(args)
    pf = _proofs(args, theory)
    system = RuleSystem(pf.system, theory)
    rows, text, ok = [], [], True
    for e in pf.proofs:
        d = typecheck(e.proof, e.sequent.context, e.sequent.goal, system, b.depth)
        ok &= bool(d)
        rows.append({"name": e.name, "sequent": show_sequent(e.sequent), "ok": bool(d),
                     "reason": "" if d else d.reason})
        text.append(f"{e.name}: {'ok' if d else 'REJECTED ' + d.reason}")
    return Outcome(ok, {"system": pf.system.value, "proofs": rows}, text)


def cmd_normalize(args) -> Outcome:
    theory, b = _theory(args)
    pf = _proofs(args, theory)
    rows, text, ok = [], [], True
    for e in pf.proofs:
        t = normalize_proof(e.proof, b.fuel)
        ok &= t.normal
        row = {"name": e.name, "outcome": t.outcome, "steps": [
            {"rule": s.rule, "path": "/".join(s.path)} for s in t.steps], "final": show_proof(t.final)}
        match t.outcome:
            case "normal":
                msg = f"normal after {len(t.steps)} step(s): {show_proof(t.final)}"
            case "cycle":
                step, back = t.cycle
                row["cycle"] = {"step": step, "repeats": back}
                msg = f"Cycle at step {step} (repeats the proof reached after {back} step(s))"
            case _:
                msg = f"fuel exhausted after {len(t.steps)} step(s)"
        rows.append(row)
        text.append(f"{e.name}: {msg}")
    return Outcome(ok, {"proofs": rows}, text)


def cmd_sn(args) -> Outcome:
    theory, b = _theory(args)
    pf = _proofs(args, theory)
    rows, text, ok = [], [], True
    for e in pf.proofs:
        v = strongly_normalizing(e.proof, b.sn_fuel)
        ok &= bool(v)
        match v:
            case SN(reachable, longest):
                row = {"verdict": "SN", "reachable": len(reachable), "longest": longest}
                msg = f"SN ({len(reachable)} reachable, longest reduction {longest})"
            case NotSN(witness):
                row = {"verdict": "NotSN", "witness": [show_proof(p) for p in witness]}
                msg = f"not SN, cycle of length {len(witness) - 1}"
            case _:
                row = {"verdict": "Unknown", "explored": v.explored}
                msg = f"unknown after exploring {v.explored} proofs"
        rows.append({"name": e.name, **row})
        text.append(f"{e.name}: {msg}")
    return Outcome(ok, {"proofs": rows}, text)


def cmd_search(args) -> Outcome:
    theory, b = _theory(args)
    seq = parse_sequent(args.goal, theory.signature)
    systems = list(System) if args.system == "all" else [System(args.system)]
    rows, text, ok = {}, [], True
    for k in systems:
        p = Searcher(RuleSystem(k, theory)).search(seq.context, seq.goal, b.search_depth)
        ok &= p is not None
        rows[k.value] = None if p is None else show_proof(p)
        text.append(f"{k.value}: {'none within depth ' + str(b.search_depth) if p is None else show_proof(p)}")
    return Outcome(ok, {"sequent": show_sequent(seq), "depth": b.search_depth, "proofs": rows}, text)


def cmd_derive_rules(args) -> Outcome:
    theory, _ = _theory(args)
    rows, text, ok = [], [], True
    for r in theory.prop_rules:
        row = {"rule": r.name}
        if args.system in ("foldunfold", "all"):
            blocks = [show_derived_rule(x) for x in derive_fold_unfold(r)]
            row["foldunfold"] = blocks
            text += [x for blk in blocks for x in (blk, "")]
        if args.system in ("supernatural", "all"):
            try:
                intro, elims = derive_supernatural(r)
            except UnsupportedRule as e:
                ok = False
                row["supernatural"] = None
                row["error"] = str(e)
                text.append(f"{r.name}: {e}")
            else:
                blocks = [show_derived_rule(x) for x in (intro, *elims)]
                row["supernatural"] = blocks
                text += [x for blk in blocks for x in (blk, "")]
        rows.append(row)
    while text and not text[-1]:
        text.pop()
    return Outcome(ok, {"rules": rows}, text)


def cmd_tva_laws(args) -> Outcome:
    rows, text, ok = [], [], True
    for alg in _algebras(args.algebra):
        rep = check_laws(alg)
        good = rep.heyting if args.heyting else rep.tva
        ok &= good
        rows.append({"algebra": alg.name, "tva": rep.tva, "heyting": rep.heyting, "failures": rep.failures()})
        kind = "Heyting algebra" if rep.heyting else "truth values algebra" if rep.tva else "not a truth values algebra"
        fails = f" (fails: {', '.join(rep.failures())})" if rep.failures() else ""
        text.append(f"{alg.name}: {kind}{fails}")
    return Outcome(ok, {"algebras": rows}, text)


def cmd_model_find(args) -> Outcome:
    theory, b = _theory(args)
    rows, text, ok = [], [], True
    for alg in _algebras(args.algebra):
        if args.successor:
            m = successor_model(theory, alg, b.nat_bound)
            verdicts = {r.name: rule_valid(r, m, _below_bound(r, b.nat_bound)) for r in theory.prop_rules}
            found = not any(isinstance(v, Invalid) for v in verdicts.values())
            row = {"algebra": alg.name, "model": m.describe(),
                   "rules": {n: type(v).__name__ for n, v in verdicts.items()}}
            text.append(f"{alg.name}: " + ", ".join(f"{n} {type(v).__name__}" for n, v in verdicts.items()))
        else:
            try:
                m = find_model(theory, alg, b.model_size)
            except SearchTooLarge as e:
                raise UsageError(str(e)) from None
            found = m is not None
            row = {"algebra": alg.name, "model": m.describe() if m else None}
            text.append(f"{alg.name}: {_show_model(m) if m else 'no model of size ' + str(b.model_size)}")
        ok &= found
        rows.append(row)
    return Outcome(ok, {"results": rows}, text)


def _below_bound(rule, bound: int):
    """Valuations sending every variable of the rule below the truncation point."""
    vs = sorted(free_vars(rule.lhs), key=lambda v: v.name)
    return [dict(zip(vs, ns)) for ns in product(range(bound), repeat=len(vs))]


def _show_model(m) -> str:
    d = m.describe()
    parts = [f"{p}{'' if k == '()' else '(' + k + ')'} = {v}" for p, t in d["predicates"].items() for k, v in t.items()]
    parts += [f"{f}{'' if k == '()' else '(' + k + ')'} = {v}" for f, t in d["functions"].items() for k, v in t.items()]
    return ", ".join(parts) or "(empty signature)"


def cmd_super_consistency(args) -> Outcome:
    theory, b = _theory(args)
    algs = _algebras(args.battery)
    supplied = []
    if args.proof:
        pf = _proofs(args, theory)
        supplied = [(e.proof, e.sequent.goal) for e in pf.proofs if not e.sequent.context.entries]
    rep = super_consistency_report(theory, algs, b.model_size, supplied, b.sn_fuel)
    text = [f"{r.algebra}: {'model ' + _show_model(r.model) if r.model else 'no model ' + r.error}"
            + (f" ({r.seconds:.3f}s)" if args.timings else "") for r in rep.results]
    text.append(f"{rep.models_found}/{len(rep.results)} algebras with models")
    for ev in rep.evidence:
        text.append(f"NotSN evidence ({ev.origin}): {show_proof(ev.proof)} : {show_prop(ev.prop)}, "
                    f"cycle of length {len(ev.witness) - 1}")
    text.append(f"note: {rep.note}")
    report = {
        "algebras": [{"algebra": r.algebra, "model": r.model.describe() if r.model else None, "error": r.error}
                     for r in rep.results],
        "models_found": rep.models_found,
        "total": len(rep.results),
        "not_sn_evidence": [{"proof": show_proof(ev.proof), "prop": show_prop(ev.prop), "origin": ev.origin,
                             "witness": [show_proof(p) for p in ev.witness]} for ev in rep.evidence],
        "note": rep.note,
    }
    return Outcome(rep.all_models and not rep.evidence, report, text)


def cmd_context_model(args) -> Outcome:
    theory, b = _theory(args)
    seq = parse_sequent(args.goal, theory.signature)
    entries = []
    if args.proof:
        pf = _proofs(args, theory)
        system = RuleSystem(pf.system, theory)
        for e in pf.proofs:
            d = typecheck(e.proof, e.sequent.context, e.sequent.goal, system, b.depth)
            if d:
                entries.append((e.name, d))
    try:
        rep = sharpened_completeness_check(seq, theory, b.search_depth, b.max_hyps, entries)
    except UniverseTooLarge as e:
        raise UsageError(str(e)) from None
    text = [f"{rep.worlds} contexts over {rep.formulas} formulas, {rep.checked} (context, formula) pairs checked",
            f"membership failures: {len(rep.membership_failures)}",
            f"soundness failures: {len(rep.soundness_failures)}",
            f"laws: {'Heyting' if rep.laws.heyting else 'fails ' + ', '.join(rep.laws.failures())}",
            f"goal denotation contains its context: {rep.goal_member}"]
    text += [f.show() for f in rep.failures]
    report = {"worlds": rep.worlds, "formulas": rep.formulas, "checked": rep.checked,
              "failures": [f.show() for f in rep.failures], "heyting": rep.laws.heyting,
              "law_failures": rep.laws.failures(), "goal_member": rep.goal_member}
    return Outcome(rep.ok, report, text)


def cmd_agree(args) -> Outcome:
    theory, b = _theory(args)
    forms = [parse_prop(f, theory.signature) for f in args.formula] if args.formula else list(_default_formulas(theory))
    rep = three_formalism_agreement(theory, forms, b.max_hyps if args.max_hyps is not None else 2,
                                    b.search_depth if args.search_depth is not None else 6)
    text = [f"{rep.total} sequents", *(f"{k}: {v} provable" for k, v in rep.provable.items()),
            f"disagreements: {len(rep.disagreements)}"]
    text += [f"  {show_sequent(d.sequent)}: {d.provable}" for d in rep.disagreements]
    report = {"total": rep.total, "provable": rep.provable,
              "disagreements": [{"sequent": show_sequent(d.sequent), "provable": d.provable}
                                for d in rep.disagreements]}
    return Outcome(rep.ok, report, text)


def _default_formulas(theory: RewriteSystem):
    """Each rule's sides, when no formulas are given."""
    for r in theory.prop_rules:
        yield r.lhs
        yield r.rhs


# ---------------------------------------------------------------------------
# Argument parsing


def _budget_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("budgets")
    for f in fields(Budgets):
        g.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=int, default=None,
                       help=f"default {getattr(DEFAULTS, f.name)}")


COMMANDS: dict[str, tuple[Callable[..., Outcome], str]] = {
    "check": (cmd_check, "typecheck the proofs of a proof file"),
    "normalize": (cmd_normalize, "normalize proofs, detecting cycles"),
    "sn": (cmd_sn, "probe strong normalization over the whole reduction graph"),
    "search": (cmd_search, "bounded cut-free proof search"),
    "derive-rules": (cmd_derive_rules, "print the fold/unfold and supernatural rules of a theory"),
    "tva-laws": (cmd_tva_laws, "check the truth values algebra laws"),
    "model-find": (cmd_model_find, "find a model of a theory in finite algebras"),
    "super-consistency": (cmd_super_consistency, "model battery plus non-normalization evidence"),
    "context-model": (cmd_context_model, "sharpened completeness check on the context algebra"),
    "agree": (cmd_agree, "bounded provability agreement of the three rule systems"),
}


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dedmod", description="Deduction modulo workbench.")
    sub = top.add_subparsers(dest="command", required=True, metavar="command")
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--json", action="store_true", help="print a JSON report")
        if name != "tva-laws":
            p.add_argument("--theory", required=True, help="theory file, or the name of a bundled one")
        if name in ("check", "normalize", "sn"):
            p.add_argument("--proof", required=True, help="proof file, or the name of a bundled one")
        if name in ("check", "normalize", "sn", "super-consistency", "context-model"):
            if name in ("super-consistency", "context-model"):
                p.add_argument("--proof", help="proof file whose closed proofs are also examined")
            p.add_argument("--name", help="only the proof with this name")
        if name in ("search", "context-model"):
            p.add_argument("--goal", required=True, help="sequent, e.g. 'h : Q |- Q \\/ R'")
        if name == "search":
            p.add_argument("--system", default="modulo", choices=[*(s.value for s in System), "all"])
        if name == "derive-rules":
            p.add_argument("--system", default="all", choices=["foldunfold", "supernatural", "all"])
        if name in ("tva-laws", "model-find"):
            p.add_argument("--algebra", action="append",
                           help="algebra name, .lat file, or 'bundled'; repeatable (default: the bundled battery)")
        if name == "tva-laws":
            p.add_argument("--heyting", action="store_true", help="also require antisymmetry")
        if name == "model-find":
            p.add_argument("--successor", action="store_true",
                           help="successor recursion on truncated naturals instead of exhaustive search")
        if name == "super-consistency":
            p.add_argument("--battery", action="append", help="'default' or algebra names / .lat files")
            p.add_argument("--timings", action="store_true", help="show per-algebra search time")
        if name == "agree":
            p.add_argument("--formula", action="append", help="formula whose subformulas are used, repeatable")
        _budget_flags(p)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cmd, _ = COMMANDS[args.command]
    try:
        out = cmd(args)
    except (UsageError, ParseError, LatticeError, OSError) as e:
        print(f"dedmod {args.command}: {e}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps({"command": args.command, "ok": out.ok, **out.report}, sort_keys=True, indent=2))
    else:
        print("\n".join(out.text))
    return 0 if out.ok else 1


if __name__ == "__main__":
    sys.exit(main())

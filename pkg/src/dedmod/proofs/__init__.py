"""Proof terms, derived rules and type checking in three rule systems."""

from .check import Checker, Derivation, Exposure, Node, Rejection, RuleSystem, System, infer, modulo, typecheck
from .derived import DerivedRule, SchemaSequent, UnsupportedRule, derive_fold_unfold, derive_supernatural
from .terms import *  # noqa: F401,F403
from .terms import RuleClass, classify_last_rule, ends_with_introduction

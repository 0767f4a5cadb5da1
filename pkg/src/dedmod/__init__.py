"""Deduction modulo: rewriting, proof terms, reduction and truth values algebras."""

import sys

# Syntax is recursive; a rewrite rule like P --> P => R nests a formula one
# level deeper per step, so a full fuel budget needs a deeper stack than the
# interpreter default.
if sys.getrecursionlimit() < 10000:
    sys.setrecursionlimit(10000)

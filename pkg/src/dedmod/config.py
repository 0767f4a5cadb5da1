"""Default budgets, in one place.

Every command and API entry point takes explicit overrides; these are only the
fallbacks.  The ``DEDMOD_BUDGETS`` environment variable overrides them at
import time, e.g. ``DEDMOD_BUDGETS="fuel=500,depth=6"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Budgets:
    fuel: int = 1000  # rewrite / proof-reduction steps
    depth: int = 8  # congruence join depth, also weak-head exposure budget
    search_depth: int = 8  # cut-free proof search
    sn_fuel: int = 1000  # distinct proofs explored by the SN probe
    nat_bound: int = 8  # truncation of the naturals domain
    max_hyps: int = 3  # context universe hypothesis cap
    model_size: int = 1  # domain size bound for model search
    carrier_cap: int = 4096  # largest generated context algebra


def _from_env(base: Budgets) -> Budgets:
    raw = os.environ.get("DEDMOD_BUDGETS", "").strip()
    if not raw:
        return base
    known = {f.name for f in fields(Budgets)}
    changes = {}
    for item in raw.split(","):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in known:
            raise ValueError(f"DEDMOD_BUDGETS: unknown budget {key!r}")
        changes[key] = int(value)
    return replace(base, **changes)


DEFAULTS = _from_env(Budgets())

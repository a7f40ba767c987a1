"""Enumeration caps, overridable from the GEODETIC_FORGE_CAPS environment variable."""

from __future__ import annotations

import json
import os
from functools import lru_cache
from dataclasses import dataclass, fields, replace

ENV_VAR = "GEODETIC_FORGE_CAPS"


@dataclass(frozen=True)
class Caps:
    hom_assignments: int = 10**7
    circuit_vertices: int = 64
    circuits: int = 10**6
    rewrite_steps: int = 10**5
    census_words: int = 10**7
    # exhaustive strategy sweep in bounded confluence runs only below this many words
    confluence_words: int = 50_000

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"cap {f.name} must be positive")

    def override(self, **kwargs) -> Caps:
        unknown = set(kwargs) - {f.name for f in fields(self)}
        if unknown:
            raise ValueError(f"unknown caps: {sorted(unknown)}")
        return replace(self, **kwargs)


def default_caps() -> Caps:
    """Defaults merged with the JSON fragment in GEODETIC_FORGE_CAPS, if set."""
    return _caps_from(os.environ.get(ENV_VAR) or "")


@lru_cache(maxsize=8)
def _caps_from(raw: str) -> Caps:
    if not raw:
        return Caps()
    return Caps().override(**json.loads(raw))

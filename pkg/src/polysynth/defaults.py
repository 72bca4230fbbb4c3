"""Shipped default catalog, testbed, and the reduced oracle alphabet."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .testbed import InjectionContext, load_contexts
from .tokens import TokenCatalog, load_catalog

# Documented default seed: the shipped configuration and this seed
# reproduce the reference full-coverage run.
DEFAULT_SEED = 1

# Subset of the default catalog large enough to solve every shipped
# context within four moves, small enough for exhaustive search.
REDUCED_TOKEN_IDS = tuple(range(19))


def _read(name: str) -> str:
    return resources.files("polysynth").joinpath(f"data/{name}").read_text("utf-8")


@lru_cache(maxsize=1)
def default_catalog() -> TokenCatalog:
    return load_catalog(_read("default_tokens.txt"))


@lru_cache(maxsize=1)
def default_contexts() -> tuple[InjectionContext, ...]:
    return tuple(load_contexts(_read("default_contexts.txt")))


@lru_cache(maxsize=1)
def reduced_catalog() -> TokenCatalog:
    full = default_catalog()
    keep = set(REDUCED_TOKEN_IDS)
    return TokenCatalog(
        tokens=tuple(t for t in full.tokens if t.id in keep),
        rules=full.rules,
        max_render_length=full.max_render_length,
    )

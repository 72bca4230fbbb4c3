"""Bounded brute-force satisfiability oracle.

Enumerates every rule-respecting token sequence up to a depth bound over
a (small) catalog and records, per context, the first sequence that
executes there. A context with a witness is proven satisfiable; one
without a witness at the bound is merely not proven. Sequences that do
not contain the marker call are skipped, which is sound because the
testbed cannot execute without it. Independent of the search engines: the
only shared code is the testbed itself, which is the quantity under test.
"""

from __future__ import annotations

from .testbed import InjectionContext, evaluate_context, SENTINEL_CALL
from .tokens import Token, TokenCatalog


def find_witnesses(
    contexts: list[InjectionContext],
    catalog: TokenCatalog,
    max_depth: int = 4,
) -> dict[int, tuple[int, ...] | None]:
    """Map context id -> witness token ids (shortest found) or None.

    Breadth-first over sequence length so witnesses are minimal-depth;
    stops early once every context has one.
    """
    remaining = {c.id: c for c in contexts}
    witnesses: dict[int, tuple[int, ...] | None] = {c.id: None for c in contexts}
    level: list[tuple[tuple[Token, ...], str]] = [((), "")]
    for depth in range(max_depth):
        keep_next = depth < max_depth - 1
        nxt: list[tuple[tuple[Token, ...], str]] = []
        for prefix, rendered in level:
            for t in catalog.legal_moves(list(prefix)):
                seq = prefix + (t,)
                text = rendered + t.text
                if keep_next:
                    nxt.append((seq, text))
                if SENTINEL_CALL not in text:
                    continue
                solved = [
                    cid
                    for cid, ctx in remaining.items()
                    if evaluate_context(ctx, text).executed
                ]
                for cid in solved:
                    witnesses[cid] = tuple(tok.id for tok in seq)
                    del remaining[cid]
                if not remaining:
                    return witnesses
        level = nxt
    return witnesses


def satisfiable_ids(
    contexts: list[InjectionContext],
    catalog: TokenCatalog,
    max_depth: int = 4,
) -> list[int]:
    w = find_witnesses(contexts, catalog, max_depth)
    return sorted(cid for cid, seq in w.items() if seq is not None)

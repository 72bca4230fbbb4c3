"""Token-level polyglot minimization.

Shrinks a token sequence to a 1-minimal subsequence with a bit-identical
score vector against the full context list. The search space is pruned
with the single-removal assumption: a token whose lone removal changes
the results is never part of any removal combination tried. Removable
positions are attempted all at once; when that interacts badly, the
removal set is split in halves and finally grown one position at a time.
After each applied removal the shorter polyglot is re-probed, so the
result is 1-minimal by construction.

The pruning assumption can fail on adversarial instances (tokens that are
only jointly removable). `verify_exhaustive` checks small inputs against
the full 2^N search and logs any optimum the pruned search cannot reach;
violations are reported, never silently absorbed.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import replace

from .mcts import Polyglot
from .testbed import Testbed
from .tokens import Token

log = logging.getLogger("polysynth.minimize")

EXHAUSTIVE_LIMIT = 12  # 2^N search is feasible up to this many tokens


def _score(testbed: Testbed, tokens: list[Token]):
    return testbed.evaluate("".join(t.text for t in tokens))


def probe_tokens(polyglot: Polyglot, testbed: Testbed) -> set[int]:
    """Positions whose lone removal leaves the score vector unchanged."""
    tokens = list(polyglot.tokens)
    reference = polyglot.score if polyglot.score is not None else _score(testbed, tokens)
    removable = set()
    for i in range(len(tokens)):
        if _score(testbed, tokens[:i] + tokens[i + 1 :]).bits == reference.bits:
            removable.add(i)
    return removable


def _valid(testbed: Testbed, tokens: list[Token], drop: set[int], reference) -> bool:
    kept = [t for i, t in enumerate(tokens) if i not in drop]
    return _score(testbed, kept).bits == reference.bits


def _max_removal(testbed: Testbed, tokens: list[Token], removable: list[int], reference) -> set[int]:
    """Largest removal set found among probe-removable positions.

    All-at-once first, then binary split, then one-at-a-time growth on
    top of the best valid half.
    """
    candidate = set(removable)
    if _valid(testbed, tokens, candidate, reference):
        return candidate
    base: set[int] = set()
    mid = len(removable) // 2
    for half in (removable[:mid], removable[mid:]):
        if half and _valid(testbed, tokens, set(half), reference):
            base = set(half)
            break
    rest = [i for i in removable if i not in base]
    for i in rest:
        attempt = base | {i}
        if _valid(testbed, tokens, attempt, reference):
            base = attempt
    return base


def minimize(
    polyglot: Polyglot,
    testbed: Testbed,
    verify_exhaustive: bool = False,
) -> Polyglot:
    """Smallest token subsequence with the polyglot's exact score vector."""
    tokens = list(polyglot.tokens)
    reference = polyglot.score if polyglot.score is not None else _score(testbed, tokens)
    while True:
        probe_poly = Polyglot(tokens=tuple(tokens), rendered="".join(t.text for t in tokens), score=reference)
        removable = sorted(probe_tokens(probe_poly, testbed))
        if not removable:
            break
        drop = _max_removal(testbed, tokens, removable, reference)
        if not drop:
            drop = {removable[0]}  # singletons are valid by the probe itself
        tokens = [t for i, t in enumerate(tokens) if i not in drop]

    if verify_exhaustive and len(polyglot.tokens) <= EXHAUSTIVE_LIMIT:
        optimum = exhaustive_minimum(list(polyglot.tokens), testbed, reference)
        if optimum is not None and len(optimum) < len(tokens):
            log.warning(
                "minimization stopped above the exhaustive optimum (%d kept vs %d "
                "optimal) for %r: pruning assumption violated or removal-order "
                "effect; result is still 1-minimal and score-preserving",
                len(tokens),
                len(optimum),
                polyglot.rendered,
            )

    rendered = "".join(t.text for t in tokens)
    return replace(
        polyglot,
        tokens=tuple(tokens),
        rendered=rendered,
        score=reference,
        provenance={**polyglot.provenance, "minimized_from": polyglot.rendered},
    )


def exhaustive_minimum(
    tokens: list[Token], testbed: Testbed, reference=None
) -> list[Token] | None:
    """Globally smallest kept subsequence with the reference score (2^N)."""
    if len(tokens) > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive search limited to {EXHAUSTIVE_LIMIT} tokens")
    if reference is None:
        reference = _score(testbed, tokens)
    for keep in range(len(tokens) + 1):
        for combo in itertools.combinations(range(len(tokens)), keep):
            kept = [tokens[i] for i in combo]
            if _score(testbed, kept).bits == reference.bits:
                return kept
    return None  # unreachable: keeping everything always matches


def pruning_assumption_holds(tokens: list[Token], testbed: Testbed) -> bool:
    """Whether some globally optimal removal uses only probe-removable tokens."""
    if len(tokens) > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive check limited to {EXHAUSTIVE_LIMIT} tokens")
    reference = _score(testbed, tokens)
    poly = Polyglot(tokens=tuple(tokens), rendered="".join(t.text for t in tokens), score=reference)
    removable = probe_tokens(poly, testbed)
    optimum = exhaustive_minimum(tokens, testbed, reference)
    best_len = len(optimum)
    for keep in itertools.combinations(range(len(tokens)), best_len):
        dropped = set(range(len(tokens))) - set(keep)
        if dropped <= removable and _score(testbed, [tokens[i] for i in keep]).bits == reference.bits:
            return True
    return False

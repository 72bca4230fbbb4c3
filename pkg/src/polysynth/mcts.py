"""Monte Carlo tree search over token prefixes.

One polyglot is synthesized by running N select/expand/playout/
backpropagate rounds, committing the best first move, and repeating from
the deeper root until depth D; the best playout seen anywhere is the
result. Instead of a scalar win counter, every node accumulates the full
per-context score list of each playout, so the win statistic can be
re-summed over whichever contexts are still active. A complement loop
then removes solved contexts and searches again until everything is
covered or the try budget runs out.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .setcover import PolyglotSet
from .testbed import ScoreVector, Testbed
from .tokens import Token, TokenCatalog


@dataclass(slots=True)
class GameNode:
    token: Token | None = None  # None at the tree root
    children: list["GameNode"] | None = None  # None until expanded; [] = terminal
    visits: int = 0
    scores: list[int] | None = None  # per active context, allocated on first update
    win_sum: int = 0  # sum(scores) over the run's active contexts

    def win_total(self, active: list[int] | None = None) -> int:
        """Accumulated wins, optionally re-summed over an index subset."""
        if self.scores is None:
            return 0
        if active is None:
            return self.win_sum
        return sum(self.scores[k] for k in active)


@dataclass(frozen=True, slots=True)
class SynthesisConfig:
    depth: int = 30  # D: moves committed from the root
    iterations: int = 400  # N: rounds before a move is chosen
    max_length: int | None = None  # None: use the catalog's render cap
    max_set_tries: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        if self.depth < 1 or self.iterations < 1:
            raise ValueError("depth and iterations must be >= 1")


@dataclass(frozen=True, slots=True)
class Polyglot:
    tokens: tuple[Token, ...]
    rendered: str
    score: ScoreVector | None = None  # against the full context list when fresh
    provenance: dict = field(default_factory=dict, compare=False)

    @property
    def token_ids(self) -> tuple[int, ...]:
        return tuple(t.id for t in self.tokens)


def ucb(w: float, n: int, parent_n: int) -> float:
    """Upper confidence bound w/n + sqrt(2 ln N / n); unvisited wins."""
    if n == 0:
        return math.inf
    return w / n + math.sqrt(2.0 * math.log(parent_n) / n)


def select(root: GameNode, active_count: int | None = None) -> list[GameNode]:
    """Descend by UCB argmax to an unexpanded or terminal node.

    The exploitation term is the node's win sum normalised by the active
    context count so it stays within [0, 1]. Ties go to the lowest token
    id, which is the child-list order.
    """
    path = [root]
    node = root
    while node.children:
        denom = active_count or 1
        best = None
        best_value = -math.inf
        for child in node.children:
            value = ucb(child.win_sum / denom, child.visits, node.visits)
            if value > best_value:
                best, best_value = child, value
        node = best
        path.append(node)
        if node.visits == 0:
            break
    return path


def expand(leaf: GameNode, catalog: TokenCatalog, prefix: list[Token]) -> None:
    """Create the leaf's children, one per legal move; no-op if expanded."""
    if leaf.children is not None:
        return
    leaf.children = [GameNode(token=t) for t in catalog.legal_moves(prefix)]


def playout(
    prefix: list[Token], catalog: TokenCatalog, rng: random.Random
) -> tuple[list[Token], str]:
    """Append uniformly random legal moves until the prefix is terminal."""
    tokens = list(prefix)
    length = sum(len(t.text) for t in tokens)
    budget = catalog.max_render_length - length
    while True:
        if tokens:
            candidates = catalog._successors[tokens[-1].id]
            if catalog._max_successor_len[tokens[-1].id] > budget:
                candidates = [t for t in candidates if len(t.text) <= budget]
        else:
            candidates = [t for t in catalog.tokens if len(t.text) <= budget]
        if not candidates:
            break
        t = rng.choice(candidates)
        tokens.append(t)
        budget -= len(t.text)
    return tokens, "".join(t.text for t in tokens)


def backpropagate(path: list[GameNode], scores: ScoreVector) -> None:
    """Add the playout's score list and one visit to every node on the path."""
    bits = scores.bits
    for node in path:
        node.visits += 1
        node.win_sum += scores.count
        if node.scores is None:
            node.scores = list(bits)
        else:
            s = node.scores
            for k, b in enumerate(bits):
                s[k] += b


def choose_best(root: GameNode) -> GameNode | None:
    """Child to commit: highest mean win, then more visits, then lowest id."""
    if not root.children:
        return None
    visited = [c for c in root.children if c.visits > 0]
    if not visited:
        return root.children[0]
    return max(visited, key=lambda c: (c.win_sum / c.visits, c.visits, -c.token.id))


def synthesize_polyglot(
    config: SynthesisConfig,
    catalog: TokenCatalog,
    testbed: Testbed,
    active_ids: list[int],
    rng: random.Random,
    budget=None,
) -> Polyglot:
    """Generate one polyglot (Algorithm: D rounds of N-iteration search).

    Returns the highest-scoring playout observed anywhere in the search
    (ties: earliest). `budget`, when given, is charged one call per
    playout evaluation and stops the search cleanly when exhausted.

    The root only advances to a committed move once that move carries a
    win signal; with an all-zero root there is no information to commit
    on, and an arbitrary commitment would cut off every payload shape
    not starting with it (fatal for contexts that require a specific
    first token). Until a signal appears the search keeps widening the
    same root, which degrades gracefully into untargeted sampling.
    """
    if not active_ids:
        raise ValueError("no active contexts to synthesize against")
    if config.max_length is not None and config.max_length != catalog.max_render_length:
        raise ValueError(
            f"config max_length {config.max_length} != catalog "
            f"max-render-length {catalog.max_render_length}"
        )
    root = GameNode()
    committed: list[Token] = []
    best: tuple[list[Token], str] | None = None
    best_score = 0
    n_active = len(active_ids)

    for _ in range(config.depth):
        for _ in range(config.iterations):
            if budget is not None and budget.remaining <= 0:
                break
            path = select(root, n_active)
            leaf = path[-1]
            prefix = committed + [n.token for n in path[1:]]
            expand(leaf, catalog, prefix)
            tokens, rendered = playout(prefix, catalog, rng)
            if budget is not None:
                budget.charge()
            scores = testbed.evaluate_subset(rendered, active_ids)
            backpropagate(path, scores)
            if best is None or scores.count > best_score:
                best = (tokens, rendered)
                best_score = scores.count
        nxt = choose_best(root)
        if nxt is None:
            break  # terminal root: nothing left to commit
        if nxt.win_sum > 0:
            committed.append(nxt.token)
            root = nxt
        if budget is not None and budget.remaining <= 0:
            break

    if best is None:  # budget exhausted before the first playout
        best = (committed, "".join(t.text for t in committed))
    return Polyglot(tokens=tuple(best[0]), rendered=best[1])


def synthesize_set(
    config: SynthesisConfig,
    catalog: TokenCatalog,
    testbed: Testbed,
    rng: random.Random,
    budget_per_try=None,
    corpus: list[Polyglot] | None = None,
) -> PolyglotSet:
    """Complement loop: search, deactivate solved contexts, repeat.

    Stops when every context is covered or max_set_tries is reached;
    polyglots that solve nothing still consume a try. Every generated
    polyglot (kept or not) is appended to `corpus` when given. A
    budget, when given, caps the testbed calls of each try.
    """
    active = list(range(len(testbed.contexts)))
    members: list[Polyglot] = []
    combined = ScoreVector.zeros(len(testbed.contexts))
    tries = 0
    while active and tries < config.max_set_tries:
        budget = budget_per_try() if callable(budget_per_try) else budget_per_try
        poly = synthesize_polyglot(config, catalog, testbed, active, rng, budget=budget)
        full = testbed.evaluate(poly.rendered)
        poly = replace(
            poly,
            score=full,
            provenance={"generator": "mcts", "seed": config.rng_seed, "calls": testbed.calls},
        )
        if corpus is not None:
            corpus.append(poly)
        tries += 1
        solved = [i for i in active if full.bits[i]]
        if solved:
            members.append(poly)
            combined = combined | full
            active = [i for i in active if not full.bits[i]]
    return PolyglotSet(members=tuple(members), combined=combined)

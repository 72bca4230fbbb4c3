"""Baseline polyglot generators under a shared evaluation budget.

Three alternatives to tree search: uniformly random rollouts, greedy
token-by-token probing, and tabular Q-learning with epsilon-greedy
exploration and decaying exploration probability. All consume testbed
calls through the same budget counter so comparisons are call-for-call
fair, and all reward on the count of solved active contexts.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, replace

from .mcts import Polyglot, SynthesisConfig, playout, synthesize_polyglot
from .setcover import PolyglotSet
from .testbed import InjectionContext, ScoreVector, Testbed
from .tokens import Token, TokenCatalog

ALGORITHMS = ("mcts", "random", "greedy", "qlearning")


class BudgetExhausted(RuntimeError):
    pass


@dataclass(slots=True)
class EvalBudget:
    limit: int = 12000
    used: int = 0

    def __post_init__(self):
        if self.limit < 0:
            raise ValueError("budget limit must be >= 0")

    @property
    def remaining(self) -> int:
        return self.limit - self.used

    def charge(self) -> None:
        if self.used >= self.limit:
            raise BudgetExhausted(f"evaluation budget of {self.limit} exhausted")
        self.used += 1


@dataclass(frozen=True, slots=True)
class QLearningConfig:
    alpha: float = 0.1
    gamma: float = 0.99
    p_init: float = 1.0
    p_min: float = 0.01
    decay: float = 0.95

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if not 0 <= self.gamma <= 1:
            raise ValueError("gamma must be in [0, 1]")
        if not 0 <= self.p_min <= self.p_init <= 1:
            raise ValueError("need 0 <= p_min <= p_init <= 1")
        if not 0 < self.decay <= 1:
            raise ValueError("decay must be in (0, 1]")


class QTable:
    """State-action values keyed by exact token-id prefixes; 0 when unseen."""

    def __init__(self):
        self._q: dict[tuple[tuple[int, ...], int], float] = {}

    def get(self, state: tuple[int, ...], action: int) -> float:
        return self._q.get((state, action), 0.0)

    def update(self, state, action, reward, max_next, cfg: QLearningConfig) -> float:
        q = self.get(state, action)
        q2 = q + cfg.alpha * (reward + cfg.gamma * max_next - q)
        if not (q2 == q2 and abs(q2) != float("inf")):
            raise ValueError("non-finite q-value")
        self._q[(state, action)] = q2
        return q2

    def __len__(self) -> int:
        return len(self._q)


def _require_budget(budget: EvalBudget) -> None:
    if budget.remaining <= 0:
        raise BudgetExhausted("budget exhausted before any evaluation")


def random_generate(
    catalog: TokenCatalog,
    testbed: Testbed,
    active_ids: list[int],
    budget: EvalBudget,
    rng: random.Random,
) -> Polyglot:
    """Random rollouts to terminal length; best-scoring kept (ties: earliest)."""
    _require_budget(budget)
    best: tuple[list[Token], str, ScoreVector] | None = None
    best_count = -1
    while budget.remaining > 0:
        tokens, rendered = playout([], catalog, rng)
        budget.charge()
        scores = testbed.evaluate_subset(rendered, active_ids)
        if scores.count > best_count:
            best = (tokens, rendered, scores)
            best_count = scores.count
    return Polyglot(tokens=tuple(best[0]), rendered=best[1])


def greedy_generate(
    catalog: TokenCatalog,
    testbed: Testbed,
    active_ids: list[int],
    budget: EvalBudget,
    rng: random.Random,
) -> Polyglot:
    """Append the best-probing token each step; evaluates unfinished prefixes.

    Every probe consumes budget; equal-best probes are chosen uniformly at
    random. On budget exhaustion mid-step the best prefix evaluated so far
    is returned.
    """
    _require_budget(budget)
    prefix: list[Token] = []
    rendered = ""
    best: tuple[list[Token], str] | None = None
    best_count = -1
    while True:
        legal = catalog.legal_moves(prefix)
        if not legal:
            break
        probed: list[tuple[Token, str, int]] = []
        exhausted = False
        for t in legal:
            if budget.remaining <= 0:
                exhausted = True
                break
            candidate = rendered + t.text
            budget.charge()
            scores = testbed.evaluate_subset(candidate, active_ids)
            probed.append((t, candidate, scores.count))
            if scores.count > best_count:
                best = (prefix + [t], candidate)
                best_count = scores.count
        if not probed:
            break
        top = max(c for _, _, c in probed)
        choice = rng.choice([p for p in probed if p[2] == top])
        prefix.append(choice[0])
        rendered = choice[1]
        if exhausted:
            break
    if best is None:
        raise BudgetExhausted("budget exhausted before any evaluation")
    return Polyglot(tokens=tuple(best[0]), rendered=best[1])


def qlearning_generate(
    catalog: TokenCatalog,
    testbed: Testbed,
    active_ids: list[int],
    budget: EvalBudget,
    qcfg: QLearningConfig,
    rng: random.Random,
    qtable: QTable | None = None,
) -> Polyglot:
    """Tabular Q-learning episodes over token sequences.

    Each step evaluates the extended prefix (one budgeted call), applies
    the one-step Q update, and decays the exploration probability with a
    floor. Episodes restart from the empty sequence until the budget is
    exhausted (a hard stop, mid-episode if need be); the best-rewarded
    state ever visited is returned.
    """
    _require_budget(budget)
    q = qtable if qtable is not None else QTable()
    p = qcfg.p_init
    best: tuple[list[Token], str] | None = None
    best_reward = 0
    first: tuple[list[Token], str] | None = None
    while budget.remaining > 0:
        prefix: list[Token] = []
        rendered = ""
        state: tuple[int, ...] = ()
        legal = catalog.legal_moves(prefix)
        if not legal:
            break
        while legal:
            if budget.remaining <= 0:
                break  # hard stop mid-episode
            if rng.random() < p:
                action = rng.choice(legal)
            else:
                action = max(legal, key=lambda t: (q.get(state, t.id), -t.id))
            prefix.append(action)
            rendered += action.text
            next_state = state + (action.id,)
            budget.charge()
            reward = testbed.evaluate_subset(rendered, active_ids).count
            next_legal = catalog.legal_moves(prefix)
            max_next = max((q.get(next_state, t.id) for t in next_legal), default=0.0)
            q.update(state, action.id, reward, max_next, qcfg)
            if first is None:
                first = (list(prefix), rendered)
            if reward > best_reward:
                best = (list(prefix), rendered)
                best_reward = reward
            p = max(qcfg.decay * p, qcfg.p_min)
            state = next_state
            legal = next_legal
    if best is None:
        best = first
    return Polyglot(tokens=tuple(best[0]), rendered=best[1])


def prune_set(members: list[Polyglot]) -> list[Polyglot]:
    """Drop members whose removal keeps combined coverage intact."""
    kept = list(members)
    changed = True
    while changed:
        changed = False
        for i, m in enumerate(kept):
            others = kept[:i] + kept[i + 1 :]
            if not others:
                if m.score.count == 0:
                    kept = []
                    changed = True
                break
            union = others[0].score
            for p in others[1:]:
                union = union | p.score
            if (union | m.score).bits == union.bits:
                kept = others
                changed = True
                break
    return kept


def generate_set(
    algorithm: str,
    catalog: TokenCatalog,
    contexts: list[InjectionContext],
    seed: int,
    budget_limit: int = 12000,
    max_polyglots: int = 10,
    synthesis: SynthesisConfig | None = None,
    qcfg: QLearningConfig | None = None,
    corpus: list[Polyglot] | None = None,
) -> tuple[list[Polyglot], Testbed]:
    """Run one complement-style set loop with a fresh budget per iteration."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    testbed = Testbed(list(contexts))
    rng = random.Random(seed)
    qcfg = qcfg or QLearningConfig()
    synthesis = synthesis or SynthesisConfig()
    active = list(range(len(testbed.contexts)))
    members: list[Polyglot] = []
    for _ in range(max_polyglots):
        if not active:
            break
        budget = EvalBudget(limit=budget_limit)
        try:
            if algorithm == "mcts":
                poly = synthesize_polyglot(
                    synthesis, catalog, testbed, active, rng, budget=budget
                )
            elif algorithm == "random":
                poly = random_generate(catalog, testbed, active, budget, rng)
            elif algorithm == "greedy":
                poly = greedy_generate(catalog, testbed, active, budget, rng)
            else:
                poly = qlearning_generate(catalog, testbed, active, budget, qcfg, rng)
        except BudgetExhausted:
            break
        full = testbed.evaluate(poly.rendered)
        poly = replace(
            poly,
            score=full,
            provenance={"generator": algorithm, "seed": seed, "calls": budget.used},
        )
        if corpus is not None:
            corpus.append(poly)
        solved = [i for i in active if full.bits[i]]
        if solved:
            members.append(poly)
            active = [i for i in active if not full.bits[i]]
    return members, testbed


@dataclass(frozen=True, slots=True)
class ComparisonRow:
    algorithm: str
    seed: int
    coverage: int
    set_size: int
    testbed_calls: int
    wall_ms: int


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    quartiles: dict  # (algorithm, metric) -> (min, q1, median, q3, max)
    records: tuple = ()  # per generated polyglot, shared RunRecord schema


def _quartiles(values: list[float]) -> tuple[float, float, float, float, float]:
    import statistics

    vs = sorted(values)
    if len(vs) == 1:
        v = vs[0]
        return (v, v, v, v, v)
    q1, med, q3 = statistics.quantiles(vs, n=4, method="inclusive")
    return (vs[0], q1, med, q3, vs[-1])


def _one_comparison_run(args):
    from .records import RunRecord, make_run_id

    algorithm, seed, catalog, contexts, budget_limit, max_polyglots, synthesis, qcfg = args
    t0 = time.perf_counter()
    corpus: list[Polyglot] = []
    members, testbed = generate_set(
        algorithm,
        catalog,
        contexts,
        seed,
        budget_limit=budget_limit,
        max_polyglots=max_polyglots,
        synthesis=synthesis,
        qcfg=qcfg,
        corpus=corpus,
    )
    pruned = prune_set(members)
    coverage = 0
    if pruned:
        union = pruned[0].score
        for p in pruned[1:]:
            union = union | p.score
        coverage = union.count
    wall_ms = int((time.perf_counter() - t0) * 1000)
    run_id = make_run_id(algorithm, seed, str(budget_limit), str(max_polyglots))
    records = tuple(
        RunRecord(
            run_id=run_id,
            generator=algorithm,
            seed=seed,
            token_ids=p.token_ids,
            rendered=p.rendered,
            score_bits=p.score.to01(),
            testbed_calls=p.provenance.get("calls", 0),
        )
        for p in corpus
    )
    row = ComparisonRow(algorithm, seed, coverage, len(pruned), testbed.calls, wall_ms)
    return row, records


def compare_generators(
    catalog: TokenCatalog,
    contexts: list[InjectionContext],
    seeds: list[int],
    budget_limit: int = 12000,
    max_polyglots: int = 10,
    synthesis: SynthesisConfig | None = None,
    qcfg: QLearningConfig | None = None,
    parallel: bool = False,
) -> ComparisonReport:
    """Run every algorithm over every seed and summarise the results."""
    if len(seeds) < 2:
        raise ValueError("comparison needs at least 2 seeds")
    jobs = [
        (alg, seed, catalog, contexts, budget_limit, max_polyglots, synthesis, qcfg)
        for alg in ALGORITHMS
        for seed in seeds
    ]
    if parallel:
        import concurrent.futures
        import os

        workers = min(len(jobs), os.cpu_count() or 1)
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_one_comparison_run, jobs))
    else:
        outcomes = [_one_comparison_run(job) for job in jobs]
    outcomes.sort(key=lambda o: (ALGORITHMS.index(o[0].algorithm), o[0].seed))
    rows = [o[0] for o in outcomes]
    records = tuple(rec for o in outcomes for rec in o[1])
    quartiles = {}
    for alg in ALGORITHMS:
        cov = [r.coverage for r in rows if r.algorithm == alg]
        size = [r.set_size for r in rows if r.algorithm == alg]
        quartiles[(alg, "coverage")] = _quartiles(cov)
        quartiles[(alg, "set_size")] = _quartiles(size)
    return ComparisonReport(rows=tuple(rows), quartiles=quartiles, records=records)

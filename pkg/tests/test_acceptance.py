"""Acceptance suite: every shipped criterion at its stated tolerance.

One test per criterion; each prints a PASS line on success (visible with
`pytest tests/test_acceptance.py -v -s`). The comparison criterion runs
the full shipped configuration (4 algorithms x 10 seeds x 12000-call
budgets) and dominates the runtime.
"""

import logging
import math
import random
import statistics
import time

import mpmath
import pytest

from polysynth.cli import main as cli_main
from polysynth.defaults import DEFAULT_SEED, default_catalog, default_contexts, reduced_catalog
from polysynth.generators import QLearningConfig, QTable, compare_generators
from polysynth.mcts import (
    GameNode,
    Polyglot,
    SynthesisConfig,
    backpropagate,
    expand,
    playout,
    select,
    synthesize_set,
    ucb,
)
from polysynth.minimize import (
    exhaustive_minimum,
    minimize,
    probe_tokens,
    pruning_assumption_holds,
)
from polysynth.oracle import satisfiable_ids
from polysynth.setcover import greedy_cover
from polysynth.testbed import ScoreVector, Testbed, load_contexts, mutually_exclusive
from polysynth.tokens import Token, TokenKind

from test_setcover import brute_force_optimum, make_poly

mpmath.mp.dps = 50

EXCLUSIVE_PAIR = (3, 4)  # location sink vs plain .js assignment


def report(name):
    print(f"ACCEPTANCE {name}: PASS")


@pytest.fixture(scope="module")
def catalog():
    return default_catalog()


@pytest.fixture(scope="module")
def contexts():
    return list(default_contexts())


@pytest.fixture(scope="module")
def full_run(catalog, contexts):
    testbed = Testbed(contexts)
    corpus = []
    cfg = SynthesisConfig(rng_seed=DEFAULT_SEED)
    t0 = time.perf_counter()
    pset = synthesize_set(cfg, catalog, testbed, random.Random(DEFAULT_SEED), corpus=corpus)
    elapsed = time.perf_counter() - t0
    return pset, corpus, testbed, elapsed


@pytest.fixture(scope="module")
def proven_satisfiable(contexts):
    return satisfiable_ids(contexts, reduced_catalog(), max_depth=4)


def test_full_coverage_synthesis(full_run, proven_satisfiable, contexts):
    """Default seed covers every context the bounded oracle proves satisfiable."""
    pset, _corpus, _tb, elapsed = full_run
    cover = greedy_cover(list(pset.members))
    uncovered = [i for i in proven_satisfiable if not cover.combined.bits[i]]
    assert uncovered == [], f"uncovered satisfiable contexts: {uncovered}"
    assert len(proven_satisfiable) == len(contexts)  # the shipped 27 are all solvable
    assert elapsed < 600, f"synthesis took {elapsed:.0f}s, budget is 10 minutes"
    report(f"full-coverage synthesis ({len(cover.members)} polyglots, {elapsed:.0f}s)")


def test_mutual_exclusion_forcing(full_run, contexts):
    """The location-sink/.js-assignment pair stays unsolved by any single polyglot."""
    i, j = EXCLUSIVE_PAIR
    assert mutually_exclusive(contexts, i, j) is True
    pset, corpus, _tb, _ = full_run
    for poly in corpus:
        assert not (poly.score.bits[i] and poly.score.bits[j]), poly.rendered
    assert len(pset.members) >= 2
    report("mutual-exclusion forcing (set size >= 2)")


def test_ucb_unit_suite():
    """Formula matches a 50-digit oracle to 1e-12 over 100+ triples."""
    rng = random.Random(4242)
    checked = 0
    for _ in range(120):
        n = rng.randint(1, 10_000)
        parent = n + rng.randint(0, 10_000)
        w = rng.uniform(0, n)
        want = float(mpmath.mpf(w) / n + mpmath.sqrt(2 * mpmath.log(parent) / n))
        got = ucb(w, n, parent)
        assert math.isclose(got, want, rel_tol=1e-12), (w, n, parent)
        checked += 1
    assert checked >= 100
    assert ucb(0, 0, 1) == math.inf
    assert ucb(123.0, 0, 456) == math.inf
    assert ucb(0, 0, 1) > ucb(1e9, 1, 1)
    report("ucb unit suite (120 triples, 1e-12)")


def test_backpropagation_conservation(catalog):
    """Root visits equal playouts; score entries never exceed visits."""
    src = 'context 0 sink uri-attr\n  <iframe src="{{INJ}}"></iframe>\n'
    for seed in range(10):
        testbed = Testbed(load_contexts(src))
        rng = random.Random(seed)
        root = GameNode()
        playouts = 40
        for _ in range(playouts):
            path = select(root, 1)
            leaf = path[-1]
            prefix = [n.token for n in path[1:]]
            expand(leaf, catalog, prefix)
            tokens, rendered = playout(prefix, catalog, rng)
            scores = testbed.evaluate_subset(rendered, [0])
            backpropagate(path, scores)
        assert root.visits == playouts
        stack = [root]
        while stack:
            node = stack.pop()
            if node.scores is not None:
                assert all(0 <= s <= node.visits for s in node.scores)
            if node.children:
                stack.extend(node.children)
    report("backpropagation conservation (10 seeds)")


def test_qlearning_update_and_floor():
    """Single-update closed forms to 1e-12; exploration floors at 0.01."""
    cfg = QLearningConfig()
    q = QTable()
    got = q.update((), 0, 1.0, 0.0, cfg)
    assert math.isclose(got, 0.1, rel_tol=1e-12)
    rng = random.Random(7)
    for _ in range(50):
        alpha, gamma = rng.uniform(0.01, 1.0), rng.uniform(0.0, 1.0)
        r, maxq, q0 = rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)
        table = QTable()
        table._q[(("s",), 1)] = q0
        c = QLearningConfig(alpha=alpha, gamma=gamma)
        got = table.update(("s",), 1, r, maxq, c)
        want = q0 + alpha * (r + gamma * maxq - q0)
        assert math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-15)
    p = cfg.p_init
    seen_floor_at = None
    for k in range(1, 200):
        p = max(cfg.decay * p, cfg.p_min)
        if p == cfg.p_min and seen_floor_at is None:
            seen_floor_at = k
    assert p == 0.01
    assert seen_floor_at == 90  # 0.95^90 < 0.01 <= 0.95^89
    report("q-learning update and exploration floor")


def test_set_cover_optimality_small_scale():
    """Greedy equals the brute-force optimum or stays in the harmonic bound."""
    rng = random.Random(99)
    violations = 0
    for trial in range(50):
        n_ctx = rng.randint(2, 12)
        n_poly = rng.randint(1, 20)
        corpus = [
            make_poly([rng.randint(0, 1) for _ in range(n_ctx)], f"t{trial}p{i}")
            for i in range(n_poly)
        ]
        greedy_size = len(greedy_cover(corpus))
        opt = brute_force_optimum(corpus)
        d = max((p.score.count for p in corpus), default=0)
        harmonic = sum(1.0 / k for k in range(1, d + 1))
        if not (greedy_size == opt or greedy_size <= harmonic * opt):
            violations += 1
    assert violations == 0
    report("set cover small-scale optimality (50 instances, 0 violations)")


def test_minimizer_soundness(catalog, contexts, caplog):
    """Score-preserving, 1-minimal, optimal under the pruning assumption."""
    testbed = Testbed(contexts)
    rng = random.Random(31337)
    for _ in range(100):
        tokens = []
        while not tokens:
            cand, _ = playout([], catalog, rng)
            tokens = cand[: rng.randint(1, 14)]
        rendered = "".join(t.text for t in tokens)
        poly = Polyglot(tokens=tuple(tokens), rendered=rendered, score=testbed.evaluate(rendered))
        small = minimize(poly, testbed)
        assert testbed.evaluate(small.rendered).bits == poly.score.bits
        assert probe_tokens(small, testbed) == set()
        it = iter(poly.tokens)
        assert all(t in it for t in small.tokens)

    # constructed instances where the pruning assumption provably holds:
    # independently inert tokens around a minimal core
    def tok(i, text):
        kind = TokenKind.PAYLOAD_SENTINEL if text == "xss()" else TokenKind.JS_FRAGMENT
        return Token(i, text, kind)

    js_tb = Testbed(
        load_contexts(
            'context 0 jsvar js-dquote-string\n  <script>\n  var q = "{{INJ}}";\n  search(q);\n  </script>\n'
        )
    )
    for inert in range(0, 8):
        texts = ['"', ";", "xss()"] + [";"] * inert + ["//"]
        tokens = [tok(i, t) for i, t in enumerate(texts)]
        rendered = "".join(texts)
        poly = Polyglot(tokens=tuple(tokens), rendered=rendered, score=js_tb.evaluate(rendered))
        assert pruning_assumption_holds(tokens, js_tb)
        small = minimize(poly, js_tb, verify_exhaustive=True)
        optimum = exhaustive_minimum(tokens, js_tb)
        assert len(small.tokens) == len(optimum)

    # an instance the pruned search cannot finish optimally must be
    # reported through the log, never absorbed silently
    texts = ['";xss();//', '"', ";xss();//"]
    tokens = [tok(i, t) for i, t in enumerate(texts)]
    rendered = "".join(texts)
    poly = Polyglot(tokens=tuple(tokens), rendered=rendered, score=js_tb.evaluate(rendered))
    with caplog.at_level(logging.WARNING, logger="polysynth.minimize"):
        small = minimize(poly, js_tb, verify_exhaustive=True)
    assert len(small.tokens) > len(exhaustive_minimum(tokens, js_tb))
    assert any("optimum" in r.message for r in caplog.records)
    report("minimizer soundness (100 random + constructed instances)")


def test_minimization_reduction_band(full_run, contexts):
    """Report-only: how much the reference run's members shrink. Length-
    capped search leaves plenty of dead weight, so no band is asserted."""
    pset, _corpus, testbed, _ = full_run
    reductions = []
    for poly in pset.members:
        small = minimize(poly, testbed)
        saved = len(poly.rendered) - len(small.rendered)
        reductions.append(100.0 * saved / len(poly.rendered) if poly.rendered else 0.0)
        assert small.score.bits == poly.score.bits
    print(f"ACCEPTANCE-REPORT minimization reductions: {[f'{r:.0f}%' for r in reductions]}")


@pytest.fixture(scope="module")
def comparison(catalog, contexts):
    seeds = [DEFAULT_SEED + k for k in range(10)]
    return compare_generators(catalog, contexts, seeds, budget_limit=12000, max_polyglots=10)


def test_generator_comparison(comparison):
    """MCTS mean coverage beats greedy and q-learning; median set size
    stays at or below random's."""
    rows = comparison.rows
    mean_cov = {
        alg: statistics.mean(r.coverage for r in rows if r.algorithm == alg)
        for alg in ("mcts", "random", "greedy", "qlearning")
    }
    median_size = {
        alg: statistics.median(r.set_size for r in rows if r.algorithm == alg)
        for alg in ("mcts", "random", "greedy", "qlearning")
    }
    assert mean_cov["mcts"] >= mean_cov["greedy"], mean_cov
    assert mean_cov["mcts"] >= mean_cov["qlearning"], mean_cov
    assert median_size["mcts"] <= median_size["random"], median_size
    report(
        "generator comparison (mean coverage "
        + ", ".join(f"{a}={mean_cov[a]:.1f}" for a in mean_cov)
        + f"; median sizes mcts={median_size['mcts']} random={median_size['random']})"
    )


def test_generator_comparison_budget_honesty(comparison):
    """No run exceeds its per-iteration budgets plus one full evaluation
    per generated polyglot."""
    for r in comparison.rows:
        assert r.testbed_calls <= 10 * (12000 + 1)
    report("comparison budget honesty")


def test_determinism_byte_identical_artifacts(tmp_path):
    """A seeded sequential command rerun reproduces artifacts bit-for-bit."""
    args_common = [
        "--seed", str(DEFAULT_SEED), "--depth", "6", "--iterations", "40",
        "--max-set-tries", "6", "--sequential",
    ]
    blobs = []
    for name in ("one", "two"):
        out = tmp_path / name
        rc = cli_main(["synthesize", *args_common, "--out", str(out)])
        assert rc == 0
        blobs.append(
            (out / "corpus.jsonl").read_bytes() + b"\x00" + (out / "set.jsonl").read_bytes()
        )
    assert blobs[0] == blobs[1]
    report("seeded determinism (byte-identical artifacts)")

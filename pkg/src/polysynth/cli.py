"""Command-line surface: synthesize, compare, cover, minimize, evaluate, report.

Every flag can also be set through an environment variable with the
POLYSYNTH_ prefix (e.g. POLYSYNTH_SEED=7). Randomized commands require a
seed or generate one and print it. Exit codes: 0 success, 2 validation
error, 3 coverage failure under --require-full-coverage.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from pathlib import Path

from . import __version__
from .defaults import default_catalog, default_contexts, reduced_catalog
from .generators import QLearningConfig, compare_generators, generate_set, prune_set
from .mcts import Polyglot, SynthesisConfig, synthesize_set
from .minimize import minimize as minimize_polyglot
from .oracle import satisfiable_ids
from .records import (
    RunRecord,
    make_run_id,
    read_records,
    write_comparison_csv,
    write_meta,
    write_records,
)
from .setcover import PolyglotSet, difficulty, greedy_cover, unique_contributions
from .testbed import ContextError, ScoreVector, Testbed, load_contexts
from .tokens import CatalogError, load_catalog

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COVERAGE = 3


def _env_default(name: str, fallback=None):
    return os.environ.get("POLYSYNTH_" + name.upper().replace("-", "_"), fallback)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--catalog", default=_env_default("catalog"), help="token catalog file (default: shipped)")
    parser.add_argument("--contexts", default=_env_default("contexts"), help="context file (default: shipped)")
    parser.add_argument("--seed", type=int, default=_env_default("seed"))
    parser.add_argument("--out", default=_env_default("out", "."), help="output directory")
    parser.add_argument(
        "--sequential",
        action="store_true",
        default=_env_default("sequential", "") not in ("", "0", "false"),
        help="force single-process execution (the determinism reference mode)",
    )


def _load_inputs(args):
    if args.catalog:
        catalog = load_catalog(Path(args.catalog).read_text("utf-8"))
    else:
        catalog = default_catalog()
    if args.contexts:
        contexts = load_contexts(Path(args.contexts).read_text("utf-8"))
    else:
        contexts = list(default_contexts())
    return catalog, contexts


def _resolve_seed(args) -> int:
    if args.seed is None:
        seed = random.SystemRandom().randrange(2**32)
        print(f"seed: {seed} (generated; pass --seed to reproduce)")
        return seed
    return int(args.seed)


def _records_for(polyglots: list[Polyglot], run_id: str, generator: str, seed: int, calls: int) -> list[RunRecord]:
    return [
        RunRecord(
            run_id=run_id,
            generator=generator,
            seed=seed,
            token_ids=p.token_ids,
            rendered=p.rendered,
            score_bits=p.score.to01() if p.score else "",
            testbed_calls=p.provenance.get("calls", calls),
        )
        for p in polyglots
    ]


def cmd_synthesize(args) -> int:
    catalog, contexts = _load_inputs(args)
    seed = _resolve_seed(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SynthesisConfig(
        depth=args.depth,
        iterations=args.iterations,
        max_set_tries=args.max_set_tries,
        rng_seed=seed,
    )
    testbed = Testbed(contexts)
    rng = random.Random(seed)
    corpus: list[Polyglot] = []
    t0 = time.perf_counter()
    pset = synthesize_set(cfg, catalog, testbed, rng, corpus=corpus)
    wall_ms = int((time.perf_counter() - t0) * 1000)
    run_id = make_run_id("mcts", seed, str(cfg), str(len(contexts)))

    recs = _records_for(corpus, run_id, "mcts", seed, testbed.calls)
    write_records(out / "corpus.jsonl", recs)
    cover = greedy_cover(list(pset.members))
    cover_recs = []
    for rank, p in enumerate(cover.members):
        cover_recs.append(
            RunRecord(
                run_id=run_id,
                generator="mcts",
                seed=seed,
                token_ids=p.token_ids,
                rendered=p.rendered,
                score_bits=p.score.to01(),
                testbed_calls=testbed.calls,
                set_rank=rank,
            )
        )
    write_records(out / "set.jsonl", cover_recs)
    write_meta(out / "run.meta.json", {"wall_ms": wall_ms, "version": __version__, "command": "synthesize"})

    print(f"polyglots: {len(cover.members)}  coverage: {cover.coverage}/{len(contexts)}  calls: {testbed.calls}")
    for rank, p in enumerate(cover.members):
        print(f"  [{rank}] {p.score.count:3d} contexts  {p.rendered}")

    if args.require_full_coverage:
        sat = satisfiable_ids(contexts, reduced_catalog() if args.catalog is None else catalog, max_depth=args.oracle_depth)
        missed = [i for i in sat if not cover.combined.bits[i]]
        if missed:
            print(f"uncovered satisfiable contexts: {missed}", file=sys.stderr)
            return EXIT_COVERAGE
    return EXIT_OK


def cmd_compare(args) -> int:
    catalog, contexts = _load_inputs(args)
    seed = _resolve_seed(args)
    seeds = [seed + k for k in range(args.runs)]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = compare_generators(
        catalog,
        contexts,
        seeds,
        budget_limit=args.budget,
        max_polyglots=args.set_size,
        parallel=not args.sequential and (os.cpu_count() or 1) > 1,
    )
    write_comparison_csv(out / "comparison.csv", report.rows)
    write_records(out / "corpus.jsonl", list(report.records))
    print("algorithm,seed,coverage,set_size,testbed_calls,wall_ms")
    for r in report.rows:
        print(f"{r.algorithm},{r.seed},{r.coverage},{r.set_size},{r.testbed_calls},{r.wall_ms}")
    print()
    print("quartiles (min/q1/median/q3/max):")
    for (alg, metric), q in sorted(report.quartiles.items()):
        print(f"  {alg:10s} {metric:9s} " + "/".join(f"{v:g}" for v in q))
    return EXIT_OK


def cmd_cover(args) -> int:
    catalog, contexts = _load_inputs(args)
    recs = read_records(args.corpus)
    polyglots = [
        Polyglot(
            tokens=tuple(catalog.by_id(i) for i in r.token_ids),
            rendered=r.rendered,
            score=ScoreVector.from01(r.score_bits),
        )
        for r in recs
    ]
    pset = greedy_cover(polyglots)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rec_by_rendered = {}
    for r in recs:
        rec_by_rendered.setdefault(r.rendered, r)
    cover_recs = []
    for rank, p in enumerate(pset.members):
        src = rec_by_rendered[p.rendered]
        cover_recs.append(
            RunRecord(
                run_id=src.run_id,
                generator=src.generator,
                seed=src.seed,
                token_ids=p.token_ids,
                rendered=p.rendered,
                score_bits=p.score.to01(),
                testbed_calls=src.testbed_calls,
                set_rank=rank,
            )
        )
    write_records(out / "set.jsonl", cover_recs)
    print(f"selected {len(pset.members)} of {len(polyglots)} covering {pset.coverage} contexts")
    return EXIT_OK


def cmd_minimize(args) -> int:
    catalog, contexts = _load_inputs(args)
    testbed = Testbed(contexts)
    recs = read_records(args.records)
    out_recs = []
    for r in recs:
        poly = Polyglot(
            tokens=tuple(catalog.by_id(i) for i in r.token_ids),
            rendered=r.rendered,
            score=testbed.evaluate(r.rendered),
        )
        small = minimize_polyglot(poly, testbed, verify_exhaustive=args.verify_exhaustive)
        out_recs.append(
            RunRecord(
                run_id=r.run_id,
                generator=r.generator,
                seed=r.seed,
                token_ids=small.token_ids,
                rendered=small.rendered,
                score_bits=small.score.to01(),
                testbed_calls=testbed.calls,
                minimized_from=poly.rendered,
            )
        )
        saved = len(poly.rendered) - len(small.rendered)
        pct = 100.0 * saved / len(poly.rendered) if poly.rendered else 0.0
        print(f"{len(poly.rendered):4d} -> {len(small.rendered):4d} chars (-{pct:.0f}%)  {small.rendered}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records(out / "minimized.jsonl", out_recs)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from .testbed import evaluate_context

    _, contexts = _load_inputs(args)
    testbed = Testbed(contexts)
    if args.payload is not None:
        payloads = [args.payload]
    else:
        payloads = Path(args.payloads_file).read_text("utf-8").splitlines()
    if args.csv:
        print("context_id,payload_index,executed")
    for idx, payload in enumerate(payloads):
        sv = testbed.evaluate(payload)
        if args.csv:
            for cid, bit in enumerate(sv.bits):
                print(f"{cid},{idx},{bit}")
        else:
            print(f"{sv.count}/{len(contexts)} {sv.to01()}  {payload}")
        if args.trace:
            for ctx in contexts:
                outcome = evaluate_context(ctx, payload, trace=True)
                print(f"# context {ctx.id} ({ctx.name}): {outcome.reason.value}")
                for line in outcome.trace or ():
                    print(f"\t{line}")
    return EXIT_OK


def _shade(ratio: float) -> str:
    # difficulty buckets, hardest first
    if ratio <= 0.1:
        return "####"
    if ratio <= 0.3:
        return "###."
    if ratio <= 0.6:
        return "##.."
    if ratio <= 0.9:
        return "#..."
    return "...."


def cmd_report(args) -> int:
    catalog, contexts = _load_inputs(args)
    corpus_recs = read_records(args.corpus)
    set_recs = read_records(args.set) if args.set else []
    corpus = [
        Polyglot(tokens=(), rendered=r.rendered, score=ScoreVector.from01(r.score_bits))
        for r in corpus_recs
    ]
    members = [
        Polyglot(tokens=(), rendered=r.rendered, score=ScoreVector.from01(r.score_bits))
        for r in sorted(set_recs, key=lambda r: r.set_rank or 0)
    ]
    n = len(contexts)
    prof = difficulty(corpus) if corpus else None
    pset = PolyglotSet(
        members=tuple(members),
        combined=(
            ScoreVector.zeros(n)
            if not members
            else ScoreVector(tuple(max(p.score.bits[k] for p in members) for k in range(n)))
        ),
    )
    uniq = unique_contributions(pset)

    width = 3
    header = "ctx  " + "".join(f"{k:>{width}}" for k in range(n))
    print(header)
    if prof is not None:
        print("D    " + "".join(f"{_shade(prof.ratios[k])[:2]:>{width}}" for k in range(n)))
    for m_idx, p in enumerate(members):
        cells = []
        for k in range(n):
            if p.score.bits[k]:
                cells.append("◆" if k in uniq[m_idx] else "■")
            else:
                cells.append("·")
        print(f"{m_idx:<4d} " + "".join(f"{c:>{width}}" for c in cells))
    if args.baseline is not None:
        testbed = Testbed(contexts)
        sv = testbed.evaluate(args.baseline)
        cells = ["■" if sv.bits[k] else "·" for k in range(n)]
        print("*    " + "".join(f"{c:>{width}}" for c in cells))
    if args.csv_out:
        lines = ["row," + ",".join(str(k) for k in range(n))]
        if prof is not None:
            lines.append("difficulty," + ",".join(f"{prof.ratios[k]:.3f}" for k in range(n)))
        for m_idx, p in enumerate(members):
            cells = [
                ("unique" if k in uniq[m_idx] else "solved") if p.score.bits[k] else ""
                for k in range(n)
            ]
            lines.append(f"polyglot{m_idx}," + ",".join(cells))
        Path(args.csv_out).write_text("\n".join(lines) + "\n", "utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polysynth", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize", help="search for a covering polyglot set")
    _add_common(p)
    p.add_argument("--depth", type=int, default=int(_env_default("depth", 30)))
    p.add_argument("--iterations", type=int, default=int(_env_default("iterations", 400)))
    p.add_argument("--max-set-tries", type=int, default=int(_env_default("max_set_tries", 20)))
    p.add_argument("--require-full-coverage", action="store_true")
    p.add_argument("--oracle-depth", type=int, default=4)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("compare", help="compare mcts/random/greedy/qlearning")
    _add_common(p)
    p.add_argument("--runs", type=int, default=int(_env_default("runs", 10)), help="seeds per algorithm")
    p.add_argument("--budget", type=int, default=int(_env_default("budget", 12000)))
    p.add_argument("--set-size", type=int, default=int(_env_default("set_size", 10)))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("cover", help="greedy min-set cover over a corpus record stream")
    _add_common(p)
    p.add_argument("corpus", help="corpus .jsonl")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("minimize", help="token-minimize recorded polyglots")
    _add_common(p)
    p.add_argument("records", help="record stream .jsonl")
    p.add_argument("--verify-exhaustive", action="store_true")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("evaluate", help="score a payload against the testbed")
    _add_common(p)
    p.add_argument("payload", nargs="?", default=None)
    p.add_argument("--payloads-file", default=None)
    p.add_argument("--csv", action="store_true", help="emit context_id,payload_index,executed")
    p.add_argument("--trace", action="store_true", help="dump simulator state transitions")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="coverage matrix with difficulty shading")
    _add_common(p)
    p.add_argument("corpus", help="corpus .jsonl")
    p.add_argument("--set", default=None, help="cover set .jsonl")
    p.add_argument("--baseline", default=None, help="payload string for a baseline row")
    p.add_argument("--csv-out", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "evaluate" and args.payload is None and args.payloads_file is None:
        parser.error("evaluate needs a payload or --payloads-file")
    try:
        return args.func(args)
    except (CatalogError, ContextError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

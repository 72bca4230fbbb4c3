import itertools
import math
import random

import pytest

from polysynth.mcts import Polyglot
from polysynth.setcover import (
    DifficultyProfile,
    PolyglotSet,
    difficulty,
    greedy_cover,
    unique_contributions,
)
from polysynth.testbed import ScoreVector


def make_poly(bits, rendered):
    return Polyglot(tokens=(), rendered=rendered, score=ScoreVector(tuple(bits)))


def brute_force_optimum(corpus):
    """Smallest subset with the same combined coverage as the whole corpus."""
    n = len(corpus[0].score)
    full = [0] * n
    for p in corpus:
        for k in range(n):
            full[k] |= p.score.bits[k]
    for size in range(len(corpus) + 1):
        for combo in itertools.combinations(corpus, size):
            covered = [0] * n
            for p in combo:
                for k in range(n):
                    covered[k] |= p.score.bits[k]
            if covered == full:
                return size
    return len(corpus)


class TestGreedyCover:
    def test_three_polyglot_example(self):
        corpus = [
            make_poly((1, 1, 0), "A"),
            make_poly((0, 1, 1), "B"),
            make_poly((1, 0, 0), "C"),
        ]
        assert brute_force_optimum(corpus) == 2
        pset = greedy_cover(corpus)
        assert [p.rendered for p in pset.members] == ["A", "B"]
        assert pset.combined.bits == (1, 1, 1)

    def test_all_zero_corpus_gives_empty_set(self):
        assert len(greedy_cover([make_poly((0, 0, 0), "z")])) == 0

    def test_single_covering_polyglot(self):
        corpus = [make_poly((1, 1), "all"), make_poly((1, 0), "half")]
        pset = greedy_cover(corpus)
        assert [p.rendered for p in pset.members] == ["all"]

    def test_empty_corpus(self):
        pset = greedy_cover([])
        assert len(pset) == 0 and pset.coverage == 0

    def test_tie_breaks_shorter_rendered_then_earlier(self):
        corpus = [
            make_poly((1, 1, 0), "longer"),
            make_poly((0, 1, 1), "ab"),
            make_poly((1, 0, 1), "xy"),
        ]
        pset = greedy_cover(corpus)
        assert pset.members[0].rendered == "ab"
        corpus = [make_poly((1, 0), "aa"), make_poly((0, 1), "bb"), make_poly((1, 0), "cc")]
        pset = greedy_cover(corpus)
        assert {p.rendered for p in pset.members} == {"aa", "bb"}

    def test_duplicates_collapsed_before_cover(self):
        corpus = [make_poly((1, 0), "same"), make_poly((1, 0), "same"), make_poly((0, 1), "o")]
        pset = greedy_cover(corpus)
        assert len(pset.members) == 2

    def test_mismatched_score_lengths_rejected(self):
        with pytest.raises(ValueError):
            greedy_cover([make_poly((1,), "a"), make_poly((1, 0), "b")])

    def test_idempotence(self):
        rng = random.Random(5)
        corpus = [
            make_poly([rng.randint(0, 1) for _ in range(8)], f"p{i}")
            for i in range(15)
        ]
        once = greedy_cover(corpus)
        twice = greedy_cover(list(once.members))
        assert [p.rendered for p in twice.members] == [p.rendered for p in once.members]

    def test_coverage_preservation(self):
        rng = random.Random(9)
        corpus = [
            make_poly([rng.randint(0, 1) for _ in range(10)], f"p{i}")
            for i in range(20)
        ]
        full = ScoreVector.zeros(10)
        for p in corpus:
            full = full | p.score
        assert greedy_cover(corpus).combined.bits == full.bits

    def test_harmonic_bound_on_random_instances(self):
        # classical guarantee: |greedy| <= H(d) * |optimum| with d the
        # largest single-polyglot coverage
        rng = random.Random(1234)
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
            assert greedy_size == opt or greedy_size <= math.ceil(harmonic * opt)


class TestDifficulty:
    def test_extremes_and_fraction(self):
        corpus = [
            make_poly((1, 0, 1), "a"),
            make_poly((1, 0, 1), "b"),
            make_poly((1, 0, 0), "c"),
            make_poly((1, 0, 1), "d"),
        ]
        prof = difficulty(corpus)
        assert prof.ratios == (1.0, 0.0, 0.75)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            difficulty([])


class TestUniqueContributions:
    def test_singleton_owns_everything_it_solves(self):
        pset = greedy_cover([make_poly((1, 0, 1), "only")])
        assert unique_contributions(pset) == [[0, 2]]

    def test_identical_members_have_no_uniques(self):
        pset = PolyglotSet(
            members=(make_poly((1, 1), "a"), make_poly((1, 1), "b")),
            combined=ScoreVector((1, 1)),
        )
        assert unique_contributions(pset) == [[], []]

    def test_three_member_enumeration(self):
        members = (
            make_poly((1, 1, 0, 0), "a"),
            make_poly((0, 1, 1, 0), "b"),
            make_poly((0, 0, 1, 1), "c"),
        )
        pset = PolyglotSet(members=members, combined=ScoreVector((1, 1, 1, 1)))
        assert unique_contributions(pset) == [[0], [], [3]]

    def test_empty_set(self):
        assert unique_contributions(PolyglotSet((), ScoreVector.zeros(0))) == []

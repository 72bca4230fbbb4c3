"""Greedy min-set cover over scored polyglots, plus coverage statistics.

Works on any object carrying `rendered` (str) and `score` (ScoreVector),
so it has no dependency on how the corpus was generated. Identical
rendered strings are collapsed before covering; ties between equal-gain
candidates prefer the shorter rendered string, then the earlier corpus
position.
"""

from __future__ import annotations

from dataclasses import dataclass

from .testbed import ScoreVector


@dataclass(frozen=True, slots=True)
class PolyglotSet:
    members: tuple
    combined: ScoreVector

    def __len__(self) -> int:
        return len(self.members)

    @property
    def coverage(self) -> int:
        return self.combined.count


@dataclass(frozen=True, slots=True)
class DifficultyProfile:
    ratios: tuple[float, ...]  # per context: solving fraction of the corpus

    def __len__(self) -> int:
        return len(self.ratios)


def _dedup(corpus: list) -> list:
    seen = set()
    out = []
    for p in corpus:
        if p.rendered not in seen:
            seen.add(p.rendered)
            out.append(p)
    return out


def greedy_cover(corpus: list) -> PolyglotSet:
    """Select a small subset covering everything the corpus covers."""
    if not corpus:
        return PolyglotSet(members=(), combined=ScoreVector.zeros(0))
    candidates = _dedup(corpus)
    n = len(candidates[0].score)
    for p in candidates:
        if len(p.score) != n:
            raise ValueError("corpus scores computed against different context lists")
    covered = [0] * n
    members = []
    remaining = list(enumerate(candidates))
    while True:
        best = None
        best_key = (0, 0, 0)
        for idx, p in remaining:
            gain = sum(1 for k in range(n) if p.score.bits[k] and not covered[k])
            key = (gain, -len(p.rendered), -idx)
            if gain > 0 and key > best_key:
                best, best_key = (idx, p), key
        if best is None:
            break
        members.append(best[1])
        for k in range(n):
            covered[k] |= best[1].score.bits[k]
        remaining = [(i, p) for i, p in remaining if i != best[0]]
    return PolyglotSet(members=tuple(members), combined=ScoreVector(tuple(covered)))


def difficulty(corpus: list) -> DifficultyProfile:
    """Per-context solve ratio over the whole corpus (duplicates included)."""
    if not corpus:
        raise ValueError("difficulty of an empty corpus is undefined")
    n = len(corpus[0].score)
    counts = [0] * n
    for p in corpus:
        for k in range(n):
            counts[k] += p.score.bits[k]
    total = len(corpus)
    return DifficultyProfile(tuple(c / total for c in counts))


def unique_contributions(pset: PolyglotSet) -> list[list[int]]:
    """Per member: context ids solved by that member and nobody else."""
    members = pset.members
    if not members:
        return []
    n = len(members[0].score)
    solver_count = [0] * n
    for p in members:
        for k in range(n):
            solver_count[k] += p.score.bits[k]
    out = []
    for p in members:
        out.append([k for k in range(n) if p.score.bits[k] and solver_count[k] == 1])
    return out

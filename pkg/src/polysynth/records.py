"""Shared run-artifact record stream.

One self-describing JSON object per line, one record per generated
polyglot, written append-only. Records carry only deterministic fields so
that a seeded sequential rerun produces byte-identical files; volatile
measurements (wall time, library versions) go into a `.meta.json` sidecar
next to the stream. Cover output adds `set_rank`, minimization adds
`minimized_from`.

`testbed_calls` holds the per-iteration budget spend for budgeted
generator runs and the cumulative evaluation counter at record time for
unbudgeted synthesis runs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path


@dataclass(frozen=True, slots=True)
class RunRecord:
    run_id: str
    generator: str
    seed: int
    token_ids: tuple[int, ...]
    rendered: str
    score_bits: str
    testbed_calls: int
    set_rank: int | None = None
    minimized_from: str | None = None

    def to_json(self) -> str:
        d = asdict(self)
        d["token_ids"] = list(self.token_ids)
        if self.set_rank is None:
            del d["set_rank"]
        if self.minimized_from is None:
            del d["minimized_from"]
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        d = json.loads(line)
        return cls(
            run_id=d["run_id"],
            generator=d["generator"],
            seed=d["seed"],
            token_ids=tuple(d["token_ids"]),
            rendered=d["rendered"],
            score_bits=d["score_bits"],
            testbed_calls=d["testbed_calls"],
            set_rank=d.get("set_rank"),
            minimized_from=d.get("minimized_from"),
        )


def make_run_id(generator: str, seed: int, *parts: str) -> str:
    h = hashlib.sha256()
    h.update(generator.encode())
    h.update(str(seed).encode())
    for p in parts:
        h.update(b"\x00")
        h.update(p.encode())
    return h.hexdigest()[:12]


def write_records(path: str | Path, records: list[RunRecord]) -> None:
    Path(path).write_text("".join(r.to_json() + "\n" for r in records), "utf-8")


def append_record(path: str | Path, record: RunRecord) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(record.to_json() + "\n")


def read_records(path: str | Path) -> list[RunRecord]:
    out = []
    for line in Path(path).read_text("utf-8").splitlines():
        if line.strip():
            out.append(RunRecord.from_json(line))
    return out


def write_meta(path: str | Path, meta: dict) -> None:
    Path(path).write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", "utf-8")


COMPARISON_HEADER = "algorithm,seed,coverage,set_size,testbed_calls,wall_ms"


def write_comparison_csv(path: str | Path, rows) -> None:
    lines = [COMPARISON_HEADER]
    for r in rows:
        lines.append(
            f"{r.algorithm},{r.seed},{r.coverage},{r.set_size},{r.testbed_calls},{r.wall_ms}"
        )
    Path(path).write_text("\n".join(lines) + "\n", "utf-8")

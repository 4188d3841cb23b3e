"""Expert judgment collection: task sets, a durable judgment store, and
inter-annotator agreement.

Pairs are canonicalized (lexicographic id order) so every expert judges
identical objects. Judgments persist in an append-only line-delimited log
that is replayed at startup; resubmitting the same verdict is idempotent,
while a changed verdict overwrites the effective state and leaves the old
entry visible in the audit trail.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import IO

from .fusion import ScoreTable, top_candidates
from .ml import VERDICT_LABELS

VERDICTS = ("similar", "not_similar")


def canonical_pair(main_id: str, secondary_id: str) -> tuple[str, str]:
    if main_id == secondary_id:
        raise ValueError(f"pair must have distinct ids, got {main_id!r} twice")
    return (main_id, secondary_id) if main_id < secondary_id else (secondary_id, main_id)


@dataclass(frozen=True)
class TaskSet:
    """Deduplicated canonical pairs, one shared order for every expert."""

    mains: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...]
    seed: int
    fused_scores: dict[tuple[str, str], float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pairs)


def create_task_set(
    table: ScoreTable,
    n_mains: int,
    fraction: float | None = None,
    k: int | None = None,
    seed: int = 0,
) -> TaskSet:
    """Sample main recipes and collect their top candidates as review pairs.

    Sampling is uniform without replacement under the given seed; candidate
    pairs are canonicalized and deduplicated keeping first appearance.
    """
    ids = sorted(table.ids())
    if n_mains > len(ids):
        raise ValueError(f"cannot sample {n_mains} mains from {len(ids)} recipes")
    if fraction is None and k is None:
        raise ValueError("need a selection rule: fraction or k")
    rng = random.Random(seed)
    mains = tuple(sorted(rng.sample(ids, n_mains)))
    pairs: list[tuple[str, str]] = []
    fused: dict[tuple[str, str], float] = {}
    for main_id in mains:
        for record in top_candidates(table, main_id, fraction=fraction, k=k):
            pair = canonical_pair(record.main_id, record.secondary_id)
            if pair not in fused:
                fused[pair] = record.fused
                pairs.append(pair)
    return TaskSet(mains=mains, pairs=tuple(pairs), seed=seed, fused_scores=fused)


def write_task_set(task_set: TaskSet, stream: IO[str]) -> None:
    json.dump(
        {
            "seed": task_set.seed,
            "mains": list(task_set.mains),
            "pairs": [
                [a, b, task_set.fused_scores.get((a, b))] for a, b in task_set.pairs
            ],
        },
        stream,
        indent=1,
    )
    stream.write("\n")


def read_task_set(stream: IO[str]) -> TaskSet:
    raw = json.load(stream)
    pairs = []
    fused: dict[tuple[str, str], float] = {}
    for entry in raw["pairs"]:
        pair = canonical_pair(entry[0], entry[1])
        pairs.append(pair)
        if len(entry) > 2 and entry[2] is not None:
            fused[pair] = float(entry[2])
    return TaskSet(
        mains=tuple(raw["mains"]),
        pairs=tuple(pairs),
        seed=int(raw.get("seed", 0)),
        fused_scores=fused,
    )


@dataclass(frozen=True)
class Judgment:
    expert_id: str
    pair: tuple[str, str]
    verdict: str
    timestamp: float


@dataclass(frozen=True)
class AgreementStats:
    total_pairs_judged_by_all: int
    agreed_count: int
    agreement_pct: float


@dataclass
class JudgmentStore:
    """Append-only judgment log with an in-memory effective-state snapshot.

    Writes are serialized through one lock and acknowledged only after the
    log line is flushed to disk. Readers work against the current snapshot
    dict, which is replaced atomically on every write.
    """

    path: str
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _state: dict[tuple[str, str], dict[str, str]] = field(default_factory=dict, repr=False)
    _audit: list[Judgment] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if os.path.exists(self.path):
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    entry = json.loads(line)
                    judgment = Judgment(
                        expert_id=entry["expert"],
                        pair=canonical_pair(entry["main_id"], entry["secondary_id"]),
                        verdict=entry["verdict"],
                        timestamp=float(entry["ts"]),
                    )
                    self._apply(judgment)

    def _apply(self, judgment: Judgment) -> None:
        self._audit.append(judgment)
        verdicts = dict(self._state.get(judgment.pair, {}))
        verdicts[judgment.expert_id] = judgment.verdict
        # replace-not-mutate keeps concurrent readers on a coherent snapshot
        state = dict(self._state)
        state[judgment.pair] = verdicts
        self._state = state

    def submit(self, expert_id: str, main_id: str, secondary_id: str, verdict: str) -> int:
        """Record one verdict; returns the expert's judged-pair count.

        Identical resubmission is acknowledged without touching the log.
        """
        if verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {verdict!r}")
        if not expert_id:
            raise ValueError("expert_id must be non-empty")
        pair = canonical_pair(main_id, secondary_id)
        with self._lock:
            existing = self._state.get(pair, {}).get(expert_id)
            if existing != verdict:
                judgment = Judgment(
                    expert_id=expert_id, pair=pair, verdict=verdict, timestamp=time.time()
                )
                self._append_durably(judgment)
                self._apply(judgment)
            return self.judged_count(expert_id)

    def _append_durably(self, judgment: Judgment) -> None:
        line = json.dumps(
            {
                "ts": judgment.timestamp,
                "expert": judgment.expert_id,
                "main_id": judgment.pair[0],
                "secondary_id": judgment.pair[1],
                "verdict": judgment.verdict,
            }
        )
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # --- reads (lock-free over the snapshot) ---

    def verdicts_for(self, pair: tuple[str, str]) -> dict[str, str]:
        return dict(self._state.get(pair, {}))

    def verdict_of(self, expert_id: str, pair: tuple[str, str]) -> str | None:
        return self._state.get(pair, {}).get(expert_id)

    def judged_count(self, expert_id: str) -> int:
        state = self._state
        return sum(1 for verdicts in state.values() if expert_id in verdicts)

    def experts(self) -> list[str]:
        state = self._state
        return sorted({expert for verdicts in state.values() for expert in verdicts})

    def audit_log(self) -> list[Judgment]:
        return list(self._audit)

    def state(self) -> dict[tuple[str, str], dict[str, str]]:
        return dict(self._state)

    def agreement_stats(self) -> AgreementStats:
        """Unanimity rate over pairs judged by every known expert."""
        experts = self.experts()
        if len(experts) < 2:
            raise ValueError("agreement requires at least 2 experts")
        total = 0
        agreed = 0
        for verdicts in self._state.values():
            if len(verdicts) < len(experts):
                continue
            total += 1
            if len(set(verdicts.values())) == 1:
                agreed += 1
        pct = 100.0 * agreed / total if total else 0.0
        return AgreementStats(
            total_pairs_judged_by_all=total, agreed_count=agreed, agreement_pct=pct
        )

    def agreed_pairs(self) -> list[tuple[str, str, int]]:
        """Canonical pairs with a unanimous all-expert verdict, as labels."""
        experts = self.experts()
        rows = []
        for pair in sorted(self._state):
            verdicts = self._state[pair]
            if len(verdicts) < len(experts):
                continue
            unique = set(verdicts.values())
            if len(unique) == 1:
                rows.append((pair[0], pair[1], VERDICT_LABELS[unique.pop()]))
        return rows


def next_task(task_set: TaskSet, store: JudgmentStore, expert_id: str) -> tuple[str, str] | None:
    """First pair in canonical task order the expert has not judged yet."""
    for pair in task_set.pairs:
        if store.verdict_of(expert_id, pair) is None:
            return pair
    return None

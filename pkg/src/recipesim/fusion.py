"""Pairwise scoring over a corpus and weighted fusion of the three views.

Every recipe pair gets five raw measures (two semantic models, ingredient
overlap, and two nutrition measures). The two semantic scores and the two
nutrition scores are averaged into their view scores, and the fused score
is the weighted sum of the three views (equal thirds by default).

The score table is a CSV with a fixed column order and floats printed to
six decimal places, so reruns and parallel runs are byte-comparable.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Protocol

from .corpus import Corpus, Recipe
from .lexical import lexical_similarity
from .nutrition import ingredient_nutrition_similarity, recipe_nutrition_similarity
from .semantic import MissingEmbeddingError, semantic_similarity

logger = logging.getLogger(__name__)

SCORE_COLUMNS = (
    "main_id",
    "secondary_id",
    "sem_a",
    "sem_b",
    "lexical",
    "nutr_recipe",
    "nutr_ingredient",
    "sem_avg",
    "nutr_avg",
    "fused",
)

METRIC_COLUMNS = SCORE_COLUMNS[2:]


class Provider(Protocol):
    model_tag: str

    def embed_recipe(self, recipe: Recipe) -> object: ...


@dataclass(frozen=True)
class FusionWeights:
    """View weights; must sum to 1 so the fused score stays in [0, 1]."""

    w_sem: float = 1.0 / 3.0
    w_lex: float = 1.0 / 3.0
    w_nutr: float = 1.0 / 3.0

    def __post_init__(self) -> None:
        for w in (self.w_sem, self.w_lex, self.w_nutr):
            if not math.isfinite(w) or w < 0.0:
                raise ValueError("weights must be nonnegative and finite")
        total = self.w_sem + self.w_lex + self.w_nutr
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {total!r}")


@dataclass(frozen=True)
class SimilarityRecord:
    main_id: str
    secondary_id: str
    sem_a: float
    sem_b: float
    lexical: float
    nutr_recipe: float
    nutr_ingredient: float
    sem_avg: float
    nutr_avg: float
    fused: float

    def value(self, column: str) -> float:
        return getattr(self, column)

    def swapped(self) -> "SimilarityRecord":
        """Same scores with main/secondary roles exchanged."""
        return SimilarityRecord(
            main_id=self.secondary_id,
            secondary_id=self.main_id,
            sem_a=self.sem_a,
            sem_b=self.sem_b,
            lexical=self.lexical,
            nutr_recipe=self.nutr_recipe,
            nutr_ingredient=self.nutr_ingredient,
            sem_avg=self.sem_avg,
            nutr_avg=self.nutr_avg,
            fused=self.fused,
        )


@dataclass(frozen=True)
class SkippedPair:
    main_id: str
    secondary_id: str
    reason: str


def fuse(
    sem_a: float,
    sem_b: float,
    lexical: float,
    nutr_recipe: float,
    nutr_ingredient: float,
    weights: FusionWeights,
) -> float:
    """Weighted sum of the view averages."""
    for name, score in (
        ("sem_a", sem_a),
        ("sem_b", sem_b),
        ("lexical", lexical),
        ("nutr_recipe", nutr_recipe),
        ("nutr_ingredient", nutr_ingredient),
    ):
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"{name} score {score!r} outside [0, 1]")
    sem_avg = (sem_a + sem_b) / 2.0
    nutr_avg = (nutr_recipe + nutr_ingredient) / 2.0
    return weights.w_sem * sem_avg + weights.w_lex * lexical + weights.w_nutr * nutr_avg


def score_pair(
    main: Recipe,
    secondary: Recipe,
    provider_a: Provider,
    provider_b: Provider,
    weights: FusionWeights,
) -> SimilarityRecord:
    """All five measures plus view averages and the fused score for one pair."""
    sem_a = semantic_similarity(
        provider_a.embed_recipe(main), provider_a.embed_recipe(secondary)
    )
    sem_b = semantic_similarity(
        provider_b.embed_recipe(main), provider_b.embed_recipe(secondary)
    )
    lex = lexical_similarity(main, secondary)
    nutr_r = recipe_nutrition_similarity(main, secondary)
    nutr_i = ingredient_nutrition_similarity(main, secondary)
    sem_avg = (sem_a + sem_b) / 2.0
    nutr_avg = (nutr_r + nutr_i) / 2.0
    fused = fuse(sem_a, sem_b, lex, nutr_r, nutr_i, weights)
    return SimilarityRecord(
        main_id=main.id,
        secondary_id=secondary.id,
        sem_a=sem_a,
        sem_b=sem_b,
        lexical=lex,
        nutr_recipe=nutr_r,
        nutr_ingredient=nutr_i,
        sem_avg=sem_avg,
        nutr_avg=nutr_avg,
        fused=fused,
    )


@dataclass
class ScoreTable:
    records: list[SimilarityRecord]
    convention: str = "unordered"
    skipped: list[SkippedPair] | None = None

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> list[float]:
        if name not in METRIC_COLUMNS:
            raise KeyError(f"unknown metric column {name!r}")
        return [record.value(name) for record in self.records]

    def pairs_for(self, main_id: str) -> list[SimilarityRecord]:
        """Rows involving main_id, oriented so main_id is first."""
        rows = []
        for record in self.records:
            if record.main_id == main_id:
                rows.append(record)
            elif record.secondary_id == main_id and self.convention == "unordered":
                rows.append(record.swapped())
        return rows

    def ids(self) -> set[str]:
        found: set[str] = set()
        for record in self.records:
            found.add(record.main_id)
            found.add(record.secondary_id)
        return found


def score_all(
    corpus: Corpus,
    provider_a: Provider,
    provider_b: Provider,
    weights: FusionWeights | None = None,
    pair_convention: str = "unordered",
    workers: int = 1,
    on_missing: str = "skip",
) -> ScoreTable:
    """Score every distinct recipe pair.

    Pairs are distributed across a worker pool and merged back in canonical
    id order, so output is identical for any worker count. A pair whose
    embedding is missing is skipped with a logged reason (or aborts the run
    when on_missing="abort").
    """
    if pair_convention not in ("unordered", "ordered"):
        raise ValueError(f"unknown pair convention {pair_convention!r}")
    if on_missing not in ("skip", "abort"):
        raise ValueError(f"unknown missing-embedding policy {on_missing!r}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    weights = weights or FusionWeights()
    ids = corpus.ids()
    if len(ids) < 2:
        raise ValueError("corpus must contain at least 2 recipes")
    pairs = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1 :]]

    def score_one(pair: tuple[str, str]) -> SimilarityRecord | SkippedPair:
        main_id, secondary_id = pair
        try:
            return score_pair(
                corpus[main_id], corpus[secondary_id], provider_a, provider_b, weights
            )
        except MissingEmbeddingError as exc:
            if on_missing == "abort":
                raise
            logger.warning("skipping pair (%s, %s): %s", main_id, secondary_id, exc)
            return SkippedPair(main_id, secondary_id, str(exc))

    if workers == 1:
        outcomes = [score_one(pair) for pair in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(score_one, pairs))

    records = [o for o in outcomes if isinstance(o, SimilarityRecord)]
    skipped = [o for o in outcomes if isinstance(o, SkippedPair)]
    if pair_convention == "ordered":
        records = records + [record.swapped() for record in records]
    records.sort(key=lambda r: (r.main_id, r.secondary_id))
    return ScoreTable(records=records, convention=pair_convention, skipped=skipped)


def top_candidates(
    table: ScoreTable,
    main_id: str,
    fraction: float | None = None,
    k: int | None = None,
) -> list[SimilarityRecord]:
    """Candidates for main_id by descending fused score, id-stable on ties.

    Truncates to ceil(fraction * candidates) rows, or to k rows; with
    neither given, returns the full ranking.
    """
    if main_id not in table.ids():
        raise KeyError(f"unknown recipe id {main_id!r}")
    if fraction is not None and not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    rows = table.pairs_for(main_id)
    rows.sort(key=lambda r: (-r.fused, r.secondary_id))
    if fraction is not None:
        return rows[: math.ceil(fraction * len(rows))]
    if k is not None:
        return rows[: max(k, 0)]
    return rows


def write_score_table(table: ScoreTable, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SCORE_COLUMNS)
    for record in table.records:
        writer.writerow(
            [record.main_id, record.secondary_id]
            + [f"{record.value(col):.6f}" for col in METRIC_COLUMNS]
        )


def write_score_table_file(table: ScoreTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_score_table(table, fh)


def read_score_table(stream: IO[str], convention: str = "unordered") -> ScoreTable:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != list(SCORE_COLUMNS):
        raise ValueError(f"unexpected score table header: {header}")
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(SCORE_COLUMNS):
            raise ValueError(f"malformed score row: {row}")
        records.append(
            SimilarityRecord(
                main_id=row[0],
                secondary_id=row[1],
                **{col: float(v) for col, v in zip(METRIC_COLUMNS, row[2:])},
            )
        )
    return ScoreTable(records=records, convention=convention)


def read_score_table_file(path: str, convention: str = "unordered") -> ScoreTable:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return read_score_table(fh, convention=convention)


def write_skip_report(skipped: Iterable[SkippedPair], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("main_id", "secondary_id", "reason"))
    for skip in skipped:
        writer.writerow((skip.main_id, skip.secondary_id, skip.reason))

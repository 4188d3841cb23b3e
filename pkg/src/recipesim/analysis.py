"""Score-table analytics: descriptive statistics, metric correlations,
single-metric failure detection, agreement by ingredient-overlap bin, and
the two-semantic-model comparison. Each analysis has a delimited report
writer; figures are rendered separately (see figures module)."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .fusion import METRIC_COLUMNS, ScoreTable

CORE_METRICS = ("sem_a", "sem_b", "nutr_recipe", "lexical", "nutr_ingredient")

BIN_EDGES = [round(i / 10, 1) for i in range(11)]

COMPARATORS = {
    ">": lambda v, t: v > t,
    "<": lambda v, t: v < t,
    ">=": lambda v, t: v >= t,
    "<=": lambda v, t: v <= t,
}


@dataclass(frozen=True)
class MetricStats:
    mean: float
    median: float
    std_dev: float
    skew: float
    min: float
    max: float


@dataclass(frozen=True)
class RuleClause:
    metric: str
    comparator: str
    threshold: float

    def __post_init__(self) -> None:
        if self.comparator not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.comparator!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold!r} outside [0, 1]")

    def holds(self, value: float) -> bool:
        return COMPARATORS[self.comparator](value, self.threshold)

    def __str__(self) -> str:
        return f"{self.metric} {self.comparator} {self.threshold:g}"


@dataclass(frozen=True)
class FailureRule:
    name: str
    clauses: tuple[RuleClause, ...]

    def __str__(self) -> str:
        return " and ".join(str(c) for c in self.clauses)


@dataclass(frozen=True)
class RuleMatches:
    rule: FailureRule
    count: int
    percentage: float
    row_ids: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class BinRow:
    bin_lower: float
    bin_upper: float
    avg_semantic: float | None
    avg_nutritional: float | None
    avg_fused: float | None
    count: int


# One metric flags similarity while the complementary views disagree.
DEFAULT_FAILURE_RULES = (
    FailureRule(
        "nutritional",
        (
            RuleClause("nutr_recipe", ">", 0.95),
            RuleClause("sem_a", "<", 0.6),
            RuleClause("lexical", "<", 0.1),
        ),
    ),
    FailureRule(
        "semantic",
        (
            RuleClause("sem_a", ">", 0.85),
            RuleClause("lexical", "<", 0.1),
            RuleClause("nutr_recipe", "<", 0.2),
        ),
    ),
    FailureRule(
        "lexical",
        (
            RuleClause("lexical", ">", 0.3),
            RuleClause("sem_a", "<", 0.6),
        ),
    ),
)


def descriptive_stats(column: Sequence[float]) -> MetricStats:
    """Mean, median, sample std, bias-corrected sample skewness, min, max."""
    n = len(column)
    if n < 2:
        raise ValueError("std_dev requires at least 2 values")
    if n < 3:
        raise ValueError("skew requires at least 3 values")
    data = np.asarray(column, dtype=float)
    mean = float(data.mean())
    deviations = data - mean
    m2 = float(np.mean(deviations**2))
    if m2 == 0.0:
        skew = 0.0
    else:
        m3 = float(np.mean(deviations**3))
        g1 = m3 / m2**1.5
        skew = g1 * math.sqrt(n * (n - 1)) / (n - 2)
    return MetricStats(
        mean=mean,
        median=float(np.median(data)),
        std_dev=float(data.std(ddof=1)),
        skew=skew,
        min=float(data.min()),
        max=float(data.max()),
    )


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Pearson correlation; None when either side is constant."""
    if len(x) != len(y):
        raise ValueError("columns must have equal length")
    if len(x) < 3:
        raise ValueError("correlation requires at least 3 rows")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sx = float(np.sqrt(np.sum(dx**2)))
    sy = float(np.sqrt(np.sum(dy**2)))
    if sx == 0.0 or sy == 0.0:
        return None
    return float(np.sum(dx * dy) / (sx * sy))


def correlation_matrix(
    table: ScoreTable, metrics: Sequence[str] = CORE_METRICS
) -> list[list[float | None]]:
    """Pairwise Pearson matrix; unit diagonal; constant columns undefined."""
    columns = [table.column(m) for m in metrics]
    size = len(metrics)
    matrix: list[list[float | None]] = [[None] * size for _ in range(size)]
    for i in range(size):
        matrix[i][i] = 1.0
        for j in range(i + 1, size):
            r = pearson_r(columns[i], columns[j])
            matrix[i][j] = r
            matrix[j][i] = r
    return matrix


def failure_cases(
    table: ScoreTable,
    rules: Sequence[FailureRule] = DEFAULT_FAILURE_RULES,
    denominator: str = "table",
) -> list[RuleMatches]:
    """Rows satisfying every clause of each rule.

    The percentage denominator follows the table's own row count, or the
    equivalent ordered/unordered pair count (all measures are symmetric, so
    counts convert by a factor of two).
    """
    if denominator not in ("table", "ordered", "unordered"):
        raise ValueError(f"unknown denominator convention {denominator!r}")
    for rule in rules:
        for clause in rule.clauses:
            if clause.metric not in METRIC_COLUMNS:
                raise KeyError(f"rule {rule.name!r} references unknown column {clause.metric!r}")
    denom = len(table.records)
    if denominator == "ordered" and table.convention == "unordered":
        denom *= 2
    elif denominator == "unordered" and table.convention == "ordered":
        denom //= 2
    results = []
    for rule in rules:
        hits = [
            record
            for record in table.records
            if all(clause.holds(record.value(clause.metric)) for clause in rule.clauses)
        ]
        count = len(hits)
        if denominator == "ordered" and table.convention == "unordered":
            count *= 2
        elif denominator == "unordered" and table.convention == "ordered":
            count //= 2
        percentage = 100.0 * count / denom if denom else 0.0
        results.append(
            RuleMatches(
                rule=rule,
                count=count,
                percentage=percentage,
                row_ids=tuple((r.main_id, r.secondary_id) for r in hits),
            )
        )
    return results


def jaccard_bin_agreement(table: ScoreTable) -> list[BinRow]:
    """Mean view scores bucketed by the ingredient-overlap score.

    Bins are [0.0, 0.1), ..., [0.9, 1.0] with the final upper edge
    inclusive; empty bins report count 0 and undefined means.
    """
    if not table.records:
        raise ValueError("empty score table")
    sums = [[0.0, 0.0, 0.0] for _ in range(10)]
    counts = [0] * 10
    for record in table.records:
        index = min(int(record.lexical * 10), 9)
        sums[index][0] += record.sem_avg
        sums[index][1] += record.nutr_avg
        sums[index][2] += record.fused
        counts[index] += 1
    rows = []
    for i in range(10):
        if counts[i]:
            avg = [s / counts[i] for s in sums[i]]
            rows.append(BinRow(BIN_EDGES[i], BIN_EDGES[i + 1], avg[0], avg[1], avg[2], counts[i]))
        else:
            rows.append(BinRow(BIN_EDGES[i], BIN_EDGES[i + 1], None, None, None, 0))
    return rows


def model_comparison(table: ScoreTable) -> dict[str, float | None]:
    """Agreement statistics between the two semantic model scores."""
    a = np.asarray(table.column("sem_a"), dtype=float)
    b = np.asarray(table.column("sem_b"), dtype=float)
    if len(a) < 3:
        raise ValueError("model comparison requires at least 3 rows")
    diff = np.abs(a - b)
    return {
        "mean_abs_diff": float(diff.mean()),
        "max_abs_diff": float(diff.max()),
        "pearson_r": pearson_r(a, b),
    }


def load_rules(stream: IO[str]) -> tuple[FailureRule, ...]:
    """Rules file: JSON array of {"name", "clauses": [{"metric",
    "comparator", "threshold"}]}."""
    raw = json.load(stream)
    if not isinstance(raw, list) or not raw:
        raise ValueError("rules file must be a non-empty JSON array")
    rules = []
    for entry in raw:
        clauses = tuple(
            RuleClause(c["metric"], c["comparator"], float(c["threshold"]))
            for c in entry["clauses"]
        )
        if not clauses:
            raise ValueError(f"rule {entry.get('name')!r} has no clauses")
        rules.append(FailureRule(str(entry["name"]), clauses))
    return tuple(rules)


# --- report writers ---------------------------------------------------------


def _fmt(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def write_stats_report(table: ScoreTable, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("metric", "mean", "median", "std_dev", "skew", "min", "max"))
    for metric in CORE_METRICS:
        s = descriptive_stats(table.column(metric))
        writer.writerow(
            (metric, _fmt(s.mean), _fmt(s.median), _fmt(s.std_dev), _fmt(s.skew), _fmt(s.min), _fmt(s.max))
        )


def write_correlation_report(table: ScoreTable, stream: IO[str]) -> None:
    matrix = correlation_matrix(table)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("metric",) + CORE_METRICS)
    for name, row in zip(CORE_METRICS, matrix):
        writer.writerow((name,) + tuple(_fmt(v) for v in row))


def write_failures_report(
    table: ScoreTable,
    stream: IO[str],
    rules: Sequence[FailureRule] = DEFAULT_FAILURE_RULES,
    denominator: str = "table",
) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("rule", "criteria", "count", "percentage"))
    for match in failure_cases(table, rules, denominator):
        writer.writerow((match.rule.name, str(match.rule), match.count, f"{match.percentage:.6f}"))


def write_bins_report(table: ScoreTable, stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("bin_lower", "bin_upper", "avg_semantic", "avg_nutritional", "avg_fused", "count"))
    for row in jaccard_bin_agreement(table):
        writer.writerow(
            (
                f"{row.bin_lower:.1f}",
                f"{row.bin_upper:.1f}",
                _fmt(row.avg_semantic),
                _fmt(row.avg_nutritional),
                _fmt(row.avg_fused),
                row.count,
            )
        )


def write_model_comparison_report(table: ScoreTable, stream: IO[str]) -> None:
    stats = model_comparison(table)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(("statistic", "value"))
    for key in ("mean_abs_diff", "max_abs_diff", "pearson_r"):
        writer.writerow((key, _fmt(stats[key])))

"""Optimal one-to-one matching on similarity matrices.

Shared by the ingredient-overlap and per-ingredient nutrition views: both
build a pairwise similarity matrix, zero-pad it square, and take the
assignment that maximizes total matched similarity.

The solver works on an exact integer rescaling of the float entries, so the
reported optimum is the true optimum (no epsilon tuning), and ties between
equally good assignments are broken deterministically in favor of the
lexicographically smallest pair sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class AssignmentError(ValueError):
    """Raised for malformed similarity matrices."""


@dataclass(frozen=True)
class SimilarityMatrix:
    """Row-major similarity matrix with entries in [0, 1]."""

    rows: int
    cols: int
    entries: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise AssignmentError("matrix must have at least one row and column")
        if len(self.entries) != self.rows * self.cols:
            raise AssignmentError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        for value in self.entries:
            if not math.isfinite(value):
                raise AssignmentError("matrix entries must be finite")
            if value < 0.0 or value > 1.0:
                raise AssignmentError(f"matrix entry {value!r} outside [0, 1]")

    @classmethod
    def from_rows(cls, rows: list[list[float]]) -> "SimilarityMatrix":
        if not rows:
            raise AssignmentError("matrix must have at least one row and column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise AssignmentError("ragged rows")
        flat = tuple(float(v) for r in rows for v in r)
        return cls(rows=len(rows), cols=width, entries=flat)

    def at(self, i: int, j: int) -> float:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[float, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def transpose(self) -> "SimilarityMatrix":
        flat = tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows))
        return SimilarityMatrix(rows=self.cols, cols=self.rows, entries=flat)


@dataclass(frozen=True)
class Assignment:
    """An optimal pairing: (row, col) pairs plus the total matched similarity."""

    pairs: tuple[tuple[int, int], ...]
    total: float

    pair_of_row: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pair_of_row", {r: c for r, c in self.pairs})


def pad_square(m: SimilarityMatrix) -> SimilarityMatrix:
    """Zero-pad to a square matrix; padded entries act as null partners."""
    n = max(m.rows, m.cols)
    if m.rows == m.cols:
        return m
    flat: list[float] = []
    zero_row = (0.0,) * n
    for i in range(m.rows):
        flat.extend(m.row(i))
        flat.extend([0.0] * (n - m.cols))
    for _ in range(m.rows, n):
        flat.extend(zero_row)
    return SimilarityMatrix(rows=n, cols=n, entries=tuple(flat))


def optimal_assignment(m: SimilarityMatrix) -> Assignment:
    """Maximum-total-similarity one-to-one assignment of rows to columns.

    Requires a square matrix (use pad_square first). Among all maximizing
    assignments, returns the one whose pair sequence is lexicographically
    smallest. The total is the correctly rounded sum of the matched entries.
    """
    if m.rows != m.cols:
        raise AssignmentError(f"matrix must be square, got {m.rows}x{m.cols}")
    n = m.rows
    cost = _integer_costs(m)
    row_to_col, u, v = _solve_min_cost(cost, n)
    tight = [
        [j for j in range(n) if u[i] + v[j] == cost[i][j]]
        for i in range(n)
    ]
    row_to_col = _lexicographic_matching(tight, row_to_col, n)
    pairs = tuple((i, row_to_col[i]) for i in range(n))
    total = math.fsum(m.at(i, j) for i, j in pairs)
    return Assignment(pairs=pairs, total=total)


def _integer_costs(m: SimilarityMatrix) -> list[list[int]]:
    """Exact integer minimization costs: negated entries over a shared
    power-of-two denominator (floats are dyadic rationals)."""
    ratios = [value.as_integer_ratio() for value in m.entries]
    common = max(den for _, den in ratios)
    scaled = [-(num * (common // den)) for num, den in ratios]
    n = m.rows
    return [scaled[i * n : (i + 1) * n] for i in range(n)]


def _solve_min_cost(cost: list[list[int]], n: int) -> tuple[list[int], list[int], list[int]]:
    """O(n^3) Hungarian method with potentials on exact integer costs.

    Returns (row_to_col, u, v) where the potentials are a feasible dual
    (u[i] + v[j] <= cost[i][j]) that is tight on every matched edge.
    """
    inf = float("inf")
    # 1-based internally; index 0 is the virtual unmatched column.
    u: list = [0] * (n + 1)
    v: list = [0] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row occupying column j
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv: list = [inf] * (n + 1)
        used = [False] * (n + 1)
        way = [0] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = 0
            row_cost = cost[i0 - 1]
            ui0 = u[i0]
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row_cost[j - 1] - ui0 - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    row_to_col = [0] * n
    for j in range(1, n + 1):
        row_to_col[match[j] - 1] = j - 1
    return row_to_col, u[1:], v[1:]


def _lexicographic_matching(
    tight: list[list[int]], row_to_col: list[int], n: int
) -> list[int]:
    """Smallest pair sequence among optima.

    Every optimal assignment is a perfect matching of the tight subgraph
    (complementary slackness), and every perfect matching of tight edges is
    optimal. Greedily fix each row to its smallest feasible tight column,
    rematching the displaced row via augmenting paths.
    """
    col_to_row = [0] * n
    for i, j in enumerate(row_to_col):
        col_to_row[j] = i
    locked_cols: set[int] = set()
    for i in range(n):
        for j in tight[i]:
            if j in locked_cols:
                continue
            if row_to_col[i] == j:
                break
            displaced = col_to_row[j]
            freed = row_to_col[i]
            row_to_col[i] = j
            col_to_row[j] = i
            row_to_col[displaced] = -1
            # lock the candidate edge so the search cannot undo it
            locked_cols.add(j)
            rematched = _augment(displaced, tight, row_to_col, col_to_row, locked_cols, n)
            locked_cols.discard(j)
            if rematched:
                break
            # revert and try the next column
            row_to_col[displaced] = j
            col_to_row[j] = displaced
            row_to_col[i] = freed
            col_to_row[freed] = i
        locked_cols.add(row_to_col[i])
    return row_to_col


def _augment(
    start_row: int,
    tight: list[list[int]],
    row_to_col: list[int],
    col_to_row: list[int],
    locked_cols: set[int],
    n: int,
) -> bool:
    """Kuhn-style augmenting search rematching start_row on tight edges."""
    visited = [False] * n

    def try_row(i: int) -> bool:
        for j in tight[i]:
            if j in locked_cols or visited[j]:
                continue
            visited[j] = True
            holder = col_to_row[j] if row_to_col[col_to_row[j]] == j else -1
            if holder == -1 or try_row(holder):
                row_to_col[i] = j
                col_to_row[j] = i
                return True
        return False

    return try_row(start_row)

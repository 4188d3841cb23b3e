"""Hierarchical ingredient-overlap similarity between two recipes.

Each ingredient descriptor is a general-to-specific path; two ingredients
score by the length of their common prefix relative to the longer path
("spices, pepper, black" vs "spices, pepper, red or cayenne" -> 2/3).
Recipe-level similarity optimally pairs the two ingredient lists (null
partners pad a count mismatch) and averages over the larger ingredient
count, so the score stays in [0, 1].
"""

from __future__ import annotations

from .assignment import SimilarityMatrix, optimal_assignment, pad_square
from .corpus import Recipe


def ingredient_similarity(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    """Common-prefix fraction of two descriptor paths: |prefix| / max(|a|, |b|)."""
    if not a or not b:
        raise ValueError("descriptor paths must be non-empty")
    prefix = 0
    for x, y in zip(a, b):
        if x != y:
            break
        prefix += 1
    return prefix / max(len(a), len(b))


def ingredient_matrix(main: Recipe, secondary: Recipe) -> SimilarityMatrix:
    rows = [
        [
            ingredient_similarity(ia.descriptor_path, ib.descriptor_path)
            for ib in secondary.ingredients
        ]
        for ia in main.ingredients
    ]
    return SimilarityMatrix.from_rows(rows)


def lexical_similarity(main: Recipe, secondary: Recipe) -> float:
    """Best one-to-one ingredient pairing, averaged over max ingredient count.

    Null-padded pairs contribute zero and stay in the denominator, so
    unmatched ingredients dilute the score.
    """
    matrix = pad_square(ingredient_matrix(main, secondary))
    result = optimal_assignment(matrix)
    return result.total / matrix.rows

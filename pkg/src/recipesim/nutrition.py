"""Nutrition-view similarity.

Two measures: whole-recipe cosine over the per-100g nutrient vectors, and a
per-ingredient measure that standardizes the two recipes' ingredient
nutrient vectors jointly, optimally pairs them, and averages the matched
cosines. Cosines are clamped at zero so both scores live in [0, 1].
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .assignment import SimilarityMatrix, optimal_assignment, pad_square
from .corpus import Recipe


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity; an all-zero vector scores 0 against anything."""
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    ua = np.asarray(u, dtype=float)
    va = np.asarray(v, dtype=float)
    nu = float(np.linalg.norm(ua))
    nv = float(np.linalg.norm(va))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if np.array_equal(ua, va):
        return 1.0
    return float(np.dot(ua, va) / (nu * nv))


def clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def recipe_nutrition_similarity(a: Recipe, b: Recipe) -> float:
    """Clamped cosine of the two per-100g nutrient vectors."""
    return clamp01(cosine(a.nutrition_per_100g.values, b.nutrition_per_100g.values))


def standardize_pair(
    ingredients_a: Sequence[Sequence[float]],
    ingredients_b: Sequence[Sequence[float]],
) -> tuple[np.ndarray, np.ndarray]:
    """Z-score both ingredient sets against their joint per-dimension stats.

    Uses the population standard deviation over the concatenation of both
    sides; zero-variance dimensions map to 0 rather than blowing up.
    """
    if len(ingredients_a) == 0 or len(ingredients_b) == 0:
        raise ValueError("both recipes need at least one ingredient vector")
    a = np.asarray(ingredients_a, dtype=float)
    b = np.asarray(ingredients_b, dtype=float)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    union = np.concatenate([a, b], axis=0)
    # canonical row order makes the float reductions, and therefore the
    # scores, identical under argument swap
    union = union[np.lexsort(union.T[::-1])]
    mean = union.mean(axis=0)
    std = union.std(axis=0)
    safe = np.where(std == 0.0, 1.0, std)
    za = (a - mean) / safe
    zb = (b - mean) / safe
    za[:, std == 0.0] = 0.0
    zb[:, std == 0.0] = 0.0
    return za, zb


def ingredient_nutrition_matrix(a: Recipe, b: Recipe) -> SimilarityMatrix:
    za, zb = standardize_pair(
        [ing.nutrients.values for ing in a.ingredients],
        [ing.nutrients.values for ing in b.ingredients],
    )
    rows = [[clamp01(cosine(u, v)) for v in zb] for u in za]
    return SimilarityMatrix.from_rows(rows)


def ingredient_nutrition_similarity(a: Recipe, b: Recipe) -> float:
    """Mean matched similarity of jointly standardized ingredient vectors.

    Null partners pad a count mismatch, contribute zero, and stay in the
    denominator, mirroring the lexical construction.
    """
    matrix = pad_square(ingredient_nutrition_matrix(a, b))
    result = optimal_assignment(matrix)
    return result.total / matrix.rows


def nutrition_scores(a: Recipe, b: Recipe) -> tuple[float, float]:
    """(per-recipe, per-ingredient) nutrition similarities."""
    return recipe_nutrition_similarity(a, b), ingredient_nutrition_similarity(a, b)

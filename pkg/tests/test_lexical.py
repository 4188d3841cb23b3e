"""Ingredient-overlap similarity tests."""

import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from recipesim.corpus import ingredient_path
from recipesim.lexical import ingredient_matrix, ingredient_similarity, lexical_similarity
from recipesim.assignment import pad_square

from conftest import DESCRIPTOR_POOL, make_recipe, random_recipe


def brute_force_lexical(main, secondary) -> float:
    """Independent matcher: enumerate permutations of the padded matrix."""
    matrix = pad_square(ingredient_matrix(main, secondary))
    n = matrix.rows
    best = max(
        math.fsum(matrix.at(i, perm[i]) for i in range(n))
        for perm in itertools.permutations(range(n))
    )
    return best / n


class TestIngredientSimilarity:
    def test_two_of_three_components_match(self):
        a = ingredient_path("spices, pepper, black")
        b = ingredient_path("spices, pepper, red or cayenne")
        assert ingredient_similarity(a, b) == 2 / 3

    def test_identical_paths_full_point(self):
        path = ingredient_path("sugars, granulated")
        assert ingredient_similarity(path, path) == 1.0

    def test_disjoint_roots_score_zero(self):
        assert (
            ingredient_similarity(("salt", "table"), ("sugars", "granulated")) == 0.0
        )

    def test_prefix_break_stops_counting(self):
        # shared components after a mismatch do not count
        assert ingredient_similarity(("a", "x", "c"), ("a", "y", "c")) == 1 / 3

    def test_length_mismatch_uses_longer_path(self):
        assert ingredient_similarity(("spices",), ("spices", "pepper", "black")) == 1 / 3

    def test_empty_path_rejected(self):
        with pytest.raises(ValueError):
            ingredient_similarity((), ("salt",))


class TestLexicalSimilarity:
    def test_same_multiset_in_different_order_is_one(self):
        a = make_recipe(
            "lemonade",
            ["lemon juice, raw", "water, bottled, generic", "sugars, granulated"],
            [0.02, 0.03, 0.01, 0.0, 4.83],
        )
        b = make_recipe(
            "granita",
            ["water, bottled, generic", "sugars, granulated", "lemon juice, raw"],
            [0.03, 0.05, 0.01, 0.01, 15.45],
        )
        assert lexical_similarity(a, b) == 1.0

    def test_fully_disjoint_roots_score_zero(self):
        a = make_recipe(
            "potatoes",
            ["potatoes, raw, skin", "oil, olive, salad or cooking", "salt, table"],
            [2.97, 2.48, 0.49, 0.42, 0.0],
        )
        b = make_recipe(
            "cocktail",
            [
                "alcoholic beverage, tequila sunrise, canned",
                "cranberry juice, unsweetened",
                "lime juice, raw",
            ],
            [0.12, 0.36, 0.06, 0.01, 7.22],
        )
        assert lexical_similarity(a, b) == 0.0

    def test_one_shared_one_foreign_halves_score(self):
        a = make_recipe("x", ["salt, table"], [1, 1, 1, 1, 1])
        b = make_recipe("xy", ["salt, table", "honey"], [1, 1, 1, 1, 1])
        assert lexical_similarity(a, b) == 0.5

    def test_self_similarity_is_one(self, rng):
        for i in range(20):
            recipe = random_recipe(rng, f"r{i}")
            assert lexical_similarity(recipe, recipe) == 1.0

    @given(st.integers(min_value=0, max_value=10_000))
    def test_symmetry(self, seed):
        local = random.Random(seed)
        a = random_recipe(local, "a")
        b = random_recipe(local, "b")
        assert lexical_similarity(a, b) == lexical_similarity(b, a)

    def test_monotone_dilution(self, rng):
        foreign = "zucchini, baby, raw"  # shares no root with the pool
        for i in range(20):
            a = random_recipe(rng, f"a{i}", max_ingredients=5)
            b = random_recipe(rng, f"b{i}", max_ingredients=5)
            diluted = make_recipe(
                "b+",
                [ing.descriptor for ing in b.ingredients] + [foreign],
                list(b.nutrition_per_100g.values),
            )
            assert lexical_similarity(a, diluted) <= lexical_similarity(a, b)

    def test_matches_brute_force_matcher(self, rng):
        for i in range(30):
            a = random_recipe(rng, f"a{i}")
            b = random_recipe(rng, f"b{i}")
            assert lexical_similarity(a, b) == brute_force_lexical(a, b)

    def test_score_within_unit_interval(self, rng):
        for i in range(50):
            a = random_recipe(rng, f"a{i}")
            b = random_recipe(rng, f"b{i}")
            assert 0.0 <= lexical_similarity(a, b) <= 1.0

    def test_duplicate_ingredients_matched_separately(self):
        a = make_recipe("dup", ["salt, table", "salt, table"], [1, 1, 1, 1, 1])
        b = make_recipe("single", ["salt, table"], [1, 1, 1, 1, 1])
        # one salt matches, the duplicate pairs with a null
        assert lexical_similarity(a, b) == 0.5

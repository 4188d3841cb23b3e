"""Regression fixtures over the bundled corpus's hand-picked recipe pairs.

Each pair pins one behavioral regime of the engine: identical ingredient
multisets, coincidental macro matches with disjoint ingredients, clear
non-matches, and partial hierarchy overlap. Nutrition expectations follow
the published reference values for these nutrient vectors.
"""

import os

import pytest

from recipesim.corpus import parse_corpus_file
from recipesim.lexical import lexical_similarity
from recipesim.nutrition import recipe_nutrition_similarity

CORPUS_PATH = os.path.join(os.path.dirname(__file__), "..", "data", "mini_corpus.jsonl")


@pytest.fixture(scope="module")
def corpus():
    result = parse_corpus_file(CORPUS_PATH)
    assert result.accepted == 50 and not result.rejects
    return result.corpus


def test_identical_ingredient_multiset_pair(corpus):
    a, b = corpus["easy-lemonade"], corpus["lemon-granita"]
    assert lexical_similarity(a, b) == 1.0
    assert recipe_nutrition_similarity(a, b) >= 0.9999


def test_process_similar_but_unrelated_recipes(corpus):
    a, b = corpus["french-dressing"], corpus["texican-cocktail"]
    assert lexical_similarity(a, b) < 0.1
    assert recipe_nutrition_similarity(a, b) == pytest.approx(0.0407, abs=0.01)


def test_coincidental_macro_profile_match(corpus):
    a, b = corpus["bean-jam-anko"], corpus["metropolitan-martini"]
    assert lexical_similarity(a, b) == 0.0
    assert recipe_nutrition_similarity(a, b) == pytest.approx(0.9997, abs=0.001)


def test_clear_non_match(corpus):
    a, b = corpus["roasted-potatoes"], corpus["texican-cocktail"]
    assert lexical_similarity(a, b) == 0.0
    assert recipe_nutrition_similarity(a, b) == pytest.approx(0.0442, abs=0.01)


def test_partial_hierarchy_overlap(corpus):
    # salt matches exactly; two spice paths share only their root, each
    # contributing 1/3; averaged over the longer list of 9 ingredients.
    a, b = corpus["taco-seasoning"], corpus["freezer-apple-pie-filling"]
    assert lexical_similarity(a, b) == pytest.approx((1 + 1 / 3 + 1 / 3) / 9, abs=1e-12)


def test_shared_cocktail_base_scores_high(corpus):
    a, b = corpus["metropolitan-martini"], corpus["texican-cocktail"]
    # two of three ingredients identical, the third shares no root
    assert lexical_similarity(a, b) == pytest.approx(2 / 3 + 0.25 / 3, abs=1e-12)

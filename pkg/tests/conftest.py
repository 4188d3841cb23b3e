"""Shared builders for recipes and randomized recipe pairs."""

from __future__ import annotations

import random

import pytest
from hypothesis import settings

from recipesim.corpus import Ingredient, NutrientVector, Recipe, ingredient_path

settings.register_profile("suite", derandomize=True, max_examples=60)
settings.load_profile("suite")


DESCRIPTOR_POOL = [
    "spices, pepper, black",
    "spices, pepper, red or cayenne",
    "spices, paprika",
    "spices, cumin seed",
    "spices, oregano, dried",
    "spices, cinnamon, ground",
    "salt, table",
    "sugars, granulated",
    "sugars, brown",
    "water, bottled, generic",
    "lemon juice, raw",
    "lime juice, raw",
    "oil, olive, salad or cooking",
    "oil, canola",
    "vinegar, red wine",
    "wheat flour, white, all-purpose, unenriched",
    "wheat flour, whole-grain",
    "butter, salted",
    "milk, whole",
    "cheese, cheddar",
    "egg, whole, raw",
    "chicken, breast, skinless",
    "beef, ground, 85% lean",
    "potatoes, raw, skin",
    "onions, raw",
    "garlic, raw",
    "tomatoes, red, ripe, raw",
    "carrots, raw",
    "rice, white, long-grain",
    "beans, snap, green, raw",
    "apples, raw, with skin",
    "cranberry juice, unsweetened",
    "mustard, prepared, yellow",
    "cornstarch",
    "honey",
]

STEP_POOL = [
    "Combine everything in a large bowl",
    "Whisk until smooth",
    "Heat the pan over medium heat",
    "Simmer for ten minutes",
    "Season to taste and serve",
    "Chill before serving",
    "Stir gently until dissolved",
    "Bake until golden",
    "Drain and set aside",
    "Shake well in a sealed jar",
    "Toss with the dressing",
    "Bring to a boil then reduce heat",
]


def make_recipe(
    rid: str,
    descriptors: list[str],
    nutrition: list[float],
    instructions: list[str] | None = None,
    ingredient_nutrients: list[list[float]] | None = None,
    title: str | None = None,
) -> Recipe:
    dim = len(nutrition)
    if ingredient_nutrients is None:
        ingredient_nutrients = [[1.0] * dim for _ in descriptors]
    ingredients = tuple(
        Ingredient(
            descriptor_path=ingredient_path(descriptor),
            nutrients=NutrientVector(values=tuple(float(v) for v in nutrients)),
        )
        for descriptor, nutrients in zip(descriptors, ingredient_nutrients)
    )
    return Recipe(
        id=rid,
        title=title or rid,
        ingredients=ingredients,
        instructions=tuple(instructions or ["Combine everything in a large bowl", "Serve"]),
        nutrition_per_100g=NutrientVector(values=tuple(float(v) for v in nutrition)),
    )


def random_recipe(rng: random.Random, rid: str, dim: int = 5, max_ingredients: int = 6) -> Recipe:
    count = rng.randint(1, max_ingredients)
    descriptors = [rng.choice(DESCRIPTOR_POOL) for _ in range(count)]
    nutrition = [round(rng.uniform(0.0, 25.0), 2) for _ in range(dim)]
    if all(v == 0.0 for v in nutrition):
        nutrition[0] = 1.0
    ingredient_nutrients = [
        [round(rng.uniform(0.0, 30.0), 2) for _ in range(dim)] for _ in range(count)
    ]
    steps = rng.sample(STEP_POOL, rng.randint(2, 5))
    return make_recipe(
        rid,
        descriptors,
        nutrition,
        instructions=steps,
        ingredient_nutrients=ingredient_nutrients,
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20250810)

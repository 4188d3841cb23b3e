#!/usr/bin/env python3
"""Generate the bundled 50-recipe mini corpus and its embedding files.

Writes data/mini_corpus.jsonl plus one embedding file per provider slot
(text form for model_a, binary form for model_b). Output is deterministic,
so the committed files regenerate byte-identically.
"""

from __future__ import annotations

import json
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from recipesim.corpus import parse_corpus_file  # noqa: E402
from recipesim.semantic import (  # noqa: E402
    fallback_embed,
    write_embeddings_binary,
    write_embeddings_text,
)

SCHEMA = ["fat", "energy", "protein", "saturates", "sugars"]

# Hand-picked pairs covering the interesting regimes: identical ingredient
# multisets, disjoint recipes with near-identical macros, and clear
# non-matches.
CURATED = [
    (
        "easy-lemonade",
        "Easy Lemonade",
        ["lemon juice, raw", "water, bottled, generic", "sugars, granulated"],
        [0.02, 0.03, 0.01, 0.0, 4.83],
        [
            "Combine the water and sugar in a large pan",
            "Warm gently until the sugar melts",
            "Take off the heat and stir in the lemon juice",
            "Pour over ice and serve",
        ],
    ),
    (
        "lemon-granita",
        "Lemon Granita",
        ["water, bottled, generic", "sugars, granulated", "lemon juice, raw"],
        [0.03, 0.05, 0.01, 0.01, 15.45],
        [
            "Bring the water and sugar to a boil in a small saucepan",
            "Boil until the sugar dissolves completely",
            "Stir in the lemon juice and cool",
            "Freeze, scraping with a fork every hour",
        ],
    ),
    (
        "french-dressing",
        "French Dressing",
        [
            "oil, olive, salad or cooking",
            "vinegar, red wine",
            "water, bottled, generic",
            "sugars, granulated",
            "mustard, prepared, yellow",
            "salt, table",
            "sauce, worcestershire",
            "spices, paprika",
        ],
        [6.03, 0.08, 0.19, 0.83, 0.15],
        [
            "Put every ingredient into a jar with a tight lid",
            "Shake hard until blended",
            "Chill before dressing the salad",
        ],
    ),
    (
        "texican-cocktail",
        "The Texican Cocktail",
        [
            "alcoholic beverage, tequila sunrise, canned",
            "cranberry juice, unsweetened",
            "lime juice, raw",
        ],
        [0.12, 0.36, 0.06, 0.01, 7.22],
        [
            "Fill a cocktail shaker with ice",
            "Add all ingredients and shake well",
            "Strain into a chilled glass",
        ],
    ),
    (
        "bean-jam-anko",
        "Bean Jam (Anko)",
        ["beans, snap, green, raw", "sugars, granulated", "salt, table"],
        [0.12, 1.02, 0.09, 0.03, 46.13],
        [
            "Rinse the beans and cover them with water in a pot",
            "Simmer until completely soft",
            "Mash with the sugar over low heat until thick",
            "Finish with the salt and cool",
        ],
    ),
    (
        "metropolitan-martini",
        "Metropolitan Martini",
        [
            "alcoholic beverage, distilled, gin, 90 proof",
            "cranberry juice, unsweetened",
            "lime juice, raw",
        ],
        [0.07, 0.23, 0.01, 0.01, 5.39],
        [
            "Half fill a shaker with ice",
            "Pour in all ingredients and shake well",
            "Strain the mixture into a glass",
        ],
    ),
    (
        "roasted-potatoes",
        "Roasted Potatoes",
        ["potatoes, raw, skin", "oil, olive, salad or cooking", "salt, table"],
        [2.97, 2.48, 0.49, 0.42, 0.0],
        [
            "Heat the oven to 400 degrees",
            "Toss the potatoes with oil and salt in a baking pan",
            "Spread them out in one layer",
            "Roast until browned and tender",
        ],
    ),
    (
        "taco-seasoning",
        "Taco Seasoning",
        [
            "spices, chili powder",
            "spices, garlic powder",
            "spices, onion powder",
            "spices, pepper, red or cayenne",
            "spices, oregano, dried",
            "spices, paprika",
            "spices, cumin seed",
            "salt, table",
            "spices, pepper, black",
        ],
        [6.74, 12.74, 4.06, 1.28, 6.19],
        [
            "Measure all the spices into a small bowl",
            "Stir until evenly mixed",
            "Store in an airtight jar",
        ],
    ),
    (
        "freezer-apple-pie-filling",
        "Freezer Apple Pie Filling",
        [
            "apples, raw, with skin",
            "lemon juice, raw",
            "sugars, granulated",
            "cornstarch",
            "spices, cinnamon, ground",
            "spices, nutmeg, ground",
            "salt, table",
            "water, bottled, generic",
        ],
        [0.09, 0.13, 0.12, 0.02, 20.66],
        [
            "Toss the apples with lemon juice and set aside",
            "Whisk the dry ingredients into the water in a wide pot",
            "Cook until the syrup thickens",
            "Fold in the apples and simmer briefly",
            "Cool and pack into freezer bags",
        ],
    ),
    (
        "simple-syrup",
        "Simple Syrup",
        ["sugars, granulated", "water, bottled, generic"],
        [0.0, 0.02, 0.0, 0.0, 49.8],
        [
            "Combine the sugar and water in a pan",
            "Heat gently until the sugar melts",
            "Cool and bottle",
        ],
    ),
    (
        "garden-salad",
        "Garden Salad",
        [
            "lettuce, romaine, raw",
            "tomatoes, red, ripe, raw",
            "carrots, raw",
            "oil, olive, salad or cooking",
            "vinegar, red wine",
        ],
        [3.4, 0.42, 0.8, 0.5, 2.1],
        [
            "Chop the lettuce, tomatoes, and carrots",
            "Whisk the oil and vinegar together",
            "Toss everything just before serving",
        ],
    ),
    (
        "pepper-steak-rub",
        "Pepper Steak Rub",
        ["spices, pepper, black", "salt, table", "spices, garlic powder"],
        [1.1, 2.9, 0.9, 0.3, 0.4],
        [
            "Crush the peppercorns coarsely",
            "Mix with the salt and garlic powder",
            "Press onto the steak before searing",
        ],
    ),
]

ADJECTIVES = [
    "Quick", "Classic", "Rustic", "Spicy", "Creamy", "Hearty", "Zesty",
    "Golden", "Smoky", "Fresh", "Simple", "Sunday",
]
DISHES = [
    "Soup", "Stew", "Skillet", "Salad", "Bake", "Curry", "Stir Fry",
    "Casserole", "Chili", "Pilaf", "Frittata", "Hash", "Pasta", "Tacos",
    "Marinade", "Dressing", "Smoothie", "Punch", "Muffins",
]

INGREDIENT_POOL = [
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
    "celery, raw",
    "rice, white, long-grain",
    "beans, black, cooked",
    "beans, snap, green, raw",
    "apples, raw, with skin",
    "bananas, raw",
    "oats, rolled, dry",
    "honey",
    "sugars, granulated",
    "sugars, brown",
    "salt, table",
    "spices, pepper, black",
    "spices, paprika",
    "spices, cumin seed",
    "spices, oregano, dried",
    "spices, basil, dried",
    "spices, cinnamon, ground",
    "oil, olive, salad or cooking",
    "oil, canola",
    "vinegar, red wine",
    "lemon juice, raw",
    "lime juice, raw",
    "water, bottled, generic",
    "milk, coconut, canned",
    "yogurt, plain, whole milk",
    "cornstarch",
    "mustard, prepared, yellow",
]

STEP_TEMPLATES = [
    "Prepare the {0} and set aside",
    "Warm the {0} in a heavy pan",
    "Stir in the {0} and cook gently",
    "Season with the {0}",
    "Add the {0} and simmer for a while",
    "Fold the {0} through just before serving",
    "Whisk the {0} until smooth",
    "Let everything rest so the {0} settles",
]

CLOSERS = [
    "Serve warm",
    "Serve chilled",
    "Adjust the seasoning and serve",
    "Garnish and bring to the table",
    "Cool completely before storing",
]


def ingredient_nutrients(descriptor: str) -> list[float]:
    rnd = random.Random(f"nutrients:{descriptor}")
    return [round(rnd.uniform(0.0, 30.0), 2) for _ in SCHEMA]


def synthetic_recipes(count: int, rnd: random.Random) -> list[dict]:
    titles_seen = set()
    recipes = []
    while len(recipes) < count:
        title = f"{rnd.choice(ADJECTIVES)} {rnd.choice(DISHES)}"
        if title in titles_seen:
            continue
        titles_seen.add(title)
        rid = title.lower().replace(" ", "-")
        descriptors = rnd.sample(INGREDIENT_POOL, rnd.randint(2, 7))
        steps = [
            rnd.choice(STEP_TEMPLATES).format(descriptor.split(",")[0])
            for descriptor in descriptors[: rnd.randint(2, 4)]
        ]
        steps.append(rnd.choice(CLOSERS))
        nutrition = [round(rnd.uniform(0.0, 22.0), 2) for _ in SCHEMA]
        if all(v == 0.0 for v in nutrition):
            nutrition[1] = 1.0
        recipes.append(
            {
                "id": rid,
                "title": title,
                "ingredients": [
                    {"descriptor": d, "nutrients": ingredient_nutrients(d)}
                    for d in descriptors
                ],
                "instructions": steps,
                "nutrition_per_100g": nutrition,
            }
        )
    return recipes


def main() -> None:
    out_dir = os.path.join(os.path.dirname(__file__), "..", "data")
    os.makedirs(out_dir, exist_ok=True)
    corpus_path = os.path.join(out_dir, "mini_corpus.jsonl")

    records = [
        {
            "id": rid,
            "title": title,
            "ingredients": [
                {"descriptor": d, "nutrients": ingredient_nutrients(d)}
                for d in descriptors
            ],
            "instructions": steps,
            "nutrition_per_100g": nutrition,
        }
        for rid, title, descriptors, nutrition, steps in CURATED
    ]
    records.extend(synthetic_recipes(50 - len(records), random.Random(20250810)))

    with open(corpus_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"nutrient_schema": SCHEMA}) + "\n")
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    result = parse_corpus_file(corpus_path)
    assert result.accepted == 50 and not result.rejects, result.rejects

    texts = {rid: result.corpus[rid].instruction_text() for rid in result.corpus.ids()}
    vectors_a = {rid: fallback_embed(text, 64).values for rid, text in texts.items()}
    vectors_b = {rid: fallback_embed(text, 32).values for rid, text in texts.items()}
    write_embeddings_text(os.path.join(out_dir, "embeddings_a.txt"), "roberta-like", vectors_a)
    write_embeddings_binary(os.path.join(out_dir, "embeddings_b.bin"), "minilm-like", vectors_b)
    print(f"wrote {corpus_path} with {result.accepted} recipes and both embedding files")


if __name__ == "__main__":
    main()

"""Recipe corpus parsing, validation, and indexing.

The corpus file is line-delimited JSON (UTF-8). The first line is a header
object declaring the nutrient schema order; every following line is one
recipe record:

    {"nutrient_schema": ["fat", "energy", "protein", "saturates", "sugars"]}
    {"id": "...", "title": "...", "ingredients": [...], "instructions": [...],
     "nutrition_per_100g": [...]}

Each ingredient carries a comma-separated hierarchical descriptor (general
to specific), a nutrient array matching the schema, and an optional
quantity {"amount": number, "unit": "..."}. Nutrient vectors are normalized
to a canonical nutrient-name order on ingestion, so corpora written with
permuted schemas index identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

CANONICAL_NUTRIENT_ORDER = ("fat", "energy", "protein", "saturates", "salt", "sugars")

INSTRUCTION_JOINER = ". "


class CorpusError(ValueError):
    """Unrecoverable corpus problem (duplicate id, schema inconsistency)."""


@dataclass(frozen=True)
class NutrientVector:
    """Fixed-order nutrient amounts; the schema is shared corpus-wide."""

    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Ingredient:
    descriptor_path: tuple[str, ...]
    nutrients: NutrientVector
    quantity_amount: float | None = None
    quantity_unit: str | None = None

    @property
    def descriptor(self) -> str:
        return ", ".join(self.descriptor_path)


@dataclass(frozen=True)
class Recipe:
    id: str
    title: str
    ingredients: tuple[Ingredient, ...]
    instructions: tuple[str, ...]
    nutrition_per_100g: NutrientVector

    def instruction_text(self) -> str:
        """The single document fed to semantic embedding."""
        return INSTRUCTION_JOINER.join(self.instructions)


@dataclass
class Corpus:
    nutrient_schema: tuple[str, ...]
    recipes: dict[str, Recipe] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.recipes)

    def __contains__(self, recipe_id: str) -> bool:
        return recipe_id in self.recipes

    def __getitem__(self, recipe_id: str) -> Recipe:
        return self.recipes[recipe_id]

    def ids(self) -> list[str]:
        return sorted(self.recipes)


@dataclass(frozen=True)
class RejectedLine:
    line_number: int
    reason: str


@dataclass
class ParseResult:
    corpus: Corpus
    rejects: list[RejectedLine]
    record_lines: int

    @property
    def accepted(self) -> int:
        return len(self.corpus)


def ingredient_path(descriptor: str) -> tuple[str, ...]:
    """Split a comma-separated descriptor into its hierarchy components.

    Components are lowercased and whitespace-trimmed; empty components are
    dropped. "spices, pepper, black" -> ("spices", "pepper", "black").
    """
    if not descriptor:
        raise ValueError("empty descriptor")
    parts = tuple(p.strip().lower() for p in descriptor.split(","))
    parts = tuple(p for p in parts if p)
    if not parts:
        raise ValueError("empty descriptor")
    return parts


def recipe_nutrient_vector(recipe: Recipe) -> NutrientVector:
    """Per-100g nutrient vector of the recipe (already canonically ordered)."""
    return recipe.nutrition_per_100g


def canonical_schema_order(names: Iterable[str]) -> tuple[str, ...]:
    """Order nutrient names canonically; unknown names trail alphabetically."""
    rank = {name: i for i, name in enumerate(CANONICAL_NUTRIENT_ORDER)}
    return tuple(sorted(names, key=lambda n: (rank.get(n, len(rank)), n)))


def parse_corpus(stream: IO[bytes] | IO[str]) -> ParseResult:
    """Parse a line-delimited corpus file.

    Malformed records are rejected with their line number and reason;
    duplicate ids and schema dimension inconsistencies abort the parse.
    """
    lines = iter(enumerate(_decoded_lines(stream), start=1))
    header_line = None
    for number, text in lines:
        if text.strip():
            header_line = (number, text)
            break
    if header_line is None:
        return ParseResult(Corpus(nutrient_schema=()), rejects=[], record_lines=0)

    schema_declared = _parse_header(*header_line)
    schema = canonical_schema_order(schema_declared)
    order = [schema_declared.index(name) for name in schema]
    corpus = Corpus(nutrient_schema=schema)
    rejects: list[RejectedLine] = []
    record_lines = 0

    for number, text in lines:
        if not text.strip():
            continue
        record_lines += 1
        try:
            recipe = _parse_record(text, schema, order)
        except CorpusError as exc:
            raise CorpusError(f"line {number}: {exc}") from None
        except ValueError as exc:
            rejects.append(RejectedLine(number, str(exc)))
            continue
        if recipe.id in corpus.recipes:
            raise CorpusError(f"line {number}: duplicate id {recipe.id!r}")
        corpus.recipes[recipe.id] = recipe
    return ParseResult(corpus, rejects, record_lines)


def parse_corpus_file(path: str) -> ParseResult:
    with open(path, "rb") as fh:
        return parse_corpus(fh)


def serialize_corpus(corpus: Corpus, stream: IO[str]) -> None:
    """Write the corpus back out; parse(serialize(c)) reproduces c."""
    stream.write(json.dumps({"nutrient_schema": list(corpus.nutrient_schema)}) + "\n")
    for recipe in corpus.recipes.values():
        stream.write(json.dumps(_record_dict(recipe), ensure_ascii=False) + "\n")


def _decoded_lines(stream: IO[bytes] | IO[str]) -> Iterator[str]:
    for raw in stream:
        yield raw.decode("utf-8") if isinstance(raw, bytes) else raw


def _parse_header(number: int, text: str) -> list[str]:
    try:
        header = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"line {number}: header is not valid JSON: {exc}") from None
    schema = header.get("nutrient_schema") if isinstance(header, dict) else None
    if (
        not isinstance(schema, list)
        or not schema
        or not all(isinstance(n, str) and n for n in schema)
    ):
        raise CorpusError(f"line {number}: header must declare a non-empty nutrient_schema")
    if len(set(schema)) != len(schema):
        raise CorpusError(f"line {number}: duplicate nutrient names in schema")
    return schema


def _parse_record(text: str, schema: tuple[str, ...], order: list[int]) -> Recipe:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc.msg}")
    if not isinstance(record, dict):
        raise ValueError("record is not an object")

    recipe_id = record.get("id")
    if not isinstance(recipe_id, str) or not recipe_id:
        raise ValueError("missing or empty id")
    title = record.get("title")
    if not isinstance(title, str):
        raise ValueError("missing title")

    raw_instructions = record.get("instructions")
    if not isinstance(raw_instructions, list) or not raw_instructions:
        raise ValueError("instructions must be a non-empty array")
    instructions = []
    for step in raw_instructions:
        if not isinstance(step, str) or not step.strip():
            raise ValueError("instruction steps must be non-empty strings")
        instructions.append(step)

    raw_ingredients = record.get("ingredients")
    if not isinstance(raw_ingredients, list) or not raw_ingredients:
        raise ValueError("ingredients must be a non-empty array")
    ingredients = tuple(
        _parse_ingredient(entry, schema, order) for entry in raw_ingredients
    )

    nutrition = _parse_nutrients(record.get("nutrition_per_100g"), schema, order, "nutrition_per_100g")
    return Recipe(
        id=recipe_id,
        title=title,
        ingredients=ingredients,
        instructions=tuple(instructions),
        nutrition_per_100g=nutrition,
    )


def _parse_ingredient(entry: object, schema: tuple[str, ...], order: list[int]) -> Ingredient:
    if not isinstance(entry, dict):
        raise ValueError("ingredient is not an object")
    descriptor = entry.get("descriptor")
    if not isinstance(descriptor, str) or not descriptor.strip():
        raise ValueError("ingredient missing descriptor")
    path = ingredient_path(descriptor)
    nutrients = _parse_nutrients(entry.get("nutrients"), schema, order, "ingredient nutrients")

    amount = None
    unit = None
    quantity = entry.get("quantity")
    if quantity is not None:
        if not isinstance(quantity, dict):
            raise ValueError("quantity must be an object")
        amount = quantity.get("amount")
        if not isinstance(amount, (int, float)) or amount < 0:
            raise ValueError("quantity amount must be a nonnegative number")
        amount = float(amount)
        unit = quantity.get("unit")
        if unit is not None and not isinstance(unit, str):
            raise ValueError("quantity unit must be a string")
    return Ingredient(
        descriptor_path=path,
        nutrients=nutrients,
        quantity_amount=amount,
        quantity_unit=unit,
    )


def _parse_nutrients(
    raw: object, schema: tuple[str, ...], order: list[int], what: str
) -> NutrientVector:
    if not isinstance(raw, list):
        raise ValueError(f"{what} must be an array")
    if len(raw) != len(schema):
        # Dimension mismatch breaks the corpus-wide schema contract.
        raise CorpusError(
            f"{what} has {len(raw)} values, schema declares {len(schema)}"
        )
    values = []
    for v in raw:
        if not isinstance(v, (int, float)):
            raise ValueError(f"{what} contains a non-numeric value")
        if v < 0:
            raise ValueError(f"negative nutrient in {what}")
        values.append(float(v))
    return NutrientVector(values=tuple(values[i] for i in order))


def _record_dict(recipe: Recipe) -> dict:
    ingredients = []
    for ing in recipe.ingredients:
        entry: dict = {
            "descriptor": ing.descriptor,
            "nutrients": list(ing.nutrients.values),
        }
        if ing.quantity_amount is not None:
            entry["quantity"] = {"amount": ing.quantity_amount, "unit": ing.quantity_unit}
        ingredients.append(entry)
    return {
        "id": recipe.id,
        "title": recipe.title,
        "ingredients": ingredients,
        "instructions": list(recipe.instructions),
        "nutrition_per_100g": list(recipe.nutrition_per_100g.values),
    }

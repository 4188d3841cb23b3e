"""Corpus parsing, descriptor normalization, and round-trip tests."""

import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from recipesim.corpus import (
    CorpusError,
    canonical_schema_order,
    ingredient_path,
    parse_corpus,
    recipe_nutrient_vector,
    serialize_corpus,
)

SCHEMA = ["fat", "energy", "protein", "saturates", "sugars"]


def record(rid: str, nutrients=None, **overrides) -> str:
    base = {
        "id": rid,
        "title": f"Recipe {rid}",
        "ingredients": [
            {"descriptor": "salt, table", "nutrients": nutrients or [0.0, 0.0, 0.0, 0.0, 0.1]},
        ],
        "instructions": ["Mix well", "Serve"],
        "nutrition_per_100g": nutrients or [1.0, 2.0, 3.0, 0.5, 4.0],
    }
    base.update(overrides)
    return json.dumps(base)


def corpus_text(*records: str, schema=None) -> io.StringIO:
    header = json.dumps({"nutrient_schema": schema or SCHEMA})
    return io.StringIO("\n".join([header, *records]) + "\n")


class TestParseCorpus:
    def test_empty_stream(self):
        result = parse_corpus(io.StringIO(""))
        assert result.accepted == 0
        assert result.rejects == []

    def test_three_well_formed_lines(self):
        result = parse_corpus(corpus_text(record("a"), record("b"), record("c")))
        assert result.accepted == 3
        assert result.rejects == []
        assert result.corpus.ids() == ["a", "b", "c"]

    def test_negative_nutrient_rejected_with_reason(self):
        result = parse_corpus(corpus_text(record("a", nutrients=[1.0, -0.5, 0.0, 0.0, 0.0])))
        assert result.accepted == 0
        assert len(result.rejects) == 1
        assert "negative nutrient" in result.rejects[0].reason
        assert result.rejects[0].line_number == 2

    def test_duplicate_id_is_hard_error(self):
        with pytest.raises(CorpusError, match="duplicate id"):
            parse_corpus(corpus_text(record("a"), record("a")))

    def test_dimension_mismatch_is_hard_error(self):
        bad = record("a", nutrition_per_100g=[1.0, 2.0])
        with pytest.raises(CorpusError, match="schema declares"):
            parse_corpus(corpus_text(bad))

    def test_malformed_json_rejected_with_line_number(self):
        result = parse_corpus(corpus_text(record("a"), "{not json", record("b")))
        assert result.accepted == 2
        assert len(result.rejects) == 1
        assert result.rejects[0].line_number == 3

    def test_missing_instructions_rejected(self):
        result = parse_corpus(corpus_text(record("a", instructions=[])))
        assert result.accepted == 0
        assert "instructions" in result.rejects[0].reason

    def test_negative_quantity_rejected(self):
        bad = record(
            "a",
            ingredients=[
                {
                    "descriptor": "salt, table",
                    "nutrients": [0.0, 0.0, 0.0, 0.0, 0.1],
                    "quantity": {"amount": -1.0, "unit": "tsp"},
                }
            ],
        )
        result = parse_corpus(corpus_text(bad))
        assert result.accepted == 0
        assert "quantity" in result.rejects[0].reason

    def test_accepted_plus_rejected_equals_record_lines(self):
        result = parse_corpus(
            corpus_text(record("a"), "oops", record("b"), json.dumps({"id": "c"}))
        )
        assert result.accepted + len(result.rejects) == result.record_lines == 4

    def test_missing_header_is_hard_error(self):
        with pytest.raises(CorpusError, match="nutrient_schema"):
            parse_corpus(io.StringIO(record("a") + "\n"))

    def test_bytes_stream_accepted(self):
        text = corpus_text(record("a")).getvalue()
        result = parse_corpus(io.BytesIO(text.encode("utf-8")))
        assert result.accepted == 1


class TestIngredientPath:
    def test_three_component_hierarchy(self):
        assert ingredient_path("spices, pepper, black") == ("spices", "pepper", "black")

    def test_single_component_lowercased(self):
        assert ingredient_path("Salt") == ("salt",)

    def test_four_component_hierarchy(self):
        path = ingredient_path("wheat flour, white, all-purpose, unenriched")
        assert len(path) == 4
        assert path[0] == "wheat flour"

    def test_empty_descriptor_rejected(self):
        with pytest.raises(ValueError, match="empty descriptor"):
            ingredient_path("")
        with pytest.raises(ValueError, match="empty descriptor"):
            ingredient_path(" , , ")

    def test_drops_empty_components(self):
        assert ingredient_path("salt, , table") == ("salt", "table")

    @given(st.lists(st.sampled_from(["salt", "pepper", "oil", "cumin seed"]), min_size=1, max_size=4))
    def test_idempotent_on_normalized(self, components):
        normalized = ingredient_path(", ".join(components))
        assert ingredient_path(", ".join(normalized)) == normalized


class TestNutrientVectors:
    def test_accessor_returns_per_100g_unchanged(self):
        vector = [6.03, 0.08, 0.19, 0.83, 0.15]
        result = parse_corpus(corpus_text(record("a", nutrients=vector)))
        assert recipe_nutrient_vector(result.corpus["a"]).values == tuple(vector)

    def test_zero_vector_passes_through(self):
        result = parse_corpus(corpus_text(record("a", nutrients=[0, 0, 0, 0, 0])))
        assert recipe_nutrient_vector(result.corpus["a"]).values == (0.0,) * 5

    def test_permuted_schema_normalized_to_canonical(self):
        # same recipe written under two schema orders indexes identically
        plain = parse_corpus(corpus_text(record("a", nutrients=[1.0, 2.0, 3.0, 4.0, 5.0])))
        permuted_schema = ["sugars", "fat", "protein", "energy", "saturates"]
        permuted_values = [5.0, 1.0, 3.0, 2.0, 4.0]
        permuted = parse_corpus(
            corpus_text(record("a", nutrients=permuted_values), schema=permuted_schema)
        )
        assert plain.corpus.nutrient_schema == permuted.corpus.nutrient_schema
        assert (
            plain.corpus["a"].nutrition_per_100g == permuted.corpus["a"].nutrition_per_100g
        )

    def test_canonical_order_known_then_unknown(self):
        assert canonical_schema_order(["sugars", "zinc", "fat", "energy"]) == (
            "fat",
            "energy",
            "sugars",
            "zinc",
        )


class TestRoundTrip:
    def test_parse_serialize_parse_identity(self):
        source = corpus_text(
            record("a"),
            record(
                "b",
                ingredients=[
                    {
                        "descriptor": "Spices, Pepper, Black",
                        "nutrients": [1, 2, 3, 4, 5],
                        "quantity": {"amount": 2.0, "unit": "tsp"},
                    }
                ],
            ),
        )
        first = parse_corpus(source)
        buffer = io.StringIO()
        serialize_corpus(first.corpus, buffer)
        buffer.seek(0)
        second = parse_corpus(buffer)
        assert second.rejects == []
        assert second.corpus == first.corpus

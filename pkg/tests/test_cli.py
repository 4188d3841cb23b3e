"""Command-line behavior: exit codes, reports, determinism, config."""

import json
import os

import pytest

from recipesim.cli import main

DATA = os.path.join(os.path.dirname(__file__), "..", "data")
CORPUS = os.path.join(DATA, "mini_corpus.jsonl")
EMB_A = os.path.join(DATA, "embeddings_a.txt")
EMB_B = os.path.join(DATA, "embeddings_b.bin")


def tiny_corpus_file(tmp_path, records=None, name="c.jsonl"):
    header = {"nutrient_schema": ["fat", "energy", "protein", "saturates", "sugars"]}
    if records is None:
        records = []
        for i, rid in enumerate(["alpha", "beta", "gamma"]):
            records.append(
                {
                    "id": rid,
                    "title": rid.title(),
                    "ingredients": [
                        {"descriptor": "salt, table", "nutrients": [0.1, 0.2, 0.3, 0.1, 0.5]},
                        {"descriptor": "onions, raw", "nutrients": [1.0, 2.0, 0.3, 0.1, 3.0]},
                    ],
                    "instructions": [f"Step one for {rid}", "Serve"],
                    "nutrition_per_100g": [1.0 + i, 2.0, 3.0, 0.5, 4.0 - i],
                }
            )
    path = tmp_path / name
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for record in records:
            fh.write((record if isinstance(record, str) else json.dumps(record)) + "\n")
    return str(path)


def write_embeddings_for(tmp_path, corpus_path):
    from recipesim.corpus import parse_corpus_file
    from recipesim.semantic import fallback_embed, write_embeddings_text

    result = parse_corpus_file(corpus_path)
    texts = {rid: result.corpus[rid].instruction_text() for rid in result.corpus.ids()}
    path_a = str(tmp_path / "ea.txt")
    path_b = str(tmp_path / "eb.txt")
    write_embeddings_text(path_a, "model_a", {r: fallback_embed(t, 24).values for r, t in texts.items()})
    write_embeddings_text(path_b, "model_b", {r: fallback_embed(t, 16).values for r, t in texts.items()})
    return path_a, path_b


class TestIngest:
    def test_valid_file_exit_zero(self, tmp_path, capsys):
        assert main(["ingest", tiny_corpus_file(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "accepted: 3" in out
        assert "rejected: 0" in out

    def test_duplicate_id_exit_one(self, tmp_path, capsys):
        dup = {
            "id": "alpha",
            "title": "Alpha Again",
            "ingredients": [{"descriptor": "honey", "nutrients": [0, 0, 0, 0, 1]}],
            "instructions": ["Stir"],
            "nutrition_per_100g": [0, 0, 0, 0, 1],
        }
        path = tiny_corpus_file(tmp_path)
        with open(path, "a") as fh:
            fh.write(json.dumps(dup) + "\n")
        assert main(["ingest", path]) == 1
        assert "duplicate id" in capsys.readouterr().err

    def test_reject_report_lists_line_numbers(self, tmp_path, capsys):
        path = tiny_corpus_file(tmp_path)
        with open(path, "a") as fh:
            fh.write("{broken\n")
        assert main(["ingest", path]) == 0
        out = capsys.readouterr().out
        assert "rejected: 1" in out
        assert "line 5" in out

    def test_missing_file_exit_one(self, capsys):
        assert main(["ingest", "/nonexistent/corpus.jsonl"]) == 1


class TestScore:
    def test_worker_counts_agree_byte_identical(self, tmp_path):
        corpus = tiny_corpus_file(tmp_path)
        emb_a, emb_b = write_embeddings_for(tmp_path, corpus)
        outputs = []
        for workers, out in (("1", tmp_path / "w1"), ("8", tmp_path / "w8")):
            code = main(
                [
                    "score",
                    "--corpus", corpus,
                    "--embeddings-a", emb_a,
                    "--embeddings-b", emb_b,
                    "--workers", workers,
                    "--out-dir", str(out),
                ]
            )
            assert code == 0
            outputs.append((out / "scores.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_missing_embedding_writes_skip_report(self, tmp_path):
        corpus = tiny_corpus_file(tmp_path)
        emb_a, emb_b = write_embeddings_for(tmp_path, corpus)
        # drop one recipe from the model_a file
        lines = open(emb_a).read().splitlines()
        header = lines[0].split()
        header[2] = "2"
        with open(emb_a, "w") as fh:
            fh.write(" ".join(header) + "\n")
            fh.write("\n".join(lines[1:-1]) + "\n")
        out = tmp_path / "skips"
        assert main(
            [
                "score",
                "--corpus", corpus,
                "--embeddings-a", emb_a,
                "--embeddings-b", emb_b,
                "--out-dir", str(out),
            ]
        ) == 0
        assert (out / "skipped_pairs.csv").exists()
        skip_lines = (out / "skipped_pairs.csv").read_text().splitlines()
        assert len(skip_lines) == 3  # header + two skipped pairs

    def test_invalid_weights_exit_one(self, tmp_path, capsys):
        corpus = tiny_corpus_file(tmp_path)
        emb_a, emb_b = write_embeddings_for(tmp_path, corpus)
        code = main(
            [
                "score",
                "--corpus", corpus,
                "--embeddings-a", emb_a,
                "--embeddings-b", emb_b,
                "--weights", "0.9,0.9,0.9",
            ]
        )
        assert code == 1
        assert "sum to 1" in capsys.readouterr().err

    def test_config_file_supplies_options(self, tmp_path):
        corpus = tiny_corpus_file(tmp_path)
        emb_a, emb_b = write_embeddings_for(tmp_path, corpus)
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {
                    "corpus": corpus,
                    "embeddings-a": emb_a,
                    "embeddings-b": emb_b,
                    "out-dir": str(tmp_path / "fromconfig"),
                }
            )
        )
        assert main(["score", "--config", str(config)]) == 0
        assert (tmp_path / "fromconfig" / "scores.csv").exists()

    def test_env_fallback(self, tmp_path, monkeypatch):
        corpus = tiny_corpus_file(tmp_path)
        emb_a, emb_b = write_embeddings_for(tmp_path, corpus)
        monkeypatch.setenv("RECIPESIM_OUT_DIR", str(tmp_path / "fromenv"))
        assert main(
            [
                "score",
                "--corpus", corpus,
                "--embeddings-a", emb_a,
                "--embeddings-b", emb_b,
            ]
        ) == 0
        assert (tmp_path / "fromenv" / "scores.csv").exists()


class TestAnalyze:
    def scored(self, tmp_path):
        corpus = tiny_corpus_file(tmp_path)
        emb_a, emb_b = write_embeddings_for(tmp_path, corpus)
        out = tmp_path / "scored"
        main(
            [
                "score",
                "--corpus", corpus,
                "--embeddings-a", emb_a,
                "--embeddings-b", emb_b,
                "--out-dir", str(out),
            ]
        )
        return str(out / "scores.csv")

    def test_emits_selected_reports(self, tmp_path):
        table = self.scored(tmp_path)
        out = tmp_path / "reports"
        code = main(
            [
                "analyze",
                "--table", table,
                "--reports", "stats,failures",
                "--no-figures",
                "--out-dir", str(out),
            ]
        )
        assert code == 0
        assert sorted(p.name for p in out.iterdir()) == ["failures.csv", "stats.csv"]

    def test_figures_rendered_alongside_reports(self, tmp_path):
        table = self.scored(tmp_path)
        out = tmp_path / "figs"
        assert main(["analyze", "--table", table, "--out-dir", str(out)]) == 0
        names = {p.name for p in out.iterdir()}
        assert {"stats.csv", "correlation.png", "distributions.png"} <= names

    def test_empty_table_exit_one(self, tmp_path, capsys):
        empty = tmp_path / "empty.csv"
        empty.write_text(
            "main_id,secondary_id,sem_a,sem_b,lexical,nutr_recipe,nutr_ingredient,sem_avg,nutr_avg,fused\n"
        )
        assert main(["analyze", "--table", str(empty), "--no-figures"]) == 1
        assert "empty" in capsys.readouterr().err

    def test_custom_rules_file(self, tmp_path):
        table = self.scored(tmp_path)
        rules = tmp_path / "rules.json"
        rules.write_text(
            json.dumps(
                [
                    {
                        "name": "everything",
                        "clauses": [{"metric": "fused", "comparator": ">=", "threshold": 0.0}],
                    }
                ]
            )
        )
        out = tmp_path / "custom"
        assert main(
            [
                "analyze",
                "--table", table,
                "--rules", str(rules),
                "--reports", "failures",
                "--no-figures",
                "--out-dir", str(out),
            ]
        ) == 0
        text = (out / "failures.csv").read_text()
        assert "everything" in text
        assert ",3," in text  # all three pairs match

    def test_unknown_report_exit_one(self, tmp_path, capsys):
        table = self.scored(tmp_path)
        assert main(["analyze", "--table", table, "--reports", "nope"]) == 1


class TestTrain:
    def fixture(self, tmp_path, n=60):
        import random

        rng = random.Random(3)
        table_path = tmp_path / "table.csv"
        gt_path = tmp_path / "gt.csv"
        header = "main_id,secondary_id,sem_a,sem_b,lexical,nutr_recipe,nutr_ingredient,sem_avg,nutr_avg,fused\n"
        with open(table_path, "w") as table, open(gt_path, "w") as gt:
            table.write(header)
            gt.write("main_id,secondary_id,label\n")
            for i in range(n):
                lexical = rng.uniform(0, 0.4) if i % 2 else rng.uniform(0.6, 1.0)
                label = 0 if i % 2 else 1
                sem = rng.random()
                nutr = rng.random()
                table.write(
                    f"m{i:03d},s{i:03d},{sem:.6f},{sem:.6f},{lexical:.6f},{nutr:.6f},{nutr:.6f},{sem:.6f},{nutr:.6f},0.500000\n"
                )
                gt.write(f"m{i:03d},s{i:03d},{label}\n")
        return str(gt_path), str(table_path)

    def test_logistic_training_run(self, tmp_path, capsys):
        gt, table = self.fixture(tmp_path)
        out = tmp_path / "report.csv"
        code = main(
            ["train", "--ground-truth", gt, "--table", table, "--model", "logistic",
             "--seed", "7", "--out", str(out)]
        )
        assert code == 0
        text = out.read_text()
        assert "model,kind,logistic" in text
        assert "importance_pct,lexical" in text

    def test_forest_seed_reproducibility(self, tmp_path):
        gt, table = self.fixture(tmp_path)
        reports = []
        for name in ("r1.csv", "r2.csv"):
            out = tmp_path / name
            assert main(
                ["train", "--ground-truth", gt, "--table", table, "--model", "forest",
                 "--seed", "11", "--trees", "20", "--out", str(out)]
            ) == 0
            reports.append(out.read_text())
        assert reports[0] == reports[1]

    def test_missing_feature_rows_warned_and_excluded(self, tmp_path, capsys):
        gt, table = self.fixture(tmp_path)
        with open(gt, "a") as fh:
            fh.write("ghost,pair,1\n")
        out = tmp_path / "r.csv"
        assert main(
            ["train", "--ground-truth", gt, "--table", table, "--model", "logistic",
             "--out", str(out)]
        ) == 0
        assert "lack scores" in capsys.readouterr().err

    def test_unreadable_ground_truth_exit_one(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong,header\n")
        _, table = self.fixture(tmp_path)
        assert main(["train", "--ground-truth", str(bad), "--table", table]) == 1


class TestUsageErrors:
    def test_unknown_command_exit_one(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1

    def test_missing_required_option_exit_one(self, capsys):
        assert main(["score"]) == 1
        assert "--corpus" in capsys.readouterr().err

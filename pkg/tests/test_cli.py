"""Command-line entry points, driven in-process."""

import pytest

from twentyq.cli import main


class TestSimulate:
    def test_prints_summary_line(self, capsys):
        rc = main(["simulate", "--games", "4", "--epsilon", "0.0", "--seed", "1"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "games=4" in out
        assert "win_rate=1.0000" in out
        assert "mean_questions=" in out

    def test_writes_transcripts_and_curve(self, tmp_path, capsys):
        out = tmp_path / "games.jsonl"
        curve = tmp_path / "curve.csv"
        rc = main(
            [
                "simulate",
                "--games",
                "3",
                "--epsilon",
                "0.0",
                "--out",
                str(out),
                "--curve-out",
                str(curve),
            ]
        )
        assert rc == 0
        assert len(out.read_text().splitlines()) == 3
        assert curve.read_text().startswith("t,win_rate")

    def test_binary_strategy_supported(self, capsys):
        rc = main(
            ["simulate", "--games", "3", "--strategy", "binary_search_oracle"]
        )
        assert rc == 0
        assert "win_rate=1.0000" in capsys.readouterr().out

    def test_learned_answerer_needs_model_flag(self, capsys):
        rc = main(["simulate", "--games", "2", "--answerer", "learned"])
        assert rc == 2
        err = capsys.readouterr().err
        assert err.startswith("twentyq: error:")
        assert "--model" in err

    def test_learned_answerer_runs_from_saved_weights(self, tmp_path, capsys):
        data = tmp_path / "pairs.jsonl"
        weights = tmp_path / "model.tsv"
        assert main(["gen-data", "--scenes", "80", "--seed", "3", "--out", str(data)]) == 0
        assert (
            main(
                [
                    "train-answerer",
                    "--data",
                    str(data),
                    "--out",
                    str(weights),
                    "--epochs",
                    "10",
                ]
            )
            == 0
        )
        capsys.readouterr()
        rc = main(
            [
                "simulate",
                "--games",
                "4",
                "--k",
                "4",
                "--seed",
                "2",
                "--answerer",
                "learned",
                "--model",
                str(weights),
            ]
        )
        assert rc == 0
        assert "games=4" in capsys.readouterr().out

    def test_missing_model_file_reports_cleanly(self, tmp_path, capsys):
        rc = main(
            [
                "simulate",
                "--games",
                "2",
                "--answerer",
                "learned",
                "--model",
                str(tmp_path / "absent.tsv"),
            ]
        )
        assert rc == 2
        assert "twentyq: error:" in capsys.readouterr().err


class TestBatchReports:
    def test_table1_csv(self, tmp_path, capsys):
        out = tmp_path / "table1.csv"
        rc = main(["table1", "--games", "3", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "row,mean_entropy_bits,std,ci_lo,ci_hi,n"
        assert len(lines) == 5

    def test_sweep_csv_to_stdout(self, capsys):
        rc = main(
            ["sweep", "--games", "3", "--thresholds", "2.0,1.0", "--epsilon", "0.0"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("threshold_bits,")
        assert len(out.strip().splitlines()) == 3

    def test_compare_what_csv(self, capsys):
        rc = main(["compare-what", "--games", "4", "--k", "6", "--seed", "0"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("arm,win_rate")
        assert "polar_only," in out and "polar_and_what," in out


class TestClassifierPipeline:
    def test_gen_train_eval(self, tmp_path, capsys):
        data = tmp_path / "pairs.jsonl"
        rc = main(["gen-data", "--scenes", "30", "--seed", "1", "--out", str(data)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "pairs=" in out and "false_negative_rate=" in out

        model = tmp_path / "model.tsv"
        rc = main(
            [
                "train-answerer",
                "--data",
                str(data),
                "--out",
                str(model),
                "--epochs",
                "5",
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "final_loss=" in out
        assert "heldout_accuracy=" in out
        assert model.exists()

        rc = main(["eval-answerer", "--data", str(data), "--model", str(model)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "accuracy=" in out
        assert "false_neg=" in out


class TestPlay:
    def test_terminal_game_with_na_answers(self, capsys, monkeypatch):
        answers = iter([""] * 3 + ["y"])

        def fake_input(prompt=""):
            if "Was I right?" in prompt:
                return "y"
            return next(answers, "")

        monkeypatch.setattr("builtins.input", fake_input)
        rc = main(
            [
                "play",
                "--k",
                "4",
                "--seed",
                "3",
                "--max-questions",
                "3",
                "--epsilon",
                "0.0",
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "Think of one of these 4 scenes" in out
        assert "Q1:" in out
        assert "My guess: scene" in out
        assert "Good game." in out

    def test_alias_resolution_retries_bad_input(self, capsys, monkeypatch):
        answers = iter(["bogus", "n", "y"])

        def fake_input(prompt=""):
            if "Was I right?" in prompt:
                return "n"
            return next(answers)

        monkeypatch.setattr("builtins.input", fake_input)
        rc = main(
            [
                "play",
                "--k",
                "2",
                "--seed",
                "3",
                "--max-questions",
                "1",
                "--epsilon",
                "0.0",
            ]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "unrecognized answer" in out
        assert "Well played" in out


class TestParser:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            main([])

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            main(["teleport"])

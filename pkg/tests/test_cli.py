"""End-to-end tests of the command-line interface."""

import json

import pytest

from biquat_kge.cli import build_parser, main
from biquat_kge.algebra import random_unit_biquaternion
from biquat_kge.data import write_split
from biquat_kge.synthetic import toy_graph


@pytest.fixture(scope="module")
def triple_files(tmp_path_factory):
    """Toy graph written as train/valid/test TSV files."""
    root = tmp_path_factory.mktemp("triples")
    train_names, held_out = toy_graph(seed=0)
    paths = {
        "train": root / "train.tsv",
        "valid": root / "valid.tsv",
        "test": root / "test.tsv",
    }
    write_split(paths["train"], train_names)
    write_split(paths["valid"], held_out[:5])
    write_split(paths["test"], held_out[5:])
    return paths


class TestTrainCommand:
    def test_spec_invocation(self, triple_files, tmp_path, capsys):
        ckpt = tmp_path / "ckpt.bq"
        code = main([
            "train", "--train", str(triple_files["train"]),
            "--valid", str(triple_files["valid"]),
            "--test", str(triple_files["test"]),
            "--dim", "8", "--epochs", "200", "--lr", "0.1", "--batch", "300",
            "--lambda", "0.15", "--lambda1", "2.0", "--lambda2", "0.5",
            "--seed", "7", "--out", str(ckpt),
        ])
        assert code == 0
        assert ckpt.exists()
        log_path = ckpt.parent / (ckpt.name + ".log.jsonl")
        assert log_path.exists()
        entries = [json.loads(line) for line in log_path.read_text().splitlines()]
        assert len(entries) == 200
        assert all("mean_batch_loss" in e for e in entries)
        assert any("valid_mrr" in e for e in entries)
        out = capsys.readouterr().out
        assert "seed=7" in out

    def test_missing_train_is_usage_error(self, tmp_path):
        assert main(["train", "--out", str(tmp_path / "x.bq")]) == 2

    def test_defaults_match_tuned_settings(self, triple_files):
        args = build_parser().parse_args([
            "train", "--train", str(triple_files["train"]),
            "--valid", str(triple_files["valid"]), "--out", "x.bq"])
        assert (args.epochs, args.lr, args.batch, args.dim) == (200, 0.1, 300, 128)
        assert (args.lam, args.lambda1, args.lambda2) == (0.15, 2.0, 0.5)

    def test_nonexistent_input_is_usage_error(self, tmp_path):
        assert main(["train", "--train", str(tmp_path / "absent.tsv"),
                     "--valid", str(tmp_path / "absent.tsv"),
                     "--out", str(tmp_path / "x.bq")]) == 2

    def test_repeated_runs_are_deterministic(self, triple_files, tmp_path):
        """Same seed and flags: identical checkpoint bytes and loss values."""
        outputs = []
        for name in ("a.bq", "b.bq"):
            path = tmp_path / name
            assert main([
                "train", "--train", str(triple_files["train"]),
                "--valid", str(triple_files["valid"]),
                "--dim", "4", "--epochs", "8", "--batch", "25",
                "--eval-every", "4", "--seed", "21", "--out", str(path),
            ]) == 0
            log = (tmp_path / (name + ".log.jsonl")).read_text().splitlines()
            losses = [json.loads(line)["mean_batch_loss"] for line in log]
            outputs.append((path.read_bytes(), losses))
        assert outputs[0] == outputs[1]


@pytest.fixture(scope="module")
def trained_checkpoint(triple_files, tmp_path_factory):
    ckpt = tmp_path_factory.mktemp("ckpt") / "model.bq"
    code = main([
        "train", "--train", str(triple_files["train"]),
        "--valid", str(triple_files["valid"]),
        "--test", str(triple_files["test"]),
        "--dim", "8", "--epochs", "40", "--batch", "25",
        "--eval-every", "10", "--seed", "3", "--out", str(ckpt),
    ])
    assert code == 0
    return ckpt


class TestEvalCommand:
    def test_writes_reports(self, triple_files, trained_checkpoint, tmp_path,
                            capsys):
        report_json = tmp_path / "report.json"
        csv_path = tmp_path / "relations.csv"
        code = main([
            "eval", "--ckpt", str(trained_checkpoint),
            "--train", str(triple_files["train"]),
            "--valid", str(triple_files["valid"]),
            "--test", str(triple_files["test"]),
            "--split", "test",
            "--report-json", str(report_json),
            "--per-relation-csv", str(csv_path),
        ])
        assert code == 0
        assert "MRR" in capsys.readouterr().out
        payload = json.loads(report_json.read_text())
        assert payload["split"] == "test"
        assert 0.0 <= payload["mrr"] <= 1.0
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "relation,count,mrr,hits10"
        assert len(lines) > 1

    def test_dimension_mismatch_fails(self, triple_files, trained_checkpoint,
                                      tmp_path):
        partial = tmp_path / "partial.tsv"
        partial.write_text("a\tr\tb\n")
        code = main(["eval", "--ckpt", str(trained_checkpoint),
                     "--train", str(partial), "--split", "train"])
        assert code == 1

    def test_missing_split_fails_cleanly(self, triple_files,
                                         trained_checkpoint, capsys):
        """Asking for the valid split without a valid file is exit 1."""
        code = main(["eval", "--ckpt", str(trained_checkpoint),
                     "--train", str(triple_files["train"]),
                     "--test", str(triple_files["test"]),
                     "--split", "valid"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestGradcheckCommand:
    def test_default_passes(self, capsys):
        assert main(["gradcheck", "--seed", "0"]) == 0
        out = capsys.readouterr().out
        assert "max relative error" in out and "seed=0" in out

    def test_corrupted_gradient_fails(self, capsys):
        assert main(["gradcheck", "--seed", "0", "--corrupt"]) == 1
        assert "worst coordinate" in capsys.readouterr().out

    def test_coarse_step_passes_relaxed_threshold(self):
        assert main(["gradcheck", "--seed", "1", "--steps", "1e-3",
                     "--threshold", "1e-2"]) == 0


class TestFactorizeCommand:
    def test_unit_quaternion_prints_zero_phi(self, capsys):
        code = main(["factorize", "0.5", "0", "0.5", "0",
                     "0.5", "0", "0.5", "0"])
        assert code == 0
        out = capsys.readouterr().out
        assert "phi   = 0" in out
        assert "degenerate" in out

    def test_random_unit_reconstruction_error_is_tiny(self, rng, capsys):
        q = random_unit_biquaternion(rng)
        coeffs = [q.w.real, q.w.imag, q.x.real, q.x.imag,
                  q.y.real, q.y.imag, q.z.real, q.z.imag]
        assert main(["factorize"] + [repr(c) for c in coeffs]) == 0
        out = capsys.readouterr().out
        error = float(out.rsplit("=", 1)[1])
        assert error < 1e-9

    def test_non_unit_is_an_error(self, capsys):
        assert main(["factorize", "2", "0", "0", "0", "0", "0", "0", "0"]) == 1
        assert "normalize" in capsys.readouterr().err

    def test_normalize_flag_accepts_non_unit(self):
        assert main(["factorize", "2", "1", "0.5", "0", "1", "0", "0", "0.25",
                     "--normalize"]) == 0


class TestRotateDemoCommand:
    def test_default_csv(self, capsys):
        assert main(["rotate-demo"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "phi,real_x,real_y,imag_x,imag_y"
        assert len(lines) == 82
        assert "0.0,1.0,3.0,2.0,4.0" in lines

    def test_zero_phi_row_is_exact(self, capsys):
        assert main(["rotate-demo", "--phi-min", "-2", "--phi-max", "2",
                     "--steps", "81"]) == 0
        rows = [line.split(",") for line
                in capsys.readouterr().out.splitlines()[1:]]
        zero_rows = [r for r in rows if float(r[0]) == 0.0]
        assert len(zero_rows) == 1
        assert [float(v) for v in zero_rows[0][1:]] == [1.0, 3.0, 2.0, 4.0]

    def test_output_file(self, tmp_path):
        out = tmp_path / "rows.csv"
        assert main(["rotate-demo", "--steps", "5", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 6

    def test_too_few_steps_is_usage_error(self):
        assert main(["rotate-demo", "--steps", "1"]) == 2


class TestSelftestCommand:
    def test_passes(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 6
        assert "seed=" in out


class TestHarness:
    def test_help_exits_zero(self):
        assert main(["--help"]) == 0

    def test_unknown_command_is_usage_error(self):
        assert main(["frobnicate"]) == 2

"""Command-line runs, manifests, replay and exit codes."""
from __future__ import annotations

import json

import pytest

from app import cli
from core.errors import SingularFitError
from core.result_exporter import read_manifest


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for name in ("LSQSUBDIV_SEED", "LSQSUBDIV_DEFAULT_K", "LSQSUBDIV_REGULARITY_ITERATIONS"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("LSQSUBDIV_OUTPUT_DIR", str(tmp_path / "default"))


def run(*argv: str) -> int:
    return cli.main(list(argv))


DENOISE = ["denoise", "--function", "fig4", "--family", "dual-even", "--n", "2", "--sigma", "0.4", "--K", "3"]


class TestCommands:
    def test_mask(self, tmp_path, capsys):
        out = tmp_path / "mask"
        assert run("mask", "--family", "primal-even", "--n", "2", "--out", str(out)) == 0
        assert capsys.readouterr().out.strip() == "[3,4,3,4,3,4,3]/12"
        payload = json.loads((out / "mask.json").read_text(encoding="utf-8"))
        assert payload == {
            "family": "primal_even",
            "n": 2,
            "degree": 1,
            "first_index": -3,
            "numerators": [3, 4, 3, 4, 3, 4, 3],
            "denominator": 12,
        }
        manifest = read_manifest(out / "manifest.json")
        assert manifest.command == "mask"
        assert manifest.outputs == ["mask.json"]
        assert manifest.parameters == {"degree": 1, "family": "primal-even", "n": 2}
        assert "--out" not in manifest.argv

    def test_even_degree_prints_next_odd_mask(self, tmp_path, capsys):
        assert run("mask", "--family", "primal-even", "--n", "2", "--degree", "2", "--out", str(tmp_path / "d2")) == 0
        assert run("mask", "--family", "primal-even", "--n", "2", "--degree", "3", "--out", str(tmp_path / "d3")) == 0
        even, odd = capsys.readouterr().out.split()
        assert even == odd == "[-1,0,9,16,9,0,-1]/16"

    def test_default_output_directory(self, tmp_path):
        assert run("mask", "--family", "dual-odd", "--n", "1") == 0
        assert (tmp_path / "default" / "mask" / "mask.json").exists()

    def test_regularity(self, tmp_path, capsys):
        out = tmp_path / "reg"
        assert run("regularity", "--family", "primal-even", "--n", "1", "2", "--L", "4", "--out", str(out)) == 0
        lines = (out / "regularity.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "family,n,degree,m,L,iterated_norm,lower_bound"
        assert len(lines) == 3
        assert capsys.readouterr().out.splitlines()[0] == "1\t1.000"

    def test_regularity_uses_configured_iterations(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LSQSUBDIV_REGULARITY_ITERATIONS", "3")
        out = tmp_path / "reg"
        assert run("regularity", "--family", "primal-even", "--n", "1", "--out", str(out)) == 0
        row = (out / "regularity.csv").read_text(encoding="utf-8").splitlines()[1].split(",")
        assert row[4] == "3"

    def test_blf_and_psi(self, tmp_path):
        assert run("blf", "--family", "primal-even", "--n", "1", "--K", "2", "--out", str(tmp_path / "blf")) == 0
        blf = (tmp_path / "blf" / "blf.csv").read_text(encoding="utf-8").splitlines()
        assert blf[0] == "x,value"
        assert blf[1:] == ["-1.0,0.0", "-0.75,0.25", "-0.5,0.5", "-0.25,0.75", "0.0,1.0", "0.25,0.75", "0.5,0.5", "0.75,0.25", "1.0,0.0"]
        grid = read_manifest(tmp_path / "blf" / "manifest.json").grid
        assert grid == {"step": 0.25, "start": -1.0, "stop": 1.0}

        assert run("psi", "--family", "primal-even", "--n", "2", "--K", "6", "--out", str(tmp_path / "psi")) == 0
        psi_lines = (tmp_path / "psi" / "psi.csv").read_text(encoding="utf-8").splitlines()
        assert psi_lines[0] == "x,value"
        assert len(psi_lines) == 2**6 + 2

    def test_psistats(self, tmp_path, capsys):
        assert run("psistats", "--family", "primal-even", "--n", "2", "--degree", "3", "--out", str(tmp_path)) == 0
        low, high, integral = map(float, capsys.readouterr().out.split())
        assert low == pytest.approx(0.6406, abs=2e-3)
        assert high == pytest.approx(1.0, abs=1e-4)
        assert integral == pytest.approx(0.7990, abs=2e-3)

    def test_conjectures(self, tmp_path):
        assert run("conjectures", "--degrees", "1", "3", "--ns", "3", "5", "--out", str(tmp_path)) == 0
        flags = json.loads((tmp_path / "conjectures.json").read_text(encoding="utf-8"))
        assert flags["max_decreasing_in_n"] == {"1": True, "3": True}
        rows = (tmp_path / "conjectures.csv").read_text(encoding="utf-8").splitlines()
        assert rows[0] == "degree,n,min,max,integral"
        assert len(rows) == 5

    def test_single_conjecture_row(self, tmp_path):
        assert run("conjectures", "--degrees", "1", "--ns", "7", "--out", str(tmp_path)) == 0
        rows = (tmp_path / "conjectures.csv").read_text(encoding="utf-8").splitlines()
        assert len(rows) == 2
        low, high, integral = map(float, rows[1].split(",")[2:])
        assert (low, high, integral) == pytest.approx((0.0591, 0.0592, 0.0591), abs=2e-3)

    def test_denoise(self, tmp_path, capsys):
        assert run(*DENOISE, "--llr", "--bandwidths", "1", "3", "--out", str(tmp_path)) == 0
        errors = json.loads(capsys.readouterr().out)
        assert errors["seed"] == 42
        assert errors["llr_bandwidth"] in (1.0, 3.0)
        manifest = read_manifest(tmp_path / "manifest.json")
        assert manifest.seed == 42
        assert manifest.grid == {"start": 0.0, "stop": 100.0, "step": 0.125}
        assert manifest.outputs[-1] == "errors.json"


class TestReplay:
    def test_replay_is_byte_identical(self, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        assert run(*DENOISE, "--seed", "7", "--out", str(first)) == 0
        assert run("replay", "--manifest", str(first / "manifest.json"), "--out", str(second)) == 0
        names = sorted(p.name for p in first.iterdir())
        assert names == sorted(p.name for p in second.iterdir())
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_environment_seed_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LSQSUBDIV_SEED", "5")
        assert run(*DENOISE, "--seed", "7", "--out", str(tmp_path)) == 0
        manifest = read_manifest(tmp_path / "manifest.json")
        assert manifest.seed == 5
        assert manifest.argv[-2:] == ["--seed", "5"]
        assert "7" not in manifest.argv
        assert json.loads((tmp_path / "errors.json").read_text(encoding="utf-8"))["seed"] == 5

    def test_seed_free_commands_ignore_the_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LSQSUBDIV_SEED", "5")
        assert run("mask", "--family", "primal-even", "--n", "1", "--out", str(tmp_path)) == 0
        assert read_manifest(tmp_path / "manifest.json").seed is None


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["mask", "--family", "quadratic", "--n", "2"],
            ["mask", "--family", "primal-even", "--n", "2", "--degree", "4"],
            ["mask", "--family", "primal-even"],
            ["psi", "--family", "primal-even", "--n", "2", "--K", "3"],
            ["denoise", "--function", "fig99", "--family", "primal-even", "--n", "2", "--sigma", "1"],
            ["regularity", "--family", "primal-even", "--n", "2", "--L", "40"],
        ],
    )
    def test_invalid_input(self, argv, tmp_path):
        assert run(*argv, "--out", str(tmp_path)) == 2

    def test_numerical_failure(self, tmp_path, monkeypatch, capsys):
        def broken(spec):
            raise SingularFitError("rank deficient")

        monkeypatch.setattr(cli, "mask", broken)
        assert run("mask", "--family", "primal-even", "--n", "2", "--out", str(tmp_path)) == 3
        assert "rank deficient" in capsys.readouterr().err

    def test_version(self, capsys):
        assert run("--version") == 0
        assert capsys.readouterr().out.strip() == "1.0.0"

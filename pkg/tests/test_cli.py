import json
import math

import pytest

from hopfcap.cli import OUTPUT_DIR_ENV, RunConfig, main

CHECK_FIELDS = {
    "name", "lhs", "rhs", "abs_err", "rel_err", "tolerance", "passed", "policy", "context",
}

FAST = ["--orders", "24,12,24", "--t-grid", "0.1,0.2"]


def run_verify(tmp_path, *extra):
    out = tmp_path / "report.json"
    code = main(["verify", "--output", str(out), *FAST, *extra])
    return code, out


class TestVerifyCommand:
    def test_hopf_all_pass(self, tmp_path):
        code, out = run_verify(tmp_path, "--field", "hopf")
        assert code == 0
        reports = json.loads(out.read_text())
        assert isinstance(reports, list) and reports
        for r in reports:
            assert set(r) == CHECK_FIELDS
            assert r["passed"] is True

    def test_perturbed_all_pass(self, tmp_path):
        code, out = run_verify(tmp_path, "--field", "perturbed", "--amplitude", "0.5")
        assert code == 0
        names = [r["name"] for r in json.loads(out.read_text())]
        assert "boundary_sigma2_integral" in names
        assert "image_volume_t0.1" in names

    def test_twisted_perturbed_passes_without_image_volume(self, tmp_path):
        code, out = run_verify(
            tmp_path, "--field", "perturbed", "--amplitude", "1.2",
            "--exponent", "2", "--twist", "angular",
        )
        assert code == 0
        names = [r["name"] for r in json.loads(out.read_text())]
        assert not any(n.startswith("image_volume") for n in names)

    def test_failure_exit_code(self, tmp_path):
        code, out = run_verify(
            tmp_path, "--field", "hopf", "--mode", "fd", "--sigma-tol", "1e-14"
        )
        assert code == 1
        assert any(not r["passed"] for r in json.loads(out.read_text()))

    def test_invalid_radius_exit_two(self, tmp_path):
        code, _ = run_verify(tmp_path, "--cap-radius", "3.2")
        assert code == 2

    def test_unknown_flag_exit_two(self):
        assert main(["verify", "--no-such-flag"]) == 2

    def test_missing_subcommand_exit_two(self):
        assert main([]) == 2

    def test_deterministic_output(self, tmp_path):
        _, out1 = run_verify(tmp_path, "--field", "perturbed", "--amplitude", "0.3")
        text1 = out1.read_text()
        out1.unlink()
        _, out2 = run_verify(tmp_path, "--field", "perturbed", "--amplitude", "0.3")
        assert text1 == out2.read_text()

    def test_output_dir_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        code = main(["verify", "--field", "hopf", *FAST])
        assert code == 0
        assert (tmp_path / "verify.json").exists()
        assert capsys.readouterr().out == ""


class TestFunctionalsCommand:
    def test_hopf_half_sphere_values(self, tmp_path):
        out = tmp_path / "f.json"
        code = main([
            "functionals", "--field", "hopf", "--cap-radius", str(math.pi / 2),
            "--orders", "32,16,32", "--output", str(out),
        ])
        assert code == 0
        rows = json.loads(out.read_text())
        assert rows["energy"] == pytest.approx(2.5 * math.pi**2, rel=1e-10)
        assert rows["volume"] == pytest.approx(2 * math.pi**2, rel=1e-10)
        assert rows["energy_surplus"] == pytest.approx(0.0, abs=1e-9)

    def test_zero_amplitude_matches_hopf(self, tmp_path):
        outs = []
        for i, args in enumerate(
            [["--field", "hopf"], ["--field", "perturbed", "--amplitude", "0"]]
        ):
            out = tmp_path / f"f{i}.json"
            main(["functionals", *args, "--orders", "24,12,24", "--output", str(out)])
            outs.append(json.loads(out.read_text()))
        for key in ("energy", "volume", "hopf_energy", "hopf_volume"):
            assert outs[0][key] == outs[1][key]

    def test_csv_format(self, tmp_path):
        out = tmp_path / "f.csv"
        code = main([
            "functionals", "--field", "hopf", "--orders", "24,12,24",
            "--format", "csv", "--output", str(out),
        ])
        assert code == 0
        header, values = out.read_text().strip().splitlines()
        assert header.split(",")[:2] == ["field", "energy"]
        assert len(values.split(",")) == len(header.split(","))

    def test_stdout_by_default(self, capsys):
        code = main(["functionals", "--field", "hopf", "--orders", "24,12,24"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["field"] == "hopf"


class TestSweepCommand:
    def test_default_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--orders", "24,12,24",
            "--amplitudes=-0.5,-0.25,0,0.25,0.5", "--output", str(out),
        ])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "amplitude,energy,volume"
        data = [line.split(",") for line in lines[1:] if not line.startswith("#")]
        assert len(data) == 5
        assert all(len(row) == 3 for row in data)
        footer = lines[-1]
        assert footer.startswith("#")
        assert "argmin_energy=0.0" in footer
        assert "argmin_volume=0.0" in footer

    def test_single_point_grid(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", "--orders", "16,8,16", "--amplitudes", "0", "--output", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len([l for l in lines[1:] if not l.startswith("#")]) == 1

    def test_grid_without_zero_rejected(self):
        assert main(["sweep", "--amplitudes", "0.25,0.5"]) == 2


class TestRunConfig:
    def test_round_trip(self, tmp_path):
        out = tmp_path / "x.json"
        # Build a config through the parser path, then round-trip it.
        from hopfcap.cli import _build_parser, _config_from_args

        args = _build_parser().parse_args(
            ["verify", "--field", "perturbed", "--amplitude", "0.7", "--output", str(out)]
        )
        config = _config_from_args(args)
        back = RunConfig.from_dict(json.loads(json.dumps(config.to_dict())))
        assert back == config

import json
import math

import pytest

from qflux import cli
from qflux import closedform as cf
from qflux import scenarios as sc
from qflux.errors import BudgetExceededError, ConfigError


class TestScenarioConfig:
    def test_unknown_kind(self):
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="nope")

    def test_missing_kind(self):
        with pytest.raises(ConfigError):
            sc.ScenarioConfig.from_mapping({"seed": 1})

    def test_unknown_field(self):
        with pytest.raises(ConfigError):
            sc.ScenarioConfig.from_mapping({"kind": "sweep", "bogus": 3})

    def test_rational_denominator_bound(self):
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="sweep", omega_f="100/101")

    def test_irrational_frequency_rejected(self):
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="sweep", omega_f=math.sqrt(2))

    def test_rational_strings_accepted(self):
        config = sc.ScenarioConfig(kind="sweep", omega_f="5/2")
        assert float(config.omega_f) == 2.5

    def test_grid_validation(self):
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="sweep", chi_grid=(0.5, -1.0))
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="sweep", p_grid=(1.5,))

    def test_cutoff_validation(self):
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="global-ft", system_cutoff=1)

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv("QFLUX_MAX_DIM", "16")
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="global-ft", ladder_dim=32)
        config = sc.ScenarioConfig(kind="global-ft", ladder_dim=12,
                                   system_cutoff=8)
        assert config.ladder_dim == 12

    def test_env_cap_malformed(self, monkeypatch):
        monkeypatch.setenv("QFLUX_MAX_DIM", "many")
        with pytest.raises(ConfigError):
            sc.ScenarioConfig(kind="sweep")

    def test_from_json(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"kind": "figure2", "seed": 5,
                                    "chi_grid": [0.1, 1.0]}))
        config = sc.ScenarioConfig.from_json(path)
        assert config.kind == "figure2" and config.seed == 5

    def test_from_json_malformed(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            sc.ScenarioConfig.from_json(path)


class TestReports:
    def test_report_determinism(self, tmp_path):
        cfg = sc.default_config("global-ft", cases=6, seed=88,
                                system_cutoff=6, ladder_dim=10)
        r1 = sc.run_scenario(cfg)
        r2 = sc.run_scenario(cfg)
        # no wall-clock content anywhere in the payload
        assert "runtime" not in r1.to_json()
        assert r1.to_json() == r2.to_json()

    def test_figure_outputs_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            sc.run_scenario(sc.default_config("figure2", seed=3,
                                              chi_grid=(0.1, 1.0, 3.0),
                                              out_dir=str(out)))
        assert (out1 / "figure2.csv").read_bytes() == \
            (out2 / "figure2.csv").read_bytes()
        assert (out1 / "figure2.json").read_bytes() == \
            (out2 / "figure2.json").read_bytes()

    def test_corrupted_tolerance_names_failing_case(self):
        cfg = sc.default_config("global-ft", cases=4, seed=2,
                                system_cutoff=5, ladder_dim=8, tolerance=0.0)
        report = sc.run_scenario(cfg)
        assert not report.all_passed
        failing = report.failing_cases()
        assert failing and failing[0].key.startswith("case-")

    def test_summary_counts(self):
        cfg = sc.default_config("harmonic-limit")
        report = sc.run_scenario(cfg)
        assert report.summary["cases"] == report.summary["passed"] + \
            report.summary["failed"]


class TestFigureData:
    def test_figure2_rows_recomputable(self, tmp_path):
        cfg = sc.default_config("figure2", chi_grid=(0.01, 0.5, 2.0),
                               out_dir=str(tmp_path))
        report = sc.run_scenario(cfg)
        assert report.all_passed
        header, rows = sc.read_csv(tmp_path / "figure2.csv")
        assert header == ["chi", "dF", "twodF", "dEvac", "dFplus", "dFminus"]
        for chi, df, twodf, devac, dfp, dfm in rows:
            beta = 2.0 * chi
            params = cf.ScenarioParams(beta, 1.0, 1.5)
            assert df == beta * cf.delta_F(params)
            assert dfp == beta * cf.gen_free_energy_pm(params, +1)
            assert dfm == beta * cf.gen_free_energy_pm(params, -1)
            assert twodf == 2.0 * beta * cf.delta_F(params)
            assert devac == beta * cf.delta_E_vac(params)

    def test_figure3_rows_recomputable(self, tmp_path):
        cfg = sc.default_config("figure3", chi_grid=(0.05, 0.2),
                               out_dir=str(tmp_path))
        report = sc.run_scenario(cfg)
        assert report.all_passed
        header, rows = sc.read_csv(tmp_path / "figure3.csv")
        assert header[:2] == ["chi", "W"]
        for chi, work, r_p, r_m, rhs_p, rhs_m, classical in rows:
            params = cf.ScenarioParams(2.0 * chi, 1.0, 5.0)
            if r_p is not None:
                assert r_p == cf.prefactor_R(work, params, +1)
            assert r_m == cf.prefactor_R(work, params, -1)
            assert classical == math.exp(2.0 * chi * (work - cf.delta_F(params)))

    def test_figure4_rows_recomputable(self, tmp_path):
        cfg = sc.default_config("figure4", chi_grid=(0.2, 1.0),
                               p_grid=(0.3, 0.6), out_dir=str(tmp_path))
        report = sc.run_scenario(cfg)
        assert report.all_passed
        _, rows = sc.read_csv(tmp_path / "figure4.csv")
        for chi, p, q_a, q_s in rows:
            assert q_a == cf.q_align(p, 0.8, chi)
            assert q_s == cf.q_size(p, chi)

    def test_gnuplot_artifacts(self, tmp_path):
        sc.run_scenario(sc.default_config("figure4", chi_grid=(0.5,),
                                          out_dir=str(tmp_path)))
        script = (tmp_path / "figure4.gp").read_text()
        assert "figure4.csv" in script


class TestVerifyAll:
    def test_budget_guard(self):
        with pytest.raises(BudgetExceededError):
            sc.verify_all(seed=1, budget_seconds=-1.0)

    def test_report_bytes_deterministic_in_seed(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        r1 = sc.verify_all(seed=77, out_dir=str(out1))
        r2 = sc.verify_all(seed=77, out_dir=str(out2))
        assert (out1 / "verify.json").read_bytes() == \
            (out2 / "verify.json").read_bytes()
        # the expected-green suites hold at their tolerances; the closed-form
        # photon-number suites report their failure honestly
        suites = r1["suites"]
        for kind in ("global-ft", "figure2", "figure3", "figure4",
                     "crooks-binomial-align", "crooks-binomial-size",
                     "harmonic-limit", "sweep"):
            assert suites[kind]["summary"]["all_passed"], kind
        assert not r1["all_passed"]
        assert not suites["crooks-added"]["summary"]["all_passed"]


class TestCli:
    def test_figure2_exit_zero(self, tmp_path, capsys):
        code = cli.main(["figure2", "--out", str(tmp_path), "--seed", "9"])
        assert code == 0
        assert (tmp_path / "figure2.csv").exists()
        assert (tmp_path / "figure2.json").exists()
        assert "PASS figure2" in capsys.readouterr().out

    def test_jarzynski_reports_failure_honestly(self, tmp_path, capsys):
        # closed-form prefactor does not reproduce lattice dynamics: exit 1
        code = cli.main(["jarzynski", "--out", str(tmp_path), "--seed", "4"])
        assert code == 1
        out = capsys.readouterr().out
        assert "FAIL jarzynski" in out

    def test_config_error_exit_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"kind": "figure2", "omega_f": "1/999"}))
        code = cli.main(["figure2", "--config", str(bad), "--out", str(tmp_path)])
        assert code == 2
        assert "config error" in capsys.readouterr().err

    def test_kind_mismatch_exit_two(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"kind": "figure3"}))
        assert cli.main(["figure2", "--config", str(cfg),
                         "--out", str(tmp_path)]) == 2

    def test_domain_error_exit_three(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"kind": "figure4", "p_grid": [0.0]}))
        code = cli.main(["figure4", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 3
        assert "numeric error" in capsys.readouterr().err

    def test_tolerance_override_forces_failure(self, tmp_path, capsys):
        code = cli.main(["figure2", "--out", str(tmp_path),
                         "--tolerance", "0"])
        assert code == 1

    def test_config_file_drives_sweep(self, tmp_path):
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps({"kind": "sweep", "chi_grid": [0.2, 0.9],
                                   "omega_f": 2}))
        code = cli.main(["sweep", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        header, rows = sc.read_csv(tmp_path / "sweep.csv")
        assert len(rows) == 2

import csv
import math
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracle
from thermalops import cli
from thermalops.errors import ConfigError, UnknownParameter
from thermalops.experiments.config import ScenarioConfig, parse_config
from thermalops.experiments.csvio import SCHEMA_VERSION, columns, render_csv
from thermalops.experiments.runner import (
    IDENTITIES,
    run_scenario,
    run_sweep,
    sweep_configs,
    verify_all,
    verify_configs,
)
from thermalops.matrix_io import format_matrices, parse_matrices, parse_matrix, read_matrices
from thermalops.report import ProcessReport

GOLDEN = Path(__file__).parent / "golden"
QUARTER = GOLDEN / "quarter_swap.cfg"


def read_rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


class TestConfig:
    def test_defaults(self):
        cfg = parse_config("input_probs = [0.9, 0.1]\n")
        assert cfg.ds == cfg.db == 2
        assert cfg.spectrum_b == (0.0, 1.0)
        assert cfg.operation == "random_to"

    def test_bath_tiling(self):
        cfg = ScenarioConfig(spectrum_s=(0.0, 1.0), db=4, input_probs=(0.5, 0.5))
        assert cfg.spectrum_b == (0.0, 1.0, 0.0, 1.0)

    def test_complex_amplitudes(self):
        cfg = parse_config('input = "pure"\ninput_amplitudes = [0.6, [0.0, 0.8]]\n')
        assert cfg.input_amplitudes == (0.6 + 0j, 0.8j)

    def test_round_trip(self):
        cfg = ScenarioConfig(spectrum_s=(0.0, 1.0, 2.5), input="pure",
                             input_amplitudes=(0.6, 0.0, 0.8j), beta=0.3, operation="general_unitary",
                             bath="random_mixed", op_seed=17)
        assert parse_config(cfg.to_text()) == cfg

    @pytest.mark.parametrize("text", [
        "nonsense\n",
        "colour = 1\n",
        "beta = 1\nbeta = 2\n",
        "beta = [1\n",
        "beta = 0\ninput_probs = [0.5, 0.5]\n",
        'input = "thermal"\n',
        'input_probs = [0.7, 0.7]\n',
        'input = "pure"\ninput_amplitudes = [1, 1]\n',
        'bath = "random_mixed"\ninput_probs = [0.5, 0.5]\n',
        'dephasing = "full"\ninput_probs = [0.5, 0.5]\n',
        'ds = 3\ninput_probs = [0.5, 0.5]\n',
        'op_seed = 1.5\ninput_probs = [0.5, 0.5]\n',
    ])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)


class TestRunScenario:
    def test_quarter_swap_matches_oracle(self):
        rec = run_scenario(parse_config(QUARTER.read_text()))
        assert rec.passed
        ref = oracle.report([0, 1], [0, 1], 1.0, _swap(math.pi / 4), np.diag([0.9, 0.1]))
        got = rec.report.as_dict()
        for name in ProcessReport.field_names():
            assert got[name] == pytest.approx(ref[name], abs=1e-9), name

    def test_general_unitary_skips_thermal_identities(self):
        cfg = ScenarioConfig(operation="general_unitary", bath="random_mixed", input="random_mixed")
        rec = run_scenario(cfg)
        assert "energy_preserving" not in rec.checks
        assert "mi_entropy_sum" in rec.checks
        assert rec.passed

    def test_failures_listed_at_tiny_tolerance(self):
        rec = run_scenario(parse_config(QUARTER.read_text()).replace(tolerance=1e-30))
        assert not rec.passed
        assert rec.failures

    def test_deterministic(self):
        cfg = ScenarioConfig(spectrum_s=(0.0, 1.0, 2.0), input="random_mixed", op_seed=4, input_seed=9)
        a, b = run_scenario(cfg), run_scenario(cfg)
        assert render_csv([a], timestamp=False) == render_csv([b], timestamp=False)


def _swap(theta):
    c, s = math.cos(theta), math.sin(theta)
    return c * np.eye(4) - 1j * s * np.eye(4)[[0, 2, 1, 3]]


class TestSweep:
    def test_theta(self):
        base = parse_config(QUARTER.read_text())
        recs = run_sweep(base, "theta", [0, math.pi / 8, math.pi / 4, math.pi / 2])
        sirr = [r.report.sirr_new for r in recs]
        assert sirr[0] == pytest.approx(0, abs=1e-12)
        assert sirr[-1] == pytest.approx(0, abs=1e-12)
        assert sirr[1] > 1e-4 and sirr[2] > 1e-4
        assert all(r.passed for r in recs)

    def test_beta_gibbs_input(self):
        base = ScenarioConfig(spectrum_s=(0.0, 1.0, 2.0), input="gibbs")
        for rec in run_sweep(base, "beta", [0.1, 1.0, 5.0]):
            assert rec.report.sirr_standard == pytest.approx(0, abs=1e-12)
            assert rec.report.sirr_new == pytest.approx(0, abs=1e-12)

    def test_seed_fifty(self):
        base = ScenarioConfig(spectrum_s=(0.0, 1.0), db=4, input="random_mixed")
        recs = run_sweep(base, "seed", range(50))
        assert len(recs) == 50 and all(r.passed for r in recs)
        assert len({r.report.sirr_new for r in recs}) == 50

    def test_db_tiles_bath(self):
        cfgs = sweep_configs(ScenarioConfig(input_probs=(0.5, 0.5)), "db", [1, 3])
        assert cfgs[0].spectrum_b == (0.0,)
        assert cfgs[1].spectrum_b == (0.0, 1.0, 0.0)

    def test_unknown_parameter(self):
        with pytest.raises(UnknownParameter):
            sweep_configs(ScenarioConfig(input_probs=(0.5, 0.5)), "gamma", [1])


class TestCSV:
    def test_columns_stable(self):
        cols = columns()
        assert cols[:2] == ["schema_version", "row"]
        assert cols[-2:] == [f"dev_{IDENTITIES[-1]}", f"ok_{IDENTITIES[-1]}"]
        assert len(cols) == len(set(cols))

    def test_format(self):
        rec = run_scenario(parse_config(QUARTER.read_text()))
        text = render_csv([rec], timestamp=False)
        assert "\r" not in text and text.endswith("\n")
        row = read_rows(text)[0]
        assert row["schema_version"] == str(SCHEMA_VERSION)
        assert row["beta"] == "1.0000000000000000e+00"
        assert row["all_passed"] == "1"
        assert float(row["sirr_new"]) == rec.report.sirr_new

    def test_timestamp_line(self):
        rec = run_scenario(parse_config(QUARTER.read_text()))
        assert render_csv([rec]).startswith("# generated ")

    def test_empty_cells_for_inapplicable(self):
        cfg = ScenarioConfig(operation="general_unitary", bath="random_mixed", input="random_mixed")
        row = read_rows(render_csv([run_scenario(cfg)], timestamp=False))[0]
        assert row["dev_energy_preserving"] == "" and row["ok_energy_preserving"] == ""


class TestVerify:
    def test_matrix_size_and_pass(self):
        assert len(verify_configs()) == 230
        summary = verify_all(configs=verify_configs(dims=[(2, 2)], seeds=(0,)))
        assert summary.passed and summary.exit_status == 0
        assert "PASS" in summary.table()

    def test_tiny_tolerance_fails(self):
        summary = verify_all(1e-30, verify_configs(dims=[(2, 2)], seeds=(0,)))
        assert summary.exit_status == 1
        assert summary.table().rstrip().endswith("FAIL")

    def test_empty(self):
        summary = verify_all(configs=[])
        assert summary.exit_status == 0
        assert "0 scenarios" in summary.table()

    def test_rank_one_degenerate_flags(self):
        summary = verify_all(configs=verify_configs(dims=[(2, 2)], inputs=("pure",), operations=("random_to",),
                                                     seeds=(0,), dephasing="rank_one"))
        assert not summary.passed
        assert summary.records[0].convention_mismatch


class TestCLI:
    def test_run(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        assert cli.main(["run", str(QUARTER), "--out", str(out), "--no-timestamp"]) == 0
        assert len(read_rows(out.read_text())) == 1
        assert "sirr_new" in capsys.readouterr().err

    def test_run_bits(self, capsys):
        assert cli.main(["run", str(QUARTER), "--bits"]) == 0
        assert "bits" in capsys.readouterr().err

    def test_sweep_pi_values(self, capsys):
        assert cli.main(["sweep", str(QUARTER), "--param", "theta", "--values", "0,pi/8,3*pi/8,pi/2",
                         "--no-timestamp"]) == 0
        rows = read_rows(capsys.readouterr().out)
        assert [float(r["theta"]) for r in rows] == pytest.approx([0, math.pi / 8, 3 * math.pi / 8, math.pi / 2])

    def test_parse_value(self):
        assert cli.parse_value("pi") == math.pi
        assert cli.parse_value("2pi/3") == pytest.approx(2 * math.pi / 3)
        with pytest.raises(ConfigError):
            cli.parse_value("tau")

    def test_config_error_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("beta = -1\ninput_probs = [0.5, 0.5]\n")
        assert cli.main(["run", str(bad)]) == 2
        assert cli.main(["run", str(tmp_path / "missing.cfg")]) == 2
        assert cli.main(["sweep", str(QUARTER), "--param", "gamma", "--values", "1"]) == 2
        assert cli.main(["bogus"]) == 2
        assert "configuration error" in capsys.readouterr().err

    def test_not_resonant_exit_2(self, tmp_path):
        cfg = tmp_path / "nr.cfg"
        cfg.write_text('spectrum_b = [0.0, 1.1]\ninput_probs = [0.5, 0.5]\noperation = "partial_swap"\n')
        assert cli.main(["run", str(cfg)]) == 2

    def test_verify_matrix_file(self, tmp_path, capsys):
        m = tmp_path / "m.txt"
        m.write_text('dims = [[2, 2]]\ninputs = ["pure"]\nseeds = [0]\n')
        assert cli.main(["verify", "--matrix", str(m), "--no-timestamp"]) == 0
        assert capsys.readouterr().out.startswith("4 scenarios")
        m.write_text("dims = []\n")
        assert cli.main(["verify", "--matrix", str(m)]) == 0
        assert "0 scenarios" in capsys.readouterr().out

    def test_verify_violation_exit_1(self, tmp_path):
        m = tmp_path / "m.txt"
        m.write_text('dims = [[2, 2]]\ninputs = ["pure"]\noperations = ["partial_swap"]\n')
        assert cli.main(["verify", "--matrix", str(m), "--tolerance", "1e-30"]) == 1

    def test_emit_state(self, tmp_path):
        out = tmp_path / "state.txt"
        assert cli.main(["emit-state", str(QUARTER), "--out", str(out)]) == 0
        mats = read_matrices(out)
        assert list(mats) == ["rho_sb_prime", "rho_s_prime", "rho_b_prime"]
        u = _swap(math.pi / 4)
        expected = u @ oracle.kron(np.diag([0.9, 0.1]), oracle.gibbs([0, 1], 1.0)) @ u.conj().T
        assert_allclose(mats["rho_sb_prime"], expected, atol=1e-15)
        assert_allclose(mats["rho_s_prime"], oracle.ptrace(expected, 2, 2, "S"), atol=1e-15)


class TestMatrixIO:
    def test_golden_parse(self):
        mats = read_matrices(GOLDEN / "plus_y.txt")
        assert_allclose(mats["plus_y"], [[0.5, -0.5j], [0.5j, 0.5]])
        assert_allclose(mats["ground"], [[1]])

    def test_golden_format_byte_identical(self):
        text = (GOLDEN / "plus_y.txt").read_text()
        assert format_matrices(parse_matrices(text)) == text

    def test_round_trip_exact(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        assert np.array_equal(parse_matrix(format_matrices({"m": m})), m)

    def test_unnamed_and_errors(self):
        assert list(parse_matrices("1\n1.0,0.0\n1\n2.0,0.0\n")) == ["matrix0", "matrix1"]
        with pytest.raises(ValueError):
            parse_matrices("2\n1.0,0.0\n")
        with pytest.raises(ValueError):
            parse_matrices("# a\n1\n1.0,0.0\n# a\n1\n1.0,0.0\n")
        with pytest.raises(ValueError):
            parse_matrix("")

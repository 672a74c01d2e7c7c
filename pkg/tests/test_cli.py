"""Command-line interface: outputs, determinism, validation."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from polarshaping.cli import RunConfig, main, read_config_file


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestRate:
    def test_uniform_and_opt_columns(self, tmp_path):
        rc = main(["rate", "--mod-bits", "4", "--p", "0.5", "--p", "opt",
                   "--snr-db", "4:12:4", "--out", str(tmp_path)])
        assert rc == 0
        rows = read_rows(tmp_path / "rate_m4.csv")
        uniform = {r["gamma_db"]: float(r["r_bmd"]) for r in rows
                   if float(r["p"]) == 0.5}
        opt = {r["gamma_db"]: float(r["r_bmd"]) for r in rows
               if float(r["p"]) != 0.5}
        assert set(uniform) == {"4.0000", "8.0000", "12.0000"}
        for g, r_opt in opt.items():
            assert r_opt >= uniform[g] - 1e-9


class TestCalibrate:
    def test_emits_asset_and_report(self, tmp_path):
        rc = main(["calibrate", "--mother-len", "256", "--mod-bits", "8",
                   "--s-max", "16", "--s-step", "8", "--realizations", "30",
                   "--out", str(tmp_path)])
        assert rc == 0
        asset = read_rows(tmp_path / "calibration_256_8_8.csv")
        assert [r["S"] for r in asset] == ["0", "8", "16"]
        assert float(asset[0]["p_hat"]) == 0.5
        assert all(r["realizations"] == "30" for r in asset[1:])
        report = read_rows(tmp_path / "calibration_report_256_8.csv")
        assert set(report[0]) == {"S", "p_hat", "s_asymptotic"}


class TestSimulate:
    ARGS = ["simulate", "--payload-len", "60", "--mother-len", "128",
            "--tx-len", "128", "--mod-bits", "4", "--shaping-bits", "0",
            "--list-size", "4", "--snr-db", "6,9", "--trials", "300",
            "--target-errors", "0", "--seed", "11"]

    def test_deterministic_rerun_and_manifest(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(self.ARGS + ["--out", str(out1)]) == 0
        assert main(self.ARGS + ["--out", str(out2), "--workers", "4"]) == 0
        csv1 = (out1 / "bler_a60_m4_s0.csv").read_bytes()
        csv2 = (out2 / "bler_a60_m4_s0.csv").read_bytes()
        assert csv1 == csv2
        manifest = json.loads((out1 / "bler_a60_m4_s0.json").read_text())
        restored = RunConfig.from_dict(manifest["run_config"])
        assert restored.payload_len == 60
        assert restored.snr_db == [6.0, 9.0]
        assert restored.to_dict() == manifest["run_config"]

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("""
# comment line
payload_len = 60
mother_len = 128
tx_len = 128
mod_bits = 4
shaping_bits = 0
list_size = 4
snr_db = 6, 9
max_trials = 50
target_errors = 0
""")
        data = read_config_file(cfg)
        assert data["snr_db"] == [6, 9]
        rc = main(["simulate", "--config", str(cfg), "--trials", "100",
                   "--seed", "2", "--out", str(tmp_path / "out")])
        assert rc == 0
        rows = read_rows(tmp_path / "out" / "bler_a60_m4_s0.csv")
        assert all(r["trials"] == "100" for r in rows)

    def test_validation_failure_exit_code(self, tmp_path):
        rc = main(["simulate", "--payload-len", "60", "--mother-len", "128",
                   "--tx-len", "96", "--mod-bits", "4", "--shaping-bits", "8",
                   "--out", str(tmp_path)])
        assert rc == 2  # shaping demands tx_len == mother_len

    def test_rejects_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("payload_len = 60\nbogus_key = 1\n")
        rc = main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
        assert rc == 2


class TestSweepS:
    def test_small_sweep_with_calibration_file(self, tmp_path):
        from polarshaping.shaping import calibrate_sweep
        cal = tmp_path / "cal_128_4.csv"
        calibrate_sweep(128, 4, [0, 4, 8], num_realizations=40,
                        list_size=4, seed=1).to_csv(cal)
        rc = main(["sweep-s", "--payload-len", "60", "--mother-len", "128",
                   "--tx-len", "128", "--mod-bits", "4", "--list-size", "4",
                   "--precoder-list-size", "4", "--s-values", "0,4",
                   "--target-bler", "0.1", "--snr-db", "4,9",
                   "--target-errors", "20", "--seed", "6", "--workers", "2",
                   "--calibration-file", str(cal), "--out", str(tmp_path)])
        assert rc == 0
        rows = read_rows(tmp_path / "sweep_s_a60_m4.csv")
        assert [r["S"] for r in rows] == ["0", "4"]
        for r in rows:
            assert 0.0 < float(r["required_snr_db"]) < 12.0
        manifest = json.loads((tmp_path / "sweep_s_a60_m4.json").read_text())
        assert manifest["target_bler"] == 0.1


class TestTables:
    def test_dump_reliability_sequence(self, capsys):
        assert main(["tables", "--name", "q_sequence"]) == 0
        out = capsys.readouterr().out.split()
        assert len(out) == 1024
        assert len(set(out)) == 1024

    def test_dump_subblock(self, capsys):
        assert main(["tables", "--name", "subblock_pattern"]) == 0
        out = capsys.readouterr().out.split()
        assert len(out) == 32 and len(set(out)) == 32

    def test_invalid_file_reports_line(self, tmp_path, capsys):
        bad = tmp_path / "broken.txt"
        bad.write_text("0\n1\ntwo\n")
        rc = main(["tables", "--name", "subblock_pattern", "--file", str(bad)])
        assert rc == 2
        err = capsys.readouterr().err
        assert "line 3" in err

    def test_duplicate_entries_rejected(self, tmp_path, capsys):
        bad = tmp_path / "dup.txt"
        bad.write_text("\n".join(["0"] * 32) + "\n")
        rc = main(["tables", "--name", "subblock_pattern", "--file", str(bad)])
        assert rc == 2
        assert "permutation" in capsys.readouterr().err


class TestRunConfigValidation:
    def test_code_config_invariants_enforced(self):
        rc = RunConfig(payload_len=768, mother_len=1024, tx_len=512,
                       mod_bits=8, shaping_bits=64)
        with pytest.raises(ValueError):
            rc.code_config()

    def test_shaping_overflow_rejected(self):
        rc = RunConfig(payload_len=900, mother_len=1024, tx_len=1024,
                       mod_bits=8, shaping_bits=200)
        with pytest.raises(ValueError):
            rc.code_config()

    def test_mod_bits_guard(self):
        rc = RunConfig(payload_len=100, mother_len=256, tx_len=256,
                       mod_bits=6, shaping_bits=8)
        with pytest.raises(ValueError):
            rc.code_config()

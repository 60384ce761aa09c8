import subprocess
import sys

import pytest

from hybrid_relay import cli
from hybrid_relay.experiments import CSV_HEADER


def _cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


SMALL = "metric = ber\nsnr_db_start = 0\nsnr_db_stop = 20\nsnr_db_step = 10\nhops_list = 1, 2\n"


class TestSweepCommand:
    def test_writes_csv_to_file(self, tmp_path):
        out = tmp_path / "out.csv"
        assert cli.main(["sweep", "--config", str(_cfg(tmp_path, SMALL)), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 1 + 2 * 2 * 3

    def test_stdout_and_self_check(self, tmp_path, capsys):
        assert cli.main(["sweep", "--config", str(_cfg(tmp_path, SMALL)), "--self-check"]) == 0
        assert capsys.readouterr().out.startswith("snr_db,kind")

    def test_mc_override(self, tmp_path, capsys):
        cfg = _cfg(tmp_path, "metric = outage\nsnr_db_start = 10\nsnr_db_stop = 11\n")
        assert cli.main(["sweep", "--config", str(cfg), "--mc-trials", "10000", "--seed", "3"]) == 0
        row = capsys.readouterr().out.splitlines()[1].split(",")
        assert row[5] != "" and row[6] != ""

    def test_unknown_key_exit_2(self, tmp_path, capsys):
        cfg = _cfg(tmp_path, "metric = outage\ngamam_th_db = 10\n")
        assert cli.main(["sweep", "--config", str(cfg)]) == 2
        err = capsys.readouterr().err
        assert "gamam_th_db" in err and "line 2" in err

    def test_missing_file_exit_2(self, tmp_path):
        assert cli.main(["sweep", "--config", str(tmp_path / "absent.cfg")]) == 2

    def test_bad_override_exit_2(self, tmp_path):
        assert cli.main(["sweep", "--config", str(_cfg(tmp_path, SMALL)), "--mc-trials", "10"]) == 2

    def test_invalid_grid_point_exit_2(self, tmp_path, capsys):
        cfg = _cfg(tmp_path, "metric = outage\nhops_list = 0\nsnr_db_stop = 1\n")
        assert cli.main(["sweep", "--config", str(cfg)]) == 2
        assert "hops" in capsys.readouterr().err

    def test_claim_file_rejected_for_sweep(self, tmp_path):
        assert cli.main(["sweep", "--config", str(_cfg(tmp_path, "claims = all\n"))]) == 2

    def test_missing_config_argument(self):
        with pytest.raises(SystemExit) as info:
            cli.main(["sweep"])
        assert info.value.code == 2


class TestPresetCommand:
    def test_preset_runs(self, tmp_path):
        out = tmp_path / "fig3.csv"
        assert cli.main(["preset", "fig3", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 1 + 2 * 3 * 51

    def test_unknown_preset(self):
        with pytest.raises(SystemExit):
            cli.main(["preset", "fig42"])


class TestVerifyClaims:
    def test_all_pass(self, capsys):
        assert cli.main(["verify-claims"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 9 and all(l.startswith("PASS") for l in lines)

    def test_tight_tolerance_fails(self, tmp_path, capsys):
        cfg = _cfg(tmp_path, "claims = hop_penalty_each_hop\n")
        assert cli.main(["verify-claims", "--config", str(cfg), "--tolerance-db", "0.01"]) == 1
        assert capsys.readouterr().out.startswith("FAIL hop_penalty_each_hop")

    def test_sweep_file_rejected(self, tmp_path):
        assert cli.main(["verify-claims", "--config", str(_cfg(tmp_path, SMALL))]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hybrid_relay", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "verify-claims" in res.stdout

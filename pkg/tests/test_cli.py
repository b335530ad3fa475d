import json

import pytest

from qkdsec.cli import BOUNDS_CSV_HEADER, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_bounds_csv(text):
    lines = text.strip().splitlines()
    assert lines[0] == BOUNDS_CSV_HEADER
    names = BOUNDS_CSV_HEADER.split(",")
    return {row.split(",")[0]: dict(zip(names, row.split(","))) for row in lines[1:]}


class TestBoundsCommand:
    def test_floor_and_bound(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "-50",
                               "--key-bits", "1000000")
        assert code == 0
        rows = parse_bounds_csv(out)
        assert float(rows["guess_floor"]["log2_exponent"]) == -1_000_000.0
        assert float(rows["guessing_bound"]["log2_exponent"]) == pytest.approx(-50, abs=1e-4)

    def test_zero_epsilon_flag(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "-inf", "--key-bits", "4")
        assert code == 0
        rows = parse_bounds_csv(out)
        assert rows["guessing_bound"]["linear_value"] == "0.0625"

    def test_near_miss_flagged_above_unity(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "-50",
                               "--key-bits", "1000000", "--qe", "2.5e-6")
        rows = parse_bounds_csv(out)
        assert rows["near_miss_bound"]["exceeds_unity"] == "1"
        assert rows["near_miss_bound"]["linear_value"] == "1"

    def test_kpa_and_pa_rows(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "-50", "--key-bits", "100",
                               "--unknown-bits", "10",
                               "--delta", "-1", "--p-correct", "-2")
        rows = parse_bounds_csv(out)
        assert float(rows["kpa_bound"]["log2_exponent"]) == pytest.approx(-10, abs=1e-6)
        # (1 - 1/2) * 1/4 + 1/2 = 0.625
        assert float(rows["pa_guess_bound"]["linear_value"]) == pytest.approx(0.625)

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--eps", "-3", "--key-bits", "3",
                               "--format", "json")
        doc = json.loads(out)
        assert doc["schema_version"] == 1
        names = [row["name"] for row in doc["bounds"]]
        assert names == ["guess_floor", "guessing_bound"]

    def test_csv_round_trip(self, capsys):
        _, out, _ = run_cli(capsys, "bounds", "--eps", "-50", "--key-bits", "1000000",
                            "--qe", "2.5e-6", "--unknown-bits", "12")
        names = BOUNDS_CSV_HEADER.split(",")
        lines = out.strip().splitlines()
        parsed = [dict(zip(names, ln.split(","))) for ln in lines[1:]]
        re_emitted = "\n".join([BOUNDS_CSV_HEADER]
                               + [",".join(r[c] for c in names) for r in parsed]) + "\n"
        assert re_emitted == out

    def test_unpaired_delta_is_flag_error(self, capsys):
        code, _, err = run_cli(capsys, "bounds", "--eps", "-3", "--key-bits", "3",
                               "--delta", "-1")
        assert code == 2
        assert "p-correct" in err

    def test_unknown_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bounds", "--eps", "-3", "--key-bits", "3", "--bogus"])
        assert exc.value.code == 2


class TestKeyrateCommand:
    def test_writes_csv_family(self, capsys, tmp_path):
        out_path = tmp_path / "curves.csv"
        code, _, _ = run_cli(capsys, "keyrate",
                             "--sifted-len", "1e5", "--sifted-len", "1e6",
                             "--model", "conventional", "--xi", "1.1",
                             "--q-max", "0.05", "--q-step", "0.01",
                             "--out", str(out_path))
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0].startswith("q,rate,model")
        ks = {ln.split(",")[4] for ln in lines[1:]}
        assert ks == {"100000", "1000000"}

    def test_renders_figure(self, capsys, tmp_path):
        out_path = tmp_path / "curves.csv"
        png_path = tmp_path / "curves.png"
        code, _, _ = run_cli(capsys, "keyrate", "--sifted-len", "1e6",
                             "--q-max", "0.04", "--q-step", "0.02",
                             "--out", str(out_path), "--plot", str(png_path))
        assert code == 0
        assert png_path.stat().st_size > 0
        assert png_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_stdout_when_no_out(self, capsys):
        code, out, _ = run_cli(capsys, "keyrate", "--sifted-len", "1e5",
                               "--q-max", "0", "--q-step", "0.002")
        assert code == 0
        assert len(out.strip().splitlines()) == 2  # header + single Q=0 row

    def test_invalid_range_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "keyrate", "--sifted-len", "1e5",
                               "--q-max", "0.6", "--out", str(tmp_path / "x.csv"))
        assert code == 2
        assert not (tmp_path / "x.csv").exists()


class TestSimulateCommand:
    def test_clean_session_exit_zero(self, capsys, tmp_path):
        path = tmp_path / "transcript.json"
        code, out, _ = run_cli(capsys, "simulate", "--pulses", "10000",
                               "--flip", "0", "--intercept", "0", "--seed", "1",
                               "--transcript", str(path))
        assert code == 0
        assert "status=completed" in out and "qber=0" in out
        doc = json.loads(path.read_text())
        assert doc["schema_version"] == 1

    def test_intercept_summary_shows_quarter(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--pulses", "100000",
                               "--intercept", "1", "--seed", "7",
                               "--abort-qber", "1", "--pa-out-len", "8")
        qber = float(out.split("qber=")[1].split()[0])
        assert qber == pytest.approx(0.25, abs=0.013)

    def test_abort_exit_three(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--pulses", "20000",
                               "--flip", "0.02", "--abort-qber", "0.01", "--seed", "5")
        assert code == 3
        assert "status=aborted_qber" in out

    def test_verification_failure_exit_four(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--pulses", "100000",
                               "--intercept", "1", "--abort-qber", "1", "--seed", "7",
                               "--pa-out-len", "8")
        assert code == 4
        assert "status=verification_failed" in out

    def test_transcript_is_reproducible(self, capsys, tmp_path):
        args = ["simulate", "--pulses", "5000", "--flip", "0.01", "--seed", "3"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run_cli(capsys, *args, "--transcript", str(a))
        run_cli(capsys, *args, "--transcript", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_config_error_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "simulate", "--pulses", "100",
                               "--flip", "0.9")
        assert code == 2
        assert "error:" in err

    def test_named_code_selection(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--pulses", "3000",
                               "--code", "hamming15", "--seed", "2")
        assert code == 0


class TestVerifyCommand:
    def test_mathcore_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "mathcore")
        assert code == 0
        assert "PASS" in out and "FAIL" not in out

    def test_qstate_suite_with_trials(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--suite", "qstate",
                               "--trials", "50", "--seed", "42")
        assert code == 0
        assert out.count("PASS") == 3

    def test_bad_suite_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--suite", "nonsense"])
        assert exc.value.code == 2

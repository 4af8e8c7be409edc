import json

import pytest

from dephasent.cli import UsageError, main, parse_dims, parse_tolerances, run_verify
from dephasent.dynamics import Instance, random_instance
from dephasent.serialization import SWEEP_HEADER, dump_instance, read_versioned_csv


def _pure_instance(rng, times=(0.0, 1.0)):
    inst = random_instance(2, 2, rng, kind="pure")
    return Instance(inst.model, inst.rho_S, inst.rho_E, times)


def test_parsers():
    assert parse_dims("2x2, 3x4") == [(2, 2), (3, 4)]
    with pytest.raises(UsageError):
        parse_dims("2by2")
    tol = parse_tolerances(["bracket=1e-2"])
    assert tol.bracket == 1e-2
    with pytest.raises(UsageError):
        parse_tolerances(["nonsense=1"])


def test_bounds_command(tmp_path, rng):
    src = tmp_path / "inst.json"
    dump_instance(_pure_instance(rng), src)
    out = tmp_path / "report.json"
    assert main(["bounds", "--input", str(src), "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    first, second = data["reports"]
    assert first["t"] == 0.0 and first["mutual_info"] == pytest.approx(0.0, abs=1e-9)
    assert first["ree_bracket_high"] == pytest.approx(0.0, abs=1e-9)
    # pure-pure: entanglement equals the reduced entropy, and the bracket pinches it
    assert second["ree_bracket_high"] - second["ree_bracket_low"] <= 1e-3
    assert second["ree_bracket_low"] == pytest.approx(second["S_S"], abs=1e-9)
    header, rows = read_versioned_csv((tmp_path / "report.csv").read_text())
    assert len(rows) == 2


def test_bounds_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["bounds", "--input", str(bad)]) == 2
    bad.write_text(json.dumps({"schema_version": "1.0"}))
    assert main(["bounds", "--input", str(bad)]) == 2
    assert main(["bounds", "--input", str(tmp_path / "missing.json")]) == 2


def test_verify_usage_errors():
    assert main(["verify", "--count", "0"]) == 2
    assert main(["verify", "--count", "2", "--dims", "2-2"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--bogus"])
    assert exc.value.code == 2


def test_verify_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--count", "8", "--dims", "2x2,3x2", "--seed", "5"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    summary = json.loads(a.read_text())
    assert summary["all_pass"] and summary["count"] == 8


def test_verify_parallel_matches_serial():
    dims = [(2, 2), (2, 3)]
    assert run_verify(6, dims, seed=1) == run_verify(6, dims, seed=1, parallelism=2)


def test_sweep_presets(tmp_path):
    out = tmp_path / "alpha.csv"
    assert main(["sweep", "--preset", "alpha-scan", "--t-step", "0.5", "--output", str(out)]) == 0
    header, rows = read_versioned_csv(out.read_text())
    assert ",".join(header) == SWEEP_HEADER
    assert len(rows) == 2 * 5 * 21
    assert all(float(r[8]) == 0.0 for r in rows if float(r[2]) == 1.0)
    peaks = json.loads((tmp_path / "alpha.peaks.json").read_text())["peaks"]
    s3 = [p for p in peaks if p["s"] == 3.0 and p["alpha"] == 0.0][0]
    assert 1.5 <= s3["peak_Lambda_t"] <= 2.5

    out2 = tmp_path / "temps.csv"
    assert main(["sweep", "--preset", "temperature-scan", "--t-step", "0.5", "--output", str(out2)]) == 0
    _, rows2 = read_versioned_csv(out2.read_text())
    assert {float(r[1]) for r in rows2} == {0.5, 1.0, 2.0}
    assert {float(r[2]) for r in rows2} == {0.5}


def test_sweep_unsupported_s(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--s", "2.5", "--output", str(out)]) == 2
    assert main(["sweep", "--s", "2.5", "--best-effort-s", "--t-step", "1", "--output", str(out)]) == 0


def test_oracle_compare_vacuum(tmp_path):
    out = tmp_path / "oc.csv"
    code = main(["oracle-compare", "--s", "2", "--temperature", "0", "--modes", "200",
                 "--t-step", "0.5", "--output", str(out)])
    assert code == 0
    header, rows = read_versioned_csv(out.read_text())
    assert header == ["Lambda_t", "B_analytic", "B_oracle", "rel_error"]
    verdict = json.loads((tmp_path / "oc.verdict.json").read_text())
    assert verdict["pass"] and verdict["max_rel_error"] <= 1e-2


def test_oracle_compare_single_mode_fails(tmp_path):
    out = tmp_path / "one.csv"
    code = main(["oracle-compare", "--s", "2", "--temperature", "0", "--modes", "1",
                 "--t-step", "0.5", "--output", str(out)])
    assert code == 3
    assert json.loads((tmp_path / "one.verdict.json").read_text())["max_rel_error"] > 1e-2


def test_oracle_compare_truncation(tmp_path, capsys):
    # lowest mode at 0.03 with T = 10 needs about 6000 Fock levels, above the 4096 cap
    code = main(["oracle-compare", "--modes", "500", "--temperature", "10", "--output", str(tmp_path / "x.csv")])
    assert code == 3
    assert "truncation" in capsys.readouterr().err

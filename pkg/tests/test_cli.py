import json

import pytest

from wclass.cli import main


def test_verify_suite_writes_report(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "states", "--json", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["schema_version"] and d["status"] == "pass"
    ids = [c["id"] for c in d["checks"]]
    assert ids == sorted(ids)
    assert all(c["anchor"] for c in d["checks"])


def test_failed_check_exits_one(tmp_path):
    # a zero structural tolerance cannot be met by floating point spectra
    assert main(["verify", "entanglement", "--tol-structural", "0", "--tol-assert", "0",
                 "--json", str(tmp_path / "r.json")]) == 1


def test_usage_errors_exit_two(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2
    assert main(["verify", "states", "--json", str(tmp_path / "missing" / "r.json")]) == 2
    assert main(["optics", "run", str(tmp_path / "none.scheme")]) == 2
    assert main(["protocol", "distill", "--a", "0.5"]) == 2
    assert main(["protocol", "qkd", "--rounds", "0"]) == 2


def test_malformed_scheme_names_field(tmp_path, capsys):
    bad = tmp_path / "bad.scheme"
    bad.write_text(json.dumps({"modes": 2, "source": {"kind": "sps", "mode": 0}}))
    assert main(["optics", "run", str(bad)]) == 2
    assert "postselect" in capsys.readouterr().err


def test_optics_run_shipped(tmp_path):
    out = tmp_path / "s.json"
    assert main(["optics", "run", "tritter_w3v", "--json", str(out)]) == 0
    d = json.loads(out.read_text())
    assert abs(d["probability"] - 1 / 9) < 1e-12


@pytest.mark.parametrize("argv,key,value,tol", [
    (["protocol", "qkd", "--rounds", "100000", "--seed", "7"], "success_rate", 0.25, 0.005),
    (["protocol", "distill", "--a", "0.8", "--b", "0.5196152423", "--c", "0.3"], "success_probability", 0.27, 1e-9),
    (["protocol", "teleport", "--channel", "w", "--trials", "100"], "min_fidelity", 1.0, 1e-12),
])
def test_protocol_commands(tmp_path, argv, key, value, tol):
    out = tmp_path / "t.json"
    assert main(argv + ["--json", str(out)]) == 0
    assert abs(json.loads(out.read_text())[key] - value) <= tol


def test_protocol_report_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["protocol", "qss", "--rounds", "5000", "--seed", "4", "--json", str(a)])
    main(["protocol", "qss", "--rounds", "5000", "--seed", "4", "--json", str(b)])
    assert a.read_bytes() == b.read_bytes()

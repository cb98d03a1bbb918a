import json
import math

import pytest

jsonschema = pytest.importorskip("jsonschema")

from levelbound.cli import main
from levelbound.numerics import PRECISION_ENV_VAR

try:
    from importlib.resources import files
except ImportError:  # pragma: no cover
    from importlib_resources import files

SCHEMA = json.loads(files("levelbound").joinpath("schemas/report.schema.json")
                    .read_text(encoding="utf-8"))


def _run_json(capsys, argv):
    rc = main(argv)
    assert rc == 0
    out = capsys.readouterr().out
    payload = json.loads(out)
    jsonschema.validate(payload, SCHEMA)
    return payload


def test_analyze_onemax_n2(capsys):
    r = _run_json(capsys, ["analyze", "--function", "onemax", "--n", "2"])
    assert r["manifest"]["command"] == "analyze"
    assert r["oracle"]["m"][2]["float"] == pytest.approx(4.0)
    by_method = {b["method"]: b for b in r["bounds"]}
    assert by_method["digraph-product"]["d"][2]["float"] == pytest.approx(4.0)
    assert by_method["digraph-product"]["direction"] == "lower"
    assert r["shortcuts"]["classification"] == "none"
    assert r["subdigraph"] is None


def test_analyze_twomax1_subdigraph(capsys):
    r = _run_json(capsys, ["analyze", "--function", "twomax1", "--n", "10",
                           "--subdigraph", "preset"])
    assert r["shortcuts"]["classification"] in ("weak_only", "strong")
    sub = r["subdigraph"]
    assert sub["preset_weights"] == [9, 8, 7, 6, 5, 4]
    assert sub["K"] == 6
    assert sub["index_monotone"] is True
    assert sub["findings"] == []          # valid level partition: d' <= m'
    assert "paper_bound" in sub


def test_analyze_deceptive_subdigraph_findings(capsys):
    r = _run_json(capsys, ["analyze", "--function", "deceptive", "--n", "10",
                           "--subdigraph", "preset"])
    sub = r["subdigraph"]
    assert sub["index_monotone"] is False
    assert sub["warnings"]
    assert sub["findings"]                # mid-ladder soundness violations surfaced
    assert sub["paper_discrepancies"]


def test_analyze_method_subset_and_coefficient_min(capsys):
    r = _run_json(capsys, ["analyze", "--function", "onemax", "--n", "30",
                           "--methods", "ratio-lower"])
    (b,) = r["bounds"]
    assert b["method"] == "ratio-lower"
    assert b["coefficient_min"]["float"] >= 0.4


def test_analyze_onemax_n200_ratio_lower(capsys):
    r = _run_json(capsys, ["analyze", "--function", "onemax", "--n", "200",
                           "--methods", "ratio-lower"])
    (b,) = r["bounds"]
    assert b["coefficient_min"]["float"] >= 0.4


def test_analyze_oracle_guard_nulls_oracle(capsys):
    r = _run_json(capsys, ["analyze", "--function", "onemax", "--n", "12",
                           "--methods", "type0", "--oracle-guard", "10"])
    assert r["oracle"] is None
    assert any("guard" in note for note in r["notes"])


def test_analyze_rejects_bad_method(capsys):
    assert main(["analyze", "--function", "onemax", "--n", "4",
                 "--methods", "bogus"]) == 2


def test_analyze_start_distribution(capsys):
    r = _run_json(capsys, ["analyze", "--function", "onemax", "--n", "2",
                           "--methods", "visit-cl", "--start", "0,0.5,0.5"])
    (b,) = r["bounds"]
    assert b["method"] == "visit-cl"
    # c_1 = min(2/3, 1) with this start, so d_2 = 4/3 + (2/3)*4 = 4
    assert b["d"][2]["float"] == pytest.approx(4.0)
    assert main(["analyze", "--function", "onemax", "--n", "2",
                 "--methods", "visit-cl", "--start", "5"]) == 2


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--function", "notafunction", "--n", "4"])
    assert exc.value.code == 2


def test_coefficients_csv(tmp_path):
    out = tmp_path / "c.csv"
    rc = main(["coefficients", "--function", "onemax", "--n", "2",
               "--method", "digraph-product", "--csv", str(out)])
    assert rc == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "k,ell,method,value,log_value"
    assert len(lines) == 2
    k, ell, method, value, logv = lines[1].split(",")
    assert (k, ell, method) == ("2", "1", "digraph-product")
    assert float(value) == pytest.approx(2 / 3, abs=1e-16)
    assert float(logv) == pytest.approx(math.log(2 / 3), abs=1e-15)
    assert len(value.split(".")[1]) >= 16  # 17 significant digits


def test_coefficients_k1_header_only(capsys):
    rc = main(["coefficients", "--function", "onemax", "--n", "4",
               "--method", "type1", "--k", "1"])
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["k,ell,method,value,log_value"]


def test_coefficients_uptick_n200(tmp_path):
    out = tmp_path / "c200.csv"
    rc = main(["coefficients", "--function", "onemax", "--n", "200",
               "--method", "ratio-lower", "--csv", str(out)])
    assert rc == 0
    rows = out.read_text(encoding="utf-8").splitlines()[1:]
    assert len(rows) == 199
    vals = {}
    for r in rows:
        _, ell, _, value, _ = r.split(",")
        vals[int(ell)] = float(value)
    assert vals[199] > vals[198]
    # fixed-layout outputs carry their manifest in a sidecar
    sidecar = json.loads((tmp_path / "c200.csv.manifest.json").read_text())
    assert sidecar["command"] == "coefficients"


def test_digraph_embeds_manifest(capsys):
    rc = main(["digraph", "--function", "onemax", "--n", "3"])
    assert rc == 0
    dot = capsys.readouterr().out
    assert "// manifest:" in dot


def test_digraph_dot(tmp_path, capsys):
    rc = main(["digraph", "--function", "onemax", "--n", "3"])
    assert rc == 0
    dot = capsys.readouterr().out
    assert dot.count("label=\"S_") == 4          # 3 levels plus the optimum
    assert dot.count("->") == 6
    rc = main(["digraph", "--function", "fullydeceptive", "--n", "10",
               "--annotate-shortcuts"])
    assert rc == 0
    dot = capsys.readouterr().out
    assert "n10 -> n0" in dot
    red_to_opt = [ln for ln in dot.splitlines() if "n10 -> n0" in ln]
    assert "color=red" in red_to_opt[0]


def test_digraph_subdigraph_preset(capsys):
    rc = main(["digraph", "--function", "twomax1", "--n", "10",
               "--subdigraph", "preset"])
    assert rc == 0
    dot = capsys.readouterr().out
    assert dot.count("label=\"S'_") == 7         # S'_0..S'_6


def test_oracle_both(capsys):
    r = _run_json(capsys, ["oracle", "--function", "deceptive", "--n", "8",
                           "--mode", "both"])
    assert r["max_relative_gap"] <= 1e-12
    assert r["full_state"]["lumpability_deviation"] <= 1e-12


def test_oracle_rational(capsys):
    r = _run_json(capsys, ["oracle", "--function", "onemax", "--n", "6",
                           "--mode", "both", "--rational"])
    assert r["max_relative_gap"] == 0.0
    assert r["full_state"]["lumpability_deviation"] == 0.0
    assert r["level_chain"]["m"][2]["decimal"].count("/") == 1  # exact rational


def test_oracle_guard_exit_code():
    assert main(["oracle", "--function", "onemax", "--n", "25",
                 "--mode", "full"]) == 3


def test_simulate_at_optimum(capsys):
    r = _run_json(capsys, ["simulate", "--function", "onemax", "--n", "6",
                           "--start", "0", "--trials", "50", "--seed", "1"])
    assert r["mean"] == 0.0
    assert r["manifest"]["seed"] == 1


def test_simulate_deterministic_given_manifest(capsys):
    argv = ["simulate", "--function", "twomax1", "--n", "8", "--trials", "100",
            "--seed", "9"]
    a = _run_json(capsys, argv)
    b = _run_json(capsys, argv)
    a["manifest"].pop("timestamp")
    b["manifest"].pop("timestamp")
    assert a == b


def test_verify_appendix(capsys):
    r = _run_json(capsys, ["verify-appendix", "--C", "5.44",
                           "--n-list", "10,100,1000"])
    assert r["all_pass"] is True
    assert [e["n"] for e in r["results"]] == [10, 100, 1000]
    assert all(e["product2_ok"] for e in r["results"])


def test_precision_env_override(capsys, monkeypatch):
    monkeypatch.setenv(PRECISION_ENV_VAR, "128")
    r = _run_json(capsys, ["analyze", "--function", "onemax", "--n", "2",
                           "--methods", "type0"])
    assert r["manifest"]["precision_bits"] == 128


def test_json_written_atomically(tmp_path):
    out = tmp_path / "report.json"
    rc = main(["analyze", "--function", "onemax", "--n", "2", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text(encoding="utf-8"))
    jsonschema.validate(payload, SCHEMA)
    assert list(tmp_path.iterdir()) == [out]     # no stray temp files

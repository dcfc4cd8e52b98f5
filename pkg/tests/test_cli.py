"""Exit codes, report schema, and config resolution of the command
line front end."""

import json

import pytest

from kzb import cli


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv + ["--json"])
    return code, json.loads(out), err


def test_dims_reports_positive_root_count(capsys):
    code, report, _ = run_json(capsys, ["dims", "--root-system", "B2",
                                        "--max-degree", "4"])
    assert code == 0
    assert report["schema"] == "kzb-report/1"
    assert report["status"] == "pass"
    assert report["detail"]["dims"]["1,1"] == 4
    assert report["detail"]["exceeds_quadratic_bound"] is True


def test_dims_table_key_order_follows_degree(capsys):
    _, report, _ = run_json(capsys, ["dims", "--root-system", "A2",
                                     "--max-degree", "4"])
    keys = list(report["detail"]["dims"])
    degs = [sum(int(p) for p in k.split(",")) for k in keys]
    assert degs == sorted(degs)


def test_unknown_root_system_exits_2(capsys):
    code, _, err = run(capsys, ["dims", "--root-system", "Q9"])
    assert code == 2
    assert "root system" in err


def test_missing_root_system_exits_2(capsys):
    code, _, err = run(capsys, ["dims"])
    assert code == 2
    assert "--root-system" in err


def test_lower_half_plane_tau_exits_2(capsys):
    code, _, err = run(capsys, ["elliptic-suite", "--tau", "0.2,-1.3"])
    assert code == 2
    assert "Im tau" in err


def test_elliptic_suite_entries_carry_schema_fields(capsys):
    code, report, _ = run_json(capsys, ["elliptic-suite", "--samples", "3",
                                        "--order", "3"])
    assert code == 0
    for entry in report["checks"]:
        assert set(entry) >= {"identity", "max_residual", "samples",
                              "tolerance", "status"}
        assert entry["samples"] == 3
    fd = [e for e in report["checks"] if e["identity"].endswith("_fd")]
    assert fd and all(e["tolerance"] == 1e-6 for e in fd)


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('root_system = "B2"\ndegree = 4\n')
    code, report, _ = run_json(capsys, ["dims", "--config", str(cfg)])
    assert code == 0
    assert report["config"]["root_system"] == "B2"
    assert report["config"]["degree"] == 4


def test_flags_override_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('root_system = "B2"\ndegree = 4\n')
    code, report, _ = run_json(capsys, ["dims", "--config", str(cfg),
                                        "--root-system", "A2"])
    assert code == 0
    assert report["config"]["root_system"] == "A2"
    assert report["detail"]["dims"]["1,1"] == 3


def test_unknown_config_key_exits_2(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('root_system = "B2"\nshade = 3\n')
    code, _, err = run(capsys, ["dims", "--config", str(cfg)])
    assert code == 2
    assert "shade" in err


def test_tolerance_override_can_fail_a_run(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        'root_system = "B2"\nsamples = 2\n\n'
        "[tolerances]\ndunkl_routes = 1e-18\n")
    code, report, _ = run_json(capsys, ["dunkl", "--config", str(cfg)])
    assert code == 1
    assert report["status"] == "fail"
    by_name = {e["name"]: e for e in report["checks"]}
    assert by_name["routes_agree"]["status"] == "fail"
    assert by_name["matrix_curvature"]["status"] == "pass"


def test_unknown_tolerance_name_exits_2(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('root_system = "B2"\n[tolerances]\nwarp = 1e-3\n')
    code, _, err = run(capsys, ["dunkl", "--config", str(cfg)])
    assert code == 2
    assert "warp" in err


def test_report_bytes_are_seed_deterministic(capsys):
    _, out1, _ = run(capsys, ["dunkl", "--root-system", "B2", "--samples", "2",
                              "--seed", "7", "--json"])
    _, out2, _ = run(capsys, ["dunkl", "--root-system", "B2", "--samples", "2",
                              "--seed", "7", "--json"])
    assert out1 == out2


def test_timings_are_opt_in(capsys):
    _, report, _ = run_json(capsys, ["dims", "--root-system", "A2"])
    assert "timings" not in report
    _, report, _ = run_json(capsys, ["dims", "--root-system", "A2",
                                     "--timings"])
    assert set(report["timings"]) == {"dims"}


def test_output_file_holds_the_report(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, _, _ = run(capsys, ["dims", "--root-system", "A2",
                              "--output", str(path)])
    assert code == 0
    report = json.loads(path.read_text())
    assert report["command"] == "dims"
    assert report["status"] == "pass"


def test_threads_env_must_be_a_positive_integer(capsys, monkeypatch):
    monkeypatch.setenv("KZB_THREADS", "zebra")
    code, _, err = run(capsys, ["dims", "--root-system", "A2"])
    assert code == 2
    assert "KZB_THREADS" in err
    monkeypatch.setenv("KZB_THREADS", "0")
    code, _, _ = run(capsys, ["dims", "--root-system", "A2"])
    assert code == 2


def test_flatness_respects_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("KZB_THREADS", "2")
    code, report, _ = run_json(capsys, ["flatness", "--root-system", "A2",
                                        "--max-degree", "4", "--samples", "2"])
    assert code == 0
    entry = report["checks"][0]
    assert entry["name"] == "curvature_fixed_tau"
    assert len(entry["residuals"]) == 2


def test_bad_c_count_exits_2(capsys):
    code, _, err = run(capsys, ["dunkl", "--root-system", "B2",
                                "--c", "0.3,0.4,0.5"])
    assert code == 2
    assert "orbit" in err


def test_monodromy_hecke_passes_quadratic_and_braid(capsys):
    code, report, _ = run_json(capsys, ["monodromy", "--root-system", "A2",
                                        "--c", "0.3", "--tol", "1e-8"])
    assert code == 0
    names = [e["name"] for e in report["checks"]]
    assert names == ["quadratic_relation", "braid_relation"]
    assert all(e["residual"] < 1e-6 for e in report["checks"])
    assert report["detail"]["transport_error"] < 1e-6


def test_monodromy_leading_branch(capsys):
    code, report, _ = run_json(capsys, ["monodromy", "--root-system", "A2",
                                        "--check", "leading",
                                        "--max-degree", "3"])
    assert code == 0
    assert report["checks"][0]["name"] == "leading_terms"
    assert report["checks"][0]["residual"] < 1e-4
    assert report["detail"]["degree"] == 3


def test_all_aggregates_every_section(capsys):
    code, report, _ = run_json(capsys, ["all", "--root-system", "A2",
                                        "--max-degree", "4", "--samples", "2",
                                        "--seed", "5"])
    assert code == 0
    assert report["status"] == "pass"
    assert [s["command"] for s in report["reports"]] == [
        "dims", "elliptic-suite", "flatness", "degenerate",
        "cherednik-verify", "dunkl", "monodromy"]
    assert all(s["status"] == "pass" for s in report["reports"])


def test_human_summary_ends_with_verdict(capsys):
    code, out, _ = run(capsys, ["dims", "--root-system", "A2"])
    assert code == 0
    assert out.rstrip().endswith("PASS")

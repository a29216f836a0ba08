import json

import pytest

from sectorbound.cli import (
    RunConfig,
    main,
    packaged_example_path,
    parse_system_file,
    run_sweep,
    sweep_csv,
)
from sectorbound.errors import ParseError

CSV_HEADER = ("beta,gamma_md,gamma_mc,gamma_minc,"
              "status_md,status_mc,status_minc,"
              "time_md_s,time_mc_s,time_minc_s")


def test_parse_packaged_system():
    sys = parse_system_file(packaged_example_path())
    assert sys.dims == (3, 3, 1, 1)
    assert sys.wellposedness_warning


def test_parse_single_state_system(tmp_path):
    path = tmp_path / "sys.json"
    data = {k: [[0.0]] for k in
            ("A", "B1", "B2", "C1", "C2", "D11", "D12", "D21", "D22")}
    path.write_text(json.dumps(data))
    sys = parse_system_file(path)
    assert sys.dims == (1, 1, 1, 1)


def test_parse_errors_name_the_field(tmp_path):
    path = tmp_path / "sys.json"
    data = {k: [[0.0]] for k in
            ("A", "B2", "C1", "C2", "D11", "D12", "D21", "D22")}
    path.write_text(json.dumps(data))
    with pytest.raises(ParseError, match="B1"):
        parse_system_file(path)

    path.write_text("{not json")
    with pytest.raises(ParseError, match="line"):
        parse_system_file(path)

    with pytest.raises(ParseError, match="not found"):
        parse_system_file(tmp_path / "missing.json")


def test_cli_norm_and_exit_codes(tmp_path, capsys):
    rc = main(["norm", "--system", packaged_example_path()])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("nominal_hinf_norm=1.185678")

    rc = main(["norm", "--system", str(tmp_path / "nope.json")])
    assert rc == 2


def test_cli_analyze_text(capsys):
    rc = main([
        "analyze", "--system", packaged_example_path(),
        "--beta", "0.5", "--class", "md",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "md" in out and "OPTIMAL" in out


def test_sweep_rows_and_csv_schema(bench_sys):
    config = RunConfig(command="sweep", sweep=(0.0, 0.6, 3),
                       classes=("md", "mc"), jobs=1)
    rows = run_sweep(config, bench_sys)
    assert [r["beta"] for r in rows] == [0.0, 0.3, 0.6]
    # the zero row reports the nominal norm in every selected gain column
    assert rows[0]["status_md"] == "NOMINAL"
    assert rows[0]["gamma_md"] == rows[0]["gamma_mc"]
    assert rows[0]["gamma_minc"] is None  # class not selected
    text = sweep_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "0"
    assert first[1] == first[2] != ""
    assert first[3] == ""  # minc skipped


def test_sweep_marks_infeasible_rows(bench_sys):
    config = RunConfig(command="sweep", sweep=(1.5, 1.6, 2),
                       classes=("md",), jobs=1)
    rows = run_sweep(config, bench_sys)
    assert all(r["status_md"] == "INFEASIBLE" for r in rows)
    assert all(r["gamma_md"] is None for r in rows)
    csv_text = sweep_csv(rows)
    assert "INFEASIBLE" in csv_text


def test_sweep_degenerate_grid_gives_identical_nominal_rows(bench_sys):
    config = RunConfig(command="sweep", sweep=(0.0, 0.0, 2),
                       classes=("md", "mc", "minc"), jobs=1)
    rows = run_sweep(config, bench_sys)
    assert len(rows) == 2
    content = [{k: v for k, v in r.items() if not k.startswith("time")}
               for r in rows]
    assert content[0] == content[1]
    assert rows[0]["status_md"] == "NOMINAL"
    assert rows[0]["gamma_md"] == rows[0]["gamma_mc"] == rows[0]["gamma_minc"]


def test_runconfig_validation():
    with pytest.raises(ParseError):
        RunConfig(command="sweep", sweep=(0.0, 1.0, 1))  # count below 2
    with pytest.raises(ParseError):
        RunConfig(command="sweep", sweep=(1.0, 0.5, 5))  # min above max
    with pytest.raises(ParseError):
        RunConfig(command="analyze", classes=())


def test_sweep_gamma_columns_deterministic(bench_sys):
    config = RunConfig(command="sweep", sweep=(0.0, 0.5, 2),
                       classes=("mc",), jobs=1)
    r1 = run_sweep(config, bench_sys)
    r2 = run_sweep(config, bench_sys)
    assert [r["gamma_mc"] for r in r1] == [r["gamma_mc"] for r in r2]


def test_cli_sweep_writes_csv_and_figure(tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main([
        "sweep", "--system", packaged_example_path(),
        "--sweep", "0:0.4:2", "--class", "md", "--jobs", "1",
        "--out", str(out),
    ])
    assert rc == 0
    assert out.read_text().startswith(CSV_HEADER)
    assert (tmp_path / "sweep.png").exists()


def test_cli_margin(capsys):
    rc = main([
        "margin", "--system", packaged_example_path(),
        "--class", "md", "--resolution", "0.05", "--beta-max", "1.5",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "margin_beta=" in out
    val = float(out.split("margin_beta=")[1].split()[0])
    assert 1.1 < val < 1.25


def test_verify_report_reproducible():
    # a cheap deterministic subset keeps this test fast
    from sectorbound import verification

    r1 = verification.run_suites(3, ["increment_graph_roundtrip", "gm_congruence"])
    r2 = verification.run_suites(3, ["increment_graph_roundtrip", "gm_congruence"])
    assert [x.line() for x in r1] == [x.line() for x in r2]
    assert all(x.passed for x in r1)


def test_bad_class_flag_is_input_error():
    rc = main([
        "analyze", "--system", packaged_example_path(), "--class", "bogus",
    ])
    assert rc == 2


def test_bad_sweep_spec_is_input_error():
    rc = main([
        "sweep", "--system", packaged_example_path(), "--sweep", "oops",
    ])
    assert rc == 2

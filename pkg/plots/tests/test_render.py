import json
from pathlib import Path

import pytest

from macresolve_plots import PlotJob, SchemaError, read_info, read_sweep, render
from macresolve_plots.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

JOBS = {
    "decay": FIXTURES / "decay_adder.csv",
    "region": FIXTURES / "adder_info.json",
    "epsprime": FIXTURES / "epsprime_noisy.csv",
    "bounds": FIXTURES / "bounds_adder.csv",
}


@pytest.mark.parametrize("kind", sorted(JOBS))
def test_each_kind_renders_deterministically(kind, tmp_path):
    first = tmp_path / f"{kind}_1.png"
    second = tmp_path / f"{kind}_2.png"
    render(PlotJob(kind=kind, source=str(JOBS[kind]), out=str(first)))
    render(PlotJob(kind=kind, source=str(JOBS[kind]), out=str(second)))
    assert first.stat().st_size > 1000
    assert first.read_bytes() == second.read_bytes()


def test_svg_output_is_deterministic(tmp_path):
    outs = []
    for stem in ("a", "b"):
        out = tmp_path / f"{stem}.svg"
        render(PlotJob(kind="region", source=str(JOBS["region"]), out=str(out)))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert b"<svg" in outs[0]


def test_unknown_kind_rejected():
    with pytest.raises(ValueError, match="kind"):
        PlotJob(kind="pie", source="x.csv", out="y.png")


def test_empty_csv_rejected_without_output(tmp_path):
    empty = tmp_path / "empty.csv"
    header = JOBS["decay"].read_text().splitlines()[0]
    empty.write_text(header + "\n")
    out = tmp_path / "decay.png"
    with pytest.raises(SchemaError, match="no data rows"):
        render(PlotJob(kind="decay", source=str(empty), out=str(out)))
    assert not out.exists()


def test_header_mismatch_rejected(tmp_path):
    bent = tmp_path / "bent.csv"
    bent.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(SchemaError, match="header"):
        read_sweep(bent)


def test_malformed_numeric_cell_rejected(tmp_path):
    lines = JOBS["decay"].read_text().splitlines()
    row = lines[1].split(",")
    row[8] = "not-a-number"
    bent = tmp_path / "bent.csv"
    bent.write_text(lines[0] + "\n" + ",".join(row) + "\n")
    with pytest.raises(SchemaError, match="tv"):
        read_sweep(bent)


def test_info_json_validation(tmp_path):
    payload = json.loads(JOBS["region"].read_text())
    assert read_info(JOBS["region"])["cornerA"] == payload["cornerA"]
    del payload["cornerA"]
    bent = tmp_path / "bent.json"
    bent.write_text(json.dumps(payload))
    with pytest.raises(SchemaError, match="missing keys"):
        read_info(bent)
    notjson = tmp_path / "notjson.json"
    notjson.write_text("][")
    with pytest.raises(SchemaError):
        read_info(notjson)


def test_cli_round_trip(tmp_path, capsys):
    out = tmp_path / "decay.png"
    code = main(["--kind", "decay", "--input", str(JOBS["decay"]), "--out", str(out)])
    assert code == 0 and out.exists()
    err = capsys.readouterr().err
    assert "wrote" in err

    missing = main(["--kind", "decay", "--input", "/nonexistent.csv", "--out", str(out)])
    assert missing == 1
    assert main(["--kind", "nope", "--input", "x", "--out", "y"]) == 1
    capsys.readouterr()

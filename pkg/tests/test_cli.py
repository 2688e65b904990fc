import hashlib
import json
import subprocess
import sys

import pytest

from conftest import GOLDEN
from ipcmap.cli import EXIT_CONFIG, EXIT_EMPTY, EXIT_IO, EXIT_MISMATCH, EXIT_OK, main
from ipcmap.config import ConfigError, PipelineConfig, load_config


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def manifest(path):
    return json.loads((path / "manifest.json").read_text())


def test_stats_matches_independent_counts(fixture_config, tmp_path, capsys):
    code, _, _ = run(["stats", "-c", str(fixture_config), "-o", str(tmp_path)], capsys)
    assert code == EXIT_OK
    for name in ("annual_counts.csv", "applicant_counts.csv", "office_counts.csv"):
        assert (tmp_path / name).read_bytes() == (GOLDEN / f"stats_{name}").read_bytes(), name
    assert "records: 11" in (tmp_path / "stats_summary.txt").read_text()


def test_stats_empty_filter_writes_empty_tables(fixture_config, tmp_path, capsys):
    code, _, _ = run(["stats", "-c", str(fixture_config), "-o", str(tmp_path), "--applicant-pattern", "nobody at all"], capsys)
    assert code == EXIT_OK
    for name in ("annual_counts.csv", "applicant_counts.csv", "office_counts.csv"):
        assert len((tmp_path / name).read_text().splitlines()) == 1


def test_missing_input_is_io_error(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    code, _, err = run(["stats", "--input", str(missing), "-o", str(tmp_path / "out")], capsys)
    assert code == EXIT_IO
    assert str(missing) in err


def test_bad_threshold_fails_before_work(fixture_config, tmp_path, capsys):
    out = tmp_path / "out"
    code, _, err = run(["network", "-c", str(fixture_config), "-o", str(out), "--jaccard-threshold", "1.1"], capsys)
    assert code == EXIT_CONFIG
    assert "jaccard_threshold" in err
    assert not out.exists()


@pytest.mark.parametrize(
    "field, value",
    [("min_occurrence", 0), ("from_year", 2024), ("level", "chapter"), ("resolution", 0.0), ("formats", ("pdf",))],
)
def test_config_validation(field, value):
    kwargs = {field: value}
    with pytest.raises(ConfigError):
        PipelineConfig(input="x.csv", **kwargs)


def test_config_defaults_and_overrides(fixture_config):
    d = PipelineConfig()
    assert (d.min_occurrence, d.jaccard_threshold, d.from_year, d.to_year, d.level) == (2, 0.05, 2008, 2023, "subclass")
    assert len(d.applicant_patterns) == 19
    cfg = load_config(fixture_config, {"seed": 11, "layout_iterations": 5, "level": None})
    assert cfg.seed == 11 and cfg.layout.iterations == 5 and cfg.layout.seed == 3
    assert cfg.level == "subclass"
    assert cfg.input.endswith("corpus12.csv")


def test_unknown_config_key(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('input = "a.csv"\njacard_threshold = 0.1\n')
    with pytest.raises(ConfigError):
        load_config(p)


def test_empty_graph_exit_code(fixture_config, tmp_path, capsys):
    code, _, err = run(["network", "-c", str(fixture_config), "-o", str(tmp_path), "--min-occurrence", "50"], capsys)
    assert code == EXIT_EMPTY
    assert "empty" in err


def test_network_outputs_and_manifest(fixture_config, tmp_path, capsys):
    code, _, _ = run(["network", "-c", str(fixture_config), "-o", str(tmp_path)], capsys)
    assert code == EXIT_OK
    files = manifest(tmp_path)["files"]
    expected = {
        "ingest-report.json",
        "subclass_nodes.csv",
        "subclass_modularity_edges.csv",
        "subclass_mst_edges.csv",
        "subclass_metrics.csv",
        "subclass_summary.json",
        "subclass_modularity_positions.csv",
        "subclass_mst_positions.csv",
        "subclass_modularity.svg",
        "subclass_mst.svg",
    } | {f"subclass_{kind}.{ext}" for kind in ("modularity", "mst") for ext in ("graphml", "gexf", "dot", "edgelist.csv")}
    assert set(files) == expected
    for name, digest in files.items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest


def test_mst_layout_export_commands(fixture_config, tmp_path, capsys):
    for cmd, must in [
        ("mst", {"subclass_mst_edges.csv", "subclass_mst_metrics.csv", "subclass_mst_summary.json"}),
        ("layout", {"subclass_modularity_positions.csv", "subclass_mst_positions.csv", "subclass_layout_params.json"}),
        ("export", {"subclass_modularity.graphml", "subclass_mst.gexf", "subclass_modularity.svg"}),
    ]:
        out = tmp_path / cmd
        code, _, _ = run([cmd, "-c", str(fixture_config), "-o", str(out)], capsys)
        assert code == EXIT_OK, cmd
        assert must <= set(manifest(out)["files"]), cmd
    assert (tmp_path / "mst" / "subclass_mst_edges.csv").read_bytes() == (GOLDEN / "subclass_mst_edges.csv").read_bytes()
    params = json.loads((tmp_path / "layout" / "subclass_layout_params.json").read_text())
    assert params["iterations"] == 200 and params["seed"] == 3


def test_replicate_against_oracle_manifest(fixture_config, tmp_path, capsys):
    code, out, _ = run(
        ["replicate", "-c", str(fixture_config), "-o", str(tmp_path), "--expected", str(GOLDEN / "replication_expected.json")], capsys
    )
    assert code == EXIT_OK, out
    report = (tmp_path / "replication_report.txt").read_text().splitlines()
    assert not [line for line in report if line.startswith("FAIL")]
    assert report[-1].split()[0].split("/")[0] == report[-1].split()[0].split("/")[1]


def test_replicate_against_published_values_reports_mismatch(fixture_config, tmp_path, capsys):
    code, out, _ = run(["replicate", "-c", str(fixture_config), "-o", str(tmp_path)], capsys)
    assert code == EXIT_MISMATCH
    assert "FAIL corpus.total: expected 612, got 11" in out


def test_module_entry_point(fixture_config, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ipcmap.cli", "stats", "-c", str(fixture_config), "-o", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "manifest.json").exists()

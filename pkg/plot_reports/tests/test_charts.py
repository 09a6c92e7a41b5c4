import os

import pytest

from plot_reports.charts import (
    MOBILITY_SUMMARY,
    POPULATION_SUMMARY,
    ChartSpec,
    ReportError,
    default_specs,
    load_series,
    render_all,
)
from plot_reports.cli import main

POPULATION_CSV = (
    "population,mean_exec_time_s_mean,mean_exec_time_s_stddev,"
    "failure_rate_mean,failure_rate_stddev\n"
    "30,3.5,0.4,0.0,0.0\n"
    "60,2.5,0.3,0.0,0.0\n"
    "90,2.0,0.2,0.0,0.0\n"
)

MOBILITY_CSV = (
    "mobility_factor,mean_exec_time_s_mean,mean_exec_time_s_stddev,"
    "failure_rate_mean,failure_rate_stddev,"
    "location_updates_mean,location_updates_stddev,"
    "bandwidth_utilization_mean,bandwidth_utilization_stddev\n"
    "0.1,4.9,0.5,0.2,0.05,843.0,40.0,0.013,0.001\n"
    "0.2,5.8,0.6,0.3,0.05,1303.0,50.0,0.015,0.001\n"
    "0.3,7.0,0.7,0.4,0.05,1770.0,60.0,0.017,0.001\n"
    "0.4,8.2,0.8,0.5,0.05,2286.0,70.0,0.020,0.001\n"
)


@pytest.fixture
def summary_dir(tmp_path):
    directory = tmp_path / "summaries"
    directory.mkdir()
    (directory / POPULATION_SUMMARY).write_text(POPULATION_CSV)
    (directory / MOBILITY_SUMMARY).write_text(MOBILITY_CSV)
    return directory


class TestLoadSeries:
    def test_reads_columns(self, summary_dir):
        spec = default_specs(str(summary_dir), "unused")[0]
        series = load_series(spec)
        assert series.xs == [30.0, 60.0, 90.0]
        assert series.ys == [3.5, 2.5, 2.0]
        assert series.errors == [0.4, 0.3, 0.2]

    def test_missing_file(self, tmp_path):
        spec = default_specs(str(tmp_path), "unused")[0]
        with pytest.raises(ReportError, match="not found"):
            load_series(spec)

    def test_missing_column_named(self, summary_dir):
        spec = ChartSpec(
            input_csv=str(summary_dir / POPULATION_SUMMARY),
            x_column="population",
            y_column="no_such_metric",
            error_column=None,
            title="t",
            output_path="x.png",
        )
        with pytest.raises(ReportError, match="no_such_metric"):
            load_series(spec)

    def test_header_only_is_an_error(self, summary_dir):
        path = summary_dir / POPULATION_SUMMARY
        path.write_text(POPULATION_CSV.splitlines()[0] + "\n")
        spec = default_specs(str(summary_dir), "unused")[0]
        with pytest.raises(ReportError, match="no data rows"):
            load_series(spec)

    def test_non_numeric_cell(self, summary_dir):
        path = summary_dir / POPULATION_SUMMARY
        path.write_text(POPULATION_CSV.replace("3.5", "many"))
        spec = default_specs(str(summary_dir), "unused")[0]
        with pytest.raises(ReportError, match="non-numeric"):
            load_series(spec)


class TestRenderAll:
    def test_four_images(self, summary_dir, tmp_path):
        out = tmp_path / "charts"
        paths = render_all(str(summary_dir), str(out))
        assert len(paths) == 4
        names = sorted(os.path.basename(p) for p in paths)
        assert names == [
            "bandwidth_vs_mobility_factor.png",
            "exec_time_vs_mobility_factor.png",
            "exec_time_vs_population.png",
            "updates_vs_mobility_factor.png",
        ]
        for path in paths:
            assert os.path.getsize(path) > 0
        assert sorted(os.listdir(out)) == names

    def test_single_point_chart(self, summary_dir, tmp_path):
        (summary_dir / POPULATION_SUMMARY).write_text(
            POPULATION_CSV.splitlines()[0] + "\n30,3.5,0.4,0.0,0.0\n"
        )
        paths = render_all(str(summary_dir), str(tmp_path / "charts"))
        assert len(paths) == 4

    def test_no_partial_images_on_bad_input(self, summary_dir, tmp_path):
        # population CSV is fine, mobility CSV lacks its metric columns
        (summary_dir / MOBILITY_SUMMARY).write_text("mobility_factor\n0.1\n")
        out = tmp_path / "charts"
        with pytest.raises(ReportError):
            render_all(str(summary_dir), str(out))
        assert not out.exists()


class TestCli:
    def test_success(self, summary_dir, tmp_path, capsys):
        out = tmp_path / "charts"
        assert main([str(summary_dir), str(out)]) == 0
        stdout = capsys.readouterr().out
        assert stdout.count("wrote ") == 4

    def test_failure_diagnostic(self, tmp_path, capsys):
        assert main([str(tmp_path), str(tmp_path / "charts")]) == 1
        err = capsys.readouterr().err
        assert "error:" in err and POPULATION_SUMMARY in err


def test_acceptance_secondary(summary_dir, tmp_path, capsys):
    out = tmp_path / "charts"
    code_ok = main([str(summary_dir), str(out)])
    images = sorted(os.listdir(out))
    (summary_dir / MOBILITY_SUMMARY).write_text("mobility_factor\n0.1\n")
    bad_out = tmp_path / "charts2"
    code_bad = main([str(summary_dir), str(bad_out)])
    err = capsys.readouterr().err
    ok = (
        code_ok == 0
        and len(images) == 4
        and code_bad == 1
        and "missing column" in err
        and not bad_out.exists()
    )
    status = "PASS" if ok else "FAIL"
    print(
        f"[{status}] SECONDARY plot_reports renders exactly four images and "
        f"fails cleanly on missing columns"
    )
    assert ok

import csv

import pytest

from lectern.bench import bench_tracking, write_csv
from lectern.simulator import UnknownScenario


@pytest.fixture(scope="module")
def small_report():
    return bench_tracking("write", 40)


def test_unknown_scenario_raises():
    with pytest.raises(UnknownScenario):
        bench_tracking("moonwalk", 10)


def test_write_report_shape(small_report):
    assert small_report.frames == 40
    assert len(small_report.records) == 40
    assert small_report.lost_rate == 0.0
    assert small_report.tip_rmse_mm < 10.0
    assert set(small_report.latency_us) == {
        "segment", "icp", "reconstruct", "pca", "kalman", "fuse", "total",
    }


def test_summary_lines_mention_key_numbers(small_report):
    text = "\n".join(small_report.summary_lines())
    assert "tip_rmse_mm" in text
    assert "latency[total]_us" in text


def test_csv_columns(tmp_path, small_report):
    path = tmp_path / "report.csv"
    write_csv(small_report, path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:4] == ["frame", "tip_err_mm", "axis_err_deg", "lost"]
    assert len(rows) == 41
    assert rows[1][0] == "0"


def test_shake_runs_without_crash():
    report = bench_tracking("shake", 120)
    assert report.frames == 120
    assert all(r.lost or r.fused_tip_err_mm >= 0 or r.source for r in report.records)

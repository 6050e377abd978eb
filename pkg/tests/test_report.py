import math

from declip.report import read_table, render_summary_figure, render_trace_figure
from declip.sweep import TRACE_COLUMNS, write_table


def trace_rows():
    rows = []
    for k in range(1, 6):
        rows.append(
            {
                "outer_iteration": k,
                "lambda": 0.1 * 0.5**k,
                "objective": 1.0 / k,
                "inner_iterations": 50,
                "restarts": 0,
                "nonzero_coeffs": 100 * k,
                "sdr_all": 5.0 + k,
                "sdr_clipped": 4.0 + k,
                "sdr_reliable": math.inf if k == 5 else 6.0 + k,
                "sdr_post": 7.0 + k,
            }
        )
    return rows


def test_trace_figure_from_rows(tmp_path):
    out = render_trace_figure(trace_rows(), tmp_path / "trace.png", title="demo")
    assert out.exists()
    assert out.stat().st_size > 1000


def test_trace_figure_from_csv(tmp_path):
    csv_path = tmp_path / "trace.csv"
    write_table(csv_path, TRACE_COLUMNS, trace_rows())
    out = render_trace_figure(csv_path, tmp_path / "trace.png")
    assert out.exists()


def test_summary_figure(tmp_path):
    rows = []
    for strategy in ("none", "rr", "cr"):
        for input_sdr in (1.0, 5.0, 10.0):
            rows.append(
                {
                    "input_sdr": input_sdr,
                    "strategy": strategy,
                    "n_signals": 2,
                    "mean_sdr_all": input_sdr + {"none": 3, "rr": 5, "cr": 6}[strategy],
                    "mean_sdr_clipped": input_sdr,
                    "mean_sdr_reliable": math.inf,
                }
            )
    out = render_summary_figure(rows, tmp_path / "summary.png")
    assert out.exists()
    assert out.stat().st_size > 1000


def test_read_table_types(tmp_path):
    csv_path = tmp_path / "t.csv"
    write_table(csv_path, TRACE_COLUMNS, trace_rows())
    rows = read_table(csv_path)
    assert rows[0]["outer_iteration"] == 1
    assert isinstance(rows[0]["lambda"], float)
    assert rows[0]["sdr_post"] == 8.0
    assert math.isinf(rows[4]["sdr_reliable"])

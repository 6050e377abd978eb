"""Render trace and sweep tables to figure files (PNG, headless backend)."""

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_SDR_SERIES = (
    ("sdr_all", "whole signal"),
    ("sdr_clipped", "clipped part"),
    ("sdr_reliable", "reliable part"),
    ("sdr_post", "postprocessed"),
)


def read_table(path) -> list[dict]:
    """Read a CSV written by the sweep back into typed row dicts."""
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            row = {}
            for key, value in raw.items():
                if value == "":
                    row[key] = None
                    continue
                try:
                    number = float(value)
                    row[key] = int(number) if number.is_integer() and "." not in value else number
                except ValueError:
                    row[key] = value
            rows.append(row)
    return rows


def _finite_series(rows, key):
    xs, ys = [], []
    for row in rows:
        value = row.get(key)
        if value is None or (isinstance(value, float) and not math.isfinite(value)):
            continue
        xs.append(row["outer_iteration"])
        ys.append(value)
    return xs, ys


def render_trace_figure(rows_or_csv, out_path, title: str = "") -> Path:
    """SDR course and objective/lambda decay over the outer iterations."""
    rows = rows_or_csv
    if isinstance(rows_or_csv, (str, Path)):
        rows = read_table(rows_or_csv)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)

    fig, (ax_sdr, ax_obj) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    for key, label in _SDR_SERIES:
        xs, ys = _finite_series(rows, key)
        if xs:
            ax_sdr.plot(xs, ys, marker="o", markersize=3, label=label)
    ax_sdr.set_ylabel("SDR (dB)")
    ax_sdr.grid(True, alpha=0.4)
    if ax_sdr.lines:
        ax_sdr.legend(loc="best", fontsize=8)
    if title:
        ax_sdr.set_title(title)

    iterations = [row["outer_iteration"] for row in rows]
    ax_obj.semilogy(iterations, [row["objective"] for row in rows], marker="o",
                    markersize=3, color="tab:red", label="objective")
    ax_lam = ax_obj.twinx()
    ax_lam.semilogy(iterations, [row["lambda"] for row in rows], linestyle="--",
                    color="tab:gray", label="lambda")
    ax_obj.set_xlabel("outer iteration")
    ax_obj.set_ylabel("objective")
    ax_lam.set_ylabel("lambda")
    ax_obj.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_summary_figure(rows_or_csv, out_path) -> Path:
    """Mean whole-signal SDR versus input SDR, one line per strategy."""
    rows = rows_or_csv
    if isinstance(rows_or_csv, (str, Path)):
        rows = read_table(rows_or_csv)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)

    by_strategy: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        value = row.get("mean_sdr_all")
        if value is None or (isinstance(value, float) and not math.isfinite(value)):
            continue
        by_strategy.setdefault(row["strategy"], []).append((row["input_sdr"], value))

    fig, ax = plt.subplots(figsize=(7, 4.2))
    for strategy, points in by_strategy.items():
        points.sort()
        ax.plot(*zip(*points), marker="o", label=strategy)
    ax.set_xlabel("input SDR (dB)")
    ax.set_ylabel("mean output SDR (dB)")
    ax.grid(True, alpha=0.4)
    if by_strategy:
        ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path

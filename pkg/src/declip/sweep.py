"""Corpus sweep: clip, declip, postprocess, and evaluate over an SDR grid.

Each (signal, input SDR) pair is one job; jobs run in a worker pool and
their rows are assembled in a deterministic order before anything is
written. Outputs per sweep: ``results.csv``/``summary.csv`` (and a JSON
mirror), per-run trace CSVs, the processed WAVs, and rendered figures.
"""

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clipping import hard_clip, masks_from_clipped, threshold_for_input_sdr
from .config import (
    check_known_keys,
    crossfade_config_from_mapping,
    load_mapping,
    parse_bool,
    solver_config_from_mapping,
)
from .postprocess import CrossfadeConfig, crossfade_reliable, replace_reliable
from .signals import Signal, _sdr_arrays
from .solver import SolverConfig, SolverTrace, declip_sspew
from .wavio import SYNTH_KINDS, read_wav, synth_signal, write_wav

DEFAULT_INPUT_SDRS = (1.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0)
STRATEGIES = ("none", "rr", "cr")

RESULT_COLUMNS = (
    "signal_id",
    "input_sdr",
    "strategy",
    "sdr_all",
    "sdr_clipped",
    "sdr_reliable",
    "runtime_s",
)
SUMMARY_COLUMNS = (
    "input_sdr",
    "strategy",
    "n_signals",
    "mean_sdr_all",
    "mean_sdr_clipped",
    "mean_sdr_reliable",
)
TRACE_COLUMNS = (
    "outer_iteration",
    "lambda",
    "objective",
    "inner_iterations",
    "restarts",
    "nonzero_coeffs",
    "sdr_all",
    "sdr_clipped",
    "sdr_reliable",
    "sdr_post",
)

_SWEEP_KEYS = ("corpus", "input_sdrs", "post", "output_dir", "jobs", "seed", "figures")


@dataclass
class SweepSpec:
    corpus: list[str]
    input_sdrs: list[float] = field(default_factory=lambda: list(DEFAULT_INPUT_SDRS))
    post: list[str] = field(default_factory=lambda: list(STRATEGIES))
    solver: SolverConfig = field(default_factory=SolverConfig)
    crossfade: CrossfadeConfig = field(default_factory=CrossfadeConfig)
    output_dir: Path = Path("sweep_out")
    jobs: int = 1
    seed: int = 0
    figures: bool = True

    def __post_init__(self):
        if not self.corpus:
            raise ValueError("sweep corpus must not be empty")
        if not self.input_sdrs:
            raise ValueError("sweep needs at least one input SDR")
        for strategy in self.post:
            if strategy not in STRATEGIES:
                raise ValueError(f"unknown post strategy {strategy!r}")
        if not self.post:
            raise ValueError("sweep needs at least one post strategy")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        self.output_dir = Path(self.output_dir)


def load_sweep_spec(path, default_seed: int = 0) -> SweepSpec:
    mapping = load_mapping(path)
    check_known_keys(mapping, extra_keys=_SWEEP_KEYS)
    if "corpus" not in mapping:
        raise ValueError(f"{path}: sweep spec needs a 'corpus' entry")
    corpus = [item.strip() for item in mapping["corpus"].split(",") if item.strip()]
    input_sdrs = list(DEFAULT_INPUT_SDRS)
    if "input_sdrs" in mapping:
        input_sdrs = [float(v) for v in mapping["input_sdrs"].split(",") if v.strip()]
    post = list(STRATEGIES)
    if "post" in mapping:
        post = [v.strip().lower() for v in mapping["post"].split(",") if v.strip()]
    return SweepSpec(
        corpus=corpus,
        input_sdrs=input_sdrs,
        post=post,
        solver=solver_config_from_mapping(mapping),
        crossfade=crossfade_config_from_mapping(mapping),
        output_dir=Path(mapping.get("output_dir", "sweep_out")),
        jobs=int(mapping.get("jobs", 1)),
        seed=int(mapping.get("seed", default_seed)),
        figures=parse_bool(mapping.get("figures", "true")),
    )


def load_corpus_entry(entry: str, seed: int = 0) -> tuple[str, Signal]:
    """Resolve a corpus entry: a WAV path or ``synth:<kind>:<dur>[:<rate>]``."""
    if entry.startswith("synth:"):
        parts = entry.split(":")
        if len(parts) not in (3, 4) or parts[1] not in SYNTH_KINDS:
            raise ValueError(
                f"bad synthetic corpus entry {entry!r}; "
                f"expected synth:<kind>:<duration>[:<rate>]"
            )
        kind, duration = parts[1], float(parts[2])
        rate = int(parts[3]) if len(parts) == 4 else 44100
        signal_id = f"{kind}_{duration:g}s"
        return signal_id, synth_signal(kind, duration, rate, seed=seed)
    return Path(entry).stem, read_wav(entry)


def trace_rows(trace: SolverTrace) -> list[dict]:
    rows = []
    for rec in trace.records:
        rows.append(
            {
                "outer_iteration": rec.stage,
                "lambda": rec.lam,
                "objective": rec.objective,
                "inner_iterations": rec.inner_iterations,
                "restarts": rec.restarts,
                "nonzero_coeffs": rec.nonzero_coeffs,
                "sdr_all": rec.sdr_all,
                "sdr_clipped": rec.sdr_clipped,
                "sdr_reliable": rec.sdr_reliable,
                "sdr_post": rec.extras.get("sdr_post"),
            }
        )
    return rows


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def write_table(path, columns, rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(col)) for col in columns])


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return format_cell(value)
    return value


def _run_job(args) -> dict:
    """One (signal, input SDR) cell: clip once, declip once, post per strategy."""
    entry, target_sdr, spec_solver, spec_crossfade, post, seed = args
    signal_id, original = load_corpus_entry(entry, seed=seed)
    theta = threshold_for_input_sdr(original, target_sdr)
    clipped = hard_clip(original, theta)
    mask = masks_from_clipped(clipped, theta)
    gt = original.samples

    callback = None
    if "cr" in post:

        def callback(stage, lam, x_hat):
            faded = crossfade_reliable(
                Signal(x_hat, clipped.sample_rate), clipped, mask, spec_crossfade
            )
            return {"sdr_post": _sdr_arrays(gt, faded.samples)}

    t0 = time.perf_counter()
    recon, trace = declip_sspew(
        clipped,
        mask,
        theta,
        spec_solver,
        ground_truth=original,
        stage_callback=callback,
    )
    solve_time = time.perf_counter() - t0
    results = []
    outputs = {}
    for strategy in post:
        t1 = time.perf_counter()
        if strategy == "none":
            out = recon
        elif strategy == "rr":
            out = replace_reliable(recon, clipped, mask)
        else:
            out = crossfade_reliable(recon, clipped, mask, spec_crossfade)
        post_time = time.perf_counter() - t1
        row = {
            "signal_id": signal_id,
            "input_sdr": target_sdr,
            "strategy": strategy,
            "sdr_all": _sdr_arrays(gt, out.samples),
            "sdr_clipped": _sdr_arrays(gt[mask.clipped], out.samples[mask.clipped])
            if mask.clipped.any()
            else None,
            "sdr_reliable": _sdr_arrays(gt[mask.reliable], out.samples[mask.reliable])
            if mask.reliable.any()
            else None,
            "runtime_s": solve_time + (0.0 if strategy == "none" else post_time),
        }
        results.append(row)
        outputs[strategy] = out
    return {
        "signal_id": signal_id,
        "input_sdr": target_sdr,
        "results": results,
        "trace": trace_rows(trace),
        "original": original,
        "clipped": clipped,
        "outputs": outputs,
    }


def summarize(rows: list[dict]) -> list[dict]:
    """Mean over the corpus for every (input SDR, strategy) cell."""
    groups: dict[tuple, list[dict]] = {}
    order = []
    for row in rows:
        key = (row["input_sdr"], row["strategy"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    summary = []
    for key in order:
        members = groups[key]
        entry = {
            "input_sdr": key[0],
            "strategy": key[1],
            "n_signals": len(members),
        }
        for col in ("sdr_all", "sdr_clipped", "sdr_reliable"):
            values = [m[col] for m in members if m[col] is not None]
            entry[f"mean_{col}"] = float(np.mean(values)) if values else None
        summary.append(entry)
    return summary


@dataclass
class SweepResult:
    rows: list[dict]
    summary: list[dict]
    errors: list[dict]
    output_dir: Path


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Execute the sweep and write all tables, WAVs, traces, and figures."""
    out_dir = spec.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        (entry, target, spec.solver, spec.crossfade, list(spec.post), spec.seed)
        for entry in spec.corpus
        for target in spec.input_sdrs
    ]
    outcomes: list[dict | None] = [None] * len(jobs)
    errors: list[dict] = []
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            futures = [pool.submit(_run_job, job) for job in jobs]
            for index, future in enumerate(futures):
                try:
                    outcomes[index] = future.result()
                except Exception as exc:  # noqa: BLE001 - per-row failure report
                    errors.append(_error_entry(jobs[index], exc))
    else:
        for index, job in enumerate(jobs):
            try:
                outcomes[index] = _run_job(job)
            except Exception as exc:  # noqa: BLE001
                errors.append(_error_entry(job, exc))

    rows: list[dict] = []
    wav_dir = out_dir / "wavs"
    trace_dir = out_dir / "traces"
    for outcome in outcomes:
        if outcome is None:
            continue
        rows.extend(outcome["results"])
        run_id = f"{outcome['signal_id']}_sdr{outcome['input_sdr']:g}"
        write_table(trace_dir / f"{run_id}.csv", TRACE_COLUMNS, outcome["trace"])
        write_wav(outcome["clipped"], wav_dir / f"{run_id}_clipped.wav")
        write_wav(outcome["original"], wav_dir / f"{outcome['signal_id']}_orig.wav")
        for strategy, out in outcome["outputs"].items():
            write_wav(out, wav_dir / f"{run_id}_{strategy}.wav")

    summary = summarize(rows)
    write_table(out_dir / "results.csv", RESULT_COLUMNS, rows)
    write_table(out_dir / "summary.csv", SUMMARY_COLUMNS, summary)
    payload = {
        "results": [
            {k: _json_safe(v) for k, v in row.items()} for row in rows
        ],
        "summary": [
            {k: _json_safe(v) for k, v in row.items()} for row in summary
        ],
        "errors": errors,
    }
    (out_dir / "results.json").write_text(json.dumps(payload, indent=2) + "\n")

    if spec.figures:
        from . import report  # deferred: pulls in matplotlib

        figure_dir = out_dir / "figures"
        for outcome in outcomes:
            if outcome is None:
                continue
            run_id = f"{outcome['signal_id']}_sdr{outcome['input_sdr']:g}"
            report.render_trace_figure(
                outcome["trace"], figure_dir / f"{run_id}.png", title=run_id
            )
        report.render_summary_figure(summary, figure_dir / "summary.png")

    return SweepResult(rows=rows, summary=summary, errors=errors, output_dir=out_dir)


def _error_entry(job, exc: Exception) -> dict:
    return {
        "corpus_entry": job[0],
        "input_sdr": job[1],
        "error": f"{type(exc).__name__}: {exc}",
    }

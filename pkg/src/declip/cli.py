"""Command-line front end: clip, declip, postprocess, sweep, synth."""

import argparse
import os
import sys
from pathlib import Path

from .clipping import hard_clip, masks_from_clipped, threshold_for_input_sdr
from .config import (
    check_known_keys,
    crossfade_config_from_mapping,
    load_mapping,
    solver_config_from_mapping,
)
from .postprocess import CrossfadeConfig, crossfade_reliable, replace_reliable
from .sidecar import read_sidecar, write_sidecar
from .signals import SampleMask, Signal, _sdr_arrays, sdr
from .solver import SolverConfig, declip_sspew
from .sweep import (
    TRACE_COLUMNS,
    load_sweep_spec,
    run_sweep,
    trace_rows,
    write_table,
)
from .wavio import SYNTH_KINDS, read_wav, synth_signal, write_wav


def _env_seed() -> int:
    return int(os.environ.get("DECLIP_SEED", "0"))


def _add_crossfade_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--placement", choices=("reliable", "clipped", "middle"),
                        help="which side of a border the crossfade modifies")
    parser.add_argument("--shape", choices=("linear", "sine_squared"),
                        help="crossfade gain curve")
    parser.add_argument("--width", type=int, dest="width",
                        help="crossfade length in samples")
    parser.add_argument("--short-policy", choices=("ignore", "replace", "shorten"),
                        help="treatment of runs shorter than the crossfade")
    parser.add_argument("--strict-ignore", action="store_true", default=None,
                        help="with --short-policy ignore, keep raw reconstruction "
                             "on short reliable runs (skip their replacement too)")


def _crossfade_from_args(mapping: dict, args) -> CrossfadeConfig:
    overrides = {
        "placement": args.placement,
        "shape": args.shape,
        "length_w": args.width,
        "short_policy": args.short_policy,
        "strict_ignore": args.strict_ignore,
    }
    merged = dict(mapping)
    for key, value in overrides.items():
        if value is not None:
            merged[key] = str(value)
    return crossfade_config_from_mapping(merged)


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda-target", type=float, help="final shrinkage weight")
    parser.add_argument("--lambda-init", type=float, help="initial shrinkage weight")
    parser.add_argument("--n-outer", type=int, help="continuation stages")
    parser.add_argument("--n-inner", type=int, help="iterations per stage")
    parser.add_argument("--step", type=float, help="gradient step size in (0, 1]")
    parser.add_argument("--shrinkage", choices=("ew", "pew"), help="shrinkage operator")
    parser.add_argument("--no-momentum", action="store_true", help="disable acceleration")


def _solver_from_args(mapping: dict, args) -> SolverConfig:
    merged = dict(mapping)
    overrides = {
        "lambda_target": args.lambda_target,
        "lambda_init": args.lambda_init,
        "n_outer": args.n_outer,
        "n_inner": args.n_inner,
        "step": args.step,
        "shrinkage": args.shrinkage,
    }
    for key, value in overrides.items():
        if value is not None:
            merged[key] = str(value)
    if args.no_momentum:
        merged["momentum"] = "false"
    return solver_config_from_mapping(merged)


def _load_observation(args) -> tuple[Signal, float, SampleMask]:
    """Clipped signal plus threshold and mask, from a sidecar or --theta."""
    clipped = read_wav(args.input)
    if args.sidecar is not None:
        theta, _, mask, rate = read_sidecar(args.sidecar)
        if len(mask) != len(clipped):
            raise ValueError(
                f"sidecar covers {len(mask)} samples, WAV has {len(clipped)}"
            )
        if rate != clipped.sample_rate:
            raise ValueError("sidecar sample rate disagrees with the WAV")
        return clipped, theta, mask
    if args.theta is None:
        default = Path(str(args.input) + ".meta")
        if default.exists():
            args.sidecar = default
            return _load_observation(args)
        raise ValueError("need --sidecar or --theta to locate the clipped samples")
    eps = args.eps if args.eps is not None else 1.0 / 32768.0
    mask = masks_from_clipped(clipped, args.theta, eps=eps)
    return clipped, args.theta, mask


def cmd_clip(args) -> int:
    x = read_wav(args.input)
    if args.theta is not None:
        theta = args.theta
    else:
        theta = threshold_for_input_sdr(x, args.sdr)
    clipped = hard_clip(x, theta)
    achieved = sdr(x, clipped)
    mask = masks_from_clipped(clipped, theta)
    lost = write_wav(clipped, args.out)
    sidecar = args.sidecar or str(args.out) + ".meta"
    write_sidecar(sidecar, theta, achieved, mask, clipped.sample_rate)
    if lost:
        print(f"warning: {lost} samples clipped to the 16-bit range", file=sys.stderr)
    print(f"theta={theta!r} achieved_sdr={achieved:.4f} dB "
          f"clipped={int(mask.clipped.sum())}/{len(mask)} -> {args.out}")
    return 0


def cmd_declip(args) -> int:
    clipped, theta, mask = _load_observation(args)
    file_map = load_mapping(args.config) if args.config else {}
    check_known_keys(file_map)
    solver_cfg = _solver_from_args(file_map, args)
    crossfade_cfg = _crossfade_from_args(file_map, args)
    reference = read_wav(args.ref) if args.ref else None

    callback = None
    if args.post == "cr" and reference is not None:
        gt = reference.samples

        def callback(stage, lam, x_hat):
            faded = crossfade_reliable(
                Signal(x_hat, clipped.sample_rate), clipped, mask, crossfade_cfg
            )
            return {"sdr_post": _sdr_arrays(gt, faded.samples)}

    recon, trace = declip_sspew(
        clipped, mask, theta, solver_cfg,
        ground_truth=reference, stage_callback=callback,
    )
    if args.post == "rr":
        out = replace_reliable(recon, clipped, mask)
    elif args.post == "cr":
        out = crossfade_reliable(recon, clipped, mask, crossfade_cfg)
    else:
        out = recon
    lost = write_wav(out, args.out)
    if lost:
        print(f"warning: {lost} samples clipped to the 16-bit range", file=sys.stderr)
    if args.trace:
        write_table(args.trace, TRACE_COLUMNS, trace_rows(trace))
        if args.figures:
            from . import report

            report.render_trace_figure(
                trace_rows(trace),
                Path(args.trace).with_suffix(".png"),
                title=Path(args.input).name,
            )
    final = trace.records[-1]
    note = f" sdr_all={final.sdr_all:.3f} dB" if final.sdr_all is not None else ""
    print(f"declipped {args.input} (post={args.post}, "
          f"objective={final.objective:.6g}){note} -> {args.out}")
    return 0


def cmd_postprocess(args) -> int:
    recon = read_wav(args.recon)
    args.input = args.clipped  # reuse the observation loader
    clipped, theta, mask = _load_observation(args)
    if len(recon) != len(clipped):
        raise ValueError("reconstruction and clipped WAV lengths differ")
    file_map = load_mapping(args.config) if args.config else {}
    check_known_keys(file_map)
    crossfade_cfg = _crossfade_from_args(file_map, args)
    if args.post == "rr":
        out = replace_reliable(recon, clipped, mask)
    else:
        out = crossfade_reliable(recon, clipped, mask, crossfade_cfg)
    lost = write_wav(out, args.out)
    if lost:
        print(f"warning: {lost} samples clipped to the 16-bit range", file=sys.stderr)
    print(f"postprocessed {args.recon} ({args.post}) -> {args.out}")
    return 0


def cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.spec, default_seed=_env_seed())
    if args.jobs is not None:
        spec.jobs = args.jobs
    if args.output_dir is not None:
        spec.output_dir = Path(args.output_dir)
    if args.no_figures:
        spec.figures = False
    result = run_sweep(spec)
    print(f"{len(result.rows)} result rows, {len(result.summary)} summary rows "
          f"-> {result.output_dir}")
    for error in result.errors:
        print(f"FAILED {error['corpus_entry']} @ {error['input_sdr']} dB: "
              f"{error['error']}", file=sys.stderr)
    return 1 if result.errors else 0


def cmd_synth(args) -> int:
    signal = synth_signal(args.kind, args.duration, args.rate, seed=args.seed)
    write_wav(signal, args.out)
    print(f"{args.kind}: {len(signal)} samples @ {args.rate} Hz -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="declip",
        description="Declip hard-clipped audio by sparse time-frequency "
                    "synthesis, enforce consistency by replacement or "
                    "crossfading, and sweep corpora over input-SDR grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_clip = sub.add_parser("clip", help="hard-clip a WAV at a threshold or target input SDR")
    p_clip.add_argument("input")
    p_clip.add_argument("--out", required=True)
    group = p_clip.add_mutually_exclusive_group(required=True)
    group.add_argument("--sdr", type=float, help="target input SDR in dB")
    group.add_argument("--theta", type=float, help="explicit clipping threshold")
    p_clip.add_argument("--sidecar", help="sidecar path (default: <out>.meta)")
    p_clip.set_defaults(func=cmd_clip)

    p_declip = sub.add_parser("declip", help="reconstruct a clipped WAV")
    p_declip.add_argument("input")
    p_declip.add_argument("--out", required=True)
    p_declip.add_argument("--sidecar", help="sidecar with theta and mask "
                          "(default: <input>.meta when present)")
    p_declip.add_argument("--theta", type=float,
                          help="derive masks from the WAV at this threshold")
    p_declip.add_argument("--eps", type=float,
                          help="mask tolerance with --theta (default: 1/32768)")
    p_declip.add_argument("--config", help="flat key-value config file")
    p_declip.add_argument("--post", choices=("none", "rr", "cr"), default="none")
    p_declip.add_argument("--trace", help="write a per-outer-iteration CSV here")
    p_declip.add_argument("--figures", action="store_true",
                          help="also render the trace CSV as a PNG")
    p_declip.add_argument("--ref", help="original WAV; adds SDR columns to the trace")
    _add_solver_flags(p_declip)
    _add_crossfade_flags(p_declip)
    p_declip.set_defaults(func=cmd_declip)

    p_post = sub.add_parser("postprocess",
                            help="apply RR/CR to an externally produced reconstruction")
    p_post.add_argument("recon")
    p_post.add_argument("clipped")
    p_post.add_argument("--out", required=True)
    p_post.add_argument("--post", choices=("rr", "cr"), required=True)
    p_post.add_argument("--sidecar")
    p_post.add_argument("--theta", type=float)
    p_post.add_argument("--eps", type=float)
    p_post.add_argument("--config")
    _add_crossfade_flags(p_post)
    p_post.set_defaults(func=cmd_postprocess)

    p_sweep = sub.add_parser("sweep", help="run a corpus x input-SDR x strategy sweep")
    p_sweep.add_argument("spec", help="sweep spec file (flat key-value)")
    p_sweep.add_argument("--jobs", type=int, help="worker processes")
    p_sweep.add_argument("--output-dir")
    p_sweep.add_argument("--no-figures", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_synth = sub.add_parser("synth", help="write a deterministic synthetic test WAV")
    p_synth.add_argument("kind", choices=SYNTH_KINDS)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--duration", type=float, default=1.0)
    p_synth.add_argument("--rate", type=int, default=44100)
    p_synth.add_argument("--seed", type=int, default=None,
                         help="default: DECLIP_SEED environment variable or 0")
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", "absent") is None:
        args.seed = _env_seed()
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

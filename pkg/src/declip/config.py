"""Flat key-value configuration files for solver and crossfade settings.

One ``key = value`` pair per line, ``#`` comments allowed. Keys mirror the
config dataclass fields; CLI flags override file values. Unknown keys are
rejected so typos fail loudly.
"""

from pathlib import Path

from .frames import FrameParams
from .postprocess import CrossfadeConfig
from .shrinkage import NeighborhoodShape
from .solver import SolverConfig

SOLVER_KEYS = {
    "lambda_target": float,
    "lambda_init": float,
    "n_outer": int,
    "n_inner": int,
    "step": float,
    "shrinkage": str,
    "momentum": "bool",
    "restart": str,
    "neighborhood_time": int,
    "neighborhood_freq": int,
}
FRAME_KEYS = {
    "window_length": int,
    "hop": int,
    "fft_length": int,
    "window": str,
}
CROSSFADE_KEYS = {
    "placement": str,
    "shape": str,
    "length_w": int,
    "short_policy": str,
    "strict_ignore": "bool",
}


def parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def parse_mapping(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse flat ``key = value`` lines into a string mapping."""
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        mapping[key.strip()] = value.strip()
    return mapping


def load_mapping(path) -> dict[str, str]:
    return parse_mapping(Path(path).read_text(), source=str(path))


def _convert(key: str, value: str, converter) -> object:
    if converter == "bool":
        return parse_bool(value)
    try:
        return converter(value)
    except ValueError as exc:
        raise ValueError(f"bad value for {key}: {value!r}") from exc


def check_known_keys(mapping: dict[str, str], extra_keys=()) -> None:
    known = set(SOLVER_KEYS) | set(FRAME_KEYS) | set(CROSSFADE_KEYS) | set(extra_keys)
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")


def solver_config_from_mapping(mapping: dict[str, str]) -> SolverConfig:
    """Build a SolverConfig (with optional frame overrides) from a mapping."""
    kwargs = {}
    for key, converter in SOLVER_KEYS.items():
        if key in mapping and key not in ("neighborhood_time", "neighborhood_freq"):
            kwargs[key] = _convert(key, mapping[key], converter)
    time_extent = int(mapping.get("neighborhood_time", 3))
    freq_extent = int(mapping.get("neighborhood_freq", 1))
    kwargs["shape"] = NeighborhoodShape(time_extent=time_extent, freq_extent=freq_extent)
    if any(key in mapping for key in FRAME_KEYS):
        window_length = int(mapping.get("window_length", 8192))
        kwargs["frame"] = FrameParams(
            window_length=window_length,
            hop=int(mapping.get("hop", window_length // 4)),
            fft_length=int(mapping.get("fft_length", window_length)),
            window=mapping.get("window", "hann"),
        )
    return SolverConfig(**kwargs)


def crossfade_config_from_mapping(mapping: dict[str, str]) -> CrossfadeConfig:
    kwargs = {}
    for key, converter in CROSSFADE_KEYS.items():
        if key in mapping:
            kwargs[key] = _convert(key, mapping[key], converter)
    return CrossfadeConfig(**kwargs)

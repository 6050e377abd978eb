"""Plain-text sidecar tying a clipped WAV to its threshold and sample mask.

The sidecar stores the exact clipping threshold, the achieved input SDR,
and a run-length encoding of the reliable/high/low mask, so declipping
never has to re-derive masks from 16-bit quantized samples.
"""

from pathlib import Path

from .signals import SampleMask, Segment, SegmentList, segments

_KIND_CODE = {"reliable": "R", "high": "H", "low": "L"}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


def encode_runs(mask: SampleMask) -> str:
    return ",".join(
        f"{_KIND_CODE[seg.kind]}:{seg.end - seg.start + 1}"
        for seg in segments(mask).runs
    )


def decode_runs(text: str) -> SampleMask:
    runs = []
    pos = 0
    for item in text.split(","):
        code, _, count = item.strip().partition(":")
        if code not in _CODE_KIND or not count.isdigit() or int(count) < 1:
            raise ValueError(f"bad mask run {item!r}")
        length = int(count)
        runs.append(Segment(pos, pos + length - 1, _CODE_KIND[code]))
        pos += length
    return SegmentList(runs).to_mask()


def write_sidecar(
    path, theta: float, achieved_sdr: float, mask: SampleMask, sample_rate: int
) -> None:
    lines = [
        f"theta = {float(theta)!r}",
        f"achieved_sdr = {float(achieved_sdr)!r}",
        f"n = {len(mask)}",
        f"rate = {int(sample_rate)}",
        f"runs = {encode_runs(mask)}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_sidecar(path) -> tuple[float, float, SampleMask, int]:
    """Returns (theta, achieved_sdr, mask, sample_rate)."""
    fields: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        fields[key.strip()] = value.strip()
    missing = {"theta", "achieved_sdr", "n", "rate", "runs"} - fields.keys()
    if missing:
        raise ValueError(f"{path}: missing sidecar fields {sorted(missing)}")
    mask = decode_runs(fields["runs"])
    if len(mask) != int(fields["n"]):
        raise ValueError(
            f"{path}: mask covers {len(mask)} samples but n = {fields['n']}"
        )
    return (
        float(fields["theta"]),
        float(fields["achieved_sdr"]),
        mask,
        int(fields["rate"]),
    )

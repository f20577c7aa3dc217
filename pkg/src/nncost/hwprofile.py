"""Hardware characterization profiles.

A profile maps each operation class to a table of (work-per-output ->
throughput) knots plus an average active power, pre-measured on the
target.  Queries interpolate linearly in log2(work-per-output) between
knots -- the x-axis spans orders of magnitude, so log-domain
interpolation avoids absurd slopes -- and clamp to the nearest knot
outside the table, never extrapolating.

The profile file is CSV with header
``op_class,work_per_output,throughput_ops_per_s,power_mw`` and optional
``#target``, ``#flash_bytes``, ``#sram_bytes`` pragma lines.  Other
``#`` lines are comments.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from math import log2
from types import MappingProxyType
from typing import Mapping

from .errors import ProfileError
from .graph import OpKind, OpNode
from .metrics import LayerMetrics

#: Operation classes a usable profile must cover (or declare a fallback).
HW_CLASSES = ("conv", "conv1x1", "dwconv", "fc", "pool", "elementwise")

#: Class used for any kind missing from the profile, when present.
FALLBACK_CLASS = "default"

KIND_TO_CLASS = {
    OpKind.CONV2D: "conv",
    OpKind.CONV1X1: "conv1x1",
    OpKind.DWCONV2D: "dwconv",
    OpKind.FULLY_CONNECTED: "fc",
    OpKind.MAXPOOL: "pool",
    OpKind.AVGPOOL: "pool",
    OpKind.RELU: "elementwise",
    OpKind.ADD: "elementwise",
    OpKind.CONCAT: "elementwise",
    OpKind.SOFTMAX: "elementwise",
}

# Typical microcontroller budgets used when a profile omits the pragmas.
DEFAULT_FLASH_BUDGET = 1_048_576
DEFAULT_SRAM_BUDGET = 327_680

_HEADER = "op_class,work_per_output,throughput_ops_per_s,power_mw"


@dataclass(frozen=True)
class ThroughputKnot:
    work_per_output: float
    throughput_ops_per_s: float


@dataclass(frozen=True)
class OpTypeProfile:
    op_class: str
    knots: tuple[ThroughputKnot, ...]
    power_mw: float


@dataclass(frozen=True)
class HwProfile:
    target_name: str
    classes: Mapping[str, OpTypeProfile]
    flash_budget_bytes: int
    sram_budget_bytes: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", MappingProxyType(dict(self.classes)))


def _parse_positive_float(raw: str, ctx: str) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ProfileError(f"{ctx}: not a number: {raw!r}") from None
    if v <= 0:
        raise ProfileError(f"{ctx}: must be positive, got {raw}")
    return v


def _parse_positive_int(raw: str, ctx: str) -> int:
    try:
        v = int(raw)
    except ValueError:
        raise ProfileError(f"{ctx}: not an integer: {raw!r}") from None
    if v <= 0:
        raise ProfileError(f"{ctx}: must be positive, got {raw}")
    return v


def load_profile(text: str) -> HwProfile:
    """Parse profile CSV text into an HwProfile."""
    target = "unnamed-target"
    flash = DEFAULT_FLASH_BUDGET
    sram = DEFAULT_SRAM_BUDGET
    rows: list[tuple[int, str, float, float, float]] = []
    saw_header = False

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split(None, 1)
            if parts and parts[0] == "target":
                if len(parts) < 2 or not parts[1].strip():
                    raise ProfileError(f"line {lineno}: #target needs a name")
                target = parts[1].strip()
            elif parts and parts[0] == "flash_bytes":
                flash = _parse_positive_int(parts[1].strip() if len(parts) > 1 else "", f"line {lineno}: #flash_bytes")
            elif parts and parts[0] == "sram_bytes":
                sram = _parse_positive_int(parts[1].strip() if len(parts) > 1 else "", f"line {lineno}: #sram_bytes")
            # anything else starting with '#' is a comment
            continue
        if not saw_header:
            if line != _HEADER:
                raise ProfileError(
                    f"line {lineno}: expected header '{_HEADER}', got {line!r}"
                )
            saw_header = True
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 4:
            raise ProfileError(f"line {lineno}: expected 4 fields, got {len(fields)}")
        op_class = fields[0]
        if op_class not in HW_CLASSES and op_class != FALLBACK_CLASS:
            raise ProfileError(f"line {lineno}: unknown op class '{op_class}'")
        x = _parse_positive_float(fields[1], f"line {lineno}: work_per_output")
        tp = _parse_positive_float(fields[2], f"line {lineno}: throughput_ops_per_s")
        power = _parse_positive_float(fields[3], f"line {lineno}: power_mw")
        rows.append((lineno, op_class, x, tp, power))

    if not saw_header:
        raise ProfileError(f"missing header '{_HEADER}'")

    grouped: dict[str, list[tuple[float, float, float]]] = {}
    for lineno, op_class, x, tp, power in rows:
        grouped.setdefault(op_class, []).append((x, tp, power))

    classes: dict[str, OpTypeProfile] = {}
    for op_class, entries in grouped.items():
        entries.sort(key=lambda e: e[0])
        knots = []
        prev_x = None
        power = entries[0][2]
        for x, tp, p in entries:
            if prev_x is not None and x == prev_x:
                raise ProfileError(
                    f"duplicate knot work_per_output={x:g} for class '{op_class}'"
                )
            if p != power:
                raise ProfileError(
                    f"inconsistent power_mw for class '{op_class}' ({p:g} vs {power:g})"
                )
            knots.append(ThroughputKnot(x, tp))
            prev_x = x
        classes[op_class] = OpTypeProfile(op_class, tuple(knots), power)

    if FALLBACK_CLASS not in classes:
        missing = sorted(set(HW_CLASSES) - classes.keys())
        if missing:
            raise ProfileError(
                "profile is missing class(es) "
                + ", ".join(missing)
                + f" and declares no '{FALLBACK_CLASS}' fallback"
            )
    if not classes:
        raise ProfileError("profile defines no op classes")

    return HwProfile(
        target_name=target,
        classes=classes,
        flash_budget_bytes=flash,
        sram_budget_bytes=sram,
    )


def dump_profile(profile: HwProfile) -> str:
    """Serialize a profile back to CSV (load/dump round-trips)."""
    lines = [
        f"#target {profile.target_name}",
        f"#flash_bytes {profile.flash_budget_bytes}",
        f"#sram_bytes {profile.sram_budget_bytes}",
        _HEADER,
    ]
    for op_class in sorted(profile.classes):
        prof = profile.classes[op_class]
        for knot in prof.knots:
            lines.append(
                f"{op_class},{knot.work_per_output!r},"
                f"{knot.throughput_ops_per_s!r},{prof.power_mw!r}"
            )
    return "\n".join(lines) + "\n"


def _class_profile(profile: HwProfile, op_class: str) -> OpTypeProfile:
    prof = profile.classes.get(op_class)
    if prof is None:
        prof = profile.classes.get(FALLBACK_CLASS)
    if prof is None:
        raise ProfileError(
            f"profile '{profile.target_name}' has no class '{op_class}' and no fallback"
        )
    return prof


def class_throughput(profile: HwProfile, op_class: str, x: float) -> float:
    """Throughput (Ops/s) for a class at work-per-output x.

    Exact at knots, linear in (log2 x, throughput) between them, clamped
    to the nearest knot outside the table.
    """
    if x <= 0:
        raise ValueError(f"work_per_output must be positive, got {x}")
    knots = _class_profile(profile, op_class).knots
    xs = [k.work_per_output for k in knots]
    if x <= xs[0]:
        return knots[0].throughput_ops_per_s
    if x >= xs[-1]:
        return knots[-1].throughput_ops_per_s
    i = bisect_left(xs, x)
    if xs[i] == x:
        return knots[i].throughput_ops_per_s
    lo, hi = knots[i - 1], knots[i]
    frac = (log2(x) - log2(lo.work_per_output)) / (
        log2(hi.work_per_output) - log2(lo.work_per_output)
    )
    return lo.throughput_ops_per_s + (hi.throughput_ops_per_s - lo.throughput_ops_per_s) * frac


def throughput(profile: HwProfile, kind: OpKind, x: float) -> float:
    """Throughput (Ops/s) for an op kind at work-per-output x."""
    return class_throughput(profile, KIND_TO_CLASS[kind], x)


def class_power_mw(profile: HwProfile, op_class: str) -> float:
    return _class_profile(profile, op_class).power_mw


def estimate_time(profile: HwProfile, node: OpNode, m: LayerMetrics) -> float:
    """Estimated execution time in seconds: ops / throughput."""
    if m.ops == 0:
        return 0.0
    return m.ops / throughput(profile, node.kind, float(m.work_per_output))


def estimate_energy(profile: HwProfile, node: OpNode, m: LayerMetrics) -> float:
    """Estimated energy in joules: time x active power."""
    if m.ops == 0:
        return 0.0
    t = estimate_time(profile, node, m)
    return t * class_power_mw(profile, KIND_TO_CLASS[node.kind]) * 1e-3


@lru_cache(maxsize=1)
def default_profile() -> HwProfile:
    """The synthetic profile bundled with the package.

    Its numbers are illustrative (see the file header), chosen so the
    class ordering and overall 5x throughput spread are realistic for a
    small in-order MCU core; they are not measurements.
    """
    from .bundled import default_profile_text

    return load_profile(default_profile_text())

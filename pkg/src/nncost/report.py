"""Cost-report assembly and rendering.

analyze() runs the whole pipeline over one graph and one profile and
returns a CostReport; compare() normalizes several reports against the
first one (same target required).  Rendering is deterministic: the JSON
form uses sorted keys and shortest round-trip float formatting so it is
byte-identical across runs and platforms, which is what the golden-file
tests pin down.

Time and energy totals are plain sums over layers: a single in-order
core runs layers sequentially, so no overlap is modeled.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .errors import ComparisonError
from .graph import DEFAULT_ENUMERATION_LIMIT, Graph, ShapeMap, default_order, infer_shapes
from .hwprofile import KIND_TO_CLASS, HwProfile, estimate_energy, estimate_time
from .liveness import (
    FitVerdict,
    FootprintReport,
    check_fit,
    memory_footprint,
    min_peak_order,
)
from .metrics import OPS_PER_MAC, layer_metrics
from .version import __version__


@dataclass(frozen=True)
class AnalyzeOptions:
    order_policy: str = "default"  # "default" or "min-peak"
    in_place: bool = True
    enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT


@dataclass(frozen=True)
class LayerRow:
    name: str
    kind: str
    macs: int
    ops: int
    params_bytes: int
    out_bytes: int
    work_per_output: float
    est_time_s: float
    est_energy_j: float
    time_share: float
    energy_share: float


@dataclass(frozen=True)
class Totals:
    macs: int
    ops: int
    params_bytes: int
    est_time_s: float
    est_energy_j: float


@dataclass(frozen=True)
class ClassShare:
    ops_share: float
    time_share: float
    energy_share: float


@dataclass(frozen=True)
class CostReport:
    model: str
    target: str
    rows: tuple[LayerRow, ...]
    totals: Totals
    distribution: dict[str, ClassShare]
    footprint: FootprintReport
    fit: FitVerdict
    order: tuple[str, ...]
    tool_version: str
    in_place: bool
    ops_per_mac: int
    order_policy: str


@dataclass(frozen=True)
class ComparisonEntry:
    model: str
    ops: int
    est_time_s: float
    est_energy_j: float
    footprint_bytes: int
    norm_ops: float
    norm_time: float
    norm_energy: float
    norm_footprint: float
    class_ops_share: dict[str, float]


@dataclass(frozen=True)
class ComparisonTable:
    target: str
    entries: tuple[ComparisonEntry, ...]


def _share(value: float, total: float) -> float:
    return value / total if total else 0.0


def analyze(g: Graph, profile: HwProfile, opts: AnalyzeOptions = AnalyzeOptions()) -> CostReport:
    """Estimate per-layer and aggregate cost of one inference of g."""
    g.validate()
    shapes: ShapeMap = infer_shapes(g)

    if opts.order_policy == "default":
        order = default_order(g)
    elif opts.order_policy == "min-peak":
        order, _ = min_peak_order(g, shapes, opts.enumeration_limit, opts.in_place)
    else:
        raise ValueError(f"unknown order policy '{opts.order_policy}'")

    per_node = []
    for name in order:
        node = g.node_map[name]
        m = layer_metrics(node, shapes)
        t = estimate_time(profile, node, m)
        e = estimate_energy(profile, node, m)
        per_node.append((node, m, t, e))

    total_macs = sum(m.macs for _, m, _, _ in per_node)
    total_ops = sum(m.ops for _, m, _, _ in per_node)
    total_params_bytes = sum(m.params_bytes for _, m, _, _ in per_node)
    total_time = sum(t for _, _, t, _ in per_node)
    total_energy = sum(e for _, _, _, e in per_node)

    rows = tuple(
        LayerRow(
            name=node.name,
            kind=node.kind.value,
            macs=m.macs,
            ops=m.ops,
            params_bytes=m.params_bytes,
            out_bytes=m.out_bytes,
            work_per_output=float(m.work_per_output),
            est_time_s=t,
            est_energy_j=e,
            time_share=_share(t, total_time),
            energy_share=_share(e, total_energy),
        )
        for node, m, t, e in per_node
    )

    by_class: dict[str, list[float]] = {}
    for node, m, t, e in per_node:
        acc = by_class.setdefault(KIND_TO_CLASS[node.kind], [0.0, 0.0, 0.0])
        acc[0] += m.ops
        acc[1] += t
        acc[2] += e
    distribution = {
        cls: ClassShare(
            ops_share=_share(acc[0], total_ops),
            time_share=_share(acc[1], total_time),
            energy_share=_share(acc[2], total_energy),
        )
        for cls, acc in sorted(by_class.items())
    }

    footprint = memory_footprint(g, shapes, order, opts.in_place)
    fit = check_fit(footprint, profile)

    return CostReport(
        model=g.name,
        target=profile.target_name,
        rows=rows,
        totals=Totals(
            macs=total_macs,
            ops=total_ops,
            params_bytes=total_params_bytes,
            est_time_s=total_time,
            est_energy_j=total_energy,
        ),
        distribution=distribution,
        footprint=footprint,
        fit=fit,
        order=tuple(order),
        tool_version=__version__,
        in_place=opts.in_place,
        ops_per_mac=OPS_PER_MAC,
        order_policy=opts.order_policy,
    )


def compare(reports: list[CostReport]) -> ComparisonTable:
    """Normalize reports against the first one (the first row reads 1.0).

    All reports must come from the same target; cross-target
    normalization is meaningless.
    """
    if len(reports) < 2:
        raise ComparisonError("compare needs at least 2 reports")
    base = reports[0]
    for r in reports[1:]:
        if r.target != base.target:
            raise ComparisonError(
                f"cannot compare reports from different targets "
                f"('{base.target}' vs '{r.target}')"
            )

    def norm(value: float, base_value: float) -> float:
        if base_value == 0:
            return 1.0 if value == 0 else float("inf")
        return value / base_value

    entries = tuple(
        ComparisonEntry(
            model=r.model,
            ops=r.totals.ops,
            est_time_s=r.totals.est_time_s,
            est_energy_j=r.totals.est_energy_j,
            footprint_bytes=r.footprint.total_bytes,
            norm_ops=norm(r.totals.ops, base.totals.ops),
            norm_time=norm(r.totals.est_time_s, base.totals.est_time_s),
            norm_energy=norm(r.totals.est_energy_j, base.totals.est_energy_j),
            norm_footprint=norm(r.footprint.total_bytes, base.footprint.total_bytes),
            class_ops_share={cls: s.ops_share for cls, s in r.distribution.items()},
        )
        for r in reports
    )
    return ComparisonTable(target=base.target, entries=entries)


# ---------------------------------------------------------------------------
# serialization helpers


def report_to_dict(r: CostReport) -> dict:
    return {
        "model": r.model,
        "target": r.target,
        "tool_version": r.tool_version,
        "config": {
            "ops_per_mac": r.ops_per_mac,
            "in_place": r.in_place,
            "order_policy": r.order_policy,
        },
        "order": list(r.order),
        "rows": [
            {
                "name": row.name,
                "kind": row.kind,
                "macs": row.macs,
                "ops": row.ops,
                "params_bytes": row.params_bytes,
                "out_bytes": row.out_bytes,
                "work_per_output": row.work_per_output,
                "est_time_s": row.est_time_s,
                "est_energy_j": row.est_energy_j,
                "time_share": row.time_share,
                "energy_share": row.energy_share,
            }
            for row in r.rows
        ],
        "totals": {
            "macs": r.totals.macs,
            "ops": r.totals.ops,
            "params_bytes": r.totals.params_bytes,
            "est_time_s": r.totals.est_time_s,
            "est_energy_j": r.totals.est_energy_j,
        },
        "distribution": {
            cls: {
                "ops_share": s.ops_share,
                "time_share": s.time_share,
                "energy_share": s.energy_share,
            }
            for cls, s in r.distribution.items()
        },
        "footprint": {
            "weights_bytes": r.footprint.weights_bytes,
            "peak_activation_bytes": r.footprint.peak_activation_bytes,
            "total_bytes": r.footprint.total_bytes,
            "activation_share": r.footprint.activation_share,
        },
        "fit": {
            "fits": r.fit.fits,
            "flash_ok": r.fit.flash_ok,
            "sram_ok": r.fit.sram_ok,
            "flash_budget_bytes": r.fit.flash_budget_bytes,
            "sram_budget_bytes": r.fit.sram_budget_bytes,
            "flash_margin_bytes": r.fit.flash_margin_bytes,
            "sram_margin_bytes": r.fit.sram_margin_bytes,
        },
    }


def comparison_to_dict(c: ComparisonTable) -> dict:
    return {
        "target": c.target,
        "models": [
            {
                "model": e.model,
                "ops": e.ops,
                "est_time_s": e.est_time_s,
                "est_energy_j": e.est_energy_j,
                "footprint_bytes": e.footprint_bytes,
                "norm_ops": e.norm_ops,
                "norm_time": e.norm_time,
                "norm_energy": e.norm_energy,
                "norm_footprint": e.norm_footprint,
                "class_ops_share": dict(sorted(e.class_ops_share.items())),
            }
            for e in c.entries
        ],
    }


# ---------------------------------------------------------------------------
# rendering

_CSV_COLUMNS = [
    "name",
    "kind",
    "macs",
    "ops",
    "params_bytes",
    "out_bytes",
    "work_per_output",
    "est_time_s",
    "est_energy_j",
]


def _fmt_si_time(seconds: float) -> str:
    if seconds == 0:
        return "0"
    if seconds < 1e-3:
        return f"{seconds * 1e6:.2f}us"
    if seconds < 1:
        return f"{seconds * 1e3:.3f}ms"
    return f"{seconds:.4f}s"


def _fmt_si_energy(joules: float) -> str:
    if joules == 0:
        return "0"
    if joules < 1e-3:
        return f"{joules * 1e6:.2f}uJ"
    if joules < 1:
        return f"{joules * 1e3:.3f}mJ"
    return f"{joules:.4f}J"


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return lines


def _render_report_table(r: CostReport) -> str:
    headers = [
        "name", "kind", "macs", "ops", "params_B", "out_B",
        "w/out", "time", "energy", "time%", "energy%",
    ]
    rows = [
        [
            row.name,
            row.kind,
            str(row.macs),
            str(row.ops),
            str(row.params_bytes),
            str(row.out_bytes),
            f"{row.work_per_output:g}",
            _fmt_si_time(row.est_time_s),
            _fmt_si_energy(row.est_energy_j),
            f"{row.time_share * 100:.1f}",
            f"{row.energy_share * 100:.1f}",
        ]
        for row in r.rows
    ]
    rows.append(
        [
            "TOTAL",
            "",
            str(r.totals.macs),
            str(r.totals.ops),
            str(r.totals.params_bytes),
            "",
            "",
            _fmt_si_time(r.totals.est_time_s),
            _fmt_si_energy(r.totals.est_energy_j),
            "100.0" if r.totals.est_time_s else "0.0",
            "100.0" if r.totals.est_energy_j else "0.0",
        ]
    )
    lines = [f"model: {r.model}    target: {r.target}    tool: nncost {r.tool_version}"]
    lines.append(
        f"config: ops_per_mac={r.ops_per_mac} in_place={'on' if r.in_place else 'off'} "
        f"order={r.order_policy}"
    )
    lines.append("")
    lines.extend(_table(headers, rows))
    lines.append("")
    if r.distribution:
        lines.append("per-class distribution (share of ops / time / energy):")
        for cls, s in r.distribution.items():
            lines.append(
                f"  {cls:<12} {s.ops_share * 100:6.1f}%  {s.time_share * 100:6.1f}%  "
                f"{s.energy_share * 100:6.1f}%"
            )
        lines.append("")
    fp = r.footprint
    lines.append(
        f"footprint: weights={fp.weights_bytes} B  "
        f"peak_activation={fp.peak_activation_bytes} B  total={fp.total_bytes} B  "
        f"activation_share={fp.activation_share * 100:.1f}%"
    )
    verdict = "PASS" if r.fit.fits else "FAIL"
    detail = []
    if not r.fit.flash_ok:
        detail.append("flash exceeded")
    if not r.fit.sram_ok:
        detail.append("sram exceeded")
    suffix = f" ({', '.join(detail)})" if detail else ""
    lines.append(
        f"fit: {verdict}{suffix}  flash_margin={r.fit.flash_margin_bytes} B  "
        f"sram_margin={r.fit.sram_margin_bytes} B"
    )
    return "\n".join(lines)


def _render_report_csv(r: CostReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_COLUMNS)
    for row in r.rows:
        w.writerow(
            [
                row.name,
                row.kind,
                row.macs,
                row.ops,
                row.params_bytes,
                row.out_bytes,
                row.work_per_output,
                row.est_time_s,
                row.est_energy_j,
            ]
        )
    return buf.getvalue().rstrip("\n")


def _render_comparison_table(c: ComparisonTable) -> str:
    headers = [
        "model", "ops", "ops(norm)", "time", "time(norm)",
        "energy", "energy(norm)", "footprint_B", "footprint(norm)",
    ]
    rows = [
        [
            e.model,
            str(e.ops),
            f"{e.norm_ops:.3f}",
            _fmt_si_time(e.est_time_s),
            f"{e.norm_time:.3f}",
            _fmt_si_energy(e.est_energy_j),
            f"{e.norm_energy:.3f}",
            str(e.footprint_bytes),
            f"{e.norm_footprint:.3f}",
        ]
        for e in c.entries
    ]
    lines = [f"target: {c.target}    (normalized to '{c.entries[0].model}')", ""]
    lines.extend(_table(headers, rows))
    lines.append("")
    lines.append("op-class ops share per model:")
    classes = sorted({cls for e in c.entries for cls in e.class_ops_share})
    for e in c.entries:
        parts = [f"{cls}={e.class_ops_share.get(cls, 0.0) * 100:.1f}%" for cls in classes]
        lines.append(f"  {e.model:<20} " + "  ".join(parts))
    return "\n".join(lines)


def _render_comparison_csv(c: ComparisonTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        [
            "model", "ops", "norm_ops", "est_time_s", "norm_time",
            "est_energy_j", "norm_energy", "footprint_bytes", "norm_footprint",
        ]
    )
    for e in c.entries:
        w.writerow(
            [
                e.model, e.ops, e.norm_ops, e.est_time_s, e.norm_time,
                e.est_energy_j, e.norm_energy, e.footprint_bytes, e.norm_footprint,
            ]
        )
    return buf.getvalue().rstrip("\n")


# --- svg -------------------------------------------------------------------

_SVG_COLORS = {"ops": "#4878cf", "time": "#e8a33d", "energy": "#d65f5f"}


def _svg_header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]


def _svg_bar(x: float, y: float, w: float, h: float, color: str) -> str:
    return (
        f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
        f'fill="{color}"/>'
    )


def _render_report_svg(r: CostReport) -> str:
    classes = sorted(r.distribution)
    group_w = 90
    chart_h = 160
    base_y = 200.0
    width = max(40 + group_w * len(classes) + 240, 520)
    lines = _svg_header(width, 300, f"cost distribution: {r.model} on {r.target}")
    lines.append(
        f'<text x="10" y="20" font-size="14">{r.model} on {r.target} '
        f"(share of ops / time / energy per op class)</text>"
    )
    for gi, cls in enumerate(classes):
        share = r.distribution[cls]
        gx = 40 + gi * group_w
        lines.append(f'<g class="bargroup" id="class-{cls}">')
        for bi, (key, value) in enumerate(
            (("ops", share.ops_share), ("time", share.time_share), ("energy", share.energy_share))
        ):
            h = chart_h * value
            lines.append(
                _svg_bar(gx + bi * 22, base_y - h, 18, h, _SVG_COLORS[key])
            )
        lines.append(
            f'<text x="{gx}" y="{base_y + 16:.2f}" font-size="11">{cls}</text>'
        )
        lines.append("</g>")
    # memory breakdown on the right
    fp = r.footprint
    mem_x = width - 200
    biggest = max(fp.weights_bytes, fp.peak_activation_bytes, 1)
    lines.append('<g id="memory">')
    lines.append(f'<text x="{mem_x}" y="20" font-size="12">memory (B)</text>')
    for bi, (label, value) in enumerate(
        (("weights", fp.weights_bytes), ("peak_act", fp.peak_activation_bytes))
    ):
        h = chart_h * (value / biggest)
        x = mem_x + bi * 70
        lines.append(_svg_bar(x, base_y - h, 40, h, "#6aa56a" if bi == 0 else "#8a6ab0"))
        lines.append(f'<text x="{x}" y="{base_y + 16:.2f}" font-size="11">{label}</text>')
        lines.append(f'<text x="{x}" y="{base_y + 30:.2f}" font-size="10">{value}</text>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines)


def _render_comparison_svg(c: ComparisonTable) -> str:
    metrics = ("norm_ops", "norm_time", "norm_energy", "norm_footprint")
    colors = ("#4878cf", "#e8a33d", "#d65f5f", "#6aa56a")
    group_w = 120
    chart_h = 160
    base_y = 200.0
    width = max(40 + group_w * len(c.entries) + 40, 420)
    top = max(
        [getattr(e, m) for e in c.entries for m in metrics if getattr(e, m) != float("inf")]
        or [1.0]
    )
    top = max(top, 1.0)
    lines = _svg_header(width, 300, f"model comparison on {c.target}")
    lines.append(
        f'<text x="10" y="20" font-size="14">normalized ops / time / energy / '
        f"footprint (target {c.target})</text>"
    )
    for gi, e in enumerate(c.entries):
        gx = 40 + gi * group_w
        lines.append(f'<g class="bargroup" id="model-{gi}">')
        for bi, (metric, color) in enumerate(zip(metrics, colors)):
            v = getattr(e, metric)
            v = top if v == float("inf") else v
            h = chart_h * (v / top)
            lines.append(_svg_bar(gx + bi * 26, base_y - h, 22, h, color))
        lines.append(f'<text x="{gx}" y="{base_y + 16:.2f}" font-size="11">{e.model}</text>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines)


def render(obj: "CostReport | ComparisonTable", fmt: str = "table") -> str:
    """Render a report or comparison as table, json, csv, or svg text."""
    if fmt not in ("table", "json", "csv", "svg"):
        raise ValueError(f"unknown format '{fmt}'")
    if isinstance(obj, CostReport):
        if fmt == "table":
            return _render_report_table(obj)
        if fmt == "json":
            return json.dumps(report_to_dict(obj), sort_keys=True, indent=2)
        if fmt == "csv":
            return _render_report_csv(obj)
        return _render_report_svg(obj)
    if isinstance(obj, ComparisonTable):
        if fmt == "table":
            return _render_comparison_table(obj)
        if fmt == "json":
            return json.dumps(comparison_to_dict(obj), sort_keys=True, indent=2)
        if fmt == "csv":
            return _render_comparison_csv(obj)
        return _render_comparison_svg(obj)
    raise TypeError(f"cannot render object of type {type(obj).__name__}")

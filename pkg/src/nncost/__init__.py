"""nncost: static per-inference runtime, energy, and memory-footprint
estimation for neural-network graphs on pre-characterized embedded
targets.

All values are immutable after construction and every operation is a
pure function of its inputs, so the whole API is safe to use
concurrently without synchronization.
"""

from .errors import (
    ComparisonError,
    CostModelError,
    EnumerationLimitError,
    ParseError,
    ProfileError,
    ShapeError,
    ValidationError,
)
from .graph import (
    DEFAULT_ENUMERATION_LIMIT,
    DType,
    Graph,
    GraphInput,
    OpAttrs,
    OpKind,
    OpNode,
    ShapeMap,
    TensorInfo,
    TensorShape,
    all_topological_orders,
    default_order,
    dump_model,
    infer_shapes,
    parse_model,
)
from .hwprofile import (
    HwProfile,
    OpTypeProfile,
    ThroughputKnot,
    class_throughput,
    default_profile,
    dump_profile,
    estimate_energy,
    estimate_time,
    load_profile,
    throughput,
)
from .liveness import (
    FitVerdict,
    FootprintReport,
    LivenessStep,
    LivenessTrace,
    check_fit,
    live_set,
    memory_footprint,
    min_peak_order,
    peak_activation,
)
from .metrics import (
    LayerMetrics,
    OPS_PER_MAC,
    activation_bytes,
    count_macs,
    count_ops,
    count_params,
    layer_metrics,
    total_params,
    work_per_output,
)
from .report import (
    AnalyzeOptions,
    ComparisonTable,
    CostReport,
    LayerRow,
    analyze,
    compare,
    render,
)
from .version import __version__

__all__ = [
    "AnalyzeOptions",
    "ComparisonError",
    "ComparisonTable",
    "CostModelError",
    "CostReport",
    "DEFAULT_ENUMERATION_LIMIT",
    "DType",
    "EnumerationLimitError",
    "FitVerdict",
    "FootprintReport",
    "Graph",
    "GraphInput",
    "HwProfile",
    "LayerMetrics",
    "LayerRow",
    "LivenessStep",
    "LivenessTrace",
    "OPS_PER_MAC",
    "OpAttrs",
    "OpKind",
    "OpNode",
    "OpTypeProfile",
    "ParseError",
    "ProfileError",
    "ShapeError",
    "ShapeMap",
    "TensorInfo",
    "TensorShape",
    "ThroughputKnot",
    "ValidationError",
    "activation_bytes",
    "all_topological_orders",
    "analyze",
    "check_fit",
    "class_throughput",
    "compare",
    "count_macs",
    "count_ops",
    "count_params",
    "default_order",
    "default_profile",
    "dump_model",
    "dump_profile",
    "estimate_energy",
    "estimate_time",
    "infer_shapes",
    "layer_metrics",
    "live_set",
    "load_profile",
    "memory_footprint",
    "min_peak_order",
    "parse_model",
    "peak_activation",
    "render",
    "throughput",
    "total_params",
    "work_per_output",
    "__version__",
]

"""Per-layer arithmetic and size metrics.

MACs, total primitive Ops, parameter counts, MACs-per-output, and
activation byte sizes for every node of a graph.  One MAC is counted as
OPS_PER_MAC primitive operations (multiply plus accumulate); bias adds
one op per output element, matching kernels that seed the accumulator
with the bias value.  Per-output budgets for the non-MAC kinds live in
one table so they can be recalibrated in one place.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .graph import (
    MAC_KINDS,
    POOL_KINDS,
    Graph,
    OpKind,
    OpNode,
    ShapeMap,
    TensorInfo,
)

#: Primitive operations counted per multiply-accumulate.
OPS_PER_MAC = 2

#: Primitive ops per output element for kinds without MACs (pools are
#: derived from their kernel size instead).  Softmax gets a fixed
#: exp/sum/divide budget.
ELEMENTWISE_OPS_PER_OUTPUT = {
    OpKind.RELU: 1,
    OpKind.ADD: 1,
    OpKind.CONCAT: 1,
    OpKind.SOFTMAX: 5,
}


@dataclass(frozen=True)
class LayerMetrics:
    """Arithmetic and size metrics of one node."""

    macs: int
    ops: int
    params: int
    params_bytes: int
    out_elements: int
    out_bytes: int
    work_per_output: Fraction


def _info(shapes: ShapeMap, tensor: str) -> TensorInfo:
    try:
        return shapes[tensor]
    except KeyError:
        raise ValidationError(f"unresolved shape for tensor '{tensor}'") from None


def _kernel_elems(node: OpNode) -> int:
    kh, kw = node.attrs.kernel
    return kh * kw


def count_macs(node: OpNode, shapes: ShapeMap) -> int:
    """Multiply-accumulate count; zero for kinds without MACs."""
    kind = node.kind
    if kind not in MAC_KINDS:
        return 0
    out = _info(shapes, node.output)
    if kind is OpKind.FULLY_CONNECTED:
        n_in = _info(shapes, node.inputs[0]).shape.element_count
        return n_in * out.shape.element_count
    c_in = _info(shapes, node.inputs[0]).shape.dims[-1]
    if kind is OpKind.DWCONV2D:
        return out.shape.element_count * _kernel_elems(node)
    return out.shape.element_count * _kernel_elems(node) * c_in


def count_ops(node: OpNode, shapes: ShapeMap) -> int:
    """Total primitive operations (multiplies, adds, compares, ...)."""
    kind = node.kind
    out_elements = _info(shapes, node.output).shape.element_count
    if kind in MAC_KINDS:
        ops = OPS_PER_MAC * count_macs(node, shapes)
        if node.attrs.has_bias:
            ops += out_elements
        return ops
    if kind in POOL_KINDS:
        ops = out_elements * (_kernel_elems(node) - 1)
        if kind is OpKind.AVGPOOL:
            ops += out_elements  # one divide per output
        return ops
    return out_elements * ELEMENTWISE_OPS_PER_OUTPUT[kind]


def count_params(node: OpNode, shapes: ShapeMap) -> tuple[int, int]:
    """(parameter count, parameter bytes); weights use the input dtype."""
    kind = node.kind
    if kind not in MAC_KINDS:
        return (0, 0)
    in_info = _info(shapes, node.inputs[0])
    out_info = _info(shapes, node.output)
    if kind is OpKind.FULLY_CONNECTED:
        count = in_info.shape.element_count * out_info.shape.element_count
        bias = out_info.shape.element_count
    elif kind is OpKind.DWCONV2D:
        c_in = in_info.shape.dims[-1]
        count = _kernel_elems(node) * c_in
        bias = c_in
    else:
        c_in = in_info.shape.dims[-1]
        c_out = out_info.shape.dims[-1]
        count = _kernel_elems(node) * c_in * c_out
        bias = c_out
    if node.attrs.has_bias:
        count += bias
    return (count, count * in_info.dtype.width)


def work_per_output(node: OpNode, shapes: ShapeMap) -> Fraction:
    """MACs per output element for MAC kinds; primitive ops per output
    element otherwise.  This is the x-axis of the throughput tables."""
    out_elements = _info(shapes, node.output).shape.element_count
    if out_elements == 0:
        raise ValidationError(f"node '{node.name}' has zero output elements")
    if node.kind in MAC_KINDS:
        return Fraction(count_macs(node, shapes), out_elements)
    return Fraction(count_ops(node, shapes), out_elements)


def activation_bytes(tensor: str, shapes: ShapeMap) -> int:
    """Byte size of one activation tensor."""
    return _info(shapes, tensor).byte_size


def layer_metrics(node: OpNode, shapes: ShapeMap) -> LayerMetrics:
    out = _info(shapes, node.output)
    params, params_bytes = count_params(node, shapes)
    return LayerMetrics(
        macs=count_macs(node, shapes),
        ops=count_ops(node, shapes),
        params=params,
        params_bytes=params_bytes,
        out_elements=out.shape.element_count,
        out_bytes=out.byte_size,
        work_per_output=work_per_output(node, shapes),
    )


def total_params(g: Graph, shapes: ShapeMap) -> tuple[int, int]:
    """Summed (parameter count, parameter bytes) over all nodes."""
    counts = 0
    nbytes = 0
    for node in g.nodes:
        c, b = count_params(node, shapes)
        counts += c
        nbytes += b
    return (counts, nbytes)

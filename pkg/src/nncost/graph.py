"""Graph IR for feed-forward inference graphs.

Defines the tensor/operator types, the strict JSON model format, shape
inference, and deterministic execution-order utilities.

Conventions baked into the IR:

- Feature maps are laid out H, W, C; vectors are a flat [n].  Only
  element counts feed the cost model, so the layout choice is cosmetic,
  but it is fixed so attribute semantics are unambiguous.
- Every node produces exactly one tensor, named after the node.  The
  tensor namespace is therefore the graph inputs plus the node names.
- "same" padding picks total padding so the output spatial extent is
  ceil(in / stride); "valid" pads nothing; explicit padding [ph, pw] is
  applied symmetrically on both sides of each axis.
- Fully-connected layers flatten their input implicitly.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from math import prod
from typing import Any

from .errors import EnumerationLimitError, ParseError, ShapeError, ValidationError

#: Hard cap on topological-order enumeration unless the caller overrides it.
DEFAULT_ENUMERATION_LIMIT = 100_000

_DTYPE_WIDTHS = {"i8": 1, "i16": 2, "f32": 4}


class DType(Enum):
    """Tensor element type; ``width`` is the storage size in bytes."""

    I8 = "i8"
    I16 = "i16"
    F32 = "f32"

    @property
    def width(self) -> int:
        return _DTYPE_WIDTHS[self.value]


class OpKind(Enum):
    """Operator vocabulary.

    CONV1X1 is structurally a CONV2D with a 1x1 kernel but is kept as a
    separate kind because it belongs to a different throughput class
    (GEMM-style reuse, no patch rearrangement).
    """

    CONV2D = "conv2d"
    CONV1X1 = "conv1x1"
    DWCONV2D = "dwconv2d"
    FULLY_CONNECTED = "fc"
    MAXPOOL = "maxpool"
    AVGPOOL = "avgpool"
    RELU = "relu"
    ADD = "add"
    CONCAT = "concat"
    SOFTMAX = "softmax"


MAC_KINDS = frozenset(
    {OpKind.CONV2D, OpKind.CONV1X1, OpKind.DWCONV2D, OpKind.FULLY_CONNECTED}
)
POOL_KINDS = frozenset({OpKind.MAXPOOL, OpKind.AVGPOOL})
WINDOWED_KINDS = frozenset(
    {OpKind.CONV2D, OpKind.CONV1X1, OpKind.DWCONV2D, OpKind.MAXPOOL, OpKind.AVGPOOL}
)
ELEMENTWISE_KINDS = frozenset({OpKind.RELU, OpKind.ADD, OpKind.CONCAT, OpKind.SOFTMAX})


@dataclass(frozen=True)
class TensorShape:
    """Ordered positive integer extents (H, W, C for feature maps)."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(self.dims)
        object.__setattr__(self, "dims", dims)
        if not dims:
            raise ValidationError("tensor shape needs at least one dimension")
        for d in dims:
            if not isinstance(d, int) or isinstance(d, bool) or d < 1:
                raise ValidationError(f"tensor dimensions must be integers >= 1, got {dims!r}")

    @property
    def rank(self) -> int:
        return len(self.dims)

    @property
    def element_count(self) -> int:
        return prod(self.dims)

    def byte_size(self, dtype: DType) -> int:
        return self.element_count * dtype.width


@dataclass(frozen=True)
class TensorInfo:
    """Resolved shape and element type of one tensor."""

    shape: TensorShape
    dtype: DType

    @property
    def byte_size(self) -> int:
        return self.shape.byte_size(self.dtype)


#: Tensor name -> resolved TensorInfo, as produced by infer_shapes().
ShapeMap = dict[str, TensorInfo]


@dataclass(frozen=True)
class OpAttrs:
    """Kind-specific attributes; irrelevant fields stay at their defaults."""

    kernel: tuple[int, int] | None = None
    stride: tuple[int, int] = (1, 1)
    pad: str | tuple[int, int] = "valid"
    out_channels: int | None = None
    units: int | None = None
    has_bias: bool = True

    def __post_init__(self) -> None:
        if self.kernel is not None:
            object.__setattr__(self, "kernel", tuple(self.kernel))
        object.__setattr__(self, "stride", tuple(self.stride))
        if not isinstance(self.pad, str):
            object.__setattr__(self, "pad", tuple(self.pad))


@dataclass(frozen=True)
class OpNode:
    """One operator; produces exactly one tensor named after the node."""

    name: str
    kind: OpKind
    inputs: tuple[str, ...]
    attrs: OpAttrs = OpAttrs()

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))

    @property
    def output(self) -> str:
        return self.name


@dataclass(frozen=True)
class GraphInput:
    name: str
    shape: TensorShape
    dtype: DType


@dataclass(frozen=True)
class Graph:
    """A validated-on-demand DAG of OpNodes over named tensors."""

    name: str
    inputs: tuple[GraphInput, ...]
    nodes: tuple[OpNode, ...]
    outputs: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @cached_property
    def node_map(self) -> dict[str, OpNode]:
        return {n.name: n for n in self.nodes}

    @cached_property
    def tensor_names(self) -> tuple[str, ...]:
        return tuple(i.name for i in self.inputs) + tuple(n.name for n in self.nodes)

    @cached_property
    def consumer_map(self) -> dict[str, tuple[str, ...]]:
        """Tensor -> consuming node names, one entry per input occurrence."""
        out: dict[str, list[str]] = {name: [] for name in self.tensor_names}
        for node in self.nodes:
            for t in node.inputs:
                if t in out:
                    out[t].append(node.name)
        return {k: tuple(v) for k, v in out.items()}

    def consumers(self, tensor: str) -> tuple[str, ...]:
        return self.consumer_map.get(tensor, ())

    def producer(self, tensor: str) -> OpNode | None:
        """Producing node, or None for graph inputs."""
        return self.node_map.get(tensor)

    def validate(self) -> None:
        """Check all structural invariants, raising ValidationError."""
        names = [i.name for i in self.inputs] + [n.name for n in self.nodes]
        seen: set[str] = set()
        for nm in names:
            if not nm or not isinstance(nm, str):
                raise ValidationError(f"tensor names must be non-empty strings, got {nm!r}")
            if nm in seen:
                raise ValidationError(f"duplicate tensor name '{nm}'")
            seen.add(nm)

        for node in self.nodes:
            for t in node.inputs:
                if t not in seen:
                    raise ValidationError(
                        f"node '{node.name}' references unknown tensor '{t}'"
                    )
            _check_node(node)

        for t in self.outputs:
            if t not in seen:
                raise ValidationError(f"declared graph output '{t}' is not a known tensor")

        self._check_acyclic()

        out_set = set(self.outputs)
        for nm in names:
            if not self.consumers(nm) and nm not in out_set:
                raise ValidationError(
                    f"tensor '{nm}' is never consumed and is not a graph output"
                )

    def _check_acyclic(self) -> None:
        indeg, dependents = _node_dependencies(self)
        ready = [n for n, d in indeg.items() if d == 0]
        done = 0
        while ready:
            cur = ready.pop()
            done += 1
            for d in dependents[cur]:
                indeg[d] -= 1
                if indeg[d] == 0:
                    ready.append(d)
        if done != len(self.nodes):
            stuck = sorted(n for n, d in indeg.items() if d > 0)
            raise ValidationError("cycle detected involving node(s): " + ", ".join(stuck))


_SINGLE_INPUT_KINDS = WINDOWED_KINDS | {OpKind.FULLY_CONNECTED, OpKind.RELU, OpKind.SOFTMAX}


def _check_node(node: OpNode) -> None:
    kind, a = node.kind, node.attrs
    ctx = f"node '{node.name}' ({kind.value})"

    if kind in _SINGLE_INPUT_KINDS:
        if len(node.inputs) != 1:
            raise ValidationError(f"{ctx}: expects exactly 1 input, got {len(node.inputs)}")
    elif kind is OpKind.ADD:
        if len(node.inputs) != 2:
            raise ValidationError(f"{ctx}: expects exactly 2 inputs, got {len(node.inputs)}")
    elif kind is OpKind.CONCAT:
        if len(node.inputs) < 2:
            raise ValidationError(f"{ctx}: expects at least 2 inputs, got {len(node.inputs)}")

    if kind in WINDOWED_KINDS:
        if a.kernel is None:
            raise ValidationError(f"{ctx}: missing kernel attribute")
        kh, kw = a.kernel
        sh, sw = a.stride
        if kh < 1 or kw < 1:
            raise ValidationError(f"{ctx}: kernel extents must be >= 1, got {a.kernel}")
        if sh < 1 or sw < 1:
            raise ValidationError(f"{ctx}: stride extents must be >= 1, got {a.stride}")
        if not isinstance(a.pad, str):
            ph, pw = a.pad
            if ph < 0 or pw < 0:
                raise ValidationError(f"{ctx}: explicit padding must be >= 0, got {a.pad}")
        elif a.pad not in ("same", "valid"):
            raise ValidationError(f"{ctx}: pad must be 'same', 'valid', or [ph, pw]")
        if kind is OpKind.CONV1X1 and a.kernel != (1, 1):
            raise ValidationError(f"{ctx}: kernel must be 1x1, got {a.kernel}")
        if kind in (OpKind.CONV2D, OpKind.CONV1X1):
            if a.out_channels is None or a.out_channels < 1:
                raise ValidationError(f"{ctx}: out_channels must be >= 1")
        elif a.out_channels is not None:
            raise ValidationError(f"{ctx}: out_channels is not allowed")
        if a.units is not None:
            raise ValidationError(f"{ctx}: units is not allowed")
    elif kind is OpKind.FULLY_CONNECTED:
        if a.units is None or a.units < 1:
            raise ValidationError(f"{ctx}: units must be >= 1")
        if a.kernel is not None or a.out_channels is not None:
            raise ValidationError(f"{ctx}: kernel/out_channels are not allowed")
        if a.stride != (1, 1) or a.pad != "valid":
            raise ValidationError(f"{ctx}: stride/pad are not allowed for this kind")
    else:
        if a.kernel is not None or a.out_channels is not None or a.units is not None:
            raise ValidationError(f"{ctx}: attributes are not allowed for this kind")
        if a.stride != (1, 1) or a.pad != "valid":
            raise ValidationError(f"{ctx}: stride/pad are not allowed for this kind")


# ---------------------------------------------------------------------------
# shape inference


def _pad_total(extent: int, kernel: int, stride: int, pad, axis: int) -> int:
    if pad == "valid":
        return 0
    if pad == "same":
        out = -(-extent // stride)  # ceil
        return max((out - 1) * stride + kernel - extent, 0)
    return 2 * pad[axis]


def _out_extent(extent: int, kernel: int, stride: int, pad, axis: int) -> int:
    padded = extent + _pad_total(extent, kernel, stride, pad, axis)
    out = (padded - kernel) // stride + 1
    if out < 1:
        raise ShapeError(
            f"kernel extent {kernel} exceeds padded input extent {padded} (axis {axis})"
        )
    return out


def _window_out(node: OpNode, info: TensorInfo) -> tuple[int, int, int]:
    if info.shape.rank != 3:
        raise ShapeError(
            f"node '{node.name}' ({node.kind.value}) expects an H,W,C input, "
            f"got rank {info.shape.rank}"
        )
    h, w, c = info.shape.dims
    kh, kw = node.attrs.kernel
    sh, sw = node.attrs.stride
    try:
        ho = _out_extent(h, kh, sh, node.attrs.pad, 0)
        wo = _out_extent(w, kw, sw, node.attrs.pad, 1)
    except ShapeError as e:
        raise ShapeError(f"node '{node.name}': {e}") from None
    return ho, wo, c


def _infer_node(node: OpNode, ins: list[TensorInfo]) -> TensorInfo:
    kind = node.kind
    dtype = ins[0].dtype

    if kind in (OpKind.CONV2D, OpKind.CONV1X1):
        ho, wo, _ = _window_out(node, ins[0])
        return TensorInfo(TensorShape((ho, wo, node.attrs.out_channels)), dtype)
    if kind is OpKind.DWCONV2D:
        ho, wo, c = _window_out(node, ins[0])
        return TensorInfo(TensorShape((ho, wo, c)), dtype)
    if kind in POOL_KINDS:
        ho, wo, c = _window_out(node, ins[0])
        return TensorInfo(TensorShape((ho, wo, c)), dtype)
    if kind is OpKind.FULLY_CONNECTED:
        # implicit flatten: any input is treated as a vector
        return TensorInfo(TensorShape((node.attrs.units,)), dtype)
    if kind in (OpKind.RELU, OpKind.SOFTMAX):
        return TensorInfo(ins[0].shape, dtype)
    if kind is OpKind.ADD:
        a, b = ins
        if a.shape != b.shape or a.dtype != b.dtype:
            raise ShapeError(
                f"node '{node.name}': add operands differ "
                f"({a.shape.dims}/{a.dtype.value} vs {b.shape.dims}/{b.dtype.value})"
            )
        return TensorInfo(a.shape, dtype)
    if kind is OpKind.CONCAT:
        first = ins[0]
        for other in ins[1:]:
            if other.shape.rank != first.shape.rank:
                raise ShapeError(f"node '{node.name}': concat inputs differ in rank")
            if other.shape.dims[:-1] != first.shape.dims[:-1]:
                raise ShapeError(
                    f"node '{node.name}': concat inputs differ in non-channel dims"
                )
            if other.dtype != first.dtype:
                raise ShapeError(f"node '{node.name}': concat inputs differ in dtype")
        channels = sum(i.shape.dims[-1] for i in ins)
        return TensorInfo(TensorShape(first.shape.dims[:-1] + (channels,)), dtype)
    raise ShapeError(f"node '{node.name}': unhandled kind {kind}")  # pragma: no cover


def infer_shapes(g: Graph) -> ShapeMap:
    """Resolve every tensor's shape and dtype.

    Total and idempotent for valid graphs: the result depends only on the
    graph, never on prior calls.
    """
    shapes: ShapeMap = {i.name: TensorInfo(i.shape, i.dtype) for i in g.inputs}
    for name in default_order(g):
        node = g.node_map[name]
        shapes[node.output] = _infer_node(node, [shapes[t] for t in node.inputs])
    return shapes


# ---------------------------------------------------------------------------
# execution orders


def _node_dependencies(g: Graph) -> tuple[dict[str, int], dict[str, tuple[str, ...]]]:
    """In-degree and dependents over node names (deduplicated edges)."""
    indeg = {n.name: 0 for n in g.nodes}
    dependents: dict[str, set[str]] = {n.name: set() for n in g.nodes}
    for node in g.nodes:
        producers = {t for t in node.inputs if t in indeg}
        indeg[node.name] = len(producers)
        for p in producers:
            dependents[p].add(node.name)
    return indeg, {k: tuple(sorted(v)) for k, v in dependents.items()}


def default_order(g: Graph) -> tuple[str, ...]:
    """Canonical topological order: among ready nodes, the
    lexicographically smallest name runs first, so reports are
    reproducible."""
    indeg, dependents = _node_dependencies(g)
    ready = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        cur = heapq.heappop(ready)
        order.append(cur)
        for d in dependents[cur]:
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(ready, d)
    if len(order) != len(g.nodes):
        stuck = sorted(n for n, d in indeg.items() if d > 0)
        raise ValidationError("cycle detected involving node(s): " + ", ".join(stuck))
    return tuple(order)


def all_topological_orders(
    g: Graph, limit: int = DEFAULT_ENUMERATION_LIMIT
) -> list[tuple[str, ...]]:
    """Enumerate every topological order exactly once, deterministically
    (lexicographic backtracking; the first order equals default_order).

    Raises EnumerationLimitError as soon as more than ``limit`` orders
    exist; callers hitting the limit should fall back to default_order.
    """
    n = len(g.nodes)
    if n == 0:
        return [()]
    indeg, dependents = _node_dependencies(g)

    orders: list[tuple[str, ...]] = []
    cur: list[str] = []
    root = sorted(name for name, d in indeg.items() if d == 0)
    # stack entries: (candidates, next index, node chosen to enter this level)
    stack: list[tuple[list[str], int, str | None]] = [(root, 0, None)]
    while stack:
        cands, idx, via = stack[-1]
        if idx == len(cands):
            stack.pop()
            if via is not None:
                for d in dependents[via]:
                    indeg[d] += 1
                cur.pop()
            continue
        stack[-1] = (cands, idx + 1, via)
        name = cands[idx]
        cur.append(name)
        for d in dependents[name]:
            indeg[d] -= 1
        if len(cur) == n:
            orders.append(tuple(cur))
            if len(orders) > limit:
                raise EnumerationLimitError(
                    f"graph '{g.name}' has more than {limit} topological orders; "
                    "use default_order instead"
                )
            for d in dependents[name]:
                indeg[d] += 1
            cur.pop()
        else:
            nxt = [c for c in cands if c != name]
            nxt.extend(d for d in dependents[name] if indeg[d] == 0)
            nxt.sort()
            stack.append((nxt, 0, name))
    return orders


def check_order(g: Graph, order: tuple[str, ...] | list[str]) -> None:
    """Raise ValidationError unless ``order`` is a topological order of g."""
    names = [n.name for n in g.nodes]
    if len(order) != len(names) or set(order) != set(names):
        raise ValidationError("execution order is not a permutation of the graph's nodes")
    pos = {name: i for i, name in enumerate(order)}
    for node in g.nodes:
        for t in node.inputs:
            if t in pos and pos[t] >= pos[node.name]:
                raise ValidationError(
                    f"execution order violates dependency: '{node.name}' "
                    f"runs before its input '{t}'"
                )


# ---------------------------------------------------------------------------
# model file parsing / serialization

_TOP_KEYS = {"name", "inputs", "nodes", "outputs"}
_INPUT_KEYS = {"name", "shape", "dtype"}
_NODE_KEYS = {"name", "op", "inputs", "attrs"}

_ATTR_KEYS_BY_KIND: dict[OpKind, frozenset[str]] = {
    OpKind.CONV2D: frozenset({"kernel", "stride", "pad", "out_channels", "has_bias"}),
    OpKind.CONV1X1: frozenset({"kernel", "stride", "pad", "out_channels", "has_bias"}),
    OpKind.DWCONV2D: frozenset({"kernel", "stride", "pad", "has_bias"}),
    OpKind.FULLY_CONNECTED: frozenset({"units", "has_bias"}),
    OpKind.MAXPOOL: frozenset({"kernel", "stride", "pad"}),
    OpKind.AVGPOOL: frozenset({"kernel", "stride", "pad"}),
    OpKind.RELU: frozenset(),
    OpKind.ADD: frozenset(),
    OpKind.CONCAT: frozenset(),
    OpKind.SOFTMAX: frozenset(),
}


def _expect_keys(obj: dict, required: set[str], allowed: set[str], ctx: str) -> None:
    missing = required - obj.keys()
    if missing:
        raise ParseError(f"{ctx}: missing key(s) {sorted(missing)}")
    unknown = obj.keys() - allowed
    if unknown:
        raise ParseError(f"{ctx}: unknown key(s) {sorted(unknown)}")


def _as_str(v: Any, ctx: str) -> str:
    if not isinstance(v, str) or not v:
        raise ParseError(f"{ctx}: expected a non-empty string, got {v!r}")
    return v


def _as_pos_int(v: Any, ctx: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ParseError(f"{ctx}: expected an integer >= 1, got {v!r}")
    return v


def _as_int_pair(v: Any, ctx: str, minimum: int = 1) -> tuple[int, int]:
    if not isinstance(v, list) or len(v) != 2:
        raise ParseError(f"{ctx}: expected a 2-element list, got {v!r}")
    for x in v:
        if not isinstance(x, int) or isinstance(x, bool) or x < minimum:
            raise ParseError(f"{ctx}: entries must be integers >= {minimum}, got {v!r}")
    return (v[0], v[1])


def _parse_attrs(raw: Any, kind: OpKind, ctx: str) -> OpAttrs:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ParseError(f"{ctx}: attrs must be an object")
    allowed = _ATTR_KEYS_BY_KIND[kind]
    unknown = raw.keys() - allowed
    if unknown:
        raise ParseError(
            f"{ctx}: attrs key(s) {sorted(unknown)} not allowed for op '{kind.value}'"
        )
    kernel = None
    pad: str | tuple[int, int] = "valid"
    if "kernel" in raw:
        kernel = _as_int_pair(raw["kernel"], f"{ctx}: kernel")
    if kind is OpKind.CONV1X1 and kernel is None:
        kernel = (1, 1)
    stride = _as_int_pair(raw["stride"], f"{ctx}: stride") if "stride" in raw else (1, 1)
    if "pad" in raw:
        p = raw["pad"]
        if p in ("same", "valid"):
            pad = p
        else:
            pad = _as_int_pair(p, f"{ctx}: pad", minimum=0)
    out_channels = (
        _as_pos_int(raw["out_channels"], f"{ctx}: out_channels")
        if "out_channels" in raw
        else None
    )
    units = _as_pos_int(raw["units"], f"{ctx}: units") if "units" in raw else None
    has_bias = True
    if "has_bias" in raw:
        if not isinstance(raw["has_bias"], bool):
            raise ParseError(f"{ctx}: has_bias must be a boolean")
        has_bias = raw["has_bias"]
    return OpAttrs(
        kernel=kernel,
        stride=stride,
        pad=pad,
        out_channels=out_channels,
        units=units,
        has_bias=has_bias,
    )


def parse_model(text: str) -> Graph:
    """Parse and validate a model JSON document (strict: unknown keys fail)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(
            f"model JSON syntax error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ParseError("model document must be a JSON object")
    _expect_keys(doc, _TOP_KEYS, _TOP_KEYS, "model")

    name = _as_str(doc["name"], "model: name")

    if not isinstance(doc["inputs"], list):
        raise ParseError("model: inputs must be a list")
    inputs = []
    for i, raw in enumerate(doc["inputs"]):
        ctx = f"inputs[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{ctx}: must be an object")
        _expect_keys(raw, _INPUT_KEYS, _INPUT_KEYS, ctx)
        in_name = _as_str(raw["name"], f"{ctx}: name")
        if not isinstance(raw["shape"], list) or not raw["shape"]:
            raise ParseError(f"{ctx}: shape must be a non-empty list")
        dims = tuple(_as_pos_int(d, f"{ctx}: shape") for d in raw["shape"])
        try:
            dtype = DType(_as_str(raw["dtype"], f"{ctx}: dtype"))
        except ValueError:
            raise ParseError(f"{ctx}: unknown dtype {raw['dtype']!r}") from None
        inputs.append(GraphInput(in_name, TensorShape(dims), dtype))

    if not isinstance(doc["nodes"], list):
        raise ParseError("model: nodes must be a list")
    nodes = []
    for i, raw in enumerate(doc["nodes"]):
        ctx = f"nodes[{i}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{ctx}: must be an object")
        _expect_keys(raw, _NODE_KEYS - {"attrs"}, _NODE_KEYS, ctx)
        node_name = _as_str(raw["name"], f"{ctx}: name")
        ctx = f"node '{node_name}'"
        op = _as_str(raw["op"], f"{ctx}: op")
        try:
            kind = OpKind(op)
        except ValueError:
            raise ParseError(f"{ctx}: unknown op kind '{op}'") from None
        if not isinstance(raw["inputs"], list):
            raise ParseError(f"{ctx}: inputs must be a list")
        node_inputs = tuple(_as_str(t, f"{ctx}: inputs") for t in raw["inputs"])
        attrs = _parse_attrs(raw.get("attrs"), kind, ctx)
        nodes.append(OpNode(node_name, kind, node_inputs, attrs))

    if not isinstance(doc["outputs"], list):
        raise ParseError("model: outputs must be a list")
    outputs = tuple(_as_str(t, "model: outputs") for t in doc["outputs"])

    g = Graph(name=name, inputs=tuple(inputs), nodes=tuple(nodes), outputs=outputs)
    g.validate()
    return g


def _attrs_to_json(node: OpNode) -> dict[str, Any]:
    a = node.attrs
    out: dict[str, Any] = {}
    if a.kernel is not None and node.kind is not OpKind.CONV1X1:
        out["kernel"] = list(a.kernel)
    if a.stride != (1, 1):
        out["stride"] = list(a.stride)
    if a.pad != "valid":
        out["pad"] = a.pad if isinstance(a.pad, str) else list(a.pad)
    if a.out_channels is not None:
        out["out_channels"] = a.out_channels
    if a.units is not None:
        out["units"] = a.units
    if not a.has_bias:
        out["has_bias"] = False
    return out


def dump_model(g: Graph) -> str:
    """Serialize a graph back to model JSON (parse/dump round-trips)."""
    nodes = []
    for node in g.nodes:
        entry: dict[str, Any] = {
            "name": node.name,
            "op": node.kind.value,
            "inputs": list(node.inputs),
        }
        attrs = _attrs_to_json(node)
        if attrs:
            entry["attrs"] = attrs
        nodes.append(entry)
    doc = {
        "name": g.name,
        "inputs": [
            {"name": i.name, "shape": list(i.shape.dims), "dtype": i.dtype.value}
            for i in g.inputs
        ],
        "nodes": nodes,
        "outputs": list(g.outputs),
    }
    return json.dumps(doc, indent=2) + "\n"

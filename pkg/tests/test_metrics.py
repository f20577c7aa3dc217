"""Per-layer metric counting against the loop-nest oracles."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from nncost import (
    DType,
    ValidationError,
    activation_bytes,
    count_macs,
    count_ops,
    count_params,
    infer_shapes,
    layer_metrics,
    total_params,
    work_per_output,
)

from builders import (
    avgpool,
    conv,
    conv1x1,
    dwconv,
    fc,
    graph,
    inp,
    maxpool,
    relu,
    softmax,
)
from builders import concat as concat_node
import oracles


def single_node_graph(node, *inputs):
    g = graph("m", list(inputs), [node], [node.name])
    return g, infer_shapes(g)


# ---------------------------------------------------------------------------
# frozen examples


def test_fc_macs_and_ops():
    g, shapes = single_node_graph(fc("f", "x", 10), inp("x", 256))
    node = g.nodes[0]
    assert count_macs(node, shapes) == 2560
    assert count_ops(node, shapes) == 2 * 2560 + 10  # 5130
    assert work_per_output(node, shapes) == 256


def test_conv_macs_example():
    # 3x3 kernel, 3 in channels, 32 out channels, 32x32 output
    g, shapes = single_node_graph(
        conv("c", "x", 32, k=(3, 3), pad="same"), inp("x", 32, 32, 3)
    )
    assert count_macs(g.nodes[0], shapes) == 884736


def test_pool_has_no_macs():
    g, shapes = single_node_graph(maxpool("p", "x", k=(3, 3)), inp("x", 8, 8, 4))
    assert count_macs(g.nodes[0], shapes) == 0


def test_maxpool_comparison_ops():
    # 3x3 window over a 16x16x32 output: 8 comparisons per output element
    g, shapes = single_node_graph(
        maxpool("p", "x", k=(3, 3), s=(2, 2), pad="same"), inp("x", 32, 32, 32)
    )
    assert shapes["p"].shape.dims == (16, 16, 32)
    assert count_ops(g.nodes[0], shapes) == 8192 * 8


def test_avgpool_adds_divide():
    g, shapes = single_node_graph(avgpool("p", "x", k=(2, 2)), inp("x", 4, 4, 2))
    out_elems = shapes["p"].shape.element_count
    assert count_ops(g.nodes[0], shapes) == out_elems * 3 + out_elems


def test_conv_params_example():
    g, shapes = single_node_graph(
        conv("c", "x", 32, k=(5, 5), pad="same"), inp("x", 32, 32, 3)
    )
    assert count_params(g.nodes[0], shapes) == (2432, 2432)


def test_fc_params_no_bias():
    g, shapes = single_node_graph(fc("f", "x", 10, bias=False), inp("x", 256))
    assert count_params(g.nodes[0], shapes) == (2560, 2560)


def test_param_bytes_follow_dtype():
    g, shapes = single_node_graph(
        fc("f", "x", 10, bias=False), inp("x", 256, dtype=DType.I16)
    )
    assert count_params(g.nodes[0], shapes) == (2560, 5120)


def test_pool_has_no_params():
    g, shapes = single_node_graph(maxpool("p", "x", k=(2, 2)), inp("x", 8, 8, 4))
    assert count_params(g.nodes[0], shapes) == (0, 0)


def test_work_per_output_values():
    g, shapes = single_node_graph(dwconv("d", "x", k=(3, 3), pad="same"), inp("x", 8, 8, 4))
    assert work_per_output(g.nodes[0], shapes) == 9

    g, shapes = single_node_graph(conv1x1("c", "x", 16), inp("x", 8, 8, 64))
    assert work_per_output(g.nodes[0], shapes) == 64

    g, shapes = single_node_graph(maxpool("p", "x", k=(3, 3)), inp("x", 8, 8, 4))
    assert work_per_output(g.nodes[0], shapes) == 8

    g, shapes = single_node_graph(softmax("s", "x"), inp("x", 10))
    assert work_per_output(g.nodes[0], shapes) == 5


def test_activation_bytes():
    g, shapes = single_node_graph(relu("r", "x"), inp("x", 32, 32, 32))
    assert activation_bytes("x", shapes) == 32768
    g, shapes = single_node_graph(relu("r", "x"), inp("x", 16, 16, 64, dtype=DType.I16))
    assert activation_bytes("x", shapes) == 32768
    g, shapes = single_node_graph(relu("r", "x"), inp("x", 1, dtype=DType.F32))
    assert activation_bytes("x", shapes) == 4
    with pytest.raises(ValidationError, match="unresolved shape"):
        activation_bytes("nope", shapes)


# ---------------------------------------------------------------------------
# randomized comparison against the loop-nest oracles (smoke-sized here;
# the full acceptance run lives in test_acceptance.py)


def random_conv_config(rng):
    kh, kw = rng.randint(1, 3), rng.randint(1, 3)
    return dict(
        h=rng.randint(kh, 6),
        w=rng.randint(kw, 6),
        cin=rng.randint(1, 4),
        cout=rng.randint(1, 6),
        kh=kh,
        kw=kw,
        sh=rng.randint(1, 2),
        sw=rng.randint(1, 2),
        pad=rng.choice(["same", "valid"]),
        bias=rng.random() < 0.5,
    )


def check_conv_against_oracle(cfg):
    g, shapes = single_node_graph(
        conv(
            "c",
            "x",
            cfg["cout"],
            k=(cfg["kh"], cfg["kw"]),
            s=(cfg["sh"], cfg["sw"]),
            pad=cfg["pad"],
            bias=cfg["bias"],
        ),
        inp("x", cfg["h"], cfg["w"], cfg["cin"]),
    )
    node = g.nodes[0]
    macs, ops, params, ho, wo = oracles.conv_counts(**cfg)
    assert shapes["c"].shape.dims == (ho, wo, cfg["cout"])
    assert count_macs(node, shapes) == macs
    assert count_ops(node, shapes) == ops
    assert count_params(node, shapes)[0] == params


def test_conv_counts_match_oracle_sample():
    rng = random.Random(7)
    for _ in range(25):
        check_conv_against_oracle(random_conv_config(rng))


def test_dwconv_counts_match_oracle_sample():
    rng = random.Random(8)
    for _ in range(25):
        kh, kw = rng.randint(1, 3), rng.randint(1, 3)
        cfg = dict(
            h=rng.randint(kh, 6),
            w=rng.randint(kw, 6),
            cin=rng.randint(1, 5),
            kh=kh,
            kw=kw,
            sh=rng.randint(1, 2),
            sw=rng.randint(1, 2),
            pad=rng.choice(["same", "valid"]),
            bias=rng.random() < 0.5,
        )
        g, shapes = single_node_graph(
            dwconv("d", "x", k=(kh, kw), s=(cfg["sh"], cfg["sw"]), pad=cfg["pad"], bias=cfg["bias"]),
            inp("x", cfg["h"], cfg["w"], cfg["cin"]),
        )
        macs, ops, params, ho, wo = oracles.dwconv_counts(**cfg)
        node = g.nodes[0]
        assert shapes["d"].shape.dims == (ho, wo, cfg["cin"])
        assert count_macs(node, shapes) == macs
        assert count_ops(node, shapes) == ops
        assert count_params(node, shapes)[0] == params


# ---------------------------------------------------------------------------
# invariants


def test_work_per_output_times_out_elements_is_exact():
    rng = random.Random(9)
    for _ in range(50):
        cfg = random_conv_config(rng)
        g, shapes = single_node_graph(
            conv(
                "c",
                "x",
                cfg["cout"],
                k=(cfg["kh"], cfg["kw"]),
                s=(cfg["sh"], cfg["sw"]),
                pad=cfg["pad"],
                bias=cfg["bias"],
            ),
            inp("x", cfg["h"], cfg["w"], cfg["cin"]),
        )
        node = g.nodes[0]
        wpo = work_per_output(node, shapes)
        assert isinstance(wpo, Fraction)
        assert wpo * shapes["c"].shape.element_count == count_macs(node, shapes)


def test_total_ops_invariant_under_order():
    g = graph(
        "m",
        [inp("x", 4096)],
        [fc("a", "x", 512), fc("b", "x", 256), concat_node("cat", "a", "b")],
        ["cat"],
    )
    shapes = infer_shapes(g)
    for order in (("a", "b", "cat"), ("b", "a", "cat")):
        total = sum(count_ops(g.node_map[n], shapes) for n in order)
        assert total == sum(count_ops(n, shapes) for n in g.nodes)


def test_conv_params_independent_of_spatial_size():
    g1, s1 = single_node_graph(conv("c", "x", 8, k=(3, 3), pad="same"), inp("x", 8, 8, 4))
    g2, s2 = single_node_graph(conv("c", "x", 8, k=(3, 3), pad="same"), inp("x", 32, 32, 4))
    assert count_params(g1.nodes[0], s1) == count_params(g2.nodes[0], s2)


def test_total_params_sums_nodes():
    g = graph(
        "m",
        [inp("x", 16)],
        [fc("a", "x", 8), fc("b", "a", 4)],
        ["b"],
    )
    shapes = infer_shapes(g)
    count, nbytes = total_params(g, shapes)
    assert count == (16 * 8 + 8) + (8 * 4 + 4)
    assert nbytes == count


def test_layer_metrics_bundle_consistency():
    g, shapes = single_node_graph(fc("f", "x", 10), inp("x", 256))
    m = layer_metrics(g.nodes[0], shapes)
    assert m.macs == 2560
    assert m.ops == 5130
    assert m.params == 2570
    assert m.params_bytes == 2570
    assert m.out_elements == 10
    assert m.out_bytes == 10
    assert m.work_per_output == 256
    assert m.ops >= m.macs

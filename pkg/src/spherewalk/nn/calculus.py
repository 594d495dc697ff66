"""Composition, combination, parallelization and depth padding for ReLU nets.

Every operation preserves pointwise semantics exactly and asserts the
size/width/depth bounds of the underlying network-calculus lemmas after
construction (plain ``assert``; strip with -O for production runs).
"""

from __future__ import annotations

from typing import List, Sequence

import numpy as np
import scipy.sparse as sp

from .net import ReluNet


def _zeros(n):
    return np.zeros(n)


def compose(outer: ReluNet, inner: ReluNet) -> ReluNet:
    """outer(inner(x)) with a sigma-split junction.

    Depth is exactly depth(outer) + depth(inner); the junction carries
    the inner output through sigma(y) - sigma(-y), which keeps the size
    bounded by min(s1 + s2 + d1(w1 + w2), 2 s1 + 2 s2).
    """
    d1 = inner.output_dim
    if outer.input_dim != d1:
        raise ValueError(
            f"composition mismatch: inner output {d1} != outer input {outer.input_dim}"
        )
    aj, bj = inner.layers[-1]
    w1, c1 = outer.layers[0]
    junction_in = (sp.vstack([aj, -aj], format="csr"), np.concatenate([bj, -bj]))
    junction_out = (sp.hstack([w1, -w1], format="csr"), c1.copy())
    net = ReluNet(
        list(inner.layers[:-1]) + [junction_in, junction_out] + list(outer.layers[1:])
    )
    assert net.depth == outer.depth + inner.depth
    assert net.width <= max(outer.width, inner.width, 2 * d1)
    assert net.size <= 2 * outer.size + 2 * inner.size
    return net


def stack_parallel(nets: Sequence[ReluNet]) -> ReluNet:
    """One net evaluating all inputs on the SAME input, outputs concatenated.

    Nets of unequal depth are padded with :func:`augment` first.
    """
    if not nets:
        raise ValueError("need at least one net")
    d0 = nets[0].input_dim
    if any(n.input_dim != d0 for n in nets):
        raise ValueError("parallel nets must share the input dimension")
    depth = max(n.depth for n in nets)
    nets = [n if n.depth == depth else augment(n, depth) for n in nets]
    layers = []
    for k in range(depth):
        ws = [n.layers[k][0] for n in nets]
        bs = [n.layers[k][1] for n in nets]
        if k == 0 and depth > 1:
            w = sp.vstack(ws, format="csr")
        elif depth == 1:
            w = sp.vstack(ws, format="csr")
        else:
            w = sp.block_diag(ws, format="csr")
        layers.append((w, np.concatenate(bs)))
    out = ReluNet(layers)
    assert out.depth == depth
    assert out.width <= sum(n.width for n in nets)
    return out


def linear_combine(nets: Sequence[ReluNet], coeffs: Sequence[float]) -> ReluNet:
    """Weighted sum sum_i a_i net_i(x); all nets share depth and input dim.

    Depth is unchanged, width at most the sum of widths, size at most
    the sum of sizes.  Use :func:`augment` first on ragged depths.
    """
    if len(nets) != len(coeffs):
        raise ValueError("one coefficient per net")
    if not nets:
        raise ValueError("need at least one net")
    depth = nets[0].depth
    d0 = nets[0].input_dim
    dout = nets[0].output_dim
    if any(n.depth != depth for n in nets):
        raise ValueError("linear_combine requires equal depths (augment first)")
    if any(n.input_dim != d0 or n.output_dim != dout for n in nets):
        raise ValueError("linear_combine requires matching input/output dims")

    if depth == 1:
        w = sum(a * n.layers[0][0] for a, n in zip(coeffs, nets))
        b = sum(a * n.layers[0][1] for a, n in zip(coeffs, nets))
        out = ReluNet([(w, b)])
    else:
        layers: List = []
        for k in range(depth - 1):
            ws = [n.layers[k][0] for n in nets]
            bs = [n.layers[k][1] for n in nets]
            w = sp.vstack(ws, format="csr") if k == 0 else sp.block_diag(ws, format="csr")
            layers.append((w, np.concatenate(bs)))
        w = sp.hstack(
            [a * n.layers[-1][0] for a, n in zip(coeffs, nets)], format="csr"
        )
        b = sum(a * n.layers[-1][1] for a, n in zip(coeffs, nets))
        layers.append((w, b))
        out = ReluNet(layers)
    assert out.depth == depth
    assert out.width <= sum(n.width for n in nets)
    assert out.size <= sum(n.size for n in nets)
    return out


def augment(net: ReluNet, depth: int) -> ReluNet:
    """Pointwise-equal net of exactly the requested (larger) depth.

    Pads after the last layer through the sigma(y) - sigma(-y) split;
    size grows by at most min(s + d1 w, 2 s) + 2 d1 (depth - old depth).
    """
    if depth <= net.depth:
        raise ValueError("augment target depth must exceed the current depth")
    d1 = net.output_dim
    aj, bj = net.layers[-1]
    layers = list(net.layers[:-1])
    layers.append((sp.vstack([aj, -aj], format="csr"), np.concatenate([bj, -bj])))
    mid = sp.identity(2 * d1, format="csr")
    for _ in range(depth - net.depth - 1):
        layers.append((mid, _zeros(2 * d1)))
    eye = sp.identity(d1, format="csr")
    layers.append((sp.hstack([eye, -eye], format="csr"), _zeros(d1)))
    out = ReluNet(layers)
    assert out.depth == depth
    assert out.width == max(2 * d1, net.width)
    assert out.size <= 2 * net.size + 2 * d1 * (depth - net.depth)
    return out

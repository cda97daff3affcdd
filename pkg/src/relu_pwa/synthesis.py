"""Exact ReLU networks for max-affine and difference-of-convex functions.

A max of ``N`` affine pieces on a box fits in ``N`` hidden layers of width
``n0 + 1``. The first ``n0`` units of every layer carry the shifted input
``x - lo`` (nonnegative on the box, so the rectifier leaves it alone); the
last unit folds in one more piece through

    max(m, f(x)) = rect(m - f(x)) + f(x),

with the running maximum ``m`` rebuilt affinely from the previous layer.
"""
from __future__ import annotations

from typing import List, Sequence

import numpy as np

from .polyhedra import Polyhedron
from .pwa_core import DCPair, MaxAffine
from .relu_net import Layer, ReLUNet


def _box_bounds(box: Polyhedron, dim: int):
    if box.dim != dim:
        raise ValueError(f"box has dimension {box.dim}, function has {dim}")
    bounds = box.as_box()
    if bounds is None:
        raise ValueError("synthesis needs a bounded axis-aligned box")
    return bounds


def active_pieces(g: MaxAffine, box: Polyhedron) -> List[int]:
    """Indices of pieces that attain the max on a full-dimensional part of ``box``."""
    keep = []
    for i in range(len(g)):
        others = np.arange(len(g)) != i
        if not others.any():
            keep.append(i)
            continue
        region = box.intersect(Polyhedron(g.U[others] - g.U[i], g.c[i] - g.c[others]))
        if region.is_full_dim():
            keep.append(i)
    return keep


def _identity_layer(width):
    return Layer(np.eye(width), np.zeros(width))


def maxaffine_to_relu(g: MaxAffine, box: Polyhedron, *, prune: bool = True,
                      pad: bool = False) -> ReLUNet:
    """ReLU net equal to ``g`` on ``box``, hidden widths ``n0 + 1``.

    With ``prune`` pieces that never attain the max inside the box are left
    out, so the depth may be below ``len(g)``; ``pad`` appends identity layers
    to reach exactly ``len(g)``. Pieces are folded in their given order.
    """
    n0 = g.dim
    lo, hi = _box_bounds(box, n0)
    order = active_pieces(g, box) if prune else list(range(len(g)))
    U, c = g.U[order], g.c[order]

    # first piece, lifted to be nonnegative on the box
    floor = c[0] + np.sum(np.minimum(U[0] * lo, U[0] * hi))
    W = np.vstack([np.eye(n0), U[0]])
    b = np.concatenate([-lo, [c[0] - floor]])
    layers = [Layer(W, b)]
    # running max m = t + p.x' + q, with x' = x - lo
    p, q = np.zeros(n0), floor
    for k in range(1, len(c)):
        shift = U[k] @ lo + c[k]
        W = np.zeros((n0 + 1, n0 + 1))
        W[:n0, :n0] = np.eye(n0)
        W[n0, :n0] = p - U[k]
        W[n0, n0] = 1.0
        b = np.zeros(n0 + 1)
        b[n0] = q - shift
        layers.append(Layer(W, b))
        p, q = U[k].copy(), shift
    if pad:
        while len(layers) < len(g):
            layers.append(_identity_layer(n0 + 1))
    out = Layer(np.concatenate([p, [1.0]]).reshape(1, -1), [q])
    return ReLUNet(n0, layers, out)


def _pad_to(net: ReLUNet, depth: int) -> List[Layer]:
    # every hidden output here is nonnegative, so identity layers pass it through
    layers = list(net.hidden)
    while len(layers) < depth:
        layers.append(_identity_layer(layers[-1].width))
    return layers


def _block_diag(a, b):
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]))
    out[:a.shape[0], :a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


def dc_to_relu(pair: DCPair, box: Polyhedron, *, prune: bool = True) -> ReLUNet:
    """Net computing ``gamma - eta`` on ``box``: the two max-affine nets side by side."""
    gnet = maxaffine_to_relu(pair.gamma, box, prune=prune)
    enet = maxaffine_to_relu(pair.eta, box, prune=prune)
    depth = max(gnet.depth, enet.depth)
    glayers, elayers = _pad_to(gnet, depth), _pad_to(enet, depth)
    layers = [Layer(np.vstack([glayers[0].W, elayers[0].W]),
                    np.concatenate([glayers[0].b, elayers[0].b]))]
    for gl, el in zip(glayers[1:], elayers[1:]):
        layers.append(Layer(_block_diag(gl.W, el.W), np.concatenate([gl.b, el.b])))
    W_out = np.hstack([gnet.output.W, -enet.output.W])
    b_out = gnet.output.b - enet.output.b
    return ReLUNet(pair.dim, layers, Layer(W_out, b_out))


def vector_policy_nets(components: Sequence[DCPair], box: Polyhedron, **kwargs) -> List[ReLUNet]:
    """One network per output coordinate."""
    if not components:
        raise ValueError("at least one component is required")
    return [dc_to_relu(pair, box, **kwargs) for pair in components]

"""ReLU feedforward networks and their local affine maps.

A network is ``f = W_out . h_L . f_L ... h_1 . f_1`` with
``f_l = W_l h_{l-1} + b_l`` and ``h_l = max(f_l, 0)``. On any input the
rectifiers act as a fixed 0/1 diagonal, so the network restricted to the
set of inputs sharing that activation pattern is a single affine map
``x -> u x + c``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from . import _jsonloc


class NetFormatError(ValueError):
    """Malformed network data; ``line`` points into the source file when known."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Layer:
    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        W = np.array(self.W, dtype=float, ndmin=2)
        b = np.array(self.b, dtype=float).reshape(-1)
        if W.shape[0] != b.size:
            raise NetFormatError(f"W has {W.shape[0]} rows but b has {b.size} entries")
        if W.shape[0] == 0 or W.shape[1] == 0:
            raise NetFormatError("layers must have nonzero width")
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise NetFormatError("layer entries must be finite")
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)

    @property
    def width(self) -> int:
        return self.W.shape[0]

    @property
    def fan_in(self) -> int:
        return self.W.shape[1]


class ReLUNet:
    """Feedforward rectifier network with ``L >= 1`` hidden layers.

    The output layer is affine; its bias defaults to zero.
    """

    def __init__(self, input_dim: int, hidden: Sequence[Layer], output: Layer):
        if int(input_dim) < 1:
            raise NetFormatError("input_dim must be positive")
        if len(hidden) < 1:
            raise NetFormatError("at least one hidden layer is required")
        prev = int(input_dim)
        for l, layer in enumerate(hidden, start=1):
            if layer.fan_in != prev:
                raise NetFormatError(
                    f"hidden layer {l} expects {layer.fan_in} inputs, previous width is {prev}")
            prev = layer.width
        if output.fan_in != prev:
            raise NetFormatError(f"output layer expects {output.fan_in} inputs, last width is {prev}")
        self.input_dim = int(input_dim)
        self.hidden = tuple(hidden)
        self.output = output

    @classmethod
    def from_arrays(cls, weights, biases, W_out, b_out=None) -> "ReLUNet":
        hidden = [Layer(W, b) for W, b in zip(weights, biases)]
        W_out = np.array(W_out, dtype=float, ndmin=2)
        if b_out is None:
            b_out = np.zeros(W_out.shape[0])
        return cls(hidden[0].fan_in, hidden, Layer(W_out, b_out))

    @property
    def depth(self) -> int:
        return len(self.hidden)

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(layer.width for layer in self.hidden)

    @property
    def output_dim(self) -> int:
        return self.output.width

    def __repr__(self):
        dims = [self.input_dim, *self.widths, self.output_dim]
        return f"ReLUNet({' -> '.join(map(str, dims))})"

    def __call__(self, x):
        return eval_net(self, x)

    def truncated(self, layer: int, unit: int) -> "ReLUNet":
        """Net whose scalar output is ``h_{layer,unit}`` (1-based indices)."""
        if not 1 <= layer <= self.depth:
            raise ValueError(f"layer must be in 1..{self.depth}")
        if not 1 <= unit <= self.hidden[layer - 1].width:
            raise ValueError(f"unit must be in 1..{self.hidden[layer - 1].width}")
        last = self.hidden[layer - 1]
        hidden = list(self.hidden[:layer - 1])
        hidden.append(Layer(last.W[unit - 1:unit], last.b[unit - 1:unit]))
        return ReLUNet(self.input_dim, hidden, Layer([[1.0]], [0.0]))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden": [{"W": layer.W.tolist(), "b": layer.b.tolist()} for layer in self.hidden],
            "output": {"W": self.output.W.tolist(), "b": self.output.b.tolist()},
        }

    def to_json(self) -> str:
        return _jsonloc.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ReLUNet":
        try:
            data = _jsonloc.loads(text)
        except json.JSONDecodeError as exc:
            raise NetFormatError(exc.msg, exc.lineno) from None
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data) -> "ReLUNet":
        if not isinstance(data, dict):
            raise NetFormatError("top level must be an object", _jsonloc.line_of(data))
        for key in ("input_dim", "hidden", "output"):
            if key not in data:
                raise NetFormatError(f"missing field {key!r}", _jsonloc.line_of(data))
        n0 = data["input_dim"]
        if not isinstance(n0, int) or isinstance(n0, bool) or n0 < 1:
            raise NetFormatError("input_dim must be a positive integer", _jsonloc.line_of(data))
        hidden_data = data["hidden"]
        if not isinstance(hidden_data, list) or not hidden_data:
            raise NetFormatError("hidden must be a nonempty list", _jsonloc.line_of(hidden_data))
        prev = n0
        layers = []
        for l, node in enumerate(hidden_data, start=1):
            layer = _parse_layer(node, prev, f"hidden layer {l}")
            layers.append(layer)
            prev = layer.width
        out = _parse_layer(data["output"], prev, "output layer", bias_optional=True)
        return cls(n0, layers, out)


def _parse_layer(node, fan_in, what, bias_optional=False):
    line = _jsonloc.line_of(node)
    if not isinstance(node, dict) or "W" not in node:
        raise NetFormatError(f"{what} must be an object with field 'W'", line)
    W = node["W"]
    if not isinstance(W, list) or not W:
        raise NetFormatError(f"{what}: W must be a nonempty list of rows", _jsonloc.line_of(W, line))
    for i, row in enumerate(W):
        row_line = _jsonloc.line_of(row, _jsonloc.line_of(W, line))
        if not isinstance(row, list) or not all(_is_number(v) for v in row):
            raise NetFormatError(f"{what}: row {i} of W must be a list of numbers", row_line)
        if len(row) != fan_in:
            raise NetFormatError(f"{what}: row {i} of W has {len(row)} entries, expected {fan_in}",
                                 row_line)
    if "b" in node:
        b = node["b"]
        b_line = _jsonloc.line_of(b, line)
        if not isinstance(b, list) or not all(_is_number(v) for v in b):
            raise NetFormatError(f"{what}: b must be a list of numbers", b_line)
        if len(b) != len(W):
            raise NetFormatError(f"{what}: b has {len(b)} entries but W has {len(W)} rows", b_line)
    elif bias_optional:
        b = [0.0] * len(W)
    else:
        raise NetFormatError(f"{what}: missing field 'b'", line)
    try:
        return Layer(np.array(W, dtype=float), np.array(b, dtype=float))
    except NetFormatError as exc:
        raise NetFormatError(str(exc), line) from None


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


# -- activation patterns and affine maps ------------------------------------

@dataclass(frozen=True)
class ActivationPattern:
    """Per-layer 0/1 indicator vectors ``s_l``."""

    bits: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_arrays(cls, arrays) -> "ActivationPattern":
        return cls(tuple(tuple(int(v) for v in np.asarray(a).reshape(-1)) for a in arrays))

    def key(self) -> str:
        return "|".join("".join(map(str, layer)) for layer in self.bits)

    def __str__(self):
        return self.key()

    def arrays(self) -> List[np.ndarray]:
        return [np.array(layer, dtype=float) for layer in self.bits]

    def check(self, net: ReLUNet):
        if tuple(len(s) for s in self.bits) != net.widths:
            raise ValueError(f"pattern widths {tuple(len(s) for s in self.bits)} "
                             f"do not match net widths {net.widths}")


@dataclass(frozen=True)
class LocalAffine:
    """Affine map ``x -> u x + c`` with ``u`` of shape (n_out, n0)."""

    u: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float, ndmin=2)
        c = np.array(self.c, dtype=float).reshape(-1)
        if u.shape[0] != c.size:
            raise ValueError("u and c disagree on output dimension")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "c", c)

    def __call__(self, x):
        return self.u @ np.asarray(x, dtype=float) + self.c

    def allclose(self, other: "LocalAffine", tol: float = 1e-9) -> bool:
        return self.u.shape == other.u.shape and np.allclose(self.u, other.u, atol=tol, rtol=0) \
            and np.allclose(self.c, other.c, atol=tol, rtol=0)


def _as_input(net: ReLUNet, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != net.input_dim:
        raise ValueError(f"input has dimension {x.size}, net expects {net.input_dim}")
    return x


def pre_activations(net: ReLUNet, x) -> List[np.ndarray]:
    h = _as_input(net, x)
    out = []
    for layer in net.hidden:
        f = layer.W @ h + layer.b
        out.append(f)
        h = np.maximum(f, 0.0)
    return out


def eval_net(net: ReLUNet, x) -> np.ndarray:
    h = _as_input(net, x)
    for layer in net.hidden:
        h = np.maximum(layer.W @ h + layer.b, 0.0)
    return net.output.W @ h + net.output.b


def eval_batch(net: ReLUNet, X) -> np.ndarray:
    """Rows of ``X`` in, rows of outputs out."""
    H = np.asarray(X, dtype=float).reshape(-1, net.input_dim)
    for layer in net.hidden:
        H = np.maximum(H @ layer.W.T + layer.b, 0.0)
    return H @ net.output.W.T + net.output.b


def pattern_bits_batch(net: ReLUNet, X) -> np.ndarray:
    """Concatenated activation bits for each row of ``X`` (bool matrix)."""
    H = np.asarray(X, dtype=float).reshape(-1, net.input_dim)
    cols = []
    for layer in net.hidden:
        F = H @ layer.W.T + layer.b
        cols.append(F > 0)
        H = np.maximum(F, 0.0)
    return np.hstack(cols)


def activation_pattern(net: ReLUNet, x, tie_rule: str = "strict") -> ActivationPattern:
    """Bit ``s_{l,j}`` is 1 iff ``f_{l,j}(x) > 0``.

    With the default ``tie_rule="strict"`` a zero pre-activation gives 0;
    ``"weak"`` switches to ``>=``. Both label the same function value.
    """
    if tie_rule == "strict":
        return ActivationPattern.from_arrays([f > 0 for f in pre_activations(net, x)])
    if tie_rule == "weak":
        return ActivationPattern.from_arrays([f >= 0 for f in pre_activations(net, x)])
    raise ValueError(f"unknown tie_rule {tie_rule!r}")


def pattern_affine(net: ReLUNet, pattern: ActivationPattern) -> LocalAffine:
    """Affine map of the net with every rectifier replaced by ``diag(s_l)``.

    Runs the telescoping products forward: ``(M, m)`` is the affine map of
    ``h_l`` in terms of ``x``.
    """
    pattern.check(net)
    M = np.eye(net.input_dim)
    m = np.zeros(net.input_dim)
    for layer, s in zip(net.hidden, pattern.arrays()):
        M = s[:, None] * (layer.W @ M)
        m = s * (layer.W @ m + layer.b)
    return LocalAffine(net.output.W @ M, net.output.W @ m + net.output.b)


def local_affine(net: ReLUNet, x) -> LocalAffine:
    return pattern_affine(net, activation_pattern(net, x))


def param_count(net: ReLUNet) -> int:
    """Entries of all weights and hidden biases; the output bias counts only
    when nonzero."""
    n = sum(layer.W.size + layer.b.size for layer in net.hidden) + net.output.W.size
    if np.any(net.output.b != 0):
        n += net.output.b.size
    return n


def lipschitz_bound(net: ReLUNet) -> float:
    """Product of infinity-norms (max row sums) of all weight matrices."""
    K = 1.0
    for W in [layer.W for layer in net.hidden] + [net.output.W]:
        K *= float(np.abs(W).sum(axis=1).max())
    return K


def load_net(path) -> ReLUNet:
    with open(path) as fh:
        return ReLUNet.from_json(fh.read())

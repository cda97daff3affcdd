"""Multiparametric LPs whose optimizer reproduces a given PWA function.

For ``f = gamma - eta`` with ``gamma = max_i g_i`` and ``eta = max_j e_j``::

    min_z  z1 - z2   s.t.  g_i(x) <= z1  (all i),   z2 <= -e_j(x)  (all j)

has the unique optimizer ``z1 = gamma(x)``, ``z2 = -eta(x)`` for every
parameter ``x``, so ``[1 1] z* = f(x)`` and the optimal value is
``gamma(x) + eta(x)``, a convex function.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .lp import LinearProgram, solve_lp
from .polyhedra import Polyhedron
from .pwa_core import DCPair, PWAFunction, eval_pwa_batch
from .relu_net import ReLUNet, eval_batch


class MpLPError(RuntimeError):
    """A parameter slice turned out infeasible or unbounded."""


class MpLPFormatError(ValueError):
    pass


@dataclass
class MpLP:
    """``min_z cost.z  s.t.  Az z <= Ax x + const``, ``x`` ranging over ``domain``.

    Rows of ``Az``/``Ax``/``const`` describe the joint constraint set in
    ``(z, x)``; ``T`` maps the optimizer to the function value.
    """

    cost: np.ndarray      # (nz,)
    Az: np.ndarray        # (m, nz)
    Ax: np.ndarray        # (m, nx)
    const: np.ndarray     # (m,)
    T: np.ndarray         # (n_out, nz)
    domain: Polyhedron

    def __post_init__(self):
        self.cost = np.asarray(self.cost, dtype=float).reshape(-1)
        self.Az = np.array(self.Az, dtype=float, ndmin=2)
        self.Ax = np.array(self.Ax, dtype=float, ndmin=2)
        self.const = np.asarray(self.const, dtype=float).reshape(-1)
        self.T = np.array(self.T, dtype=float, ndmin=2)
        m = self.const.size
        if self.Az.shape != (m, self.cost.size) or self.Ax.shape != (m, self.domain.dim) \
                or self.T.shape[1] != self.cost.size:
            raise MpLPFormatError("inconsistent mp-LP dimensions")

    @property
    def n_z(self) -> int:
        return self.cost.size

    @property
    def n_x(self) -> int:
        return self.domain.dim

    def rows(self) -> List[Tuple[np.ndarray, np.ndarray, float]]:
        return [(self.Az[i], self.Ax[i], float(self.const[i])) for i in range(self.const.size)]

    def slice(self, x) -> LinearProgram:
        x = np.asarray(x, dtype=float).reshape(-1)
        return LinearProgram(self.cost, self.Az, self.Ax @ x + self.const)


def dc_to_mplp(pair: DCPair, domain: Polyhedron) -> MpLP:
    if len(pair.gamma) == 0 or len(pair.eta) == 0:
        raise ValueError("both parts of the DC pair need at least one piece")
    if domain.dim != pair.dim:
        raise ValueError("domain and DC pair disagree on the parameter dimension")
    if domain.as_box() is None:
        raise ValueError("the parameter domain must be a bounded box")
    g, e = pair.gamma, pair.eta
    ng, ne = len(g), len(e)
    # g_i(x) <= z1   <=>  -z1 <= -u_i.x - c_i
    # z2 <= -e_j(x)  <=>   z2 <= -v_j.x - d_j
    Az = np.vstack([np.tile([-1.0, 0.0], (ng, 1)), np.tile([0.0, 1.0], (ne, 1))])
    Ax = np.vstack([-g.U, -e.U])
    const = np.concatenate([-g.c, -e.c])
    return MpLP(np.array([1.0, -1.0]), Az, Ax, const, np.array([[1.0, 1.0]]), domain)


def solve_slice(mplp: MpLP, x) -> Tuple[np.ndarray, float]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if not mplp.domain.contains(x, 1e-9):
        raise ValueError(f"parameter {x.tolist()} lies outside the mp-LP domain")
    out = solve_lp(mplp.slice(x))
    if not out.optimal:
        raise MpLPError(f"slice at x={x.tolist()} is {out.status.value}")
    return out.x, out.value


@dataclass
class InverseReport:
    max_error: float
    n_samples: int
    tol: float
    convexity_violation: float

    @property
    def value_convex(self) -> bool:
        return self.convexity_violation <= self.tol

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tol and self.value_convex


def _reference_values(reference, X) -> np.ndarray:
    if isinstance(reference, PWAFunction):
        return eval_pwa_batch(reference, X)
    if isinstance(reference, ReLUNet):
        return eval_batch(reference, X)
    return np.array([np.atleast_1d(reference(x)) for x in X])


def parameter_samples(domain: Polyhedron, n_samples: int, seed: int = 0) -> np.ndarray:
    """Uniform grid in 1-D, seeded uniform draws otherwise."""
    lo, hi = domain.as_box()
    if lo.size == 1:
        return np.linspace(lo[0], hi[0], n_samples).reshape(-1, 1)
    return np.random.default_rng(seed).uniform(lo, hi, size=(n_samples, lo.size))


def verify_inverse(mplp: MpLP, reference: Union[PWAFunction, ReLUNet, Callable],
                   n_samples: int = 200, tol: float = 1e-7, seed: int = 0) -> InverseReport:
    """Compare ``T z*(x)`` with ``reference`` and test midpoint convexity of ``J*``."""
    X = parameter_samples(mplp.domain, n_samples, seed)
    ref = _reference_values(reference, X)
    Z, J = [], []
    for x in X:
        z, v = solve_slice(mplp, x)
        Z.append(z)
        J.append(v)
    got = np.array(Z) @ mplp.T.T
    err = float(np.max(np.abs(got - ref))) if len(X) else 0.0
    rng = np.random.default_rng(seed + 1)
    J = np.array(J)
    worst = -np.inf
    for _ in range(max(1, n_samples // 2)):
        i, k = rng.integers(0, len(X), size=2)
        _, vm = solve_slice(mplp, (X[i] + X[k]) / 2.0)
        worst = max(worst, vm - (J[i] + J[k]) / 2.0)
    return InverseReport(err, len(X), tol, float(max(worst, 0.0)))


# -- text format --------------------------------------------------------------

def _num(v: float) -> str:
    s = f"{v:.12g}"
    return "0" if s == "-0" else s


def _xnames(n):
    return ["x"] if n == 1 else [f"x{i + 1}" for i in range(n)]


def _lin(coefs, names) -> str:
    return " + ".join(f"{_num(a)} {v}" for a, v in zip(coefs, names))


def to_text(mplp: MpLP) -> str:
    zn = [f"z{i + 1}" for i in range(mplp.n_z)]
    xn = _xnames(mplp.n_x)
    lines = ["# multiparametric LP: minimize over z, parameter x",
             f"minimize: {_lin(mplp.cost, zn)}",
             "subject to:"]
    for az, ax, k in mplp.rows():
        lines.append(f"{_lin(az, zn)} <= {_lin(ax, xn)} + {_num(k)}")
    for row in mplp.T:
        lines.append(f"T: {' '.join(_num(v) for v in row)}")
    lo, hi = mplp.domain.as_box()
    for name, a, b in zip(xn, lo, hi):
        lines.append(f"domain: {_num(a)} <= {name} <= {_num(b)}")
    return "\n".join(lines) + "\n"


_TERM = re.compile(r"^\s*(\S+)\s+([zx]\d*)\s*$")


def _parse_lin(text, lineno):
    out = {}
    for term in text.split(" + "):
        mt = _TERM.match(term)
        if not mt:
            raise MpLPFormatError(f"line {lineno}: cannot parse term {term.strip()!r}")
        try:
            out[mt.group(2)] = float(mt.group(1))
        except ValueError:
            raise MpLPFormatError(f"line {lineno}: bad number {mt.group(1)!r}") from None
    return out


def from_text(text: str) -> MpLP:
    cost, rows, T, dom = None, [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line == "subject to:":
            continue
        try:
            if line.startswith("minimize:"):
                cost = _parse_lin(line[len("minimize:"):], lineno)
            elif line.startswith("T:"):
                T.append([float(v) for v in line[2:].split()])
            elif line.startswith("domain:"):
                lo, name, hi = re.match(r"domain:\s*(\S+)\s*<=\s*(\S+)\s*<=\s*(\S+)$", line).groups()
                dom.append((name, float(lo), float(hi)))
            else:
                lhs, rhs = line.split("<=")
                rhs_terms, _, k = rhs.rpartition(" + ")
                rows.append((_parse_lin(lhs, lineno), _parse_lin(rhs_terms, lineno), float(k)))
        except (AttributeError, ValueError) as exc:
            if isinstance(exc, MpLPFormatError):
                raise
            raise MpLPFormatError(f"line {lineno}: cannot parse {line!r}") from None
    if cost is None or not rows or not T or not dom:
        raise MpLPFormatError("mp-LP text needs minimize, constraints, T and domain lines")
    zn = [f"z{i + 1}" for i in range(len(cost))]
    xn = _xnames(len(dom))
    if [d[0] for d in dom] != xn:
        raise MpLPFormatError(f"expected domain variables {xn}")
    Az = [[r[0].get(v, 0.0) for v in zn] for r in rows]
    Ax = [[r[1].get(v, 0.0) for v in xn] for r in rows]
    domain = Polyhedron.box([d[1] for d in dom], [d[2] for d in dom])
    return MpLP([cost[v] for v in zn], Az, Ax, [r[2] for r in rows], T, domain)


def load_mplp(path) -> MpLP:
    with open(path) as fh:
        return from_text(fh.read())

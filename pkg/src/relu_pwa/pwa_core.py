"""Explicit piecewise-affine functions.

:class:`PWAFunction` is the general form: a list of polyhedral regions with
one affine map each, over a box-shaped domain. :class:`MaxAffine` and
:class:`DCPair` describe convex functions and differences of convex
functions; :class:`PWA1D` is the compact scalar 1-D form used for
difference-of-convex decomposition.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _jsonloc
from .polyhedra import Polyhedron

CONTINUITY_TOL = 1e-7


class DomainError(ValueError):
    """Point outside the function's domain."""


class PWAFormatError(ValueError):
    pass


# -- general PWA functions --------------------------------------------------

@dataclass(frozen=True)
class Piece:
    region: Polyhedron
    u: np.ndarray  # (n_out, n0)
    c: np.ndarray  # (n_out,)

    def __post_init__(self):
        u = np.array(self.u, dtype=float, ndmin=2)
        c = np.array(self.c, dtype=float).reshape(-1)
        if u.shape != (c.size, self.region.dim):
            raise PWAFormatError(f"piece map has shape u{u.shape}, c{c.shape} "
                                 f"but region dimension is {self.region.dim}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "c", c)

    def __call__(self, x):
        return self.u @ np.asarray(x, dtype=float) + self.c


class PWAFunction:
    """``f(x) = u_i x + c_i`` for ``x`` in region ``i``."""

    def __init__(self, pieces: Sequence[Piece], domain: Polyhedron):
        if not pieces:
            raise PWAFormatError("a PWA function needs at least one piece")
        dims = {p.region.dim for p in pieces} | {domain.dim}
        outs = {p.c.size for p in pieces}
        if len(dims) != 1 or len(outs) != 1:
            raise PWAFormatError("pieces disagree on input or output dimension")
        self.pieces = list(pieces)
        self.domain = domain

    @property
    def input_dim(self) -> int:
        return self.domain.dim

    @property
    def output_dim(self) -> int:
        return self.pieces[0].c.size

    def __len__(self):
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    def __call__(self, x):
        return eval_pwa(self, x)

    def locate(self, x) -> int:
        """Index of a piece containing ``x``.

        Slivers dropped during enumeration can leave gaps far thinner than
        any tolerance of interest; a point in such a gap goes to the piece
        it violates least.
        """
        x = np.asarray(x, dtype=float).reshape(-1)
        viol = [p.region.violation(x) for p in self.pieces]
        return int(np.argmin(viol))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        scalar = self.output_dim == 1
        pieces = []
        for p in self.pieces:
            d = p.region.to_dict()
            d["u"] = p.u[0].tolist() if scalar else p.u.tolist()
            d["c"] = float(p.c[0]) if scalar else p.c.tolist()
            pieces.append(d)
        return {"domain": self.domain.to_dict(), "pieces": pieces}

    def to_json(self) -> str:
        return _jsonloc.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data) -> "PWAFunction":
        try:
            domain = Polyhedron.from_dict(data["domain"])
            pieces = []
            for i, d in enumerate(data["pieces"]):
                u = np.asarray(d["u"], dtype=float)
                c = np.atleast_1d(np.asarray(d["c"], dtype=float))
                if u.ndim == 1:
                    u = u.reshape(1, -1)
                pieces.append(Piece(Polyhedron.from_dict(d), u, c))
        except (KeyError, TypeError, ValueError) as exc:
            raise PWAFormatError(f"malformed PWA data: {exc}") from None
        return cls(pieces, domain)

    @classmethod
    def from_json(cls, text: str) -> "PWAFunction":
        return cls.from_dict(json.loads(text))


def eval_pwa(f: PWAFunction, x, tol: float = 1e-9) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != f.input_dim:
        raise ValueError(f"input has dimension {x.size}, function expects {f.input_dim}")
    if not f.domain.contains(x, tol):
        raise DomainError(f"point {x.tolist()} lies outside the domain")
    return f.pieces[f.locate(x)](x)


def eval_pwa_batch(f: PWAFunction, X) -> np.ndarray:
    X = np.asarray(X, dtype=float).reshape(-1, f.input_dim)
    if not np.all(f.domain.contains_many(X)):
        raise DomainError("some points lie outside the domain")
    viol = np.stack([np.max(X @ p.region.A.T - p.region.b, axis=1) for p in f.pieces], axis=1)
    idx = np.argmin(viol, axis=1)
    U = np.stack([p.u for p in f.pieces])
    C = np.stack([p.c for p in f.pieces])
    return np.einsum("kij,kj->ki", U[idx], X) + C[idx]


@dataclass
class ContinuityReport:
    max_jump: float
    n_boundary_points: int
    tol: float = CONTINUITY_TOL

    @property
    def passed(self) -> bool:
        return self.max_jump <= self.tol


def _strict_piece(f: PWAFunction, x) -> Optional[int]:
    for i, p in enumerate(f.pieces):
        if p.region.contains(x, 0.0):
            return i
    return None


def check_continuity(f: PWAFunction, n_boundary_samples: int = 100, seed: int = 0,
                     tol: float = CONTINUITY_TOL) -> ContinuityReport:
    """Largest jump between neighbouring pieces at sampled boundary points.

    Boundary points come from bisecting random segments of the domain at a
    change of piece; at each such point the two pieces on either side are
    evaluated. A single piece passes vacuously.
    """
    if len(f.pieces) == 1:
        return ContinuityReport(0.0, 0, tol)
    rng = np.random.default_rng(seed)
    lo, hi = _domain_box(f.domain)
    jump, found = 0.0, 0
    for _ in range(50 * n_boundary_samples):
        if found >= n_boundary_samples:
            break
        a, b = rng.uniform(lo, hi), rng.uniform(lo, hi)
        ia, ib = _strict_piece(f, a), _strict_piece(f, b)
        if ia is None or ib is None or ia == ib:
            continue
        for _ in range(60):
            mid = (a + b) / 2.0
            im = _strict_piece(f, mid)
            if im is None:
                break
            if im == ia:
                a = mid
            else:
                b, ib = mid, im
        else:
            im = ia
        if im is None:
            continue
        p = (a + b) / 2.0
        jump = max(jump, float(np.max(np.abs(f.pieces[ia](p) - f.pieces[ib](p)))))
        found += 1
    return ContinuityReport(jump, found, tol)


@dataclass
class PartitionReport:
    n_samples: int
    uncovered: int
    overlapping: int


def check_partition(f: PWAFunction, n_samples: int = 1000, seed: int = 0,
                    tol: float = 1e-9) -> PartitionReport:
    """Count domain samples outside every region, or strictly inside two."""
    rng = np.random.default_rng(seed)
    lo, hi = _domain_box(f.domain)
    X = rng.uniform(lo, hi, size=(n_samples, f.input_dim))
    inside = np.stack([p.region.contains_many(X, tol) for p in f.pieces], axis=1)
    strictly = np.stack([p.region.contains_many(X, -tol) for p in f.pieces], axis=1)
    return PartitionReport(n_samples, int(np.sum(~inside.any(axis=1))),
                           int(np.sum(strictly.sum(axis=1) > 1)))


def _domain_box(domain: Polyhedron):
    box = domain.as_box()
    return box if box is not None else domain.bounding_box()


# -- max-affine and DC pairs --------------------------------------------------

class MaxAffine:
    """``x -> max_i (u_i . x + c_i)``."""

    def __init__(self, U, c):
        U = np.array(U, dtype=float, ndmin=2)
        c = np.array(c, dtype=float).reshape(-1)
        if U.shape[0] != c.size or c.size == 0:
            raise PWAFormatError("MaxAffine needs one slope row per intercept, at least one piece")
        if not (np.all(np.isfinite(U)) and np.all(np.isfinite(c))):
            raise PWAFormatError("MaxAffine entries must be finite")
        self.U = U
        self.c = c

    @classmethod
    def constant(cls, value: float, dim: int = 1) -> "MaxAffine":
        return cls(np.zeros((1, dim)), [value])

    @property
    def dim(self) -> int:
        return self.U.shape[1]

    def __len__(self):
        return self.c.size

    def __call__(self, x):
        return eval_maxaffine(self, x)

    def values(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        return np.max(X @ self.U.T + self.c, axis=1)

    def __repr__(self):
        return f"MaxAffine(pieces={len(self)}, dim={self.dim})"

    def to_dict(self) -> dict:
        return {"pieces": [{"u": u.tolist(), "c": float(c)} for u, c in zip(self.U, self.c)]}

    @classmethod
    def from_dict(cls, data) -> "MaxAffine":
        try:
            pieces = data["pieces"]
            return cls([np.atleast_1d(p["u"]) for p in pieces], [p["c"] for p in pieces])
        except (KeyError, TypeError, ValueError) as exc:
            raise PWAFormatError(f"malformed max-affine data: {exc}") from None


def eval_maxaffine(g: MaxAffine, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != g.dim:
        raise ValueError(f"input has dimension {x.size}, function expects {g.dim}")
    return float(np.max(g.U @ x + g.c))


@dataclass
class DCPair:
    """``f = gamma - eta`` with both parts max-affine.

    ``gamma_kinks`` / ``eta_kinks`` list ``(location, slope jump)`` and are
    filled in by :func:`dc_decompose_1d`.
    """

    gamma: MaxAffine
    eta: MaxAffine
    gamma_kinks: Tuple[Tuple[float, float], ...] = field(default=())
    eta_kinks: Tuple[Tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if self.gamma.dim != self.eta.dim:
            raise PWAFormatError("gamma and eta must share the input dimension")

    @property
    def dim(self) -> int:
        return self.gamma.dim

    def __call__(self, x):
        return eval_maxaffine(self.gamma, x) - eval_maxaffine(self.eta, x)

    def values(self, X) -> np.ndarray:
        return self.gamma.values(X) - self.eta.values(X)

    def to_dict(self) -> dict:
        return {"gamma": self.gamma.to_dict(), "eta": self.eta.to_dict()}

    @classmethod
    def from_dict(cls, data) -> "DCPair":
        try:
            return cls(MaxAffine.from_dict(data["gamma"]), MaxAffine.from_dict(data["eta"]))
        except KeyError as exc:
            raise PWAFormatError(f"DC pair misses field {exc}") from None


# -- scalar functions of one variable ----------------------------------------

class PWA1D:
    """Continuous scalar PWA function of one variable.

    ``slopes[i]`` applies between ``breakpoints[i-1]`` and ``breakpoints[i]``
    (``slopes[0]`` left of the first breakpoint). The function is pinned by
    its value ``f_ref`` at ``x_ref``; continuity is built in.
    """

    def __init__(self, breakpoints, slopes, x_ref: float, f_ref: float):
        bp = np.asarray(breakpoints, dtype=float).reshape(-1)
        s = np.asarray(slopes, dtype=float).reshape(-1)
        if s.size != bp.size + 1:
            raise PWAFormatError("need exactly one more slope than breakpoints")
        if bp.size and np.any(np.diff(bp) <= 0):
            raise PWAFormatError("breakpoints must be strictly increasing")
        self.breakpoints = bp
        self.slopes = s
        self.x_ref = float(x_ref)
        self.f_ref = float(f_ref)
        # values at the breakpoints, integrated outward from x_ref
        self._bp_values = np.array([self._integrate(self.x_ref, t) + self.f_ref for t in bp])

    def _slope_at(self, t):
        return self.slopes[np.searchsorted(self.breakpoints, t, side="right")]

    def _integrate(self, a, b):
        if a == b:
            return 0.0
        sign = 1.0
        if b < a:
            a, b, sign = b, a, -1.0
        pts = np.concatenate([[a], self.breakpoints[(self.breakpoints > a) & (self.breakpoints < b)], [b]])
        mids = (pts[:-1] + pts[1:]) / 2.0
        return sign * float(np.sum(np.diff(pts) * self._slope_at(mids)))

    def __call__(self, x) -> float:
        x = float(x)
        k = int(np.searchsorted(self.breakpoints, x, side="right"))
        if k == 0:
            if self.breakpoints.size == 0:
                return self.f_ref + self.slopes[0] * (x - self.x_ref)
            return self._bp_values[0] + self.slopes[0] * (x - self.breakpoints[0])
        return self._bp_values[k - 1] + self.slopes[k] * (x - self.breakpoints[k - 1])

    def values(self, xs) -> np.ndarray:
        return np.array([self(x) for x in np.asarray(xs, dtype=float).reshape(-1)])

    @property
    def kinks(self) -> List[Tuple[float, float]]:
        """``(location, slope jump)`` at every breakpoint."""
        return [(float(t), float(d)) for t, d in zip(self.breakpoints, np.diff(self.slopes))]

    def pieces(self) -> List[Tuple[float, float]]:
        """``(slope, intercept)`` of each segment, left to right."""
        out = []
        for k, s in enumerate(self.slopes):
            t = self.breakpoints[k - 1] if k else (self.breakpoints[0] if self.breakpoints.size else self.x_ref)
            out.append((float(s), float(self(t) - s * t)))
        return out

    def __repr__(self):
        return f"PWA1D(breakpoints={self.breakpoints.tolist()}, slopes={self.slopes.tolist()})"


def is_convex_1d(f: PWA1D, tol: float = 0.0) -> bool:
    return bool(np.all(np.diff(f.slopes) >= -tol))


def _maxaffine_from_kinks(base_slope, base_value, x_ref, kinks):
    """Max-affine form of ``base + sum_i d_i max(x - t_i, 0)`` with all ``d_i > 0``."""
    U = [base_slope]
    c = [base_value - base_slope * x_ref]
    for t, d in sorted(kinks):
        s_prev, c_prev = U[-1], c[-1]
        U.append(s_prev + d)
        c.append(c_prev - d * t)
    return MaxAffine(np.array(U).reshape(-1, 1), c)


def dc_decompose_1d(f: PWA1D) -> DCPair:
    """Canonical difference-of-convex split of a 1-D PWA function.

    Upward slope changes go to ``gamma`` together with the base affine part
    (slope ``s_0`` through ``(x_ref, f_ref)``); downward changes become the
    nonnegative rectifier sum ``eta`` with zero base slope.
    """
    f_at_first = f(f.breakpoints[0]) if f.breakpoints.size else f.f_ref
    x0 = float(f.breakpoints[0]) if f.breakpoints.size else f.x_ref
    up = tuple((t, d) for t, d in f.kinks if d > 0)
    down = tuple((t, -d) for t, d in f.kinks if d < 0)
    # gamma agrees with f left of the first breakpoint, eta vanishes there
    gamma = _maxaffine_from_kinks(f.slopes[0], f_at_first, x0, up)
    eta = _maxaffine_from_kinks(0.0, 0.0, x0, down)
    return DCPair(gamma, eta, up, down)


def maxaffine_to_pwa1d(g: MaxAffine, lo: float, hi: float) -> PWA1D:
    """Upper envelope of a 1-D max-affine function on ``[lo, hi]``."""
    if g.dim != 1:
        raise ValueError("maxaffine_to_pwa1d needs a 1-D function")
    u, c = g.U[:, 0], g.c
    x = lo
    vals = u * x + c
    top = np.flatnonzero(vals >= vals.max() - 1e-12 * (1 + abs(vals.max())))
    cur = top[np.argmax(u[top])]
    bps, slopes = [], [u[cur]]
    while True:
        steeper = np.flatnonzero(u > u[cur])
        if steeper.size == 0:
            break
        cross = (c[cur] - c[steeper]) / (u[steeper] - u[cur])
        t = cross.min()
        if t >= hi:
            break
        cand = steeper[cross <= t + 1e-12 * (1 + abs(t))]
        nxt = cand[np.argmax(u[cand])]
        if t <= x:
            # overtaken at the current position: switch without a new breakpoint
            slopes[-1] = u[nxt]
        else:
            bps.append(t)
            slopes.append(u[nxt])
            x = t
        cur = nxt
    return PWA1D(bps, slopes, lo, float(g(lo)))


def pwa1d_of_pieces(f: PWAFunction) -> PWA1D:
    """Compact form of a scalar PWA function on an interval."""
    if f.input_dim != 1 or f.output_dim != 1:
        raise ValueError("pwa1d_of_pieces needs a scalar function of one variable")
    lo, hi = _domain_box(f.domain)
    lo, hi = float(lo[0]), float(hi[0])
    spans = []
    for p in f.pieces:
        a, b = _interval(p.region, lo, hi)
        if b > a:
            spans.append((a, b, float(p.u[0, 0]), float(p.c[0])))
    spans.sort()
    bps = [s[0] for s in spans[1:]]
    slopes = [s[2] for s in spans]
    first = spans[0]
    return PWA1D(bps, slopes, lo, first[2] * lo + first[3])


def _interval(region: Polyhedron, lo, hi):
    a_col = region.A[:, 0]
    a, b = lo, hi
    for ai, bi in zip(a_col, region.b):
        if ai > 0:
            b = min(b, bi / ai)
        elif ai < 0:
            a = max(a, bi / ai)
    return a, b


def pwa1d_to_pieces(f: PWA1D, lo: float, hi: float) -> PWAFunction:
    """Interval pieces (each as two halfspaces) on ``[lo, hi]``."""
    edges = [lo] + [t for t in f.breakpoints if lo < t < hi] + [hi]
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        s = float(f._slope_at((a + b) / 2.0))
        pieces.append(Piece(Polyhedron.box([a], [b]), [[s]], [f((a + b) / 2.0) - s * (a + b) / 2.0]))
    return PWAFunction(pieces, Polyhedron.box([lo], [hi]))


def maxaffine_to_pieces(g: MaxAffine, domain: Polyhedron) -> PWAFunction:
    """Region ``{x : piece i attains the max}`` for every piece with interior."""
    pieces = []
    for i in range(len(g)):
        A = g.U - g.U[i]
        b = g.c[i] - g.c
        keep = np.arange(len(g)) != i
        region = domain.intersect(Polyhedron(A[keep], b[keep])) if keep.any() else domain
        if region.is_full_dim():
            pieces.append(Piece(region, g.U[i:i + 1], g.c[i:i + 1]))
    return PWAFunction(pieces, domain)


def pieces_as_maxaffine(f: PWAFunction) -> MaxAffine:
    """Max of all piece maps; equals ``f`` exactly when ``f`` is convex."""
    if f.output_dim != 1:
        raise ValueError("needs a scalar PWA function")
    return MaxAffine(np.vstack([p.u for p in f.pieces]), np.concatenate([p.c for p in f.pieces]))


def load_function(path):
    """Load a PWA, max-affine or DC-pair JSON file, telling them apart by keys."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise PWAFormatError("top level must be an object")
    if "domain" in data:
        return PWAFunction.from_dict(data)
    if "gamma" in data:
        return DCPair.from_dict(data)
    if "pieces" in data:
        return MaxAffine.from_dict(data)
    raise PWAFormatError("unrecognized function file (expected PWA, max-affine or DC pair)")

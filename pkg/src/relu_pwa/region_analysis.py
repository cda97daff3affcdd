"""Linear regions of a ReLU network inside a bounding box.

Two routes: :func:`sample_identify` observes activation patterns at many
sample points, and :func:`enumerate_exact` subdivides the box layer by layer.
Inside a region of the first ``l - 1`` layers every unit of layer ``l`` is an
affine function of the input, so its zero set is a plain hyperplane there
and splitting by it is exact.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.stats import qmc

from .lp import chebyshev_center
from .polyhedra import R_MIN, Polyhedron
from .pwa_core import Piece, PWAFunction
from .relu_net import (ActivationPattern, LocalAffine, ReLUNet, pattern_affine,
                       pattern_bits_batch)

DEFAULT_REGION_CAP = 10**6
_FLAT = 1e-12


class RegionCapExceeded(RuntimeError):
    pass


@dataclass
class RegionRecord:
    pattern: ActivationPattern
    map: LocalAffine
    witness: np.ndarray
    region: Optional[Polyhedron] = None


def region_cap() -> int:
    env = os.environ.get("RELU_PWA_REGION_CAP")
    return int(env) if env else DEFAULT_REGION_CAP


def _require_box(box: Polyhedron, net: ReLUNet):
    if box.dim != net.input_dim:
        raise ValueError(f"box has dimension {box.dim}, net input is {net.input_dim}")
    bounds = box.as_box()
    if bounds is None:
        raise ValueError("an axis-aligned, bounded, full-dimensional box is required")
    return bounds


def sample_points(lo, hi, n_samples: int, seed: int) -> np.ndarray:
    """Half scrambled Halton points, half uniform draws, all from ``seed``."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    d = lo.size
    n_qmc = (n_samples + 1) // 2
    rng = np.random.default_rng(seed)
    halton = qmc.Halton(d, scramble=True, seed=rng).random(n_qmc)
    uniform = rng.random((n_samples - n_qmc, d))
    return lo + (hi - lo) * np.vstack([halton, uniform])


def _split_bits(net: ReLUNet, flat: np.ndarray) -> ActivationPattern:
    out, k = [], 0
    for w in net.widths:
        out.append(flat[k:k + w])
        k += w
    return ActivationPattern.from_arrays(out)


def sample_identify(net: ReLUNet, box: Polyhedron, n_samples: int = 10_000,
                    seed: int = 42) -> List[RegionRecord]:
    """One record per distinct activation pattern seen at the sample points."""
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    lo, hi = _require_box(box, net)
    X = sample_points(lo, hi, n_samples, seed)
    bits = pattern_bits_batch(net, X)
    _, first = np.unique(bits, axis=0, return_index=True)
    records = []
    for i in first:
        pattern = _split_bits(net, bits[i].astype(int))
        records.append(RegionRecord(pattern, pattern_affine(net, pattern), X[i].copy()))
    records.sort(key=lambda r: r.pattern.key())
    return records


def pattern_region(net: ReLUNet, pattern: ActivationPattern, box: Polyhedron) -> Polyhedron:
    """All points of ``box`` whose activation pattern is ``pattern`` (up to ties)."""
    pattern.check(net)
    M = np.eye(net.input_dim)
    m = np.zeros(net.input_dim)
    rows, rhs = [box.A], [box.b]
    for layer, s in zip(net.hidden, pattern.arrays()):
        G = layer.W @ M
        g = layer.W @ m + layer.b
        sign = np.where(s > 0, -1.0, 1.0)  # active: -(Gx+g) <= 0
        rows.append(sign[:, None] * G)
        rhs.append(-sign * g)
        M = s[:, None] * G
        m = s * g
    return Polyhedron(np.vstack(rows), np.concatenate(rhs))


class _Cell:
    __slots__ = ("poly", "center", "radius", "bits", "M", "m")

    def __init__(self, poly, center, radius, bits, M, m):
        self.poly = poly
        self.center = center
        self.radius = radius
        self.bits = bits
        self.M = M
        self.m = m


def _cut(poly: Polyhedron, center, radius, a: np.ndarray, beta: float, r_min: float):
    """Split ``poly`` by ``a.x + beta = 0``; returns ``(bit, poly, center, radius)`` parts.

    The side away from the known center is tested first. If it has no
    interior the hyperplane does not cut, and ``poly`` is kept whole without
    the redundant row.
    """
    val = float(a @ center + beta)
    near_bit = 1 if val > 0 else 0
    # bit 0 side: a.x <= -beta ; bit 1 side: -a.x <= beta
    sides = {0: (a, -beta), 1: (-a, beta)}
    far_bit = 1 - near_bit
    fa, fb = sides[far_bit]
    far_poly = poly.add_halfspace(fa, fb)
    far_ball = chebyshev_center(far_poly.A, far_poly.b, hint=center)
    if far_ball is None or far_ball.radius <= r_min:
        return [(near_bit, poly, center, radius)]
    na, nb = sides[near_bit]
    near_poly = poly.add_halfspace(na, nb)
    near_ball = chebyshev_center(near_poly.A, near_poly.b, hint=center)
    out = [(far_bit, far_poly, far_ball.center, far_ball.radius)]
    if near_ball is not None and near_ball.radius > r_min:
        out.append((near_bit, near_poly, near_ball.center, near_ball.radius))
    return out


def enumerate_exact(net: ReLUNet, box: Polyhedron, r_min: float = R_MIN,
                    cap: Optional[int] = None) -> List[RegionRecord]:
    """Full-dimensional linear regions of ``net`` inside ``box``.

    Parts thinner than ``r_min`` (Chebyshev radius) are dropped. Raises
    :class:`RegionCapExceeded` once more than ``cap`` regions are alive.
    """
    if r_min <= 0:
        raise ValueError("r_min must be positive")
    _require_box(box, net)
    cap = region_cap() if cap is None else cap
    ball = box.chebyshev()
    n0 = net.input_dim
    cells = [_Cell(box, ball.center, ball.radius, [], np.eye(n0), np.zeros(n0))]
    for layer in net.hidden:
        next_cells = []
        for cell in cells:
            G = layer.W @ cell.M
            g = layer.W @ cell.m + layer.b
            parts = [(cell.poly, cell.center, cell.radius, [])]
            for j in range(layer.width):
                grown = []
                for poly, center, radius, bits in parts:
                    if np.linalg.norm(G[j]) <= _FLAT * (1.0 + abs(g[j])):
                        grown.append((poly, center, radius, bits + [1 if g[j] > 0 else 0]))
                        continue
                    for bit, p2, c2, r2 in _cut(poly, center, radius, G[j], g[j], r_min):
                        grown.append((p2, c2, r2, bits + [bit]))
                parts = grown
                if len(next_cells) + len(parts) > cap:
                    raise RegionCapExceeded(f"more than {cap} regions")
            for poly, center, radius, bits in parts:
                s = np.array(bits, dtype=float)
                next_cells.append(_Cell(poly, center, radius, cell.bits + [bits],
                                        s[:, None] * G, s * g))
        cells = next_cells
    records = []
    for cell in cells:
        pattern = ActivationPattern.from_arrays(cell.bits)
        records.append(RegionRecord(pattern, pattern_affine(net, pattern),
                                    np.asarray(cell.center, dtype=float), cell.poly))
    records.sort(key=lambda r: r.pattern.key())
    return records


def count_regions(records) -> int:
    return len(records)


def to_pwa(records: List[RegionRecord], domain: Optional[Polyhedron] = None) -> PWAFunction:
    """PWA function from region records that carry their polyhedra."""
    if not records:
        raise ValueError("no records")
    if any(r.region is None for r in records):
        raise ValueError("records lack region polyhedra; use enumerate_exact "
                         "or attach regions with pattern_region")
    if domain is None:
        los, his = zip(*(r.region.bounding_box() for r in records))
        domain = Polyhedron.box(np.min(los, axis=0), np.max(his, axis=0))
    return PWAFunction([Piece(r.region, r.map.u, r.map.c) for r in records], domain)


def unit_pwa(net: ReLUNet, layer: int, unit: int, box: Polyhedron,
             r_min: float = R_MIN) -> PWAFunction:
    """``x -> h_{layer,unit}(x)`` as a PWA function over ``box`` (1-based)."""
    sub = net.truncated(layer, unit)
    return to_pwa(enumerate_exact(sub, box, r_min), box)


def net_to_pwa(net: ReLUNet, box: Polyhedron, mode: str = "exact", n_samples: int = 10_000,
               seed: int = 42, r_min: float = R_MIN) -> PWAFunction:
    """Exact enumeration, or sampled patterns with their exact regions."""
    if mode == "exact":
        records = enumerate_exact(net, box, r_min)
    elif mode == "sample":
        records = sample_identify(net, box, n_samples, seed)
        for r in records:
            r.region = pattern_region(net, r.pattern, box)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return to_pwa(records, box)

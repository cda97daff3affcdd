"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured numbers
and its wall time; the same lines are repeated in the pytest terminal
summary. Run ``python tests/test_acceptance.py`` to get only those lines.
"""
import itertools
import time
from math import comb
from pathlib import Path

import numpy as np
import pytest

import oracles
from relu_pwa.bounds import Architecture, lower_bound, naive_bound, upper_bound
from relu_pwa.inverse_mplp import dc_to_mplp, solve_slice
from relu_pwa.polyhedra import Polyhedron
from relu_pwa.pwa_core import (DCPair, MaxAffine, dc_decompose_1d, eval_pwa_batch, load_function,
                               pwa1d_of_pieces)
from relu_pwa.region_analysis import enumerate_exact, sample_identify
from relu_pwa.relu_net import ReLUNet, eval_net, load_net, param_count
from relu_pwa.synthesis import maxaffine_to_relu

DATA = Path(__file__).parent / "data"
RESULTS = []


def report(number, title, ok, detail, elapsed, budget=None):
    over = budget is not None and elapsed >= budget
    ok = ok and not over
    limit = f" < {budget:g}s" if budget is not None else ""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({title}): {detail} [{elapsed:.2f}s{limit}]"
    RESULTS.append(line)
    print(line)
    return ok


def gaussian_net(rng, n0, widths):
    dims = [n0, *widths]
    Ws = [rng.normal(size=(dims[i + 1], dims[i])) for i in range(len(widths))]
    bs = [rng.normal(size=w) for w in widths]
    return ReLUNet.from_arrays(Ws, bs, rng.normal(size=(1, widths[-1])), rng.normal(size=1))


# -- 1 -------------------------------------------------------------------------

REFERENCE_ROWS = [((-1, 0), 1.0, 0.0), ((-1, 0), -1.0, 2.0), ((-1, 0), -3.5, 5.0),
                  ((0, 1), 1.0, 0.0), ((0, 1), -0.5, 1.0), ((0, 1), -2.5, 5.0)]


def test_criterion_1_golden_vectors():
    t0 = time.perf_counter()
    f = load_function(DATA / "example_pwa.json")
    pair = dc_decompose_1d(pwa1d_of_pieces(f))
    kinks_ok = (set(pair.gamma_kinks) == {(1.0, 2.0), (6 / 5, 2.5)}
                and set(pair.eta_kinks) == {(2 / 3, 1.5), (2.0, 2.0)})

    domain = Polyhedron.box([0.0], [3.0])
    mplp = dc_to_mplp(load_function(DATA / "example_dc.json"), domain)
    coef_err = max(max(np.max(np.abs(az - ez)), abs(ax[0] - ex), abs(k - ek))
                   for (az, ax, k), (ez, ex, ek) in zip(mplp.rows(), REFERENCE_ROWS))
    rows_ok = len(mplp.rows()) == 6 and coef_err <= 1e-12

    X = np.random.default_rng(1).uniform(0, 3, size=(200, 1))
    ref = eval_pwa_batch(f, X)[:, 0]
    got = np.array([(mplp.T @ solve_slice(mplp, x)[0])[0] for x in X])
    slice_err = float(np.max(np.abs(got - ref)))
    elapsed = time.perf_counter() - t0
    ok = report(1, "worked-example golden vectors", kinks_ok and rows_ok and slice_err <= 1e-9,
                f"kinks {'exact' if kinks_ok else 'MISMATCH'}, constraint error {coef_err:.1e}, "
                f"max |Tz*-f| over 200 slices {slice_err:.1e}", elapsed, 1.0)
    assert ok


# -- 2 -------------------------------------------------------------------------

def test_criterion_2_stated_weights_erratum():
    """The stated example weights do not compute the stated example function.

    Both facts below were first established with the dense-grid oracle in
    ``oracles.py``, which shares no code with the package.
    """
    t0 = time.perf_counter()
    net = load_net(DATA / "example_net.json")
    y0 = float(eval_net(net, [0.0])[0])
    records = enumerate_exact(net, Polyhedron.box([0.0], [3.0]))
    edges = set()
    for r in records:
        lo, hi = r.region.bounding_box()
        edges |= {round(float(lo[0]), 12), round(float(hi[0]), 12)}
    boundaries = sorted(edges - {0.0, 3.0})
    maps = sorted((round(r.map.u[0, 0], 9), round(r.map.c[0], 9)) for r in records)

    oracle_pieces, oracle_kinks = oracles.dense_grid_pieces(oracles.example_forward, 0.0, 3.0)
    h = 3.0 / (10_000 - 1)
    oracle_ok = (oracles.example_forward(0.0) == y0
                 and sorted(oracle_pieces) == maps
                 and len(oracle_kinks) == 2
                 and all(abs(k - b) <= 2 * h for k, b in zip(oracle_kinks, boundaries)))
    ok = y0 == -3.5 and len(records) == 3 and boundaries == [1.0, 2.0] and oracle_ok
    elapsed = time.perf_counter() - t0
    ok = report(2, "stated-weights erratum", ok,
                f"f(0) = {y0:g} (reference function gives 0), {len(records)} regions, "
                f"boundaries {boundaries}, dense-grid oracle {'agrees' if oracle_ok else 'DISAGREES'}",
                elapsed)
    assert ok


# -- 3 -------------------------------------------------------------------------

def test_criterion_3_bounds():
    t0 = time.perf_counter()
    a = Architecture(2, (7, 7))
    rng = np.random.default_rng(0)
    net = ReLUNet.from_arrays([rng.normal(size=(7, 2)), rng.normal(size=(7, 7))],
                              [rng.normal(size=7), rng.normal(size=7)], rng.normal(size=(1, 7)))
    values_ok = lower_bound(a) == 261 and naive_bound(a) == 16384 and param_count(net) == 84

    checked, bad = 0, []
    for n0 in (1, 2, 3):
        for L in (1, 2, 3):
            for widths in itertools.product(range(n0, 9), repeat=L):
                arch = Architecture(n0, widths)
                lo, up, nv = lower_bound(arch), upper_bound(arch), naive_bound(arch)
                checked += 1
                if not lo <= up <= nv:
                    bad.append((n0, widths, lo, up, nv))
    elapsed = time.perf_counter() - t0
    ok = report(3, "region-count bounds", values_ok and not bad,
                f"lower(2:7,7)={lower_bound(a)}, naive={naive_bound(a)}, params={param_count(net)}, "
                f"ordering holds on {checked - len(bad)}/{checked} architectures", elapsed, 10.0)
    assert ok, bad[:5]


# -- 4 -------------------------------------------------------------------------

# every architecture with n0 <= 2, L <= 2 and widths <= 5 that the bounds apply to (n_l >= n0)
SANDWICH_ARCHS = [(n0, widths) for n0 in (1, 2) for L in (1, 2)
                  for widths in itertools.product(range(n0, 6), repeat=L)]


def _all_vertices_inside(W, b, lim):
    """Every point where n0 hyperplanes meet lies strictly inside the box."""
    n1, n0 = W.shape
    for idx in itertools.combinations(range(n1), n0):
        M = W[list(idx)]
        if abs(np.linalg.det(M)) < 1e-6:
            return False
        v = np.linalg.solve(M, -b[list(idx)])
        if np.any(np.abs(v) >= lim):
            return False
    return True


def test_criterion_4_empirical_sandwich():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    cases, violations = 0, []
    for n0, widths in SANDWICH_ARCHS:
        box = Polyhedron.box(-10 * np.ones(n0), 10 * np.ones(n0))
        ub = upper_bound(Architecture(n0, widths))
        for _ in range(50):
            count = len(enumerate_exact(gaussian_net(rng, n0, list(widths)), box))
            cases += 1
            if count > ub:
                violations.append((n0, widths, count, ub))

    hits = {}
    for n0, widths in SANDWICH_ARCHS:
        if len(widths) != 1:
            continue
        n1 = widths[0]
        box = Polyhedron.box(-10 * np.ones(n0), 10 * np.ones(n0))
        target = sum(comb(n1, j) for j in range(n0 + 1))
        hit = 0
        for _ in range(50):
            while True:  # condition on every arrangement vertex falling inside the box
                W, b = rng.normal(size=(n1, n0)), rng.normal(size=n1)
                if _all_vertices_inside(W, b, 10.0):
                    break
            net = ReLUNet.from_arrays([W], [b], rng.normal(size=(1, n1)))
            hit += len(enumerate_exact(net, box)) == target
        hits[(n0, n1)] = hit
    elapsed = time.perf_counter() - t0
    ok = not violations and all(h >= 45 for h in hits.values())
    hit_text = ", ".join(f"{n0}:{n1} {h}/50" for (n0, n1), h in hits.items())
    ok = report(4, "empirical sandwich", ok,
                f"count <= upper bound in {cases - len(violations)}/{cases} nets over "
                f"{len(SANDWICH_ARCHS)} architectures; single-layer exact hits {hit_text}",
                elapsed, 60.0)
    assert ok, violations[:5]


# -- 5 -------------------------------------------------------------------------

def _grid(n0, lo=-2.0, hi=2.0):
    per_axis = {1: 1000, 2: 32, 3: 10}[n0]
    axes = [np.linspace(lo, hi, per_axis)] * n0
    return np.array(list(itertools.product(*axes)))


def test_criterion_5_maxaffine_synthesis():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst, shape_bad = 0.0, []
    for _ in range(100):
        n0, N = int(rng.integers(1, 4)), int(rng.integers(1, 7))
        g = MaxAffine(rng.normal(size=(N, n0)), rng.normal(size=N))
        net = maxaffine_to_relu(g, Polyhedron.box(-2 * np.ones(n0), 2 * np.ones(n0)))
        if set(net.widths) != {n0 + 1} or net.depth > N:
            shape_bad.append((n0, N, net.widths))
        X = _grid(n0)
        ref = g.values(X)
        err = np.max(np.abs(np.array([eval_net(net, x)[0] for x in X]) - ref))
        worst = max(worst, float(err / (1 + np.max(np.abs(ref)))))
    elapsed = time.perf_counter() - t0
    ok = report(5, "max-affine synthesis", not shape_bad and worst <= 1e-9,
                f"100 functions, widths n0+1 and depth <= N in {100 - len(shape_bad)}/100, "
                f"max relative grid error {worst:.1e}", elapsed, 30.0)
    assert ok, shape_bad[:5]


# -- 6 -------------------------------------------------------------------------

def test_criterion_6_inverse_optimizer_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    domain = Polyhedron.box([-3.0], [3.0])
    z_err, convex_viol = 0.0, 0.0
    for _ in range(300):
        ng, ne = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        pair = DCPair(MaxAffine(rng.normal(size=(ng, 1)), rng.normal(size=ng)),
                      MaxAffine(rng.normal(size=(ne, 1)), rng.normal(size=ne)))
        mplp = dc_to_mplp(pair, domain)
        xs = rng.uniform(-3, 3, size=50)
        J = []
        for x in xs:
            z, v = solve_slice(mplp, [x])
            z_err = max(z_err, abs(z[0] - pair.gamma([x])), abs(z[1] + pair.eta([x])))
            J.append(v)
        for i, k in rng.integers(0, 50, size=(25, 2)):
            _, vm = solve_slice(mplp, [(xs[i] + xs[k]) / 2])
            convex_viol = max(convex_viol, vm - (J[i] + J[k]) / 2)
    elapsed = time.perf_counter() - t0
    ok = report(6, "inverse optimizer identity", z_err <= 1e-7 and convex_viol <= 1e-7,
                f"300 pairs x 50 slices, max |z*-(gamma,-eta)| {z_err:.1e}, "
                f"worst midpoint convexity excess {max(convex_viol, 0.0):.1e}", elapsed, 60.0)
    assert ok


# -- 7 -------------------------------------------------------------------------

def test_criterion_7_sample_exact_agreement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    box = Polyhedron.box([-10.0, -10.0], [10.0, 10.0])
    extra, missed, big, total = 0, 0, 0, 0
    for i in range(20):
        net = gaussian_net(rng, 2, [4, 4])
        exact = enumerate_exact(net, box)
        sampled = {r.pattern.key() for r in sample_identify(net, box, 100_000, seed=i)}
        exact_keys = {r.pattern.key() for r in exact}
        extra += len(sampled - exact_keys)
        total += len(exact)
        for r in exact:
            if r.region.chebyshev().radius >= 0.1:
                big += 1
                missed += r.pattern.key() not in sampled
    elapsed = time.perf_counter() - t0
    ok = report(7, "sample/exact agreement", extra == 0 and missed == 0,
                f"20 nets, {total} exact regions, sampled patterns outside exact set: {extra}, "
                f"regions with radius >= 0.1 missed: {missed}/{big}", elapsed, 120.0)
    assert ok


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass

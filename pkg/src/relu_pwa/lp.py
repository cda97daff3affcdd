"""Dense two-phase simplex and Chebyshev centers.

The problems met in this package are tiny (a handful of variables, a few
dozen rows), so a plain tableau with Bland's anti-cycling rule is both fast
enough and predictable. Every solve terminates with one of the three
statuses in :class:`LpStatus`; there is no "numerical failure" outcome.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-11


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``min c.x  s.t.  A x <= b,  lower <= x <= upper``.

    ``bounds`` is a sequence of ``(lower, upper)`` pairs, ``None`` meaning
    unbounded on that side. When omitted every variable is free.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    bounds: Optional[Sequence[tuple]] = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, c.size)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape != (b.size, c.size):
            raise ValueError(f"inconsistent LP dimensions: c{c.shape}, A{A.shape}, b{b.shape}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("LP data must be finite")
        if self.bounds is not None and len(self.bounds) != c.size:
            raise ValueError("one (lower, upper) pair per variable expected")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.c.size


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    x: Optional[np.ndarray] = None
    value: Optional[float] = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _pivot(T, basis, r, e):
    T[r] /= T[r, e]
    col = T[:, e].copy()
    col[r] = 0.0
    T -= col[:, None] * T[r]
    basis[r] = e


def _simplex(T, basis, ncols):
    """Run Bland's rule on tableau ``T`` (last row = reduced costs, last
    column = rhs) over the first ``ncols`` columns. Returns False when the
    objective is unbounded below."""
    while True:
        neg = T[-1, :ncols] < -OPT_TOL
        if not neg.any():
            return True
        e = neg.argmax()
        col = T[:-1, e]
        pos = col > PIVOT_TOL
        if not pos.any():
            return False
        ratios = np.where(pos, T[:-1, -1] / np.where(pos, col, 1.0), np.inf)
        best = ratios.min()
        ties = ratios <= best + FEAS_TOL * max(1.0, abs(best))
        r = np.where(ties, basis, np.iinfo(basis.dtype).max).argmin()
        _pivot(T, basis, r, e)


def _standard_form(lp: LinearProgram):
    """Map ``x`` onto nonnegative ``y`` with ``x = shift + M y``.

    Returns ``(M, shift, A_y, b_y)`` where ``A_y y <= b_y`` collects the
    original rows plus finite upper bounds of doubly bounded variables.
    """
    n = lp.dim
    bounds = lp.bounds if lp.bounds is not None else [(None, None)] * n
    cols, shift = [], np.zeros(n)
    extra_rows, extra_rhs = [], []
    for i, (lo, hi) in enumerate(bounds):
        e = np.zeros(n)
        e[i] = 1.0
        if lo is not None and np.isfinite(lo):
            shift[i] = lo
            cols.append(e)
            if hi is not None and np.isfinite(hi):
                extra_rows.append(len(cols) - 1)
                extra_rhs.append(hi - lo)
        elif hi is not None and np.isfinite(hi):
            shift[i] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    M = np.array(cols).T.reshape(n, len(cols))
    A_y = lp.A @ M
    b_y = lp.b - lp.A @ shift
    if extra_rows:
        ub = np.zeros((len(extra_rows), M.shape[1]))
        ub[np.arange(len(extra_rows)), extra_rows] = 1.0
        A_y = np.vstack([A_y, ub])
        b_y = np.concatenate([b_y, extra_rhs])
    return M, shift, A_y, b_y


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` by two-phase simplex with Bland's rule."""
    M, shift, A, b = _standard_form(lp)
    m, ny = A.shape
    cost = lp.c @ M

    neg = b < 0
    n_art = int(neg.sum())
    # columns: y (ny) | slacks (m) | artificials (n_art) | rhs
    ncols = ny + m + n_art
    T = np.zeros((m + 1, ncols + 1))
    sign = np.where(neg, -1.0, 1.0)
    T[:m, :ny] = A * sign[:, None]
    T[:m, ny:ny + m] = np.diag(sign)
    T[:m, -1] = b * sign
    basis = np.arange(ny, ny + m)
    art_rows = np.flatnonzero(neg)
    for k, r in enumerate(art_rows):
        T[r, ny + m + k] = 1.0
        basis[r] = ny + m + k

    if n_art:
        T[-1, :] = 0.0
        T[-1, ny + m:ncols] = 1.0
        T[-1] -= T[art_rows].sum(axis=0)
        _simplex(T, basis, ncols)
        if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return LpOutcome(LpStatus.INFEASIBLE)
        # drive zero-level artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= ny + m:
                nz = np.flatnonzero(np.abs(T[r, :ny + m]) > PIVOT_TOL)
                if nz.size:
                    _pivot(T, basis, r, nz[0])
                else:
                    keep[r] = False
        rows = np.flatnonzero(keep)
        T = np.vstack([T[rows][:, list(range(ny + m)) + [ncols]], np.zeros((1, ny + m + 1))])
        basis = basis[rows]
        ncols = ny + m

    T[-1, :] = 0.0
    T[-1, :ny] = cost
    for r, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    if not _simplex(T, basis, ncols):
        return LpOutcome(LpStatus.UNBOUNDED)

    y = np.zeros(ncols)
    for r, j in enumerate(basis):
        y[j] = T[r, -1]
    x = shift + M @ y[:ny]
    return LpOutcome(LpStatus.OPTIMAL, x, float(lp.c @ x))


class ChebyshevBall(NamedTuple):
    center: np.ndarray
    radius: float


def _chebyshev_1d(A, b):
    a = A[:, 0]
    lo, hi = -np.inf, np.inf
    for ai, bi in zip(a, b):
        if ai > 0:
            hi = min(hi, bi / ai)
        elif ai < 0:
            lo = max(lo, bi / ai)
        elif bi < -FEAS_TOL:
            return None
    if lo > hi + FEAS_TOL:
        return None
    if not (np.isfinite(lo) and np.isfinite(hi)):
        if np.isfinite(lo):
            return ChebyshevBall(np.array([lo]), np.inf)
        if np.isfinite(hi):
            return ChebyshevBall(np.array([hi]), np.inf)
        return ChebyshevBall(np.zeros(1), np.inf)
    return ChebyshevBall(np.array([(lo + hi) / 2.0]), max(0.0, (hi - lo) / 2.0))


def chebyshev_center(A, b, hint=None) -> Optional[ChebyshevBall]:
    """Largest ball inside ``{x : A x <= b}``, or ``None`` if the set is empty.

    An unbounded polyhedron reports ``radius = inf``; its center then comes
    from the same LP truncated to a large box. ``hint`` is any point used to
    recentre the LP, which keeps the phase-1 problem small.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    n = A.shape[1]
    if n == 1:
        return _chebyshev_1d(A, b)
    norms = np.linalg.norm(A, axis=1)
    origin = np.zeros(n) if hint is None else np.asarray(hint, dtype=float)
    rhs = b - A @ origin
    # variables (y, r) with x = origin + y
    lifted = np.hstack([A, norms[:, None]])
    c = np.zeros(n + 1)
    c[-1] = -1.0
    bounds = [(None, None)] * n + [(0.0, None)]
    out = solve_lp(LinearProgram(c, lifted, rhs, bounds))
    if out.status is LpStatus.INFEASIBLE:
        return None
    if out.status is LpStatus.UNBOUNDED:
        big = 1e3 * (1.0 + np.abs(b).max(initial=0.0))
        box = np.vstack([np.eye(n), -np.eye(n)])
        lifted = np.vstack([lifted, np.hstack([box, np.ones((2 * n, 1))])])
        rhs = np.concatenate([rhs, np.full(2 * n, big)])
        out = solve_lp(LinearProgram(c, lifted, rhs, bounds))
        return ChebyshevBall(origin + out.x[:n], np.inf)
    return ChebyshevBall(origin + out.x[:n], float(out.x[-1]))

"""Halfspace-represented polyhedra ``{x : A x <= b}``."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .lp import ChebyshevBall, LinearProgram, chebyshev_center, solve_lp

R_MIN = 1e-8
_ZERO_ROW = 1e-14


def normalize_rows(A, b):
    """Scale every nonzero row of ``[A | b]`` so that row of ``A`` has unit norm."""
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float).reshape(-1)
    norms = np.linalg.norm(A, axis=1)
    scale = np.where(norms > _ZERO_ROW, norms, 1.0)
    return A / scale[:, None], b / scale


class Polyhedron:
    """Convex polyhedron in H-representation.

    Rows are normalized at construction. Instances are treated as immutable;
    operations such as :meth:`split` return new polyhedra. The Chebyshev ball
    is computed lazily and cached.
    """

    __slots__ = ("A", "b", "_ball", "_ball_done")

    def __init__(self, A, b, *, normalize=True, ball: Optional[ChebyshevBall] = None):
        A = np.array(A, dtype=float, ndmin=2)
        b = np.array(b, dtype=float).reshape(-1)
        if A.shape[0] != b.size:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.size} entries")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("polyhedron data must be finite")
        if normalize:
            A, b = normalize_rows(A, b)
        b = b + 0.0  # no negative zeros
        A.setflags(write=False)
        b.setflags(write=False)
        self.A = A
        self.b = b
        self._ball = ball
        self._ball_done = ball is not None

    @classmethod
    def box(cls, lo, hi) -> "Polyhedron":
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise ValueError("box needs lo < hi componentwise")
        n = lo.size
        A = np.vstack([np.eye(n), -np.eye(n)])
        b = np.concatenate([hi, -lo])
        ball = ChebyshevBall((lo + hi) / 2.0, float(np.min(hi - lo) / 2.0))
        return cls(A, b, ball=ball)

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        A = np.zeros((1, dim))
        return cls(A, [-1.0], normalize=False)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def __repr__(self):
        return f"Polyhedron(dim={self.dim}, rows={self.A.shape[0]})"

    def __eq__(self, other):
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.A.shape == other.A.shape and np.array_equal(self.A, other.A) \
            and np.array_equal(self.b, other.b)

    __hash__ = None

    def chebyshev(self) -> Optional[ChebyshevBall]:
        if not self._ball_done:
            self._ball = chebyshev_center(self.A, self.b)
            self._ball_done = True
        return self._ball

    def is_empty(self) -> bool:
        return self.chebyshev() is None

    def is_full_dim(self, r_min: float = R_MIN) -> bool:
        ball = self.chebyshev()
        return ball is not None and ball.radius > r_min

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float).reshape(-1)
        return bool(np.all(self.A @ x <= self.b + tol))

    def contains_many(self, X, tol: float = 1e-9) -> np.ndarray:
        X = np.asarray(X, dtype=float).reshape(-1, self.dim)
        return np.all(X @ self.A.T <= self.b + tol, axis=1)

    def violation(self, x) -> float:
        """Largest constraint violation at ``x`` (<= 0 inside)."""
        return float(np.max(self.A @ np.asarray(x, dtype=float) - self.b, initial=-np.inf))

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return Polyhedron(np.vstack([self.A, other.A]), np.concatenate([self.b, other.b]),
                          normalize=False)

    def add_halfspace(self, a, beta, *, ball: Optional[ChebyshevBall] = None) -> "Polyhedron":
        """``self`` intersected with ``{x : a.x <= beta}``."""
        a = np.asarray(a, dtype=float).reshape(1, -1)
        if a.shape[1] != self.dim:
            raise ValueError("dimension mismatch")
        a, beta = normalize_rows(a, [beta])
        return Polyhedron(np.vstack([self.A, a]), np.concatenate([self.b, beta]),
                          normalize=False, ball=ball)

    def split(self, w, beta):
        """Cut by the hyperplane ``w.x + beta = 0``.

        Returns ``(lower, upper)`` with ``lower = self & {w.x + beta <= 0}``
        and ``upper = self & {w.x + beta >= 0}``. A zero ``w`` does not
        cut; ``self`` goes to the side that holds everywhere (the lower side
        when ``beta == 0``) and the other side is empty.
        """
        w = np.asarray(w, dtype=float).reshape(-1)
        if w.size != self.dim:
            raise ValueError(f"hyperplane normal has length {w.size}, expected {self.dim}")
        if np.linalg.norm(w) <= _ZERO_ROW:
            if beta > 0:
                return Polyhedron.empty(self.dim), self
            return self, Polyhedron.empty(self.dim)
        return self.add_halfspace(w, -beta), self.add_halfspace(-w, beta)

    def as_box(self):
        """``(lo, hi)`` if every row is an axis-aligned bound covering each
        coordinate from both sides, else ``None``."""
        n = self.dim
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
        for a, beta in zip(self.A, self.b):
            nz = np.flatnonzero(np.abs(a) > _ZERO_ROW)
            if nz.size != 1 or abs(abs(a[nz[0]]) - 1.0) > 1e-12:
                return None
            i = nz[0]
            if a[i] > 0:
                hi[i] = min(hi[i], beta)
            else:
                lo[i] = max(lo[i], -beta)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))) or np.any(hi <= lo):
            return None
        return lo, hi

    def bounding_box(self):
        """Tight axis-aligned bounds, by 2n LPs."""
        n = self.dim
        lo, hi = np.empty(n), np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = 1.0
            lo[i] = solve_lp(LinearProgram(e, self.A, self.b)).value
            hi[i] = -solve_lp(LinearProgram(-e, self.A, self.b)).value
        return lo, hi

    def remove_redundant(self, tol: float = 1e-9) -> "Polyhedron":
        """Drop rows implied by the others (one LP per row)."""
        keep = np.ones(self.A.shape[0], dtype=bool)
        for i in range(self.A.shape[0]):
            if np.linalg.norm(self.A[i]) <= _ZERO_ROW:
                if self.b[i] >= 0:
                    keep[i] = False
                continue
            others = keep.copy()
            others[i] = False
            rest_A, rest_b = self.A[others], self.b[others]
            # relax row i slightly so the LP stays bounded when it is the only cap
            A = np.vstack([rest_A, self.A[i]])
            b = np.concatenate([rest_b, [self.b[i] + 1.0]])
            out = solve_lp(LinearProgram(-self.A[i], A, b))
            if out.optimal and -out.value <= self.b[i] + tol:
                keep[i] = False
        return Polyhedron(self.A[keep], self.b[keep], normalize=False, ball=self._ball)

    def to_dict(self) -> dict:
        return {"A": self.A.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d) -> "Polyhedron":
        A = np.asarray(d["A"], dtype=float)
        if A.ndim == 1:
            A = A.reshape(-1, 1)
        return cls(A, d["b"])

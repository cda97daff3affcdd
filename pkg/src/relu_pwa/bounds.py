"""Bounds on the maximal number of linear regions of a ReLU architecture.

All three bounds are exact integers. The lower and upper bounds assume every
hidden width is at least the input dimension and refuse to answer otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, prod
from typing import Tuple


class HypothesisError(ValueError):
    """The architecture does not satisfy ``n_l >= n0`` for every layer."""


@dataclass(frozen=True)
class Architecture:
    n0: int
    widths: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if self.n0 < 1 or not self.widths or min(self.widths) < 1:
            raise ValueError("input dimension and widths must be positive, with L >= 1")

    @classmethod
    def parse(cls, text: str) -> "Architecture":
        """Parse ``"n0:n1,n2,...,nL"``."""
        try:
            head, tail = text.split(":")
            return cls(int(head), tuple(int(w) for w in tail.split(",")))
        except ValueError:
            raise ValueError(f"architecture must look like 'n0:n1,...,nL', got {text!r}") from None

    @classmethod
    def of(cls, net) -> "Architecture":
        return cls(net.input_dim, net.widths)

    @property
    def depth(self) -> int:
        return len(self.widths)

    @property
    def units(self) -> int:
        return sum(self.widths)

    def meets_hypothesis(self) -> bool:
        return min(self.widths) >= self.n0

    def _require(self):
        if not self.meets_hypothesis():
            raise HypothesisError(
                f"bound needs every width >= n0 = {self.n0}, got widths {list(self.widths)}")

    def __str__(self):
        return f"{self.n0}:{','.join(map(str, self.widths))}"


def lower_bound(arch: Architecture) -> int:
    """``prod_{l<L} floor(n_l/n0)^n0 * sum_{j<=n0} C(n_L, j)``."""
    arch._require()
    n0 = arch.n0
    head = prod((w // n0) ** n0 for w in arch.widths[:-1])
    return head * sum(comb(arch.widths[-1], j) for j in range(n0 + 1))


def upper_bound(arch: Architecture) -> int:
    """Sum of ``prod_l C(n_l, j_l)`` over the admissible index tuples.

    A tuple ``(j_1..j_L)`` is admissible when each ``j_l`` lies between 0 and
    ``min(n0, n_1 - j_1, ..., n_{l-1} - j_{l-1}, n_l)``; the running minimum is
    carried through a depth-first walk.
    """
    arch._require()
    widths = arch.widths

    def walk(l, cap, acc):
        if l == len(widths):
            return acc
        n = widths[l]
        return sum(walk(l + 1, min(cap, n - j), acc * comb(n, j))
                   for j in range(min(cap, n) + 1))

    return walk(0, arch.n0, 1)


def naive_bound(arch: Architecture) -> int:
    return 2 ** arch.units

"""Freeze the brute-force oracle outputs the other tests rely on."""
import pytest

import oracles


def test_example_forward_at_zero():
    assert oracles.example_forward(0.0) == -3.5


def test_dense_grid_pieces_of_stated_weights():
    pieces, kinks = oracles.dense_grid_pieces(oracles.example_forward, 0.0, 3.0)
    assert pieces == [(0.75, -3.5), (2.75, -5.5), (0.0, 0.0)]
    assert len(kinks) == 2
    h = 3.0 / 9999
    assert kinks[0] == pytest.approx(1.0, abs=2 * h)
    assert kinks[1] == pytest.approx(2.0, abs=2 * h)


@pytest.mark.parametrize("n0,widths,expected", [
    (1, [2, 2], 9),
    (2, [7, 7], 841),
])
def test_upper_bound_bruteforce(n0, widths, expected):
    assert oracles.upper_bound_bruteforce(n0, widths) == expected


def test_lower_bound_direct():
    assert oracles.lower_bound_direct(2, [7, 7]) == 261


def test_exact_pwa_oracle_matches_reference_pieces():
    from fractions import Fraction as F
    assert oracles.example_pwa_exact(F(0)) == 0
    assert oracles.example_pwa_exact(F(1)) == F(-1, 2)
    assert oracles.example_pwa_exact(F(3)) == 3

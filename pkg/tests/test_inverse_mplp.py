import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relu_pwa.inverse_mplp import (MpLPFormatError, dc_to_mplp, from_text, solve_slice, to_text,
                                   verify_inverse)
from relu_pwa.polyhedra import Polyhedron
from relu_pwa.pwa_core import PWA1D, dc_decompose_1d, load_function
from relu_pwa.relu_net import load_net

DOMAIN = Polyhedron.box([0.0], [3.0])

# (coefficients of z1, z2) <= (coefficient of x) * x + constant
REFERENCE_ROWS = [
    ((-1, 0), 1.0, 0.0),     # -x <= z1
    ((-1, 0), -1.0, 2.0),    # x - 2 <= z1
    ((-1, 0), -3.5, 5.0),    # 7/2 x - 5 <= z1
    ((0, 1), 1.0, 0.0),      # z2 <= x
    ((0, 1), -0.5, 1.0),     # z2 <= -x/2 + 1
    ((0, 1), -2.5, 5.0),     # z2 <= -5/2 x + 5
]


@pytest.fixture
def reference(data_dir):
    return dc_to_mplp(load_function(data_dir / "example_dc.json"), DOMAIN)


def test_reference_constraints(reference):
    assert len(reference.rows()) == 6
    for (az, ax, k), (ez, ex, ek) in zip(reference.rows(), REFERENCE_ROWS):
        np.testing.assert_allclose(az, ez, atol=1e-12)
        assert ax[0] == pytest.approx(ex, abs=1e-12)
        assert k == pytest.approx(ek, abs=1e-12)
    np.testing.assert_array_equal(reference.cost, [1, -1])
    np.testing.assert_array_equal(reference.T, [[1, 1]])


@pytest.mark.parametrize("x,z", [(1.5, (0.25, 0.25)), (0.0, (0.0, 0.0)), (3.0, (5.5, -2.5))])
def test_slices(reference, x, z):
    zs, value = solve_slice(reference, [x])
    np.testing.assert_allclose(zs, z, atol=1e-12)
    assert value == pytest.approx(z[0] - z[1], abs=1e-12)


def test_slice_outside_domain(reference):
    with pytest.raises(ValueError):
        solve_slice(reference, [4.0])


def test_verify_against_pwa_and_erratum_net(reference, data_dir):
    rep = verify_inverse(reference, load_function(data_dir / "example_pwa.json"))
    assert rep.passed and rep.max_error <= 1e-9
    # the stated weights compute a different function
    rep = verify_inverse(reference, load_net(data_dir / "example_net.json"))
    assert not rep.passed
    assert rep.max_error == pytest.approx(3.5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_optimizer_identity(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    f = PWA1D(np.sort(rng.uniform(0, 3, size=k)), rng.normal(size=k + 1) * 2, 0.0, rng.normal())
    pair = dc_decompose_1d(f)
    mplp = dc_to_mplp(pair, DOMAIN)
    for x in rng.uniform(0, 3, size=20):
        z, _ = solve_slice(mplp, [x])
        assert z[0] == pytest.approx(pair.gamma([x]), abs=1e-7)
        assert z[1] == pytest.approx(-pair.eta([x]), abs=1e-7)
    assert verify_inverse(mplp, lambda x: f(x[0]), n_samples=50).passed


def test_text_round_trip(reference):
    text = to_text(reference)
    assert "minimize: 1 z1 + -1 z2" in text
    assert "domain: 0 <= x <= 3" in text
    again = from_text(text)
    np.testing.assert_array_equal(again.Az, reference.Az)
    np.testing.assert_array_equal(again.Ax, reference.Ax)
    np.testing.assert_array_equal(again.const, reference.const)
    np.testing.assert_array_equal(again.T, reference.T)
    assert to_text(again) == text


@pytest.mark.parametrize("text", [
    "minimize: 1 z1\n",
    "minimize: 1 z1\n1 q1 <= 1 x + 0\nT: 1\ndomain: 0 <= x <= 1\n",
    "minimize: 1 z1\n1 z1 <= 1 x + 0\nT: 1\ndomain: 0 <= y <= 1\n",
])
def test_malformed_text(text):
    with pytest.raises(MpLPFormatError):
        from_text(text)

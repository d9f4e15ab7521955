import numpy as np
import pytest
from hypothesis import given, strategies as st

from nftnoise import Signal, TimeGrid, inner
from nftnoise.errors import InvalidInputError


def test_grid_spacing_and_midpoints():
    g = TimeGrid(-1.0, 1.0, 4)
    assert g.dt == 0.5
    np.testing.assert_allclose(g.t, [-0.75, -0.25, 0.25, 0.75])


@pytest.mark.parametrize("args", [(1.0, 1.0, 8), (1.0, 0.0, 8), (0.0, 1.0, 1)])
def test_grid_rejects_bad_bounds(args):
    with pytest.raises(InvalidInputError):
        TimeGrid(*args)


def test_signal_length_must_match(grid):
    with pytest.raises(InvalidInputError):
        Signal(grid, np.zeros(grid.n_samples - 1))


def test_samples_are_read_only(two_sech):
    with pytest.raises(ValueError):
        two_sech.samples[0] = 1.0


def test_sech_energy(two_sech):
    # integral of 4 sech^2 over the real line is 8
    assert two_sech.energy() == pytest.approx(8.0, rel=1e-6)


def test_non_finite_rejected(grid):
    s = Signal(grid, np.full(grid.n_samples, np.nan))
    with pytest.raises(InvalidInputError):
        s.check_finite()


def test_signals_on_different_grids_do_not_mix(grid):
    a = Signal.zeros(grid)
    b = Signal.zeros(TimeGrid.symmetric(8.0, 2048))
    with pytest.raises(InvalidInputError):
        a + b


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_inner_product_is_sesquilinear(x, y):
    g = TimeGrid.symmetric(4.0, 64)
    a = Signal(g, np.exp(1j * g.t))
    b = Signal(g, np.cos(g.t) + 0j)
    c = complex(x, y)
    assert inner(a * c, b) == pytest.approx(c * inner(a, b), abs=1e-9)
    assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-12)

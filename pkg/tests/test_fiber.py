import numpy as np
import pytest
from hypothesis import given, strategies as st

from nftnoise import (FiberSpec, NormalizationMap, PropagationConfig, Signal, TimeGrid,
                      denormalize, find_discrete_eigenvalues, normalize, propagate_with_taps,
                      sech_pulse, split_step_propagate)
from nftnoise.errors import AccuracyWarning, InvalidInputError, NumericalBlowupError
from nftnoise.fiber import (PhysicalSignal, band_mask, bandlimited_noise, expected_noise_energy,
                            steps_for)


# --------------------------------------------------------------------------
# units

def test_loop_fiber_scales():
    nm = FiberSpec.nz_dsf().normalization()
    assert nm.power_scale == pytest.approx(2 / (1.2 * 1500))  # W
    assert nm.time_scale == pytest.approx(np.sqrt(5.01e-24 * 1500 / 2))
    assert nm.to_z(150.0) == pytest.approx(0.1)
    assert nm.to_km(1.0) == pytest.approx(1500.0)


def test_epsilon_from_kappa():
    nm = NormalizationMap.from_fiber(FiberSpec(beta2=-2e-24, gamma=2.0))
    assert nm.epsilon_from_kappa(1e-6) == pytest.approx(np.sqrt(2.0 / 2e-12) * 1e-6)


@given(st.floats(-1e-23, -1e-26), st.floats(0.1, 10), st.floats(10, 5000))
def test_normalize_round_trip(beta2, gamma, length):
    fiber = FiberSpec(beta2=beta2, gamma=gamma, length_km=length)
    phys = PhysicalSignal(-1e-10, 2e-10, np.linspace(0, 1e-2, 16) * (1 + 0.5j))
    back = denormalize(normalize(phys, fiber), fiber)
    np.testing.assert_allclose(back.samples, phys.samples, rtol=1e-12)
    np.testing.assert_allclose(back.s, phys.s, rtol=1e-12)


def test_fiber_validation():
    with pytest.raises(InvalidInputError):
        FiberSpec(beta2=5e-24, gamma=1.2)
    with pytest.raises(InvalidInputError):
        FiberSpec(beta2=-5e-24, gamma=0.0)
    with pytest.raises(InvalidInputError):
        PropagationConfig(n_steps=0)
    with pytest.raises(InvalidInputError):
        PropagationConfig(n_steps=10, noise_bandwidth=1.5)


# --------------------------------------------------------------------------
# noiseless propagation

def test_fundamental_soliton_keeps_its_shape():
    g = TimeGrid.symmetric(16.0, 1024)
    q = sech_pulse(1.0, g)
    out = split_step_propagate(q, 1.0, PropagationConfig(2000))
    assert np.max(np.abs(np.abs(out.samples) - np.abs(q.samples))) < 1e-5
    # sech(t) picks up the phase exp(-jz)
    assert np.angle(out.samples[512] / q.samples[512]) == pytest.approx(-1.0, abs=1e-4)


def test_energy_is_conserved(two_sech):
    out = split_step_propagate(two_sech, 0.5, PropagationConfig(1000))
    assert abs(out.energy() - two_sech.energy()) / two_sech.energy() < 1e-6


def test_second_order_convergence():
    q = sech_pulse(2.0, TimeGrid.symmetric(16.0, 1024))
    ref = split_step_propagate(q, 0.5, PropagationConfig(8000)).samples
    err = [np.max(np.abs(split_step_propagate(q, 0.5, PropagationConfig(n)).samples - ref))
           for n in (1000, 2000)]
    assert err[1] < 1e-4
    assert err[0] / err[1] > 3.0


def test_two_soliton_phase_difference_after_short_distance():
    # eigenvalues stay put; the amplitude ratio rotates by 4 (1.5^2 - 0.5^2) z = 0.8 rad
    g = TimeGrid.symmetric(16.0, 2048)
    q = sech_pulse(2.0, g)
    before = find_discrete_eigenvalues(q)
    after = find_discrete_eigenvalues(split_step_propagate(q, 0.1, PropagationConfig(500)))
    np.testing.assert_allclose(after.eigenvalues, before.eigenvalues, atol=1e-3)
    r0 = before.amplitudes[1] / before.amplitudes[0]
    r1 = after.amplitudes[1] / after.amplitudes[0]
    assert np.angle(r1 / r0) == pytest.approx(0.8, abs=1e-2)
    assert abs(r1) == pytest.approx(abs(r0), rel=1e-2)


def test_coarse_steps_warn(two_sech):
    with pytest.warns(AccuracyWarning):
        split_step_propagate(two_sech, 1.0, PropagationConfig(10))


def test_overflowing_signal_raises(grid):
    q = Signal(grid, np.full(grid.n_samples, 1e155 + 0j))
    with pytest.warns(AccuracyWarning), pytest.raises(NumericalBlowupError), \
            np.errstate(over="ignore", invalid="ignore"):
        split_step_propagate(q, 0.1, PropagationConfig(2))


def test_nonpositive_distance_rejected(two_sech):
    with pytest.raises(InvalidInputError):
        split_step_propagate(two_sech, 0.0, PropagationConfig(10))


def test_steps_for_respects_limit(two_sech):
    n = steps_for(two_sech, 1.0)
    assert 2 * 4.0 * (1.0 / n) <= 0.1 + 1e-12


# --------------------------------------------------------------------------
# taps

def test_taps_match_separate_runs(two_sech):
    cfg = PropagationConfig(400)
    final, fields = propagate_with_taps(two_sech, 0.4, cfg, taps=[0.0, 0.1, 0.4])
    assert fields[0] is two_sech
    np.testing.assert_array_equal(fields[2].samples, final.samples)
    short = split_step_propagate(two_sech, 0.1, PropagationConfig(100))
    np.testing.assert_allclose(fields[1].samples, short.samples, atol=1e-12)


def test_tap_off_step_grid_rejected(two_sech):
    with pytest.raises(InvalidInputError):
        propagate_with_taps(two_sech, 0.4, PropagationConfig(4), taps=[0.15])


# --------------------------------------------------------------------------
# noise

def test_band_mask_fraction():
    g = TimeGrid.symmetric(8.0, 256)
    assert band_mask(g, 1.0).all()
    assert band_mask(g, 0.25).sum() == 65  # |f| <= 1/8 cycles/sample
    with pytest.raises(InvalidInputError):
        band_mask(g, 0.0)


def test_bandlimited_noise_variance():
    g = TimeGrid.symmetric(8.0, 512)
    rng = np.random.default_rng(3)
    v = np.mean([np.mean(np.abs(bandlimited_noise(g, 2.0, 1.0, rng).samples) ** 2)
                 for _ in range(200)])
    assert v == pytest.approx(2.0, rel=0.02)


def test_injected_noise_energy_matches_prediction():
    g = TimeGrid.symmetric(4.0, 64)
    cfg = PropagationConfig(n_steps=4, noise_sigma=1e-3, noise_bandwidth=0.5)
    rng = np.random.default_rng(11)
    energies = [split_step_propagate(Signal.zeros(g), 0.5, cfg, rng=rng).energy()
                for _ in range(1000)]
    assert np.mean(energies) == pytest.approx(expected_noise_energy(g, 0.5, cfg), rel=0.05)


def test_same_seed_same_field(two_sech):
    cfg = PropagationConfig(n_steps=50, noise_sigma=0.01, rng_seed=42)
    a = split_step_propagate(two_sech, 0.1, cfg)
    b = split_step_propagate(two_sech, 0.1, cfg)
    np.testing.assert_array_equal(a.samples, b.samples)
    c = split_step_propagate(two_sech, 0.1, PropagationConfig(50, 0.01, rng_seed=43))
    assert not np.array_equal(a.samples, c.samples)

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nftnoise import (SearchConfig, Signal, TimeGrid, a_coefficient, a_derivative,
                      continuous_amplitude, discrete_amplitude, find_discrete_eigenvalues,
                      scatter_ablowitz_ladik, scatter_forward_difference, sech_pulse)
from nftnoise.errors import (DegenerateRootError, InvalidInputError, NearSingularError,
                             ScatteringRangeError)
from nftnoise.nft import DiscreteSpectrum, newton_polish, norming_coefficient, scatter

# a(1.0) for 2 sech(t) on [-16, 16] from a DOP853 integration of the continuous
# Zakharov-Shabat system with max_step = dt/8 (rtol 1e-12); equals -(63 + 16j)/65
A_AT_ONE_ORACLE = -0.9692307692307524 - 0.24615384615391078j
# Richardson extrapolation (h = 1e-2, 5e-3, 2.5e-3) of central differences of a(lam)
# for 2 sech(t), N = 2048, at lam = 0.5j
A_PRIME_ORACLE = 0.5000366096003643j


# --------------------------------------------------------------------------
# scattering coefficients

@pytest.mark.parametrize("scatter_fn", [scatter_forward_difference, scatter_ablowitz_ladik])
@pytest.mark.parametrize("lam", [0.5j, 1.0, 0.3 + 0.7j])
def test_zero_signal_is_transparent(grid, scatter_fn, lam):
    sc = scatter_fn(Signal.zeros(grid), lam)
    assert sc.a == pytest.approx(1.0, abs=1e-12)
    assert sc.b == 0


def test_two_sech_eigenvalues_zero_a(two_sech):
    assert abs(scatter_forward_difference(two_sech, 0.5j).a) < 1e-3
    assert abs(scatter_ablowitz_ladik(two_sech, 1.5j).a) < 1e-3


def test_forward_difference_matches_ode_oracle(two_sech):
    a = scatter_forward_difference(two_sech, 1.0).a
    assert abs(a - A_AT_ONE_ORACLE) / abs(A_AT_ONE_ORACLE) < 1e-4


def test_discretizations_converge_together():
    diffs = []
    for n in (512, 1024, 2048):
        q = sech_pulse(2.0, TimeGrid.symmetric(16.0, n))
        diffs.append(abs(scatter_ablowitz_ladik(q, 0.8j).a - scatter_forward_difference(q, 0.8j).a))
    assert diffs[0] > diffs[1] > diffs[2]


def test_large_imaginary_lambda_reports_range_error(two_sech):
    with pytest.raises(ScatteringRangeError):
        scatter_forward_difference(two_sech, 100j)


def test_lower_half_plane_rejected(two_sech):
    with pytest.raises(InvalidInputError):
        scatter_forward_difference(two_sech, -0.5j)


def test_non_finite_signal_rejected(grid):
    s = Signal(grid, np.full(grid.n_samples, np.inf))
    with pytest.raises(InvalidInputError):
        scatter_forward_difference(s, 0.5j)


def test_unknown_method_rejected(two_sech):
    with pytest.raises(InvalidInputError):
        scatter(two_sech, 0.5j, method="euler")


def test_a_coefficient_vectorized(two_sech):
    lams = np.array([0.5j, 1.0, 0.2 + 0.3j])
    vals = a_coefficient(two_sech, lams)
    for lam, v in zip(lams, vals):
        assert v == pytest.approx(scatter_forward_difference(two_sech, lam).a, abs=1e-13)


@given(st.floats(-4, 4), st.floats(0.3, 2.5))
def test_real_axis_unitarity(lam, amp):
    q = sech_pulse(amp, TimeGrid.symmetric(16.0, 1024))
    for fn in (scatter_forward_difference, scatter_ablowitz_ladik):
        assert fn(q, lam).unitarity_defect() < 1e-3


# --------------------------------------------------------------------------
# derivative and amplitudes

def test_derivative_of_fundamental_soliton_is_finite(one_sech):
    d = a_derivative(one_sech, 0.5j)
    assert np.isfinite(d) and abs(d) > 0.1


def test_derivative_matches_richardson_oracle(two_sech):
    d = a_derivative(two_sech, 0.5j)
    assert abs(d - A_PRIME_ORACLE) / abs(A_PRIME_ORACLE) < 1e-4


def test_derivative_step_halving_is_stable(two_sech):
    lam = 1.5j
    h = 1e-6 * (1 + abs(lam))
    d1 = a_derivative(two_sech, lam, step=h)
    d2 = a_derivative(two_sech, lam, step=h / 2)
    assert abs(d1 - d2) / abs(d1) < 1e-4


def test_derivative_of_constant_a_is_degenerate(grid):
    with pytest.raises(DegenerateRootError):
        a_derivative(Signal.zeros(grid), 1j)


def test_discrete_amplitude_of_fundamental_soliton(one_sech):
    qd = discrete_amplitude(one_sech, 0.5j)
    assert np.isfinite(qd) and abs(qd) > 0


def test_time_shift_scales_discrete_amplitude():
    g = TimeGrid.symmetric(20.0, 2560)
    t0, lam = 1.5, 0.5j
    q = Signal.from_function(lambda t: 1 / np.cosh(t), g)
    qs = Signal.from_function(lambda t: 1 / np.cosh(t - t0), g)
    ratio = abs(discrete_amplitude(qs, lam)) / abs(discrete_amplitude(q, lam))
    assert ratio == pytest.approx(np.exp(2 * lam.imag * t0), rel=1e-2)


def test_norming_coefficient_is_robust_at_large_imaginary_part(grid):
    # 3 sech(t): b = +-1 at 0.5j, 1.5j, 2.5j for the symmetric profile
    q = sech_pulse(3.0, grid)
    for lam in (0.5j, 1.5j, 2.5j):
        assert abs(abs(norming_coefficient(q, lam)) - 1) < 1e-3


def test_continuous_amplitude_of_zero_signal(grid):
    assert continuous_amplitude(Signal.zeros(grid), 0.0) == 0


def test_continuous_amplitude_grid_refinement(two_sech):
    fine = sech_pulse(2.0, TimeGrid.symmetric(16.0, 4096))
    a, b = continuous_amplitude(two_sech, 0.5), continuous_amplitude(fine, 0.5)
    assert abs(a - b) < 1e-3


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
def test_small_signal_limit_is_linear_fourier_transform(grid, lam):
    # for small q, b/a ~ -conj(integral q exp(2j lam t) dt) = -0.1 pi sech(pi lam)
    q = sech_pulse(0.1, grid)
    expect = -0.1 * np.pi / np.cosh(np.pi * lam)
    assert abs(continuous_amplitude(q, lam) - expect) < 0.05 * abs(expect)


def test_continuous_amplitude_near_singular(grid):
    # 1.5 sech(t) has a zero of a exactly at lam = 0
    with pytest.raises(NearSingularError):
        continuous_amplitude(sech_pulse(1.5, grid), 0.0, tol=1e-3)


def test_continuous_amplitude_rejects_complex(two_sech):
    with pytest.raises(InvalidInputError):
        continuous_amplitude(two_sech, 0.5 + 0.1j)


# --------------------------------------------------------------------------
# eigenvalue search

@pytest.mark.parametrize("amp", [1.0, 2.0, 2.2, 3.0])
def test_sech_family(grid, amp):
    spec = find_discrete_eigenvalues(sech_pulse(amp, grid))
    expect = [(amp - 0.5 - k) * 1j for k in range(int(amp + 0.5)) if amp - 0.5 - k > 0]
    np.testing.assert_allclose(np.sort(spec.eigenvalues.imag), np.sort(np.imag(expect)),
                               atol=1e-3)
    assert np.all(np.abs(spec.eigenvalues.real) < 1e-3)


def test_subthreshold_pulse_has_no_eigenvalues(grid):
    q = sech_pulse(0.4, grid)
    assert find_discrete_eigenvalues(q).count == 0
    # brute force: |a| on a dense upper-half-plane grid stays well away from zero
    re, im = np.meshgrid(np.linspace(-2, 2, 81), np.linspace(0.02, 3, 60))
    assert np.min(np.abs(a_coefficient(q, re + 1j * im))) > 0.2


def test_low_confidence_flag(grid):
    spec = find_discrete_eigenvalues(sech_pulse(1.6, grid))
    np.testing.assert_allclose(spec.eigenvalues.imag, [0.1, 1.1], atol=1e-3)
    assert spec.low_confidence.tolist() == [True, False]
    assert spec.confident().count == 1


def test_close_eigenvalues_are_both_found():
    from nftnoise import SolitonPrescription, darboux_synthesize

    q = darboux_synthesize(SolitonPrescription.symmetric([0.8j, 0.85j]),
                           TimeGrid.symmetric(16.0, 2048))
    spec = find_discrete_eigenvalues(q)
    np.testing.assert_allclose(spec.eigenvalues.imag, [0.8, 0.85], atol=1e-3)


def test_discretizations_agree_on_eigenvalues(two_sech):
    fd = find_discrete_eigenvalues(two_sech, SearchConfig(method="forward_difference"))
    al = find_discrete_eigenvalues(two_sech, SearchConfig(method="ablowitz_ladik"))
    # both schemes are second order; agreement is at the discretization level
    np.testing.assert_allclose(fd.eigenvalues, al.eigenvalues, atol=1e-3)


def test_exhaustive_search_agrees(two_sech):
    fast = find_discrete_eigenvalues(two_sech)
    full = find_discrete_eigenvalues(two_sech, SearchConfig(exhaustive=True, spacing=0.25))
    np.testing.assert_allclose(fast.eigenvalues, full.eigenvalues, atol=1e-8)


def test_roots_are_polished_and_reported(two_sech):
    spec = find_discrete_eigenvalues(two_sech)
    for lam in spec.eigenvalues:
        assert abs(a_coefficient(two_sech, lam)) < 1e-9
    rep = spec.report
    assert rep.n_converged >= spec.count
    assert rep.n_seeds == rep.n_converged + rep.n_failed


def test_newton_reports_non_convergence(two_sech):
    roots, resid, status = newton_polish(two_sech, [0.5j, 1.5j],
                                         SearchConfig(max_iter=0, tol_root=1e-300))
    assert np.all(status == 1)


def test_spectrum_invariants():
    with pytest.raises(InvalidInputError):
        DiscreteSpectrum(np.array([0.5j, -0.1j]), np.array([1, 1]))
    s = DiscreteSpectrum(np.array([1.5j, 0.5j]), np.array([2.0, 1.0]))
    assert s.eigenvalues.imag.tolist() == [0.5, 1.5]
    assert s.amplitudes.tolist() == [1.0, 2.0]


def test_search_config_validation():
    with pytest.raises(InvalidInputError):
        SearchConfig(im_min=0.0)
    with pytest.raises(InvalidInputError):
        SearchConfig(spacing=-1)
    lat = SearchConfig().lattice()
    assert lat.shape == (30, 41)
    assert np.allclose(np.diff(lat[:, 0].imag), 0.1)

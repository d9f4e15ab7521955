"""Nonlinear Fourier transform toolkit and stochastic NLSE simulator for
studying correlated perturbations of discrete eigenvalues."""

__version__ = "0.1.0"

from .signals import Signal, TimeGrid, inner
from .nft import (ConvergenceReport, DiscreteSpectrum, ScatteringCoefficients, SearchConfig,
                  a_coefficient, a_derivative, continuous_amplitude, discrete_amplitude,
                  find_discrete_eigenvalues, scatter_ablowitz_ladik,
                  scatter_forward_difference)
from .solitons import (SolitonPrescription, darboux_synthesize, evolve_spectrum,
                       nonlinear_phase_difference, satsuma_yajima_prescription, sech_pulse)
from .fiber import (FiberSpec, NormalizationMap, PropagationConfig, denormalize, normalize,
                    propagate_with_taps, split_step_propagate)
from .noise import (GSelector, PointNoise, TransceiverNoiseSpec, accumulate_perturbations,
                    apply_transceiver_noise, decompose_noise, segment_scatter,
                    track_eigenvalues)
from .stats import Ensemble2D, covariance_summary, ml_classify, sample_correlation

"""Stochastic NLSE propagation and physical <-> normalized unit maps.

The normalized equation is ``j q_z = q_tt + 2|q|^2 q + j eps G(t, z)``.
Propagation uses symmetric split-step Fourier steps; after every step
circular complex white Gaussian noise is added in the frequency domain.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyWarning, InvalidInputError, NumericalBlowupError
from .signals import Signal, TimeGrid

PS2_PER_KM = 1e-24  # s^2/km
NONLINEAR_PHASE_LIMIT = 0.1


@dataclass(frozen=True)
class FiberSpec:
    """Physical fiber parameters.

    beta2 in s^2/km (anomalous: negative), gamma in 1/(W km), alpha in dB/km
    (bookkeeping only; propagation is lossless), length_km in km.
    """

    beta2: float
    gamma: float
    alpha: float = 0.0
    length_km: float = 1500.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise InvalidInputError("gamma must be positive")
        if not self.length_km > 0:
            raise InvalidInputError("length_km must be positive")
        if not self.beta2 < 0:
            raise InvalidInputError("beta2 must be negative (anomalous dispersion)")

    @classmethod
    def nz_dsf(cls, length_km: float = 1500.0) -> "FiberSpec":
        """The loop fiber of the recirculating experiment."""
        return cls(beta2=-5.01 * PS2_PER_KM, gamma=1.2, alpha=0.19, length_km=length_km)

    def normalization(self) -> "NormalizationMap":
        return NormalizationMap.from_fiber(self)


@dataclass(frozen=True)
class NormalizationMap:
    """Scales with ``q = A/sqrt(P)``, ``t = s/T``, ``z = l/L``."""

    power_scale: float
    time_scale: float
    distance_scale: float
    beta2: float = float("nan")
    gamma: float = float("nan")

    @classmethod
    def from_fiber(cls, fiber: FiberSpec) -> "NormalizationMap":
        L = fiber.length_km
        return cls(power_scale=2.0 / (fiber.gamma * L),
                   time_scale=float(np.sqrt(abs(fiber.beta2) * L / 2.0)),
                   distance_scale=L, beta2=fiber.beta2, gamma=fiber.gamma)

    def to_z(self, length_km):
        return np.asarray(length_km) / self.distance_scale

    def to_km(self, z):
        return np.asarray(z) * self.distance_scale

    def epsilon_from_kappa(self, kappa: float) -> float:
        """Normalized noise level with ``eps^2 = gamma / sqrt(2|beta2|) kappa^2``."""
        return float(np.sqrt(self.gamma / np.sqrt(2 * abs(self.beta2))) * kappa)


@dataclass(frozen=True, eq=False)
class PhysicalSignal:
    """Envelope ``A(s)`` in sqrt(W) on midpoints of ``n`` cells over ``[s_start, s_end]`` seconds."""

    s_start: float
    s_end: float
    samples: np.ndarray

    @property
    def s(self) -> np.ndarray:
        n = len(self.samples)
        ds = (self.s_end - self.s_start) / n
        return self.s_start + (np.arange(n) + 0.5) * ds


def normalize(physical: PhysicalSignal, fiber: FiberSpec) -> Signal:
    nm = NormalizationMap.from_fiber(fiber)
    grid = TimeGrid(physical.s_start / nm.time_scale, physical.s_end / nm.time_scale,
                    len(physical.samples))
    return Signal(grid, np.asarray(physical.samples, dtype=complex) / np.sqrt(nm.power_scale))


def denormalize(signal: Signal, fiber: FiberSpec) -> PhysicalSignal:
    nm = NormalizationMap.from_fiber(fiber)
    g = signal.grid
    return PhysicalSignal(g.t_start * nm.time_scale, g.t_end * nm.time_scale,
                          signal.samples * np.sqrt(nm.power_scale))


@dataclass(frozen=True)
class PropagationConfig:
    """Split-step settings.

    noise_sigma is the normalized noise level eps; each step of length h adds
    complex samples of variance ``eps^2 h / dt`` before the brick-wall filter
    that keeps the central ``noise_bandwidth`` fraction of the grid bandwidth.
    """

    n_steps: int
    noise_sigma: float = 0.0
    noise_bandwidth: float = 1.0
    rng_seed: int | None = None

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidInputError("n_steps must be a positive integer")
        if self.noise_sigma < 0:
            raise InvalidInputError("noise_sigma must be non-negative")
        if not 0 < self.noise_bandwidth <= 1:
            raise InvalidInputError("noise_bandwidth must be in (0, 1]")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.rng_seed)


def band_mask(grid: TimeGrid, bandwidth: float) -> np.ndarray:
    """FFT-ordered mask of the bins kept by an ideal low-pass of relative width ``bandwidth``."""
    if not 0 < bandwidth <= 1:
        raise InvalidInputError("bandwidth must be in (0, 1]")
    f = np.fft.fftfreq(grid.n_samples)  # cycles/sample in [-0.5, 0.5)
    return np.abs(f) <= 0.5 * bandwidth + 1e-12


def noise_spectrum(grid: TimeGrid, variance: float, mask: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    """FFT-domain white noise whose inverse FFT has per-sample variance
    ``variance`` before masking."""
    n = grid.n_samples
    kept = int(mask.sum())
    draw = rng.standard_normal((2, kept))
    spec = np.zeros(n, dtype=complex)
    spec[mask] = (draw[0] + 1j * draw[1]) * np.sqrt(variance * n / 2)
    return spec


def bandlimited_noise(grid: TimeGrid, variance: float, bandwidth: float,
                      rng: np.random.Generator) -> Signal:
    """Circular complex Gaussian noise, variance ``variance`` per sample
    before the brick-wall filter (``variance * kept_fraction`` after)."""
    if variance < 0:
        raise InvalidInputError("variance must be non-negative")
    mask = band_mask(grid, bandwidth)
    return Signal(grid, np.fft.ifft(noise_spectrum(grid, variance, mask, rng)))


def expected_noise_energy(grid: TimeGrid, z: float, config: PropagationConfig) -> float:
    """Mean energy injected over distance z: ``eps^2 z`` times the number of
    retained degrees of freedom (window duration x retained bandwidth)."""
    kept = int(band_mask(grid, config.noise_bandwidth).sum())
    return config.noise_sigma ** 2 * z * kept


def _propagate(signal: Signal, z: float, config: PropagationConfig, rng, tap_steps):
    if not z > 0:
        raise InvalidInputError("z must be positive")
    signal.check_finite()
    if rng is None:
        rng = config.rng()
    grid = signal.grid
    h = z / config.n_steps
    half = np.exp(0.5j * grid.omega ** 2 * h)
    noisy = config.noise_sigma > 0
    if noisy:
        mask = band_mask(grid, config.noise_bandwidth)
        variance = config.noise_sigma ** 2 * h / grid.dt
    q = np.array(signal.samples)
    taps = []
    warned = False
    fft, ifft = np.fft.fft, np.fft.ifft
    for step in range(1, config.n_steps + 1):
        q = ifft(half * fft(q))
        power = q.real ** 2 + q.imag ** 2
        if not warned and 2 * h * power.max() > NONLINEAR_PHASE_LIMIT:
            warnings.warn(f"nonlinear phase per step {2 * h * power.max():.3f} rad exceeds "
                          f"{NONLINEAR_PHASE_LIMIT}; increase n_steps", AccuracyWarning,
                          stacklevel=3)
            warned = True
        q = q * np.exp(-2j * power * h)
        spec = half * fft(q)
        if noisy:
            spec += noise_spectrum(grid, variance, mask, rng)
        q = ifft(spec)
        if step in tap_steps:
            taps.append(Signal(grid, q))
    if not np.all(np.isfinite(q)):
        raise NumericalBlowupError("split-step propagation produced non-finite samples")
    return Signal(grid, q), taps


def split_step_propagate(signal: Signal, z: float, config: PropagationConfig,
                         rng: np.random.Generator | None = None) -> Signal:
    """Propagate ``signal`` over normalized distance ``z``.

    ``rng`` defaults to a generator seeded from ``config.rng_seed``.
    """
    final, _ = _propagate(signal, z, config, rng, frozenset())
    return final


def propagate_with_taps(signal: Signal, z: float, config: PropagationConfig,
                        rng: np.random.Generator | None = None, taps=None):
    """Like :func:`split_step_propagate`, also returning the field at each tap.

    Tap distances must be multiples of the step ``z / n_steps``; a tap at 0
    returns the input.  Defaults to a single tap at ``z``.
    """
    taps = [z] if taps is None else list(taps)
    h = z / config.n_steps
    steps = []
    for tz in taps:
        k = tz / h
        if tz < 0 or tz > z * (1 + 1e-12) or abs(k - round(k)) > 1e-6:
            raise InvalidInputError(f"tap {tz} is not a step multiple in [0, {z}]")
        steps.append(int(round(k)))
    final, fields = _propagate(signal, z, config, rng, frozenset(s for s in steps if s > 0))
    by_step = dict(zip(sorted(s for s in set(steps) if s > 0), fields))
    by_step[0] = signal
    return final, [by_step[s] for s in steps]


def steps_for(signal: Signal, z: float, peak_power: float | None = None,
              limit: float = NONLINEAR_PHASE_LIMIT, minimum: int = 1) -> int:
    """Smallest step count keeping ``2 |q|^2 h`` under ``limit``.

    Multi-solitons breathe, so pass ``peak_power`` when the launch peak
    underestimates the maximum along the fiber.
    """
    p = float(np.max(np.abs(signal.samples)) ** 2) if peak_power is None else peak_power
    return max(minimum, int(np.ceil(2 * p * z / limit)))

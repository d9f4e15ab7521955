"""Time grids and sampled complex envelopes in normalized units."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of ``n_samples`` cells covering ``[t_start, t_end]``.

    Samples sit at cell midpoints, ``t_k = t_start + (k + 1/2) * dt`` with
    ``dt = (t_end - t_start) / n_samples``, so the piecewise-constant
    scattering recursion is second-order accurate.
    """

    t_start: float
    t_end: float
    n_samples: int

    def __post_init__(self):
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)):
            raise InvalidInputError("grid bounds must be finite")
        if not self.t_end > self.t_start:
            raise InvalidInputError("t_end must exceed t_start")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise InvalidInputError("n_samples must be an integer >= 2")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @classmethod
    def symmetric(cls, half_width: float = 16.0, n_samples: int = 2048) -> "TimeGrid":
        return cls(-float(half_width), float(half_width), n_samples)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.n_samples

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @property
    def t(self) -> np.ndarray:
        return self.t_start + (np.arange(self.n_samples) + 0.5) * self.dt

    @property
    def omega(self) -> np.ndarray:
        """Angular frequencies in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n_samples, self.dt)

    def refined(self, factor: int) -> "TimeGrid":
        return TimeGrid(self.t_start, self.t_end, self.n_samples * int(factor))


@dataclass(frozen=True, eq=False)
class Signal:
    """Normalized complex envelope ``q(t)`` sampled on a :class:`TimeGrid`."""

    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if s.ndim != 1 or s.size != self.grid.n_samples:
            raise InvalidInputError(
                f"expected {self.grid.n_samples} samples, got shape {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def zeros(cls, grid: TimeGrid) -> "Signal":
        return cls(grid, np.zeros(grid.n_samples, dtype=complex))

    @classmethod
    def from_function(cls, func, grid: TimeGrid) -> "Signal":
        return cls(grid, func(grid.t))

    @property
    def t(self) -> np.ndarray:
        return self.grid.t

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.samples)))

    def check_finite(self) -> None:
        if not self.is_finite():
            raise InvalidInputError("signal contains non-finite samples")

    def energy(self) -> float:
        """Trapezoidal estimate of the integral of ``|q|^2``."""
        return float(np.trapezoid(np.abs(self.samples) ** 2, dx=self.grid.dt))

    def edge_magnitude(self) -> float:
        return float(max(abs(self.samples[0]), abs(self.samples[-1])))

    def with_samples(self, samples) -> "Signal":
        return Signal(self.grid, samples)

    def __add__(self, other):
        if isinstance(other, Signal):
            _same_grid(self, other)
            return Signal(self.grid, self.samples + other.samples)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Signal):
            _same_grid(self, other)
            return Signal(self.grid, self.samples - other.samples)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return Signal(self.grid, self.samples * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return (f"Signal(grid={self.grid!r}, energy={self.energy():.6g}, "
                f"peak={np.max(np.abs(self.samples)):.6g})")


def _same_grid(a: Signal, b: Signal) -> None:
    if a.grid != b.grid:
        raise InvalidInputError("signals live on different grids")


def inner(a: Signal, b: Signal) -> complex:
    """Discrete L2 inner product ``sum(a * conj(b)) * dt``."""
    _same_grid(a, b)
    return complex(np.vdot(b.samples, a.samples) * a.grid.dt)

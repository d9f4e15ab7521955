"""Multi-soliton synthesis and analytic evolution of discrete spectra."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (ComplexPhaseWarning, IllConditionedPrescriptionError,
                     InvalidInputError, TailLeakWarning)
from .nft import DiscreteSpectrum
from .signals import Signal, TimeGrid

COLLISION_THRESHOLD = 1e-3
TAIL_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class SolitonPrescription:
    """Eigenvalues in the upper half plane with their discrete amplitudes
    ``Q = b / a'`` (the same convention :func:`nft.discrete_amplitude`
    returns)."""

    eigenvalues: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=complex))
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if lam.shape != amp.shape or lam.ndim != 1:
            raise InvalidInputError("eigenvalues and amplitudes must be equal-length vectors")
        if np.any(lam.imag <= 0):
            raise InvalidInputError("eigenvalues must lie in the upper half plane")
        if np.any(amp == 0) or not np.all(np.isfinite(amp)):
            raise InvalidInputError("amplitudes must be finite and nonzero")
        sep = np.abs(lam[:, None] - lam[None, :])
        np.fill_diagonal(sep, np.inf)
        if lam.size > 1 and sep.min() <= COLLISION_THRESHOLD:
            raise IllConditionedPrescriptionError(
                f"eigenvalues closer than {COLLISION_THRESHOLD:g}: {lam}")
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_norming(cls, eigenvalues, b) -> "SolitonPrescription":
        """Build from norming constants ``b(lam_k)`` instead of amplitudes."""
        lam = np.atleast_1d(np.asarray(eigenvalues, dtype=complex))
        b = np.broadcast_to(np.asarray(b, dtype=complex), lam.shape)
        return cls(lam, b / reflectionless_a_derivative(lam))

    @classmethod
    def symmetric(cls, eigenvalues) -> "SolitonPrescription":
        """Alternating unit norming constants, ``b = ..., +1, -1`` ending with
        ``-1`` at the largest imaginary part.

        For eigenvalues ``0.5j, 1.5j, ..., (N - 1/2)j`` this is the
        Satsuma-Yajima pulse ``N sech(t)``; for any purely imaginary set it
        gives a real, even, zero-velocity pulse centred at ``t = 0``.
        """
        lam = np.atleast_1d(np.asarray(eigenvalues, dtype=complex))
        rank = np.empty(lam.size, dtype=int)
        rank[np.argsort(-lam.imag, kind="stable")] = np.arange(lam.size)
        b = np.where(rank % 2 == 0, -1.0, 1.0)
        return cls.from_norming(lam, b)

    @property
    def norming(self) -> np.ndarray:
        return self.amplitudes * reflectionless_a_derivative(self.eigenvalues)

    def to_spectrum(self) -> DiscreteSpectrum:
        return DiscreteSpectrum(self.eigenvalues, self.amplitudes)


def reflectionless_a_derivative(eigenvalues) -> np.ndarray:
    """``a'(lam_k)`` for ``a(lam) = prod (lam - lam_j) / (lam - conj(lam_j))``."""
    lam = np.atleast_1d(np.asarray(eigenvalues, dtype=complex))
    out = np.empty_like(lam)
    for k, lk in enumerate(lam):
        others = np.delete(lam, k)
        out[k] = np.prod((lk - others) / (lk - np.conj(others))) / (lk - np.conj(lk))
    return out


def satsuma_yajima_prescription(n: int) -> SolitonPrescription:
    """Spectrum of ``n * sech(t)``: eigenvalues ``(k - 1/2) j``, k = 1..n."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    return SolitonPrescription.symmetric(1j * (np.arange(n) + 0.5))


def darboux_synthesize(prescription: SolitonPrescription, grid: TimeGrid) -> Signal:
    """Multi-soliton with the prescribed discrete spectrum.

    Starts from ``q = 0`` and adds one eigenvalue per Darboux step.  The seed
    eigenvectors are ``(exp(-j lam t), -b exp(j lam t))``; each step maps
    the remaining ones through ``lam I - S diag(lam_k, conj(lam_k)) S^-1``.
    """
    t = grid.t
    lam = prescription.eigenvalues
    b = prescription.norming
    phi1 = np.exp(-1j * lam[:, None] * t[None, :])
    phi2 = -b[:, None] * np.exp(1j * lam[:, None] * t[None, :])
    q = np.zeros(t.size, dtype=complex)
    for k, lk in enumerate(lam):
        p1, p2 = phi1[k], phi2[k]
        norm = np.abs(p1) ** 2 + np.abs(p2) ** 2
        gap = lk - np.conj(lk)
        q = q - 2j * gap * p1 * np.conj(p2) / norm
        if k + 1 == lam.size:
            break
        s11 = (lk * np.abs(p1) ** 2 + np.conj(lk) * np.abs(p2) ** 2) / norm
        s22 = (np.conj(lk) * np.abs(p1) ** 2 + lk * np.abs(p2) ** 2) / norm
        s12 = gap * p1 * np.conj(p2) / norm
        s21 = gap * np.conj(p1) * p2 / norm
        rest1, rest2 = phi1[k + 1:], phi2[k + 1:]
        lj = lam[k + 1:, None]
        new1 = (lj - s11) * rest1 - s12 * rest2
        new2 = -s21 * rest1 + (lj - s22) * rest2
        # rescale each eigenvector row; only its direction matters
        scale = np.max(np.abs(np.concatenate([new1, new2], axis=1)), axis=1, keepdims=True)
        phi1[k + 1:], phi2[k + 1:] = new1 / scale, new2 / scale
    if not np.all(np.isfinite(q)):
        raise IllConditionedPrescriptionError("Darboux recursion overflowed; widen or "
                                              "shift the window")
    signal = Signal(grid, q)
    if signal.edge_magnitude() > TAIL_TOLERANCE:
        warnings.warn(f"pulse edge magnitude {signal.edge_magnitude():.2e} exceeds "
                      f"{TAIL_TOLERANCE:g}; widen the window", TailLeakWarning, stacklevel=2)
    return signal


def sech_pulse(amplitude: float, grid: TimeGrid) -> Signal:
    """``A sech(t)``; its eigenvalues are ``(A - 1/2 - k) j`` for ``A - 1/2 - k > 0``."""
    if not amplitude > 0:
        raise InvalidInputError("amplitude must be positive")
    return Signal(grid, amplitude / np.cosh(grid.t))


def sech_eigenvalues(amplitude: float) -> np.ndarray:
    """Analytic discrete spectrum of ``A sech(t)``, ascending imaginary part."""
    k = np.arange(int(np.ceil(amplitude + 0.5)))
    im = amplitude - 0.5 - k
    return np.sort(1j * im[im > 0])


def channel_gain(eigenvalues, z: float) -> np.ndarray:
    return np.exp(-4j * np.asarray(eigenvalues, dtype=complex) ** 2 * z)


def evolve_spectrum(spectrum: DiscreteSpectrum, z: float) -> DiscreteSpectrum:
    """Noiseless evolution ``Q(lam_k, z) = Q(lam_k, 0) exp(-4j lam_k^2 z)``."""
    if z < 0:
        raise InvalidInputError("z must be non-negative")
    return DiscreteSpectrum(spectrum.eigenvalues,
                            spectrum.amplitudes * channel_gain(spectrum.eigenvalues, z),
                            spectrum.low_confidence, spectrum.report)


def nonlinear_phase_difference(lambda1: complex, lambda2: complex, z: float):
    """``4 z (lambda1^2 - lambda2^2)``.

    Real for purely imaginary eigenvalues.  Otherwise a
    :class:`ComplexPhaseWarning` is issued and the complex value returned.
    """
    if z < 0:
        raise InvalidInputError("z must be non-negative")
    value = 4 * z * (complex(lambda1) ** 2 - complex(lambda2) ** 2)
    if complex(lambda1).real != 0 or complex(lambda2).real != 0:
        warnings.warn("eigenvalues are not purely imaginary; phase difference is complex",
                      ComplexPhaseWarning, stacklevel=2)
        return value
    return value.real

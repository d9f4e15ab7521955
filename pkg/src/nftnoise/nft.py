"""Forward nonlinear Fourier transform of sampled signals.

The Zakharov-Shabat problem ``v_t = [[-j*lam, q], [-conj(q), j*lam]] v`` is
solved with the left boundary condition ``v -> (1, 0) exp(-j*lam*t)`` and the
scattering data are read off at the right edge of the window.  Two
discretizations are offered:

``forward_difference``
    Exact transfer matrix of each piecewise-constant cell, i.e. the
    forward recursion ``v_{n+1} = exp(dt*M(lam, q_n)) v_n``.  Second order
    with midpoint samples and exactly unitary on the real axis.
``ablowitz_ladik``
    The normalized Ablowitz-Ladik transfer matrix.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (DegenerateRootError, InvalidInputError, NearSingularError,
                     ScatteringRangeError)
from .signals import Signal

METHODS = {
    "forward_difference": _kernels.FORWARD_DIFFERENCE,
    "fd": _kernels.FORWARD_DIFFERENCE,
    "ablowitz_ladik": _kernels.ABLOWITZ_LADIK,
    "al": _kernels.ABLOWITZ_LADIK,
}

DERIVATIVE_STEP = 1e-6


@dataclass(frozen=True)
class ScatteringCoefficients:
    lam: complex
    a: complex
    b: complex

    def unitarity_defect(self) -> float:
        """``| |a|^2 + |b|^2 - 1 |``; meaningful for real ``lam`` only."""
        return abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0)


@dataclass(frozen=True)
class SearchConfig:
    """Seed lattice and Newton settings for the discrete-eigenvalue search."""

    re_min: float = -2.0
    re_max: float = 2.0
    im_min: float = 0.05
    im_max: float = 3.0
    spacing: float = 0.1
    max_iter: int = 50
    tol_root: float = 1e-9
    dedup_radius: float = 1e-4
    low_confidence_im: float = 0.15
    method: str = "forward_difference"
    exhaustive: bool = False

    def __post_init__(self):
        if not self.im_min > 0:
            raise InvalidInputError("search box must lie in the upper half plane")
        if self.re_max <= self.re_min or self.im_max <= self.im_min:
            raise InvalidInputError("empty search box")
        if self.spacing <= 0:
            raise InvalidInputError("lattice spacing must be positive")
        _method_code(self.method)

    def lattice(self) -> np.ndarray:
        """Seed lattice as a 2-D array indexed ``[imag, real]``."""
        nr = int(np.floor((self.re_max - self.re_min) / self.spacing + 1e-9)) + 1
        ni = int(np.floor((self.im_max - self.im_min) / self.spacing + 1e-9)) + 1
        re = self.re_min + self.spacing * np.arange(nr)
        im = self.im_min + self.spacing * np.arange(ni)
        return re[None, :] + 1j * im[:, None]

    def contains(self, lam: complex, margin: float = 0.0) -> bool:
        return (self.re_min - margin <= lam.real <= self.re_max + margin
                and self.im_min - margin <= lam.imag <= self.im_max + margin)


@dataclass(frozen=True)
class ConvergenceReport:
    n_seeds: int
    n_converged: int
    n_failed: int
    n_rejected: int = 0
    failed_seeds: tuple = ()

    @property
    def complete(self) -> bool:
        return self.n_failed == 0


@dataclass(frozen=True, eq=False)
class DiscreteSpectrum:
    """Discrete eigenvalues (ascending imaginary part) and their amplitudes."""

    eigenvalues: np.ndarray
    amplitudes: np.ndarray
    low_confidence: np.ndarray = None
    report: ConvergenceReport | None = field(default=None, compare=False)

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=complex))
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex))
        if lam.shape != amp.shape:
            raise InvalidInputError("eigenvalues and amplitudes differ in length")
        if np.any(lam.imag <= 0):
            raise InvalidInputError("eigenvalues must lie in the upper half plane")
        order = np.argsort(lam.imag, kind="stable")
        flags = (np.zeros(lam.size, bool) if self.low_confidence is None
                 else np.atleast_1d(np.asarray(self.low_confidence, bool)))
        object.__setattr__(self, "eigenvalues", lam[order])
        object.__setattr__(self, "amplitudes", amp[order])
        object.__setattr__(self, "low_confidence", flags[order])

    def __len__(self):
        return self.eigenvalues.size

    @property
    def count(self) -> int:
        return self.eigenvalues.size

    def confident(self) -> "DiscreteSpectrum":
        keep = ~self.low_confidence
        return DiscreteSpectrum(self.eigenvalues[keep], self.amplitudes[keep],
                                self.low_confidence[keep], self.report)


def _method_code(method: str) -> int:
    try:
        return METHODS[method]
    except KeyError:
        raise InvalidInputError(f"unknown scattering method {method!r}") from None


def _check_lambda(lam) -> complex:
    lam = complex(lam)
    if not np.isfinite(lam):
        raise InvalidInputError("lambda must be finite")
    if lam.imag < 0:
        raise InvalidInputError("lambda must satisfy Im(lambda) >= 0")
    return lam


def _scatter(signal: Signal, lam: complex, method: str) -> ScatteringCoefficients:
    signal.check_finite()
    lam = _check_lambda(lam)
    g = signal.grid
    a, b = _kernels.scatter(signal.samples, g.dt, g.t_start, lam, _method_code(method))
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ScatteringRangeError(
            f"scattering overflow at lambda={lam}; Im(lambda)*window too large")
    return ScatteringCoefficients(lam, complex(a), complex(b))


def scatter_forward_difference(signal: Signal, lam: complex) -> ScatteringCoefficients:
    """Scattering data ``a(lam), b(lam)`` from the exact-cell forward recursion."""
    return _scatter(signal, lam, "forward_difference")


def scatter_ablowitz_ladik(signal: Signal, lam: complex) -> ScatteringCoefficients:
    """Scattering data from the Ablowitz-Ladik discretization."""
    return _scatter(signal, lam, "ablowitz_ladik")


def scatter(signal: Signal, lam: complex, method: str = "forward_difference"):
    return _scatter(signal, lam, method)


def a_coefficient(signal: Signal, lam, method: str = "forward_difference"):
    """``a(lam)`` for a scalar or an array of spectral parameters."""
    signal.check_finite()
    lams = np.atleast_1d(np.asarray(lam, dtype=complex))
    g = signal.grid
    out = _kernels.a_many(signal.samples, g.dt, lams.ravel(), _method_code(method))
    out = out.reshape(lams.shape)
    return complex(out[0]) if np.ndim(lam) == 0 else out


def a_derivative(signal: Signal, lam: complex, method: str = "forward_difference",
                 step: float | None = None) -> complex:
    """Central-difference estimate of ``da/dlam``.

    The default step is ``1e-6 * (1 + |lam|)``.  Raises
    :class:`DegenerateRootError` when the difference quotient is at the
    round-off floor, which is what a multiple zero (or a constant ``a``)
    looks like numerically.
    """
    lam = _check_lambda(lam)
    h = DERIVATIVE_STEP * (1 + abs(lam)) if step is None else float(step)
    vals = a_coefficient(signal, np.array([lam + h, lam - h, lam]), method)
    if not np.all(np.isfinite(vals)):
        raise ScatteringRangeError(f"scattering overflow near lambda={lam}")
    deriv = (vals[0] - vals[1]) / (2 * h)
    floor = 1e4 * np.finfo(float).eps * max(1.0, abs(vals[2])) / h
    if abs(deriv) < floor:
        raise DegenerateRootError(
            f"|a'({lam})| = {abs(deriv):.3g} is below the round-off floor {floor:.3g}")
    return complex(deriv)


def norming_coefficient(signal: Signal, lam_k: complex,
                        method: str = "forward_difference") -> complex:
    """``b(lam_k)`` at a discrete eigenvalue, computed bidirectionally.

    The left Jost solution is swept forward and the right one
    (``(0, 1) exp(j*lam*t)`` at the right edge) backward to the peak of
    ``|q|``; at an eigenvalue they are proportional with ratio ``b``.  A single
    forward sweep loses this ratio to cancellation once ``Im(lam)`` times the
    window is large.
    """
    signal.check_finite()
    lam = _check_lambda(lam_k)
    code = _method_code(method)
    g = signal.grid
    q = signal.samples
    m = int(np.argmax(np.abs(q)))
    l1, l2 = _kernels.sweep(q, g.dt, lam, 1.0 + 0j, 0j, 0, m, code)
    phase_l = np.exp(-1j * lam * g.t_start)
    r1, r2 = _kernels.sweep(q, -g.dt, lam, 0j, 1.0 + 0j, m, q.size, code)
    phase_r = np.exp(1j * lam * g.t_end)
    left = np.array([l1, l2]) * phase_l
    right = np.array([r1, r2]) * phase_r
    if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
        raise ScatteringRangeError(f"scattering overflow at lambda={lam}")
    denom = np.vdot(right, right)
    if denom == 0:
        raise ScatteringRangeError(f"right Jost solution underflowed at lambda={lam}")
    return complex(np.vdot(right, left) / denom)


def discrete_amplitude(signal: Signal, lam_k: complex,
                       method: str = "forward_difference") -> complex:
    """Discrete spectral amplitude ``b(lam_k) / a'(lam_k)``."""
    return norming_coefficient(signal, lam_k, method) / a_derivative(signal, lam_k, method)


def continuous_amplitude(signal: Signal, lam: float, method: str = "forward_difference",
                         tol: float = 1e-8) -> complex:
    """Continuous spectral amplitude ``b(lam) / a(lam)`` for real ``lam``."""
    if np.iscomplexobj(lam) and complex(lam).imag != 0:
        raise InvalidInputError("continuous spectrum is defined on the real axis only")
    sc = _scatter(signal, complex(float(np.real(lam)), 0.0), method)
    if abs(sc.a) < tol:
        raise NearSingularError(f"|a({lam})| = {abs(sc.a):.3g} < {tol:g}")
    return sc.b / sc.a


def newton_polish(signal: Signal, guesses, search: SearchConfig = SearchConfig()):
    """Newton-polish each guess; returns ``(roots, residuals, status)`` arrays.

    status is 0 for converged, 1 for max_iter reached, 2 for overflow or a
    vanishing derivative.
    """
    signal.check_finite()
    code = _method_code(search.method)
    q = signal.samples
    dt = signal.grid.dt
    guesses = np.atleast_1d(np.asarray(guesses, dtype=complex))
    roots = np.empty_like(guesses)
    resid = np.empty(guesses.size)
    status = np.empty(guesses.size, dtype=int)
    for i, g0 in enumerate(guesses):
        lam, res, _, st = _kernels.newton(q, dt, complex(g0), DERIVATIVE_STEP,
                                          search.tol_root, search.max_iter, code)
        roots[i], resid[i], status[i] = lam, res, st
    return roots, resid, status


def _lattice_minima(mag: np.ndarray) -> np.ndarray:
    """Boolean mask of lattice points not exceeded by any 8-neighbour."""
    padded = np.pad(mag, 1, constant_values=np.inf)
    mask = np.ones_like(mag, dtype=bool)
    ni, nr = mag.shape
    for di in (-1, 0, 1):
        for dr in (-1, 0, 1):
            if di == 0 and dr == 0:
                continue
            nb = padded[1 + di:1 + di + ni, 1 + dr:1 + dr + nr]
            mask &= mag <= nb
    return mask


def _deflation_factor(lams: np.ndarray, roots) -> np.ndarray:
    f = np.ones(lams.shape, dtype=complex)
    for r in roots:
        f *= (lams - np.conj(r)) / (lams - r)
    return f


def find_discrete_eigenvalues(signal: Signal, search: SearchConfig = SearchConfig(),
                              with_amplitudes: bool = True,
                              max_rounds: int = 8) -> DiscreteSpectrum:
    """Locate the zeros of ``a`` in the search box.

    ``|a|`` is tabulated once on the seed lattice.  By the minimum-modulus
    principle zeros sit at local minima of ``|a|``, so Newton starts from the
    lattice-local minima.  Zeros closer together than the lattice can
    resolve share one minimum, so found roots are divided out of ``a``
    (``a * prod (lam - conj(r)) / (lam - r)``) and the minima of the
    deflated modulus, plus a small ring around each found root, seed
    further deflated Newton rounds until no new root appears.  ``search.exhaustive`` additionally starts plain Newton from
    every lattice point.  Converged roots are deduplicated, kept if inside
    the box padded by one spacing, and paired with discrete amplitudes.
    """
    signal.check_finite()
    code = _method_code(search.method)
    q, dt = signal.samples, signal.grid.dt
    lattice = search.lattice()
    vals = a_coefficient(signal, lattice, search.method)
    finite = np.isfinite(vals)
    mag = np.where(finite, np.abs(vals), np.inf)
    seeds = lattice.ravel() if search.exhaustive else lattice[_lattice_minima(mag) & finite]
    roots, resid, status = newton_polish(signal, seeds, search)
    n_seeds, n_ok = seeds.size, int(np.sum(status == 0))
    failed = list(seeds[status != 0])

    def accept(cands, res):
        kept, kres = list(found), list(found_res)
        rejected = 0
        for r, e in zip(cands, res):
            if not (r.imag > 0 and search.contains(r, search.spacing)):
                rejected += 1
                continue
            if all(abs(r - k) >= search.dedup_radius for k in kept):
                kept.append(r)
                kres.append(e)
        return kept, kres, rejected

    found, found_res = [], []
    found, found_res, n_rej = accept(roots[status == 0], resid[status == 0])
    for _ in range(max_rounds):
        if not found:
            break
        dmag = mag * np.abs(_deflation_factor(lattice, found))
        dmag = np.where(np.isfinite(dmag), dmag, np.inf)
        mins = lattice[_lattice_minima(dmag) & finite]
        ring = 0.5 * search.spacing * np.exp(0.5j * np.pi * np.arange(4))
        mins = np.concatenate([mins, (np.array(found)[:, None] + ring).ravel()])
        if mins.size == 0:
            break
        known = np.array(found, dtype=complex)
        new_r, new_e = [], []
        for s0 in mins:
            lam, res, _, st = _kernels.newton_deflated(q, dt, complex(s0), known, DERIVATIVE_STEP,
                                                       search.tol_root, search.max_iter, code)
            n_seeds += 1
            if st == 0:
                n_ok += 1
                new_r.append(lam)
                new_e.append(res)
            else:
                failed.append(s0)
        before = len(found)
        found, found_res, rej = accept(new_r, new_e)
        n_rej += rej
        if len(found) == before:
            break
    roots = np.array(found, dtype=complex)
    report = ConvergenceReport(n_seeds=int(n_seeds), n_converged=int(n_ok),
                               n_failed=int(n_seeds - n_ok), n_rejected=int(n_rej),
                               failed_seeds=tuple(complex(s) for s in failed))
    if with_amplitudes:
        amps = np.empty(roots.size, dtype=complex)
        for i, r in enumerate(roots):
            try:
                amps[i] = discrete_amplitude(signal, r, search.method)
            except (DegenerateRootError, ScatteringRangeError) as exc:
                warnings.warn(f"amplitude at {r} unavailable: {exc}", RuntimeWarning)
                amps[i] = np.nan
    else:
        amps = np.full(roots.size, np.nan + 0j)
    return DiscreteSpectrum(roots, amps, roots.imag < search.low_confidence_im, report)

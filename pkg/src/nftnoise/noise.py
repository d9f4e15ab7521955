"""Layered eigenvalue-perturbation model.

* per-segment decoupling: the end-to-end perturbation of ``g(eigenvalues)``
  is approximated by the sum of perturbations from adding each segment's
  noise to the *noiseless* field at that segment;
* scaling/residual decomposition of a noise realization;
* transceiver noise of the form
  ``[A0 + A(t)] q exp(2 pi j [B0 + B(t)]) + C0 + C(t)``;
* linearity of perturbations from two point noises.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fiber
from .errors import (ExcessiveExclusionError, InvalidInputError, ProjectionError,
                     TrackingError)
from .nft import SearchConfig, find_discrete_eigenvalues, newton_polish
from .parallel import ensemble_map
from .signals import Signal, inner

AMBIGUITY_RATIO = 0.8
MAX_EXCLUDED_FRACTION = 0.05


# --------------------------------------------------------------------------
# g selectors

G_KINDS = ("per-eigenvalue-imag", "min-imag", "max-imag", "sum-imag")


@dataclass(frozen=True)
class GSelector:
    """Function of an eigenvalue set used to summarize perturbations."""

    kind: str = "per-eigenvalue-imag"

    def __post_init__(self):
        if self.kind not in G_KINDS:
            raise InvalidInputError(f"unknown g selector {self.kind!r}; choose from {G_KINDS}")

    def dimension(self, n_eigenvalues: int) -> int:
        return n_eigenvalues if self.kind == "per-eigenvalue-imag" else 1

    def __call__(self, eigenvalues) -> np.ndarray:
        im = np.asarray(eigenvalues, dtype=complex).imag
        if self.kind == "per-eigenvalue-imag":
            return np.array(im, dtype=float)
        if im.size == 0:
            return np.array([0.0 if self.kind == "sum-imag" else np.nan])
        reducer = {"min-imag": np.min, "max-imag": np.max, "sum-imag": np.sum}[self.kind]
        return np.array([reducer(im)])


@dataclass(frozen=True)
class PerturbationSample:
    segment_index: int
    g_value: np.ndarray
    epsilon_m: np.ndarray

    @classmethod
    def from_values(cls, m: int, g_value, g_reference) -> "PerturbationSample":
        g_value = np.asarray(g_value, dtype=float)
        return cls(m, g_value, g_value - np.asarray(g_reference, dtype=float))


# --------------------------------------------------------------------------
# eigenvalue tracking

@dataclass(frozen=True)
class TrackResult:
    eigenvalues: np.ndarray
    ok: bool
    reason: str = ""


def track_eigenvalues(signal: Signal, reference, search: SearchConfig = SearchConfig(),
                      ambiguity: float = AMBIGUITY_RATIO) -> TrackResult:
    """Follow each reference eigenvalue to the nearby zero of ``a``.

    Newton starts from every reference eigenvalue.  The run fails (``ok``
    False) when a start does not converge, leaves the upper half plane, two
    starts land on the same zero, or a zero's nearest reference is not its
    own / is ambiguous (best/second-best distance ratio above ``ambiguity``).
    Eigenvalues are returned in reference order.
    """
    reference = np.atleast_1d(np.asarray(reference, dtype=complex))
    if reference.size == 0:
        return TrackResult(reference.copy(), True)
    roots, _, status = newton_polish(signal, reference, search)
    if np.any(status != 0):
        return TrackResult(roots, False, "newton did not converge")
    if np.any(roots.imag <= 0):
        return TrackResult(roots, False, "eigenvalue left the upper half plane")
    if reference.size > 1:
        d = np.abs(roots[:, None] - roots[None, :]) + np.eye(roots.size) * 1e300
        if d.min() < search.dedup_radius:
            return TrackResult(roots, False, "eigenvalue count changed (merged roots)")
        dist = np.abs(roots[:, None] - reference[None, :])
        if np.any(np.argmin(dist, axis=1) != np.arange(roots.size)):
            return TrackResult(roots, False, "eigenvalues swapped order")
        srt = np.sort(dist, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(srt[:, 1] > 0, srt[:, 0] / srt[:, 1], 0.0)
        if np.any(ratio > ambiguity):
            return TrackResult(roots, False, "ambiguous eigenvalue association")
    return TrackResult(roots, True)


@dataclass
class ExclusionAudit:
    total: int = 0
    excluded: int = 0
    reasons: dict = field(default_factory=dict)

    def record(self, result: TrackResult) -> None:
        self.total += 1
        if not result.ok:
            self.excluded += 1
            self.reasons[result.reason] = self.reasons.get(result.reason, 0) + 1

    def merge(self, other: "ExclusionAudit") -> None:
        self.total += other.total
        self.excluded += other.excluded
        for k, v in other.reasons.items():
            self.reasons[k] = self.reasons.get(k, 0) + v

    @property
    def fraction(self) -> float:
        return self.excluded / self.total if self.total else 0.0

    def check(self, limit: float = MAX_EXCLUDED_FRACTION) -> None:
        if self.fraction > limit:
            raise ExcessiveExclusionError(
                f"{self.excluded}/{self.total} runs excluded ({self.reasons}); "
                f"limit is {limit:.0%}")

    def as_dict(self) -> dict:
        return {"total": self.total, "excluded": self.excluded,
                "fraction": self.fraction, "reasons": dict(self.reasons)}


def reference_eigenvalues(signal: Signal, search: SearchConfig = SearchConfig()) -> np.ndarray:
    """Full-search eigenvalues of a noiseless reference signal."""
    spec = find_discrete_eigenvalues(signal, search, with_amplitudes=False)
    if spec.count == 0:
        raise InvalidInputError("reference signal has no discrete eigenvalues")
    return spec.eigenvalues


# --------------------------------------------------------------------------
# noise generation and decomposition

@dataclass(frozen=True)
class PointNoise:
    """One segment's worth of band-limited AWGN: per-sample variance
    ``epsilon^2 * segment_length / dt`` before filtering."""

    epsilon: float
    segment_length: float
    bandwidth: float = 1.0

    def variance(self, dt: float) -> float:
        return self.epsilon ** 2 * self.segment_length / dt

    def draw(self, grid, rng: np.random.Generator) -> Signal:
        return fiber.bandlimited_noise(grid, self.variance(grid.dt), self.bandwidth, rng)


def decompose_noise(q: Signal, n: Signal):
    """Split ``n`` into its projection onto ``q`` (scaling noise) and the
    orthogonal residual."""
    qq = inner(q, q).real
    if qq <= 0:
        raise ProjectionError("cannot project onto a zero signal")
    coef = inner(n, q) / qq
    n1 = Signal(q.grid, coef * q.samples)
    n2 = Signal(q.grid, n.samples - n1.samples)
    return n1, n2


@dataclass(frozen=True)
class NoiseDescriptor:
    """Zero-mean band-limited Gaussian process with standard deviation ``sigma``."""

    sigma: float = 0.0
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.sigma < 0:
            raise InvalidInputError("sigma must be non-negative")
        if not 0 < self.bandwidth <= 1:
            raise InvalidInputError("bandwidth must be in (0, 1]")

    def draw_complex(self, grid, rng) -> np.ndarray:
        if self.sigma == 0:
            return np.zeros(grid.n_samples, dtype=complex)
        # normalize post-filter variance to sigma^2
        return fiber.bandlimited_noise(grid, self.sigma ** 2 / self.bandwidth,
                                       self.bandwidth, rng).samples

    def draw_real(self, grid, rng) -> np.ndarray:
        if self.sigma == 0:
            return np.zeros(grid.n_samples)
        return np.sqrt(2) * self.draw_complex(grid, rng).real


@dataclass(frozen=True)
class TransceiverNoiseSpec:
    A0: complex = 1.0
    A_t: NoiseDescriptor = NoiseDescriptor()
    B0: float = 0.0
    B_t: NoiseDescriptor = NoiseDescriptor()
    C0: complex = 0.0
    C_t: NoiseDescriptor = NoiseDescriptor()


def apply_transceiver_noise(q: Signal, spec: TransceiverNoiseSpec,
                            rng: np.random.Generator) -> Signal:
    """``[A0 + A(t)] q exp(2 pi j [B0 + B(t)]) + C0 + C(t)`` with fresh draws.

    Terms with zero sigma consume no random numbers and contribute exactly
    nothing, so ``A0 = 1`` alone returns the input samples unchanged.
    """
    g = q.grid
    out = q.samples
    if spec.A0 != 1 or spec.A_t.sigma > 0:
        out = (spec.A0 + spec.A_t.draw_complex(g, rng)) * out
    if spec.B0 != 0 or spec.B_t.sigma > 0:
        out = out * np.exp(2j * np.pi * (spec.B0 + spec.B_t.draw_real(g, rng)))
    if spec.C0 != 0 or spec.C_t.sigma > 0:
        out = out + (spec.C0 + spec.C_t.draw_complex(g, rng))
    return Signal(g, out)


# --------------------------------------------------------------------------
# segment model

def noiseless_segments(q0: Signal, segment_length: float, n_segments: int,
                       steps_per_segment: int):
    """``[q0, qbar_1, ..., qbar_M]`` propagated segment by segment without noise.

    Uses the same per-segment call as the noisy direct path so both see
    identical arithmetic when the noise is zero.
    """
    cfg = fiber.PropagationConfig(n_steps=steps_per_segment)
    fields = [q0]
    q = q0
    for _ in range(n_segments):
        q = fiber.split_step_propagate(q, segment_length, cfg)
        fields.append(q)
    return fields


@dataclass
class AccumulationResult:
    """Paired ensembles of g at every segment boundary.

    ``approx`` and ``direct`` have shape ``(runs, M, dim)`` and hold
    ``g(Lambda_0) + accumulated perturbation``; excluded runs are dropped.
    """

    approx: np.ndarray
    direct: np.ndarray
    g_reference: np.ndarray
    reference: np.ndarray
    taps: np.ndarray
    audit: ExclusionAudit


def _accumulate_run(rng, qbar, ref_eigs, noise, g, search, steps_per_segment, segment_length):
    M = len(qbar) - 1
    grid = qbar[0].grid
    # drift-free baselines: numerical eigenvalues of each noiseless tap
    cfg = fiber.PropagationConfig(n_steps=steps_per_segment)
    approx = np.empty((M, g.dimension(ref_eigs[0].size)))
    direct = np.empty_like(approx)
    audit = ExclusionAudit()
    acc = np.zeros(approx.shape[1])
    q = qbar[0]
    ok = True
    for m in range(1, M + 1):
        n_m = noise.draw(grid, rng)
        hat = track_eigenvalues(qbar[m] + n_m, ref_eigs[m], search)
        q = fiber.split_step_propagate(q, segment_length, cfg) + n_m
        dirr = track_eigenvalues(q, ref_eigs[m], search)
        ok = ok and hat.ok and dirr.ok
        if not ok:
            audit.record(hat if not hat.ok else dirr)
            return None, None, audit
        acc += g(hat.eigenvalues) - g(ref_eigs[m])
        approx[m - 1] = acc
        direct[m - 1] = g(dirr.eigenvalues) - g(ref_eigs[m])
    audit.record(TrackResult(np.empty(0), True))
    return approx, direct, audit


def accumulate_perturbations(q0: Signal, z_total: float, M: int, g: GSelector,
                             noise: PointNoise, master_seed: int, runs: int, *,
                             steps_per_segment: int | None = None,
                             search: SearchConfig = SearchConfig(), workers: int = 1,
                             max_excluded: float = MAX_EXCLUDED_FRACTION) -> AccumulationResult:
    """Direct versus decoupled (summed per-segment) eigenvalue perturbations.

    The fiber is cut into ``M`` segments of length ``z_total / M``.  In each
    run, segment noises ``n_1..n_M`` are drawn once and used by both paths:

    * direct: ``q_m = SSF(q_{m-1}) + n_m`` and ``g`` of its eigenvalues;
    * approx: ``g(Lambda_0) + sum_l [g(eig(qbar_l + n_l)) - g(Lambda_0)]``.

    Perturbations are measured against the numerically computed eigenvalues
    of each noiseless ``qbar_m`` (equal to ``Lambda_0`` up to discretization
    error), so with zero noise both columns equal ``g(Lambda_0)`` exactly.
    """
    if M < 1:
        raise InvalidInputError("M must be >= 1")
    seg = z_total / M
    if steps_per_segment is None:
        steps_per_segment = fiber.steps_for(q0, seg, peak_power=4 * np.max(np.abs(q0.samples)) ** 2)
    qbar = noiseless_segments(q0, seg, M, steps_per_segment)
    lam0 = reference_eigenvalues(q0, search)
    ref_eigs = [lam0] + [track_eigenvalues(qb, lam0, search).eigenvalues for qb in qbar[1:]]
    g0 = g(lam0)
    out = ensemble_map(_accumulate_run, runs, master_seed, workers=workers,
                       args=(qbar, ref_eigs, noise, g, search, steps_per_segment, seg))
    audit = ExclusionAudit()
    approx, direct = [], []
    for a, d, au in out:
        audit.merge(au)
        if a is not None:
            approx.append(g0 + a)
            direct.append(g0 + d)
    audit.check(max_excluded)
    dim = g.dimension(lam0.size)
    return AccumulationResult(np.reshape(approx, (-1, M, dim)), np.reshape(direct, (-1, M, dim)),
                              g0, lam0, seg * np.arange(1, M + 1), audit)


# --------------------------------------------------------------------------
# point-noise ensembles

def _point_run(rng, fields, refs, noise, search):
    eigs, audit = [], ExclusionAudit()
    for qb, ref in zip(fields, refs):
        res = track_eigenvalues(qb + noise.draw(qb.grid, rng), ref, search)
        audit.record(res)
        eigs.append(res.eigenvalues if res.ok else np.full(ref.size, np.nan + 0j))
    return np.array(eigs), audit


@dataclass
class SegmentScatter:
    """Per-tap ensembles of perturbed eigenvalues, shape ``(taps, runs, N)``;
    excluded runs hold NaN."""

    taps: np.ndarray
    eigenvalues: np.ndarray
    reference: np.ndarray
    audit: ExclusionAudit

    def tap(self, i: int) -> np.ndarray:
        e = self.eigenvalues[i]
        return e[np.all(np.isfinite(e), axis=1)]


def segment_scatter(q0: Signal, taps, noise: PointNoise, master_seed: int, runs: int, *,
                    n_steps_per_unit: int | None = None, search: SearchConfig = SearchConfig(),
                    workers: int = 1, max_excluded: float = MAX_EXCLUDED_FRACTION) -> SegmentScatter:
    """Eigenvalues of ``qbar(z_m) + n`` for fresh point noise ``n`` at each tap."""
    taps = np.asarray(taps, dtype=float)
    if n_steps_per_unit is None:
        n_steps_per_unit = fiber.steps_for(q0, 1.0, peak_power=4 * np.max(np.abs(q0.samples)) ** 2)
    fields_by_tap = noiseless_fields(q0, taps, n_steps_per_unit)
    fields = [fields_by_tap[float(t)] for t in taps]
    lam0 = reference_eigenvalues(q0, search)
    refs = [track_eigenvalues(f, lam0, search).eigenvalues for f in fields]
    out = ensemble_map(_point_run, runs, master_seed, workers=workers,
                       args=(fields, refs, noise, search))
    audit = ExclusionAudit()
    for _, au in out:
        audit.merge(au)
    audit.check(max_excluded)
    eigs = np.stack([e for e, _ in out], axis=1)
    return SegmentScatter(taps, eigs, lam0, audit)


def noiseless_fields(q0: Signal, taps, n_steps_per_unit: int) -> dict:
    """Noiseless field at each distinct tap, propagating tap to tap."""
    out = {0.0: q0}
    q, z_prev = q0, 0.0
    for tz in sorted(set(float(t) for t in taps if t > 0)):
        n = max(1, int(np.ceil((tz - z_prev) * n_steps_per_unit)))
        q = fiber.split_step_propagate(q, tz - z_prev, fiber.PropagationConfig(n_steps=n))
        out[tz] = q
        z_prev = tz
    return out


@dataclass
class LinearityResult:
    """``lhs = g(L3) - g(L0)`` versus ``rhs = g(L1) + g(L2) - 2 g(L0)``."""

    lhs: np.ndarray
    rhs: np.ndarray
    audit: ExclusionAudit

    def correlation(self) -> float:
        from .stats import sample_correlation

        return sample_correlation(np.column_stack([self.lhs[:, 0], self.rhs[:, 0]]))


def _linearity_run(rng, q0, lam0, g, noise, search):
    n1 = noise.draw(q0.grid, rng)
    n2 = noise.draw(q0.grid, rng)
    res = [track_eigenvalues(s, lam0, search) for s in (q0 + n1, q0 + n2, q0 + n1 + n2)]
    audit = ExclusionAudit()
    bad = [r for r in res if not r.ok]
    audit.record(bad[0] if bad else res[0])
    if bad:
        return None, None, audit
    g0 = g(lam0)
    g1, g2, g3 = (g(r.eigenvalues) for r in res)
    return g3 - g0, g1 + g2 - 2 * g0, audit


def linearity_ensemble(q0: Signal, g: GSelector, noise: PointNoise, master_seed: int, runs: int,
                       *, search: SearchConfig = SearchConfig(), workers: int = 1,
                       max_excluded: float = MAX_EXCLUDED_FRACTION) -> LinearityResult:
    """Perturbations from two independent point noises, alone and together."""
    lam0 = reference_eigenvalues(q0, search)
    out = ensemble_map(_linearity_run, runs, master_seed, workers=workers,
                       args=(q0, lam0, g, noise, search))
    audit = ExclusionAudit()
    lhs, rhs = [], []
    for a, b, au in out:
        audit.merge(au)
        if a is not None:
            lhs.append(a)
            rhs.append(b)
    audit.check(max_excluded)
    return LinearityResult(np.array(lhs), np.array(rhs), audit)


@dataclass
class DecompositionResult:
    """g of ``q + n``, ``q + n1`` and ``q + n2`` per run (NaN when excluded)."""

    full: np.ndarray
    scaling: np.ndarray
    residual: np.ndarray
    reference: np.ndarray
    audit: ExclusionAudit

    def variances(self) -> dict:
        ok = np.all(np.isfinite(np.column_stack([self.full, self.scaling, self.residual])), axis=1)
        return {k: np.var(v[ok], axis=0, ddof=1)
                for k, v in (("full", self.full), ("scaling", self.scaling),
                             ("residual", self.residual))}


def _decomposition_run(rng, q, lam0, g, noise, search):
    n = noise.draw(q.grid, rng)
    n1, n2 = decompose_noise(q, n)
    res = [track_eigenvalues(s, lam0, search) for s in (q + n, q + n1, q + n2)]
    audit = ExclusionAudit()
    bad = [r for r in res if not r.ok]
    audit.record(bad[0] if bad else res[0])
    if bad:
        nan = np.full(g.dimension(lam0.size), np.nan)
        return nan, nan, nan, audit
    return (*(g(r.eigenvalues) for r in res), audit)


def decomposition_ensemble(q: Signal, g: GSelector, noise: PointNoise, master_seed: int,
                           runs: int, *, reference=None, search: SearchConfig = SearchConfig(),
                           workers: int = 1,
                           max_excluded: float = MAX_EXCLUDED_FRACTION) -> DecompositionResult:
    """Effect of the full noise and of its scaling/residual parts separately."""
    lam0 = reference_eigenvalues(q, search) if reference is None else np.asarray(reference)
    out = ensemble_map(_decomposition_run, runs, master_seed, workers=workers,
                       args=(q, lam0, g, noise, search))
    audit = ExclusionAudit()
    for *_, au in out:
        audit.merge(au)
    audit.check(max_excluded)
    full, sc, res = (np.array([o[i] for o in out]) for i in range(3))
    return DecompositionResult(full, sc, res, lam0, audit)


# --------------------------------------------------------------------------
# propagation and transceiver ensembles

@dataclass
class EigenvalueEnsemble:
    """Tracked eigenvalues per run, shape ``(runs, N)``; excluded runs hold NaN."""

    eigenvalues: np.ndarray
    reference: np.ndarray
    audit: ExclusionAudit

    @property
    def valid(self) -> np.ndarray:
        e = self.eigenvalues
        return e[np.all(np.isfinite(e), axis=1)]


def _tracked(res: TrackResult, n: int):
    audit = ExclusionAudit()
    audit.record(res)
    return (res.eigenvalues if res.ok else np.full(n, np.nan + 0j)), audit


def _collect(out, reference, max_excluded) -> EigenvalueEnsemble:
    audit = ExclusionAudit()
    for _, au in out:
        audit.merge(au)
    audit.check(max_excluded)
    eigs = np.array([e for e, _ in out]).reshape(len(out), reference.size)
    return EigenvalueEnsemble(eigs, reference, audit)


def _propagation_run(rng, q0, z, config, reference, search):
    q = fiber.split_step_propagate(q0, z, config, rng)
    return _tracked(track_eigenvalues(q, reference, search), reference.size)


def propagation_ensemble(q0: Signal, z: float, config: fiber.PropagationConfig,
                         master_seed: int, runs: int, *, stream: int = 0, reference=None,
                         search: SearchConfig = SearchConfig(), workers: int = 1,
                         max_excluded: float = MAX_EXCLUDED_FRACTION) -> EigenvalueEnsemble:
    """Eigenvalues after noisy propagation of ``q0`` over ``z``, one run per seed."""
    lam0 = reference_eigenvalues(q0, search) if reference is None else np.asarray(reference)
    out = ensemble_map(_propagation_run, runs, master_seed, stream=stream, workers=workers,
                       args=(q0, z, config, lam0, search))
    return _collect(out, lam0, max_excluded)


TRANSCEIVER_TERMS = ("A0", "A_t", "B0", "B_t", "C0", "C_t")


def single_term_spec(term: str, sigma: float, bandwidth: float,
                     rng: np.random.Generator) -> TransceiverNoiseSpec:
    """Spec with noise in one coefficient only.

    Constant terms get a fresh random value per call (``A0 = 1 + sigma*CN``,
    ``B0 = sigma*N``, ``C0 = sigma*CN``); time-varying terms get a
    band-limited process of standard deviation ``sigma``.
    """
    if term not in TRANSCEIVER_TERMS:
        raise InvalidInputError(f"unknown transceiver term {term!r}")
    cn = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
    if term == "A0":
        return TransceiverNoiseSpec(A0=1 + sigma * cn)
    if term == "B0":
        return TransceiverNoiseSpec(B0=float(sigma * cn.real * np.sqrt(2)))
    if term == "C0":
        return TransceiverNoiseSpec(C0=sigma * cn)
    return TransceiverNoiseSpec(**{term: NoiseDescriptor(sigma, bandwidth)})


def _transceiver_run(rng, q0, term, sigma, bandwidth, reference, search):
    spec = single_term_spec(term, sigma, bandwidth, rng)
    q = apply_transceiver_noise(q0, spec, rng)
    return _tracked(track_eigenvalues(q, reference, search), reference.size)


def transceiver_ensemble(q0: Signal, term: str, sigma: float, bandwidth: float,
                         master_seed: int, runs: int, *, reference=None,
                         search: SearchConfig = SearchConfig(), workers: int = 1,
                         max_excluded: float = MAX_EXCLUDED_FRACTION) -> EigenvalueEnsemble:
    """Eigenvalues of ``q0`` under noise in a single transceiver coefficient."""
    lam0 = reference_eigenvalues(q0, search) if reference is None else np.asarray(reference)
    stream = TRANSCEIVER_TERMS.index(term)
    out = ensemble_map(_transceiver_run, runs, master_seed, stream=stream, workers=workers,
                       args=(q0, term, sigma, bandwidth, lam0, search))
    return _collect(out, lam0, max_excluded)


def _transmitter_run(rng, q0, noise, z, config, reference, search):
    tx = q0 + noise.draw(q0.grid, rng)
    before = track_eigenvalues(tx, reference, search)
    after = track_eigenvalues(fiber.split_step_propagate(tx, z, config), reference, search)
    ok = before.ok and after.ok
    res = TrackResult(before.eigenvalues, ok, before.reason or after.reason)
    e0, audit = _tracked(res, reference.size)
    e1 = after.eigenvalues if ok else np.full(reference.size, np.nan + 0j)
    return e0, e1, audit


def transmitter_ensemble(q0: Signal, noise: PointNoise, z: float, master_seed: int, runs: int,
                         *, n_steps: int | None = None, search: SearchConfig = SearchConfig(),
                         workers: int = 1, max_excluded: float = MAX_EXCLUDED_FRACTION):
    """Paired eigenvalues of transmitter-noised pulses before and after a
    noiseless propagation over ``z``.  Returns ``(before, after)`` ensembles."""
    lam0 = reference_eigenvalues(q0, search)
    if n_steps is None:
        n_steps = fiber.steps_for(q0, z, peak_power=4 * np.max(np.abs(q0.samples)) ** 2)
    cfg = fiber.PropagationConfig(n_steps=n_steps)
    out = ensemble_map(_transmitter_run, runs, master_seed, workers=workers,
                       args=(q0, noise, z, cfg, lam0, search))
    audit = ExclusionAudit()
    for *_, au in out:
        audit.merge(au)
    audit.check(max_excluded)
    before = np.array([o[0] for o in out])
    after = np.array([o[1] for o in out])
    return EigenvalueEnsemble(before, lam0, audit), EigenvalueEnsemble(after, lam0, audit)

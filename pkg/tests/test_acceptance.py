"""End-to-end acceptance criteria.

Each test records one PASS/FAIL line (shown in the terminal summary) before
asserting.  Criteria 4-10 run the shipped experiment configs at full size
and take several minutes in total.
"""
from pathlib import Path

import numpy as np
import pytest

from nftnoise import (PropagationConfig, SolitonPrescription, TimeGrid, darboux_synthesize,
                      find_discrete_eigenvalues, propagate_with_taps, sech_pulse)
from nftnoise.harness.config import ExperimentConfig
from nftnoise.harness.runner import EXIT_PASS, run_experiment

pytestmark = pytest.mark.acceptance

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
GRID = TimeGrid.symmetric(16.0, 2048)


def _run(eid, tmp_path):
    cfg = ExperimentConfig.from_file(CONFIGS / f"{eid.lower()}.yaml")
    return run_experiment(cfg, tmp_path)


def _checks(outcome, names=None):
    checks = [c for c in outcome.result.checks if names is None or c.name in names]
    detail = "; ".join(f"{c.name}: {'ok' if c.passed else 'FAILED'}" for c in checks)
    if outcome.error:
        detail += f"; error: {outcome.error}"
    return all(c.passed for c in checks) and not outcome.error, detail


def test_criterion_01_nft_accuracy(acceptance):
    worst = 0.0
    for amp in (1.0, 2.0, 2.2):
        expect = np.array([1j * (amp - 0.5 - k) for k in range(2) if amp - 0.5 - k > 0])
        spec = find_discrete_eigenvalues(sech_pulse(amp, GRID))
        ok = spec.count == expect.size
        if ok:
            worst = max(worst, float(np.max(np.abs(np.sort_complex(spec.eigenvalues)
                                                   - np.sort_complex(expect)))))
        else:
            worst = np.inf
    passed = worst < 1e-3
    acceptance(1, "NFT accuracy on A sech(t)", passed, f"max error {worst:.2e}")
    assert passed


def test_criterion_02_darboux_round_trip(acceptance):
    eig_err, amp_err = 0.0, 0.0
    for lams in ([0.5j, 1.5j], [0.9j, 1.5j], [0.5j, 1.5j, 2.5j]):
        p = SolitonPrescription.symmetric(lams)
        spec = find_discrete_eigenvalues(darboux_synthesize(p, GRID))
        order = np.argsort(p.eigenvalues.imag)
        if spec.count != len(lams):
            eig_err = np.inf
            break
        eig_err = max(eig_err, float(np.max(np.abs(spec.eigenvalues - p.eigenvalues[order]))))
        rel = np.abs(spec.amplitudes - p.amplitudes[order]) / np.abs(p.amplitudes[order])
        amp_err = max(amp_err, float(np.max(rel)))
    passed = eig_err < 1e-3 and amp_err < 1e-2
    acceptance(2, "Darboux round trip", passed,
               f"eigenvalue error {eig_err:.2e}, amplitude error {amp_err:.2%}")
    assert passed


def test_criterion_03_noiseless_invariance(acceptance):
    q0 = sech_pulse(2.0, GRID)
    taps = np.round(np.linspace(0.0, 1.0, 11), 12)
    _, fields = propagate_with_taps(q0, 1.0, PropagationConfig(n_steps=8000), taps=taps)
    eig_err, phases = 0.0, []
    for f in fields:
        spec = find_discrete_eigenvalues(f)
        eig_err = max(eig_err, float(np.max(np.abs(spec.eigenvalues - [0.5j, 1.5j]))))
        phases.append(np.angle(spec.amplitudes[1] / spec.amplitudes[0]))
    # unwrap over 0.1-spaced taps; the ratio turns by 0.8 rad per tap
    rotation = float(np.unwrap(phases)[-1] - phases[0])
    rel = abs(rotation - 8.0) / 8.0
    passed = eig_err < 1e-2 and rel < 0.02
    acceptance(3, "noiseless split-step invariance", passed,
               f"eigenvalue drift {eig_err:.2e}, ratio phase {rotation:.4f} rad vs 8")
    assert passed


def test_criterion_04_correlation_map(acceptance, tmp_path):
    out = _run("E1", tmp_path)
    passed, detail = _checks(out)
    corr = np.round(np.asarray(out.result.metrics.get("correlation_grid", [])), 3).tolist()
    acceptance(4, "E1 correlation map positive and monotone", passed, f"{detail}; grid {corr}")
    assert out.exit_code == EXIT_PASS and passed


def test_criterion_05_decoupling_model(acceptance, tmp_path):
    out = _run("E6", tmp_path)
    passed, detail = _checks(out)
    acceptance(5, "E6 per-segment decoupling", passed, detail)
    assert out.exit_code == EXIT_PASS and passed


def test_criterion_06_angle_versus_phase(acceptance, tmp_path):
    e4 = _run("E4", tmp_path)
    e5 = _run("E5", tmp_path)
    p4, d4 = _checks(e4)
    p5, d5 = _checks(e5)
    acceptance(6, "E4/E5 principal angle varies and repeats with 2*pi phase", p4 and p5,
               f"E4 {d4}; E5 {d5}")
    assert p4 and p5


def test_criterion_07_scaling_dominance(acceptance, tmp_path):
    out = _run("E7", tmp_path)
    passed, detail = _checks(out)
    acceptance(7, "E7 scaling noise dominates; sweep structure", passed, detail)
    assert out.exit_code == EXIT_PASS and passed


def test_criterion_08_linearity(acceptance, tmp_path):
    out = _run("E9", tmp_path)
    passed, detail = _checks(out)
    c = out.result.metrics.get("correlation", float("nan"))
    acceptance(8, "E9 linearity of perturbations", passed, f"correlation {c:.4f}")
    assert out.exit_code == EXIT_PASS and passed


def test_criterion_09_constellation(acceptance, tmp_path):
    out = _run("E2", tmp_path)
    passed, detail = _checks(out)
    m = out.result.metrics
    acceptance(9, "E2 constellation bits and ML decoding", passed,
               f"{detail}; metrics " + ", ".join(f"{k}={v:.4g}" for k, v in m.items()
                                                if isinstance(v, float)))
    assert out.exit_code == EXIT_PASS and passed


def test_criterion_10_transceiver_taxonomy(acceptance, tmp_path):
    out = _run("E8", tmp_path)
    passed, detail = _checks(out)
    acceptance(10, "E8 transceiver noise taxonomy", passed, detail)
    assert out.exit_code == EXIT_PASS and passed

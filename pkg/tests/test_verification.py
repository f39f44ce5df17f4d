import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from ensemblectl.enumeration import enumerate_minimal
from ensemblectl.synthesis import EnsemblePair, build_ensemble_pair
from ensemblectl.verification import (
    SingularGramianError,
    SpectrumMismatch,
    _simpson_weights,
    analytic_spectrum,
    certify,
    eigen_trajectories,
    eigenvalues_at,
    simulate,
    steer_subensemble,
)

PAIRS = [build_ensemble_pair(e.pattern) for n in range(0, 5) for e in enumerate_minimal(n)]
MULTI_BLOCK = [p for p in PAIRS if len(p.cycle_sizes) >= 2]


def three_state_pair(sizes=(1, 1, 1)):
    K = next(e.pattern for e in enumerate_minimal(3) if e.pattern.cycle_sizes == sizes)
    return build_ensemble_pair(K)


@pytest.mark.parametrize("pair", PAIRS, ids=lambda p: f"n{p.n}-{p.cycle_sizes}")
def test_catalog_pairs_certify(pair):
    report = certify(pair, grid_size=21)
    assert report.verdict, report.failures
    assert report.max_spectrum_error < 1e-8


@given(st.sampled_from(PAIRS[1:]), st.floats(0.0, 1.0))
@settings(max_examples=100, deadline=None)
def test_closed_form_spectrum(pair, sigma):
    lam = eigenvalues_at(pair, sigma, checked=True)
    assert lam.size == pair.n
    moduli = np.sort(np.abs(lam))
    expected = np.sort(np.repeat(pair.radii(sigma), pair.cycle_sizes))
    assert np.allclose(moduli, expected)


def test_spectrum_mismatch_detected():
    pair = three_state_pair()
    wrong = EnsemblePair(pair.A0, pair.b0, pair.kappa, (2, 1))
    with pytest.raises(SpectrumMismatch):
        eigenvalues_at(wrong, 0.3, checked=True)


@pytest.mark.parametrize("pair", MULTI_BLOCK[:8], ids=lambda p: str(p.cycle_sizes))
def test_sabotage_kappa_zero(pair):
    bad = EnsemblePair(pair.A0, pair.b0, 0.0, pair.cycle_sizes)
    report = certify(bad, grid_size=11)
    assert not report.verdict
    assert 3 in report.failed_items


def _equal_radii(pair):
    A0 = pair.A0.copy()
    s, k = pair.offsets()[1], pair.cycle_sizes[1]
    r1 = pair.r0[0]
    for j in range(k):
        A0[s + (j + 1) % k, s + j] = r1
    return EnsemblePair(A0, pair.b0, pair.kappa, pair.cycle_sizes)


@pytest.mark.parametrize("pair", MULTI_BLOCK[:8], ids=lambda p: str(p.cycle_sizes))
def test_sabotage_equal_radii(pair):
    report = certify(_equal_radii(pair), grid_size=11)
    assert not report.verdict
    assert 2 in report.failed_items


@pytest.mark.parametrize("pair", MULTI_BLOCK[:8], ids=lambda p: str(p.cycle_sizes))
def test_sabotage_zero_connector(pair):
    # cut the edge entering the last block (from a state or from the control)
    A0, b0 = pair.A0.copy(), pair.b0.copy()
    last = pair.offsets()[-1]
    if A0[last:, :last].any():
        r, c = np.argwhere(A0[last:, :last])[0]
        A0[last + r, c] = 0.0
    else:
        b0[last:] = 0.0
    report = certify(EnsemblePair(A0, b0, pair.kappa, pair.cycle_sizes), grid_size=11)
    assert not report.verdict
    assert 1 in report.failed_items


def test_report_dict():
    d = certify(three_state_pair(), grid_size=5).to_dict()
    assert d["grid_size"] == 5 and d["verdict"] is True and d["failures"] == []


def test_eigen_trajectory_rows():
    pair = three_state_pair((2, 1))
    rows = eigen_trajectories(pair, grid_size=4)
    assert len(rows) == 4 * 3
    sigma, block, k, re, im = rows[-1]
    assert sigma == 1.0 and block == 1 and k == 0
    assert re == pytest.approx(pair.radii(1.0)[1])


# -- steering -------------------------------------------------------------------


def test_simpson_weights():
    w = _simpson_weights(10, 0.1)
    assert w.sum() == pytest.approx(1.0)
    t = np.linspace(0, 1, 21)
    assert w @ t**3 == pytest.approx(0.25)


def test_simulate_free_response():
    pair = three_state_pair((2, 1))
    x0 = np.array([[1.0, -1.0, 0.5], [0.0, 2.0, 1.0]])
    sig = [0.2, 0.9]
    xT = simulate(pair, sig, x0, lambda t: np.zeros_like(t), T=1.0, steps=400)
    for s, a, b in zip(sig, x0, xT):
        assert np.allclose(b, expm(pair.A(s)) @ a, atol=1e-9)


@pytest.mark.parametrize("sizes", [(1, 1, 1), (2, 1), (3,)])
def test_single_sigma_steering(sizes):
    pair = three_state_pair(sizes)
    rng = np.random.default_rng(1)
    x0, xhat = rng.normal(size=(1, 3)), rng.normal(size=(1, 3))
    res = steer_subensemble(pair, [0.4], x0, xhat)
    assert res.terminal_error < 1e-6 * max(1.0, np.linalg.norm(xhat))
    # re-integration from the returned samples reproduces the reported error
    xT = simulate(pair, [0.4], x0, res.control_samples, res.T, res.steps)
    assert np.linalg.norm(xT - xhat) == pytest.approx(res.terminal_error, rel=1e-6, abs=1e-14)
    assert res.control_energy > 0


@pytest.mark.parametrize("seed", range(3))
def test_two_sigma_steering(seed):
    pair = three_state_pair((3,))
    rng = np.random.default_rng(seed)
    x0, xhat = rng.normal(size=(2, 3)), rng.normal(size=(2, 3))
    res = steer_subensemble(pair, [0.0, 1.0], x0, xhat)
    assert res.terminal_error < 1e-6 * max(1.0, np.linalg.norm(xhat, axis=1).max())


def test_terminal_error_is_fourth_order():
    pair = three_state_pair((1, 1, 1))
    rng = np.random.default_rng(0)
    x0, xhat = rng.normal(size=(2, 3)), rng.normal(size=(2, 3))
    e1 = steer_subensemble(pair, [0.0, 1.0], x0, xhat, steps=1000).terminal_error
    e2 = steer_subensemble(pair, [0.0, 1.0], x0, xhat, steps=2000).terminal_error
    assert 10 < e1 / e2 < 20


def test_control_function_matches_samples():
    pair = three_state_pair((2, 1))
    res = steer_subensemble(pair, [0.5], np.zeros((1, 3)), np.ones((1, 3)), steps=200)
    t = res.times[::50]
    assert np.allclose(res.control(t), res.control_samples[::50], rtol=1e-6, atol=1e-6)


def test_step_halving_is_stable():
    pair = three_state_pair((1, 1, 1))
    x0, xhat = np.zeros((1, 3)), np.array([[1.0, -2.0, 0.5]])
    coarse = steer_subensemble(pair, [0.3], x0, xhat, steps=500).terminal_error
    fine = steer_subensemble(pair, [0.3], x0, xhat, steps=1000).terminal_error
    assert abs(coarse - fine) < 10 * 1e-6


def test_duplicated_sigma_is_singular():
    pair = three_state_pair()
    with pytest.raises(SingularGramianError, match="duplicated"):
        steer_subensemble(pair, [0.5, 0.5], np.zeros((2, 3)), np.ones((2, 3)))


def test_steering_input_checks():
    pair = three_state_pair()
    with pytest.raises(ValueError):
        steer_subensemble(pair, [1.5], np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError):
        steer_subensemble(pair, np.linspace(0, 1, 30), np.zeros(90), np.zeros(90))
    with pytest.raises(ValueError):
        steer_subensemble(pair, [0.5], np.zeros(3), np.zeros(3), steps=0)


def test_analytic_spectrum_empty():
    pair = EnsemblePair(np.zeros((0, 0)), np.zeros(0), 1.0, ())
    assert analytic_spectrum(pair, 0.5).size == 0
    assert certify(pair, grid_size=3).verdict

import numpy as np
import pytest
from scipy.special import factorial

from hybridlchs.stateprep import (
    SnapCache,
    SnapDParams,
    _SnapObjective,
    law_eberly_synthesize,
    le_prepared_state,
    simulate_le,
    snapd_optimize,
    snapd_state,
)
from hybridlchs.coeffs import compute_raw_coefficients
from hybridlchs.kernel import KernelParams
from hybridlchs.metrics import stellar_rank
from hybridlchs.utils import ValidationError

BENCHMARK_KERNELS = {
    "dirichlet": KernelParams(beta=0.5, r=7.9, r_prime=4.1, n_trunc=48),
    "neumann": KernelParams(beta=0.3, r=7.9, r_prime=4.0, n_trunc=48),
    "periodic": KernelParams(beta=0.3, r=8.1, r_prime=4.1, n_trunc=48),
}
RANDOM_SIZES = np.random.default_rng(2024).integers(2, 49, size=100)


def _random_target(n, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    return c / np.linalg.norm(c)


def _coherent(alpha, n):
    k = np.arange(n)
    c = alpha**k / np.sqrt(factorial(k))
    return (c / np.linalg.norm(c)).astype(complex)


@pytest.mark.parametrize(
    "target, pulses",
    [
        (np.array([1, 1]) / np.sqrt(2), 1),
        (np.array([0.6, 0, 0.8]), 2),
    ],
)
def test_law_eberly_small_targets(target, pulses):
    seq = law_eberly_synthesize(target)
    assert seq.n_jc == pulses
    assert seq.n_rot <= pulses
    osc, excitation = simulate_le(seq)
    np.testing.assert_allclose(osc[: target.size], target, atol=1e-12)
    assert excitation < 1e-20


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_law_eberly_random_targets(seed):
    target = _random_target(12, seed)
    seq = law_eberly_synthesize(target)
    assert seq.n_jc == 11 and seq.n_rot == 11
    osc, excitation = simulate_le(seq)
    assert abs(np.vdot(target, osc[:12])) ** 2 == pytest.approx(1.0, abs=1e-12)
    assert abs(osc[12]) < 1e-12
    assert excitation < 1e-20


def _check_le(target):
    seq = law_eberly_synthesize(target)
    support = stellar_rank(target)
    assert (seq.n_jc, seq.n_rot) == (support, support)
    osc, excitation = simulate_le(seq)
    assert abs(np.vdot(target, osc[: target.size])) ** 2 >= 1 - 1e-10
    assert excitation <= 1e-12


@pytest.mark.parametrize("index", range(len(RANDOM_SIZES)))
def test_law_eberly_random_sizes(index):
    _check_le(_random_target(int(RANDOM_SIZES[index]), 100 + index))


@pytest.mark.parametrize("bc", sorted(BENCHMARK_KERNELS))
def test_law_eberly_benchmark_coefficients(bc):
    target = compute_raw_coefficients(BENCHMARK_KERNELS[bc]).normalized
    assert target.size == 48
    _check_le(target)


def test_law_eberly_pulses_serialize():
    seq = law_eberly_synthesize(np.array([0.6, 0, 0.8]))
    d = seq.to_dict()
    assert d["n_levels"] == 4
    assert [p["kind"] for p in d["pulses"]] == [op.kind if op.kind == "jc" else "rot" for op in seq.to_ops()]


def test_le_prepared_state_pads():
    target = _random_target(5, 3)
    out = le_prepared_state(target, 10)
    assert out.shape == (10,)
    np.testing.assert_allclose(out[:5], target, atol=1e-12)
    np.testing.assert_allclose(out[5:], 0, atol=1e-12)
    np.testing.assert_array_equal(le_prepared_state(target, 10, seq=law_eberly_synthesize(target)), out)
    with pytest.raises(ValidationError):
        le_prepared_state(target, 4)
    with pytest.raises(ValidationError):
        law_eberly_synthesize([1.0, 1.0])


def test_snap_gradient_matches_finite_differences():
    target = _random_target(8, 5)
    objective = _SnapObjective(target, layers=2, n_snap=8)
    x = np.random.default_rng(6).normal(scale=0.4, size=2 * 2 + 2 * 8)
    _, grad = objective(x)
    step = 1e-6
    numeric = np.array(
        [(objective(x + step * e)[0] - objective(x - step * e)[0]) / (2 * step) for e in np.eye(x.size)]
    )
    np.testing.assert_allclose(grad, numeric, atol=1e-6)


def test_snapd_vacuum_target():
    target = np.zeros(4, dtype=complex)
    target[0] = 1
    params = snapd_optimize(target, layers=1, seed=0, budget=100, n_fock=12, n_starts=2)
    assert params.achieved_fidelity > 1 - 1e-8
    assert params.seed == 0 and params.budget == 100


def test_snapd_coherent_target_and_replay():
    target = _coherent(0.5, 12)
    params = snapd_optimize(target, layers=1, seed=11, budget=200, n_starts=2)
    assert params.achieved_fidelity > 1 - 1e-6
    replay = snapd_state(params, 12)
    assert abs(np.vdot(target, replay)) ** 2 == pytest.approx(params.achieved_fidelity, abs=1e-8)
    assert np.all(np.diff(params.history) >= -1e-12)


def test_snapd_is_seeded():
    target = _random_target(4, 9)
    a = snapd_optimize(target, layers=2, seed=42, budget=20, n_fock=8, n_starts=2)
    b = snapd_optimize(target, layers=2, seed=42, budget=20, n_fock=8, n_starts=2)
    np.testing.assert_array_equal(a.alphas, b.alphas)
    np.testing.assert_array_equal(a.thetas, b.thetas)


def test_snapd_validation():
    with pytest.raises(ValidationError):
        snapd_optimize(np.ones(3), layers=1, seed=0, budget=10)
    with pytest.raises(ValidationError):
        snapd_optimize(_coherent(0.3, 6), layers=0, seed=0, budget=10)
    with pytest.raises(ValidationError):
        snapd_optimize(_coherent(0.3, 6), layers=1, seed=0, budget=10, n_fock=4)
    with pytest.raises(ValidationError):
        SnapDParams(layers=1, alphas=np.zeros(1), thetas=np.zeros((1, 2)), achieved_fidelity=1.5)


def test_snap_cache_round_trip(tmp_path):
    cache = SnapCache(str(tmp_path / "cache"))
    target = _coherent(0.4, 6)
    key = cache.key(target, 2, 7, 30, n_fock=8)
    assert key == cache.key(target, 2, 7, 30, n_fock=8)
    assert key != cache.key(target, 2, 8, 30, n_fock=8)
    assert cache.load(key) is None
    params = SnapDParams(
        layers=2,
        alphas=np.array([0.1 + 0.2j, -0.3j]),
        thetas=np.arange(12, dtype=float).reshape(2, 6),
        achieved_fidelity=0.97,
        converged=True,
        n_iterations=5,
        history=[0.5, 0.97],
        seed=7,
        budget=30,
    )
    cache.store(key, params)
    loaded = cache.load(key)
    assert loaded.to_dict() == params.to_dict()


@pytest.mark.slow
def test_snapd_single_photon():
    target = np.array([0, 1, 0, 0, 0, 0], dtype=complex)
    params = snapd_optimize(target, layers=3, seed=3, budget=300, n_fock=14, n_starts=4)
    assert params.achieved_fidelity > 0.95

import json

import numpy as np
import pytest

from hybridlchs.pauli_heat import (
    BOUNDARY_CONDITIONS,
    GeneratorSpec,
    PauliSum,
    PauliTerm,
    anticommute,
    cartesian_decomposition,
    commutator_sums,
    damped_oscillator_generator,
    exponentials_per_step,
    generator_from_matrix,
    heat_error_estimate,
    heat_generator,
    heat_pauli_sum,
    kron_sum_generator,
    laplacian_matrix,
    load_generator,
    pauli_decompose,
    pauli_product,
    theorem_gate_scaling,
    trotter_step_estimate,
)
from hybridlchs.utils import ValidationError


def test_dirichlet_two_qubit_strings():
    terms = {t.string: t.coefficient for t in heat_pauli_sum("dirichlet", 2)}
    assert terms == pytest.approx({"II": 2.0, "IX": -1.0, "XX": -0.5, "YY": -0.5})


@pytest.mark.parametrize("bc", BOUNDARY_CONDITIONS)
@pytest.mark.parametrize("m", [2, 3, 4])
def test_pauli_sum_reproduces_laplacian(bc, m):
    np.testing.assert_allclose(heat_pauli_sum(bc, m).matrix(), laplacian_matrix(bc, m), atol=1e-13)


def test_boundary_rows():
    assert laplacian_matrix("neumann", 2)[0, 0] == 1
    assert laplacian_matrix("periodic", 3)[0, 7] == -1
    assert laplacian_matrix("dirichlet", 3)[0, 7] == 0


def test_heat_generator_scaling():
    spec = heat_generator("neumann", 3, alpha=0.7, h=0.5)
    np.testing.assert_allclose(spec.matrix(), 0.7 / 0.25 * laplacian_matrix("neumann", 3), atol=1e-13)
    assert len(spec.H) == 0
    assert spec.label == "heat-neumann"
    assert spec.grid["axes"] == [{"bc": "neumann", "m": 3, "h": 0.5}]


def test_kronecker_sum():
    spec = kron_sum_generator([("dirichlet", 2, 1.0), ("periodic", 2, 0.5)])
    expected = np.kron(np.eye(4), laplacian_matrix("dirichlet", 2)) + np.kron(laplacian_matrix("periodic", 2) / 0.25, np.eye(4))
    np.testing.assert_allclose(spec.matrix(), expected, atol=1e-13)
    assert spec.n_qubits == 4
    assert spec.label == "heat-mixed"
    assert len(spec.blocks) == 2


def test_damped_oscillator_matrix():
    spec = damped_oscillator_generator(0.5, 1.0)
    np.testing.assert_allclose(spec.matrix(), np.array([[0.25, -1.0], [1.0, 0.25]]), atol=1e-15)
    assert len(damped_oscillator_generator(0.0, 1.0).L) == 0
    with pytest.raises(ValidationError):
        damped_oscillator_generator(0.5, 0.0)


def test_pauli_algebra():
    assert pauli_product("X", "Y") == (1j, "Z")
    assert pauli_product("ZX", "ZY") == (1j, "IZ")
    assert anticommute("XI", "ZI")
    assert not anticommute("XX", "ZZ")
    assert not anticommute("IX", "XX")


def test_cartesian_and_pauli_decomposition():
    A = np.random.default_rng(3).normal(size=(4, 4)) + 1j * np.random.default_rng(4).normal(size=(4, 4))
    L, H = cartesian_decomposition(A)
    np.testing.assert_allclose(L, L.conj().T)
    np.testing.assert_allclose(H, H.conj().T)
    np.testing.assert_allclose(L + 1j * H, A, atol=1e-14)
    np.testing.assert_allclose(generator_from_matrix(A).matrix(), A, atol=1e-12)
    with pytest.raises(ValidationError):
        pauli_decompose(A)


def test_load_generator_round_trip(tmp_path):
    spec = heat_generator("periodic", 2)
    path = tmp_path / "gen.json"
    spec.to_json(path)
    loaded = load_generator(path)
    np.testing.assert_allclose(loaded.matrix(), spec.matrix())
    assert loaded.grid == spec.grid


def test_load_dense_generator(tmp_path):
    A = np.array([[1.0, 2.0 + 1j], [0.0, 3.0]])
    path = tmp_path / "dense.json"
    path.write_text(json.dumps({"A": [[[z.real, z.imag] for z in row] for row in A], "label": "toy"}))
    loaded = load_generator(path)
    assert loaded.label == "toy"
    np.testing.assert_allclose(loaded.matrix(), A, atol=1e-14)


def test_load_generator_rejects_empty(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("{}")
    with pytest.raises(ValidationError):
        load_generator(path)


def test_validation():
    with pytest.raises(ValidationError):
        heat_pauli_sum("robin", 2)
    with pytest.raises(ValidationError):
        heat_pauli_sum("dirichlet", 1)
    with pytest.raises(ValidationError):
        heat_pauli_sum("dirichlet", 15)
    with pytest.raises(ValidationError):
        PauliTerm(1.0, "XQ")
    with pytest.raises(ValidationError):
        PauliSum(2, [PauliTerm(1.0, "X")])
    with pytest.raises(ValidationError):
        GeneratorSpec(L=PauliSum(1), H=PauliSum(2), label="bad")


def test_commuting_generator_needs_one_step():
    spec = damped_oscillator_generator(0.5, 1.0)
    sums = commutator_sums(spec, p=1)
    assert sums["L"] == 0 and sums["H"] == 0 and sums["mixed"][1] == 0
    assert trotter_step_estimate(spec, 1, t=1.0, eps=1e-6, x_norm_N=20.0) == 1


def test_trotter_step_estimate_heat():
    spec = heat_generator("dirichlet", 2)
    sums = commutator_sums(spec, p=1)
    assert sums["L"] > 0
    assert sums["H"] == 0 and sums["mixed"][1] == 0
    n_t = trotter_step_estimate(spec, 1, t=1.0, eps=1e-2, x_norm_N=3.0)
    assert n_t == int(np.ceil(9.0 * sums["L"] / 1e-2))
    assert trotter_step_estimate(spec, 1, t=1.0, eps=1e-3, x_norm_N=3.0) > n_t
    assert trotter_step_estimate(spec, 2, t=1.0, eps=1e-2, x_norm_N=3.0) >= 1
    with pytest.raises(ValidationError):
        commutator_sums(spec, p=3)


def test_heat_error_estimate():
    spec = heat_generator("dirichlet", 2)
    assert heat_error_estimate(spec, t=1.0, n_t=100, x_norm_N=3.0) == pytest.approx(0.36)
    with pytest.raises(ValidationError):
        heat_error_estimate(damped_oscillator_generator(0.5, 1.0), 1.0, 10, 3.0)


def test_exponential_counts_and_theorem_scaling():
    assert [exponentials_per_step(p) for p in (1, 2, 4)] == [1, 3, 15]
    with pytest.raises(ValidationError):
        exponentials_per_step(3)
    scaling = theorem_gate_scaling(heat_generator("dirichlet", 2), n_t=10)
    assert scaling == {"cnot": 40, "hybrid": 40}

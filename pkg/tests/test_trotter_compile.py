import json

import numpy as np
import pytest
from scipy.linalg import expm

from hybridlchs.hybrid_sim import HybridState, hybrid_propagator, postselected_operator
from hybridlchs.oscillator import TruncatedSpace, position_matrix, squeezed_vacuum_amplitudes
from hybridlchs.pauli_heat import GeneratorSpec, PauliSum, PauliTerm, damped_oscillator_generator, heat_generator, pauli_matrix
from hybridlchs.trotter_compile import (
    CircuitOp,
    closed_form_counts,
    compile_circuit,
    compile_hybrid_factor,
    compile_pauli_rotation,
    export_jsonl,
    gate_counts,
    postselected_trotter_operator,
    simulate_gate_list,
    tally,
    trotter_error_report,
    trotter_layer,
    trotter_operator,
    trotterized_evolution,
)
from hybridlchs.utils import ValidationError

TABLE3 = {
    # bc: (one_qubit, cnot, displace, cond_displace) for m = 2, n_t = 100
    "dirichlet": (1400, 400, 100, 300),
    "neumann": (1400, 600, 100, 400),
    "periodic": (600, 200, 100, 200),
}


def _identity_state(space, n_qubits):
    dim = space.n_fock * 2**n_qubits
    return HybridState(space.n_fock, n_qubits, np.eye(dim, dtype=complex))


@pytest.mark.parametrize("bc", ["dirichlet", "neumann", "periodic"])
@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("n_t", [1, 10])
def test_compiled_counts_match_closed_forms(bc, m, n_t):
    report = gate_counts(bc, [m], n_t)
    closed = closed_form_counts(bc, m)
    assert report.matches
    assert report.hybrid == n_t * closed["hybrid"]
    assert report.cnot == n_t * closed["cnot"]
    assert report.one_qubit == n_t * closed["one_qubit"]
    assert report.displace == n_t


@pytest.mark.parametrize("bc", sorted(TABLE3))
def test_two_qubit_counts_over_hundred_steps(bc):
    report = gate_counts(bc, [2], 100)
    assert (report.one_qubit, report.cnot, report.displace, report.cond_displace) == TABLE3[bc]


def test_two_dimensional_counts_add_per_axis():
    report = gate_counts("dirichlet", [2, 2], 1)
    assert (report.hybrid, report.cnot, report.one_qubit) == (8, 8, 28)
    assert len(report.to_frame()) == 2


def test_closed_form_validation():
    with pytest.raises(ValidationError):
        closed_form_counts("dirichlet", 1)
    with pytest.raises(ValidationError):
        closed_form_counts("robin", 3)
    with pytest.raises(ValidationError):
        gate_counts("dirichlet", [2], 0)


@pytest.mark.parametrize("string", ["X", "ZI", "XY", "YIZ"])
def test_hybrid_factor_matches_dense_exponential(string):
    space = TruncatedSpace(6)
    term = PauliTerm(0.7, string)
    n_qubits = len(string)
    ops = compile_hybrid_factor(0.3, term)
    out = simulate_gate_list(ops, _identity_state(space, n_qubits), space).amplitudes
    dense = expm(-1j * 0.3 * 0.7 * np.kron(position_matrix(space), pauli_matrix(string)))
    np.testing.assert_allclose(out, dense, atol=1e-12)


def test_identity_factor_is_a_plain_displacement():
    ops = compile_hybrid_factor(0.5, PauliTerm(2.0, "II"))
    assert [op.kind for op in ops] == ["displace"]
    assert ops[0].params["alpha"] == complex(0, -1.0)


def test_pauli_rotation_matches_dense_exponential():
    space = TruncatedSpace(2)
    term = PauliTerm(-0.4, "YX")
    out = simulate_gate_list(compile_pauli_rotation(0.6, term), _identity_state(space, 2), space).amplitudes
    dense = np.kron(np.eye(2), expm(-1j * 0.6 * -0.4 * pauli_matrix("YX")))
    np.testing.assert_allclose(out, dense, atol=1e-13)
    assert compile_pauli_rotation(0.6, PauliTerm(1.0, "II")) == []


def test_cnot_flips_target_on_control():
    space = TruncatedSpace(2)
    qubits = np.zeros(4, dtype=complex)
    qubits[2] = 1  # q1 = 1, q0 = 0
    state = HybridState.product(space.basis(0), qubits)
    out = simulate_gate_list([CircuitOp("cnot", (1, 0))], state, space)
    assert out.amplitudes[3] == 1


def test_commuting_generator_trotter_is_exact():
    spec = damped_oscillator_generator(0.5, 1.0)
    space = TruncatedSpace(16)
    exact = hybrid_propagator(spec.L, spec.H, space, 0.8)
    np.testing.assert_allclose(trotter_operator(spec, 0.8, 3, space), exact, atol=1e-10)


def test_postselected_trotter_operator_matches_exact_for_commuting_terms():
    spec = damped_oscillator_generator(0.5, 1.0)
    space = TruncatedSpace(16)
    prep = squeezed_vacuum_amplitudes(0.1, space)
    trotter = postselected_trotter_operator(spec, prep, space, 0.8, n_t=2, r_postselect=0.3)
    exact = postselected_operator(prep, spec.L, spec.H, 0.8, space, 0.3)
    np.testing.assert_allclose(trotter, exact, atol=1e-10)


@pytest.mark.parametrize("order, expected", [(1, 1.0), (2, 2.0)])
def test_trotter_error_exponent(order, expected):
    spec = heat_generator("dirichlet", 2)
    space = TruncatedSpace(6)
    report = trotter_error_report(spec, 0.2, [10, 20, 40], space, order=order)
    assert report["error"].is_monotonic_decreasing
    assert report.attrs["exponent"] == pytest.approx(expected, abs=0.25)
    assert "heat_estimate" in report


def test_first_order_error_decays_linearly_at_unit_time():
    spec = heat_generator("dirichlet", 2)
    space = TruncatedSpace(8, hbar=1.0)
    report = trotter_error_report(spec, 1.0, [25, 50, 100, 200], space)
    assert report["error"].is_monotonic_decreasing
    assert 0.8 <= report.attrs["exponent"] <= 1.2
    assert (report["n_t_bound"] >= report["n_t"]).all()


@pytest.mark.parametrize("seed", range(5))
def test_identity_damping_single_step_is_exact(seed):
    rng = np.random.default_rng(seed)
    L = PauliSum(2, [PauliTerm(float(rng.uniform(0.1, 2.0)), "II")])
    H = PauliSum(2, [PauliTerm(float(c), s) for c, s in zip(rng.normal(size=4), ["ZI", "IZ", "ZZ", "II"])])
    spec = GeneratorSpec(L=L, H=H, label="identity-damping")
    space = TruncatedSpace(12, hbar=1.0)
    exact = hybrid_propagator(spec.L, spec.H, space, 1.0)
    assert np.linalg.norm(trotter_operator(spec, 1.0, 1, space) - exact, 2) <= 1e-10


def test_step_estimate_is_conservative():
    spec = heat_generator("dirichlet", 2)
    report = trotter_error_report(spec, 0.2, [10, 20], TruncatedSpace(6))
    assert (report["n_t_bound"] >= report["n_t"]).all()


def test_trotterized_evolution_keeps_single_vector_shape():
    spec = heat_generator("neumann", 2)
    space = TruncatedSpace(4)
    state = HybridState.product(space.basis(0), np.array([0, 1, 0, 0], dtype=complex))
    out = trotterized_evolution(spec, 0.1, 2, state, space)
    assert out.amplitudes.shape == (16,)
    assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0)


def test_layer_and_evolution_validation():
    spec = heat_generator("dirichlet", 2)
    with pytest.raises(ValidationError):
        trotter_layer(spec, 0.1, order=3)
    with pytest.raises(ValidationError):
        trotterized_evolution(spec, 0.1, 0, _identity_state(TruncatedSpace(2), 2), TruncatedSpace(2))
    with pytest.raises(ValidationError):
        simulate_gate_list([], _identity_state(TruncatedSpace(3), 2), TruncatedSpace(4))


def test_circuit_op_validation():
    with pytest.raises(ValidationError):
        CircuitOp("toffoli", (0, 1, 2))
    with pytest.raises(ValidationError):
        CircuitOp("cnot", (1, 1))
    with pytest.raises(ValidationError):
        CircuitOp("cond_displace", (0,))


def test_export_jsonl(tmp_path):
    ops = compile_circuit(heat_generator("periodic", 2), 1.0, 2)
    assert tally(ops)["hybrid"] == 6
    path = tmp_path / "gates.jsonl"
    export_jsonl(ops, path)
    lines = path.read_text().splitlines()
    assert len(lines) == len(ops)
    first = json.loads(lines[0])
    assert first["kind"] == "displace"
    assert first["params"]["alpha"] == [0.0, -1.0]

from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpqc_sim.css import GateId, get_code
from mpqc_sim.statevector import (
    CX,
    GATE_MATRICES,
    H,
    PDAG,
    ArityMismatch,
    IndexOutOfRange,
    NotUnitary,
    StateVector,
    TooManyQubits,
    X,
    Y,
    apply_gate,
    basis_state,
    check_transversal_action,
    clifford_membership,
    compare_amplitudes,
    dump_amplitudes,
    eigen_check,
    fidelity,
    load_amplitudes,
    measure,
    pauli_string,
    prepare_logical,
    random_state,
    single_qubit,
    teleport_correction_table,
    teleport_h_oracle,
    tensor,
)


def kron_all(mats):
    return reduce(np.kron, mats)


def stabilizer_projector(code) -> np.ndarray:
    """Codespace projector built from the stabilizer generators directly."""
    dim = 1 << code.n
    proj = np.eye(dim, dtype=complex)
    for row in code.x_stabilizers:
        proj = proj @ (np.eye(dim) + pauli_string("".join("X" if b else "I" for b in row))) / 2
    for row in code.z_stabilizers:
        proj = proj @ (np.eye(dim) + pauli_string("".join("Z" if b else "I" for b in row))) / 2
    return proj


def test_prepare_logical_lies_in_codespace():
    code = get_code("steane_7")
    proj = stabilizer_projector(code)
    assert np.isclose(np.trace(proj).real, 2)
    rng = np.random.default_rng(1)
    for _ in range(5):
        s = prepare_logical(code, random_state(rng))
        assert np.allclose(proj @ s.amplitudes, s.amplitudes)


def test_logical_x_and_z_act_on_encoded_basis():
    code = get_code("steane_7")
    zero = prepare_logical(code, single_qubit("0")).amplitudes
    one = prepare_logical(code, single_qubit("1")).amplitudes
    xl = pauli_string("".join("X" if b else "I" for b in code.x_logical))
    zl = pauli_string("".join("Z" if b else "I" for b in code.z_logical))
    assert np.allclose(xl @ zero, one)
    assert np.allclose(zl @ zero, zero) and np.allclose(zl @ one, -one)


@pytest.mark.parametrize("gate, expect_ok, expect_label", [
    ("H", True, "H"), ("P", True, "Pdag"), ("T", False, None),
])
def test_steane_single_qubit_transversal_against_kron_oracle(gate, expect_ok, expect_label):
    code = get_code("steane_7")
    u = kron_all([GATE_MATRICES[GateId(gate)]] * 7)
    proj = stabilizer_projector(code)
    leak = np.linalg.norm(u @ proj - proj @ u @ proj)
    rep = check_transversal_action(code, gate)
    assert rep.preserves_codespace == expect_ok == (leak < 1e-9)
    assert rep.induced_logical == expect_label
    if not expect_ok:
        # leakage is the worst-case weight of a logical basis image outside the codespace
        oracle = 0.0
        for label in ("0", "1"):
            img = u @ prepare_logical(code, single_qubit(label)).amplitudes
            oracle = max(oracle, 1 - np.vdot(img, proj @ img).real)
        assert rep.leakage == pytest.approx(oracle, abs=1e-9)
        assert rep.leakage == pytest.approx(0.4375, abs=1e-9)


def test_steane_cx_transversal():
    rep = check_transversal_action(get_code("steane_7"), GateId.CX)
    assert rep.preserves_codespace and rep.induced_logical == "CX" and rep.method == "dense"


def test_qrm_actions():
    code = get_code("qrm_15")
    assert check_transversal_action(code, "T").induced_logical == "Tdag"
    assert check_transversal_action(code, "P").induced_logical == "Pdag"
    h = check_transversal_action(code, "H")
    assert not h.preserves_codespace and h.leakage > 1e-6
    cx = check_transversal_action(code, "CX")
    assert cx.preserves_codespace and cx.induced_logical == "CX" and cx.method == "sparse"


def test_apply_gate_matches_kron():
    rng = np.random.default_rng(3)
    s = random_state(rng, 3)
    out = apply_gate(s, "CX", [2, 0])
    # qubit 0 is the most significant bit; control 2 flips qubit 0
    full = np.zeros((8, 8))
    for i in range(8):
        full[i ^ (4 if i & 1 else 0), i] = 1
    assert np.allclose(out.amplitudes, full @ s.amplitudes)


def test_apply_gate_errors():
    s = basis_state(2)
    with pytest.raises(ArityMismatch):
        apply_gate(s, "CX", [0])
    with pytest.raises(IndexOutOfRange):
        apply_gate(s, "H", [2])
    with pytest.raises(TooManyQubits):
        basis_state(17)


def test_state_must_be_normalised():
    with pytest.raises(ValueError):
        StateVector(np.array([1, 1]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_measurement_statistics_and_collapse(seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, 2)
    rec, post = measure(s, [1], "standard", rng)
    bit = rec.outcomes[0]
    psi = s.amplitudes.reshape(2, 2)
    expect = psi.copy()
    expect[:, 1 - bit] = 0
    expect = expect.reshape(-1) / np.linalg.norm(expect)
    assert compare_amplitudes(post, StateVector(expect), up_to_phase=False)


def test_fourier_measurement_of_plus_is_zero():
    rng = np.random.default_rng(0)
    for _ in range(20):
        rec, _ = measure(single_qubit("+"), [0], "fourier", rng)
        assert rec.outcomes == (0,)
        rec, _ = measure(single_qubit("-"), [0], "fourier", rng)
        assert rec.outcomes == (1,)


def test_teleport_table_and_fidelity():
    table = teleport_correction_table()
    assert table == {0: "Y", 1: "I"}
    rng = np.random.default_rng(11)
    for _ in range(50):
        s = random_state(rng)
        out, t2 = teleport_h_oracle(s, rng)
        assert t2 == table
        assert fidelity(out, H @ s.amplitudes) >= 1 - 1e-9


def test_eigen_checks():
    m = single_qubit("m")
    assert abs(eigen_check(X @ PDAG, m) - np.exp(7j * np.pi / 4)) <= 1e-10
    assert abs(eigen_check(np.exp(1j * np.pi / 4) * X @ PDAG, m) - 1) <= 1e-10
    assert eigen_check(X, single_qubit("0")) is None
    with pytest.raises(ArityMismatch):
        eigen_check(CX, m)


def test_clifford_membership():
    for g in (GateId.H, GateId.P, GateId.CX):
        assert clifford_membership(GATE_MATRICES[g]).is_clifford
    for g in (GateId.T, GateId.CPdag, GateId.CXPdag):
        rep = clifford_membership(GATE_MATRICES[g])
        assert not rep.is_clifford and rep.witness is not None
        # witness really fails: its conjugate has more than one Pauli term
        p = pauli_string(rep.witness)
        conj = GATE_MATRICES[g] @ p @ GATE_MATRICES[g].conj().T
        assert np.allclose(conj, rep.conjugate) and len(rep.decomposition) > 1
    with pytest.raises(NotUnitary):
        clifford_membership(np.array([[1, 1], [0, 1]]))


def test_pauli_string_order():
    assert np.allclose(pauli_string("XY"), np.kron(X, Y))


def test_dump_load_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    s = tensor(random_state(rng), random_state(rng))
    path = tmp_path / "amps.txt"
    text = dump_amplitudes(s, path)
    assert text.startswith("# num_qubits 2\n")
    back = load_amplitudes(path)
    assert compare_amplitudes(s, back, atol=1e-15, up_to_phase=False)
    assert compare_amplitudes(s, StateVector(1j * s.amplitudes))
    assert not compare_amplitudes(s, StateVector(1j * s.amplitudes), up_to_phase=False)

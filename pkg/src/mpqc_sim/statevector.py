"""Dense statevector simulator used as the ground-truth oracle.

Qubit q of an m-qubit state is bit ``m - 1 - q`` of the amplitude index, so
a bit vector ``c`` read left to right is the basis index ``pack_bits(c)``.
Gate conventions: P = diag(1, i), T = diag(1, e^{i pi/4}); a Fourier-basis
measurement is H, standard measurement, H.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .css import CssCode, GateId, logical_codewords
from .gf2 import pack_bits

QUBIT_CEILING = 16
ALGEBRAIC_TOL = 1e-10
ACCUMULATED_TOL = 1e-9


class ArityMismatch(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class TooManyQubits(ValueError):
    pass


class NotUnitary(ValueError):
    pass


_S2 = 1 / np.sqrt(2)
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _S2
P = np.diag([1, 1j])
PDAG = np.diag([1, -1j])
T = np.diag([1, np.exp(1j * np.pi / 4)])
TDAG = T.conj()


def controlled(u: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


CX = controlled(X)

GATE_MATRICES: dict[GateId, np.ndarray] = {
    GateId.H: H,
    GateId.P: P,
    GateId.T: T,
    GateId.CX: CX,
    GateId.X: X,
    GateId.Y: Y,
    GateId.Z: Z,
    GateId.Pdag: PDAG,
    GateId.CPdag: controlled(PDAG),
    GateId.CXPdag: controlled(X @ PDAG),
}

# Candidate names for reporting an induced logical action.
NAMED_UNITARIES: dict[str, np.ndarray] = {
    "I": I2, "X": X, "Y": Y, "Z": Z, "H": H,
    "P": P, "Pdag": PDAG, "T": T, "Tdag": TDAG,
    "CX": CX, "II": np.eye(4, dtype=complex),
}

PAULIS_1Q = {"I": I2, "X": X, "Y": Y, "Z": Z}


def gate_matrix(g: GateId | str | np.ndarray) -> np.ndarray:
    if isinstance(g, np.ndarray):
        return g.astype(complex)
    return GATE_MATRICES[GateId(g)]


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    ceiling: int = QUBIT_CEILING

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        m = int(round(np.log2(a.size))) if a.size else -1
        if m < 0 or 1 << m != a.size:
            raise ValueError(f"amplitude count {a.size} is not a power of two")
        if m > self.ceiling:
            raise TooManyQubits(f"{m} qubits exceeds ceiling {self.ceiling}")
        norm = float(np.vdot(a, a).real)
        if abs(norm - 1) > ALGEBRAIC_TOL:
            raise ValueError(f"state not normalised: |psi|^2 = {norm}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __repr__(self) -> str:
        return f"StateVector({self.num_qubits} qubits)"


@dataclass(frozen=True)
class MeasurementRecord:
    qubits: tuple[int, ...]
    basis: str
    outcomes: tuple[int, ...]
    draws: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if len(self.outcomes) != len(self.qubits):
            raise ValueError("one outcome per measured qubit")


_LABELS = {
    "0": np.array([1, 0]),
    "1": np.array([0, 1]),
    "+": np.array([1, 1]) * _S2,
    "-": np.array([1, -1]) * _S2,
    "+i": np.array([1, 1j]) * _S2,
    "-i": np.array([1, -1j]) * _S2,
    "m": np.array([1, np.exp(1j * np.pi / 4)]) * _S2,
}


def single_qubit(label: str) -> StateVector:
    """Named single-qubit states: 0, 1, +, -, +i, -i, m (magic)."""
    key = label.strip().strip("|>⟩")
    if key not in _LABELS:
        raise ValueError(f"unknown state label {label!r}")
    return StateVector(_LABELS[key])


def basis_state(num_qubits: int, index: int = 0, ceiling: int = QUBIT_CEILING) -> StateVector:
    a = np.zeros(1 << num_qubits, dtype=complex)
    a[index] = 1
    return StateVector(a, ceiling=ceiling)


def random_state(rng: np.random.Generator, num_qubits: int = 1) -> StateVector:
    a = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return StateVector(a / np.linalg.norm(a))


def tensor(*states: StateVector, ceiling: int = QUBIT_CEILING) -> StateVector:
    a = np.ones(1, dtype=complex)
    for s in states:
        a = np.kron(a, s.amplitudes)
    return StateVector(a, ceiling=ceiling)


def apply_matrix(amps: np.ndarray, num_qubits: int, u: np.ndarray, targets) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the listed qubits of a raw amplitude array."""
    targets = list(targets)
    k = len(targets)
    psi = amps.reshape((2,) * num_qubits)
    op = u.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), targets))
    # tensordot puts the gate's output axes first; move them back in place.
    out = np.moveaxis(out, list(range(k)), targets)
    return out.reshape(-1)


def _check_targets(s: StateVector, targets, arity: int) -> list[int]:
    targets = [int(q) for q in targets]
    if len(targets) != arity:
        raise ArityMismatch(f"gate acts on {arity} qubit(s), got targets {targets}")
    if len(set(targets)) != len(targets):
        raise ArityMismatch(f"repeated target in {targets}")
    for q in targets:
        if not 0 <= q < s.num_qubits:
            raise IndexOutOfRange(f"qubit {q} out of range for {s.num_qubits} qubits")
    return targets


def apply_gate(s: StateVector, g: GateId | str | np.ndarray, targets) -> StateVector:
    u = gate_matrix(g)
    arity = u.shape[0].bit_length() - 1
    targets = _check_targets(s, targets, arity)
    out = apply_matrix(s.amplitudes, s.num_qubits, u, targets)
    return StateVector(out, ceiling=s.ceiling)


def fidelity(a: StateVector | np.ndarray, b: StateVector | np.ndarray) -> float:
    va = a.amplitudes if isinstance(a, StateVector) else np.asarray(a)
    vb = b.amplitudes if isinstance(b, StateVector) else np.asarray(b)
    return float(abs(np.vdot(va, vb)) ** 2)


def measure(s: StateVector, qubits, basis: str, rng: np.random.Generator) -> tuple[MeasurementRecord, StateVector]:
    """Projective measurement of ``qubits`` one at a time.

    ``basis`` is ``"standard"`` or ``"fourier"``; outcome 0 in the Fourier
    basis is |+>. The post-measurement state stays in the measured basis.
    """
    if basis not in ("standard", "fourier"):
        raise ValueError(f"unknown basis {basis!r}")
    qubits = [int(q) for q in qubits]
    for q in qubits:
        if not 0 <= q < s.num_qubits:
            raise IndexOutOfRange(f"qubit {q} out of range")
    m = s.num_qubits
    amps = s.amplitudes.copy()
    outcomes, draws = [], []
    for q in qubits:
        if basis == "fourier":
            amps = apply_matrix(amps, m, H, [q])
        psi = amps.reshape((2,) * m)
        one = np.take(psi, 1, axis=q)
        p1 = float(np.vdot(one, one).real)
        u = float(rng.random())
        bit = int(u < p1)
        keep = p1 if bit else 1 - p1
        psi = psi.copy()
        idx = [slice(None)] * m
        idx[q] = 1 - bit
        psi[tuple(idx)] = 0
        amps = psi.reshape(-1) / np.sqrt(keep)
        if basis == "fourier":
            amps = apply_matrix(amps, m, H, [q])
        outcomes.append(bit)
        draws.append(u)
    rec = MeasurementRecord(tuple(qubits), basis, tuple(outcomes), tuple(draws))
    return rec, StateVector(amps, ceiling=s.ceiling)


def prepare_logical(code: CssCode, state: StateVector) -> StateVector:
    """Encode a single-qubit state as alpha|0_L> + beta|1_L>."""
    if code.n > QUBIT_CEILING:
        raise TooManyQubits(f"code length {code.n} exceeds ceiling {QUBIT_CEILING}")
    if state.num_qubits != 1:
        raise ValueError("input must be a single-qubit state")
    zero, one = _logical_basis(code)
    alpha, beta = state.amplitudes
    return StateVector(alpha * zero + beta * one)


def _logical_basis(code: CssCode) -> tuple[np.ndarray, np.ndarray]:
    out = []
    for b in (0, 1):
        words = logical_codewords(code, b)
        v = np.zeros(1 << code.n, dtype=complex)
        v[[pack_bits(w) for w in words]] = 1 / np.sqrt(len(words))
        out.append(v)
    return out[0], out[1]


def identify_unitary(u: np.ndarray, tol: float = ACCUMULATED_TOL) -> str | None:
    """Name of a known gate equal to ``u`` up to global phase, if any."""
    dim = u.shape[0]
    for name, ref in NAMED_UNITARIES.items():
        if ref.shape != u.shape:
            continue
        overlap = abs(np.trace(ref.conj().T @ u)) / dim
        if abs(overlap - 1) <= tol:
            return name
    return None


@dataclass(frozen=True)
class TransversalReport:
    gate: str
    preserves_codespace: bool
    leakage: float
    induced_logical: str | None
    induced_matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    method: str = "dense"


def check_transversal_action(code: CssCode, g: GateId | str | np.ndarray, tol: float = ACCUMULATED_TOL) -> TransversalReport:
    """Apply ``g`` to every physical qubit and inspect the logical action.

    Two-qubit gates act pairwise between two code blocks. When the doubled
    register exceeds the qubit ceiling, monomial gates (CX and friends) are
    evaluated on the sparse support of the logical basis states instead.
    """
    u = gate_matrix(g)
    name = g.value if isinstance(g, GateId) else (str(g) if not isinstance(g, np.ndarray) else "custom")
    arity = u.shape[0].bit_length() - 1
    if arity not in (1, 2):
        raise ArityMismatch("transversal check supports 1- and 2-qubit gates")
    if code.n > QUBIT_CEILING:
        raise TooManyQubits(f"code length {code.n} exceeds ceiling {QUBIT_CEILING}")
    if arity == 1:
        basis = list(_logical_basis(code))
        images = [_transversal_dense(v, code.n, u, 1) for v in basis]
        method = "dense"
    elif 2 * code.n <= QUBIT_CEILING:
        zero, one = _logical_basis(code)
        basis = [np.kron(a, b) for a in (zero, one) for b in (zero, one)]
        images = [_transversal_dense(v, code.n, u, 2) for v in basis]
        method = "dense"
    else:
        if not _is_monomial(u):
            raise TooManyQubits("two-block check beyond the ceiling needs a monomial gate")
        basis, images = _transversal_sparse_pairs(code, u)
        method = "sparse"

    induced = np.array([[_inner(a, img) for img in images] for a in basis])
    kept = (np.abs(induced) ** 2).sum(axis=0)
    leakage = float(max(0.0, 1 - kept.min()))
    preserves = leakage <= tol
    label = identify_unitary(induced, tol) if preserves else None
    return TransversalReport(name, preserves, leakage, label, induced if preserves else None, method)


def _inner(a, b) -> complex:
    if isinstance(a, dict):
        return complex(sum(np.conj(amp) * b.get(k, 0) for k, amp in a.items()))
    return complex(np.vdot(a, b))


def _transversal_dense(v: np.ndarray, n: int, u: np.ndarray, arity: int) -> np.ndarray:
    out = v
    if arity == 1:
        for q in range(n):
            out = apply_matrix(out, n, u, [q])
    else:
        for q in range(n):
            out = apply_matrix(out, 2 * n, u, [q, n + q])
    return out


def _is_monomial(u: np.ndarray) -> bool:
    nz = np.abs(u) > ALGEBRAIC_TOL
    return bool((nz.sum(axis=0) == 1).all() and (nz.sum(axis=1) == 1).all())


def _transversal_sparse_pairs(code: CssCode, u: np.ndarray):
    n = code.n
    cosets = [[pack_bits(w) for w in logical_codewords(code, b)] for b in (0, 1)]
    basis = []
    for a, b in product((0, 1), repeat=2):
        amp = 1 / np.sqrt(len(cosets[a]) * len(cosets[b]))
        basis.append({(x << n) | y: amp for x in cosets[a] for y in cosets[b]})
    # Column c of the monomial gate maps |c> to u[r, c] |r>.
    col_map = {c: (int(np.nonzero(np.abs(u[:, c]) > ALGEBRAIC_TOL)[0][0])) for c in range(4)}
    images = []
    for state in basis:
        img: dict[int, complex] = {}
        for idx, amp in state.items():
            x, y = idx >> n, idx & ((1 << n) - 1)
            nx, ny = 0, 0
            for q in range(n):
                shift = n - 1 - q
                c = (((x >> shift) & 1) << 1) | ((y >> shift) & 1)
                r = col_map[c]
                amp = amp * u[r, c]
                nx |= ((r >> 1) & 1) << shift
                ny |= (r & 1) << shift
            img[(nx << n) | ny] = img.get((nx << n) | ny, 0) + amp
        images.append(img)
    return basis, images


def _extract_qubit(amps: np.ndarray, num_qubits: int, measured: int, bit: int, basis: str) -> np.ndarray:
    """Contract a product state with the measured qubit's basis vector."""
    vec = {("standard", 0): _LABELS["0"], ("standard", 1): _LABELS["1"],
           ("fourier", 0): _LABELS["+"], ("fourier", 1): _LABELS["-"]}[(basis, bit)]
    psi = amps.reshape((2,) * num_qubits)
    rest = np.tensordot(vec.conj(), psi, axes=([0], [measured])).reshape(-1)
    return rest / np.linalg.norm(rest)


_TELEPORT_PROBE = np.array([0.6, 0.48 + 0.64j])


def _teleport_circuit(data: np.ndarray) -> np.ndarray:
    # qubit 0: control (|+> ancilla), qubit 1: target (data)
    amps = np.kron(_LABELS["+"], data).astype(complex)
    amps = apply_matrix(amps, 2, P, [0])
    amps = apply_matrix(amps, 2, P, [1])
    amps = apply_matrix(amps, 2, CX, [0, 1])
    amps = apply_matrix(amps, 2, P, [1])
    return amps


def teleport_correction_table() -> dict[int, str]:
    """Outcome (0 = |+>, 1 = |->) -> correction on the target, by branch analysis."""
    amps = _teleport_circuit(_TELEPORT_PROBE)
    want = H @ _TELEPORT_PROBE
    table = {}
    for bit in (0, 1):
        proj = np.kron(np.outer(_LABELS["+" if bit == 0 else "-"], _LABELS["+" if bit == 0 else "-"].conj()), I2)
        branch = proj @ amps
        branch = _extract_qubit(branch / np.linalg.norm(branch), 2, 0, bit, "fourier")
        if abs(fidelity(branch, want) - 1) <= ALGEBRAIC_TOL:
            table[bit] = "I"
        elif abs(fidelity(Y @ branch, want) - 1) <= ALGEBRAIC_TOL:
            table[bit] = "Y"
        else:
            raise AssertionError(f"branch {bit} is neither H|psi> nor Y H|psi>")
    return table


def teleport_h_oracle(state: StateVector, rng: np.random.Generator) -> tuple[StateVector, dict[int, str]]:
    """Unencoded two-qubit H teleportation: P, P, CX(ancilla -> data), P, Fourier measurement."""
    if state.num_qubits != 1:
        raise ValueError("input must be a single-qubit state")
    table = teleport_correction_table()
    sv = StateVector(_teleport_circuit(state.amplitudes))
    rec, post = measure(sv, [0], "fourier", rng)
    bit = rec.outcomes[0]
    out = _extract_qubit(post.amplitudes, 2, 0, bit, "fourier")
    if table[bit] == "Y":
        out = Y @ out
    return StateVector(out), table


def eigen_check(g: GateId | str | np.ndarray, s: StateVector, tol: float = ALGEBRAIC_TOL) -> complex | None:
    u = gate_matrix(g)
    if u.shape[0] != s.amplitudes.size:
        raise ArityMismatch(f"operator dimension {u.shape[0]} != state dimension {s.amplitudes.size}")
    v = u @ s.amplitudes
    lam = complex(np.vdot(s.amplitudes, v))
    if np.linalg.norm(v - lam * s.amplitudes) > tol:
        return None
    return lam


def pauli_string(label: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for ch in label:
        out = np.kron(out, PAULIS_1Q[ch])
    return out


@dataclass(frozen=True)
class CliffordReport:
    is_clifford: bool
    witness: str | None = None
    conjugate: np.ndarray | None = field(default=None, compare=False, repr=False)
    decomposition: dict[str, complex] | None = field(default=None, compare=False)


def pauli_decomposition(m: np.ndarray, tol: float = ALGEBRAIC_TOL) -> dict[str, complex]:
    nq = m.shape[0].bit_length() - 1
    out = {}
    for label in ("".join(p) for p in product("IXYZ", repeat=nq)):
        c = np.trace(pauli_string(label).conj().T @ m) / m.shape[0]
        if abs(c) > tol:
            out[label] = complex(c)
    return out


def clifford_membership(u: np.ndarray, tol: float = ALGEBRAIC_TOL) -> CliffordReport:
    """Conjugate every non-identity Pauli by ``u``; Clifford iff all images are Paulis.

    Pauli labels list qubit 0 (the control for controlled gates) first.
    """
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    if np.linalg.norm(u.conj().T @ u - np.eye(dim)) > tol:
        raise NotUnitary("matrix is not unitary")
    nq = dim.bit_length() - 1
    phases = (1, -1, 1j, -1j)
    for label in ("".join(p) for p in product("IXYZ", repeat=nq)):
        if set(label) == {"I"}:
            continue
        conj = u @ pauli_string(label) @ u.conj().T
        dec = pauli_decomposition(conj, tol)
        if len(dec) == 1 and any(abs(c - ph) <= tol for c in dec.values() for ph in phases):
            continue
        return CliffordReport(False, label, conj, dec)
    return CliffordReport(True)


def dump_amplitudes(s: StateVector, path: str | Path | None = None) -> str:
    lines = [f"# num_qubits {s.num_qubits}"]
    for i, a in enumerate(s.amplitudes):
        lines.append(f"{i} {a.real:.17g} {a.imag:.17g}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_amplitudes(source: str | Path) -> StateVector:
    text = Path(source).read_text() if isinstance(source, Path) or "\n" not in str(source) else str(source)
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    amps = np.zeros(len(rows), dtype=complex)
    for idx, re, im in rows:
        amps[int(idx)] = float(re) + 1j * float(im)
    return StateVector(amps, ceiling=max(QUBIT_CEILING, len(rows).bit_length() - 1))


def compare_amplitudes(a: StateVector, b: StateVector, atol: float = ALGEBRAIC_TOL, up_to_phase: bool = True) -> bool:
    if a.num_qubits != b.num_qubits:
        return False
    va, vb = a.amplitudes, b.amplitudes
    if up_to_phase:
        ov = np.vdot(va, vb)
        if abs(ov) > 0:
            vb = vb * (abs(ov) / ov)
    return bool(np.max(np.abs(va - vb)) <= atol)

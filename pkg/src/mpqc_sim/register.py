"""Logical-level statevector carrying the actual content of encoded wires.

The Pauli frame only tracks errors; this register holds the encoded logical
qubits themselves (one register qubit per logical wire) so that measurement
outcomes, teleportation corrections and final outputs are physically exact.
Wires are addressed by stable ids; retired wires stay in the state as dead
qubits so that replacing a wire never needs a partial trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import H, I2, StateVector, TooManyQubits, X, Y, Z, _LABELS, apply_matrix

REGISTER_CEILING = 22


def label_state(label: str, rng: np.random.Generator | None = None) -> np.ndarray:
    """Amplitudes for a state label; ``random`` draws a Haar-random qubit."""
    key = label.strip()
    if key in ("random", "rho"):
        if rng is None:
            raise ValueError("a random input label needs an rng")
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        return v / np.linalg.norm(v)
    inner = key.strip("|>⟩")
    if inner not in _LABELS:
        raise ValueError(f"unknown state label {label!r}")
    return _LABELS[inner].astype(complex)


def bloch_vector(rho: np.ndarray) -> tuple[float, float, float]:
    return tuple(float(np.real(np.trace(rho @ p))) for p in (X, Y, Z))


@dataclass
class LogicalRegister:
    ceiling: int = REGISTER_CEILING

    def __post_init__(self):
        self.amps = np.ones(1, dtype=complex)
        self.order: list[int] = []
        self.dead: set[int] = set()
        self._next = 0

    @property
    def num_qubits(self) -> int:
        return len(self.order)

    def _axis(self, wire: int) -> int:
        if wire in self.dead:
            raise KeyError(f"wire {wire} has been retired")
        return self.order.index(wire)

    def add(self, amplitudes: np.ndarray) -> int:
        if self.num_qubits + 1 > self.ceiling:
            raise TooManyQubits(f"logical register would exceed {self.ceiling} qubits")
        self.amps = np.kron(self.amps, np.asarray(amplitudes, dtype=complex))
        wire = self._next
        self._next += 1
        self.order.append(wire)
        return wire

    def apply(self, u: np.ndarray, wires) -> None:
        axes = [self._axis(w) for w in wires]
        self.amps = apply_matrix(self.amps, self.num_qubits, np.asarray(u, dtype=complex), axes)

    def measure(self, wire: int, basis: str, rng: np.random.Generator) -> int:
        """Projective measurement; the wire stays in the post-measurement state."""
        q = self._axis(wire)
        m = self.num_qubits
        amps = self.amps
        if basis == "fourier":
            amps = apply_matrix(amps, m, H, [q])
        psi = amps.reshape((2,) * m).copy()
        one = np.take(psi, 1, axis=q)
        p1 = float(np.vdot(one, one).real)
        bit = int(rng.random() < p1)
        idx = [slice(None)] * m
        idx[q] = 1 - bit
        psi[tuple(idx)] = 0
        amps = psi.reshape(-1) / np.sqrt(p1 if bit else 1 - p1)
        if basis == "fourier":
            amps = apply_matrix(amps, m, H, [q])
        self.amps = amps
        return bit

    def remove_measured(self, wire: int, basis: str, bit: int) -> None:
        """Drop a wire known to be in a product basis state."""
        q = self._axis(wire)
        vec = _LABELS[{("standard", 0): "0", ("standard", 1): "1",
                       ("fourier", 0): "+", ("fourier", 1): "-"}[(basis, bit)]]
        psi = self.amps.reshape((2,) * self.num_qubits)
        rest = np.tensordot(vec.conj(), psi, axes=([0], [q])).reshape(-1)
        norm = np.linalg.norm(rest)
        if abs(norm - 1) > 1e-8:
            raise ValueError("wire was not in the stated product state")
        self.amps = rest / norm
        self.order.pop(q)

    def retire(self, wire: int) -> None:
        self._axis(wire)
        self.dead.add(wire)

    def reduced(self, wire: int) -> np.ndarray:
        q = self._axis(wire)
        psi = np.moveaxis(self.amps.reshape((2,) * self.num_qubits), q, 0).reshape(2, -1)
        return psi @ psi.conj().T

    def pauli(self, x: int, z: int, wire: int) -> None:
        if z:
            self.apply(Z, [wire])
        if x:
            self.apply(X, [wire])

    def state(self) -> StateVector:
        return StateVector(self.amps, ceiling=max(self.ceiling, self.num_qubits))


PAULI_MATRICES = {"I": I2, "X": X, "Y": Y, "Z": Z}

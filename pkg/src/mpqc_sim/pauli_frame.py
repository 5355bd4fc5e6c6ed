"""Pauli-frame bookkeeping for two-level encoded shares.

A share grid holds n blocks of n physical qubits. Block j is the second-level
encoding, made by node j, of the j-th first-level qubit; position l of every
block is held by node l. Only X/Z error bits are tracked per slot; the logical
content lives elsewhere (a symbolic label plus, in the engine, a wire of the
logical register).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .css import CssCode, GateId, get_code
from .gf2 import DecodeFailure, LinearCode, bounded_decode, decode_rows, erasure_decode, pack_bits, unpack_bits

STANDARD = "standard"
FOURIER = "fourier"

# Labels whose measurement outcome in a basis is fixed.
EIGEN_LABELS = {
    (STANDARD, "|0>"): 0,
    (STANDARD, "|1>"): 1,
    (FOURIER, "|+>"): 0,
    (FOURIER, "|->"): 1,
}


class UnsupportedGate(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PauliError:
    x_bits: np.ndarray
    z_bits: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x_bits, dtype=np.uint8).copy()
        z = np.asarray(self.z_bits, dtype=np.uint8).copy()
        if x.shape != z.shape:
            raise ValueError("x and z bit vectors differ in length")
        object.__setattr__(self, "x_bits", x)
        object.__setattr__(self, "z_bits", z)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliError):
            return NotImplemented
        return np.array_equal(self.x_bits, other.x_bits) and np.array_equal(self.z_bits, other.z_bits)

    def weight(self) -> int:
        return int((self.x_bits | self.z_bits).sum())

    def __mul__(self, other: "PauliError") -> "PauliError":
        return PauliError(self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits)


def _hex(bits: np.ndarray) -> str:
    flat = bits.reshape(-1)
    return format(pack_bits(flat), f"0{(flat.size + 3) // 4}x")


def _unhex(text: str, n: int) -> np.ndarray:
    return unpack_bits(int(text, 16), n * n).reshape(n, n)


@dataclass(frozen=True, eq=False)
class ShareGrid:
    """Error frame of one two-level encoded logical qubit.

    Attributes:
        index: dealer / input index this share belongs to.
        code: the CSS code used at both levels.
        logical_value: symbolic label of the encoded state.
        x: n x n X-error bits, ``x[j, l]`` is block j position l.
        z: n x n Z-error bits.
        wire: logical-register wire carrying the content, if any.
    """

    index: int
    code: CssCode
    logical_value: str
    x: np.ndarray
    z: np.ndarray
    wire: int | None = None

    def __post_init__(self):
        n = self.code.n
        for name in ("x", "z"):
            a = np.asarray(getattr(self, name), dtype=np.uint8).copy()
            if a.shape != (n, n):
                raise ValueError(f"{name} frame must be {n}x{n}, got {a.shape}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def errors(self) -> PauliError:
        return PauliError(self.x.reshape(-1), self.z.reshape(-1))

    @staticmethod
    def owner(slot: tuple[int, int]) -> int:
        return slot[1]

    @staticmethod
    def encoder(slot: tuple[int, int]) -> int:
        return slot[0]

    def with_frame(self, x: np.ndarray, z: np.ndarray) -> "ShareGrid":
        return replace(self, x=x, z=z)

    def relabel(self, label: str) -> "ShareGrid":
        return replace(self, logical_value=label)

    def is_clean(self) -> bool:
        return not (self.x.any() or self.z.any())

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "code": self.code.name,
            "logical_value": self.logical_value,
            "wire": self.wire,
            "x": _hex(self.x),
            "z": _hex(self.z),
        }

    @classmethod
    def from_json(cls, data: dict, code: CssCode | None = None) -> "ShareGrid":
        code = code or get_code(data["code"])
        return cls(
            index=int(data["index"]),
            code=code,
            logical_value=data["logical_value"],
            x=_unhex(data["x"], code.n),
            z=_unhex(data["z"], code.n),
            wire=data.get("wire"),
        )


@dataclass(frozen=True, eq=False)
class LogicalWord:
    """Measured outcome bits; row j is the block second-level encoded by node j."""

    bits: np.ndarray
    basis: str

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8).copy()
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError("a logical word is n blocks of n bits")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    def block(self, j: int) -> np.ndarray:
        return self.bits[j]

    def flip(self, mask: np.ndarray) -> "LogicalWord":
        return LogicalWord(self.bits ^ np.asarray(mask, dtype=np.uint8), self.basis)


def honest_share(code: CssCode, label: str, index: int, wire: int | None = None) -> ShareGrid:
    code._require_k1()
    zeros = np.zeros((code.n, code.n), dtype=np.uint8)
    return ShareGrid(index, code, label, zeros, zeros, wire)


def slot_mask(n: int, slots: Iterable[tuple[int, int]]) -> np.ndarray:
    mask = np.zeros((n, n), dtype=np.uint8)
    for j, l in slots:
        if not (0 <= j < n and 0 <= l < n):
            raise IndexError(f"slot {(j, l)} outside the {n}x{n} grid")
        mask[j, l] ^= 1
    return mask


def inject(grid: ShareGrid, slots: Iterable[tuple[int, int]] | np.ndarray, pauli: str) -> ShareGrid:
    """Toggle a Pauli ("X", "Y" or "Z") on each listed slot."""
    if pauli not in ("X", "Y", "Z"):
        raise ValueError(f"pauli must be X, Y or Z, got {pauli!r}")
    if isinstance(slots, np.ndarray) and slots.shape == (grid.n, grid.n):
        mask = slots.astype(np.uint8)
    else:
        mask = slot_mask(grid.n, slots)
    x, z = grid.x.copy(), grid.z.copy()
    if pauli in ("X", "Y"):
        x ^= mask
    if pauli in ("Z", "Y"):
        z ^= mask
    return grid.with_frame(x, z)


def propagate(grids, gate: GateId | str, rng: np.random.Generator | None = None):
    """Conjugate the error frame through a transversal gate.

    Single-qubit gates take one grid; CX takes ``(control, target)`` and
    returns the pair. T is not Clifford: with X errors present it needs an
    ``rng`` and is then Pauli-twirled (each X picks up a random Z).
    """
    gate = GateId(gate)
    if gate == GateId.CX:
        control, target = grids
        if control.code is not target.code and control.code.name != target.code.name:
            raise ValueError("CX needs two grids over the same code")
        tx = target.x ^ control.x
        cz = control.z ^ target.z
        return control.with_frame(control.x, cz), target.with_frame(tx, target.z)
    grid = grids
    if gate in (GateId.P, GateId.Pdag):
        return grid.with_frame(grid.x, grid.z ^ grid.x)
    if gate in (GateId.X, GateId.Y, GateId.Z):
        return grid
    if gate == GateId.H:
        return grid.with_frame(grid.z, grid.x)
    if gate == GateId.T:
        if not grid.x.any():
            return grid
        if rng is None:
            raise UnsupportedGate("T conjugates X errors to non-Pauli operators")
        coin = rng.integers(0, 2, size=grid.x.shape, dtype=np.uint8)
        return grid.with_frame(grid.x, grid.z ^ (grid.x & coin))
    raise UnsupportedGate(f"no frame rule for {gate.value}")


def measured_code(code: CssCode, basis: str) -> LinearCode:
    return code.v if basis == STANDARD else code.w


def logical_functional(code: CssCode, basis: str) -> np.ndarray:
    """Vector whose inner product with a measured codeword gives the logical bit."""
    return code.z_logical if basis == STANDARD else code.x_logical


def _coset_sample(code: CssCode, basis: str, bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # standard: dual(W) + b * xL; fourier: dual(V) + b * zL
    base = code.w_dual if basis == STANDARD else code.v_dual
    shift = code.x_logical if basis == STANDARD else code.z_logical
    g = base.generator.bits.astype(np.int64)
    coeffs = rng.integers(0, 2, size=(len(bits), g.shape[0]))
    words = (coeffs @ g) % 2
    return (words ^ np.outer(bits, shift)).astype(np.uint8)


def honest_outcome(code: CssCode, basis: str, rng: np.random.Generator, logical_bit: int | None) -> np.ndarray:
    """Sample the error-free n x n word of a two-level measurement."""
    if logical_bit is None:
        logical_bit = int(rng.integers(0, 2))
    top = _coset_sample(code, basis, np.array([logical_bit]), rng)[0]
    return _coset_sample(code, basis, top, rng)


def frame_measure(
    grid: ShareGrid,
    basis: str,
    rng: np.random.Generator,
    logical_bit: int | None = None,
) -> LogicalWord:
    """Measure every slot of ``grid`` in ``basis``.

    The honest part is a uniformly random codeword in the coset fixed by the
    logical outcome; ``logical_bit`` overrides the label-derived outcome (the
    engine passes the bit sampled from the logical register). Errors visible
    in this basis are XORed on top.
    """
    if basis not in (STANDARD, FOURIER):
        raise ValueError(f"unknown basis {basis!r}")
    if logical_bit is None:
        logical_bit = EIGEN_LABELS.get((basis, grid.logical_value))
    honest = honest_outcome(grid.code, basis, rng, logical_bit)
    visible = grid.x if basis == STANDARD else grid.z
    return LogicalWord(honest ^ visible, basis)


@dataclass(frozen=True, eq=False)
class DoubleDecode:
    """Outcome of decoding a measured word at both levels.

    Attributes:
        block_bits: decoded logical bit of each block.
        block_errors: n x n error positions found by second-level decoding.
        block_ok: False where a block had no codeword within the radius.
        first_errors: first-level error positions (blocks whose bit was wrong).
        bit: twice-decoded logical bit, None if first-level decoding failed.
    """

    block_bits: np.ndarray
    block_errors: np.ndarray
    block_ok: np.ndarray
    first_errors: np.ndarray
    bit: int | None

    @property
    def first_ok(self) -> bool:
        return self.bit is not None


def decode_blocks(code: CssCode, words: np.ndarray, basis: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Second-level decode of each row; returns (logical bits, errors, ok)."""
    cls = measured_code(code, basis)
    codewords, errors, ok = decode_rows(cls, words)
    bits = (codewords.astype(np.int64) @ logical_functional(code, basis)) % 2
    return bits.astype(np.uint8), errors, ok


def double_decode(word: LogicalWord, code: CssCode) -> DoubleDecode:
    bits, errors, ok = decode_blocks(code, word.bits, word.basis)
    erased = np.flatnonzero(~ok)
    cls = measured_code(code, word.basis)
    try:
        top, first_err = bounded_decode(cls, bits, erased)
        bit = int(top @ logical_functional(code, word.basis)) % 2
    except DecodeFailure:
        first_err = np.zeros(code.n, dtype=np.uint8)
        bit = None
    return DoubleDecode(bits, errors, ok, first_err.astype(np.uint8), bit)


@dataclass(frozen=True, eq=False)
class BlockResiduals:
    """Per-block second-level correction of a grid's own error frame.

    ``x_logical[j]`` / ``z_logical[j]`` say whether the residual after
    correcting block j acts as a logical X / Z on first-level qubit j.
    """

    x_logical: np.ndarray
    z_logical: np.ndarray
    x_errors: np.ndarray
    z_errors: np.ndarray
    ok: np.ndarray = field(default=None)


def block_residuals(grid: ShareGrid) -> BlockResiduals:
    code = grid.code
    xb, xe, xok = decode_blocks(code, grid.x, STANDARD)
    zb, ze, zok = decode_blocks(code, grid.z, FOURIER)
    return BlockResiduals(xb, zb, xe, ze, xok & zok)


def first_level_residual(code: CssCode, x_bits: np.ndarray, z_bits: np.ndarray, positions: Iterable[int]) -> tuple[int, int]:
    """Erasure-decode first-level residual bits using only ``positions``.

    Returns the (X, Z) logical residual of the encoded qubit. Raises
    :class:`~mpqc_sim.gf2.ErasureInconsistent` when the known bits are not
    the restriction of a codeword.
    """
    positions = set(int(p) for p in positions)
    erased = [j for j in range(code.n) if j not in positions]
    cx = erasure_decode(code.v, x_bits, erased)
    cz = erasure_decode(code.w, z_bits, erased)
    return int(cx @ code.z_logical) % 2, int(cz @ code.x_logical) % 2


def decode_frame(grid: ShareGrid, erased: Iterable[int] = ()) -> tuple[int, int]:
    """Residual logical (X, Z) of a grid after decoding both levels.

    The first level uses errors-and-erasures decoding, with the given blocks
    and any block that failed second-level decoding treated as erased.
    Raises :class:`~mpqc_sim.gf2.DecodeFailure` beyond the decoding radius.
    """
    code = grid.code
    res = block_residuals(grid)
    erased = sorted(set(int(e) for e in erased) | set(np.flatnonzero(~res.ok).tolist()))
    cx, _ = bounded_decode(code.v, res.x_logical, erased)
    cz, _ = bounded_decode(code.w, res.z_logical, erased)
    return int(cx @ code.z_logical) % 2, int(cz @ code.x_logical) % 2

"""Binary linear algebra and classical binary linear codes.

Matrices are dense ``uint8`` arrays with entries in {0, 1}. Codewords are
enumerated as packed Python/NumPy integers when brute force is needed;
all public functions take and return plain bit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAX_ENUM_DIM = 24
EAGER_DISTANCE_MAX_N = 20
COSET_TABLE_MAX_N = 20


class DimensionTooLarge(ValueError):
    pass


class DecodeFailure(ValueError):
    """No codeword lies within the bounded-distance radius of the word."""


class ErasureAmbiguous(ValueError):
    pass


class ErasureInconsistent(ValueError):
    pass


class CodeFormatError(ValueError):
    pass


def as_bits(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.uint8)
    if a.size and a.max() > 1:
        raise ValueError("bit vector entries must be 0 or 1")
    return a


def pack_bits(v: Sequence[int]) -> int:
    """Pack a bit vector into an int, position 0 in the most significant bit."""
    out = 0
    for b in v:
        out = (out << 1) | int(b)
    return out


def unpack_bits(x: int, n: int) -> np.ndarray:
    return np.array([(x >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def _unpack_many(xs: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((xs[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Immutable dense matrix over GF(2)."""

    bits: np.ndarray

    def __post_init__(self):
        a = np.array(self.bits, dtype=np.uint8, copy=True)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-D array, got shape {a.shape}")
        if a.size and a.max() > 1:
            raise ValueError("matrix entries must be 0 or 1")
        a.setflags(write=False)
        object.__setattr__(self, "bits", a)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int] | str], cols: int | None = None) -> "BinaryMatrix":
        parsed = [[int(c) for c in r] if isinstance(r, str) else list(r) for r in rows]
        if not parsed:
            return cls(np.zeros((0, cols or 0), dtype=np.uint8))
        return cls(np.array(parsed, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    def __getitem__(self, idx: tuple[int, int]) -> int:
        r, c = idx
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r}, {c}) out of range for {self.rows}x{self.cols} matrix")
        return int(self.bits[r, c])

    def row(self, r: int) -> np.ndarray:
        if not 0 <= r < self.rows:
            raise IndexError(f"row {r} out of range")
        return self.bits[r]

    def row_ints(self) -> list[int]:
        return [pack_bits(r) for r in self.bits]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.bits.shape, self.bits.tobytes()))

    def __repr__(self) -> str:
        body = ",".join("".join(map(str, r)) for r in self.bits)
        return f"BinaryMatrix({self.rows}x{self.cols}: {body})"


def rref(m: BinaryMatrix) -> tuple[BinaryMatrix, int, list[int]]:
    """Reduced row-echelon form over GF(2).

    Returns:
        (reduced, rank, pivot_columns). Zero rows are kept at the bottom so the
        shape is unchanged.
    """
    a = m.bits.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return BinaryMatrix(a), len(pivots), pivots


def rank(m: BinaryMatrix) -> int:
    return rref(m)[1]


def null_space(m: BinaryMatrix) -> BinaryMatrix:
    """Basis of {x : m x^T = 0} as rows."""
    red, rk, pivots = rref(m)
    n = m.cols
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    a = red.bits
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = a[r, f]
    return BinaryMatrix(basis)


@dataclass(frozen=True, eq=False)
class LinearCode:
    """Binary linear [n, k, d] code given by a full-row-rank generator matrix.

    The minimum distance is computed eagerly for n <= 20. Longer codes must
    declare ``d``; the declaration is spot-checked against random codewords.
    A k = 0 code (the zero code) is allowed so that duals of the full space
    are representable; it has no distance.
    """

    generator: BinaryMatrix
    d: int | None = None
    name: str | None = None

    def __post_init__(self):
        g = self.generator
        if not isinstance(g, BinaryMatrix):
            g = BinaryMatrix(np.asarray(g))
            object.__setattr__(self, "generator", g)
        if g.cols == 0:
            raise ValueError("block length must be positive")
        if g.rows > g.cols:
            raise ValueError(f"k={g.rows} exceeds n={g.cols}")
        if rank(g) != g.rows:
            raise ValueError("generator matrix is not full row rank")
        if g.rows == 0:
            object.__setattr__(self, "d", None)
            return
        if self.n <= EAGER_DISTANCE_MAX_N:
            true_d = _min_distance_enum(self)
            if self.d is not None and self.d != true_d:
                raise ValueError(f"declared distance {self.d} != enumerated {true_d}")
            object.__setattr__(self, "d", true_d)
        elif self.d is None:
            raise ValueError(f"n={self.n} > {EAGER_DISTANCE_MAX_N}: distance must be declared")
        else:
            _spot_check_distance(self, self.d)

    @property
    def n(self) -> int:
        return self.generator.cols

    @property
    def k(self) -> int:
        return self.generator.rows

    @property
    def t(self) -> int:
        """Bounded-distance decoding radius."""
        return 0 if self.d is None else (self.d - 1) // 2

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int] | str], d: int | None = None, name: str | None = None) -> "LinearCode":
        return cls(BinaryMatrix.from_rows(rows), d=d, name=name)

    @cached_property
    def parity_check(self) -> BinaryMatrix:
        return null_space(self.generator)

    @cached_property
    def codeword_ints(self) -> np.ndarray:
        if self.k > MAX_ENUM_DIM:
            raise DimensionTooLarge(f"2^{self.k} codewords is not enumerable")
        words = np.zeros(1, dtype=np.int64)
        for r in self.generator.row_ints():
            words = np.concatenate([words, words ^ r])
        return words

    @cached_property
    def codewords(self) -> np.ndarray:
        """All 2^k codewords as rows (row 0 is the zero word)."""
        return _unpack_many(self.codeword_ints, self.n)

    @cached_property
    def _codeword_set(self) -> frozenset[int]:
        return frozenset(int(x) for x in self.codeword_ints)

    @cached_property
    def _syndrome_weights(self) -> np.ndarray:
        h = self.parity_check.bits
        return (1 << np.arange(h.shape[0] - 1, -1, -1, dtype=np.int64))

    def syndrome(self, word) -> np.ndarray:
        return (self.parity_check.bits.astype(np.int64) @ as_bits(word).astype(np.int64)) % 2

    def syndrome_int(self, words: np.ndarray) -> np.ndarray:
        """Packed syndromes of the rows of ``words``."""
        h = self.parity_check.bits.astype(np.int64)
        s = (np.atleast_2d(words).astype(np.int64) @ h.T) % 2
        return s @ self._syndrome_weights

    def contains(self, word) -> bool:
        w = as_bits(word)
        if w.shape != (self.n,):
            raise ValueError(f"word length {w.shape} != n={self.n}")
        if self.k == 0:
            return not w.any()
        return not self.syndrome(w).any()

    def encode(self, message) -> np.ndarray:
        m = as_bits(message)
        return (m.astype(np.int64) @ self.generator.bits.astype(np.int64) % 2).astype(np.uint8)

    def same_codewords(self, other: "LinearCode") -> bool:
        if self.n != other.n or self.k != other.k:
            return False
        return all(other.contains(r) for r in self.generator.bits)

    @cached_property
    def coset_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Coset leaders of weight <= t indexed by packed syndrome.

        Returns ``(leaders, valid)`` where ``leaders[s]`` is the leader for
        syndrome ``s`` and ``valid[s]`` is False for syndromes with no leader
        inside the decoding radius.
        """
        if self.n > COSET_TABLE_MAX_N:
            raise DimensionTooLarge(f"coset table for n={self.n} not supported")
        if self.d is None:
            raise ValueError("zero code has no decoding radius")
        r = self.n - self.k
        leaders = np.zeros((1 << r, self.n), dtype=np.uint8)
        valid = np.zeros(1 << r, dtype=bool)
        for w in range(self.t + 1):
            for support in _combinations(self.n, w):
                e = np.zeros(self.n, dtype=np.uint8)
                e[list(support)] = 1
                s = int(self.syndrome_int(e)[0])
                if not valid[s]:
                    valid[s] = True
                    leaders[s] = e
        leaders.setflags(write=False)
        valid.setflags(write=False)
        return leaders, valid

    def to_text(self) -> str:
        lines = [f"{self.n} {self.k}"]
        lines += ["".join(map(str, r)) for r in self.generator.bits]
        return "\n".join(lines) + "\n"


def _combinations(n: int, w: int):
    from itertools import combinations

    return combinations(range(n), w)


def _min_distance_enum(c: LinearCode) -> int:
    words = c.codeword_ints[1:]
    return int(np.bitwise_count(words).min())


def _spot_check_distance(c: LinearCode, d: int, samples: int = 4096, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    g = c.generator.bits.astype(np.int64)
    msgs = rng.integers(0, 2, size=(samples, c.k))
    msgs = msgs[msgs.any(axis=1)]
    weights = ((msgs @ g) % 2).sum(axis=1)
    if weights.size and weights.min() < d:
        raise ValueError(f"declared distance {d} contradicted by a weight-{weights.min()} codeword")


def dual_code(c: LinearCode) -> LinearCode:
    """The dual code; dimension n - k."""
    h = c.parity_check
    if h.rows == 0:
        return LinearCode(BinaryMatrix.zeros(0, c.n))
    red, _, _ = rref(h)
    return LinearCode(red)


def min_distance(c: LinearCode) -> int:
    if c.k == 0:
        raise ValueError("the zero code has no nonzero codewords")
    if c.k > MAX_ENUM_DIM:
        raise DimensionTooLarge(f"k={c.k} exceeds enumeration limit {MAX_ENUM_DIM}")
    return _min_distance_enum(c)


def syndrome_decode(c: LinearCode, word) -> tuple[np.ndarray, np.ndarray]:
    """Bounded-distance decode via the coset-leader table.

    Returns ``(codeword, error)`` with ``codeword ^ error == word`` and
    ``weight(error) <= (d - 1) // 2``. Raises :class:`DecodeFailure` when the
    syndrome has no leader inside that radius.
    """
    w = as_bits(word)
    if w.shape != (c.n,):
        raise ValueError(f"word length {w.shape} != n={c.n}")
    codewords, errors, ok = decode_rows(c, w[None, :])
    if not ok[0]:
        raise DecodeFailure(f"no codeword within distance {c.t} of {''.join(map(str, w))}")
    return codewords[0], errors[0]


def decode_rows(c: LinearCode, words: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`syndrome_decode` over the rows of ``words``.

    Rows that fail to decode come back unchanged with a zero error and
    ``ok`` False.
    """
    words = np.atleast_2d(as_bits(words))
    leaders, valid = c.coset_table
    s = c.syndrome_int(words)
    ok = valid[s]
    errors = np.where(ok[:, None], leaders[s], 0).astype(np.uint8)
    return words ^ errors, errors, ok


def erasure_decode(c: LinearCode, known, erased: Iterable[int]) -> np.ndarray:
    """Return the unique codeword agreeing with ``known`` off the erased set.

    Values of ``known`` at erased positions are ignored.
    """
    w = as_bits(known)
    if w.shape != (c.n,):
        raise ValueError(f"word length {w.shape} != n={c.n}")
    erased = sorted(set(int(e) for e in erased))
    if any(not 0 <= e < c.n for e in erased):
        raise IndexError("erased position out of range")
    keep = [i for i in range(c.n) if i not in set(erased)]
    if c.k == 0:
        if w[keep].any():
            raise ErasureInconsistent("only the zero word is a codeword")
        return np.zeros(c.n, dtype=np.uint8)
    # Solve m G[:, keep] = w[keep] for the message m.
    gk = c.generator.bits[:, keep]
    aug = np.concatenate([gk.T, w[keep][:, None]], axis=1)
    red, rk, pivots = rref(BinaryMatrix(aug))
    if c.k in pivots:
        raise ErasureInconsistent("no codeword matches the known positions")
    if rk < c.k:
        raise ErasureAmbiguous(f"{len(erased)} erasures leave {2 ** (c.k - rk)} candidate codewords")
    m = np.zeros(c.k, dtype=np.uint8)
    for r, p in enumerate(pivots):
        m[p] = red.bits[r, c.k]
    return c.encode(m)


def bounded_decode(c: LinearCode, word, erased: Iterable[int] = ()) -> tuple[np.ndarray, np.ndarray]:
    """Errors-and-erasures decoding by codeword enumeration.

    Finds the codeword nearest to ``word`` on the non-erased positions,
    accepting it only within radius ``(d - 1 - |erased|) // 2``.

    Returns:
        (codeword, error) where ``error`` is zero on erased positions.
    """
    w = as_bits(word)
    erased = sorted(set(int(e) for e in erased))
    mask = np.ones(c.n, dtype=np.uint8)
    mask[erased] = 0
    if c.d is None or len(erased) > c.d - 1:
        raise DecodeFailure("too many erasures for this code")
    radius = (c.d - 1 - len(erased)) // 2
    cw = c.codewords
    dist = ((cw ^ w) & mask).sum(axis=1)
    best = int(np.argmin(dist))
    if dist[best] > radius:
        raise DecodeFailure(f"nearest codeword at distance {dist[best]} > radius {radius}")
    codeword = cw[best].copy()
    return codeword, (codeword ^ w) & mask


def parse_code_text(text: str, name: str | None = None) -> LinearCode:
    """Parse the ``"n k"`` header plus k generator rows format."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise CodeFormatError("empty code file")
    try:
        n, k = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise CodeFormatError(f"bad header line {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != k:
        raise CodeFormatError(f"header declares k={k} rows, found {len(rows)}")
    for i, r in enumerate(rows):
        if len(r) != n:
            raise CodeFormatError(f"row {i} has length {len(r)}, expected {n}")
        if set(r) - {"0", "1"}:
            raise CodeFormatError(f"row {i} contains characters other than 0/1")
    if k == 0:
        return LinearCode(BinaryMatrix.zeros(0, n), name=name)
    return LinearCode.from_rows(rows, name=name)


def load_code(path: str | Path) -> LinearCode:
    p = Path(path)
    return parse_code_text(p.read_text(), name=p.stem)


def save_code(c: LinearCode, path: str | Path) -> None:
    Path(path).write_text(c.to_text())

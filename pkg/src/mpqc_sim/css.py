"""CSS codes built from a pair of classical codes (V, W) with dual(V) <= W.

Conventions: measuring a codeword state in the standard basis yields a
codeword of V, measuring in the Fourier basis yields a codeword of W.
X-type stabilizers are indexed by dual(W), Z-type stabilizers by dual(V),
and the logical basis state |b> is the uniform superposition over the coset
dual(W) + b * x_logical inside V.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .gf2 import BinaryMatrix, LinearCode, dual_code, load_code


class DualContainmentViolated(ValueError):
    pass


class NonPositiveK(ValueError):
    pass


class KNotOne(ValueError):
    pass


class UnknownCode(KeyError):
    pass


class GateId(str, enum.Enum):
    H = "H"
    P = "P"
    T = "T"
    CX = "CX"
    X = "X"
    Y = "Y"
    Z = "Z"
    Pdag = "Pdag"
    CPdag = "CPdag"
    CXPdag = "CXPdag"

    @property
    def arity(self) -> int:
        return 2 if self in (GateId.CX, GateId.CPdag, GateId.CXPdag) else 1


class WeightClass(enum.IntEnum):
    unclassified = 0
    even = 1
    doubly_even = 2
    triply_even = 3


@dataclass(frozen=True, eq=False)
class CssCode:
    n: int
    k: int
    d: int
    v: LinearCode
    w: LinearCode
    x_stabilizers: np.ndarray
    z_stabilizers: np.ndarray
    weight_class: WeightClass
    name: str | None = None

    @property
    def t_max(self) -> int:
        return (self.d - 1) // 2

    @property
    def self_dual(self) -> bool:
        return self.v.same_codewords(self.w)

    @cached_property
    def v_dual(self) -> LinearCode:
        return dual_code(self.v)

    @cached_property
    def w_dual(self) -> LinearCode:
        return dual_code(self.w)

    @cached_property
    def x_logical(self) -> np.ndarray:
        """Support of a logical X operator: an element of V outside dual(W)."""
        self._require_k1()
        return _pick_logical(self.v, self.w_dual)

    @cached_property
    def z_logical(self) -> np.ndarray:
        """Support of a logical Z operator, with odd overlap with x_logical."""
        self._require_k1()
        z = _pick_logical(self.w, self.v_dual)
        assert int(z @ self.x_logical) % 2 == 1
        return z

    def _require_k1(self) -> None:
        if self.k != 1:
            raise KNotOne(f"operation requires k=1, code has k={self.k}")

    def describe(self) -> str:
        label = self.name or "css"
        return f"{label} [[{self.n},{self.k},{self.d}]] {self.weight_class.name}"


def _pick_logical(outer: LinearCode, inner: LinearCode) -> np.ndarray:
    ones = np.ones(outer.n, dtype=np.uint8)
    if outer.contains(ones) and not inner.contains(ones):
        return ones
    best = None
    for c in outer.codewords[1:]:
        if not inner.contains(c) and (best is None or c.sum() < best.sum()):
            best = c
    return best.copy()


def _quantum_distance(v: LinearCode, w: LinearCode, v_dual: LinearCode, w_dual: LinearCode) -> int:
    # X logicals live in V \ dual(W), Z logicals in W \ dual(V).
    def min_outside(outer: LinearCode, inner: LinearCode) -> int:
        cw = outer.codewords[1:]
        if inner.k:
            outside = inner.syndrome_int(cw) != 0
        else:
            outside = np.ones(len(cw), dtype=bool)
        return int(cw[outside].sum(axis=1).min())

    return min(min_outside(v, w_dual), min_outside(w, v_dual))


def _is_codeword_of(rows: np.ndarray, c: LinearCode) -> bool:
    return all(c.contains(r) for r in rows)


def build_css(
    v: LinearCode,
    w: LinearCode,
    *,
    x_stabilizers=None,
    z_stabilizers=None,
    name: str | None = None,
) -> CssCode:
    """Validate the pair (V, W) and assemble the CSS code.

    Stabilizer generator supports default to the reduced generator rows of
    dual(W) (X type) and dual(V) (Z type); a catalog may pass its own
    canonical generating sets, which are checked to generate the same groups.
    """
    if v.n != w.n:
        raise ValueError(f"block lengths differ: {v.n} vs {w.n}")
    n = v.n
    v_dual, w_dual = dual_code(v), dual_code(w)
    for row in v_dual.generator.bits:
        if not w.contains(row):
            raise DualContainmentViolated(f"dual(V) generator {''.join(map(str, row))} is not in W")
    k = v.k + w.k - n
    if k <= 0:
        raise NonPositiveK(f"k = {v.k} + {w.k} - {n} = {k}")

    xs = w_dual.generator.bits if x_stabilizers is None else _check_generators(x_stabilizers, w_dual, "X")
    zs = v_dual.generator.bits if z_stabilizers is None else _check_generators(z_stabilizers, v_dual, "Z")
    d = _quantum_distance(v, w, v_dual, w_dual)
    code = CssCode(
        n=n, k=k, d=d, v=v, w=w,
        x_stabilizers=np.array(xs, dtype=np.uint8),
        z_stabilizers=np.array(zs, dtype=np.uint8),
        weight_class=WeightClass.unclassified,
        name=name,
    )
    object.__setattr__(code, "weight_class", classify_weight(code))
    object.__setattr__(code, "v_dual", v_dual)
    object.__setattr__(code, "w_dual", w_dual)
    return code


def _check_generators(rows, group: LinearCode, kind: str) -> np.ndarray:
    a = BinaryMatrix.from_rows(rows, cols=group.n).bits
    if not _is_codeword_of(a, group):
        raise ValueError(f"{kind} stabilizer support outside its classical code")
    if LinearCode(BinaryMatrix(a[_independent_rows(a)])).k != group.k:
        raise ValueError(f"{kind} stabilizers do not generate the full stabilizer group")
    return a


def _independent_rows(a: np.ndarray) -> list[int]:
    from .gf2 import rank

    picked: list[int] = []
    for i in range(a.shape[0]):
        if rank(BinaryMatrix(a[picked + [i]])) == len(picked) + 1:
            picked.append(i)
    return picked


def classify_weight(code: CssCode) -> WeightClass:
    """Even / doubly-even / triply-even classification of the X generators.

    Triply-even additionally requires pairwise overlaps = 0 mod 4 and triple
    overlaps = 0 mod 2 so that it never over-claims transversal T.
    """
    xs = np.asarray(code.x_stabilizers, dtype=np.int64)
    if xs.size == 0:
        return WeightClass.unclassified
    weights = xs.sum(axis=1)
    if np.any(weights % 2):
        return WeightClass.unclassified
    if np.any(weights % 4):
        return WeightClass.even
    if np.any(weights % 8):
        return WeightClass.doubly_even
    for a, b in combinations(range(len(xs)), 2):
        if int(xs[a] @ xs[b]) % 4:
            return WeightClass.doubly_even
    for a, b, c in combinations(range(len(xs)), 3):
        if int((xs[a] * xs[b] * xs[c]).sum()) % 2:
            return WeightClass.doubly_even
    return WeightClass.triply_even


def transversal_gate_set(code: CssCode) -> frozenset[GateId]:
    gates = {GateId.CX}
    if code.weight_class >= WeightClass.doubly_even:
        gates.add(GateId.P)
    if code.weight_class == WeightClass.triply_even:
        gates.add(GateId.T)
    if code.self_dual:
        gates.add(GateId.H)
    return frozenset(gates)


def logical_codewords(code: CssCode, bit: int) -> np.ndarray:
    """Rows of the coset dual(W) + bit * x_logical."""
    code._require_k1()
    if bit not in (0, 1):
        raise ValueError("logical bit must be 0 or 1")
    base = code.w_dual.codewords
    return base ^ (code.x_logical * bit)


# Canonical generator sets. Positions of the 15-qubit code are the nonzero
# points of F_2^4 in increasing order; rows 0-3 are the coordinate functions
# (weight 8) and the last six Z rows are their pairwise products (weight 4).
_HAMMING_7 = ["0001111", "0110011", "1010101", "1111111"]
_STEANE_STABILIZERS = ["0001111", "0110011", "1010101"]

_RM_COORDS = [
    "000000011111111",
    "000111100001111",
    "011001100110011",
    "101010101010101",
]
_RM_PRODUCTS = [
    "000000000001111",
    "000000000110011",
    "000000001010101",
    "000001100000011",
    "000010100000101",
    "001000100010001",
]
_QRM_V = ["111111111111111"] + _RM_COORDS
_QRM_W = _RM_COORDS + _RM_PRODUCTS + ["111111111111111"]


def steane_7() -> CssCode:
    h = LinearCode.from_rows(_HAMMING_7, name="hamming_7_4")
    return build_css(
        h, h,
        x_stabilizers=_STEANE_STABILIZERS,
        z_stabilizers=_STEANE_STABILIZERS,
        name="steane_7",
    )


def quantum_reed_muller_15() -> CssCode:
    v = LinearCode.from_rows(_QRM_V, name="punctured_rm_1_4")
    w = LinearCode.from_rows(_QRM_W, name="hamming_15_11")
    return build_css(
        v, w,
        x_stabilizers=_RM_COORDS,
        z_stabilizers=_RM_COORDS + _RM_PRODUCTS,
        name="qrm_15",
    )


CATALOG = {
    "steane_7": steane_7,
    "qrm_15": quantum_reed_muller_15,
}

_cache: dict[str, CssCode] = {}


def get_code(name: str) -> CssCode:
    if name not in CATALOG:
        raise UnknownCode(f"unknown code {name!r}; known: {sorted(CATALOG)}")
    if name not in _cache:
        _cache[name] = CATALOG[name]()
    return _cache[name]


def load_css_files(v_path: str | Path, w_path: str | Path, name: str | None = None) -> CssCode:
    return build_css(load_code(v_path), load_code(w_path), name=name or Path(v_path).stem)

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpqc_sim.css import (
    CATALOG,
    DualContainmentViolated,
    GateId,
    KNotOne,
    NonPositiveK,
    UnknownCode,
    WeightClass,
    build_css,
    classify_weight,
    get_code,
    load_css_files,
    logical_codewords,
    transversal_gate_set,
)
from mpqc_sim.gf2 import BinaryMatrix, LinearCode, dual_code, rref, save_code


def test_steane_parameters():
    c = get_code("steane_7")
    assert (c.n, c.k, c.d, c.t_max) == (7, 1, 3, 1)
    assert c.self_dual
    assert c.weight_class == WeightClass.doubly_even
    assert transversal_gate_set(c) == {GateId.H, GateId.P, GateId.CX}


def test_qrm_parameters():
    c = get_code("qrm_15")
    assert (c.n, c.k, c.d, c.t_max) == (15, 1, 3, 1)
    assert not c.self_dual
    assert c.x_stabilizers.sum(axis=1).tolist() == [8, 8, 8, 8]
    assert c.weight_class == WeightClass.triply_even
    assert transversal_gate_set(c) == {GateId.T, GateId.P, GateId.CX}


def test_unknown_code():
    with pytest.raises(UnknownCode):
        get_code("nope")


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_stabilizers_commute_and_logicals_anticommute(name):
    c = get_code(name)
    assert not ((c.x_stabilizers.astype(int) @ c.z_stabilizers.T.astype(int)) % 2).any()
    assert not ((c.x_stabilizers.astype(int) @ c.z_logical) % 2).any()
    assert not ((c.z_stabilizers.astype(int) @ c.x_logical) % 2).any()
    assert int(c.x_logical @ c.z_logical) % 2 == 1


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_quantum_distance_by_enumeration(name):
    # minimum weight of an X (or Z) operator commuting with all stabilizers but not a stabilizer
    c = get_code(name)
    best = c.n
    for bits in product((0, 1), repeat=c.n) if c.n <= 7 else ():
        v = np.array(bits)
        if v.any() and c.v.contains(v) and not c.w_dual.contains(v):
            best = min(best, int(v.sum()))
    if c.n <= 7:
        assert best == c.d
    # both logical cosets have the right size
    for b in (0, 1):
        assert len({tuple(w) for w in logical_codewords(c, b)}) == 2 ** c.w_dual.k


def test_dual_containment_violation():
    v = LinearCode.from_rows(["1100000", "0011000", "0000110", "1111111"])
    w = LinearCode.from_rows(["1010000", "0101000", "0000101", "1111111"])
    with pytest.raises(DualContainmentViolated):
        build_css(v, w)


def test_non_positive_k():
    # W = dual(V) satisfies containment but leaves k = 1 + 3 - 4 = 0
    rep = LinearCode.from_rows(["1111"])
    even = LinearCode.from_rows(["1100", "0110", "0011"])
    with pytest.raises(NonPositiveK):
        build_css(rep, even)


def test_k_two_code_rejects_logical_ops():
    even = LinearCode.from_rows(["1100", "0110", "0011"])
    c = build_css(even, even)
    assert c.k == 2
    with pytest.raises(KNotOne):
        c.x_logical


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_random_pairs_either_build_or_raise(seed):
    """Fuzz: random (V, W) pairs build only when dual(V) lies inside W."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))

    def rand_code():
        while True:
            g = rng.integers(0, 2, size=(int(rng.integers(1, n + 1)), n)).astype(np.uint8)
            red, r, _ = rref(BinaryMatrix(g))
            if r:
                return LinearCode(BinaryMatrix(red.bits[:r]))

    v, w = rand_code(), rand_code()
    contained = all(w.contains(row) for row in dual_code(v).generator.bits)
    if not contained:
        with pytest.raises(DualContainmentViolated):
            build_css(v, w)
    elif v.k + w.k - n <= 0:
        with pytest.raises(NonPositiveK):
            build_css(v, w)
    else:
        c = build_css(v, w)
        assert c.k == v.k + w.k - n


def test_classify_weight_rejects_overlap_violations():
    # weight-8 generators whose pairwise overlap is 2 mod 4 cannot be triply even
    xs = np.array([[1] * 8 + [0] * 8, [1] * 2 + [0] * 6 + [1] * 6 + [0] * 2], dtype=np.uint8)

    class Fake:
        x_stabilizers = xs

    assert classify_weight(Fake) == WeightClass.doubly_even


def test_load_css_files(tmp_path):
    c = get_code("steane_7")
    save_code(c.v, tmp_path / "v.txt")
    save_code(c.w, tmp_path / "w.txt")
    loaded = load_css_files(tmp_path / "v.txt", tmp_path / "w.txt")
    assert (loaded.n, loaded.k, loaded.d) == (7, 1, 3)
    assert loaded.weight_class == WeightClass.doubly_even

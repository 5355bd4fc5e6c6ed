"""The nine acceptance criteria, each at its stated tolerance.

Every test reports one PASS/FAIL line (also collected in the terminal
summary) before asserting.
"""

import time
from itertools import combinations, product

import numpy as np

from mpqc_sim.adversary import Hook, OverThreshold, PauliInjector
from mpqc_sim.analysis import LEMMA_OPS, bounded_pattern, fit_proportional, lemma_check, loglog_exponent
from mpqc_sim.css import GateId, WeightClass, get_code
from mpqc_sim.engine import mpqc_run, vhss_roundtrip
from mpqc_sim.statevector import (
    GATE_MATRICES,
    H,
    PDAG,
    X,
    check_transversal_action,
    clifford_membership,
    eigen_check,
    fidelity,
    random_state,
    single_qubit,
    teleport_h_oracle,
)

PAULIS = ("X", "Y", "Z")
ALL_HOOKS = tuple(h.value for h in Hook if h != Hook.PRE_BROADCAST)
ALL_ROLES = ("data", "check_x", "check_z")


def test_1_code_classification(acceptance):
    start = time.perf_counter()
    q, s = get_code("qrm_15"), get_code("steane_7")
    ok = ((q.n, q.k, q.d) == (15, 1, 3)
          and q.x_stabilizers.sum(axis=1).tolist() == [8, 8, 8, 8]
          and q.weight_class == WeightClass.triply_even
          and (s.n, s.k, s.d) == (7, 1, 3) and s.self_dual)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1
    acceptance(1, ok, f"qrm_15 [[{q.n},{q.k},{q.d}]] {q.weight_class.name}, steane_7 self-dual={s.self_dual}, "
                      f"{elapsed:.2f}s")
    assert ok


def test_2_transversality(acceptance):
    start = time.perf_counter()
    tol = 1e-9
    q, s = get_code("qrm_15"), get_code("steane_7")
    reports = {(c.name, g): check_transversal_action(c, g, tol)
               for c in (q, s) for g in (GateId.CX, GateId.P, GateId.T, GateId.H)}
    ok = all(reports[("qrm_15", g)].preserves_codespace and reports[("qrm_15", g)].induced_logical
             for g in (GateId.CX, GateId.P, GateId.T))
    ok &= reports[("qrm_15", GateId.H)].leakage > 1e-6
    ok &= all(reports[("steane_7", g)].preserves_codespace and reports[("steane_7", g)].induced_logical
              for g in (GateId.CX, GateId.H, GateId.P))
    ok &= not reports[("steane_7", GateId.T)].preserves_codespace
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < 60
    summary = ", ".join(f"{c}:{g.value}->{r.induced_logical or f'leak {r.leakage:.3g}'}"
                        for (c, g), r in reports.items())
    acceptance(2, ok, f"{summary}; {elapsed:.1f}s")
    assert ok


def test_3_teleportation(acceptance):
    start = time.perf_counter()
    worst, tables = 1.0, set()
    for seed in range(100):
        rng = np.random.default_rng(seed)
        state = random_state(rng)
        out, table = teleport_h_oracle(state, rng)
        worst = min(worst, fidelity(out, H @ state.amplitudes))
        tables.add(tuple(sorted(table.items())))
    elapsed = time.perf_counter() - start
    ok = worst >= 1 - 1e-9 and len(tables) == 1 and elapsed < 1
    acceptance(3, ok, f"min fidelity {worst:.12f} over 100 inputs, table {dict(next(iter(tables)))}, "
                      f"{elapsed:.2f}s")
    assert ok


def test_4_eigenvalue_and_clifford_checks(acceptance):
    start = time.perf_counter()
    m = single_qubit("m")
    lam1 = eigen_check(X @ PDAG, m)
    lam2 = eigen_check(np.exp(1j * np.pi / 4) * X @ PDAG, m)
    ok = (lam1 is not None and abs(lam1 - np.exp(7j * np.pi / 4)) <= 1e-10
          and lam2 is not None and abs(lam2 - 1) <= 1e-10)
    witnesses = {}
    for g in (GateId.CPdag, GateId.CXPdag):
        rep = clifford_membership(GATE_MATRICES[g])
        ok = ok and not rep.is_clifford and rep.witness is not None
        witnesses[g.value] = rep.witness
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1
    acceptance(4, ok, f"eigenvalues {lam1:.6f}, {lam2:.6f}; non-Clifford witnesses {witnesses}; {elapsed:.2f}s")
    assert ok


def _roundtrip_ok(rep) -> bool:
    return rep.reconstructed and not rep.aborted and rep.fidelity is not None and rep.fidelity >= 1 - 1e-9


def test_5_vhss_correctness_and_soundness(acceptance):
    steane = get_code("steane_7")
    failures, cases = [], 0
    # one corrupted node l puts a Pauli on the slot it holds in block j
    for j, l, p in product(range(7), range(7), PAULIS):
        strat = PauliInjector(slots=((j, l),), pauli=p, corrupted=(l,))
        rep = vhss_roundtrip(steane, 1, 1, seed=cases, strategy=strat)
        cases += 1
        if not (_roundtrip_ok(rep) and j in rep.flagged_blocks and rep.B <= {l}):
            failures.append(("single", j, l, p))
    single = cases
    # the encoder of block j (its only corrupted node) spoils two slots of its own block
    for j, (l1, l2), (p1, p2) in product(range(7), combinations(range(7), 2), product(PAULIS, repeat=2)):
        strat = PauliInjector(slots=((j, l1), (j, l2)), paulis=(p1, p2), corrupted=(j,))
        rep = vhss_roundtrip(steane, 1, 1, seed=cases, strategy=strat)
        cases += 1
        if not (_roundtrip_ok(rep) and j in rep.flagged_blocks and rep.B == {j}):
            failures.append(("pair", j, l1, l2, p1, p2))
    # randomized bounded strategies on the 15-qubit code
    qrm = get_code("qrm_15")
    rng = np.random.default_rng(2024)
    random_fail = 0
    for k in range(1000):
        hooks = tuple(h for h in ALL_HOOKS if rng.random() < 0.6) or ALL_HOOKS[:1]
        roles = tuple(r for r in ALL_ROLES if rng.random() < 0.6) or ALL_ROLES[:1]
        strat = PauliInjector(hooks=hooks, roles=roles, pauli="random", count=int(rng.integers(1, 4)),
                              once=bool(rng.integers(0, 2)))
        rep = vhss_roundtrip(qrm, 1, 1, seed=10_000 + k, strategy=strat, dealer=int(rng.integers(0, 15)))
        if not _roundtrip_ok(rep):
            random_fail += 1
    ok = not failures and random_fail == 0
    acceptance(5, ok, f"steane_7 {single} single-slot + {cases - single} two-slot cases, {len(failures)} failures; "
                      f"qrm_15 1000 random bounded strategies, {random_fail} failures")
    assert ok, failures[:5]


def test_6_abort_behaviour(acceptance):
    circuits = [(), ("CX 0 1",), ("P 2", "H 0"), ("ancilla0 1",)]
    wrong = []
    for seed in range(200):
        code = "steane_7" if seed % 2 == 0 else "qrm_15"
        circuit = circuits[seed % len(circuits)]
        if code == "qrm_15":
            circuit = tuple(g.replace("P", "T") for g in circuit)
        if seed < 100:
            tr = mpqc_run({"code": code, "seed": seed, "circuit": circuit, "adversary": OverThreshold().to_json()})
            honest_zero = all(out["label"] == "|0>" for j, out in enumerate(tr.outputs) if j not in tr.corrupted)
            if tr.outcome != "aborted" or not honest_zero:
                wrong.append(("over", seed))
        else:
            adv = PauliInjector(hooks=ALL_HOOKS, roles=ALL_ROLES + ("plus",), pauli="random", count=int(seed % 3) + 1,
                                once=False).to_json()
            tr = mpqc_run({"code": code, "seed": seed, "circuit": circuit, "adversary": adv})
            if tr.outcome != "success":
                wrong.append(("bounded", seed))
    ok = not wrong
    acceptance(6, ok, f"100 over-threshold + 100 bounded runs, {len(wrong)} misclassified")
    assert ok, wrong[:5]


def test_7_resource_accounting(acceptance):
    cases = [
        ("steane_7", ("P 0", "CX 1 2"), 0, 0),
        ("steane_7", ("H 0",), 1, 0),
        ("steane_7", ("ancilla0 1", "H 2", "H 3"), 2, 1),
        ("qrm_15", ("T 0", "CX 0 1"), 0, 0),
        ("qrm_15", ("H 0", "ancilla0 4"), 1, 1),
    ]
    bad = []
    for code, circuit, nh, na in cases:
        n = get_code(code).n
        tr = mpqc_run({"code": code, "circuit": circuit, "seed": 1})
        want = n * n + (3 * n if nh else 2 * n)
        if tr.peak_qubits != want or tr.kappa != n + na + nh or (tr.num_h, tr.num_ancillas) != (nh, na):
            bad.append((code, circuit, tr.peak_qubits, want, tr.kappa))
    ok = not bad
    acceptance(7, ok, f"{len(cases)} transcripts, peak n^2+2n / n^2+3n and kappa = n + #ancillas + #H exact; "
                      f"{len(bad)} mismatches")
    assert ok, bad


def test_8_communication_scaling(acceptance):
    start = time.perf_counter()
    rs = list(range(2, 7))
    lines, ok = [], True
    for name in ("steane_7", "qrm_15"):
        code = get_code(name)
        n = code.n
        per_call = [int(vhss_roundtrip(code, 1, r, seed=r).comm_per_node.max()) for r in rs]
        c, resid = fit_proportional([n * n * r * r for r in rs], per_call)
        ok &= resid <= 0.15
        lines.append(f"{name} VHSS c={c:.3g} resid={resid:.3f} slope={loglog_exponent(rs, per_call):.2f}")
        circuits = [(), ("H 0",), ("CX 0 1", "ancilla0 2", "H 3")]
        xs, ys = [], []
        for circuit in circuits:
            for r in rs:
                tr = mpqc_run({"code": name, "r": r, "circuit": circuit})
                xs.append(tr.kappa * n * r * r)
                ys.append(tr.comm_qubits)
        c, resid = fit_proportional(xs, ys)
        ok &= resid <= 0.15
        lines.append(f"{name} full run c={c:.3g} resid={resid:.3f}")
    elapsed = time.perf_counter() - start
    ok = bool(ok) and elapsed < 300
    acceptance(8, ok, "; ".join(lines) + f"; {elapsed:.0f}s")
    assert ok


def test_9_decoding_commutes_with_operations(acceptance):
    failures = {}
    for name in ("steane_7", "qrm_15"):
        code = get_code(name)
        for op in LEMMA_OPS:
            rng = np.random.default_rng(code.n * 100 + LEMMA_OPS.index(op))
            bad = 0
            for k in range(1000):
                pat = bounded_pattern(code, rng)
                if op == "CX":
                    pat = (pat, bounded_pattern(code, rng))
                elif op == "H":
                    pat = (pat, bounded_pattern(code, rng, logical=False))
                bad += not lemma_check(code, op, pat, seed=k)
            if bad:
                failures[(name, op)] = bad
    ok = not failures
    acceptance(9, ok, f"{len(LEMMA_OPS)} ops x 2 codes x 1000 bounded patterns, failures {failures or 0}")
    assert ok

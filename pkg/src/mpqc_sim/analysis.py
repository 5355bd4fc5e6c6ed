"""Decoding/operation commutation checks and resource scaling fits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .css import CssCode, GateId
from .engine import ProtocolTranscript
from .gf2 import DecodeFailure
from .pauli_frame import FOURIER, STANDARD, ShareGrid, decode_frame, double_decode, frame_measure, propagate

LEMMA_OPS = ("P", "T", "CX", "Y", "H", "measure_standard", "measure_fourier")


def _as_grid(code: CssCode, pattern, index: int = 0) -> ShareGrid:
    if isinstance(pattern, ShareGrid):
        return pattern
    x, z = pattern
    return ShareGrid(index, code, "psi", np.asarray(x), np.asarray(z))


def _conjugate(op: str, a: int, b: int) -> tuple[int, int]:
    """Logical Pauli X^a Z^b after conjugation by a single-qubit Clifford (phases dropped)."""
    if op == "P":
        return a, b ^ a
    if op == "H":
        return b, a
    return a, b


def lemma_check(code: CssCode, op: str, pattern, seed: int = 0) -> bool:
    """Does decoding commute with ``op`` for this error pattern?

    ``pattern`` is an (x, z) pair of n x n frames (a pair of such pairs for
    CX, and for H the data pattern optionally paired with a pattern on the
    |+> ancilla). Both sides are evaluated in the frame domain: the residual
    logical Pauli after decoding the transformed frame must equal the
    decoded residual transformed by the logical operation. For the logical
    measurements the twice-decoded bit must equal the true bit flipped by
    the decoded residual. Patterns that fail to decode give False.
    """
    if op not in LEMMA_OPS:
        raise ValueError(f"unknown op {op!r}; expected one of {LEMMA_OPS}")
    rng = np.random.default_rng(seed)
    try:
        if op == "CX":
            ctl, tgt = (_as_grid(code, p, i) for i, p in enumerate(pattern))
            (a1, b1), (a2, b2) = decode_frame(ctl), decode_frame(tgt)
            c2, t2 = propagate((ctl, tgt), GateId.CX)
            return (decode_frame(c2), decode_frame(t2)) == ((a1, b1 ^ b2), (a2 ^ a1, b2))
        if op == "H":
            if isinstance(pattern, tuple) and len(pattern) == 2 and isinstance(pattern[0], tuple):
                data, plus = _as_grid(code, pattern[0]), _as_grid(code, pattern[1], 1)
            else:
                data = _as_grid(code, pattern)
                plus = ShareGrid(1, code, "|+>", np.zeros_like(data.x), np.zeros_like(data.z))
            before = decode_frame(data)
            plus, data = propagate(plus, GateId.P), propagate(data, GateId.P)
            plus, data = propagate((plus, data), GateId.CX)
            data = propagate(data, GateId.P)
            true_bit = int(rng.integers(0, 2))
            read = double_decode(frame_measure(plus, FOURIER, rng, logical_bit=true_bit), code).bit
            if read is None:
                return False
            a, b = decode_frame(data)
            # A misread outcome swaps which correction is applied: an extra Y.
            if read != true_bit:
                a, b = a ^ 1, b ^ 1
            return (a, b) == _conjugate("H", *before)
        grid = _as_grid(code, pattern)
        a, b = decode_frame(grid)
        if op in ("measure_standard", "measure_fourier"):
            basis = STANDARD if op == "measure_standard" else FOURIER
            true_bit = int(rng.integers(0, 2))
            read = double_decode(frame_measure(grid, basis, rng, logical_bit=true_bit), code).bit
            flip = a if basis == STANDARD else b
            return read == true_bit ^ flip
        after = decode_frame(propagate(grid, GateId(op), rng))
        if op == "T":
            # T maps a logical X outside the Pauli group; only its X part is comparable.
            return after[0] == a and (a == 1 or after[1] == b)
        return after == _conjugate(op, a, b)
    except DecodeFailure:
        return False


def bounded_pattern(code: CssCode, rng: np.random.Generator, max_blocks: int | None = None,
                    max_slots: int | None = None, logical: bool = True):
    """Random frame with at most t_max blocks, each with at most t_max slots hit.

    With ``logical`` a random two-level logical Pauli is multiplied in, so the
    decoded residual is not always the identity.
    """
    n = code.n
    tb = code.t_max if max_blocks is None else max_blocks
    ts = code.t_max if max_slots is None else max_slots
    x = np.zeros((n, n), dtype=np.uint8)
    z = np.zeros((n, n), dtype=np.uint8)
    k = int(rng.integers(0, tb + 1))
    for j in rng.choice(n, size=k, replace=False):
        m = int(rng.integers(1, ts + 1))
        for l in rng.choice(n, size=m, replace=False):
            p = int(rng.integers(1, 4))
            x[j, l] ^= p & 1
            z[j, l] ^= p >> 1
    if logical:
        if rng.integers(0, 2):
            x[code.x_logical.astype(bool)] ^= code.x_logical
        if rng.integers(0, 2):
            z[code.z_logical.astype(bool)] ^= code.z_logical
    return x, z


def fit_proportional(x, y) -> tuple[float, float]:
    """Least-squares ``y = c * x``; returns ``(c, ||y - c x|| / ||y||)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = float(x @ y / (x @ x))
    resid = float(np.linalg.norm(y - c * x) / np.linalg.norm(y))
    return c, resid


def loglog_exponent(x, y) -> float:
    slope, _ = np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)
    return float(slope)


@dataclass
class ResourceReport:
    peak_per_node: list[int]
    comm_per_node: list[int]
    kappa: int
    num_h: int
    num_ancillas: int
    peak: int
    comm: int
    fit: dict | None = None


def resource_report(transcripts) -> ResourceReport | list[ResourceReport]:
    """Per-node workspace and traffic; for a list of runs also the r-scaling fit.

    The fit regresses the maximum per-node traffic on ``kappa * n * r^2``.
    """
    if isinstance(transcripts, ProtocolTranscript):
        return _report(transcripts)
    reports = [_report(tr) for tr in transcripts]
    if len(transcripts) >= 2:
        xs = [tr.kappa * tr.n * tr.r ** 2 for tr in transcripts]
        ys = [rep.comm for rep in reports]
        c, resid = fit_proportional(xs, ys)
        rs = [tr.r for tr in transcripts]
        fit = {"model": "kappa*n*r^2", "c": c, "relative_residual": resid}
        if len(set(rs)) > 1 and len({tr.kappa for tr in transcripts}) == 1:
            fit["r_exponent"] = loglog_exponent(rs, ys)
        for rep in reports:
            rep.fit = fit
    return reports


def _report(tr: ProtocolTranscript) -> ResourceReport:
    res = tr.counters
    comm = [s + r for s, r in zip(res["qubits_sent"], res["qubits_received"])]
    return ResourceReport(res["peak_qubits"], comm, tr.kappa, tr.num_h, tr.num_ancillas,
                          tr.peak_qubits, tr.comm_qubits)


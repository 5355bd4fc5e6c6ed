"""Verifiable two-level sharing, H teleportation and the full computation run.

Every encoded logical qubit is a :class:`~mpqc_sim.pauli_frame.ShareGrid`
(its error frame) plus, when the run is small enough, a wire of a
:class:`~mpqc_sim.register.LogicalRegister` (its content). Verification and
reconstruction only ever look at the frame and at measured words, exactly
as the nodes would; the register supplies the true logical outcomes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .adversary import Adversary, AdversaryStrategy, Honest, Hook, HookView, corrupt_set, strategy_from_json
from .css import CssCode, GateId, get_code, transversal_gate_set
from .gf2 import ErasureAmbiguous, ErasureInconsistent
from .network import CheaterSets, NetworkModel, ResourceCounters
from .pauli_frame import (
    EIGEN_LABELS,
    FOURIER,
    STANDARD,
    LogicalWord,
    ShareGrid,
    block_residuals,
    double_decode,
    first_level_residual,
    frame_measure,
    honest_share,
    inject,
    propagate,
)
from .register import LogicalRegister, REGISTER_CEILING, bloch_vector, label_state
from .statevector import CX, H, P, T, Y, check_transversal_action, fidelity, teleport_correction_table

SCHEMA_VERSION = 1

VERIFY_INPUT = "verify_input"
CONFIRM_ZERO = "confirm_zero"
CONFIRM_PLUS = "confirm_plus"
MODES = (VERIFY_INPUT, CONFIRM_ZERO, CONFIRM_PLUS)

# (X-check ancilla, Z-check ancilla) per verification mode.
_CHECK_ANCILLAS = {
    VERIFY_INPUT: ("|+>", "|0>"),
    CONFIRM_ZERO: ("|0>", "|0>"),
    CONFIRM_PLUS: ("|+>", "|+>"),
}

CIRCUIT_GATES = {"H": 1, "P": 1, "T": 1, "CX": 2, "ancilla0": 1}
METRIC_FIELDS = ["n", "t", "r", "num_h", "num_ancillas", "kappa", "peak_qubits", "comm_qubits", "outcome"]


class ConfigInvalid(ValueError):
    pass


class NotTransversal(ValueError):
    pass


class ReconstructFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Gate:
    name: str
    wires: tuple[int, ...]

    @classmethod
    def parse(cls, spec) -> "Gate":
        if isinstance(spec, str):
            parts = spec.replace(",", " ").split()
        elif isinstance(spec, dict):
            parts = [spec["gate"], *spec["wires"]]
        else:
            parts = list(spec)
        if not parts:
            raise ConfigInvalid("empty gate")
        name = str(parts[0])
        if name not in CIRCUIT_GATES:
            raise ConfigInvalid(f"unknown circuit gate {name!r}; known: {sorted(CIRCUIT_GATES)}")
        try:
            wires = tuple(int(w) for w in parts[1:])
        except ValueError as err:
            raise ConfigInvalid(f"bad wire in {spec!r}") from err
        if len(wires) != CIRCUIT_GATES[name]:
            raise ConfigInvalid(f"{name} takes {CIRCUIT_GATES[name]} wire(s), got {wires}")
        if len(set(wires)) != len(wires):
            raise ConfigInvalid(f"repeated wire in {spec!r}")
        return cls(name, wires)

    def __str__(self) -> str:
        return " ".join([self.name, *map(str, self.wires)])


@dataclass(frozen=True)
class CircuitDescription:
    wires: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        for g in self.gates:
            if any(not 0 <= w < self.wires for w in g.wires):
                raise ConfigInvalid(f"gate {g} uses a wire outside 0..{self.wires - 1}")

    @classmethod
    def parse(cls, wires: int, specs) -> "CircuitDescription":
        return cls(wires, tuple(Gate.parse(s) for s in specs))

    @property
    def num_h(self) -> int:
        return sum(g.name == "H" for g in self.gates)

    @property
    def num_ancillas(self) -> int:
        return sum(g.name == "ancilla0" for g in self.gates)


@dataclass(frozen=True)
class ProtocolConfig:
    """Parameters of one run; ``n`` defaults to the code length."""

    code: str = "steane_7"
    n: int | None = None
    t: int = 1
    r: int = 1
    seed: int = 0
    circuit: tuple = ()
    inputs: tuple[str, ...] | None = None
    adversary: dict | None = None
    track_state: bool | None = None

    @classmethod
    def from_json(cls, data: dict) -> "ProtocolConfig":
        known = {"code", "n", "t", "r", "seed", "circuit", "inputs", "adversary", "track_state"}
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalid(f"unknown config keys {sorted(unknown)}")
        d = dict(data)
        if "circuit" in d:
            d["circuit"] = tuple(tuple(g) if isinstance(g, list) else g for g in d["circuit"])
        if d.get("inputs") is not None:
            d["inputs"] = tuple(d["inputs"])
        return cls(**d)

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "n": self.n,
            "t": self.t,
            "r": self.r,
            "seed": self.seed,
            "circuit": [str(Gate.parse(g)) for g in self.circuit],
            "inputs": list(self.inputs) if self.inputs is not None else None,
            "adversary": self.adversary or {"variant": "Honest"},
            "track_state": self.track_state,
        }


def validate_config(cfg: ProtocolConfig, code: CssCode | None = None) -> tuple[CssCode, CircuitDescription, tuple[str, ...]]:
    try:
        code = code or get_code(cfg.code)
    except KeyError as err:
        raise ConfigInvalid(str(err)) from err
    n = cfg.n if cfg.n is not None else code.n
    if n != code.n:
        raise ConfigInvalid(f"n={n} must equal the code length {code.n}")
    if cfg.t < 0 or not 4 * cfg.t < n:
        raise ConfigInvalid(f"t={cfg.t} violates t < n/4 for n={n}")
    if cfg.t > code.t_max:
        raise ConfigInvalid(f"t={cfg.t} exceeds the code's correctable weight {code.t_max}")
    if cfg.r < 1:
        raise ConfigInvalid("security parameter r must be at least 1")
    circuit = CircuitDescription.parse(n, cfg.circuit)
    allowed = transversal_gate_set(code)
    for g in circuit.gates:
        if g.name in ("P", "T", "CX") and GateId(g.name) not in allowed:
            raise ConfigInvalid(f"gate {g.name} is not transversal for {code.name}")
    inputs = tuple(cfg.inputs) if cfg.inputs is not None else ("|0>",) * n
    if len(inputs) != n:
        raise ConfigInvalid(f"need {n} inputs, got {len(inputs)}")
    for lab in inputs:
        try:
            label_state(lab, np.random.default_rng(0))
        except ValueError as err:
            raise ConfigInvalid(str(err)) from err
    try:
        strategy_from_json(cfg.adversary)
    except (TypeError, ValueError) as err:
        raise ConfigInvalid(f"bad adversary spec: {err}") from err
    return code, circuit, inputs


@lru_cache(maxsize=None)
def _two_level_action(code_name: str, gate: str) -> np.ndarray:
    """Logical unitary that a transversal gate induces on a two-level encoded qubit."""
    code = get_code(code_name)
    first = check_transversal_action(code, GateId(gate))
    if not first.preserves_codespace:
        raise NotTransversal(f"{gate} does not preserve the {code_name} codespace")
    second = check_transversal_action(code, first.induced_matrix)
    return second.induced_matrix


def induced_two_level(code: CssCode, gate: GateId | str) -> np.ndarray:
    gate = GateId(gate)
    if code.name in ("steane_7", "qrm_15"):
        return _two_level_action(code.name, gate.value)
    first = check_transversal_action(code, gate)
    if not first.preserves_codespace:
        raise NotTransversal(f"{gate.value} does not preserve the codespace")
    return check_transversal_action(code, first.induced_matrix).induced_matrix


@dataclass
class Session:
    """Mutable state of one run: network, cheater sets, adversary, random streams."""

    code: CssCode
    t: int
    r: int
    net: NetworkModel
    cheaters: CheaterSets
    adversary: Adversary
    nature: np.random.Generator
    register: LogicalRegister | None = None
    events: list = field(default_factory=list)
    substitutions: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def counters(self) -> ResourceCounters:
        return self.net.counters

    @classmethod
    def create(cls, code: CssCode, t: int, r: int, seed: int, strategy: AdversaryStrategy | None = None,
               track_state: bool = True, ceiling: int = REGISTER_CEILING) -> "Session":
        public_ss, nature_ss, adv_ss, corrupt_ss = np.random.SeedSequence(seed).spawn(4)
        strategy = strategy or Honest()
        corrupted = corrupt_set(strategy, code.n, t, np.random.default_rng(corrupt_ss))
        return cls(
            code=code, t=t, r=r,
            net=NetworkModel(code.n, np.random.default_rng(public_ss)),
            cheaters=CheaterSets(code.n, t),
            adversary=Adversary(strategy, corrupted, np.random.default_rng(adv_ss)),
            nature=np.random.default_rng(nature_ss),
            register=LogicalRegister(ceiling) if track_state else None,
        )

    def event(self, kind: str, **details) -> None:
        self.events.append({"kind": kind, "phase": self.counters.phase, **details})

    def fire(self, view: HookView, grid: ShareGrid) -> ShareGrid:
        for m in self.adversary.intervene(view):
            if m.kind == "inject":
                grid = inject(grid, m.slots, m.pauli)
            elif m.kind == "first_level":
                x, z = grid.x.copy(), grid.z.copy()
                for j in m.blocks:
                    if m.pauli in ("X", "Y"):
                        x[j] ^= self.code.x_logical
                    if m.pauli in ("Z", "Y"):
                        z[j] ^= self.code.z_logical
                grid = grid.with_frame(x, z)
            elif m.kind == "substitute":
                self.substitutions.append({"index": view.index, "declared": grid.logical_value, "actual": m.label})
                grid = grid.relabel(m.label)
        return grid

    def announce(self, word: LogicalWord, view: HookView) -> LogicalWord:
        for m in self.adversary.intervene(view):
            if m.kind == "flip":
                word = word.flip(m.mask)
        for l in range(self.n):
            self.net.broadcast(l, word.bits[:, l])
        # Every node reads back the same announced word from the log.
        entries = self.net.view(0)[-self.n:]
        return LogicalWord(np.array([e.payload for e in entries], dtype=np.uint8).T, word.basis)

    def pick_dealer(self) -> int:
        honest_looking = sorted(set(range(self.n)) - self.cheaters.B)
        pool = honest_looking or list(range(self.n))
        return int(self.net.public.choice(pool))


def vhss_share(s: Session, dealer: int, label: str, tag: str, *, role: str = "data",
               index: int = 0, round: int | None = None) -> ShareGrid:
    """Two-level encode ``label`` by ``dealer`` and distribute it over the grid."""
    if not 0 <= dealer < s.n:
        raise ValueError(f"dealer {dealer} out of range")
    grid = honest_share(s.code, label, index)
    s.net.distribute(dealer, tag)
    s.counters.hold(s.n)
    view = HookView(Hook.POST_SHARE, s.n, s.t, dealer, role, index, round)
    return s.fire(view, grid)


def attach_wire(s: Session, grid: ShareGrid, amplitudes: np.ndarray | None = None) -> ShareGrid:
    """Give a freshly shared grid its logical-register wire."""
    if s.register is None:
        return grid
    amps = label_state(grid.logical_value) if amplitudes is None else amplitudes
    return ShareGrid(grid.index, grid.code, grid.logical_value, grid.x, grid.z, s.register.add(amps))


@dataclass
class VerifyOutcome:
    grid: ShareGrid
    cheaters: CheaterSets
    flagged: set
    confirmed: bool


def record_check(s: Session, tag: str, dealer: int, word: LogicalWord, expect: int | None, checkpoint: str):
    """Decode an announced word and update the cheater sets for grid ``tag``."""
    dd = double_decode(word, s.code)
    per_block = s.cheaters.per_block[tag]
    flags = set()
    for j in range(s.n):
        per_block[j].update(int(p) for p in np.flatnonzero(dd.block_errors[j]))
        if not dd.block_ok[j] or len(per_block[j]) > s.t:
            flags.add(j)
    flags.update(int(j) for j in np.flatnonzero(dd.first_errors))
    if dd.bit is None or (expect is not None and dd.bit != expect):
        flags.add(dealer)
    s.cheaters.flag(tag, flags, f"{word.basis} check", checkpoint)
    return dd, flags


def _data_bit(s: Session, grid: ShareGrid, basis: str) -> int | None:
    if s.register is not None and grid.wire is not None:
        return s.register.measure(grid.wire, basis, s.nature)
    return EIGEN_LABELS.get((basis, grid.logical_value))


def vhss_verify(s: Session, grid: ShareGrid, mode: str, tag: str, dealer: int) -> VerifyOutcome:
    """Run r^2 + 2r verification rounds on ``grid``.

    Each round the dealer shares two check ancillas. The X check couples the
    data as CX control into the first ancilla, which is then measured in the
    standard basis; the Z check couples the second ancilla as CX control
    into the data, then measures it in the Fourier basis. Confirmation modes
    pick ancillas for which the check also reads out the data's value.
    """
    if mode not in MODES:
        raise ValueError(f"unknown verification mode {mode!r}")
    x_label, z_label = _CHECK_ANCILLAS[mode]
    before = set(s.cheaters.B)
    confirmed = True
    for rnd in range(s.r * s.r + 2 * s.r):
        s.net.round += 1
        xa = vhss_share(s, dealer, x_label, f"{tag}/{mode}/{rnd}/x", role="check_x", index=grid.index, round=rnd)
        za = vhss_share(s, dealer, z_label, f"{tag}/{mode}/{rnd}/z", role="check_z", index=grid.index, round=rnd)
        grid = s.fire(HookView(Hook.VERIFY_ROUND, s.n, s.t, dealer, "data", grid.index, rnd), grid)

        grid, xa = propagate((grid, xa), GateId.CX)
        bit = _data_bit(s, grid, STANDARD) if mode == CONFIRM_ZERO else None
        word = frame_measure(xa, STANDARD, s.nature, logical_bit=bit)
        word = s.announce(word, HookView(Hook.PRE_BROADCAST, s.n, s.t, dealer, "check_x", grid.index, rnd))
        dd, _ = record_check(s, tag, dealer, word, 0 if mode == CONFIRM_ZERO else None, f"{tag}/{mode}/{rnd}/x")
        if mode == CONFIRM_ZERO and dd.bit != 0:
            confirmed = False

        za, grid = propagate((za, grid), GateId.CX)
        bit = _data_bit(s, grid, FOURIER) if mode == CONFIRM_PLUS else None
        word = frame_measure(za, FOURIER, s.nature, logical_bit=bit)
        word = s.announce(word, HookView(Hook.PRE_BROADCAST, s.n, s.t, dealer, "check_z", grid.index, rnd))
        dd, _ = record_check(s, tag, dealer, word, 0 if mode == CONFIRM_PLUS else None, f"{tag}/{mode}/{rnd}/z")
        if mode == CONFIRM_PLUS and dd.bit != 0:
            confirmed = False
        s.counters.release(2 * s.n)
    flagged = s.cheaters.B - before
    s.event("verify", tag=tag, mode=mode, dealer=dealer, rounds=s.r * s.r + 2 * s.r,
            flagged=sorted(flagged), confirmed=confirmed)
    return VerifyOutcome(grid, s.cheaters, flagged, confirmed)


def teleport_h(s: Session, data: ShareGrid, plus: ShareGrid, tag: str, dealer: int) -> ShareGrid:
    """Apply logical H to ``data`` using a verified and confirmed |+> grid.

    Transversal P on both grids, CX with the |+> grid as control, P on the
    data, Fourier measurement of the control, then the table correction.
    """
    table = correction_table()
    plus = propagate(plus, GateId.P)
    data = propagate(data, GateId.P)
    plus, data = propagate((plus, data), GateId.CX)
    data = propagate(data, GateId.P)
    bit = None
    if s.register is not None:
        reg = s.register
        reg.apply(P, [plus.wire])
        reg.apply(P, [data.wire])
        reg.apply(CX, [plus.wire, data.wire])
        reg.apply(P, [data.wire])
        bit = reg.measure(plus.wire, FOURIER, s.nature)
        reg.remove_measured(plus.wire, FOURIER, bit)
    s.net.round += 1
    word = frame_measure(plus, FOURIER, s.nature, logical_bit=bit)
    word = s.announce(word, HookView(Hook.PRE_BROADCAST, s.n, s.t, dealer, "plus", plus.index))
    dd, _ = record_check(s, tag, dealer, word, None, f"{tag}/teleport")
    decoded = dd.bit
    if s.cheaters.aborted or decoded is None:
        decoded = 0  # assume the |+> outcome
    correction = table[decoded]
    if correction == "Y":
        data = propagate(data, GateId.Y)
        if s.register is not None:
            s.register.apply(Y, [data.wire])
    s.counters.release(s.n)
    s.event("teleport_h", tag=tag, dealer=dealer, outcome=bit, decoded=dd.bit, applied=correction)
    return data.relabel(f"H({data.logical_value})")


@lru_cache(maxsize=1)
def _table() -> tuple[tuple[int, str], ...]:
    return tuple(sorted(teleport_correction_table().items()))


def correction_table() -> dict[int, str]:
    """Outcome (0 = |+>, 1 = |->) to correction, as derived by the statevector oracle."""
    return dict(_table())


def apply_transversal(s: Session | None, grids, gate: GateId | str, rng: np.random.Generator | None = None):
    """Transversal gate on one grid (or a (control, target) pair for CX)."""
    gate = GateId(gate)
    code = grids[0].code if isinstance(grids, tuple) else grids.code
    allowed = transversal_gate_set(code) | {GateId.X, GateId.Y, GateId.Z}
    if gate not in allowed:
        raise NotTransversal(f"{gate.value} is not transversal for {code.name}")
    if s is not None and rng is None:
        rng = s.nature
    out = propagate(grids, gate, rng)
    if gate == GateId.CX:
        c, t = out
        if s is not None and s.register is not None:
            s.register.apply(induced_two_level(code, gate), [c.wire, t.wire])
        cl, tl = c.logical_value, t.logical_value
        return c.relabel(f"CX.c({cl},{tl})"), t.relabel(f"CX.t({cl},{tl})")
    if s is not None and s.register is not None and gate in (GateId.P, GateId.T, GateId.H):
        s.register.apply(induced_two_level(code, gate), [out.wire])
    elif s is not None and s.register is not None:
        s.register.apply({GateId.X: np.array([[0, 1], [1, 0]]), GateId.Y: Y,
                          GateId.Z: np.diag([1, -1])}[gate], [out.wire])
    return out.relabel(f"{gate.value}({out.logical_value})")


@dataclass
class ReconstructResult:
    label: str
    x_flip: int
    z_flip: int
    positions: tuple[int, ...]
    error: bool


def vhss_reconstruct(s: Session, grid: ShareGrid, reconstructor: int, tag: str) -> ReconstructResult:
    """Collect the grid at ``reconstructor`` and decode both levels.

    Second-level decoding runs on every block from a node outside B; blocks
    that fail, or whose cumulative flagged positions exceed t, put their node
    into B. Erasure recovery then uses n - 2t publicly chosen clean blocks.
    """
    if len(s.cheaters.B) > s.t:
        raise ReconstructFailure("reconstruction requires |B| <= t")
    grid = s.fire(HookView(Hook.PRE_RECONSTRUCT, s.n, s.t, reconstructor, "data", grid.index), grid)
    s.net.collect(reconstructor, tag)
    res = block_residuals(grid)
    per_block = s.cheaters.per_block[tag]
    recon = s.cheaters.recon[tag]
    flags = set()
    for j in range(s.n):
        if j in s.cheaters.B:
            continue
        found = set(np.flatnonzero(res.x_errors[j] | res.z_errors[j]).tolist())
        recon[j] |= found
        per_block[j] |= found
        if not res.ok[j] or len(per_block[j]) > s.t:
            flags.add(j)
    s.cheaters.flag(tag, flags, "reconstruction", f"{tag}/reconstruct")
    clean = sorted(set(range(s.n)) - s.cheaters.B)
    need = s.n - 2 * s.t
    if len(clean) < need:
        raise ReconstructFailure(f"only {len(clean)} clean blocks, need {need}")
    positions = tuple(sorted(int(p) for p in s.net.public.choice(clean, size=need, replace=False)))
    try:
        xf, zf = first_level_residual(s.code, res.x_logical, res.z_logical, positions)
    except (ErasureInconsistent, ErasureAmbiguous) as err:
        raise ReconstructFailure(f"erasure recovery failed for {tag}: {err}") from err
    return ReconstructResult(grid.logical_value, xf, zf, positions, bool(xf or zf))


@dataclass
class ProtocolTranscript:
    config: dict
    corrupted: list
    events: list
    cheaters: dict
    counters: dict
    outcome: str
    outputs: list | None
    broadcast_digest: str
    correction_table: dict
    state_fidelity: float | None
    adversary_log: list
    substitutions: list
    n: int
    t: int
    r: int
    num_h: int
    num_ancillas: int
    kappa: int
    peak_qubits: int
    comm_qubits: int

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "corrupted": self.corrupted,
            "events": self.events,
            "cheater_sets": self.cheaters,
            "resources": self.counters,
            "outcome": self.outcome,
            "outputs": self.outputs,
            "broadcast_digest": self.broadcast_digest,
            "teleport_correction_table": {str(k): v for k, v in self.correction_table.items()},
            "state_fidelity": self.state_fidelity,
            "adversary_log": self.adversary_log,
            "substitutions": self.substitutions,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1, default=_json_default)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    def metrics_row(self) -> dict:
        return {
            "n": self.n, "t": self.t, "r": self.r, "num_h": self.num_h,
            "num_ancillas": self.num_ancillas, "kappa": self.kappa,
            "peak_qubits": self.peak_qubits, "comm_qubits": self.comm_qubits,
            "outcome": self.outcome,
        }


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o)}")


def _round(v: float) -> float:
    return float(round(v, 12)) + 0.0


def _wires_needed(n: int, circuit: CircuitDescription) -> int:
    return n + circuit.num_ancillas + (1 if circuit.num_h else 0)


def reference_register(inputs: list[np.ndarray], circuit: CircuitDescription, code: CssCode, ceiling: int = REGISTER_CEILING) -> LogicalRegister:
    """Run the unencoded circuit directly on the input amplitudes."""
    reg = LogicalRegister(ceiling)
    wires = [reg.add(a) for a in inputs]
    mats = {"H": H, "P": P, "T": T}
    for g in circuit.gates:
        if g.name == "CX":
            reg.apply(CX, [wires[g.wires[0]], wires[g.wires[1]]])
        elif g.name == "ancilla0":
            new = reg.add(np.array([1, 0], dtype=complex))
            reg.retire(wires[g.wires[0]])
            wires[g.wires[0]] = new
        else:
            reg.apply(mats[g.name], [wires[g.wires[0]]])
    return reg


def mpqc_run(config: ProtocolConfig | dict, code: CssCode | None = None) -> ProtocolTranscript:
    """Sharing, verification, computation and reconstruction for one config."""
    cfg = config if isinstance(config, ProtocolConfig) else ProtocolConfig.from_json(config)
    code, circuit, input_labels = validate_config(cfg, code)
    n, t, r = code.n, cfg.t, cfg.r
    strategy = strategy_from_json(cfg.adversary)
    track = cfg.track_state
    if track is None:
        track = _wires_needed(n, circuit) <= REGISTER_CEILING
    elif track and _wires_needed(n, circuit) > REGISTER_CEILING:
        raise ConfigInvalid(f"state tracking needs {_wires_needed(n, circuit)} register qubits")
    s = Session.create(code, t, r, cfg.seed, strategy, track_state=track)
    c = s.counters

    input_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(5)[4])
    input_amps = [label_state(lab, input_rng) for lab in input_labels]

    # Sharing
    c.phase = "sharing"
    grids: list[ShareGrid] = []
    for i in range(n):
        g = vhss_share(s, i, f"rho^{i}", f"input{i}", index=i)
        declared = g.logical_value == f"rho^{i}"
        g = attach_wire(s, g, input_amps[i] if declared else None)
        grids.append(g)
        c.inputs += 1
    s.event("sharing_done", qubits_per_node=int(c.workspace.max()))

    # Verification
    c.phase = "verification"
    for i in range(n):
        grids[i] = vhss_verify(s, grids[i], VERIFY_INPUT, f"input{i}", i).grid

    # Computation
    c.phase = "computation"
    for k, gate in enumerate(circuit.gates):
        w = gate.wires
        if gate.name in ("P", "T"):
            grids[w[0]] = apply_transversal(s, grids[w[0]], gate.name)
        elif gate.name == "CX":
            grids[w[0]], grids[w[1]] = apply_transversal(s, (grids[w[0]], grids[w[1]]), "CX")
        elif gate.name == "H":
            dealer = s.pick_dealer()
            tag = f"plus{k}"
            plus = attach_wire(s, vhss_share(s, dealer, "|+>", tag, index=n + k))
            plus = vhss_verify(s, plus, VERIFY_INPUT, tag, dealer).grid
            plus = vhss_verify(s, plus, CONFIRM_PLUS, tag, dealer).grid
            grids[w[0]] = teleport_h(s, grids[w[0]], plus, tag, dealer)
            c.h_gates += 1
        elif gate.name == "ancilla0":
            dealer = s.pick_dealer()
            tag = f"zero{k}"
            fresh = attach_wire(s, vhss_share(s, dealer, "|0>", tag, index=n + k))
            fresh = vhss_verify(s, fresh, VERIFY_INPUT, tag, dealer).grid
            fresh = vhss_verify(s, fresh, CONFIRM_ZERO, tag, dealer).grid
            old = grids[w[0]]
            if s.register is not None:
                s.register.retire(old.wire)
            grids[w[0]] = ShareGrid(w[0], code, fresh.logical_value, fresh.x, fresh.z, fresh.wire)
            c.release(n)
            c.ancillas += 1
        s.event("gate", gate=str(gate), B=sorted(s.cheaters.B))

    # Reconstruction: node j receives output wire j.
    c.phase = "reconstruction"
    outputs = []
    for j in range(n):
        if s.cheaters.aborted:
            s.fire(HookView(Hook.PRE_RECONSTRUCT, n, t, j, "data", j), grids[j])
            s.net.collect(j, f"output{j}")
            outputs.append(None)
            continue
        res = vhss_reconstruct(s, grids[j], j, f"output{j}")
        if s.register is not None:
            s.register.pauli(res.x_flip, res.z_flip, grids[j].wire)
        outputs.append(res)
        s.event("reconstruct", node=j, positions=list(res.positions), x_flip=res.x_flip, z_flip=res.z_flip)

    aborted = s.cheaters.aborted
    corrupted = sorted(s.adversary.corrupted)
    out_json = []
    for j in range(n):
        if aborted:
            # Abort sequence: honest nodes hold |0> in place of their output.
            out_json.append(None if j in corrupted else {"label": "|0>", "bloch": [0.0, 0.0, 1.0], "error": False})
            continue
        res = outputs[j]
        entry = {"label": res.label, "error": res.error}
        if s.register is not None:
            entry["bloch"] = [_round(v) for v in bloch_vector(s.register.reduced(grids[j].wire))]
        out_json.append(entry)

    state_fid = None
    if s.register is not None and not aborted:
        ref = reference_register(input_amps, circuit, code)
        state_fid = _round(fidelity(ref.amps, s.register.amps))

    return ProtocolTranscript(
        config={**cfg.to_json(), "n": n, "track_state": track},
        corrupted=corrupted,
        events=s.events,
        cheaters=s.cheaters.to_json(),
        counters=c.to_json(),
        outcome="aborted" if aborted else "success",
        outputs=out_json,
        broadcast_digest=s.net.digest(),
        correction_table=correction_table(),
        state_fidelity=state_fid,
        adversary_log=s.adversary.log,
        substitutions=s.substitutions,
        n=n, t=t, r=r,
        num_h=c.h_gates, num_ancillas=c.ancillas, kappa=c.kappa,
        peak_qubits=int(c.peak.max()),
        comm_qubits=int(c.comm().max()),
    )


@dataclass
class VhssReport:
    """Result of one share / verify / reconstruct cycle on a single input."""

    B: set
    per_block: dict
    flagged_blocks: set
    fidelity: float | None
    reconstructed: bool
    error: bool
    comm_per_node: np.ndarray
    peak: np.ndarray
    aborted: bool


def vhss_roundtrip(code: CssCode, t: int, r: int, seed: int, strategy: AdversaryStrategy | None = None,
                   dealer: int = 0, label: str = "random", reconstructor: int | None = None,
                   mode: str = VERIFY_INPUT) -> VhssReport:
    """Share one input, verify it and reconstruct it at ``reconstructor``."""
    s = Session.create(code, t, r, seed, strategy)
    amps = label_state(label, s.nature)
    s.counters.phase = "sharing"
    g = attach_wire(s, vhss_share(s, dealer, f"rho^{dealer}", "vhss", index=dealer), amps)
    s.counters.phase = "verification"
    g = vhss_verify(s, g, mode, "vhss", dealer).grid
    flagged_blocks = {j for j, pos in s.cheaters.per_block["vhss"].items() if pos}
    comm = s.counters.comm().copy()
    s.counters.phase = "reconstruction"
    if s.cheaters.aborted:
        return VhssReport(set(s.cheaters.B), _blocks(s), flagged_blocks, None, False, True, comm,
                          s.counters.peak.copy(), True)
    res = vhss_reconstruct(s, g, dealer if reconstructor is None else reconstructor, "vhss")
    s.register.pauli(res.x_flip, res.z_flip, g.wire)
    rho = s.register.reduced(g.wire)
    fid = float(np.real(amps.conj() @ rho @ amps))
    return VhssReport(set(s.cheaters.B), _blocks(s), flagged_blocks, fid, True, res.error, comm,
                      s.counters.peak.copy(), s.cheaters.aborted)


def _blocks(s: Session) -> dict:
    return {j: set(v) for j, v in s.cheaters.per_block["vhss"].items() if v}

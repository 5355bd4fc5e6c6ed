"""Network model, cheater bookkeeping and resource counters for one run."""

from __future__ import annotations

import hashlib
import json
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class BroadcastEntry:
    sender: int
    round: int
    payload: tuple


@dataclass
class ResourceCounters:
    """Per-node qubit workspace and traffic.

    ``sent`` / ``received`` count qubits over pairwise channels; broadcast
    traffic is counted separately in bits. κ is the number of two-level
    sharings: inputs plus verified ancillas plus teleported H gates.
    """

    n: int
    workspace: np.ndarray = None
    peak: np.ndarray = None
    sent: np.ndarray = None
    received: np.ndarray = None
    broadcast_bits: np.ndarray = None
    inputs: int = 0
    ancillas: int = 0
    h_gates: int = 0
    phase_comm: dict = field(default_factory=dict)
    phase: str = "sharing"

    def __post_init__(self):
        for name in ("workspace", "peak", "sent", "received", "broadcast_bits"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(self.n, dtype=np.int64))

    @property
    def kappa(self) -> int:
        return self.inputs + self.ancillas + self.h_gates

    def hold(self, qubits_per_node: int) -> None:
        self.workspace += qubits_per_node
        np.maximum(self.peak, self.workspace, out=self.peak)

    def release(self, qubits_per_node: int) -> None:
        self.workspace -= qubits_per_node
        if (self.workspace < 0).any():
            raise RuntimeError("workspace went negative")

    def comm(self) -> np.ndarray:
        return self.sent + self.received

    def count_send(self, src: int, dst: int, qubits: int) -> None:
        self.sent[src] += qubits
        self.received[dst] += qubits
        per = self.phase_comm.setdefault(self.phase, np.zeros(self.n, dtype=np.int64))
        per[src] += qubits
        per[dst] += qubits

    def to_json(self) -> dict:
        return {
            "peak_qubits": self.peak.tolist(),
            "qubits_sent": self.sent.tolist(),
            "qubits_received": self.received.tolist(),
            "broadcast_bits": self.broadcast_bits.tolist(),
            "comm_by_phase": {k: v.tolist() for k, v in sorted(self.phase_comm.items())},
            "inputs": self.inputs,
            "ancillas": self.ancillas,
            "h_gates": self.h_gates,
            "kappa": self.kappa,
        }


@dataclass
class NetworkModel:
    """Synchronous network: private FIFO channels plus an append-only broadcast log."""

    n: int
    public: np.random.Generator
    counters: ResourceCounters = None
    broadcast_log: list[BroadcastEntry] = field(default_factory=list)
    queues: dict = field(default_factory=lambda: defaultdict(deque))  # keyed by receiver
    round: int = 0

    def __post_init__(self):
        if self.counters is None:
            self.counters = ResourceCounters(self.n)

    def send(self, src: int, dst: int, tag: str, qubits: int = 1) -> None:
        if src == dst:
            return
        self.queues[dst].append((src, tag, qubits))
        self.counters.count_send(src, dst, qubits)

    def deliver(self, dst: int) -> list[tuple[int, str, int]]:
        q = self.queues[dst]
        out = list(q)
        q.clear()
        return out

    def distribute(self, dealer: int, tag: str) -> None:
        """Traffic of one two-level sharing: dealer -> all, then every node -> all."""
        for j in range(self.n):
            self.send(dealer, j, f"{tag}/first")
        for j in range(self.n):
            for l in range(self.n):
                self.send(j, l, f"{tag}/second")
        for j in range(self.n):
            self.deliver(j)

    def collect(self, reconstructor: int, tag: str) -> None:
        for l in range(self.n):
            self.send(l, reconstructor, f"{tag}/collect", self.n)
        self.deliver(reconstructor)

    def broadcast(self, sender: int, payload) -> BroadcastEntry:
        entry = BroadcastEntry(int(sender), self.round, tuple(int(b) for b in payload))
        self.broadcast_log.append(entry)
        self.counters.broadcast_bits[sender] += len(entry.payload)
        return entry

    def view(self, node: int) -> tuple[BroadcastEntry, ...]:
        # Authenticated broadcast: every node sees the same log.
        return tuple(self.broadcast_log)

    def digest(self) -> str:
        h = hashlib.sha256()
        for e in self.broadcast_log:
            h.update(json.dumps([e.sender, e.round, list(e.payload)]).encode())
        return h.hexdigest()


@dataclass
class CheaterSets:
    """Public apparent-cheater sets.

    ``per_grid[tag]`` is the dealer-level set B^i of the grid with that tag,
    ``per_block[tag][j]`` the cumulative positions flagged in block j (B^{i,j})
    and ``recon[tag][j]`` the positions found at reconstruction. ``B`` only grows.
    """

    n: int
    t: int
    B: set = field(default_factory=set)
    per_grid: dict = field(default_factory=lambda: defaultdict(set))
    per_block: dict = field(default_factory=lambda: defaultdict(lambda: defaultdict(set)))
    recon: dict = field(default_factory=lambda: defaultdict(lambda: defaultdict(set)))
    history: list = field(default_factory=list)
    abort_at: str | None = None

    @property
    def aborted(self) -> bool:
        return self.abort_at is not None

    def flag(self, tag: str, nodes, reason: str, checkpoint: str) -> bool:
        """Add ``nodes`` to B^tag and B; returns True if B grew."""
        nodes = {int(v) for v in nodes}
        if not nodes:
            return False
        self.per_grid[tag] |= nodes
        new = nodes - self.B
        if not new:
            return False
        self.B |= new
        self.history.append({"at": checkpoint, "reason": reason, "added": sorted(new), "B": sorted(self.B)})
        if len(self.B) > self.t and self.abort_at is None:
            self.abort_at = checkpoint
        return True

    def to_json(self) -> dict:
        return {
            "B": sorted(self.B),
            "per_grid": {k: sorted(v) for k, v in sorted(self.per_grid.items())},
            "per_block": {k: {str(j): sorted(s) for j, s in sorted(d.items()) if s}
                          for k, d in sorted(self.per_block.items())},
            "reconstruction": {k: {str(j): sorted(s) for j, s in sorted(d.items()) if s}
                               for k, d in sorted(self.recon.items())},
            "history": self.history,
            "abort_at": self.abort_at,
        }

"""Non-adaptive cheating strategies.

The engine fires a hook for one grid (or one measured word) at a time and
applies the returned mutations after checking that they only touch what the
corrupted nodes control: the slots they hold (column l of every grid), their
own block while they are encoding it, first-level content of grids they deal,
and the bits they announce.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from typing import ClassVar

import numpy as np


class IllegalMutation(RuntimeError):
    pass


class Hook(str, enum.Enum):
    POST_SHARE = "post-share"
    VERIFY_ROUND = "per-verify-round"
    PRE_BROADCAST = "pre-measure-broadcast"
    PRE_RECONSTRUCT = "pre-reconstruct"


PAULIS = ("X", "Y", "Z")


@dataclass(frozen=True)
class HookView:
    """What the adversary sees when a hook fires.

    Attributes:
        hook: which hook fired.
        n: number of nodes (and block length).
        t: tolerated number of cheaters.
        dealer: node that dealt the grid in question.
        role: "data" for input / ancilla data grids, "check_x" / "check_z"
            for verification ancillas, "plus" for a teleportation ancilla.
        index: grid index (input wire or ancilla counter).
        round: verification round, if any.
    """

    hook: Hook
    n: int
    t: int
    dealer: int
    role: str = "data"
    index: int = 0
    round: int | None = None


@dataclass(frozen=True, eq=False)
class Mutation:
    """A single adversarial action.

    ``kind`` is one of ``inject`` (Pauli on slots), ``first_level`` (logical
    Pauli on whole blocks, dealer only), ``substitute`` (dealer replaces the
    encoded state) or ``flip`` (announced bits XOR ``mask``).
    """

    kind: str
    slots: tuple[tuple[int, int], ...] = ()
    pauli: str = "X"
    blocks: tuple[int, ...] = ()
    mask: np.ndarray | None = None
    label: str | None = None


def check_mutation(m: Mutation, corrupted: frozenset[int], view: HookView) -> None:
    """Raise :class:`IllegalMutation` if ``m`` reaches beyond the corrupted nodes."""
    if m.kind == "inject":
        if m.pauli not in PAULIS:
            raise IllegalMutation(f"unknown Pauli {m.pauli!r}")
        for j, l in m.slots:
            own_block = view.hook == Hook.POST_SHARE and j in corrupted
            if l not in corrupted and not own_block:
                raise IllegalMutation(f"slot {(j, l)} is held by honest node {l}")
    elif m.kind in ("first_level", "substitute"):
        if view.hook != Hook.POST_SHARE or view.dealer not in corrupted:
            raise IllegalMutation(f"{m.kind} needs a corrupted dealer at post-share")
    elif m.kind == "flip":
        if view.hook != Hook.PRE_BROADCAST:
            raise IllegalMutation("bit flips only happen when outcomes are announced")
        cols = np.flatnonzero(np.asarray(m.mask).any(axis=0))
        honest = [int(c) for c in cols if c not in corrupted]
        if honest:
            raise IllegalMutation(f"flip mask touches announcements of honest nodes {honest}")
    else:
        raise IllegalMutation(f"unknown mutation kind {m.kind!r}")


def _random_pauli(rng: np.random.Generator) -> str:
    return PAULIS[int(rng.integers(0, 3))]


@dataclass(frozen=True)
class AdversaryStrategy:
    """Base strategy; ``corrupted`` pins the corrupted set, else it is drawn."""

    variant: ClassVar[str] = "Honest"
    corrupted: tuple[int, ...] | None = None

    def corrupt_size(self, t: int) -> int:
        return t

    def act(self, view: HookView, corrupted: frozenset[int], rng: np.random.Generator) -> list[Mutation]:
        return []

    def to_json(self) -> dict:
        out = {"variant": self.variant}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = _jsonable(v)
        return out


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, enum.Enum):
        return v.value
    return v


@dataclass(frozen=True)
class Honest(AdversaryStrategy):
    variant: ClassVar[str] = "Honest"

    def corrupt_size(self, t: int) -> int:
        return 0


@dataclass(frozen=True)
class PauliInjector(AdversaryStrategy):
    """Inject a Pauli on chosen slots whenever a matching hook fires.

    Attributes:
        hooks: hooks at which to act.
        roles: grid roles to act on ("data", "check_x", "check_z", "plus").
        dealers: only act on grids dealt by these nodes (None: any).
        slots: explicit slots; when empty, ``count`` random blocks are hit
            at the column of a random corrupted node.
        pauli: "X", "Y", "Z" or "random".
        paulis: optional per-slot Paulis, overriding ``pauli``.
        count: number of random blocks when ``slots`` is empty.
        once: act only at the first matching hook.
    """

    variant: ClassVar[str] = "PauliInjector"
    hooks: tuple[str, ...] = (Hook.POST_SHARE.value,)
    roles: tuple[str, ...] = ("data",)
    dealers: tuple[int, ...] | None = None
    slots: tuple[tuple[int, int], ...] = ()
    pauli: str = "X"
    paulis: tuple[str, ...] | None = None
    count: int = 1
    once: bool = True

    def act(self, view, corrupted, rng):
        if view.hook.value not in self.hooks or view.role not in self.roles:
            return []
        if self.dealers is not None and view.dealer not in self.dealers:
            return []
        if not corrupted:
            return []
        if self.slots:
            slots = tuple((int(j), int(l)) for j, l in self.slots)
        else:
            col = int(sorted(corrupted)[int(rng.integers(0, len(corrupted)))])
            blocks = rng.choice(view.n, size=min(self.count, view.n), replace=False)
            slots = tuple((int(j), col) for j in sorted(blocks))
        if self.paulis is not None:
            if len(self.paulis) != len(slots):
                raise ValueError("one Pauli per slot")
            return [Mutation("inject", slots=(s,), pauli=p) for s, p in zip(slots, self.paulis)]
        pauli = _random_pauli(rng) if self.pauli == "random" else self.pauli
        return [Mutation("inject", slots=slots, pauli=pauli)]


@dataclass(frozen=True)
class CheatingDealer(AdversaryStrategy):
    """A corrupted dealer that plants first-level errors or substitutes its state.

    Attributes:
        dealer: the cheating node; it is the whole corrupted set.
        errors: (block, pauli) pairs applied as logical Paulis on those blocks.
        substitute: label of the state encoded instead of the declared one.
        roles: which of its dealt grids to tamper with.
    """

    variant: ClassVar[str] = "CheatingDealer"
    dealer: int = 0
    errors: tuple[tuple[int, str], ...] = ()
    substitute: str | None = None
    roles: tuple[str, ...] = ("data",)

    def corrupt_size(self, t: int) -> int:
        return 1

    def act(self, view, corrupted, rng):
        if view.hook != Hook.POST_SHARE or view.dealer != self.dealer or view.role not in self.roles:
            return []
        out = [Mutation("first_level", blocks=(int(j),), pauli=p) for j, p in self.errors]
        if self.substitute is not None:
            out.append(Mutation("substitute", label=self.substitute))
        return out


@dataclass(frozen=True)
class LyingBroadcaster(AdversaryStrategy):
    """Corrupted nodes flip some of the outcome bits they announce.

    Attributes:
        blocks: blocks whose announced bit is flipped at each corrupted column
            (None: each block independently with probability ``rate``).
        rate: flip probability when ``blocks`` is None.
        roles: measured grids to lie about.
    """

    variant: ClassVar[str] = "LyingBroadcaster"
    blocks: tuple[int, ...] | None = (0,)
    rate: float = 0.5
    roles: tuple[str, ...] = ("check_x", "check_z", "plus")

    def act(self, view, corrupted, rng):
        if view.hook != Hook.PRE_BROADCAST or view.role not in self.roles:
            return []
        mask = np.zeros((view.n, view.n), dtype=np.uint8)
        for l in corrupted:
            if self.blocks is None:
                mask[:, l] = rng.random(view.n) < self.rate
            else:
                mask[list(self.blocks), l] = 1
        if not mask.any():
            return []
        return [Mutation("flip", mask=mask)]


@dataclass(frozen=True)
class OverThreshold(AdversaryStrategy):
    """``t + extra`` corrupted nodes put a fresh random Pauli on every held slot at every hook."""

    variant: ClassVar[str] = "OverThreshold"
    extra: int = 1

    def corrupt_size(self, t: int) -> int:
        return t + self.extra

    def act(self, view, corrupted, rng):
        if view.hook == Hook.PRE_BROADCAST:
            return []
        groups: dict[str, list] = {p: [] for p in PAULIS}
        for l in sorted(corrupted):
            for j in range(view.n):
                groups[_random_pauli(rng)].append((j, l))
        return [Mutation("inject", slots=tuple(s), pauli=p) for p, s in groups.items() if s]


VARIANTS: dict[str, type[AdversaryStrategy]] = {
    cls.variant: cls for cls in (Honest, PauliInjector, CheatingDealer, LyingBroadcaster, OverThreshold)
}


def strategy_from_json(data: dict | None) -> AdversaryStrategy:
    if not data:
        return Honest()
    data = dict(data)
    name = data.pop("variant", "Honest")
    if name not in VARIANTS:
        raise ValueError(f"unknown adversary variant {name!r}; known: {sorted(VARIANTS)}")
    cls = VARIANTS[name]
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown fields for {name}: {sorted(unknown)}")
    kwargs = {k: _tuplify(v) for k, v in data.items()}
    return cls(**kwargs)


def _tuplify(v):
    if isinstance(v, list):
        return tuple(_tuplify(x) for x in v)
    return v


def corrupt_set(strategy: AdversaryStrategy, n: int, t: int, seed: int | np.random.Generator) -> frozenset[int]:
    """The corrupted nodes, fixed before the run starts."""
    if n < 4:
        raise ValueError("need at least 4 nodes")
    if strategy.corrupted is not None:
        chosen = frozenset(int(c) for c in strategy.corrupted)
    elif isinstance(strategy, CheatingDealer):
        chosen = frozenset({strategy.dealer})
    else:
        size = strategy.corrupt_size(t)
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        chosen = frozenset(int(c) for c in rng.choice(n, size=size, replace=False)) if size else frozenset()
    if any(not 0 <= c < n for c in chosen):
        raise ValueError(f"corrupted node out of range: {sorted(chosen)}")
    return chosen


@dataclass
class Adversary:
    """A strategy bound to its corrupted set and random stream for one run."""

    strategy: AdversaryStrategy
    corrupted: frozenset[int]
    rng: np.random.Generator
    fired: set = field(default_factory=set)
    log: list = field(default_factory=list)

    def intervene(self, view: HookView) -> list[Mutation]:
        if not self.corrupted and not isinstance(self.strategy, Honest):
            return []
        key = (view.hook, view.role, view.dealer)
        if getattr(self.strategy, "once", False) and key in self.fired:
            return []
        muts = self.strategy.act(view, self.corrupted, self.rng)
        for m in muts:
            check_mutation(m, self.corrupted, view)
        if muts:
            self.fired.add(key)
            self.log.append({"hook": view.hook.value, "role": view.role, "dealer": view.dealer,
                             "round": view.round, "mutations": [_describe(m) for m in muts]})
        return muts


def _describe(m: Mutation) -> dict:
    d = {"kind": m.kind}
    if m.slots:
        d["slots"] = [list(s) for s in m.slots]
        d["pauli"] = m.pauli
    if m.blocks:
        d["blocks"] = list(m.blocks)
        d["pauli"] = m.pauli
    if m.mask is not None:
        d["flips"] = np.argwhere(m.mask).tolist()
    if m.label is not None:
        d["label"] = m.label
    return d


def intervene(strategy: AdversaryStrategy, view: HookView, corrupted: frozenset[int], rng: np.random.Generator) -> list[Mutation]:
    """Stateless form: the strategy's mutations at ``view``, containment-checked."""
    muts = strategy.act(view, corrupted, rng)
    for m in muts:
        check_mutation(m, corrupted, view)
    return muts

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpqc_sim.adversary import (
    VARIANTS,
    Adversary,
    CheatingDealer,
    Hook,
    HookView,
    Honest,
    IllegalMutation,
    LyingBroadcaster,
    Mutation,
    OverThreshold,
    PauliInjector,
    check_mutation,
    corrupt_set,
    intervene,
    strategy_from_json,
)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([7, 15]), st.integers(0, 3), st.integers(0, 2**31 - 1))
def test_corrupt_set_sizes(n, t, seed):
    assert corrupt_set(Honest(), n, t, seed) == frozenset()
    assert len(corrupt_set(PauliInjector(), n, t, seed)) == t
    assert len(corrupt_set(OverThreshold(), n, t, seed)) == t + 1
    assert corrupt_set(CheatingDealer(dealer=3), n, t, seed) == {3}
    assert corrupt_set(PauliInjector(), n, t, seed) == corrupt_set(PauliInjector(), n, t, seed)


def test_corrupt_set_pinned_and_bounds():
    assert corrupt_set(PauliInjector(corrupted=(2, 4)), 7, 1, 0) == {2, 4}
    with pytest.raises(ValueError):
        corrupt_set(PauliInjector(corrupted=(9,)), 7, 1, 0)


def view(hook=Hook.POST_SHARE, dealer=0, role="data"):
    return HookView(hook, 7, 1, dealer, role)


def test_inject_containment():
    corrupted = frozenset({3})
    check_mutation(Mutation("inject", slots=((0, 3), (6, 3))), corrupted, view())
    # a corrupted encoder may spoil its own block at sharing time
    check_mutation(Mutation("inject", slots=((3, 0),)), corrupted, view())
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("inject", slots=((3, 0),)), corrupted, view(Hook.VERIFY_ROUND))
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("inject", slots=((0, 1),)), corrupted, view())
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("inject", slots=((0, 3),), pauli="W"), corrupted, view())


def test_dealer_only_mutations():
    corrupted = frozenset({2})
    check_mutation(Mutation("first_level", blocks=(0,)), corrupted, view(dealer=2))
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("first_level", blocks=(0,)), corrupted, view(dealer=1))
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("substitute", label="|1>"), corrupted, view(Hook.VERIFY_ROUND, dealer=2))


def test_flip_containment():
    corrupted = frozenset({5})
    mask = np.zeros((7, 7), dtype=np.uint8)
    mask[0, 5] = 1
    check_mutation(Mutation("flip", mask=mask), corrupted, view(Hook.PRE_BROADCAST))
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("flip", mask=mask), corrupted, view(Hook.POST_SHARE))
    mask[0, 1] = 1
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("flip", mask=mask), corrupted, view(Hook.PRE_BROADCAST))
    with pytest.raises(IllegalMutation):
        check_mutation(Mutation("teleport"), corrupted, view())


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(sorted(VARIANTS)), st.integers(0, 2**31 - 1), st.sampled_from(list(Hook)),
       st.sampled_from(["data", "check_x", "check_z", "plus"]))
def test_builtin_strategies_stay_contained(name, seed, hook, role):
    rng = np.random.default_rng(seed)
    strat = VARIANTS[name]()
    corrupted = corrupt_set(strat, 7, 1, rng)
    dealer = int(rng.integers(0, 7)) if name != "CheatingDealer" else 0
    # intervene re-checks every mutation and would raise on a violation
    muts = intervene(strat, HookView(hook, 7, 1, dealer, role), corrupted, rng)
    for m in muts:
        check_mutation(m, corrupted, HookView(hook, 7, 1, dealer, role))


def test_pauli_injector_explicit_slots_and_per_slot_paulis():
    strat = PauliInjector(slots=((1, 4), (1, 5)), paulis=("X", "Z"), corrupted=(4, 5))
    muts = intervene(strat, view(), frozenset({4, 5}), np.random.default_rng(0))
    assert [(m.slots, m.pauli) for m in muts] == [(((1, 4),), "X"), (((1, 5),), "Z")]
    assert intervene(strat, view(role="plus"), frozenset({4, 5}), np.random.default_rng(0)) == []


def test_once_fires_only_once_per_grid():
    adv = Adversary(PauliInjector(), frozenset({1}), np.random.default_rng(0))
    assert adv.intervene(view())
    assert adv.intervene(view()) == []
    assert adv.intervene(view(dealer=4))
    assert len(adv.log) == 2 and adv.log[0]["hook"] == "post-share"


def test_lying_broadcaster_masks_only_corrupted_columns():
    muts = intervene(LyingBroadcaster(blocks=None, rate=1.0), view(Hook.PRE_BROADCAST, role="check_x"),
                     frozenset({2}), np.random.default_rng(0))
    assert len(muts) == 1 and muts[0].mask[:, 2].all() and muts[0].mask.sum() == 7


def test_over_threshold_hits_every_held_slot():
    muts = intervene(OverThreshold(), view(Hook.VERIFY_ROUND), frozenset({0, 6}), np.random.default_rng(1))
    slots = sorted(s for m in muts for s in m.slots)
    assert slots == sorted((j, l) for l in (0, 6) for j in range(7))


@pytest.mark.parametrize("strat", [
    Honest(),
    PauliInjector(hooks=("post-share", "pre-reconstruct"), slots=((0, 1),), paulis=("Y",), corrupted=(1,)),
    CheatingDealer(dealer=2, errors=((0, "X"), (3, "Z")), substitute="|1>"),
    LyingBroadcaster(blocks=(0, 2)),
    OverThreshold(extra=2),
])
def test_strategy_json_roundtrip(strat):
    data = json.loads(json.dumps(strat.to_json()))
    assert strategy_from_json(data) == strat


def test_strategy_from_json_errors():
    assert strategy_from_json(None) == Honest()
    with pytest.raises(ValueError):
        strategy_from_json({"variant": "Sneaky"})
    with pytest.raises(ValueError):
        strategy_from_json({"variant": "PauliInjector", "bogus": 1})
